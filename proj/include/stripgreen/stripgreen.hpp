#pragma once

#include "stripgreen/errors.hpp"
#include "stripgreen/quadrature.hpp"
#include "stripgreen/special_functions.hpp"
#include "stripgreen/kernel.hpp"
#include "stripgreen/theta.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/green_solver.hpp"
#include "stripgreen/grid_volume.hpp"
#include "stripgreen/junction.hpp"
#include "stripgreen/nonlinear.hpp"
#include "stripgreen/esjj.hpp"
#include "stripgreen/oracles/laplace.hpp"
#include "stripgreen/oracles/eigenmode.hpp"
#include "stripgreen/oracles/fd_integro.hpp"
#include "stripgreen/oracles/fd_esjj.hpp"
