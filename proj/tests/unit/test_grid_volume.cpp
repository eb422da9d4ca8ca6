#include <cmath>

#include <gtest/gtest.h>

#include "stripgreen/grid_volume.hpp"

namespace {

using namespace stripgreen;

const OperatorParams kStandard{1.0, 1.0, 1.0, 2.0};

double source(double x, double t) { return std::cos(2.0 * t) * x * (1.5 - x) + 0.5; }

SpaceTimeField sampled(int nx, int nt, const StripDomain& d) {
    SpaceTimeField F(nx, nt, d);
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < nx; ++i) F(i, n) = source(F.x(i), F.t(n));
    return F;
}

double max_error(int nt) {
    ProblemSpec sp;
    sp.params = kStandard;
    const GridVolumeOperator op(sp, 11, nt);
    const auto F = sampled(11, nt, sp.domain);
    ProblemSpec exact = sp;
    exact.source = source;
    double worst = 0.0;
    for (int n : {(nt - 1) / 5, nt - 1})
        for (int i : {1, 5, 8}) worst = std::max(worst, std::abs(op.apply_at(F, i, n) - volume_term(F.x(i), F.t(n), exact)));
    return worst;
}

TEST(GridVolume, ConvergesToAdaptiveVolumeTermAtSecondOrder) {
    const double e11 = max_error(11), e21 = max_error(21);
    EXPECT_LT(e11, 1e-3);
    EXPECT_LT(e21, 2.5e-4);
    EXPECT_GT(e11 / e21, 3.0);
}

TEST(GridVolume, ZeroSourceGivesZero) {
    ProblemSpec sp;
    sp.params = kStandard;
    const GridVolumeOperator op(sp, 6, 5);
    const SpaceTimeField F(6, 5, sp.domain);
    for (int n = 1; n < 5; ++n)
        for (int i = 1; i < 5; ++i) EXPECT_EQ(op.apply_at(F, i, n), 0.0);
}

TEST(GridVolume, InitialRowHasNoVolumeContribution) {
    ProblemSpec sp;
    sp.params = kStandard;
    const GridVolumeOperator op(sp, 6, 5);
    const auto F = sampled(6, 5, sp.domain);
    EXPECT_EQ(op.apply_at(F, 2, 0), 0.0);
}

TEST(GridVolume, SymmetricUnderReflection) {
    ProblemSpec sp;
    sp.params = kStandard;
    const GridVolumeOperator op(sp, 9, 5);
    for (int lag = 0; lag < 4; ++lag)
        for (int side = 0; side < 2; ++side)
            for (int j = 0; j < 9; ++j) EXPECT_NEAR(op.weight(2, lag, side, j), op.weight(6, lag, side, 8 - j), 1e-13);
}

TEST(GridVolume, WindowMassGrowsWithWindow) {
    ProblemSpec sp;
    sp.params = kStandard;
    const GridVolumeOperator op(sp, 11, 11);
    double prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double m = op.window_mass(k);
        EXPECT_GT(m, prev);
        prev = m;
    }
    // the Green mass over [0, T] is at most T
    EXPECT_LE(op.window_mass(10), 1.0);
}

TEST(GridVolume, RejectsCoarseGridsAndInadmissibleOperators) {
    ProblemSpec sp;
    sp.params = kStandard;
    EXPECT_THROW(GridVolumeOperator(sp, 3, 5), ConfigError);
    EXPECT_THROW(GridVolumeOperator(sp, 6, 1), ConfigError);
    sp.params.b = -1.0;
    EXPECT_THROW(GridVolumeOperator(sp, 6, 5), DomainError);
}

}  // namespace
