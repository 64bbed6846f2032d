#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "photocell/experiments.hpp"

using namespace photocell;

TEST(Spacing, EndpointsAreExact) {
    const auto a = linspace(1e-3, 50e-3, 100);
    ASSERT_EQ(a.size(), 100u);
    EXPECT_EQ(a.front(), 1e-3);
    EXPECT_EQ(a.back(), 50e-3);
    const auto g = logspace(1e-6, 1.0, 7);
    EXPECT_EQ(g.front(), 1e-6);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_NEAR(g[3], 1e-3, 1e-15);
}

TEST(CompareCurrents, NoGainOnDiagonal) {
    for (double g : {2e-3, 12e-3, 40e-3}) {
        const auto r = compare_currents(with_transfer_rates(ModelParams{}, g, g));
        EXPECT_LT(std::abs(r.relative_enhancement), 0.01) << "gamma = " << g;
    }
}

TEST(CompareCurrents, CoherenceStability) {
    EXPECT_TRUE(coherence_stable(with_transfer_rates(ModelParams{}, 25e-3, 12e-3)));
    EXPECT_FALSE(coherence_stable(with_transfer_rates(ModelParams{}, 35e-3, 12e-3)));
}

TEST(SweepRateGrid, CellsEqualStandaloneComparisonsBitwise) {
    const ModelParams base;
    const auto grid = sweep_rate_grid(base, {1e-3, 50e-3}, {2e-3, 40e-3}, 7, 5, 3);
    ASSERT_EQ(grid.cells.size(), 35u);
    EXPECT_EQ(grid.failed_count(), 0u);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t k = 0; k < 5; ++k) {
            const auto solo =
                compare_currents(with_transfer_rates(base, grid.gamma_x_axis[i], grid.gamma_c_axis[k]));
            const auto& cell = grid.at(i, k);
            EXPECT_EQ(std::memcmp(&solo.relative_enhancement, &cell.relative_enhancement, sizeof(double)), 0);
            EXPECT_EQ(std::memcmp(&solo.j_coupled, &cell.j_coupled, sizeof(double)), 0);
        }
}

TEST(SweepRateGrid, IndependentOfWorkerCount) {
    const auto a = sweep_rate_grid(ModelParams{}, {1e-3, 50e-3}, {1e-3, 50e-3}, 12, 12, 1);
    const auto b = sweep_rate_grid(ModelParams{}, {1e-3, 50e-3}, {1e-3, 50e-3}, 12, 12, 4);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    EXPECT_EQ(std::memcmp(a.cells.data(), b.cells.data(), a.cells.size() * sizeof(EnhancementRecord)), 0);
}

TEST(SweepRateGrid, RejectsNonPositiveRanges) {
    EXPECT_THROW(sweep_rate_grid(ModelParams{}, {-5e-3, 5e-3}, {5e-3, 6e-3}, 3, 2), DomainError);
    EXPECT_THROW(sweep_rate_grid(ModelParams{}, {1e-3, 5e-3}, {5e-3, 6e-3}, 1, 2), DomainError);
}

TEST(SweepRateGrid, FailedCellsAreMarkedNotFatal) {
    ModelParams open_circuit;
    open_circuit.Gamma = 0.0;  // zero reference current: enhancement undefined everywhere
    const auto grid = sweep_rate_grid(open_circuit, {1e-3, 5e-3}, {5e-3, 6e-3}, 3, 2);
    EXPECT_EQ(grid.failed_count(), 6u);
    EXPECT_TRUE(std::isnan(grid.at(0, 0).relative_enhancement));
    EXPECT_FALSE(grid.errors[grid.index(2, 1)].empty());
}

TEST(SweepTemperature, EnhancementGrowsAsTemperatureFalls) {
    const auto pts = sweep_temperature(ModelParams{}, {50.0, 300.0}, 26);
    ASSERT_EQ(pts.size(), 26u);
    EXPECT_EQ(pts.front().T, 50.0);
    EXPECT_EQ(pts.back().T, 300.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LT(pts[i].enhancement, pts[i - 1].enhancement);
        EXPECT_GT(pts[i].n_x, pts[i - 1].n_x);
    }
    EXPECT_NEAR(pts.back().n_x, 0.46, 0.01);
}

TEST(IVCurve, LimitsOfTheLoadSweep) {
    const ModelParams p;
    const auto curve = iv_curve(p, 1e-11, 1.0, 200, true, true);
    EXPECT_EQ(curve.dropped, 0u);
    ASSERT_EQ(curve.points.size(), 200u);
    // vanishing load: open circuit, voltage approaches the bright-state gap
    EXPECT_NEAR(curve.points.front().voltage, 1.815, 2e-3);
    EXPECT_LT(curve.points.front().current_over_e, 1e-10);
    // heavy load: short circuit, voltage collapses
    EXPECT_LT(curve.points.back().voltage, 1.35);
    const auto& peak = curve.peak();
    EXPECT_GT(peak.power, curve.points.front().power);
    EXPECT_GT(peak.power, curve.points.back().power);
    EXPECT_DOUBLE_EQ(curve.peak_power(), peak.power);
}

TEST(IVCurve, CoupledBeatsUncoupledAtPeak) {
    const auto c = iv_curve(ModelParams{}, true);
    const auto u = iv_curve(ModelParams{}, false);
    EXPECT_NEAR(relative_efficiency(c.peak_power(), u.peak_power()), 0.24, 0.03);
}

TEST(TransientDemo, EndsAtSteadyState) {
    for (bool coupled : {false, true}) {
        const ModelParams p;
        const auto traj = transient_demo(p, coupled, 100);
        const auto ss = steady_state(build_generator(p, coupled));
        EXPECT_LE((traj.back().rho - ss.rho).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_EQ(traj.front().rho(0), 1.0);
    }
}
