#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "photocell/positivity.hpp"

using namespace photocell;

namespace {

Eigen::MatrixXcd pure(Eigen::Index d, Eigen::Index k) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    rho(k, k) = 1.0;
    return rho;
}

// Crossing time of c^2 = rho_ee rho_gg for the toy model with gamma = 1 and
// kappa = 2, from 40-digit bisection on the closed-form solution.
constexpr double kToyCrossing = 0.25032628590801203;

} // namespace

TEST(Vectorize, ColumnStackingRoundTrip) {
    Eigen::MatrixXcd rho(2, 2);
    rho << 1.0, Complex(2.0, 1.0), Complex(2.0, -1.0), 3.0;
    const auto v = vectorize(rho);
    EXPECT_EQ(v(1), Complex(2.0, -1.0));  // (1, 0) is the second entry
    EXPECT_EQ(unvectorize(v, 2), rho);
}

TEST(Lindblad, AmplitudeDampingDecaysExponentially) {
    const double g = 0.8;
    Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(2, 2);
    sm(0, 1) = std::sqrt(g);
    const auto op = lindblad_superoperator(Eigen::MatrixXcd::Zero(2, 2), {sm});
    EXPECT_TRUE(op.trace_preserving());
    const auto traj = evolve_density_matrix(op, pure(2, 1), 5.0, 0.05);
    for (const auto& s : traj.samples) EXPECT_NEAR(s.rho(1, 1).real(), std::exp(-g * s.t), 1e-8);
    EXPECT_TRUE(audit_positivity(traj).positive());
}

TEST(Lindblad, DephasingKillsCoherence) {
    const double gphi = 0.3;
    Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(2, 2);
    sz(0, 0) = std::sqrt(gphi);
    sz(1, 1) = -std::sqrt(gphi);
    const auto op = lindblad_superoperator(Eigen::MatrixXcd::Zero(2, 2), {sz});
    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Constant(2, 2, 0.5);
    const auto traj = evolve_density_matrix(op, plus, 4.0, 0.1);
    for (const auto& s : traj.samples) {
        EXPECT_NEAR(s.rho(0, 1).real(), 0.5 * std::exp(-2.0 * gphi * s.t), 1e-8);
        EXPECT_NEAR(s.rho(0, 0).real(), 0.5, 1e-10);
    }
}

TEST(Lindblad, HamiltonianOscillation) {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2, 2);
    H(0, 1) = H(1, 0) = 0.5;  // Rabi frequency 1
    const auto op = lindblad_superoperator(H, {});
    const auto traj = evolve_density_matrix(op, pure(2, 0), 6.0, 0.1);
    for (const auto& s : traj.samples) EXPECT_NEAR(s.rho(1, 1).real(), std::pow(std::sin(s.t / 2.0), 2), 1e-8);
    EXPECT_LE(traj.max_hermiticity_drift, 1e-9);
}

TEST(PauliEmbedding, PopulationsFollowRateEquations) {
    const auto gen = build_generator(ModelParams{}, true);
    const auto op = embed_pauli_generator(gen);
    EXPECT_TRUE(op.trace_preserving(1e-14));
    const auto dm = evolve_density_matrix(op, pure(5, 0), 200.0, 20.0);
    const auto pops = evolve(gen, ground_state(gen.levels), 200.0, 20.0);
    ASSERT_EQ(dm.samples.size(), pops.size());
    for (std::size_t k = 0; k < pops.size(); ++k)
        for (Eigen::Index i = 0; i < 5; ++i)
            EXPECT_NEAR(dm.samples[k].rho(i, i).real(), pops[k].rho(i), 1e-8);
    EXPECT_TRUE(audit_positivity(dm).positive());
}

TEST(NonsecularToy, NegativityFoundNearClosedFormCrossing) {
    const auto op = nonsecular_toy(1.0, 2.0);
    EXPECT_TRUE(op.trace_preserving());
    const auto traj = evolve_density_matrix(op, pure(2, 1), 2.0, 0.001);
    const auto report = audit_positivity(traj);
    ASSERT_TRUE(report.first_negative_time.has_value());
    EXPECT_FALSE(report.positive());
    EXPECT_NEAR(*report.first_negative_time, kToyCrossing, 0.01);
    // populations and coherence follow the closed form
    for (const auto& s : traj.samples) {
        EXPECT_NEAR(s.rho(1, 1).real(), std::exp(-s.t), 1e-8);
        EXPECT_NEAR(s.rho(0, 1).real(), 4.0 * (std::exp(-s.t / 2.0) - std::exp(-s.t)), 1e-8);
    }
}

TEST(NonsecularToy, WeakTransferStaysPositive) {
    const auto traj = evolve_density_matrix(nonsecular_toy(1.0, 0.0), pure(2, 1), 5.0, 0.01);
    EXPECT_TRUE(audit_positivity(traj).positive());
}

TEST(Audit, FlagsDivergence) {
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(4, 4);
    L(0, 0) = 5.0;  // unbounded growth of rho_00
    const auto traj = evolve_density_matrix({L, 2}, pure(2, 0), 3.0, 0.1);
    EXPECT_TRUE(audit_positivity(traj).diverged);
    EXPECT_FALSE(audit_positivity(traj).positive());
}

TEST(Audit, PopulationTrajectoryTreatedAsDiagonal) {
    Trajectory traj{{Eigen::Vector2d(1.0, 0.0), 0.0}, {Eigen::Vector2d(1.1, -0.1), 1.0}};
    const auto r = audit_positivity(traj);
    ASSERT_TRUE(r.first_negative_time.has_value());
    EXPECT_EQ(*r.first_negative_time, 1.0);
    EXPECT_DOUBLE_EQ(r.min_eigenvalues.back(), -0.1);
}

TEST(LoadSuperoperator, ShippedToyTable) {
    std::ifstream in(std::string(PHOTOCELL_DATA_DIR) + "/nonsecular_toy.txt");
    ASSERT_TRUE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto loaded = load_superoperator(ss.str());
    EXPECT_TRUE(loaded.warnings.empty());
    EXPECT_EQ(loaded.op.d, 2);
    EXPECT_EQ(loaded.op.L, nonsecular_toy(1.0, 2.0).L);
}

TEST(LoadSuperoperator, SerializeRoundTripIsExact) {
    const auto op = lindblad_superoperator(Eigen::MatrixXcd::Random(3, 3), {Eigen::MatrixXcd::Random(3, 3)});
    const auto back = load_superoperator(serialize_superoperator(op));
    EXPECT_EQ(back.op.L, op.L);
}

TEST(LoadSuperoperator, RowWithFifteenEntriesIsDimensionMismatch) {
    std::string text = "d=4\n";
    for (int r = 0; r < 16; ++r) {
        const int n = r == 6 ? 15 : 16;
        for (int c = 0; c < n; ++c) text += (c ? "," : "") + std::string("0+0i");
        text += "\n";
    }
    try {
        load_superoperator(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 8u);
        EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos);
    }
}

TEST(LoadSuperoperator, MalformedInput) {
    EXPECT_THROW(load_superoperator(""), ParseError);
    EXPECT_THROW(load_superoperator("dim=2\n"), ParseError);
    EXPECT_THROW(load_superoperator("d=1\n1+0j\n"), ParseError);
    EXPECT_THROW(load_superoperator("d=1\n0+0i\n0+0i\n"), ParseError);
    EXPECT_NO_THROW(load_superoperator("# comment\n\nd=1\n  -0+1e-3i  \n"));
}

TEST(LoadSuperoperator, NonTracePreservingIsAWarning) {
    const auto loaded = load_superoperator("d=1\n-1+0i\n");
    ASSERT_EQ(loaded.warnings.size(), 1u);
    EXPECT_FALSE(loaded.op.trace_preserving());
}
