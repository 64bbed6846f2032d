// kinetics.hpp: Pauli rate generators for the five-level photocell cycle,
// time evolution and steady states.
//
// Convention: a generator M acts on column vectors of populations, M(i, j) is
// the rate from source level j into level i, and every column sums to zero.

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "photocell/core_physics.hpp"
#include "photocell/detail/linear_ode.hpp"

namespace photocell {

class DisconnectedKinetics : public Error {
public:
    using Error::Error;
};

class NegativePopulation : public Error {
public:
    using Error::Error;
};

class ProbabilityLeak : public Error {
public:
    using Error::Error;
};

/// Index of each level in the five-level cycle. Both schemes share the layout;
/// slots 1 and 2 hold a1/a2 (uncoupled) or x1/x2 (coupled).
enum class Level : Eigen::Index { b = 0, donor1 = 1, donor2 = 2, alpha = 3, beta = 4 };

inline constexpr Eigen::Index index_of(Level l) { return static_cast<Eigen::Index>(l); }

struct LevelSet {
    std::vector<std::string> labels;

    Eigen::Index size() const { return static_cast<Eigen::Index>(labels.size()); }

    static LevelSet uncoupled() { return {{"b", "a1", "a2", "alpha", "beta"}}; }
    static LevelSet coupled() { return {{"b", "x1", "x2", "alpha", "beta"}}; }

    bool operator==(const LevelSet&) const = default;
};

struct RateGenerator {
    Eigen::MatrixXd M;
    LevelSet levels;

    /// Largest |column sum|.
    double conservation_defect() const { return M.colwise().sum().cwiseAbs().maxCoeff(); }
};

struct PopulationState {
    Eigen::VectorXd rho;
    double t{0.0};
};

using Trajectory = std::vector<PopulationState>;

namespace detail {

/// Adds a thermal pair between a lower and an upper level: downhill rate
/// gamma (1 + n), uphill rate gamma n.
inline void add_thermal_link(Eigen::MatrixXd& M, Level lower, Level upper, double gamma, double n) {
    const auto lo = index_of(lower);
    const auto hi = index_of(upper);
    const double down = gamma * (1.0 + n);
    const double up = gamma * n;
    M(lo, hi) += down;
    M(hi, hi) -= down;
    M(hi, lo) += up;
    M(lo, lo) -= up;
}

inline void add_one_way(Eigen::MatrixXd& M, Level from, Level to, double rate) {
    M(index_of(to), index_of(from)) += rate;
    M(index_of(from), index_of(from)) -= rate;
}

/// alpha -> beta through the load and beta <-> b closing the cycle.
inline void add_load_and_closure(Eigen::MatrixXd& M, const ModelParams& p, const OccupationSet& occ) {
    add_one_way(M, Level::alpha, Level::beta, p.Gamma);
    add_thermal_link(M, Level::b, Level::beta, p.Gamma_c, occ.N_c);
}

} // namespace detail

/// Independent donors: each a_i absorbs/emits with gamma_ih and transfers to
/// alpha with gamma_ic.
inline RateGenerator build_generator_uncoupled(const ModelParams& p, const OccupationSet& occ) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
    detail::add_thermal_link(M, Level::b, Level::donor1, p.gamma_1h, occ.n_1h);
    detail::add_thermal_link(M, Level::b, Level::donor2, p.gamma_2h, occ.n_2h);
    detail::add_thermal_link(M, Level::alpha, Level::donor1, p.gamma_1c, occ.n_1c);
    detail::add_thermal_link(M, Level::alpha, Level::donor2, p.gamma_2c, occ.n_2c);
    detail::add_load_and_closure(M, p, occ);
    return {std::move(M), LevelSet::uncoupled()};
}

/// Coupled dimer: light couples only to the bright state x1, charge transfer
/// leaves only from the dark state x2, and gamma_x relaxes x1 -> x2.
inline RateGenerator build_generator_coupled(const ModelParams& p, const OccupationSet& occ) {
    const auto [gamma_h, gamma_c] = interference_rates(p.gamma_1h, p.gamma_2h, p.gamma_1c, p.gamma_2c);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
    detail::add_thermal_link(M, Level::b, Level::donor1, gamma_h, occ.n_h);
    detail::add_thermal_link(M, Level::donor2, Level::donor1, p.gamma_x, occ.n_x);
    detail::add_thermal_link(M, Level::alpha, Level::donor2, gamma_c, occ.n_2c);
    detail::add_load_and_closure(M, p, occ);
    return {std::move(M), LevelSet::coupled()};
}

/// Builds occupations and the generator for the selected scheme.
inline RateGenerator build_generator(const ModelParams& p, bool coupled) {
    const auto occ = build_occupations(p, coupled);
    return coupled ? build_generator_coupled(p, occ) : build_generator_uncoupled(p, occ);
}

/// rho_bb = 1, everything else empty.
inline PopulationState ground_state(const LevelSet& levels) {
    PopulationState s{Eigen::VectorXd::Zero(levels.size()), 0.0};
    s.rho(0) = 1.0;
    return s;
}

struct EvolveOptions {
    IntegratorOptions integrator{};
    double negativity_tolerance{1e-12};
    double conservation_tolerance{1e-10};
};

/// Integrates d rho/dt = M rho from rho0 and samples every dt_out up to t_end.
/// Aborts with NegativePopulation if any sample leaves the probability simplex.
inline Trajectory evolve(const RateGenerator& gen, const PopulationState& rho0, double t_end,
                         double dt_out, const EvolveOptions& opts = {}) {
    const Eigen::Index n = gen.M.rows();
    if (gen.M.cols() != n || rho0.rho.size() != n)
        throw DomainError("evolve: generator and state dimensions differ");
    if (std::abs(rho0.rho.sum() - 1.0) > opts.conservation_tolerance || rho0.rho.minCoeff() < 0.0)
        throw DomainError("evolve: initial populations must be nonnegative and sum to 1");

    auto times = detail::sample_times(t_end, dt_out);
    for (double& t : times) t += rho0.t;

    Trajectory out;
    out.reserve(times.size());
    detail::integrate_linear(gen.M, rho0.rho, times, opts.integrator,
                             [&](const Eigen::Ref<const Eigen::VectorXd>& x, double t) {
        const double sum = x.sum();
        if (std::abs(sum - 1.0) > opts.conservation_tolerance) {
            std::ostringstream msg;
            msg << "evolve: probability not conserved at t=" << t << " (sum=" << sum << ")";
            throw ProbabilityLeak(msg.str());
        }
        Eigen::Index worst = 0;
        if (x.minCoeff(&worst) < -opts.negativity_tolerance) {
            std::ostringstream msg;
            msg << "evolve: population of level " << gen.levels.labels.at(static_cast<std::size_t>(worst))
                << " reached " << x(worst) << " at t=" << t;
            throw NegativePopulation(msg.str());
        }
        out.push_back({x, t});
    });
    return out;
}

/// Closed communicating classes of the transition graph (edge j -> i when
/// M(i, j) > 0). A unique steady state exists iff there is exactly one.
inline std::vector<std::vector<Eigen::Index>> closed_classes(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    // reach(i, j): j reachable from i
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = (i == j) || M(j, i) > 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = reach(i, j) || (reach(i, k) && reach(k, j));

    std::vector<std::vector<Eigen::Index>> classes;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        std::vector<Eigen::Index> members;
        bool closed = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (reach(i, j) && reach(j, i)) {
                seen[static_cast<std::size_t>(j)] = true;
                members.push_back(j);
            } else if (reach(i, j)) {
                closed = false;
            }
        }
        if (closed) classes.push_back(std::move(members));
    }
    return classes;
}

/// Solves M rho = 0 with sum(rho) = 1.
///
/// Uses Grassmann-Taksar-Heyman elimination on the unique closed class: the
/// pivots are sums of off-diagonal rates, so no subtraction occurs and every
/// component keeps full relative accuracy even when populations span tens of
/// orders of magnitude. Transient levels carry zero weight.
inline PopulationState steady_state(const RateGenerator& gen) {
    const Eigen::Index n = gen.M.rows();
    if (gen.M.cols() != n || n == 0) throw DomainError("steady_state: generator must be square");
    if (!gen.M.allFinite()) throw DomainError("steady_state: generator has non-finite entries");
    const auto classes = closed_classes(gen.M);
    if (classes.size() != 1)
        throw DisconnectedKinetics("disconnected kinetics: " + std::to_string(classes.size())
                                   + " closed classes, steady state is not unique");
    const auto& members = classes.front();
    const auto m = static_cast<Eigen::Index>(members.size());

    // Q(i, j): rate from member i to member j.
    Eigen::MatrixXd Q(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            Q(i, j) = (i == j) ? 0.0 : gen.M(members[static_cast<std::size_t>(j)], members[static_cast<std::size_t>(i)]);

    for (Eigen::Index k = m - 1; k > 0; --k) {
        const double out = Q.row(k).head(k).sum();
        Q.col(k).head(k) /= out;
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                if (i != j) Q(i, j) += Q(i, k) * Q(k, j);
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
    pi(0) = 1.0;
    for (Eigen::Index k = 1; k < m; ++k) pi(k) = pi.head(k).dot(Q.col(k).head(k));
    pi /= pi.sum();

    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) rho(members[static_cast<std::size_t>(i)]) = pi(i);
    if (!rho.allFinite()) throw DisconnectedKinetics("disconnected kinetics: singular elimination");
    return {std::move(rho), 0.0};
}

/// 1 / (smallest nonzero relaxation rate): the slowest timescale of M.
inline double relaxation_time(const RateGenerator& gen) {
    const Eigen::VectorXcd ev = gen.M.eigenvalues();
    const double scale = gen.M.cwiseAbs().maxCoeff();
    double slowest = 0.0;
    for (const auto& lambda : ev) {
        const double rate = -lambda.real();
        if (rate > 1e-12 * scale && (slowest == 0.0 || rate < slowest)) slowest = rate;
    }
    if (slowest == 0.0) throw DomainError("relaxation_time: generator has no decaying modes");
    return 1.0 / slowest;
}

} // namespace photocell
