// validation.hpp: model invariants checked by `photocell validate`

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "photocell/acceptance.hpp"
#include "photocell/io.hpp"

namespace photocell {

inline std::vector<CheckResult> run_invariant_checks() {
    std::vector<CheckResult> out;
    const ModelParams table1{};

    out.push_back(run_check("INV1", "generators conserve probability and have nonnegative off-diagonals", 0.0, [&] {
        std::mt19937_64 rng(11);
        double worst = 0.0;
        bool offdiag_ok = true;
        for (int k = 0; k <= 100; ++k) {
            const auto p = k == 0 ? table1 : random_physical_params(rng);
            for (bool coupled : {false, true}) {
                const auto gen = build_generator(p, coupled);
                worst = std::max(worst, gen.conservation_defect() / gen.M.cwiseAbs().maxCoeff());
                for (Eigen::Index i = 0; i < 5; ++i)
                    for (Eigen::Index j = 0; j < 5; ++j)
                        if (i != j && gen.M(i, j) < 0.0) offdiag_ok = false;
            }
        }
        return CheckOutcome{worst <= 1e-15 && offdiag_ok, "max relative column sum " + detail::fmt(worst, 3)};
    }));

    out.push_back(run_check("INV2", "detailed balance of every thermal pair", 0.0, [&] {
        std::mt19937_64 rng(12);
        double worst = 0.0;
        auto check = [&](const RateGenerator& g, Level lo, Level hi, double gap, double T) {
            const double ratio = g.M(index_of(hi), index_of(lo)) / g.M(index_of(lo), index_of(hi));
            worst = std::max(worst, std::abs(ratio / std::exp(-gap / (kBoltzmann * T)) - 1.0));
        };
        for (int k = 0; k < 50; ++k) {
            auto p = random_physical_params(rng);
            p.n_h_override.reset();
            p.T_a = std::uniform_real_distribution<double>(1000.0, 5000.0)(rng);
            const auto e = dimer_eigensystem(p.E1, p.E2, p.J12);
            const auto u = build_generator(p, false);
            const auto c = build_generator(p, true);
            check(u, Level::b, Level::donor1, p.E1, p.T_a);
            check(u, Level::alpha, Level::donor1, p.E1 - p.E_alpha, p.T_a);
            check(u, Level::alpha, Level::donor2, p.E2 - p.E_alpha, p.T_a);
            check(u, Level::b, Level::beta, p.E_beta, p.T_a);
            check(c, Level::b, Level::donor1, e.E_x1, p.T_a);
            check(c, Level::donor2, Level::donor1, e.splitting, p.T_a);
            check(c, Level::alpha, Level::donor2, e.E_x2 - p.E_alpha, p.T_a);
        }
        return CheckOutcome{worst <= 1e-12, "max relative deviation " + detail::fmt(worst, 3) + " (limit 1e-12)"};
    }));

    out.push_back(run_check("INV3", "Planck occupation / effective temperature round trip", 0.0, [] {
        double worst = 0.0;
        for (double logn = -6.0; logn <= 6.0; logn += 0.25) {
            const double n = std::pow(10.0, logn);
            for (double gap : {0.03, 0.2, 1.8}) {
                const double back = planck_occupation(gap, effective_photon_temperature(n, gap));
                worst = std::max(worst, std::abs(back / n - 1.0));
            }
        }
        return CheckOutcome{worst <= 1e-10, "max relative deviation " + detail::fmt(worst, 3) + " (limit 1e-10)"};
    }));

    out.push_back(run_check("INV4", "dimer eigensystem conserves the trace; degenerate splitting is 2 J12", 0.0, [] {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> E(1.5, 2.0);
        std::uniform_real_distribution<double> J(0.0, 0.05);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double e1 = E(rng), e2 = E(rng), j = J(rng);
            const auto a = dimer_eigensystem(e1, e2, j);
            const auto b = dimer_eigensystem(e1, e1, j);
            worst = std::max({worst, std::abs(a.E_x1 + a.E_x2 - e1 - e2), std::abs(b.splitting - 2.0 * j)});
        }
        return CheckOutcome{worst <= 1e-12, "max deviation " + detail::fmt(worst, 3) + " eV (limit 1e-12)"};
    }));

    out.push_back(run_check("INV5", "steady state is a fixed point and the long-time limit of evolve", 0.0, [&] {
        std::mt19937_64 rng(14);
        double worst_fixed = 0.0;
        double worst_limit = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto p = random_physical_params(rng);
            for (bool coupled : {false, true}) {
                const auto gen = build_generator(p, coupled);
                const auto ss = steady_state(gen);
                worst_fixed = std::max(worst_fixed, (gen.M * ss.rho).cwiseAbs().maxCoeff());
                const auto traj = relax_from_ground(gen, 10);
                worst_limit = std::max(worst_limit, (traj.back().rho - ss.rho).cwiseAbs().maxCoeff());
            }
        }
        return CheckOutcome{worst_fixed <= 1e-12 && worst_limit <= 1e-8,
                            "max |M rho| " + detail::fmt(worst_fixed, 3) + ", max |rho(t_end) - rho_ss| "
                                + detail::fmt(worst_limit, 3)};
    }));

    out.push_back(run_check("INV6", "enhancement non-decreasing in gamma_x for gamma_x > gamma_c", 0.0, [&] {
        const double gc = 12e-3;
        double prev = -1e300;
        bool ok = true;
        for (double gx : linspace(gc * 1.001, 50e-3, 50)) {
            const double e = compare_currents(with_transfer_rates(table1, gx, gc)).relative_enhancement;
            ok = ok && e >= prev;
            prev = e;
        }
        return CheckOutcome{ok, "enhancement at gamma_x = 50 meV: " + detail::fmt(prev)};
    }));

    out.push_back(run_check("INV7", "output power never exceeds sun power; j-V curves well formed", 0.0, [&] {
        bool ok = true;
        std::string detail;
        for (bool coupled : {false, true}) {
            const auto curve = iv_curve(table1, coupled);
            const double gap = absorbing_gap(table1, coupled);
            int sign_changes = 0;
            for (std::size_t i = 0; i < curve.points.size(); ++i) {
                const auto& pt = curve.points[i];
                ok = ok && pt.power <= sun_power(pt.current_over_e, gap);
                if (i > 0) {
                    ok = ok && pt.voltage < curve.points[i - 1].voltage;
                    if (i > 1) {
                        const double d1 = curve.points[i - 1].power - curve.points[i - 2].power;
                        const double d2 = pt.power - curve.points[i - 1].power;
                        if ((d1 > 0.0) != (d2 > 0.0)) ++sign_changes;
                    }
                }
            }
            ok = ok && sign_changes <= 1 && curve.dropped == 0;
            detail += std::string(coupled ? "coupled" : "uncoupled") + ": " + std::to_string(sign_changes)
                      + " power slope change(s); ";
        }
        return CheckOutcome{ok, detail};
    }));

    out.push_back(run_check("INV8", "enhancement and relative efficiency invariant under rate rescaling", 0.0, [&] {
        const double s = 3.7;
        ModelParams q = table1;
        for (double* r : {&q.gamma_1h, &q.gamma_2h, &q.gamma_1c, &q.gamma_2c, &q.gamma_x, &q.Gamma, &q.Gamma_c}) *r *= s;
        const double e0 = compare_currents(table1).relative_enhancement;
        const double e1 = compare_currents(q).relative_enhancement;
        const double eta0 = relative_efficiency(iv_curve(table1, 1e-6, 1.0, 200, true, true).peak_power(),
                                                iv_curve(table1, 1e-6, 1.0, 200, true, false).peak_power());
        const double eta1 = relative_efficiency(iv_curve(q, s * 1e-6, s * 1.0, 200, true, true).peak_power(),
                                                iv_curve(q, s * 1e-6, s * 1.0, 200, true, false).peak_power());
        const double d = std::max(std::abs(e1 - e0), std::abs(eta1 - eta0));
        return CheckOutcome{d <= 1e-9, "max change " + detail::fmt(d, 3) + " (limit 1e-9)"};
    }));

    out.push_back(run_check("INV9", "grid cells with gamma_x > gamma_c do not lose current", 0.0, [&] {
        const Range axis{1e-3, 50e-3};
        const auto grid = sweep_rate_grid(table1, axis, axis, 40, 40);
        double worst = 1e300;
        for (std::size_t i = 0; i < grid.gamma_x_axis.size(); ++i)
            for (std::size_t k = 0; k < grid.gamma_c_axis.size(); ++k)
                if (grid.gamma_x_axis[i] > grid.gamma_c_axis[k])
                    worst = std::min(worst, grid.at(i, k).relative_enhancement);
        return CheckOutcome{worst >= -0.01, "min enhancement " + detail::fmt(worst) + " (limit -0.01)"};
    }));

    out.push_back(run_check("INV10", "configuration serialise/parse round trip", 0.0, [] {
        std::mt19937_64 rng(15);
        bool ok = true;
        for (int k = 0; k < 50; ++k) {
            RunConfig cfg;
            cfg.params = random_physical_params(rng);
            if (k % 5 == 0) cfg.params.n_h_override.reset();
            cfg.coupled = k % 2 == 0;
            cfg.sweep.grid_n = 10 + static_cast<std::size_t>(k);
            cfg.sweep.Gamma_min = detail::log_uniform(rng, 1e-9, 1e-3);
            ok = ok && parse_config(serialize_config(cfg)) == cfg;
        }
        return CheckOutcome{ok, ok ? "50 random configurations reproduced exactly" : "mismatch"};
    }));

    return out;
}

} // namespace photocell
