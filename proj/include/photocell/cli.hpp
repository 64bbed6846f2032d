// cli.hpp: command dispatch behind the `photocell` executable

#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "photocell/acceptance.hpp"
#include "photocell/experiments.hpp"
#include "photocell/io.hpp"
#include "photocell/positivity.hpp"
#include "photocell/validation.hpp"

namespace photocell {

inline constexpr std::array<std::string_view, 7> kCommands = {
    "steady", "evolve", "sweep-rates", "sweep-temp", "iv", "audit", "validate"};

/// Options that do not belong in a configuration file.
struct CliOptions {
    std::optional<std::string> superop_path;  // audit: generator table instead of the Pauli model
    std::size_t init_level{0};                // audit: initial pure state |k><k|
    std::optional<std::string> plot_script;   // write a matplotlib script for the CSV
};

namespace detail {

inline std::vector<std::string> population_columns(const LevelSet& levels, std::string_view prefix) {
    std::vector<std::string> cols;
    for (const auto& l : levels.labels) cols.push_back(std::string(prefix) + l);
    return cols;
}

inline void emit_table(const ResultTable& table, const RunConfig& cfg, std::ostream& out) {
    if (cfg.output.empty()) write_csv(table, out);
    else write_csv(table, cfg.output);
}

inline std::string plot_script_for(std::string_view command, const std::string& csv) {
    std::ostringstream py;
    py << "# Plot script for `photocell " << command << "` output.\n"
       << "import numpy as np\nimport matplotlib.pyplot as plt\n\n"
       << "data = np.genfromtxt(" << std::quoted(csv) << ", delimiter=',', names=True, comments='#')\n";
    if (command == "sweep-rates") {
        py << "gx = np.unique(data['gamma_x']) * 1e3\ngc = np.unique(data['gamma_c']) * 1e3\n"
           << "Z = 100 * data['enhancement'].reshape(len(gx), len(gc))\n"
           << "cs = plt.contourf(gx, gc, Z.T, levels=30)\nplt.colorbar(cs, label='enhancement (%)')\n"
           << "plt.contour(gx, gc, Z.T, levels=[0.0], colors='red')\n"
           << "plt.xlabel('gamma_x (meV)')\nplt.ylabel('gamma_c (meV)')\n";
    } else if (command == "sweep-temp") {
        py << "fig, ax = plt.subplots()\nax.plot(data['T'], 100 * data['enhancement'])\n"
           << "ax.set_xlabel('T (K)')\nax.set_ylabel('enhancement (%)')\n"
           << "ax2 = ax.twinx()\nax2.plot(data['T'], data['n_x'], '--')\nax2.set_ylabel('n_x')\n";
    } else if (command == "iv") {
        py << "fig, ax = plt.subplots()\nax.plot(data['V'], data['j_over_e'])\n"
           << "ax.set_xlabel('V (V)')\nax.set_ylabel('j/e (eV)')\n"
           << "ax2 = ax.twinx()\nax2.plot(data['V'], data['P'], 'C1')\nax2.set_ylabel('P (arb. units)')\n";
    } else if (command == "evolve") {
        py << "for name in data.dtype.names[1:]:\n    plt.semilogx(data['t'], data[name], label=name)\n"
           << "plt.xlabel('t (hbar/eV)')\nplt.ylabel('population')\nplt.legend()\n";
    } else if (command == "audit") {
        py << "plt.plot(data['t'], data['min_eigenvalue'])\nplt.axhline(0.0, color='k', lw=0.5)\n"
           << "plt.xlabel('t')\nplt.ylabel('min eigenvalue of rho')\n";
    } else {
        py << "print(data)\n";
    }
    py << "plt.show()\n";
    return py.str();
}

inline int run_steady(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto gen = build_generator(cfg.params, cfg.coupled);
    const auto ss = steady_state(gen);
    ResultTable t;
    t.metadata = run_metadata("steady", cfg);
    t.columns = population_columns(gen.levels, "rho_");
    t.columns.insert(t.columns.end(), {"j_over_e", "V", "P"});
    std::vector<double> row(ss.rho.data(), ss.rho.data() + ss.rho.size());
    const auto pt = operating_point(cfg.params, ss);
    row.insert(row.end(), {pt.current_over_e, pt.voltage, pt.power});
    t.add_row(std::move(row));
    emit_table(t, cfg, out);
    log << "steady state (" << (cfg.coupled ? "coupled" : "uncoupled") << "):";
    for (Eigen::Index i = 0; i < ss.rho.size(); ++i)
        log << ' ' << gen.levels.labels[static_cast<std::size_t>(i)] << '=' << ss.rho(i);
    log << "  sum=" << ss.rho.sum() << '\n';
    return 0;
}

inline int run_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto gen = build_generator(cfg.params, cfg.coupled);
    const double t_end = cfg.sweep.t_end > 0.0 ? cfg.sweep.t_end : 40.0 * relaxation_time(gen);
    const auto samples = std::max<std::size_t>(cfg.sweep.samples, 1);
    const auto traj = evolve(gen, ground_state(gen.levels), t_end, t_end / static_cast<double>(samples));
    ResultTable t;
    t.metadata = run_metadata("evolve", cfg);
    t.columns = {"t"};
    const auto pops = population_columns(gen.levels, "rho_");
    t.columns.insert(t.columns.end(), pops.begin(), pops.end());
    for (const auto& s : traj) {
        std::vector<double> row{s.t};
        row.insert(row.end(), s.rho.data(), s.rho.data() + s.rho.size());
        t.add_row(std::move(row));
    }
    emit_table(t, cfg, out);
    log << "evolved to t=" << t_end << " hbar/eV, " << traj.size() << " samples\n";
    return 0;
}

inline int run_sweep_rates(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto& s = cfg.sweep;
    const auto grid = sweep_rate_grid(cfg.params, {s.gamma_x_min, s.gamma_x_max}, {s.gamma_c_min, s.gamma_c_max},
                                      s.grid_n, s.grid_n);
    ResultTable t;
    t.metadata = run_metadata("sweep-rates", cfg);
    t.columns = {"gamma_x", "gamma_c", "enhancement", "j_coupled", "j_uncoupled", "stable"};
    for (std::size_t i = 0; i < grid.gamma_x_axis.size(); ++i)
        for (std::size_t k = 0; k < grid.gamma_c_axis.size(); ++k) {
            const auto& c = grid.at(i, k);
            t.add_row({grid.gamma_x_axis[i], grid.gamma_c_axis[k], c.relative_enhancement, c.j_coupled,
                       c.j_uncoupled, grid.stable[grid.index(i, k)] ? 1.0 : 0.0});
        }
    emit_table(t, cfg, out);
    log << "swept " << grid.cells.size() << " cells, " << grid.failed_count() << " failed\n";
    for (std::size_t i = 0; i < grid.errors.size(); ++i)
        if (!grid.errors[i].empty()) log << "  cell " << i << ": " << grid.errors[i] << '\n';
    return grid.failed_count() == 0 ? 0 : 1;
}

inline int run_sweep_temp(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto pts = sweep_temperature(cfg.params, {cfg.sweep.T_min, cfg.sweep.T_max}, cfg.sweep.temp_points);
    ResultTable t;
    t.metadata = run_metadata("sweep-temp", cfg);
    t.columns = {"T", "enhancement", "n_x", "j_coupled", "j_uncoupled"};
    for (const auto& p : pts) t.add_row({p.T, p.enhancement, p.n_x, p.j_coupled, p.j_uncoupled});
    emit_table(t, cfg, out);
    log << "swept " << pts.size() << " temperatures\n";
    return 0;
}

inline int run_iv(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto& s = cfg.sweep;
    const auto curve = iv_curve(cfg.params, s.Gamma_min, s.Gamma_max, s.points, s.log_spacing, cfg.coupled);
    ResultTable t;
    t.metadata = run_metadata("iv", cfg);
    t.columns = {"V", "j_over_e", "P", "Gamma"};
    for (const auto& p : curve.points) t.add_row({p.voltage, p.current_over_e, p.power, p.Gamma_load});
    emit_table(t, cfg, out);
    const auto& peak = curve.peak();
    log << "peak power " << peak.power << " at V=" << peak.voltage << " V (Gamma=" << peak.Gamma_load
        << " eV); dropped points: " << curve.dropped << '\n';
    return 0;
}

inline double superoperator_relaxation_time(const Superoperator& op) {
    const Eigen::VectorXcd ev = op.L.eigenvalues();
    const double scale = std::max(op.L.cwiseAbs().maxCoeff(), 1e-300);
    double slowest = 0.0;
    for (const auto& lambda : ev) {
        const double rate = std::abs(lambda.real());
        if (rate > 1e-12 * scale && (slowest == 0.0 || rate < slowest)) slowest = rate;
    }
    return slowest > 0.0 ? 1.0 / slowest : 1.0 / scale;
}

inline int run_audit(const RunConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& log) {
    Superoperator op;
    if (opts.superop_path) {
        std::ifstream in(*opts.superop_path);
        if (!in) throw Error("cannot open superoperator table '" + *opts.superop_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        auto loaded = load_superoperator(ss.str());
        for (const auto& w : loaded.warnings) log << "warning: " << w << '\n';
        op = std::move(loaded.op);
    } else {
        op = embed_pauli_generator(build_generator(cfg.params, cfg.coupled));
    }
    if (static_cast<Eigen::Index>(opts.init_level) >= op.d) throw DomainError("audit: --init-level out of range");

    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(op.d, op.d);
    rho0(static_cast<Eigen::Index>(opts.init_level), static_cast<Eigen::Index>(opts.init_level)) = 1.0;
    const double t_end = cfg.sweep.t_end > 0.0 ? cfg.sweep.t_end : 40.0 * superoperator_relaxation_time(op);
    const auto samples = std::max<std::size_t>(cfg.sweep.samples, 1);
    const auto traj = evolve_density_matrix(op, rho0, t_end, t_end / static_cast<double>(samples));
    const auto report = audit_positivity(traj);

    ResultTable t;
    t.metadata = run_metadata("audit", cfg);
    if (opts.superop_path) t.metadata.push_back("superop: " + *opts.superop_path);
    t.metadata.push_back("init_level: " + std::to_string(opts.init_level));
    t.columns = {"t", "min_eigenvalue"};
    for (std::size_t i = 0; i < report.times.size(); ++i) t.add_row({report.times[i], report.min_eigenvalues[i]});
    emit_table(t, cfg, out);

    log << "audit: ";
    if (report.first_negative_time) log << "negative eigenvalue first at t=" << *report.first_negative_time;
    else log << "no negativity";
    log << "; final min eigenvalue " << report.steady_min_eigenvalue << "; diverged " << std::boolalpha
        << report.diverged << "; hermiticity drift " << traj.max_hermiticity_drift
        << (traj.hermiticity_flag ? " (FLAGGED)" : "") << '\n';
    return report.positive() ? 0 : 1;
}

inline int run_validate(std::ostream& out) {
    auto results = run_invariant_checks();
    const auto acc = run_acceptance();
    results.insert(results.end(), acc.begin(), acc.end());
    int failed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(5) << r.id << ' ' << r.title << " -- "
            << r.detail << '\n';
        failed += r.passed ? 0 : 1;
    }
    out << (results.size() - static_cast<std::size_t>(failed)) << '/' << results.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

} // namespace detail

/// Runs one command. Returns the process exit status: 0 on success, 1 when a
/// check or audit fails, 2 on invalid input.
inline int dispatch(std::string_view command, const RunConfig& cfg, const CliOptions& opts, std::ostream& out,
                    std::ostream& log) {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        log << "error: unknown command '" << command << "'\n";
        return 2;
    }
    try {
        int status = 0;
        if (command == "steady") status = detail::run_steady(cfg, out, log);
        else if (command == "evolve") status = detail::run_evolve(cfg, out, log);
        else if (command == "sweep-rates") status = detail::run_sweep_rates(cfg, out, log);
        else if (command == "sweep-temp") status = detail::run_sweep_temp(cfg, out, log);
        else if (command == "iv") status = detail::run_iv(cfg, out, log);
        else if (command == "audit") status = detail::run_audit(cfg, opts, out, log);
        else status = detail::run_validate(out);

        if (opts.plot_script && command != "validate") {
            std::ofstream py(*opts.plot_script);
            if (!py) throw Error("cannot write plot script '" + *opts.plot_script + "'");
            py << detail::plot_script_for(command, cfg.output.empty() ? std::string("data.csv") : cfg.output);
        }
        return status;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace photocell
