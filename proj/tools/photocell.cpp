// photocell: command-line front end

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "photocell/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coherently coupled donor-pair photocell: steady states, sweeps and positivity audits"};
    app.set_version_flag("--version", std::string(photocell::kVersion));

    std::string command;
    std::string config_path;
    std::string out_path;
    bool coupled = false;
    bool uncoupled = false;
    std::optional<std::size_t> grid_n;
    std::optional<double> t_min, t_max, gamma_min, gamma_max, t_end;
    std::optional<std::size_t> points;
    photocell::CliOptions opts;

    std::string commands;
    for (auto c : photocell::kCommands) commands += (commands.empty() ? "" : ", ") + std::string(c);
    app.add_option("command", command, "One of: " + commands)->required();
    app.add_option("--config", config_path, "key = value configuration file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "CSV output path (standard output when omitted)");
    auto* c_flag = app.add_flag("--coupled", coupled, "use the coupled (J12 != 0) level scheme");
    app.add_flag("--uncoupled", uncoupled, "use the uncoupled reference scheme")->excludes(c_flag);
    app.add_option("--grid-n", grid_n, "points per axis of the rate grid");
    app.add_option("--t-min", t_min, "lowest temperature of the temperature sweep (K)");
    app.add_option("--t-max", t_max, "highest temperature of the temperature sweep (K)");
    app.add_option("--gamma-min", gamma_min, "smallest load rate Gamma of the j-V sweep (eV)");
    app.add_option("--gamma-max", gamma_max, "largest load rate Gamma of the j-V sweep (eV)");
    app.add_option("--points", points, "number of sweep points (j-V or temperature sweep)");
    app.add_option("--t-end", t_end, "final time for evolve/audit (hbar/eV); 0 = 40 relaxation times");
    app.add_option("--superop", opts.superop_path, "audit: superoperator table to audit instead of the Pauli model")
        ->check(CLI::ExistingFile);
    app.add_option("--init-level", opts.init_level, "audit: initial state |k><k| (default 0)");
    app.add_option("--plot-script", opts.plot_script, "write a matplotlib script that plots the CSV");

    CLI11_PARSE(app, argc, argv);

    photocell::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = photocell::load_config_file(config_path);
    } catch (const photocell::Error& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << '\n';
        return 2;
    }
    if (!out_path.empty()) cfg.output = out_path;
    if (coupled) cfg.coupled = true;
    if (uncoupled) cfg.coupled = false;
    if (grid_n) cfg.sweep.grid_n = *grid_n;
    if (t_min) cfg.sweep.T_min = *t_min;
    if (t_max) cfg.sweep.T_max = *t_max;
    if (gamma_min) cfg.sweep.Gamma_min = *gamma_min;
    if (gamma_max) cfg.sweep.Gamma_max = *gamma_max;
    if (t_end) cfg.sweep.t_end = *t_end;
    if (points) {
        if (command == "sweep-temp") cfg.sweep.temp_points = *points;
        else cfg.sweep.points = *points;
    }

    return photocell::dispatch(command, cfg, opts, std::cout, std::cerr);
}
