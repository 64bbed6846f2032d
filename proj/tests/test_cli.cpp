#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "photocell/cli.hpp"

using namespace photocell;

namespace {

struct Run {
    int status;
    std::string out;
    std::string log;
};

Run run(std::string_view command, const RunConfig& cfg = {}, const CliOptions& opts = {}) {
    std::ostringstream out, log;
    const int status = dispatch(command, cfg, opts, out, log);
    return {status, out.str(), log.str()};
}

ResultTable table_of(const std::string& csv) {
    std::istringstream in(csv);
    return read_csv(in);
}

} // namespace

TEST(Cli, UnknownCommand) {
    const auto r = run("explode");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.log.find("unknown command"), std::string::npos);
}

TEST(Cli, SteadyPrintsNormalisedPopulations) {
    const auto r = run("steady");
    ASSERT_EQ(r.status, 0);
    const auto t = table_of(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.columns.front(), "rho_b");
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += t.rows[0][i];
    EXPECT_NEAR(sum, 1.0, 1e-14);
}

TEST(Cli, IvColumns) {
    RunConfig cfg;
    cfg.sweep.points = 20;
    const auto r = run("iv", cfg);
    ASSERT_EQ(r.status, 0);
    const auto t = table_of(r.out);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"V", "j_over_e", "P", "Gamma"}));
    EXPECT_EQ(t.rows.size(), 20u);
    EXPECT_NE(std::find(t.metadata.begin(), t.metadata.end(), "command: iv"), t.metadata.end());
}

TEST(Cli, SweepRatesLongFormat) {
    RunConfig cfg;
    cfg.sweep.grid_n = 4;
    const auto r = run("sweep-rates", cfg);
    ASSERT_EQ(r.status, 0);
    const auto t = table_of(r.out);
    EXPECT_EQ(t.rows.size(), 16u);
    EXPECT_EQ(t.columns[2], "enhancement");
}

TEST(Cli, SweepTempAndEvolve) {
    RunConfig cfg;
    cfg.sweep.temp_points = 3;
    cfg.sweep.samples = 10;
    EXPECT_EQ(table_of(run("sweep-temp", cfg).out).rows.size(), 3u);
    const auto t = table_of(run("evolve", cfg).out);
    EXPECT_EQ(t.rows.size(), 11u);
    EXPECT_EQ(t.columns.front(), "t");
}

TEST(Cli, AuditExitCodes) {
    RunConfig cfg;
    cfg.sweep.samples = 50;
    EXPECT_EQ(run("audit", cfg).status, 0);

    CliOptions opts;
    opts.superop_path = std::string(PHOTOCELL_DATA_DIR) + "/nonsecular_toy.txt";
    opts.init_level = 1;
    cfg.sweep.t_end = 2.0;
    cfg.sweep.samples = 200;
    const auto r = run("audit", cfg, opts);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.log.find("negative eigenvalue"), std::string::npos);
}

TEST(Cli, AuditReportsBadInput) {
    CliOptions opts;
    opts.init_level = 9;
    EXPECT_EQ(run("audit", RunConfig{}, opts).status, 2);
    opts.init_level = 0;
    opts.superop_path = "/nonexistent/table.txt";
    EXPECT_EQ(run("audit", RunConfig{}, opts).status, 2);
}

TEST(Cli, WritesOutputFileAndPlotScript) {
    const auto dir = std::filesystem::temp_directory_path();
    RunConfig cfg;
    cfg.output = (dir / "photocell_cli_test.csv").string();
    cfg.sweep.points = 10;
    CliOptions opts;
    opts.plot_script = (dir / "photocell_cli_test.py").string();
    const auto r = run("iv", cfg, opts);
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(read_csv(cfg.output).rows.size(), 10u);
    EXPECT_TRUE(std::filesystem::exists(*opts.plot_script));
    std::filesystem::remove(cfg.output);
    std::filesystem::remove(*opts.plot_script);
}

TEST(Cli, InvalidParametersExitTwo) {
    RunConfig cfg;
    cfg.params.J12 = -1.0;
    EXPECT_EQ(run("steady", cfg).status, 2);
}
