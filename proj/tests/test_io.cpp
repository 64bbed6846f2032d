#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "photocell/io.hpp"

using namespace photocell;

TEST(Config, EmptyTextGivesDefaults) {
    EXPECT_EQ(parse_config(""), RunConfig{});
    EXPECT_EQ(parse_config("# only a comment\n\n"), RunConfig{});
}

TEST(Config, InvalidValueReportsLine) {
    try {
        parse_config("E1 = 1.8\n\nJ12 = -0.01\nT_a = 300\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);  // blamed on the last parameter line
        EXPECT_NE(std::string(e.what()).find("J12"), std::string::npos);
    }
    try {
        parse_config("E1 = 1.8\nJ12 = -0.01\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Config, UnknownKeyAndUnparsableValue) {
    try {
        parse_config("E1 = 1.8\nfoo = 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        parse_config("\nGamma = fast\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_config("E1 1.8\n"), ParseError);
}

TEST(Config, UnitSuffixes) {
    const auto cfg = parse_config("J12 = 15 meV\ngamma_x = 0.025 eV\nT_a = 250 K\nn_h = thermal\ncoupled = false\n");
    EXPECT_DOUBLE_EQ(cfg.params.J12, 0.015);
    EXPECT_DOUBLE_EQ(cfg.params.gamma_x, 0.025);
    EXPECT_DOUBLE_EQ(cfg.params.T_a, 250.0);
    EXPECT_FALSE(cfg.params.n_h_override.has_value());
    EXPECT_FALSE(cfg.coupled);
}

TEST(Config, SerializeParseRoundTrip) {
    RunConfig cfg;
    cfg.params.J12 = 0.1 / 3.0;
    cfg.params.gamma_x = 1e-3 * M_PI;
    cfg.params.n_h_override = 12345.678901234567;
    cfg.sweep.grid_n = 37;
    cfg.sweep.log_spacing = false;
    cfg.output = "out.csv";
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
    cfg.params.n_h_override.reset();
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Csv, RoundTripIsBitExact) {
    ResultTable t;
    t.metadata = run_metadata("iv", RunConfig{});
    t.columns = {"a", "b", "c"};
    t.add_row({0.1, 1.0 / 3.0, -5.4321e-300});
    t.add_row({std::numeric_limits<double>::denorm_min(), 1e300, std::nan("")});
    std::stringstream ss;
    write_csv(t, ss);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.metadata, t.metadata);
    ASSERT_EQ(back.rows.size(), 2u);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            if (std::isnan(t.rows[r][c])) EXPECT_TRUE(std::isnan(back.rows[r][c]));
            else EXPECT_EQ(std::memcmp(&t.rows[r][c], &back.rows[r][c], sizeof(double)), 0);
        }
}

TEST(Csv, EmptyTableKeepsHeader) {
    ResultTable t;
    t.columns = {"V", "j_over_e", "P", "Gamma"};
    std::stringstream ss;
    write_csv(t, ss);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_TRUE(back.rows.empty());
}

TEST(Csv, FileRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "photocell_io_test.csv").string();
    ResultTable t;
    t.columns = {"x"};
    t.add_row({2.5});
    write_csv(t, path);
    EXPECT_EQ(read_csv(path).rows, t.rows);
    std::filesystem::remove(path);
}

TEST(Csv, RowWidthChecked) {
    ResultTable t;
    t.columns = {"x", "y"};
    EXPECT_THROW(t.add_row({1.0}), DomainError);
}

TEST(Metadata, DescribesRunWithoutTimestamps) {
    const auto a = run_metadata("steady", RunConfig{});
    EXPECT_EQ(a.front(), "photocell 1.0.0");
    EXPECT_EQ(a[1], "command: steady");
    EXPECT_EQ(a, run_metadata("steady", RunConfig{}));
}

TEST(Config, ShippedDefaultFileMatchesBuiltInDefaults) {
    EXPECT_EQ(load_config_file(std::string(PHOTOCELL_DATA_DIR) + "/default.cfg"), RunConfig{});
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config_file("/nonexistent/photocell.cfg"), Error); }
