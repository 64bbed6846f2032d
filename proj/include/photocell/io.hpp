// io.hpp: run configuration (key = value text) and CSV result tables

#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "photocell/core_physics.hpp"
#include "photocell/positivity.hpp"

namespace photocell {

inline constexpr std::string_view kVersion = "1.0.0";

struct SweepSettings {
    // rate grid
    std::size_t grid_n{100};
    double gamma_x_min{1e-3};
    double gamma_x_max{50e-3};
    double gamma_c_min{1e-3};
    double gamma_c_max{50e-3};
    // temperature sweep
    double T_min{50.0};
    double T_max{300.0};
    std::size_t temp_points{26};
    // load sweep
    double Gamma_min{1e-6};
    double Gamma_max{1.0};
    std::size_t points{200};
    bool log_spacing{true};
    // transients; t_end = 0 selects 40 relaxation times
    double t_end{0.0};
    std::size_t samples{400};

    bool operator==(const SweepSettings&) const = default;
};

struct RunConfig {
    ModelParams params{};
    SweepSettings sweep{};
    bool coupled{true};
    std::string output{};  // empty: standard output

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

enum class Unit { energy, temperature, none };

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    return parse_real(s);
}

/// Number with an optional unit: "eV"/"meV" for energies and rates, "K" for
/// temperatures. Energies are returned in eV.
inline std::optional<double> parse_quantity(std::string_view s, Unit unit) {
    s = trim(s);
    double scale = 1.0;
    auto strip = [&](std::string_view suffix, double factor) {
        if (s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
            s = trim(s.substr(0, s.size() - suffix.size()));
            scale = factor;
            return true;
        }
        return false;
    };
    if (unit == Unit::energy) {
        if (!strip("meV", 1e-3)) strip("eV", 1.0);
    } else if (unit == Unit::temperature) {
        strip("K", 1.0);
    }
    const auto v = parse_number(s);
    if (!v) return std::nullopt;
    return *v * scale;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<bool> parse_bool(std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    return std::nullopt;
}

struct Field {
    std::function<bool(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline Field real_field(double ModelParams::*m, Unit u) {
    return {[m, u](RunConfig& c, std::string_view v) {
                const auto x = parse_quantity(v, u);
                if (x) c.params.*m = *x;
                return x.has_value();
            },
            [m](const RunConfig& c) { return format_double(c.params.*m); }};
}

inline Field sweep_real(double SweepSettings::*m, Unit u) {
    return {[m, u](RunConfig& c, std::string_view v) {
                const auto x = parse_quantity(v, u);
                if (x) c.sweep.*m = *x;
                return x.has_value();
            },
            [m](const RunConfig& c) { return format_double(c.sweep.*m); }};
}

inline Field sweep_count(std::size_t SweepSettings::*m) {
    return {[m](RunConfig& c, std::string_view v) {
                const auto x = parse_count(v);
                if (x) c.sweep.*m = *x;
                return x.has_value();
            },
            [m](const RunConfig& c) { return std::to_string(c.sweep.*m); }};
}

/// The first kParamFieldCount keys map onto ModelParams.
inline constexpr std::ptrdiff_t kParamFieldCount = 14;

/// Every accepted key, in serialisation order.
inline const std::vector<std::pair<std::string, Field>>& config_fields() {
    using P = ModelParams;
    using S = SweepSettings;
    static const std::vector<std::pair<std::string, Field>> fields = {
        {"E1", real_field(&P::E1, Unit::energy)},
        {"E2", real_field(&P::E2, Unit::energy)},
        {"E_alpha", real_field(&P::E_alpha, Unit::energy)},
        {"E_beta", real_field(&P::E_beta, Unit::energy)},
        {"J12", real_field(&P::J12, Unit::energy)},
        {"gamma_1h", real_field(&P::gamma_1h, Unit::energy)},
        {"gamma_2h", real_field(&P::gamma_2h, Unit::energy)},
        {"gamma_1c", real_field(&P::gamma_1c, Unit::energy)},
        {"gamma_2c", real_field(&P::gamma_2c, Unit::energy)},
        {"gamma_x", real_field(&P::gamma_x, Unit::energy)},
        {"Gamma", real_field(&P::Gamma, Unit::energy)},
        {"Gamma_c", real_field(&P::Gamma_c, Unit::energy)},
        {"T_a", real_field(&P::T_a, Unit::temperature)},
        {"n_h",
         {[](RunConfig& c, std::string_view v) {
              if (trim(v) == "thermal") {
                  c.params.n_h_override.reset();
                  return true;
              }
              const auto x = parse_number(v);
              if (x) c.params.n_h_override = *x;
              return x.has_value();
          },
          [](const RunConfig& c) {
              return c.params.n_h_override ? format_double(*c.params.n_h_override) : std::string("thermal");
          }}},
        {"coupled",
         {[](RunConfig& c, std::string_view v) {
              const auto b = parse_bool(v);
              if (b) c.coupled = *b;
              return b.has_value();
          },
          [](const RunConfig& c) { return std::string(c.coupled ? "true" : "false"); }}},
        {"grid_n", sweep_count(&S::grid_n)},
        {"gamma_x_min", sweep_real(&S::gamma_x_min, Unit::energy)},
        {"gamma_x_max", sweep_real(&S::gamma_x_max, Unit::energy)},
        {"gamma_c_min", sweep_real(&S::gamma_c_min, Unit::energy)},
        {"gamma_c_max", sweep_real(&S::gamma_c_max, Unit::energy)},
        {"T_min", sweep_real(&S::T_min, Unit::temperature)},
        {"T_max", sweep_real(&S::T_max, Unit::temperature)},
        {"temp_points", sweep_count(&S::temp_points)},
        {"Gamma_min", sweep_real(&S::Gamma_min, Unit::energy)},
        {"Gamma_max", sweep_real(&S::Gamma_max, Unit::energy)},
        {"points", sweep_count(&S::points)},
        {"log_spacing",
         {[](RunConfig& c, std::string_view v) {
              const auto b = parse_bool(v);
              if (b) c.sweep.log_spacing = *b;
              return b.has_value();
          },
          [](const RunConfig& c) { return std::string(c.sweep.log_spacing ? "true" : "false"); }}},
        {"t_end", sweep_real(&S::t_end, Unit::none)},
        {"samples", sweep_count(&S::samples)},
        {"output",
         {[](RunConfig& c, std::string_view v) {
              c.output = std::string(trim(v));
              return true;
          },
          [](const RunConfig& c) { return c.output; }}},
    };
    return fields;
}

} // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults. Errors carry the offending line number.
inline RunConfig parse_config(std::string_view text) {
    const auto& fields = detail::config_fields();
    RunConfig cfg;
    std::size_t lineno = 0;
    std::size_t last_param_line = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
        if (it == fields.end()) throw ParseError("unknown key '" + std::string(key) + "'", lineno);
        if (!it->second.set(cfg, value))
            throw ParseError("cannot parse value '" + std::string(value) + "' for key '" + std::string(key) + "'",
                             lineno);
        if (it - fields.begin() < detail::kParamFieldCount) last_param_line = lineno;
    }
    // Cross-field constraints are checked once all keys are known and blamed
    // on the last line that touched a model parameter.
    try {
        validate(cfg.params);
    } catch (const DomainError& e) {
        throw ParseError(e.what(), last_param_line);
    }
    return cfg;
}

/// Every key with its resolved value; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : detail::config_fields()) out += key + " = " + field.get(cfg) + "\n";
    return out;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Result tables

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> metadata;  // emitted as leading '# ' lines

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size()) throw DomainError("ResultTable: row width does not match header");
        rows.push_back(std::move(row));
    }
    bool rectangular() const {
        for (const auto& r : rows)
            if (r.size() != columns.size()) return false;
        return true;
    }
};

/// Metadata lines that fully describe a run: tool version, command and every
/// resolved configuration key.
inline std::vector<std::string> run_metadata(std::string_view command, const RunConfig& cfg) {
    std::vector<std::string> meta;
    meta.push_back("photocell " + std::string(kVersion));
    meta.push_back("command: " + std::string(command));
    std::istringstream lines(serialize_config(cfg));
    for (std::string line; std::getline(lines, line);) meta.push_back("config: " + line);
    return meta;
}

/// 17 significant digits in scientific notation.
inline std::string format_csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_csv(const ResultTable& table, std::ostream& os) {
    if (!table.rectangular()) throw DomainError("write_csv: table is not rectangular");
    for (const auto& m : table.metadata) os << "# " << m << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_csv_number(row[c]);
        os << '\n';
    }
    if (!os) throw Error("write_csv: I/O failure");
}

inline void write_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open '" + path + "' for writing");
    write_csv(table, out);
    out.flush();
    if (!out) throw Error("write_csv: I/O failure writing '" + path + "'");
}

inline ResultTable read_csv(std::istream& is) {
    ResultTable table;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!header && line.rfind("# ", 0) == 0) {
            table.metadata.push_back(line.substr(2));
            continue;
        }
        std::vector<std::string_view> cells;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (!header) {
            for (auto c : cells) table.columns.emplace_back(c);
            header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> row;
        for (auto c : cells) {
            // from_chars does not accept "nan" spelled by printf on every platform
            const auto v = c == "nan" || c == "-nan" ? std::optional<double>(std::nan("")) : detail::parse_number(c);
            if (!v) throw ParseError("malformed CSV number '" + std::string(c) + "'", lineno);
            row.push_back(*v);
        }
        if (row.size() != table.columns.size()) throw ParseError("CSV row width does not match header", lineno);
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline ResultTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_csv: cannot open '" + path + "'");
    return read_csv(in);
}

} // namespace photocell
