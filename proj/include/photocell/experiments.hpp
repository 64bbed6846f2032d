// experiments.hpp: parameter sweeps behind the enhancement map, the
// temperature dependence, j-V/P-V curves and population transients.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "photocell/core_physics.hpp"
#include "photocell/detail/parallel.hpp"
#include "photocell/kinetics.hpp"
#include "photocell/observables.hpp"

namespace photocell {

struct Range {
    double lo;
    double hi;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    v.back() = hi;
    return v;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > 0.0)) throw DomainError("logspace: bounds must be > 0");
    auto v = linspace(std::log(lo), std::log(hi), n);
    for (double& x : v) x = std::exp(x);
    if (!v.empty()) {
        v.front() = lo;
        v.back() = hi;
    }
    return v;
}

/// Sets the bright-dark relaxation rate and splits the total transfer rate
/// equally between the two donors.
inline ModelParams with_transfer_rates(ModelParams p, double gamma_x, double gamma_c) {
    p.gamma_x = gamma_x;
    p.gamma_1c = 0.5 * gamma_c;
    p.gamma_2c = 0.5 * gamma_c;
    return p;
}

/// Steady-state currents of the coupled cell and of its uncoupled reference
/// (identical parameters, independent donors).
inline EnhancementRecord compare_currents(const ModelParams& p) {
    const double j = current(steady_state(build_generator(p, true)).rho(index_of(Level::alpha)), p.Gamma);
    const double jt = current(steady_state(build_generator(p, false)).rho(index_of(Level::alpha)), p.Gamma);
    return make_enhancement_record(j, jt);
}

/// 2J12 > gamma_x keeps the bright/dark superpositions stable.
inline bool coherence_stable(const ModelParams& p) { return 2.0 * p.J12 > p.gamma_x; }

struct SweepGrid {
    std::vector<double> gamma_x_axis;  // rows
    std::vector<double> gamma_c_axis;  // columns
    std::vector<EnhancementRecord> cells;  // row-major; NaN entries for failed cells
    std::vector<char> stable;
    std::vector<std::string> errors;   // empty string for successful cells

    std::size_t index(std::size_t ix, std::size_t ic) const { return ix * gamma_c_axis.size() + ic; }
    const EnhancementRecord& at(std::size_t ix, std::size_t ic) const { return cells[index(ix, ic)]; }

    std::size_t failed_count() const {
        std::size_t n = 0;
        for (const auto& e : errors) n += e.empty() ? 0 : 1;
        return n;
    }
};

/// Enhancement over an n1 x n2 linear grid of (gamma_x, gamma_c).
inline SweepGrid sweep_rate_grid(const ModelParams& base, Range gamma_x_range, Range gamma_c_range,
                                 std::size_t n1, std::size_t n2,
                                 std::size_t workers = detail::worker_count()) {
    if (n1 < 2 || n2 < 2) throw DomainError("sweep_rate_grid: need at least 2 points per axis");
    if (!(gamma_x_range.lo > 0.0 && gamma_x_range.hi > 0.0 && gamma_c_range.lo > 0.0 && gamma_c_range.hi > 0.0))
        throw DomainError("sweep_rate_grid: rate ranges must be positive");
    validate(base);

    SweepGrid grid;
    grid.gamma_x_axis = linspace(gamma_x_range.lo, gamma_x_range.hi, n1);
    grid.gamma_c_axis = linspace(gamma_c_range.lo, gamma_c_range.hi, n2);
    grid.cells.resize(n1 * n2);
    grid.stable.resize(n1 * n2);
    grid.errors.resize(n1 * n2);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    detail::parallel_for(n1 * n2, [&](std::size_t cell) {
        const auto p = with_transfer_rates(base, grid.gamma_x_axis[cell / n2], grid.gamma_c_axis[cell % n2]);
        grid.stable[cell] = coherence_stable(p) ? 1 : 0;
        try {
            grid.cells[cell] = compare_currents(p);
        } catch (const Error& e) {
            grid.cells[cell] = {nan, nan, nan};
            grid.errors[cell] = e.what();
        }
    }, workers);
    return grid;
}

struct TemperaturePoint {
    double T;
    double enhancement;
    double n_x;
    double j_coupled;
    double j_uncoupled;
};

/// Enhancement and bright-dark phonon occupation on a linear temperature grid.
inline std::vector<TemperaturePoint> sweep_temperature(const ModelParams& base, Range T_range,
                                                       std::size_t n_points,
                                                       std::size_t workers = detail::worker_count()) {
    if (!(T_range.lo > 0.0 && T_range.hi > 0.0)) throw DomainError("sweep_temperature: temperatures must be > 0");
    if (n_points == 0) throw DomainError("sweep_temperature: need at least one point");
    const auto temps = linspace(T_range.lo, T_range.hi, n_points);
    std::vector<TemperaturePoint> out(n_points);
    detail::parallel_for(n_points, [&](std::size_t i) {
        ModelParams p = base;
        p.T_a = temps[i];
        const auto rec = compare_currents(p);
        out[i] = {p.T_a, rec.relative_enhancement, build_occupations(p, true).n_x, rec.j_coupled, rec.j_uncoupled};
    }, workers);
    return out;
}

struct IVCurve {
    std::vector<PhotovoltaicPoint> points;  // ordered by increasing Gamma
    bool coupled{true};
    double temperature{0.0};
    std::size_t dropped{0};  // sweep points with undefined voltage

    const PhotovoltaicPoint& peak() const {
        if (points.empty()) throw DomainError("IVCurve: no points");
        std::size_t best = 0;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].power > points[best].power) best = i;
        return points[best];
    }
    double peak_power() const { return peak().power; }
    double voltage_at_peak() const { return peak().voltage; }
};

/// j, V and P over a sweep of the load rate Gamma.
inline IVCurve iv_curve(const ModelParams& base, double Gamma_min, double Gamma_max, std::size_t n_points,
                        bool log_spacing, bool coupled, std::size_t workers = detail::worker_count()) {
    if (!(Gamma_min > 0.0 && Gamma_min < Gamma_max)) throw DomainError("iv_curve: need 0 < Gamma_min < Gamma_max");
    if (n_points < 2) throw DomainError("iv_curve: need at least 2 points");
    validate(base);
    const auto gammas = log_spacing ? logspace(Gamma_min, Gamma_max, n_points)
                                    : linspace(Gamma_min, Gamma_max, n_points);
    const auto occ = build_occupations(base, coupled);

    std::vector<std::optional<PhotovoltaicPoint>> slots(n_points);
    detail::parallel_for(n_points, [&](std::size_t i) {
        ModelParams p = base;
        p.Gamma = gammas[i];
        const auto gen = coupled ? build_generator_coupled(p, occ) : build_generator_uncoupled(p, occ);
        try {
            slots[i] = operating_point(p, steady_state(gen));
        } catch (const UndefinedVoltage&) {
            slots[i].reset();
        }
    }, workers);

    IVCurve curve;
    curve.coupled = coupled;
    curve.temperature = base.T_a;
    for (const auto& s : slots) {
        if (s) curve.points.push_back(*s);
        else ++curve.dropped;
    }
    return curve;
}

/// Default j-V sweep: Gamma in [1e-6, 1] eV, 200 log-spaced points.
inline IVCurve iv_curve(const ModelParams& base, bool coupled) {
    return iv_curve(base, 1e-6, 1.0, 200, true, coupled);
}

/// Populations from rho_bb = 1 until the slowest mode has decayed by e^-40.
inline Trajectory transient_demo(const ModelParams& p, bool coupled, std::size_t samples = 400) {
    if (samples == 0) throw DomainError("transient_demo: need at least one sample");
    const auto gen = build_generator(p, coupled);
    const double t_end = 40.0 * relaxation_time(gen);
    return evolve(gen, ground_state(gen.levels), t_end, t_end / static_cast<double>(samples));
}

} // namespace photocell
