// observables.hpp: photovoltaic quantities from steady-state populations
//
// Currents are reported as j/e in rate units (eV with hbar = 1), voltages in
// volts (numerically eV per elementary charge) and powers as (j/e) * V.

#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "photocell/core_physics.hpp"
#include "photocell/kinetics.hpp"

namespace photocell {

class UndefinedVoltage : public Error {
public:
    using Error::Error;
};

struct PhotovoltaicPoint {
    double current_over_e;
    double voltage;
    double power;
    double Gamma_load;
};

struct EnhancementRecord {
    double j_coupled;
    double j_uncoupled;
    double relative_enhancement;
};

/// j/e = Gamma rho_alpha.
inline double current(double rho_alpha, double Gamma) {
    if (!(rho_alpha >= 0.0 && rho_alpha <= 1.0)) throw DomainError("current: rho_alpha must lie in [0, 1]");
    return Gamma * rho_alpha;
}

/// Load voltage from the alpha/beta population ratio.
inline double voltage(const ModelParams& p, double rho_alpha, double rho_beta) {
    if (!(rho_alpha > 0.0) || !(rho_beta > 0.0)) {
        std::ostringstream msg;
        msg << "voltage undefined for rho_alpha=" << rho_alpha << ", rho_beta=" << rho_beta;
        throw UndefinedVoltage(msg.str());
    }
    return p.E_alpha - p.E_beta + kBoltzmann * p.T_a * std::log(rho_alpha / rho_beta);
}

/// Current, voltage and power at the load rate stored in p.
inline PhotovoltaicPoint operating_point(const ModelParams& p, const PopulationState& steady) {
    const double ra = steady.rho(index_of(Level::alpha));
    const double rb = steady.rho(index_of(Level::beta));
    const double j = current(ra, p.Gamma);
    const double v = voltage(p, ra, rb);
    return {j, v, j * v, p.Gamma};
}

namespace detail {

/// Evaluates num / (rest + num / Gamma) written as num Gamma / (Gamma rest + num)
/// so that Gamma = 0 yields j = 0.
inline double load_limited(double numerator, double rest, double Gamma, const char* who) {
    const double den = Gamma * rest + numerator;
    if (den == 0.0) throw DomainError(std::string(who) + ": zero denominator");
    return numerator * Gamma / den;
}

} // namespace detail

/// Closed-form uncoupled current for vanishing ambient occupations, with
/// gamma_h = gamma_1h + gamma_2h and gamma_c = gamma_1c + gamma_2c.
inline double analytic_current_uncoupled(const ModelParams& p, const OccupationSet& occ) {
    const double gh = p.gamma_1h + p.gamma_2h;
    const double gc = p.gamma_1c + p.gamma_2c;
    const double Gc = p.Gamma_c;
    const double nh = occ.n_1h;
    const double num = gc * Gc * gh * nh;
    const double rest = gc * Gc + (gc + 3.0 * Gc) * gh * nh + Gc * gh;
    return detail::load_limited(num, rest, p.Gamma, "analytic_current_uncoupled");
}

/// Closed-form coupled current for vanishing n_1c, n_2c, N_c (n_x retained).
inline double analytic_current_coupled(const ModelParams& p, const OccupationSet& occ) {
    const auto [gh, gc] = interference_rates(p.gamma_1h, p.gamma_2h, p.gamma_1c, p.gamma_2c);
    const double gx = p.gamma_x;
    const double Gc = p.Gamma_c;
    const double nh = occ.n_h;
    const double nx = occ.n_x;
    const double num = nh * (1.0 + nx) * gc * Gc * gh * gx;
    const double rest = (nh * (1.0 + 3.0 * nx) + nx) * Gc * gh * gx
                        + gc * ((1.0 + 2.0 * nh) * Gc * gh + (1.0 + nx) * (Gc + nh * gh) * gx);
    return detail::load_limited(num, rest, p.Gamma, "analytic_current_coupled");
}

inline double enhancement(double j, double j_tilde) {
    if (!(j_tilde > 0.0)) throw DomainError("enhancement: reference current must be > 0");
    return (j - j_tilde) / j_tilde;
}

inline EnhancementRecord make_enhancement_record(double j, double j_tilde) {
    return {j, j_tilde, enhancement(j, j_tilde)};
}

inline double relative_efficiency(double P_max, double P_tilde_max) {
    if (!(P_tilde_max > 0.0)) throw DomainError("relative_efficiency: reference power must be > 0");
    return (P_max - P_tilde_max) / P_tilde_max;
}

/// Power drawn from the sun: every extracted carrier was lifted across `gap`.
inline double sun_power(double j, double gap) {
    if (!(gap > 0.0)) throw DomainError("sun_power: gap must be > 0");
    return j * gap;
}

/// Optical gap of the absorbing level: E_a1 - E_b uncoupled, E_x1 - E_b coupled.
inline double absorbing_gap(const ModelParams& p, bool coupled) {
    return coupled ? dimer_eigensystem(p.E1, p.E2, p.J12).E_x1 - ModelParams::E_b : p.E1 - ModelParams::E_b;
}

} // namespace photocell
