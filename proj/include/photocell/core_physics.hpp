// core_physics.hpp: model parameters, coupled-dimer eigensystem, thermal occupations

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace photocell {

/// Boltzmann constant in eV/K, fixed to 7 significant figures.
inline constexpr double kBoltzmann = 8.617333e-5;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Energies and rates in eV (hbar = 1, time unit hbar/eV ~ 0.6582 fs). The
/// ground state |b> is the energy origin.
struct ModelParams {
    double E1{1.8};         // donor 1 excited state
    double E2{1.8};         // donor 2 excited state
    double E_alpha{1.6};    // charge-separated acceptor level
    double E_beta{0.2};     // positively charged cycling level
    double J12{0.015};      // excitonic coupling

    double gamma_1h{0.62e-6};
    double gamma_2h{0.62e-6};
    double gamma_1c{6.0e-3};
    double gamma_2c{6.0e-3};
    double gamma_x{25.0e-3};  // bright -> dark relaxation
    double Gamma{0.124};      // load (work extraction)
    double Gamma_c{0.0248};   // cycle closing beta -> b

    double T_a{300.0};        // ambient temperature (K)

    /// Fixed photon occupation for every optical transition. When empty the
    /// photon bath is thermal at T_a.
    std::optional<double> n_h_override{60000.0};

    static constexpr double E_b = 0.0;

    bool operator==(const ModelParams&) const = default;
};

/// Throws DomainError naming the first violated constraint.
inline void validate(const ModelParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DomainError(std::string("invalid parameters: ") + what);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(p.E1) && finite(p.E2) && finite(p.E_alpha) && finite(p.E_beta) && finite(p.J12),
            "energies must be finite");
    require(p.E_alpha > ModelParams::E_b, "E_alpha must lie above E_b");
    require(p.E1 > p.E_alpha && p.E2 > p.E_alpha, "donor levels must lie above E_alpha");
    require(p.E_beta > ModelParams::E_b, "E_beta must lie above E_b");
    require(p.J12 >= 0.0, "J12 must be >= 0");
    for (double r : {p.gamma_1h, p.gamma_2h, p.gamma_1c, p.gamma_2c, p.gamma_x, p.Gamma, p.Gamma_c})
        require(finite(r) && r >= 0.0, "rates must be finite and >= 0");
    require(finite(p.T_a) && p.T_a > 0.0, "T_a must be > 0");
    if (p.n_h_override)
        require(finite(*p.n_h_override) && *p.n_h_override >= 0.0, "n_h must be >= 0");
}

struct DimerEigensystem {
    double E_x1;      // bright
    double E_x2;      // dark
    double theta;     // mixing angle, tan(2 theta) = 2 J12 / (E1 - E2)
    double splitting; // E_x1 - E_x2
};

/// Eigenvalues of the single-excitation block [[E1, J12], [J12, E2]].
inline DimerEigensystem dimer_eigensystem(double E1, double E2, double J12) {
    if (!(J12 >= 0.0)) throw DomainError("dimer_eigensystem: J12 must be >= 0");
    const double mean = 0.5 * (E1 + E2);
    const double half_split = std::hypot(0.5 * (E1 - E2), J12);
    // Degenerate donors: theta = pi/4 (symmetric/antisymmetric states).
    const double theta = (E1 == E2) ? std::numbers::pi / 4.0 : 0.5 * std::atan2(2.0 * J12, E1 - E2);
    return {mean + half_split, mean - half_split, theta, 2.0 * half_split};
}

struct InterferenceRates {
    double gamma_h; // bright-state optical rate
    double gamma_c; // dark-state transfer rate
};

/// Constructive interference: the bright state carries both donors' optical
/// strength, the dark state both donors' transfer strength.
inline InterferenceRates interference_rates(double gamma_1h, double gamma_2h, double gamma_1c,
                                            double gamma_2c) {
    if (gamma_1h < 0.0 || gamma_2h < 0.0 || gamma_1c < 0.0 || gamma_2c < 0.0)
        throw DomainError("interference_rates: rates must be >= 0");
    return {gamma_1h + gamma_2h, gamma_1c + gamma_2c};
}

/// Bose-Einstein mean occupation of a mode of energy delta_E at temperature T.
inline double planck_occupation(double delta_E, double T) {
    if (!(delta_E > 0.0)) throw DomainError("planck_occupation: delta_E must be > 0");
    if (!(T > 0.0)) throw DomainError("planck_occupation: T must be > 0");
    return 1.0 / std::expm1(delta_E / (kBoltzmann * T));
}

/// Temperature at which a mode of energy delta_E has occupation n_h.
inline double effective_photon_temperature(double n_h, double delta_E) {
    if (!(n_h > 0.0)) throw DomainError("effective_photon_temperature: n_h must be > 0");
    if (!(delta_E > 0.0)) throw DomainError("effective_photon_temperature: delta_E must be > 0");
    return delta_E / (kBoltzmann * std::log1p(1.0 / n_h));
}

struct OccupationSet {
    double n_h;   // photons at the bright transition E_x1 - E_b
    double n_1h;  // photons at E1 - E_b
    double n_2h;  // photons at E2 - E_b
    double n_1c;  // phonons at E1 - E_alpha (uncoupled) or E_x1 - E_alpha (coupled)
    double n_2c;  // phonons at E2 - E_alpha (uncoupled) or E_x2 - E_alpha (coupled)
    double n_x;   // phonons at the bright-dark splitting
    double N_c;   // phonons at E_beta - E_b
};

/// Occupations for the uncoupled (coupled = false) or coupled level scheme.
/// n_x is only meaningful when the splitting is nonzero; it is 0 otherwise.
inline OccupationSet build_occupations(const ModelParams& p, bool coupled) {
    validate(p);
    const auto eig = dimer_eigensystem(p.E1, p.E2, p.J12);
    const double T = p.T_a;
    auto photons = [&](double gap) {
        return p.n_h_override ? *p.n_h_override : planck_occupation(gap, T);
    };

    OccupationSet occ{};
    occ.n_h = photons(eig.E_x1 - ModelParams::E_b);
    occ.n_1h = photons(p.E1 - ModelParams::E_b);
    occ.n_2h = photons(p.E2 - ModelParams::E_b);
    if (coupled) {
        occ.n_1c = planck_occupation(eig.E_x1 - p.E_alpha, T);
        occ.n_2c = planck_occupation(eig.E_x2 - p.E_alpha, T);
    } else {
        occ.n_1c = planck_occupation(p.E1 - p.E_alpha, T);
        occ.n_2c = planck_occupation(p.E2 - p.E_alpha, T);
    }
    occ.n_x = eig.splitting > 0.0 ? planck_occupation(eig.splitting, T) : 0.0;
    occ.N_c = planck_occupation(p.E_beta - ModelParams::E_b, T);
    return occ;
}

} // namespace photocell
