// positivity.hpp: density-matrix evolution under a generic superoperator and
// auditing of complete positivity along the trajectory.
//
// Density matrices are vectorised by column stacking: vec(rho)[i + j d] = rho(i, j).
// Under this convention vec(A rho B) = (B^T kron A) vec(rho).
//
// Superoperator text format:
//
//     d=<int>
//     <d^2 lines, each with d^2 comma-separated complex entries a+bi>
//
// Blank lines and lines starting with '#' are ignored.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "photocell/core_physics.hpp"
#include "photocell/detail/linear_ode.hpp"
#include "photocell/kinetics.hpp"

namespace photocell {

using Complex = std::complex<double>;

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct Superoperator {
    Eigen::MatrixXcd L;  // d^2 x d^2
    Eigen::Index d{0};

    /// max |(tr-row) L|: zero for trace-preserving generators.
    double trace_defect() const {
        Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(d * d);
        for (Eigen::Index i = 0; i < d; ++i) tr(i + i * d) = 1.0;
        return (tr * L).cwiseAbs().maxCoeff();
    }
    bool trace_preserving(double tol = 1e-10) const { return trace_defect() <= tol; }
};

inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Eigen::Index d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// ---------------------------------------------------------------------------
// Construction

/// -i[H, .] + sum_k (L_k . L_k^dag - 1/2 {L_k^dag L_k, .}).
inline Superoperator lindblad_superoperator(const Eigen::MatrixXcd& H,
                                            const std::vector<Eigen::MatrixXcd>& jumps) {
    const Eigen::Index d = H.rows();
    const auto I = Eigen::MatrixXcd::Identity(d, d);
    auto kron = [](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
        Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        return K;
    };
    const Complex minus_i{0.0, -1.0};
    Eigen::MatrixXcd L = minus_i * (kron(I, H) - kron(H.transpose(), I));
    for (const auto& J : jumps) {
        const Eigen::MatrixXcd JdJ = J.adjoint() * J;
        L += kron(J.conjugate(), J) - 0.5 * kron(I, JdJ) - 0.5 * kron(JdJ.transpose(), I);
    }
    return {std::move(L), d};
}

/// Embeds a Pauli rate generator: populations follow M, each coherence
/// rho_ij decays at the mean of the two levels' total outflow rates. This is
/// the Lindblad generator with jump operators sqrt(M(i, j)) |i><j|.
inline Superoperator embed_pauli_generator(const RateGenerator& gen) {
    const Eigen::Index d = gen.M.rows();
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) L(i + i * d, j + j * d) = gen.M(i, j);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (i != j) L(i + j * d, i + j * d) = 0.5 * (gen.M(i, i) + gen.M(j, j));
    return {std::move(L), d};
}

/// Two-level decay |e> -> |g> (basis g = 0, e = 1) with a population-to-
/// coherence term: d rho_ge/dt = -gamma/2 rho_ge + kappa rho_ee (and h.c.).
/// Trace and Hermiticity are preserved, but for kappa > gamma/2 the state
/// prepared in |e> develops a negative eigenvalue at finite time.
inline Superoperator nonsecular_toy(double gamma, double kappa) {
    const Eigen::Index d = 2;
    auto idx = [d](Eigen::Index i, Eigen::Index j) { return i + j * d; };
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(4, 4);
    L(idx(0, 0), idx(1, 1)) = gamma;
    L(idx(1, 1), idx(1, 1)) = -gamma;
    L(idx(0, 1), idx(0, 1)) = -0.5 * gamma;
    L(idx(1, 0), idx(1, 0)) = -0.5 * gamma;
    L(idx(0, 1), idx(1, 1)) = kappa;
    L(idx(1, 0), idx(1, 1)) = kappa;
    return {std::move(L), d};
}

// ---------------------------------------------------------------------------
// Text I/O

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Parses "a+bi" / "a-bi" (exponents allowed in both parts).
inline std::optional<Complex> parse_complex(std::string_view s) {
    s = trim(s);
    if (s.size() < 2 || s.back() != 'i') return std::nullopt;
    s.remove_suffix(1);
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            const auto re = parse_real(s.substr(0, k));
            const auto im = parse_real(s.substr(k));
            if (!re || !im) return std::nullopt;
            return Complex{*re, *im};
        }
    }
    return std::nullopt;
}

inline std::string format_complex(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

} // namespace detail

struct LoadedSuperoperator {
    Superoperator op;
    std::vector<std::string> warnings;
};

inline LoadedSuperoperator load_superoperator(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t lineno = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        const auto t = detail::trim(raw);
        if (t.empty() || t.front() == '#') continue;
        lines.emplace_back(lineno, t);
    }
    if (lines.empty()) throw ParseError("empty superoperator table", lineno);

    const auto [hline, header] = lines.front();
    if (header.substr(0, 2) != "d=") throw ParseError("expected header 'd=<int>'", hline);
    int d = 0;
    const auto digits = detail::trim(header.substr(2));
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || d < 1)
        throw ParseError("invalid dimension in header", hline);

    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    if (static_cast<Eigen::Index>(lines.size()) - 1 != n)
        throw ParseError("dimension mismatch: expected " + std::to_string(n) + " rows, found "
                             + std::to_string(lines.size() - 1),
                         lines.back().first);

    Eigen::MatrixXcd L(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto [ln, row] = lines[static_cast<std::size_t>(r) + 1];
        std::string_view rest = row;
        Eigen::Index c = 0;
        while (true) {
            const auto comma = rest.find(',');
            const auto tok = rest.substr(0, comma);
            if (c >= n)
                throw ParseError("dimension mismatch: more than " + std::to_string(n) + " entries", ln);
            const auto z = detail::parse_complex(tok);
            if (!z) throw ParseError("malformed complex entry '" + std::string(detail::trim(tok)) + "'", ln);
            L(r, c++) = *z;
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (c != n)
            throw ParseError("dimension mismatch: expected " + std::to_string(n) + " entries, found "
                                 + std::to_string(c),
                             ln);
    }

    LoadedSuperoperator out{{std::move(L), d}, {}};
    if (!out.op.trace_preserving()) {
        std::ostringstream msg;
        msg << "superoperator is not trace preserving (defect " << out.op.trace_defect() << ")";
        out.warnings.push_back(msg.str());
    }
    return out;
}

inline std::string serialize_superoperator(const Superoperator& op) {
    std::string out = "d=" + std::to_string(op.d) + "\n";
    for (Eigen::Index r = 0; r < op.L.rows(); ++r) {
        for (Eigen::Index c = 0; c < op.L.cols(); ++c) {
            if (c) out += ',';
            out += detail::format_complex(op.L(r, c));
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evolution

struct DensitySample {
    double t;
    Eigen::MatrixXcd rho;
};

struct DensityTrajectory {
    std::vector<DensitySample> samples;
    double max_hermiticity_drift{0.0};  // before re-symmetrisation
    bool hermiticity_flag{false};       // drift exceeded the threshold
};

struct DensityEvolveOptions {
    IntegratorOptions integrator{};
    double hermiticity_threshold{1e-6};
};

/// Integrates vec(rho)' = L vec(rho). Each output sample is replaced by
/// (rho + rho^dag)/2 before integration continues; the largest removed
/// anti-Hermitian part is recorded.
inline DensityTrajectory evolve_density_matrix(const Superoperator& op, const Eigen::MatrixXcd& rho0,
                                               double t_end, double dt_out,
                                               const DensityEvolveOptions& opts = {}) {
    const Eigen::Index d = op.d;
    if (rho0.rows() != d || rho0.cols() != d) throw DomainError("evolve_density_matrix: rho0 has wrong shape");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("evolve_density_matrix: rho0 must be Hermitian");
    if (std::abs(rho0.trace() - Complex{1.0, 0.0}) > 1e-10)
        throw DomainError("evolve_density_matrix: rho0 must have unit trace");

    // Real form of the complex system: x = [Re v; Im v].
    const Eigen::Index n = d * d;
    Eigen::MatrixXd A(2 * n, 2 * n);
    A << op.L.real(), -op.L.imag(), op.L.imag(), op.L.real();

    const auto times = detail::sample_times(t_end, dt_out);
    DensityTrajectory traj;
    traj.samples.reserve(times.size());
    traj.samples.push_back({times.front(), rho0});

    Eigen::VectorXd x(2 * n);
    const Eigen::VectorXcd v0 = vectorize(rho0);
    x << v0.real(), v0.imag();

    for (std::size_t k = 1; k < times.size(); ++k) {
        const std::vector<double> segment{times[k - 1], times[k]};
        detail::integrate_linear(A, x, segment, opts.integrator,
                                 [&](const Eigen::Ref<const Eigen::VectorXd>& s, double) { x = s; });
        Eigen::VectorXcd v(n);
        v.real() = x.head(n);
        v.imag() = x.tail(n);
        Eigen::MatrixXcd rho = unvectorize(v, d);
        const double drift = 0.5 * (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        traj.max_hermiticity_drift = std::max(traj.max_hermiticity_drift, drift);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const Eigen::VectorXcd vh = vectorize(rho);
        x << vh.real(), vh.imag();
        traj.samples.push_back({times[k], std::move(rho)});
    }
    traj.hermiticity_flag = traj.max_hermiticity_drift > opts.hermiticity_threshold;
    return traj;
}

// ---------------------------------------------------------------------------
// Audit

inline constexpr double kDefaultNegativityTolerance = 1e-9;
inline constexpr double kDivergenceBound = 1e3;

struct PositivityReport {
    std::vector<double> times;
    std::vector<double> min_eigenvalues;
    std::optional<double> first_negative_time;
    double steady_min_eigenvalue{0.0};  // at the last sample
    bool diverged{false};

    bool positive() const { return !first_negative_time && !diverged; }
};

inline double min_eigenvalue(const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

inline PositivityReport audit_positivity(const std::vector<DensitySample>& samples,
                                         double tolerance = kDefaultNegativityTolerance) {
    if (samples.empty()) throw DomainError("audit_positivity: empty trajectory");
    PositivityReport rep;
    rep.times.reserve(samples.size());
    rep.min_eigenvalues.reserve(samples.size());
    for (const auto& s : samples) {
        const double lam = min_eigenvalue(s.rho);
        rep.times.push_back(s.t);
        rep.min_eigenvalues.push_back(lam);
        if (!rep.first_negative_time && lam < -tolerance) rep.first_negative_time = s.t;
        if (!s.rho.allFinite() || s.rho.cwiseAbs().maxCoeff() > kDivergenceBound) rep.diverged = true;
    }
    rep.steady_min_eigenvalue = rep.min_eigenvalues.back();
    return rep;
}

inline PositivityReport audit_positivity(const DensityTrajectory& traj,
                                         double tolerance = kDefaultNegativityTolerance) {
    return audit_positivity(traj.samples, tolerance);
}

/// Audits a population trajectory as a sequence of diagonal density matrices.
inline PositivityReport audit_positivity(const Trajectory& traj, double tolerance = kDefaultNegativityTolerance) {
    std::vector<DensitySample> samples;
    samples.reserve(traj.size());
    for (const auto& s : traj) samples.push_back({s.t, s.rho.cast<Complex>().asDiagonal()});
    return audit_positivity(samples, tolerance);
}

} // namespace photocell
