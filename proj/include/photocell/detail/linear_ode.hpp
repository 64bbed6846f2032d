// linear_ode.hpp: adaptive integration of x' = A x sampled on a time grid

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "photocell/core_physics.hpp"

namespace photocell {

struct IntegratorOptions {
    double abs_tol{1e-12};
    double rel_tol{1e-10};
    std::size_t max_steps_per_sample{2'000'000};
};

/// Raised when the step controller stalls. Carries the last accepted sample.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double t_last, Eigen::VectorXd x_last)
        : Error(what), t_last_(t_last), x_last_(std::move(x_last)) {}

    double last_time() const { return t_last_; }
    const Eigen::VectorXd& last_state() const { return x_last_; }

private:
    double t_last_;
    Eigen::VectorXd x_last_;
};

namespace detail {

/// Output grid 0, dt, 2 dt, ..., always ending exactly at t_end.
inline std::vector<double> sample_times(double t_end, double dt_out) {
    if (!(t_end > 0.0)) throw DomainError("t_end must be > 0");
    if (!(dt_out > 0.0)) throw DomainError("dt_out must be > 0");
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt_out - 1e-9));
    std::vector<double> times;
    times.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) times.push_back(static_cast<double>(k) * dt_out);
    times.push_back(t_end);
    return times;
}

/// Integrates x' = A x with a controlled Dormand-Prince 5(4) stepper and
/// calls observe(x, t) at each requested time. observe may throw to abort.
template <class Observer>
void integrate_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                      const std::vector<double>& times, const IntegratorOptions& opts,
                      Observer&& observe) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    const auto n = static_cast<Eigen::Index>(x0.size());
    State x(x0.data(), x0.data() + n);
    auto rhs = [&A, n](const State& in, State& out, double /*t*/) {
        out.resize(static_cast<std::size_t>(n));
        Eigen::Map<Eigen::VectorXd>(out.data(), n).noalias() =
            A * Eigen::Map<const Eigen::VectorXd>(in.data(), n);
    };

    double t_last = times.empty() ? 0.0 : times.front();
    Eigen::VectorXd x_last = x0;
    auto observer = [&](const State& s, double t) {
        Eigen::Map<const Eigen::VectorXd> view(s.data(), n);
        observe(view, t);
        t_last = t;
        x_last = view;
    };

    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    const double dt0 = std::min(1e-3 / scale, times.size() > 1 ? times[1] - times[0] : 1.0);
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer,
                                odeint::max_step_checker(static_cast<int>(opts.max_steps_per_sample)));
    } catch (const odeint::odeint_error& e) {
        throw IntegrationFailure(std::string("integration failed: ") + e.what(), t_last, x_last);
    } catch (const std::runtime_error& e) {
        // max_step_checker reports with a plain runtime_error
        if (dynamic_cast<const Error*>(&e) != nullptr) throw;
        throw IntegrationFailure(std::string("integration failed: ") + e.what(), t_last, x_last);
    }
}

} // namespace detail
} // namespace photocell
