#include "tubes/ode.hpp"

#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace tubes::ode {

namespace odeint = boost::numeric::odeint;

namespace {

using Dopri = odeint::runge_kutta_dopri5<State>;

auto dense_stepper(Tolerances tol) { return odeint::make_dense_output(tol.abs, tol.rel, Dopri()); }

double initial_dt(double t0, double t1) { return (t1 >= t0 ? 1.0 : -1.0) * 1e-3 * std::max(1e-3, std::abs(t1 - t0)); }

}  // namespace

State integrate(const Rhs& f, State x0, double t0, double t1, Tolerances tol) {
  if (t0 == t1) return x0;
  odeint::integrate_adaptive(odeint::make_controlled(tol.abs, tol.rel, Dopri()), f, x0, t0, t1, initial_dt(t0, t1));
  return x0;
}

std::vector<Sample> integrate_sampled(const Rhs& f, State x0, double t0, double t1, std::size_t n_samples,
                                      Tolerances tol) {
  std::vector<Sample> out;
  if (n_samples < 2) n_samples = 2;
  std::vector<double> times(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    times[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  out.reserve(n_samples);
  odeint::integrate_times(dense_stepper(tol), f, x0, times.begin(), times.end(), initial_dt(t0, t1),
                          [&](const State& x, double t) { out.push_back({t, x}); });
  return out;
}

Sample integrate_until(const Rhs& f, State x0, double t0, double t1,
                       const std::function<bool(double, const State&)>& stop, Tolerances tol) {
  auto stepper = dense_stepper(tol);
  stepper.initialize(x0, t0, initial_dt(t0, t1));
  const bool forward = t1 >= t0;
  auto before_end = [&](double t) { return forward ? t < t1 : t > t1; };
  while (before_end(stepper.current_time())) {
    stepper.do_step(f);
    if (!before_end(stepper.current_time())) break;
    if (stop(stepper.current_time(), stepper.current_state())) return {stepper.current_time(), stepper.current_state()};
  }
  State x(x0.size());
  stepper.calc_state(t1, x);
  return {t1, x};
}

}  // namespace tubes::ode
