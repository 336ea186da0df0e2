#pragma once

#include <functional>
#include <vector>

namespace tubes::ode {

using State = std::vector<double>;
using Rhs = std::function<void(const State& x, State& dxdt, double t)>;

struct Tolerances {
  double abs = 1e-12;
  double rel = 1e-12;
};

struct Sample {
  double t = 0.0;
  State x;
};

/// Adaptive Dormand-Prince integration from t0 to t1 (t1 < t0 integrates
/// backwards). Returns the state at t1.
State integrate(const Rhs& f, State x0, double t0, double t1, Tolerances tol = {});

/// Same, sampling the dense output on a uniform grid of n_samples points
/// including both ends.
std::vector<Sample> integrate_sampled(const Rhs& f, State x0, double t0, double t1, std::size_t n_samples,
                                      Tolerances tol = {});

/// Integrates until stop(t, x) is true after an accepted step, or until t1.
Sample integrate_until(const Rhs& f, State x0, double t0, double t1,
                       const std::function<bool(double, const State&)>& stop, Tolerances tol = {});

}  // namespace tubes::ode
