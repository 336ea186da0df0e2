#include "tubes/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "tubes/analyzer.hpp"
#include "tubes/kernels.hpp"
#include "tubes/tridiagonal.hpp"

namespace tubes {

namespace {

void pad(const std::vector<double>& c, std::vector<double>& cp) {
  cp.resize(c.size() + 2);
  cp.front() = kLowerFarField;
  std::copy(c.begin(), c.end(), cp.begin() + 1);
  cp.back() = kUpperFarField;
}

bool all_finite(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// Scratch buffers for one rhs evaluation.
struct Workspace {
  std::vector<double> c1p, c2p, flux1, flux2;
};

void evaluate_rhs(const TubesField& field, const FlowField& flow, const std::vector<double>& f, Workspace& ws,
                  std::vector<double>& dc1, std::vector<double>& dc2) {
  const auto& k = kernels::active();
  const std::size_t n = field.size();
  const double h = field.grid.h();
  pad(field.c1, ws.c1p);
  pad(field.c2, ws.c2p);
  ws.flux1.resize(n + 1);
  ws.flux2.resize(n + 1);
  dc1.resize(n);
  dc2.resize(n);
  k.upwind_flux(flow.u1_edge.data(), 1.0, ws.c1p.data(), ws.flux1.data(), n + 1);
  k.upwind_flux(flow.u1_edge.data(), -1.0, ws.c2p.data(), ws.flux2.data(), n + 1);
  k.cell_update(ws.c1p.data(), ws.flux1.data(), f.data(), -1.0, 1.0 / h, 1.0 / (h * h), dc1.data(), n);
  k.cell_update(ws.c2p.data(), ws.flux2.data(), f.data(), 1.0, 1.0 / h, 1.0 / (h * h), dc2.data(), n);
}

// Pressure operator for one (grid, l) pair, factored once per run.
class PressureSolver {
 public:
  PressureSolver(const Grid1D& grid, double l)
      : h_(grid.h()), l_(l), lu_(grid.n_cells, 1.0, -(2.0 + 2.0 * h_ * h_ / (l * l)), 1.0) {}

  void solve(const TubesField& field, FlowField& flow) {
    const std::size_t n = field.size();
    d_.resize(n + 2);
    d_.front() = 0.0;
    d_.back() = 0.0;
    for (std::size_t j = 0; j < n; ++j) d_[j + 1] = field.c1[j] - field.c2[j];
    rhs_.resize(n);
    for (std::size_t j = 0; j < n; ++j) rhs_[j] = h_ * (d_[j + 2] - d_[j]) * 0.5;
    flow.q.resize(n);
    lu_.solve(rhs_, flow.q);

    const double inv_h = 1.0 / h_;
    flow.u1_edge.resize(n + 1);
    for (std::size_t e = 0; e <= n; ++e) {
      const double q_hi = e < n ? flow.q[e] : 0.0;
      const double q_lo = e > 0 ? flow.q[e - 1] : 0.0;
      flow.u1_edge[e] = ((q_hi - q_lo) * inv_h - (d_[e] + d_[e + 1]) * 0.5) * 0.5;
    }
    flow.u1.resize(n);
    flow.u2.resize(n);
    flow.uT_over_l.resize(n);
    const double inv_l2 = 1.0 / (l_ * l_);
    for (std::size_t j = 0; j < n; ++j) {
      flow.u1[j] = 0.5 * (flow.u1_edge[j] + flow.u1_edge[j + 1]);
      flow.u2[j] = -flow.u1[j];
      flow.uT_over_l[j] = -(flow.q[j] * inv_l2);
    }
  }

 private:
  double h_;
  double l_;
  TridiagonalFactorization lu_;
  std::vector<double> d_, rhs_;
};

void tfe_closure_into(const TubesField& field, Workspace& ws, FlowField& flow) {
  const auto& k = kernels::active();
  const std::size_t n = field.size();
  pad(field.c1, ws.c1p);
  pad(field.c2, ws.c2p);
  flow.u1_edge.resize(n + 1);
  k.tfe_edge_velocity(ws.c1p.data(), ws.c2p.data(), flow.u1_edge.data(), n + 1);
  flow.uT_over_l.resize(n);
  k.edge_divergence(flow.u1_edge.data(), 1.0 / field.grid.h(), flow.uT_over_l.data(), n);
  flow.u1.resize(n);
  flow.u2.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    flow.u1[j] = (field.c2[j] - field.c1[j]) * 0.5;
    flow.u2[j] = -flow.u1[j];
  }
  flow.q.assign(n, 0.0);
}

void interflow_into(const TubesField& field, const FlowField& flow, std::vector<double>& f) {
  f.resize(field.size());
  kernels::active().interflow(flow.uT_over_l.data(), field.c1.data(), field.c2.data(), f.data(), field.size());
}

// Evolves a snapshot in place; owns all scratch memory.
class Stepper {
 public:
  explicit Stepper(const ModelParams& params, const Grid1D& grid) : params_(params) {
    if (params.model == Model::IPM) pressure_ = std::make_unique<PressureSolver>(grid, params.l);
  }

  void refresh(Snapshot& s) {
    if (pressure_) {
      pressure_->solve(s.field, s.flow);
    } else {
      tfe_closure_into(s.field, ws_, s.flow);
    }
    interflow_into(s.field, s.flow, s.f);
  }

  // s must be refreshed on entry; it is refreshed on exit.
  void advance(Snapshot& s, double dt) {
    const auto& k = kernels::active();
    const std::size_t n = s.field.size();
    evaluate_rhs(s.field, s.flow, s.f, ws_, k1_.dc1, k1_.dc2);
    stage_.t = s.t + dt;
    stage_.field.grid = s.field.grid;
    stage_.field.c1.resize(n);
    stage_.field.c2.resize(n);
    k.axpy(s.field.c1.data(), dt, k1_.dc1.data(), stage_.field.c1.data(), n);
    k.axpy(s.field.c2.data(), dt, k1_.dc2.data(), stage_.field.c2.data(), n);
    refresh(stage_);
    evaluate_rhs(stage_.field, stage_.flow, stage_.f, ws_, k2_.dc1, k2_.dc2);
    k.rk2_combine(s.field.c1.data(), stage_.field.c1.data(), dt, k2_.dc1.data(), s.field.c1.data(), n);
    k.rk2_combine(s.field.c2.data(), stage_.field.c2.data(), dt, k2_.dc2.data(), s.field.c2.data(), n);
    s.t += dt;
    refresh(s);
  }

 private:
  ModelParams params_;
  std::unique_ptr<PressureSolver> pressure_;
  Workspace ws_;
  Rates k1_, k2_;
  Snapshot stage_;
};

SeriesPoint series_point(const Snapshot& s) { return measure_series_point(s.t, s.field); }

}  // namespace

FlowField tfe_closure(const TubesField& field) {
  Workspace ws;
  FlowField flow;
  tfe_closure_into(field, ws, flow);
  return flow;
}

FlowField ipm_flow_solve(const TubesField& field, double l) {
  if (!(l > 0.0)) throw ConfigError("l must be positive for IPM");
  FlowField flow;
  PressureSolver(field.grid, l).solve(field, flow);
  return flow;
}

FlowField flow_for(const TubesField& field, const ModelParams& params) {
  return params.model == Model::IPM ? ipm_flow_solve(field, params.l) : tfe_closure(field);
}

double ipm_residual(const TubesField& field, const FlowField& flow, double l) {
  const std::size_t n = field.size();
  const double h = field.grid.h();
  auto d = [&](std::ptrdiff_t j) {
    return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : field.c1[j] - field.c2[j];
  };
  auto q = [&](std::ptrdiff_t j) { return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : flow.q[j]; };
  double worst = 0.0, scale = 1.0;
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j) {
    const double forcing = (d(j + 1) - d(j - 1)) / (2.0 * h);
    const double lhs = (q(j + 1) - 2.0 * q(j) + q(j - 1)) / (h * h) - 2.0 * q(j) / (l * l);
    worst = std::max(worst, std::abs(lhs - forcing));
    scale = std::max(scale, std::abs(forcing));
  }
  return worst / scale;
}

std::vector<double> interflow(const TubesField& field, const FlowField& flow) {
  std::vector<double> f;
  interflow_into(field, flow, f);
  return f;
}

Snapshot make_snapshot(double t, TubesField field, const ModelParams& params) {
  Snapshot s;
  s.t = t;
  s.field = std::move(field);
  Stepper(params, s.field.grid).refresh(s);
  return s;
}

Rates rhs(const Snapshot& snapshot) {
  Workspace ws;
  Rates r;
  evaluate_rhs(snapshot.field, snapshot.flow, snapshot.f, ws, r.dc1, r.dc2);
  return r;
}

double stable_dt(const Snapshot& snapshot, double cfl) {
  const double h = snapshot.field.grid.h();
  const double umax = kernels::active().max_abs(snapshot.flow.u1_edge.data(), snapshot.flow.u1_edge.size());
  const double diffusive = h * h / 2.0;
  const double advective = umax > 0.0 ? h / umax : std::numeric_limits<double>::infinity();
  return cfl * std::min(advective, diffusive);
}

Snapshot step(const Snapshot& snapshot, double dt, const ModelParams& params) {
  Snapshot s = snapshot;
  Stepper stepper(params, s.field.grid);
  stepper.advance(s, dt);
  return s;
}

Trajectory simulate(const SimulationConfig& config, const SnapshotSink& sink) {
  return simulate_from(config, make_initial_data(config.grid, config.initial), sink);
}

Trajectory simulate_from(const SimulationConfig& config, TubesField initial, const SnapshotSink& sink) {
  Trajectory traj;
  traj.config = config;
  traj.stats.kernels = std::string(kernels::active().name);
  traj.stats.dt_min = std::numeric_limits<double>::infinity();

  Stepper stepper(config.params, config.grid);
  Snapshot s;
  s.t = 0.0;
  s.field = std::move(initial);
  stepper.refresh(s);

  auto emit = [&](const Snapshot& snap) {
    if (sink) {
      sink(snap);
    } else {
      traj.snapshots.push_back(snap);
    }
  };
  emit(s);
  traj.series.push_back(series_point(s));

  const double t_max = config.run.t_max;
  const double every = config.run.output_every;
  const double series_every = config.run.series_every;
  std::size_t next_output = 1;
  double next_series = series_every;
  const double time_eps = 1e-12 * std::max(1.0, t_max);

  while (s.t < t_max - time_eps) {
    double dt = stable_dt(s, config.run.cfl);
    const double target = std::min(t_max, static_cast<double>(next_output) * every);
    bool hits_output = false;
    if (s.t + dt >= target - time_eps) {
      dt = target - s.t;
      hits_output = true;
    }
    if (!(dt > 1e-14 * std::max(1.0, s.t)))
      throw SimulationAborted(fmt::format("time step underflow at t={:.17g} (dt={:.3g})", s.t, dt), s);
    stepper.advance(s, dt);
    if (hits_output) s.t = target;  // remove accumulated round-off
    ++traj.stats.steps;
    traj.stats.dt_min = std::min(traj.stats.dt_min, dt);
    traj.stats.dt_max = std::max(traj.stats.dt_max, dt);

    if (!all_finite(s.field.c1) || !all_finite(s.field.c2))
      throw SimulationAborted(fmt::format("non-finite concentration at t={:.17g}", s.t), s);

    if (series_every == 0.0 || s.t >= next_series - time_eps || hits_output) {
      traj.series.push_back(series_point(s));
      while (series_every > 0.0 && next_series <= s.t + time_eps) next_series += series_every;
    }
    if (hits_output) {
      emit(s);
      ++next_output;
    }
  }
  if (traj.stats.steps == 0) traj.stats.dt_min = 0.0;
  return traj;
}

}  // namespace tubes
