#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tubes/errors.hpp"
#include "tubes/model.hpp"

namespace tubes {

/// Velocities and pressure drop belonging to a TubesField.
struct FlowField {
  std::vector<double> u1;         ///< tube 1 velocity at cell centers
  std::vector<double> u2;         ///< tube 2 velocity, -u1
  std::vector<double> uT_over_l;  ///< interflow rate u_T/l at cell centers
  std::vector<double> q;          ///< pressure drop p2 - p1; zero for TFE
  std::vector<double> u1_edge;    ///< tube 1 velocity on the n+1 cell faces (used by the fluxes)
};

/// u1 = (c2 - c1)/2, u2 = -u1, u_T/l = d/dy (c1 - c2)/2 (centered), q = 0.
FlowField tfe_closure(const TubesField& field);

/// Solves q'' - (2/l^2) q = d/dy (c1 - c2) with q = 0 outside the domain, then
/// u1 = (q' - (c1 - c2))/2 on faces and u_T/l = -q/l^2.
FlowField ipm_flow_solve(const TubesField& field, double l);

FlowField flow_for(const TubesField& field, const ModelParams& params);

/// Max-norm residual of the discrete pressure equation, scaled by max(1, |rhs|).
double ipm_residual(const TubesField& field, const FlowField& flow, double l);

/// Upwind interflow from tube 1 to tube 2.
std::vector<double> interflow(const TubesField& field, const FlowField& flow);

struct Snapshot {
  double t = 0.0;
  TubesField field;
  FlowField flow;
  std::vector<double> f;
};

Snapshot make_snapshot(double t, TubesField field, const ModelParams& params);

struct Rates {
  std::vector<double> dc1;
  std::vector<double> dc2;
};

/// Semi-discrete right-hand side: first-order upwind face fluxes, centered
/// diffusion, Dirichlet ghost cells at -1 (bottom) and +1 (top).
Rates rhs(const Snapshot& snapshot);

/// dt = cfl * min(h / max|u|, h^2 / 2).
double stable_dt(const Snapshot& snapshot, double cfl);

/// One SSP-RK2 (Heun) step with the flow recomputed at both stages.
Snapshot step(const Snapshot& snapshot, double dt, const ModelParams& params);

struct SeriesPoint {
  double t = 0.0;
  double h_width = 0.0;
  double front_left = 0.0;
  double front_right = 0.0;
  double plateau_c1 = 0.0;
  double plateau_c2 = 0.0;
};

struct RunStats {
  std::size_t steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  std::string kernels;
  std::string scheme = "finite-volume upwind advection, centered diffusion, upwind interflow, SSP-RK2";
};

struct Trajectory {
  SimulationConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<SeriesPoint> series;
  RunStats stats;
};

/// Raised when the state stops being finite or the step size collapses.
class SimulationAborted : public SolverError {
 public:
  SimulationAborted(const std::string& message, Snapshot last)
      : SolverError(message), last_(std::make_shared<Snapshot>(std::move(last))) {}
  const Snapshot& last() const { return *last_; }

 private:
  std::shared_ptr<Snapshot> last_;
};

/// Called with every recorded output snapshot.
using SnapshotSink = std::function<void(const Snapshot&)>;

/// Runs the configured simulation. Snapshots at multiples of output_every (and
/// t_max) are kept in the trajectory unless a sink is given, in which case they
/// are streamed to the sink instead.
Trajectory simulate(const SimulationConfig& config, const SnapshotSink& sink = {});

/// Integrates from a given field (used by tests and by simulate).
Trajectory simulate_from(const SimulationConfig& config, TubesField initial, const SnapshotSink& sink = {});

}  // namespace tubes
