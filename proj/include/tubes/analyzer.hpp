#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubes/errors.hpp"
#include "tubes/model.hpp"
#include "tubes/pde.hpp"

namespace tubes {

struct Plateau {
  double c1 = 0.0;
  double c2 = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  double extent() const { return y_hi - y_lo; }
};

/// Maximal runs of cells where both one-sided slopes stay below slope_tol,
/// kept when at least min_extent long. Values are run means.
std::vector<Plateau> detect_plateaus(const TubesField& field, double slope_tol = 2e-3, double min_extent = 10.0);

struct Fronts {
  double left = 0.0;
  double right = 0.0;
};

/// Edges of the mixing zone, where the tube mean leaves -1+eps (scanning up from
/// the bottom) and 1-eps (scanning down from the top). Linear interpolation
/// between cell centers. Throws AnalysisError("no front").
Fronts front_positions(const TubesField& field, double eps = 0.05);

struct TubeMeans {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Mean concentrations over the central half of the mixing zone; a cheap
/// per-step plateau estimate.
TubeMeans mixing_zone_mean(const TubesField& field, const Fronts& fronts);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t samples = 0;
};

/// Ordinary least squares y = slope*x + intercept. Needs at least 3 points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct FitWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Drops the first `transient` fraction of the recorded time span.
FitWindow default_fit_window(const std::vector<SeriesPoint>& series, double transient = 0.2);

struct SpeedEstimate {
  LinearFit left;
  LinearFit right;
  LinearFit width;  ///< h(t)
};

/// Least-squares front speeds over the window. Throws AnalysisError when fewer
/// than 10 usable samples fall inside it.
SpeedEstimate estimate_speeds(const std::vector<SeriesPoint>& series, const FitWindow& window);

/// Reference values a measured terrace is compared against.
struct TheoryRef {
  double v1 = -0.25;
  double v2 = 0.25;
  /// Admissible intermediate states; the nearest one is used.
  std::vector<std::pair<double, double>> sigma1{{0.5, -0.5}, {-0.5, 0.5}};
  double h_slope = 0.5;
  double speed_rel_tol = 0.02;
  double plateau_abs_tol = 0.03;
  double h_slope_rel_tol = 0.05;
  std::string source = "closed form";
};

struct TerraceReport {
  double t_final = 0.0;
  std::vector<Plateau> plateaus;
  std::optional<Plateau> intermediate;
  Fronts fronts;
  std::optional<SpeedEstimate> speeds;
  std::vector<SeriesPoint> series;
  TheoryRef theory;

  double delta_v1 = 0.0;
  double delta_v2 = 0.0;
  double delta_sigma1 = 0.0;
  double delta_h_slope = 0.0;
  bool speeds_pass = false;
  bool plateau_pass = false;
  bool h_slope_pass = false;
  bool terrace_found = false;
  std::vector<std::string> notes;

  bool pass() const { return terrace_found && speeds_pass && plateau_pass && h_slope_pass; }
};

struct AnalysisOptions {
  double slope_tol = 2e-3;
  double min_extent = 10.0;
  double front_eps = 0.05;
  double transient = 0.2;
  /// Plateaus closer than this to a far-field state do not count as intermediate.
  double far_field_margin = 0.1;
};

TerraceReport terrace_report(const std::vector<SeriesPoint>& series, const TubesField& final_field,
                             double t_final, const TheoryRef& theory, const AnalysisOptions& options = {});
TerraceReport terrace_report(const Trajectory& trajectory, const TheoryRef& theory,
                             const AnalysisOptions& options = {});

/// Recomputes the diagnostic series from stored snapshots (used when only
/// snapshots are available).
SeriesPoint measure_series_point(double t, const TubesField& field, double eps = 0.05);

}  // namespace tubes
