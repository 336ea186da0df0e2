#include "tubes/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace tubes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_at(const TubesField& f, std::ptrdiff_t j) {
  if (j < 0) return kLowerFarField;
  if (j >= static_cast<std::ptrdiff_t>(f.size())) return kUpperFarField;
  return 0.5 * (f.c1[j] + f.c2[j]);
}

double y_at(const Grid1D& g, std::ptrdiff_t j) { return g.y_min + (static_cast<double>(j) + 0.5) * g.h(); }

double crossing(const Grid1D& g, std::ptrdiff_t j0, double m0, double m1, double level) {
  const double s = (level - m0) / (m1 - m0);
  return y_at(g, j0) + s * g.h();
}

}  // namespace

std::vector<Plateau> detect_plateaus(const TubesField& field, double slope_tol, double min_extent) {
  const std::size_t n = field.size();
  const double h = field.grid.h();
  std::vector<Plateau> out;
  if (n == 0) return out;

  std::vector<bool> edge_flat(n > 0 ? n - 1 : 0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double d1 = std::abs(field.c1[e + 1] - field.c1[e]) / h;
    const double d2 = std::abs(field.c2[e + 1] - field.c2[e]) / h;
    edge_flat[e] = d1 < slope_tol && d2 < slope_tol;
  }
  auto cell_flat = [&](std::size_t j) {
    const bool lo = j == 0 || edge_flat[j - 1];
    const bool hi = j + 1 == n || edge_flat[j];
    return lo && hi;
  };

  std::size_t j = 0;
  while (j < n) {
    if (!cell_flat(j)) {
      ++j;
      continue;
    }
    const std::size_t first = j;
    double s1 = 0.0, s2 = 0.0;
    while (j < n && cell_flat(j)) {
      s1 += field.c1[j];
      s2 += field.c2[j];
      ++j;
    }
    const std::size_t count = j - first;
    Plateau p;
    p.y_lo = field.grid.y_min + static_cast<double>(first) * h;
    p.y_hi = field.grid.y_min + static_cast<double>(j) * h;
    p.c1 = s1 / static_cast<double>(count);
    p.c2 = s2 / static_cast<double>(count);
    if (p.extent() >= min_extent) out.push_back(p);
  }
  return out;
}

Fronts front_positions(const TubesField& field, double eps) {
  const auto n = static_cast<std::ptrdiff_t>(field.size());
  const double lo_level = kLowerFarField + eps;
  const double hi_level = kUpperFarField - eps;

  std::ptrdiff_t jl = 0;
  while (jl < n && mean_at(field, jl) <= lo_level) ++jl;
  std::ptrdiff_t jr = n - 1;
  while (jr >= 0 && mean_at(field, jr) >= hi_level) --jr;
  if (jl == n || jr < 0) throw AnalysisError("no front");

  Fronts fr;
  fr.left = crossing(field.grid, jl - 1, mean_at(field, jl - 1), mean_at(field, jl), lo_level);
  fr.right = crossing(field.grid, jr, mean_at(field, jr), mean_at(field, jr + 1), hi_level);
  return fr;
}

TubeMeans mixing_zone_mean(const TubesField& field, const Fronts& fronts) {
  const double quarter = 0.25 * (fronts.right - fronts.left);
  const double lo = fronts.left + quarter;
  const double hi = fronts.right - quarter;
  double s1 = 0.0, s2 = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double y = field.grid.center(j);
    if (y >= lo && y <= hi) {
      s1 += field.c1[j];
      s2 += field.c2[j];
      ++count;
    }
  }
  if (count == 0) {
    const double mid = 0.5 * (fronts.left + fronts.right);
    const double pos = (mid - field.grid.y_min) / field.grid.h() - 0.5;
    const auto j = static_cast<std::size_t>(
        std::clamp(std::lround(pos), 0L, static_cast<long>(field.size()) - 1));
    return {field.c1[j], field.c2[j]};
  }
  return {s1 / static_cast<double>(count), s2 / static_cast<double>(count)};
}

SeriesPoint measure_series_point(double t, const TubesField& field, double eps) {
  SeriesPoint p;
  p.t = t;
  p.front_left = p.front_right = p.h_width = p.plateau_c1 = p.plateau_c2 = kNaN;
  try {
    const auto fronts = front_positions(field, eps);
    p.front_left = fronts.left;
    p.front_right = fronts.right;
    p.h_width = fronts.right - fronts.left;
    const auto mid = mixing_zone_mean(field, fronts);
    p.plateau_c1 = mid.c1;
    p.plateau_c2 = mid.c2;
  } catch (const AnalysisError&) {
  }
  return p;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw AnalysisError("insufficient samples for a line fit");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw AnalysisError("degenerate abscissa in line fit");
  LinearFit fit;
  fit.samples = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  fit.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

FitWindow default_fit_window(const std::vector<SeriesPoint>& series, double transient) {
  if (series.empty()) return {};
  const double t0 = series.front().t;
  const double t1 = series.back().t;
  return {t0 + transient * (t1 - t0), t1};
}

SpeedEstimate estimate_speeds(const std::vector<SeriesPoint>& series, const FitWindow& window) {
  std::vector<double> t, yl, yr, w;
  for (const auto& p : series) {
    if (p.t < window.t_begin || p.t > window.t_end) continue;
    if (!std::isfinite(p.front_left) || !std::isfinite(p.front_right)) continue;
    t.push_back(p.t);
    yl.push_back(p.front_left);
    yr.push_back(p.front_right);
    w.push_back(p.h_width);
  }
  if (t.size() < 10)
    throw AnalysisError(fmt::format("insufficient samples: {} in fit window [{}, {}], need 10", t.size(),
                                    window.t_begin, window.t_end));
  return {fit_line(t, yl), fit_line(t, yr), fit_line(t, w)};
}

TerraceReport terrace_report(const std::vector<SeriesPoint>& series, const TubesField& final_field, double t_final,
                             const TheoryRef& theory, const AnalysisOptions& options) {
  TerraceReport rep;
  rep.t_final = t_final;
  rep.theory = theory;
  rep.series = series;
  rep.plateaus = detect_plateaus(final_field, options.slope_tol, options.min_extent);
  rep.fronts = front_positions(final_field, options.front_eps);

  const double m = options.far_field_margin;
  for (const auto& p : rep.plateaus) {
    const bool near_low = std::max(std::abs(p.c1 - kLowerFarField), std::abs(p.c2 - kLowerFarField)) < m;
    const bool near_high = std::max(std::abs(p.c1 - kUpperFarField), std::abs(p.c2 - kUpperFarField)) < m;
    if (near_low || near_high) continue;
    if (!rep.intermediate || p.extent() > rep.intermediate->extent()) rep.intermediate = p;
  }
  rep.terrace_found = rep.intermediate.has_value();
  if (!rep.terrace_found) rep.notes.emplace_back("no terrace: no intermediate plateau detected");

  rep.speeds = estimate_speeds(series, default_fit_window(series, options.transient));
  rep.delta_v1 = rep.speeds->left.slope - theory.v1;
  rep.delta_v2 = rep.speeds->right.slope - theory.v2;
  rep.delta_h_slope = rep.speeds->width.slope - theory.h_slope;
  rep.speeds_pass = std::abs(rep.delta_v1) <= theory.speed_rel_tol * std::abs(theory.v1) &&
                    std::abs(rep.delta_v2) <= theory.speed_rel_tol * std::abs(theory.v2);
  rep.h_slope_pass = std::abs(rep.delta_h_slope) <= theory.h_slope_rel_tol * std::abs(theory.h_slope);

  if (rep.intermediate) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s1, s2] : theory.sigma1) {
      const double d = std::max(std::abs(rep.intermediate->c1 - s1), std::abs(rep.intermediate->c2 - s2));
      best = std::min(best, d);
    }
    rep.delta_sigma1 = best;
    rep.plateau_pass = best <= theory.plateau_abs_tol;
  } else {
    rep.delta_sigma1 = kNaN;
  }
  rep.notes.emplace_back("measured agreement only; convergence to a terrace is not asserted");
  return rep;
}

TerraceReport terrace_report(const Trajectory& trajectory, const TheoryRef& theory, const AnalysisOptions& options) {
  if (trajectory.snapshots.empty()) throw AnalysisError("trajectory has no snapshots");
  const auto& last = trajectory.snapshots.back();
  return terrace_report(trajectory.series, last.field, last.t, theory, options);
}

}  // namespace tubes
