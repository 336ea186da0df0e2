#include "tubes/io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace tubes::io {

std::string real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string snapshot_filename(double t) { return fmt::format("snap_t{}.csv", t); }

std::optional<double> snapshot_time(const std::string& name) {
  constexpr std::string_view prefix = "snap_t", suffix = ".csv";
  if (name.size() <= prefix.size() + suffix.size() || !name.starts_with(prefix) || !name.ends_with(suffix))
    return std::nullopt;
  const std::string mid = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  char* end = nullptr;
  const double t = std::strtod(mid.c_str(), &end);
  if (end != mid.c_str() + mid.size()) return std::nullopt;
  return t;
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_table(const fs::path& path, const std::vector<std::string>& required) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  for (const auto& col : required)
    if (std::find(t.header.begin(), t.header.end(), col) == t.header.end())
      throw ConfigError(fmt::format("{}: missing column '{}'", path.string(), col));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ConfigError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), lineno, t.header.size(),
                                    cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double x = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), lineno, c));
      row.push_back(x);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t column(const Table& t, const std::string& name) {
  return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
}

std::string join_row(std::initializer_list<double> xs) {
  std::string s;
  bool first = true;
  for (double x : xs) {
    if (!first) s += ',';
    s += real(x);
    first = false;
  }
  s += '\n';
  return s;
}

json pair_json(ConcentrationPair c) { return json::array({c.c1, c.c2}); }

}  // namespace

void write_snapshot_csv(const fs::path& path, const Snapshot& s) {
  std::string out = "y,c1,c2,u1,q,f\n";
  out.reserve(out.size() + s.field.size() * 120);
  for (std::size_t j = 0; j < s.field.size(); ++j)
    out += join_row({s.field.grid.center(j), s.field.c1[j], s.field.c2[j], s.flow.u1[j], s.flow.q[j], s.f[j]});
  write_text(path, out);
}

TubesField read_snapshot_csv(const fs::path& path) {
  const Table t = read_table(path, {"y", "c1", "c2"});
  const std::size_t n = t.rows.size();
  if (n < 8) throw ConfigError(path.string() + ": fewer than 8 cells");
  const std::size_t iy = column(t, "y"), i1 = column(t, "c1"), i2 = column(t, "c2");
  const double y0 = t.rows.front()[iy], y1 = t.rows.back()[iy];
  const double h = (y1 - y0) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw ConfigError(path.string() + ": cell centers must increase");
  Grid1D g{y0 - h / 2.0, y1 + h / 2.0, n};
  TubesField f(g);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(t.rows[j][iy] - (y0 + static_cast<double>(j) * h)) > 1e-6 * h)
      throw ConfigError(path.string() + ": cell centers are not uniform");
    f.c1[j] = t.rows[j][i1];
    f.c2[j] = t.rows[j][i2];
  }
  return f;
}

void write_series_csv(const fs::path& path, const std::vector<SeriesPoint>& series) {
  std::string out = "t,h_width,front_left,front_right,plateau_c1,plateau_c2\n";
  for (const auto& p : series)
    out += join_row({p.t, p.h_width, p.front_left, p.front_right, p.plateau_c1, p.plateau_c2});
  write_text(path, out);
}

std::vector<SeriesPoint> read_series_csv(const fs::path& path) {
  const Table t =
      read_table(path, {"t", "h_width", "front_left", "front_right", "plateau_c1", "plateau_c2"});
  const auto it = column(t, "t"), ih = column(t, "h_width"), il = column(t, "front_left"),
             ir = column(t, "front_right"), p1 = column(t, "plateau_c1"), p2 = column(t, "plateau_c2");
  std::vector<SeriesPoint> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[it], r[ih], r[il], r[ir], r[p1], r[p2]});
  return out;
}

void write_profile_csv(const fs::path& path, const HeteroclinicSolution& sol) {
  const bool ipm = sol.model == Model::IPM;
  std::string out = ipm ? "xi,a,b,r,s,u1,q1\n" : "xi,a,b,r,s\n";
  for (const auto& p : sol.profile)
    out += ipm ? join_row({p.xi, p.a, p.b, p.r, p.s, p.u1, p.q1}) : join_row({p.xi, p.a, p.b, p.r, p.s});
  write_text(path, out);
}

void write_locus_csv(const fs::path& path, const HugoniotLocus& locus) {
  std::string out = "v,c1_star,c2_star,residual\n";
  for (const auto& s : locus.samples) out += join_row({s.v, s.state.c1, s.state.c2, s.residual});
  write_text(path, out);
}

json to_json(const SimulationConfig& c) {
  json j;
  for (const auto& [k, v] : to_raw(c)) j[k] = v;
  return j;
}

json to_json(const RunStats& s) {
  return {{"steps", s.steps}, {"dt_min", s.dt_min}, {"dt_max", s.dt_max}, {"kernels", s.kernels},
          {"scheme", s.scheme}};
}

json to_json(const WaveEndpoints& w) {
  return {{"left", pair_json(w.left)}, {"right", pair_json(w.right)}, {"v", w.v}, {"branch", to_string(w.branch)}};
}

json to_json(const HeteroclinicDiagnostics& d) {
  json j{{"min_q1", d.min_q1},
         {"max_q1", d.max_q1},
         {"min_r1", d.min_r1},
         {"max_r1", d.max_r1},
         {"slow_manifold_distance", d.slow_manifold_distance},
         {"boundary_distance", d.boundary_distance},
         {"newton_residual", d.newton_residual},
         {"newton_iterations", d.newton_iterations},
         {"intervals", d.intervals},
         {"half_length", d.half_length},
         {"branch_consistent", d.branch_consistent},
         {"flags", d.flags}};
  if (d.error_estimate >= 0.0) j["error_estimate"] = d.error_estimate;
  if (d.shooting_error >= 0.0) j["shooting_error"] = d.shooting_error;
  if (!d.ladder.empty()) j["l_ladder"] = d.ladder;
  return j;
}

json endpoints_json(const HeteroclinicSolution& sol) {
  json j{{"model", to_string(sol.model)},
         {"v", sol.v},
         {"l", sol.l},
         {"branch", to_string(sol.branch)},
         {"endpoints", to_json(sol.endpoints)},
         {"intermediate", pair_json(sol.intermediate())},
         {"diagnostics", to_json(sol.diagnostics)}};
  if (const auto rh = rankine_hugoniot_speed(sol.endpoints.left, sol.endpoints.right)) j["rankine_hugoniot_speed"] = *rh;
  return j;
}

json terrace_json(const Terrace& t) {
  const double sign = t.sigma1.c1 >= 0.0 ? 1.0 : -1.0;
  json waves = json::array();
  for (const auto& w : t.waves) waves.push_back(endpoints_json(w));
  return {{"model", to_string(t.model)},
          {"l", t.l},
          {"v1", t.v1},
          {"v2", t.v2},
          {"sigma0", pair_json(t.sigma0)},
          {"sigma1", pair_json(t.sigma1)},
          {"sigma2", pair_json(t.sigma2)},
          {"theory", {{"v1", -0.25}, {"v2", 0.25}, {"sigma1", json::array({0.5 * sign, -0.5 * sign})}}},
          {"deltas",
           {{"v1", t.v1 + 0.25}, {"v2", t.v2 - 0.25}, {"sigma1", json::array({t.sigma1.c1 - 0.5 * sign, t.sigma1.c2 + 0.5 * sign})}}},
          {"solver_stats",
           {{"iterations", t.stats.iterations}, {"residual", t.stats.residual}, {"wave_solves", t.stats.wave_solves}}},
          {"waves", waves},
          {"caveat",
           t.model == Model::IPM
               ? "only connections with sign-definite pressure drop are computed; mixed-sign connections are not searched for"
               : "closed-form traveling waves"}};
}

json report_json(const TerraceReport& r, const SimulationConfig& config) {
  json plateaus = json::array();
  for (const auto& p : r.plateaus)
    plateaus.push_back({{"c1", p.c1}, {"c2", p.c2}, {"y_lo", p.y_lo}, {"y_hi", p.y_hi}});
  json j{{"model", to_string(config.params.model)},
         {"l", config.params.l},
         {"t_final", r.t_final},
         {"plateaus", plateaus},
         {"fronts", {{"left", r.fronts.left}, {"right", r.fronts.right}, {"h_width", r.fronts.right - r.fronts.left}}},
         {"terrace_found", r.terrace_found},
         {"notes", r.notes}};
  if (r.intermediate) j["sigma1"] = json::array({r.intermediate->c1, r.intermediate->c2});
  if (r.speeds) {
    auto fit = [](const LinearFit& f) {
      return json{{"slope", f.slope}, {"stderr", f.stderr_slope}, {"intercept", f.intercept}, {"samples", f.samples}};
    };
    j["v1"] = r.speeds->left.slope;
    j["v2"] = r.speeds->right.slope;
    j["fits"] = {{"front_left", fit(r.speeds->left)}, {"front_right", fit(r.speeds->right)}, {"h_width", fit(r.speeds->width)}};
  }
  json sig = json::array();
  for (const auto& [a, b] : r.theory.sigma1) sig.push_back(json::array({a, b}));
  j["theory"] = {{"v1", r.theory.v1}, {"v2", r.theory.v2}, {"sigma1", sig}, {"h_slope", r.theory.h_slope},
                 {"source", r.theory.source}};
  j["tolerances"] = {{"speed_rel", r.theory.speed_rel_tol}, {"plateau_abs", r.theory.plateau_abs_tol},
                     {"h_slope_rel", r.theory.h_slope_rel_tol}};
  j["deltas"] = {{"v1", r.delta_v1}, {"v2", r.delta_v2}, {"sigma1", r.delta_sigma1}, {"h_slope", r.delta_h_slope}};
  j["pass"] = {{"speeds", r.speeds_pass}, {"plateau", r.plateau_pass}, {"h_slope", r.h_slope_pass}, {"all", r.pass()}};
  return j;
}

json run_json(const Trajectory& traj, const std::vector<double>& times, const std::vector<std::string>& snapshot_files) {
  return {{"config", to_json(traj.config)},
          {"stats", to_json(traj.stats)},
          {"snapshot_times", times},
          {"snapshots", snapshot_files},
          {"series", "series.csv"},
          {"boundary", "Dirichlet far field (-1,-1) below, (1,1) above; q = 0 at both ends"}};
}

json metadata_json(const std::vector<std::string>& argv, const RawConfig& config,
                   const std::vector<std::string>& outputs) {
  json cfg;
  for (const auto& [k, v] : config) cfg[k] = v;
  const auto now = std::chrono::system_clock::now();
  return {{"argv", argv},
          {"config", cfg},
          {"outputs", outputs},
          {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)))}};
}

}  // namespace tubes::io
