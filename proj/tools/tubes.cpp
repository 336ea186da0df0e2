// tubes: command-line front end.
//
// Exit status: 0 success, 1 invalid input, 2 solver or analysis failure.
// Failures print a JSON payload on stderr.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tubes/analyzer.hpp"
#include "tubes/heteroclinic.hpp"
#include "tubes/io.hpp"
#include "tubes/kernels.hpp"
#include "tubes/pde.hpp"
#include "tubes/tw.hpp"

namespace {

using namespace tubes;
namespace fs = std::filesystem;
using io::json;

// Shortest round-trip form, always with a decimal point or exponent.
std::string number(double x) {
  std::string s = fmt::format("{}", x);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

std::string pair_text(ConcentrationPair c) { return fmt::format("[{},{}]", number(c.c1), number(c.c2)); }

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::string model;
  std::optional<double> l;
};

void add_common(CLI::App* cmd, Common& c, bool with_model) {
  cmd->add_option("--config", c.config, "flat key = value configuration file");
  cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("--set", c.sets, "configuration override key=value (repeatable)");
  if (with_model) {
    cmd->add_option("--model", c.model, "tfe or ipm");
    cmd->add_option("--l", c.l, "tube spacing");
  }
}

// Precedence, lowest first: defaults, TUBES_OUTPUT_DIR, config file, --set, dedicated flags.
RawConfig gather(const Common& c) {
  RawConfig raw;
  if (const char* env = std::getenv("TUBES_OUTPUT_DIR"); env && *env) raw["output_dir"] = env;
  if (!c.config.empty())
    for (auto& [k, v] : read_config_file(c.config)) raw[k] = v;
  std::vector<std::string> errs;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      errs.push_back(fmt::format("--set expects key=value, got '{}'", kv));
      continue;
    }
    auto key = kv.substr(0, eq);
    auto val = kv.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    raw[key] = val;
  }
  if (!errs.empty()) throw ConfigError(errs);
  if (!c.model.empty()) raw["model"] = c.model;
  if (c.l) raw["l"] = fmt::format("{:.17g}", *c.l);
  if (!c.out.empty()) raw["output_dir"] = c.out;
  return raw;
}

struct Context {
  RawConfig raw;
  SimulationConfig config;
  fs::path out;
};

Context prepare(const Common& c) {
  Context ctx;
  ctx.raw = gather(c);
  ctx.config = validate_config(ctx.raw);
  ctx.out = ctx.config.run.output_dir;
  return ctx;
}

void write_metadata(const Context& ctx, const std::vector<std::string>& argv, const std::string& command,
                    const std::vector<std::string>& outputs) {
  io::write_json(ctx.out / fmt::format("metadata_{}.json", command), io::metadata_json(argv, to_raw(ctx.config), outputs));
}

ConcentrationPair parse_pair(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t p1 = 0, p2 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double c1 = std::stod(a, &p1), c2 = std::stod(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(text);
    return {c1, c2};
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{} expects c1,c2, got '{}'", flag, text));
  }
}

std::string branch_tag(Branch b) { return b == Branch::RNegative ? "rneg" : "rpos"; }

// ---- subcommands ---------------------------------------------------------

int run_simulate(const Common& c, const std::vector<std::string>& argv) {
  const Context ctx = prepare(c);
  fs::create_directories(ctx.out);
  std::vector<std::string> files;
  std::vector<double> times;
  auto sink = [&](const Snapshot& s) {
    const auto name = io::snapshot_filename(s.t);
    io::write_snapshot_csv(ctx.out / name, s);
    files.push_back(name);
    times.push_back(s.t);
  };
  Trajectory traj;
  try {
    traj = simulate(ctx.config, sink);
  } catch (const SimulationAborted& e) {
    io::write_snapshot_csv(ctx.out / "abort_snapshot.csv", e.last());
    throw;
  }
  io::write_series_csv(ctx.out / "series.csv", traj.series);
  io::write_json(ctx.out / "run.json", io::run_json(traj, times, files));
  std::vector<std::string> outputs = files;
  outputs.insert(outputs.end(), {"series.csv", "run.json"});
  write_metadata(ctx, argv, "simulate", outputs);
  const auto& last = traj.series.back();
  fmt::print("simulate model={} t={} steps={} kernels={} front_left={} front_right={} out={}\n",
             to_string(ctx.config.params.model), number(last.t), traj.stats.steps, traj.stats.kernels,
             number(last.front_left), number(last.front_right), ctx.out.string());
  return 0;
}

struct TwArgs {
  double v = 0.0;
  std::string branch = "r<0";
  double half_length = 0.0;
  std::size_t samples = 801;
  double h = 0.1;
};

int run_tw(const Common& c, const TwArgs& a, const std::vector<std::string>& argv) {
  const Context ctx = prepare(c);
  const Branch br = parse_branch(a.branch);
  HeteroclinicSolution sol;
  if (ctx.config.params.model == Model::TFE) {
    if (a.v == 0.0) throw SolverError("no traveling wave at v=0: the v=0 orbit is homoclinic, not heteroclinic");
    sol = find_tfe_heteroclinic(a.v, br, {.half_length = a.half_length, .samples = a.samples});
  } else {
    if (a.v == 0.0) throw SolverError("no traveling wave at v=0: the v=0 orbit is homoclinic, not heteroclinic");
    sol = find_ipm_heteroclinic(a.v, ctx.config.params.l, br, std::nullopt,
                                {.half_length = a.half_length, .h_target = a.h});
  }
  io::write_profile_csv(ctx.out / "tw_profile.csv", sol);
  io::write_json(ctx.out / "tw_endpoints.json", io::endpoints_json(sol));
  write_metadata(ctx, argv, "tw", {"tw_profile.csv", "tw_endpoints.json"});
  fmt::print("tw model={} v={} branch={} left={} right={}\n", to_string(sol.model), number(a.v), to_string(br),
             pair_text(sol.endpoints.left), pair_text(sol.endpoints.right));
  return 0;
}

struct HugoniotArgs {
  std::string side = "both";
  double v_min = 0.05;
  double v_max = 0.45;
  std::size_t n = 41;
  double h = 0.1;
};

int run_hugoniot(const Common& c, const HugoniotArgs& a, const std::vector<std::string>& argv) {
  const Context ctx = prepare(c);
  if (!(a.v_min > 0.0 && a.v_max > a.v_min)) throw ConfigError("need 0 < v-min < v-max (speed magnitudes)");
  if (a.n < 2) throw ConfigError("--n must be at least 2");
  std::vector<Side> sides;
  if (a.side == "both" || a.side == "from_lower") sides.push_back(Side::FromLower);
  if (a.side == "both" || a.side == "to_upper") sides.push_back(Side::ToUpper);
  if (sides.empty()) throw ConfigError(fmt::format("unknown side '{}' (from_lower, to_upper or both)", a.side));

  std::vector<double> mags(a.n);
  for (std::size_t i = 0; i < a.n; ++i)
    mags[i] = a.v_min + (a.v_max - a.v_min) * static_cast<double>(i) / static_cast<double>(a.n - 1);

  std::vector<HugoniotLocus> loci;
  std::vector<std::string> outputs;
  BvpOptions bvp;
  bvp.h_target = a.h;
  for (Side side : sides) {
    std::vector<double> vs = mags;
    if (side == Side::FromLower) {
      // Continuation runs outward from the slow end.
      for (double& v : vs) v = -v;
    }
    for (Branch br : {Branch::RNegative, Branch::RPositive}) {
      loci.push_back(hugoniot_locus(ctx.config.params.model, ctx.config.params.l, side, br, vs, bvp));
      const auto name = fmt::format("locus_{}_{}.csv", to_string(side), branch_tag(br));
      io::write_locus_csv(ctx.out / name, loci.back());
      outputs.push_back(name);
      std::size_t gaps = 0;
      for (const auto& s : loci.back().samples) gaps += s.ok ? 0 : 1;
      fmt::print("locus side={} branch={} samples={} gaps={} file={}\n", to_string(side), to_string(br),
                 loci.back().samples.size(), gaps, name);
    }
  }
  for (const auto& lo : loci) {
    if (lo.side != Side::FromLower) continue;
    for (const auto& up : loci) {
      if (up.side != Side::ToUpper) continue;
      for (const auto& x : intersect_loci(lo, up))
        fmt::print("crossing state={} v1={} v2={}\n", pair_text(x.state), number(x.v_first), number(x.v_second));
    }
  }
  write_metadata(ctx, argv, "hugoniot", outputs);
  return 0;
}

int run_terrace(const Common& c, const std::string& choice, const std::vector<std::string>& argv) {
  const Context ctx = prepare(c);
  const auto T = find_terrace(ctx.config.params.model, ctx.config.params.l, parse_terrace_choice(choice));
  io::write_json(ctx.out / "terrace.json", io::terrace_json(T));
  write_metadata(ctx, argv, "terrace", {"terrace.json"});
  fmt::print("v1={} v2={} sigma1={}\n", number(T.v1), number(T.v2), pair_text(T.sigma1));
  return 0;
}

int run_rh(const std::string& left, const std::string& right) {
  const auto v = rankine_hugoniot_speed(parse_pair(left, "--left"), parse_pair(right, "--right"));
  fmt::print("{}\n", v ? number(*v) : std::string("undefined"));
  return 0;
}

int run_analyze(const Common& c, const std::string& run_dir, const std::vector<std::string>& argv) {
  Context ctx = prepare(c);
  const fs::path dir = run_dir.empty() ? ctx.out : fs::path(run_dir);
  const json run = io::read_json(dir / "run.json");
  RawConfig raw;
  for (const auto& [k, v] : run.at("config").items()) raw[k] = v.get<std::string>();
  const SimulationConfig sim = validate_config(raw);

  std::optional<std::pair<double, fs::path>> last;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto t = io::snapshot_time(entry.path().filename().string());
    if (t && (!last || *t > last->first)) last = {*t, entry.path()};
  }
  if (!last) throw AnalysisError("no snapshot files in " + dir.string());
  const TubesField field = io::read_snapshot_csv(last->second);
  const auto series = io::read_series_csv(dir / "series.csv");

  TheoryRef theory;
  if (sim.params.model == Model::IPM) {
    const auto T = find_terrace(Model::IPM, sim.params.l);
    theory.v1 = T.v1;
    theory.v2 = T.v2;
    theory.sigma1 = {{T.sigma1.c1, T.sigma1.c2}, {T.sigma1.c2, T.sigma1.c1}};
    theory.h_slope = T.v2 - T.v1;
    theory.plateau_abs_tol = 0.05;
    theory.source = fmt::format("collocation terrace at l={}", sim.params.l);
  }
  const auto rep = terrace_report(series, field, last->first, theory);
  const fs::path out = c.out.empty() ? dir : ctx.out;
  io::write_json(out / "report.json", io::report_json(rep, sim));
  ctx.out = out;
  ctx.config = sim;
  write_metadata(ctx, argv, "analyze", {"report.json"});
  fmt::print("analyze t={} v1={} v2={} h_slope={} sigma1={} terrace={} pass={}\n", number(rep.t_final),
             number(rep.speeds->left.slope), number(rep.speeds->right.slope), number(rep.speeds->width.slope),
             rep.intermediate ? pair_text({rep.intermediate->c1, rep.intermediate->c2}) : std::string("none"),
             rep.terrace_found, rep.pass());
  return 0;
}

int fail(const std::string& kind, const std::string& message, int code, const std::vector<std::string>& violations = {},
         double best_residual = -1.0) {
  json j{{"status", "error"}, {"kind", kind}, {"message", message}, {"exit_code", code}};
  if (!violations.empty()) j["violations"] = violations;
  if (best_residual >= 0.0) j["best_residual"] = best_residual;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Two-tubes gravitational fingering laboratory"};
  app.require_subcommand(1);

  Common sim_c, tw_c, hug_c, ter_c, an_c;
  auto* sim = app.add_subcommand("simulate", "integrate the two-tubes PDE");
  add_common(sim, sim_c, true);

  TwArgs tw_a;
  auto* tw = app.add_subcommand("tw", "traveling wave for one speed and branch");
  add_common(tw, tw_c, true);
  tw->add_option("--v", tw_a.v, "wave speed")->required();
  tw->add_option("--branch", tw_a.branch, "sign branch: r<0 or r>0");
  tw->add_option("--half-length", tw_a.half_length, "xi half-width of the profile (default 25/|v|)");
  tw->add_option("--samples", tw_a.samples, "TFE profile samples");
  tw->add_option("--mesh-h", tw_a.h, "IPM collocation mesh width");

  HugoniotArgs hug_a;
  auto* hug = app.add_subcommand("hugoniot", "Hugoniot loci of intermediate states");
  add_common(hug, hug_c, true);
  hug->add_option("--side", hug_a.side, "from_lower, to_upper or both");
  hug->add_option("--v-min", hug_a.v_min, "smallest speed magnitude");
  hug->add_option("--v-max", hug_a.v_max, "largest speed magnitude");
  hug->add_option("--n", hug_a.n, "samples per locus");
  hug->add_option("--mesh-h", hug_a.h, "IPM collocation mesh width");

  std::string choice = "plus-minus";
  auto* ter = app.add_subcommand("terrace", "two-wave propagating terrace");
  add_common(ter, ter_c, true);
  ter->add_option("--terrace", choice, "plus-minus or minus-plus");

  std::string left, right;
  auto* rh = app.add_subcommand("rh", "Rankine-Hugoniot speed between two states");
  rh->add_option("--left", left, "c1,c2")->required()->allow_extra_args(false);
  rh->add_option("--right", right, "c1,c2")->required()->allow_extra_args(false);

  std::string run_dir;
  auto* an = app.add_subcommand("analyze", "terrace report from a simulate output directory");
  add_common(an, an_c, false);
  an->add_option("--run", run_dir, "run directory (default: output directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 1);
  }

  try {
    if (*sim) return run_simulate(sim_c, args);
    if (*tw) return run_tw(tw_c, tw_a, args);
    if (*hug) return run_hugoniot(hug_c, hug_a, args);
    if (*ter) return run_terrace(ter_c, choice, args);
    if (*rh) return run_rh(left, right);
    if (*an) return run_analyze(an_c, run_dir, args);
  } catch (const ConfigError& e) {
    return fail("validation", e.what(), 1, e.violations());
  } catch (const SolverError& e) {
    return fail("solver", e.what(), 2, {}, e.best_residual());
  } catch (const AnalysisError& e) {
    return fail("analysis", e.what(), 2);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
  return 1;
}
