// One line per primary acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tubes/analyzer.hpp"
#include "tubes/heteroclinic.hpp"
#include "tubes/ode.hpp"
#include "tubes/pde.hpp"
#include "tubes/tw.hpp"
#include "manufactured.hpp"

using namespace tubes;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back((ok ? "" : "FAILED ") + what);
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, fmt::format("exception: {}", e.what()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::string joined;
  for (const auto& d : out.details) joined += (joined.empty() ? "" : "; ") + d;
  fmt::print("[{}] {} ({:.1f}s): {}\n", out.pass ? "PASS" : "FAIL", name, secs, joined);
  std::fflush(stdout);
}

double dist(ConcentrationPair x, ConcentrationPair y) { return std::max(std::abs(x.c1 - y.c1), std::abs(x.c2 - y.c2)); }

ode::Rhs tfe_rhs(double v) {
  return [v](const ode::State& x, ode::State& dx, double) {
    const auto d = tfe_tw_rhs(v, {x[0], x[1], x[2], x[3]});
    dx.assign(d.begin(), d.end());
  };
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

// Reference run of the lab: tanh step with an antisymmetric bump.
SimulationConfig lab_config(Model model, double l) {
  SimulationConfig c;
  c.params = {model, l};
  c.grid = {-300.0, 300.0, 6000};
  c.initial.profile = Profile::TanhStep;
  c.initial.tanh_width = 2.0;
  c.initial.perturbation = {0.2, 5.0, 1};
  c.run.t_max = 400.0;
  c.run.output_every = 10.0;
  return c;
}

struct LabRun {
  TerraceReport report;
  double lo = 0.0, hi = 0.0;            // extremes over all snapshots
  double bound_lo = 0.0, bound_hi = 0.0;  // allowed by the initial data
};

LabRun run_lab(const SimulationConfig& c, const TheoryRef& theory) {
  LabRun out;
  const auto init = make_initial_data(c.grid, c.initial);
  out.bound_lo = std::min({-1.0, *std::min_element(init.c1.begin(), init.c1.end()),
                           *std::min_element(init.c2.begin(), init.c2.end())});
  out.bound_hi = std::max({1.0, *std::max_element(init.c1.begin(), init.c1.end()),
                           *std::max_element(init.c2.begin(), init.c2.end())});
  out.lo = out.bound_lo;
  out.hi = out.bound_hi;
  Snapshot last;
  auto traj = simulate_from(c, init, [&](const Snapshot& s) {
    for (const auto* v : {&s.field.c1, &s.field.c2}) {
      out.lo = std::min(out.lo, *std::min_element(v->begin(), v->end()));
      out.hi = std::max(out.hi, *std::max_element(v->begin(), v->end()));
    }
    last = s;
  });
  out.report = terrace_report(traj.series, last.field, last.t, theory);
  return out;
}

}  // namespace

int main() {
  criterion("TFE exact terrace", [](Outcome& o) {
    for (auto choice : {TerraceChoice::PlusMinus, TerraceChoice::MinusPlus}) {
      const auto T = find_terrace(Model::TFE, 0.0, choice);
      const double e = std::max(std::abs(T.v1 + 0.25), std::abs(T.v2 - 0.25));
      const double es = std::min(dist(T.sigma1, {0.5, -0.5}), dist(T.sigma1, {-0.5, 0.5}));
      o.require(e <= 1e-10 && es <= 1e-10,
                fmt::format("{}: v1={} v2={} sigma1=({}, {})", to_string(choice), T.v1, T.v2, T.sigma1.c1, T.sigma1.c2));
    }
  });

  criterion("TFE heteroclinic endpoints", [](Outcome& o) {
    double worst_closed = 0.0, worst_shoot = 0.0;
    for (double v : {-0.4, -0.25, -0.1, 0.1, 0.25, 0.4}) {
      for (Branch br : {Branch::RNegative, Branch::RPositive}) {
        const double pm = v < 0.0 ? -1.0 : 1.0;
        ConcentrationPair expected{-2.0 * v + pm, -6.0 * v + pm};
        if (br == Branch::RPositive) std::swap(expected.c1, expected.c2);
        const auto sol = find_tfe_heteroclinic(v, br);
        worst_closed = std::max(worst_closed, dist(sol.intermediate(), expected));
        const auto far = v < 0.0 ? sol.endpoints.left : sol.endpoints.right;
        worst_closed = std::max(worst_closed, dist(far, {pm, pm}));
        worst_shoot = std::max(worst_shoot, sol.diagnostics.shooting_error);
      }
    }
    o.require(worst_closed <= 1e-8, fmt::format("closed form max error {:.2e}", worst_closed));
    o.require(worst_shoot <= 1e-4, fmt::format("shooting max error {:.2e}", worst_shoot));
  });

  criterion("Conserved quantities", [](Outcome& o) {
    // The manifolds are only transversally stable where a < v (I1) or a > -v (I4), so
    // negative speeds are integrated backwards.
    struct Case {
      Manifold m;
      double v, a0, r0, kappa, span;
    };
    for (const auto& c : {Case{Manifold::I1, 0.25, 0.1, 0.01, 2.0, 100.0}, Case{Manifold::I1, -0.25, 0.1, 0.01, 2.0, -100.0},
                          Case{Manifold::I4, 0.4, -0.2, -0.02, -2.0, 100.0},
                          Case{Manifold::I4, -0.25, -0.1, -0.01, -2.0, -100.0}}) {
      const auto samples = ode::integrate_sampled(tfe_rhs(c.v), {c.a0, 0.0, c.r0, c.kappa * c.r0}, 0.0, c.span, 201);
      const double I0 = conserved_quantity(c.m, c.v, c.a0, c.r0, c.kappa * c.r0);
      double drift = 0.0;
      for (const auto& s : samples) drift = std::max(drift, std::abs(conserved_quantity(c.m, c.v, s.x[0], s.x[2], s.x[3]) - I0));
      o.require(drift < 1e-8, fmt::format("{} v={} drift {:.1e}", to_string(c.m), c.v, drift));
    }
    // Exact orbit a = 2/(xi + 10) on s = -a^2/2 at v = 0.
    const double c0 = 10.0;
    const auto samples = ode::integrate_sampled(tfe_rhs(0.0), {2.0 / c0, 0.0, -2.0 / (c0 * c0), -2.0 / (c0 * c0)},
                                                0.0, 100.0, 201);
    double drift = 0.0;
    for (const auto& s : samples) drift = std::max(drift, std::abs(conserved_quantity(Manifold::V0, 0.0, s.x[0], s.x[2], s.x[3])));
    o.require(drift < 1e-8, fmt::format("V0 drift {:.1e} (a(100)={:.10f}, exact {:.10f})", drift,
                                        samples.back().x[0], 2.0 / (c0 + 100.0)));
  });

  criterion("Eigenstructure", [](Outcome& o) {
    double worst = 0.0;
    for (double v : {-0.4, -0.25, -0.1, 0.1, 0.25, 0.4}) {
      for (Branch br : {Branch::RNegative, Branch::RPositive}) {
        const auto w = tfe_endpoints(v, br);
        const auto far = v < 0.0 ? w.left : w.right;
        const auto mid = w.v < 0.0 ? w.right : w.left;
        auto check = [&](ConcentrationPair p, std::vector<double> expected) {
          const auto sys = fixed_point_eigensystem(Model::TFE, v, 0.0, {a_of(p), b_of(p), 0.0, 0.0}, br);
          std::vector<double> got;
          for (const auto& e : sys.pairs) {
            got.push_back(e.value.real());
            worst = std::max(worst, std::abs(e.value.imag()));
          }
          std::sort(got.begin(), got.end());
          std::sort(expected.begin(), expected.end());
          for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - expected[i]));
        };
        check(far, {-v, -v, 0.0, 0.0});
        check(mid, {v, -5.0 * v, 0.0, 0.0});
      }
    }
    o.require(worst <= 1e-8, fmt::format("TFE spectra max error {:.1e}", worst));
    for (double l : {0.2, 0.1, 0.05}) {
      const auto x = ipm_fixed_point(0.0, -2.0);
      const auto sys = fixed_point_eigensystem(Model::IPM, -0.25, l, {x.begin(), x.end()});
      const double fast = std::sqrt(2.0) / l;
      const double lo = sys.pairs.front().value.real(), hi = sys.pairs.back().value.real();
      const double rel = std::max(std::abs(lo + fast), std::abs(hi - fast)) / fast;
      o.require(rel <= 0.05, fmt::format("l={}: fast pair {:.4f}, {:.4f} vs ±{:.4f}", l, lo, hi, fast));
    }
  });

  criterion("IPM heteroclinic l->0 convergence", [](Outcome& o) {
    // r>0 branch carries the (-6v-1, -2v-1) state; r<0 its mirror. Sign checks use sigma*q1, sigma*r1.
    for (Branch br : {Branch::RPositive, Branch::RNegative}) {
      ConcentrationPair target{-6.0 * -0.25 - 1.0, -2.0 * -0.25 - 1.0};
      if (br == Branch::RNegative) std::swap(target.c1, target.c2);
      double prev = INFINITY;
      for (double l : {0.2, 0.1, 0.05}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = find_ipm_heteroclinic(-0.25, l, br);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double err = dist(sol.intermediate(), target);
        const double sg = branch_sign(br);
        const double min_sq = std::min(sg * sol.diagnostics.min_q1, sg * sol.diagnostics.max_q1);
        const double max_sr = std::max(sg * sol.diagnostics.min_r1, sg * sol.diagnostics.max_r1);
        o.require(err < prev && min_sq >= -1e-8 && max_sr <= 1e-8 && secs < 60.0,
                  fmt::format("{} l={}: c*=({:.9f}, {:.9f}) err {:.2e}, min sigma*q1 {:.1e}, max sigma*r1 {:.1e}",
                              to_string(br), l, sol.intermediate().c1, sol.intermediate().c2, err, min_sq, max_sr));
        prev = err;
      }
    }
  });

  criterion("IPM terrace", [](Outcome& o) {
    double prev = INFINITY;
    for (double l : {0.2, 0.1, 0.05}) {
      const auto T = find_terrace(Model::IPM, l);
      const double err = std::max(std::abs(T.v1 + 0.25), std::abs(T.v2 - 0.25));
      const double sym = std::abs(T.v1 + T.v2);
      o.require(err < prev && sym <= 1e-6,
                fmt::format("l={}: v1={:.9f} v2={:.9f} |v1+v2|={:.1e}", l, T.v1, T.v2, sym));
      prev = err;
    }
  });

  criterion("RH consistency suite", [](Outcome& o) {
    o.require(rankine_hugoniot_speed({-1.0, 1.0}, {1.0, 1.0}).value() == 1.0, "(-1,1)->(1,1) gives 1");
    o.require(std::abs(rankine_hugoniot_speed({-1.0, -1.0}, {0.5, -0.5}).value() + 0.25) < 1e-15,
              "(-1,-1)->(1/2,-1/2) gives -1/4");
    double worst = 0.0;
    std::size_t waves = 0, gaps = 0;
    auto check_locus = [&](const HugoniotLocus& L) {
      for (const auto& s : L.samples) {
        if (!s.ok) {
          ++gaps;
          continue;
        }
        const ConcentrationPair far = L.side == Side::FromLower ? ConcentrationPair{-1.0, -1.0} : ConcentrationPair{1.0, 1.0};
        const auto rh = L.side == Side::FromLower ? rankine_hugoniot_speed(far, s.state) : rankine_hugoniot_speed(s.state, far);
        worst = std::max(worst, rh ? std::abs(*rh - s.v) : INFINITY);
        ++waves;
      }
    };
    for (Branch br : {Branch::RNegative, Branch::RPositive}) {
      check_locus(hugoniot_locus(Model::TFE, 0.0, Side::FromLower, br, linspace(-0.45, -0.05, 41)));
      check_locus(hugoniot_locus(Model::TFE, 0.0, Side::ToUpper, br, linspace(0.05, 0.45, 41)));
      check_locus(hugoniot_locus(Model::IPM, 0.1, Side::FromLower, br, linspace(-0.45, -0.05, 9)));
      check_locus(hugoniot_locus(Model::IPM, 0.1, Side::ToUpper, br, linspace(0.05, 0.45, 9)));
    }
    for (double l : {0.2, 0.1}) {
      for (const auto& w : find_terrace(Model::IPM, l).waves) {
        worst = std::max(worst, std::abs(rankine_hugoniot_speed(w.endpoints.left, w.endpoints.right).value() - w.v));
        ++waves;
      }
    }
    o.require(worst <= 1e-6 && gaps == 0, fmt::format("{} waves, {} gaps, max |RH - v| {:.1e}", waves, gaps, worst));
  });

  criterion("PDE reproduction of the TFE terrace", [](Outcome& o) {
    const auto run = run_lab(lab_config(Model::TFE, 0.1), TheoryRef{});
    const auto& r = run.report;
    o.require(r.terrace_found, "intermediate plateau found");
    if (r.speeds)
      o.require(r.speeds_pass, fmt::format("speeds {:.5f}, {:.5f} (2% of -/+0.25)", r.speeds->left.slope, r.speeds->right.slope));
    if (r.intermediate)
      o.require(r.plateau_pass, fmt::format("plateau ({:.5f}, {:.5f}) delta {:.1e}", r.intermediate->c1,
                                            r.intermediate->c2, r.delta_sigma1));
    if (r.speeds)
      o.require(r.h_slope_pass, fmt::format("h slope {:.5f} (5% of 0.5)", r.speeds->width.slope));
    o.require(run.lo >= run.bound_lo && run.hi <= run.bound_hi + 1e-8,
              fmt::format("maximum principle: c in [{:.12f}, {:.12f}]", run.lo, run.hi));
  });

  criterion("Cross-model PDE check", [](Outcome& o) {
    const double l = 0.1;
    TheoryRef theory;
    const auto P = find_terrace(Model::IPM, l, TerraceChoice::PlusMinus);
    const auto M = find_terrace(Model::IPM, l, TerraceChoice::MinusPlus);
    theory.v1 = P.v1;
    theory.v2 = P.v2;
    theory.sigma1 = {{P.sigma1.c1, P.sigma1.c2}, {M.sigma1.c1, M.sigma1.c2}};
    theory.plateau_abs_tol = 0.05;
    theory.source = "heteroclinic finder";
    const auto run = run_lab(lab_config(Model::IPM, l), theory);
    const auto& r = run.report;
    o.require(r.terrace_found && r.plateau_pass,
              r.intermediate ? fmt::format("plateau ({:.5f}, {:.5f}) vs finder ({:.6f}, {:.6f}): delta {:.1e}",
                                           r.intermediate->c1, r.intermediate->c2, P.sigma1.c1, P.sigma1.c2,
                                           r.delta_sigma1)
                             : std::string("no intermediate plateau"));
    o.require(run.lo >= run.bound_lo && run.hi <= run.bound_hi + 1e-8,
              fmt::format("maximum principle: c in [{:.12f}, {:.12f}]", run.lo, run.hi));
  });

  criterion("Solver properties", [](Outcome& o) {
    // Tube exchange and u1 + u2 = 0 on short runs of both models.
    for (Model m : {Model::TFE, Model::IPM}) {
      SimulationConfig c;
      c.params = {m, 0.1};
      c.grid = {-50.0, 50.0, 500};
      c.initial.perturbation = {0.2, 5.0, 1};
      c.run.t_max = 5.0;
      c.run.output_every = 5.0;
      const auto init = make_initial_data(c.grid, c.initial);
      const auto a = simulate_from(c, init).snapshots.back();
      const auto b = simulate_from(c, init.swapped()).snapshots.back();
      o.require(a.field.c1 == b.field.c2 && a.field.c2 == b.field.c1, to_string(m) + " exchange equivariance");
      double sum = 0.0;
      for (std::size_t j = 0; j < a.flow.u1.size(); ++j) sum = std::max(sum, std::abs(a.flow.u1[j] + a.flow.u2[j]));
      o.require(sum == 0.0, fmt::format("{} max |u1+u2| = {}", to_string(m), sum));
      if (m == Model::IPM) {
        const double res = ipm_residual(a.field, a.flow, 0.1);
        o.require(res < 1e-10, fmt::format("pressure residual {:.1e}", res));
      }
    }
    const auto sol = find_ipm_heteroclinic(-0.25, 0.1, Branch::RNegative);
    o.require(sol.diagnostics.newton_residual < 1e-10,
              fmt::format("BVP residual {:.1e}", sol.diagnostics.newton_residual));

    const double m1 = testing::manufactured_residual(200), m2 = testing::manufactured_residual(400),
                 m3 = testing::manufactured_residual(800);
    o.require(std::log2(m1 / m2) >= 0.9 && std::log2(m2 / m3) >= 0.9,
              fmt::format("manufactured residuals {:.2e}, {:.2e}, {:.2e}: order {:.2f}", m1, m2, m3, std::log2(m2 / m3)));

    // The closed-form TFE wave is an exact solution of the PDE; measure the scheme against it.
    const double v = -0.25, t_end = 20.0;
    std::vector<double> errors;
    for (std::size_t n : {1000u, 2000u, 4000u}) {
      SimulationConfig c;
      c.grid = {-100.0, 100.0, n};
      c.run.t_max = t_end;
      c.run.output_every = t_end;
      TubesField f(c.grid);
      auto exact = [&](double y, double t) {
        const auto x = tfe_explicit_profile(v, Branch::RNegative, y - v * t);
        return from_ab(x[0], x[1]);
      };
      for (std::size_t j = 0; j < n; ++j) {
        const auto p = exact(c.grid.center(j), 0.0);
        f.c1[j] = p.c1;
        f.c2[j] = p.c2;
      }
      const auto end = simulate_from(c, f).snapshots.back().field;
      double err = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double y = c.grid.center(j);
        if (std::abs(y) > 40.0) continue;  // away from the top boundary layer
        const auto p = exact(y, t_end);
        err = std::max({err, std::abs(end.c1[j] - p.c1), std::abs(end.c2[j] - p.c2)});
      }
      errors.push_back(err);
    }
    const double order = std::log2(errors[1] / errors[2]);
    o.require(order >= 0.9, fmt::format("exact-wave errors {:.2e}, {:.2e}, {:.2e}: order {:.2f}", errors[0], errors[1],
                                        errors[2], order));
  });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
