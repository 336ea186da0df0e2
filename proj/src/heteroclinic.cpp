#include "tubes/heteroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "collocation.hpp"
#include "tubes/ode.hpp"

namespace tubes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double default_half_length(double v) { return 25.0 / std::abs(v); }

ConcentrationPair far_state(double v) { return v > 0.0 ? ConcentrationPair{1.0, 1.0} : ConcentrationPair{-1.0, -1.0}; }

double pair_distance(ConcentrationPair x, ConcentrationPair y) {
  return std::max(std::abs(x.c1 - y.c1), std::abs(x.c2 - y.c2));
}

void fill_sign_diagnostics(HeteroclinicSolution& sol, double sign_tol) {
  auto& d = sol.diagnostics;
  d.min_q1 = d.min_r1 = std::numeric_limits<double>::infinity();
  d.max_q1 = d.max_r1 = -std::numeric_limits<double>::infinity();
  d.slow_manifold_distance = 0.0;
  const double sg = branch_sign(sol.branch);
  double worst_q = std::numeric_limits<double>::infinity();
  double worst_r = -std::numeric_limits<double>::infinity();
  for (const auto& p : sol.profile) {
    d.min_q1 = std::min(d.min_q1, p.q1);
    d.max_q1 = std::max(d.max_q1, p.q1);
    d.min_r1 = std::min(d.min_r1, p.r1);
    d.max_r1 = std::max(d.max_r1, p.r1);
    d.slow_manifold_distance = std::max(d.slow_manifold_distance, std::abs(p.u1 + p.a / 2.0));
    worst_q = std::min(worst_q, sg * p.q1);
    worst_r = std::max(worst_r, sg * p.r1);
  }
  d.branch_consistent = worst_q >= -sign_tol && worst_r <= sign_tol;
  if (!d.branch_consistent)
    d.flags.push_back(fmt::format("sign violation on branch {}: min sigma*q1 = {:.3g}, max sigma*r1 = {:.3g}",
                                  to_string(sol.branch), worst_q, worst_r));
}

void check_rh(HeteroclinicSolution& sol) {
  const auto rh = rankine_hugoniot_speed(sol.endpoints.left, sol.endpoints.right);
  if (!rh || std::abs(*rh - sol.v) > 1e-6)
    sol.diagnostics.flags.push_back(
        fmt::format("Rankine-Hugoniot mismatch: speed {} vs {}", sol.v, rh ? fmt::format("{}", *rh) : "undefined"));
}

// ---- IPM helpers ---------------------------------------------------------

CoreVector tfe_lift(double v, double l, Branch branch, double xi) {
  const auto x = tfe_explicit_profile(v, branch, xi);
  CoreVector c;
  c << x[0], x[2], x[3], -x[0] / 2.0, -l * x[2] / 2.0;
  return c;
}

CoreVector core_of(const ProfilePoint& p) {
  CoreVector c;
  c << p.a, p.r1, p.s1, p.u1, p.q1;
  return c;
}

CoreVector interpolate_core(const std::vector<ProfilePoint>& prof, double xi) {
  if (xi <= prof.front().xi) return core_of(prof.front());
  if (xi >= prof.back().xi) return core_of(prof.back());
  const auto it = std::upper_bound(prof.begin(), prof.end(), xi,
                                   [](double x, const ProfilePoint& p) { return x < p.xi; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (xi - lo.xi) / (hi.xi - lo.xi);
  return (1.0 - t) * core_of(lo) + t * core_of(hi);
}

double tfe_a0(double v, Branch branch) { return branch == Branch::RNegative ? 4.0 * v : -4.0 * v; }

// Guess = TFE lift at (v, l) plus the seed's deviation from its own TFE lift,
// with xi scaled so that v*xi matches.
detail::ConnectionGuess make_guess(double v, double l, Branch branch, const std::vector<double>& xi,
                                   const std::optional<HeteroclinicSolution>& seed) {
  detail::ConnectionGuess g;
  g.x.reserve(xi.size());
  const bool use_seed = seed && seed->model == Model::IPM && seed->branch == branch && !seed->profile.empty() &&
                        (seed->v > 0.0) == (v > 0.0);
  for (double x : xi) {
    CoreVector c = tfe_lift(v, l, branch, x);
    if (use_seed) {
      const double xs = x * v / seed->v;
      c += interpolate_core(seed->profile, xs) - tfe_lift(seed->v, seed->l, branch, xs);
    }
    g.x.push_back(c);
  }
  g.a0 = tfe_a0(v, branch);
  if (use_seed) g.a0 += a_of(seed->intermediate()) - tfe_a0(seed->v, branch);
  return g;
}

std::vector<double> ladder(double from, double to, double factor) {
  std::vector<double> out;
  if (from <= 0.0 || std::abs(std::log(to / from)) < 1e-12) return {to};
  const double ratio = std::log(to / from);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(ratio) / std::log(factor))));
  for (int k = 0; k <= steps; ++k) out.push_back(from * std::exp(ratio * k / steps));
  out.back() = to;
  return out;
}

HeteroclinicSolution assemble(const detail::ConnectionResult& res, double v, double l, Branch branch) {
  HeteroclinicSolution sol;
  sol.model = Model::IPM;
  sol.v = v;
  sol.l = l;
  sol.branch = branch;
  const double sg = branch_sign(branch);
  const std::size_t n = res.x.size();
  sol.profile.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CoreVector& c = res.x[i];
    const double a = c(0), u = c(3);
    const double w = u * a + a * a / 2.0;
    auto& p = sol.profile[i];
    p.xi = res.xi[i];
    p.a = a;
    p.r1 = c(1);
    p.s1 = c(2);
    p.u1 = u;
    p.q1 = c(4);
    p.r = p.r1 + sg * w;
    p.s = p.s1 + w;
  }
  // b by trapezoid quadrature from the far-field end.
  if (v < 0.0) {
    sol.profile.front().b = -2.0;
    for (std::size_t i = 1; i < n; ++i)
      sol.profile[i].b = sol.profile[i - 1].b +
                         0.5 * (res.xi[i] - res.xi[i - 1]) * (sol.profile[i - 1].s + sol.profile[i].s);
  } else {
    sol.profile.back().b = 2.0;
    for (std::size_t i = n - 1; i-- > 0;)
      sol.profile[i].b = sol.profile[i + 1].b -
                         0.5 * (res.xi[i + 1] - res.xi[i]) * (sol.profile[i].s + sol.profile[i + 1].s);
  }
  sol.endpoints.v = v;
  sol.endpoints.branch = branch;
  if (v < 0.0) {
    sol.endpoints.left = {-1.0, -1.0};
    sol.endpoints.right = from_ab(res.a0, sol.profile.back().b);
  } else {
    sol.endpoints.left = from_ab(res.a0, sol.profile.front().b);
    sol.endpoints.right = {1.0, 1.0};
  }

  auto& d = sol.diagnostics;
  d.newton_residual = res.residual;
  d.newton_iterations = res.iterations;
  d.intervals = n - 1;
  d.half_length = res.xi.back();
  const CoreVector p_left = detail::core_fixed_point(v < 0.0 ? 0.0 : res.a0);
  const CoreVector p_right = detail::core_fixed_point(v < 0.0 ? res.a0 : 0.0);
  d.boundary_distance = std::max((res.x.front() - p_left).lpNorm<Eigen::Infinity>(),
                                 (res.x.back() - p_right).lpNorm<Eigen::Infinity>());
  return sol;
}

void validate_ipm_request(double v, double l) {
  std::vector<std::string> errs;
  if (!(l > 0.0)) errs.emplace_back("l must be positive for IPM");
  if (l > kMaxIpmSpacing) errs.push_back(fmt::format("l must not exceed {} for IPM connections", kMaxIpmSpacing));
  if (!(std::abs(v) >= kMinIpmSpeed && std::abs(v) <= kMaxIpmSpeed))
    errs.push_back(fmt::format("|v| must lie in [{}, {}] for IPM connections", kMinIpmSpeed, kMaxIpmSpeed));
  if (!errs.empty()) throw ConfigError(errs);
}

std::size_t even_intervals(double half_length, const BvpOptions& o) {
  std::size_t n = o.intervals;
  if (n == 0) n = static_cast<std::size_t>(std::ceil(2.0 * half_length / o.h_target));
  if (n % 2) ++n;
  return std::max<std::size_t>(n, 4);
}

}  // namespace

ShootingResult shoot_tfe(double v, Branch branch, double eps, double max_span) {
  const WaveEndpoints ends = tfe_endpoints(v, branch);
  const ConcentrationPair mid = v > 0.0 ? ends.left : ends.right;
  const TWVector4 B{a_of(mid), b_of(mid), 0.0, 0.0};
  const auto sys = fixed_point_eigensystem(Model::TFE, v, 0.0, {B[0], B[1], 0.0, 0.0}, branch);
  // The connection leaves (v > 0) or enters (v < 0) B along the eigenvalue v.
  const EigenPair* pick = nullptr;
  for (const auto& p : sys.pairs)
    if (!pick || std::abs(p.value - v) < std::abs(pick->value - v)) pick = &p;
  std::array<double, 4> dir{};
  for (int i = 0; i < 4; ++i) dir[i] = pick->vector[i].real();
  if (dir[0] * (-B[0]) < 0.0)
    for (double& x : dir) x = -x;

  ode::State x0(4);
  for (int i = 0; i < 4; ++i) x0[i] = B[i] + eps * dir[i];
  const ode::Rhs f = [v](const ode::State& x, ode::State& dx, double) {
    const auto d = tfe_tw_rhs(v, {x[0], x[1], x[2], x[3]});
    std::copy(d.begin(), d.end(), dx.begin());
  };
  const double t1 = v > 0.0 ? max_span : -max_span;
  const auto end = ode::integrate_until(f, x0, 0.0, t1, [](double, const ode::State& x) {
    return std::abs(x[0]) < 1e-11 && std::abs(x[2]) < 1e-12 && std::abs(x[3]) < 1e-12;
  });
  ShootingResult out;
  out.arrival = from_ab(end.x[0], end.x[1]);
  out.xi_span = std::abs(end.t);
  out.arrived = std::abs(end.x[0]) < 1e-8 && std::abs(end.x[2]) < 1e-8 && std::abs(end.x[3]) < 1e-8;
  return out;
}

HeteroclinicSolution find_tfe_heteroclinic(double v, Branch branch, const TfeOptions& o) {
  HeteroclinicSolution sol;
  sol.model = Model::TFE;
  sol.v = v;
  sol.l = 0.0;
  sol.branch = branch;
  sol.endpoints = tfe_endpoints(v, branch);  // throws at v = 0
  const double L = o.half_length > 0.0 ? o.half_length : default_half_length(v);
  const std::size_t n = std::max<std::size_t>(o.samples, 3);
  sol.profile.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(n - 1);
    const auto x = tfe_explicit_profile(v, branch, xi);
    ProfilePoint p;
    p.xi = xi;
    p.a = x[0];
    p.b = x[1];
    p.r = p.r1 = x[2];
    p.s = p.s1 = x[3];
    p.u1 = -x[0] / 2.0;
    p.q1 = 0.0;
    sol.profile.push_back(p);
  }
  sol.diagnostics.half_length = L;
  sol.diagnostics.intervals = n - 1;
  const auto far = far_state(v);
  sol.diagnostics.boundary_distance = std::max(
      pair_distance(from_ab(sol.profile.front().a, sol.profile.front().b), sol.endpoints.left),
      pair_distance(from_ab(sol.profile.back().a, sol.profile.back().b), sol.endpoints.right));
  // The TFE r-branch plays the role of the sign branch; q1 is identically 0.
  fill_sign_diagnostics(sol, 1e-12);
  if (o.shoot) {
    const auto shot = shoot_tfe(v, branch, o.shooting_eps);
    sol.diagnostics.shooting_error = pair_distance(shot.arrival, far);
    if (!shot.arrived) sol.diagnostics.flags.emplace_back("shooting did not settle within the integration span");
    if (sol.diagnostics.shooting_error > 1e-4)
      sol.diagnostics.flags.push_back(fmt::format("shooting misses closed form by {:.3g}", sol.diagnostics.shooting_error));
  }
  check_rh(sol);
  return sol;
}

HeteroclinicSolution find_ipm_heteroclinic(double v, double l, Branch branch,
                                           const std::optional<HeteroclinicSolution>& seed, const BvpOptions& o) {
  validate_ipm_request(v, l);
  const double L = o.half_length > 0.0 ? o.half_length : default_half_length(v);
  const std::size_t N = even_intervals(L, o);

  detail::ConnectionProblem pb;
  pb.v = v;
  pb.sigma = branch_sign(branch);
  pb.side = v < 0.0 ? Side::FromLower : Side::ToUpper;
  pb.half_length = L;
  pb.intervals = N;
  const auto xi = detail::uniform_mesh(L, N);

  const bool seeded = seed && seed->model == Model::IPM && seed->branch == branch;
  const double l_start = seeded ? seed->l : std::min(l, o.ladder_start);
  const auto steps = ladder(l_start, l, o.ladder_factor);

  detail::ConnectionGuess guess = make_guess(v, steps.front(), branch, xi, seed);
  detail::ConnectionResult res;
  for (double lk : steps) {
    pb.l = lk;
    res = detail::solve_connection(pb, guess, o.newton_tol, o.max_iterations);
    guess.x = res.x;
    guess.a0 = res.a0;
  }

  HeteroclinicSolution sol = assemble(res, v, l, branch);
  sol.diagnostics.ladder = steps;
  fill_sign_diagnostics(sol, o.sign_tol);
  check_rh(sol);

  if (o.estimate_error) {
    detail::ConnectionProblem coarse = pb;
    coarse.intervals = N / 2 + (N / 2) % 2;
    detail::ConnectionGuess cg;
    const auto cxi = detail::uniform_mesh(L, coarse.intervals);
    HeteroclinicSolution as_seed = sol;
    cg = make_guess(v, l, branch, cxi, as_seed);
    try {
      const auto cres = detail::solve_connection(coarse, cg, o.newton_tol, o.max_iterations);
      const auto csol = assemble(cres, v, l, branch);
      sol.diagnostics.error_estimate = pair_distance(csol.intermediate(), sol.intermediate());
    } catch (const SolverError& e) {
      sol.diagnostics.flags.push_back(std::string("coarse re-solve failed: ") + e.what());
    }
  }
  return sol;
}

HugoniotLocus hugoniot_locus(Model model, double l, Side side, Branch branch, const std::vector<double>& v_samples,
                             const BvpOptions& options) {
  HugoniotLocus locus;
  locus.model = model;
  locus.l = model == Model::TFE ? 0.0 : l;
  locus.side = side;
  locus.branch = branch;
  std::vector<std::string> errs;
  for (double v : v_samples) {
    if (side == Side::FromLower && !(v < 0.0)) errs.push_back(fmt::format("speed {} must be negative for side from_lower", v));
    if (side == Side::ToUpper && !(v > 0.0)) errs.push_back(fmt::format("speed {} must be positive for side to_upper", v));
  }
  for (std::size_t i = 1; i < v_samples.size(); ++i)
    if (!(v_samples[i] > v_samples[i - 1]) && !(v_samples[i] < v_samples[i - 1]))
      errs.emplace_back("speed samples must be strictly ordered");
  if (model == Model::IPM) {
    for (double v : v_samples) {
      try {
        validate_ipm_request(v, l);
      } catch (const ConfigError& e) {
        for (const auto& m : e.violations())
          if (std::find(errs.begin(), errs.end(), m) == errs.end()) errs.push_back(m);
      }
    }
  }
  if (!errs.empty()) throw ConfigError(errs);

  std::optional<HeteroclinicSolution> warm;
  for (double v : v_samples) {
    LocusSample s;
    s.v = v;
    try {
      HeteroclinicSolution sol;
      if (model == Model::TFE) {
        sol = find_tfe_heteroclinic(v, branch, {.shoot = false});
      } else {
        BvpOptions o = options;
        o.estimate_error = false;
        try {
          sol = find_ipm_heteroclinic(v, l, branch, warm, o);
        } catch (const SolverError&) {
          if (!warm) throw;
          sol = find_ipm_heteroclinic(v, l, branch, std::nullopt, o);
        }
        warm = sol;
      }
      s.state = sol.intermediate();
      const auto rh = rankine_hugoniot_speed(sol.endpoints.left, sol.endpoints.right);
      s.residual = rh ? std::abs(*rh - v) : std::numeric_limits<double>::infinity();
    } catch (const SolverError& e) {
      s.ok = false;
      s.state = {kNaN, kNaN};
      s.residual = kNaN;
      s.message = e.what();
    }
    locus.samples.push_back(s);
  }
  return locus;
}

std::vector<LocusCrossing> intersect_loci(const HugoniotLocus& first, const HugoniotLocus& second) {
  std::vector<LocusCrossing> out;
  auto segments = [](const HugoniotLocus& L) {
    std::vector<std::pair<const LocusSample*, const LocusSample*>> segs;
    for (std::size_t i = 1; i < L.samples.size(); ++i)
      if (L.samples[i - 1].ok && L.samples[i].ok) segs.emplace_back(&L.samples[i - 1], &L.samples[i]);
    return segs;
  };
  for (const auto& [p0, p1] : segments(first)) {
    for (const auto& [q0, q1] : segments(second)) {
      const double rx = p1->state.c1 - p0->state.c1, ry = p1->state.c2 - p0->state.c2;
      const double sx = q1->state.c1 - q0->state.c1, sy = q1->state.c2 - q0->state.c2;
      const double den = rx * sy - ry * sx;
      if (std::abs(den) < 1e-14) continue;
      const double qpx = q0->state.c1 - p0->state.c1, qpy = q0->state.c2 - p0->state.c2;
      const double t = (qpx * sy - qpy * sx) / den;
      const double u = (qpx * ry - qpy * rx) / den;
      constexpr double slack = 1e-12;
      if (t < -slack || t > 1.0 + slack || u < -slack || u > 1.0 + slack) continue;
      LocusCrossing c;
      c.state = {p0->state.c1 + t * rx, p0->state.c2 + t * ry};
      c.v_first = p0->v + t * (p1->v - p0->v);
      c.v_second = q0->v + u * (q1->v - q0->v);
      const bool dup = std::any_of(out.begin(), out.end(), [&](const LocusCrossing& o) {
        return pair_distance(o.state, c.state) < 1e-9;
      });
      if (!dup) out.push_back(c);
    }
  }
  return out;
}

std::string to_string(TerraceChoice c) { return c == TerraceChoice::PlusMinus ? "plus-minus" : "minus-plus"; }

TerraceChoice parse_terrace_choice(const std::string& text) {
  if (text == "plus-minus" || text == "+-" || text == "pm") return TerraceChoice::PlusMinus;
  if (text == "minus-plus" || text == "-+" || text == "mp") return TerraceChoice::MinusPlus;
  throw ConfigError(fmt::format("unknown terrace '{}' (expected plus-minus or minus-plus)", text));
}

std::pair<Branch, Branch> terrace_branches(TerraceChoice choice) {
  return choice == TerraceChoice::PlusMinus ? std::pair{Branch::RPositive, Branch::RNegative}
                                            : std::pair{Branch::RNegative, Branch::RPositive};
}

Terrace find_terrace(Model model, double l, TerraceChoice choice, const TerraceOptions& o) {
  const auto [lower, upper] = terrace_branches(choice);
  Terrace T;
  T.l = l;
  if (model == Model::TFE || l == 0.0) {
    T.model = Model::TFE;
    T.waves.push_back(find_tfe_heteroclinic(-0.25, lower));
    T.waves.push_back(find_tfe_heteroclinic(0.25, upper));
    T.v1 = -0.25;
    T.v2 = 0.25;
    T.sigma1 = T.waves[0].intermediate();
    T.stats.residual = pair_distance(T.waves[0].intermediate(), T.waves[1].intermediate());
    T.stats.wave_solves = 2;
    return T;
  }
  T.model = Model::IPM;
  validate_ipm_request(0.25, l);

  BvpOptions inner = o.bvp;
  inner.estimate_error = false;
  std::optional<HeteroclinicSolution> warm1, warm2;
  auto solve1 = [&](double v) {
    ++T.stats.wave_solves;
    return find_ipm_heteroclinic(v, l, lower, warm1, inner);
  };
  auto solve2 = [&](double v) {
    ++T.stats.wave_solves;
    return find_ipm_heteroclinic(v, l, upper, warm2, inner);
  };
  auto mismatch = [](const HeteroclinicSolution& w1, const HeteroclinicSolution& w2) {
    const auto s1 = w1.intermediate(), s2 = w2.intermediate();
    return Eigen::Vector2d(s1.c1 - s2.c1, s1.c2 - s2.c2);
  };

  Eigen::Vector2d vv(-0.25, 0.25);
  auto w1 = solve1(vv(0));
  warm1 = w1;
  auto w2 = solve2(vv(1));
  warm2 = w2;
  Eigen::Vector2d F = mismatch(w1, w2);
  double best = F.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < o.max_iterations && F.lpNorm<Eigen::Infinity>() > o.tol; ++it) {
    const double d = o.fd_step;
    const auto w1d = solve1(vv(0) + d);
    const auto w2d = solve2(vv(1) + d);
    Eigen::Matrix2d J;
    J.col(0) = (mismatch(w1d, w2) - F) / d;
    J.col(1) = (mismatch(w1, w2d) - F) / d;
    const Eigen::Vector2d dv = J.fullPivLu().solve(-F);
    if (!dv.allFinite()) break;
    double step = 1.0;
    bool accepted = false;
    while (step > 1.0 / 64.0) {
      const Eigen::Vector2d trial = vv + step * dv;
      try {
        auto t1 = solve1(trial(0));
        auto t2 = solve2(trial(1));
        const Eigen::Vector2d Ft = mismatch(t1, t2);
        if (Ft.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>()) {
          vv = trial;
          w1 = std::move(t1);
          w2 = std::move(t2);
          warm1 = w1;
          warm2 = w2;
          F = Ft;
          accepted = true;
          break;
        }
      } catch (const SolverError&) {
      }
      step *= 0.5;
    }
    best = std::min(best, F.lpNorm<Eigen::Infinity>());
    if (!accepted) break;
  }
  T.stats.iterations = it;
  T.stats.residual = F.lpNorm<Eigen::Infinity>();
  if (!(T.stats.residual <= o.tol))
    throw SolverError(fmt::format("terrace matching did not converge (l={}, residual {:.3g})", l, best), best);

  // Final members with error estimates.
  BvpOptions fin = o.bvp;
  fin.estimate_error = true;
  T.waves.push_back(find_ipm_heteroclinic(vv(0), l, lower, w1, fin));
  T.waves.push_back(find_ipm_heteroclinic(vv(1), l, upper, w2, fin));
  T.stats.wave_solves += 2;
  T.v1 = vv(0);
  T.v2 = vv(1);
  T.sigma1 = {(T.waves[0].intermediate().c1 + T.waves[1].intermediate().c1) / 2.0,
              (T.waves[0].intermediate().c2 + T.waves[1].intermediate().c2) / 2.0};
  if (T.v1 > T.v2) throw SolverError(fmt::format("speed ordering violated: v1={} > v2={}", T.v1, T.v2));
  return T;
}

}  // namespace tubes
