#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tubes/errors.hpp"
#include "tubes/model.hpp"
#include "tubes/tw.hpp"

namespace tubes {

/// One sample of a traveling-wave profile. r and s are the raw derivatives
/// a' and b'; r1, s1, u1, q1 are the slow-fast variables (TFE: u1 = -a/2, q1 = 0).
struct ProfilePoint {
  double xi = 0.0;
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
  double s = 0.0;
  double u1 = 0.0;
  double q1 = 0.0;
  double r1 = 0.0;
  double s1 = 0.0;
};

struct HeteroclinicDiagnostics {
  double min_q1 = 0.0;
  double max_q1 = 0.0;
  double min_r1 = 0.0;
  double max_r1 = 0.0;
  /// max |u1 + a/2| along the profile
  double slow_manifold_distance = 0.0;
  /// largest distance of a truncated end from its fixed point
  double boundary_distance = 0.0;
  double newton_residual = 0.0;
  int newton_iterations = 0;
  std::size_t intervals = 0;
  double half_length = 0.0;
  /// max |c*(N) - c*(N/2)|; negative when not computed
  double error_estimate = -1.0;
  /// |c*| mismatch between shooting and closed form (TFE only; negative otherwise)
  double shooting_error = -1.0;
  /// sigma*q1 >= -tol and sigma*r1 <= tol throughout
  bool branch_consistent = true;
  std::vector<double> ladder;  ///< l values visited by continuation
  std::vector<std::string> flags;
};

struct HeteroclinicSolution {
  Model model = Model::TFE;
  double v = 0.0;
  double l = 0.0;
  Branch branch = Branch::RNegative;
  WaveEndpoints endpoints;
  std::vector<ProfilePoint> profile;
  HeteroclinicDiagnostics diagnostics;

  /// The plateau this wave shares with a neighbour (the non-far-field end).
  ConcentrationPair intermediate() const { return v < 0.0 ? endpoints.right : endpoints.left; }
};

struct ShootingResult {
  ConcentrationPair arrival;
  double xi_span = 0.0;
  bool arrived = false;
};

/// Integrates the TFE system from the intermediate fixed point along its one
/// unstable (v > 0, forward) or slow stable (v < 0, backward) eigenvector and
/// reports where the orbit settles.
ShootingResult shoot_tfe(double v, Branch branch, double eps = 1e-6, double max_span = 4000.0);

struct TfeOptions {
  double half_length = 0.0;  ///< 0: 25/|v|
  std::size_t samples = 801;
  bool shoot = true;
  double shooting_eps = 1e-6;
};

/// Closed-form TFE connection, cross-checked by shooting. Throws SolverError
/// ("no heteroclinic") for v = 0.
HeteroclinicSolution find_tfe_heteroclinic(double v, Branch branch, const TfeOptions& options = {});

struct BvpOptions {
  double half_length = 0.0;  ///< 0: 25/|v|
  double h_target = 0.1;     ///< mesh width when intervals == 0
  std::size_t intervals = 0;
  double newton_tol = 1e-10;
  int max_iterations = 40;
  /// Continuation starts at min(l, ladder_start) and grows by ladder_factor.
  double ladder_start = 0.05;
  double ladder_factor = 1.5;
  bool estimate_error = true;
  double sign_tol = 1e-8;
};

inline constexpr double kMinIpmSpeed = 0.05;
inline constexpr double kMaxIpmSpeed = 0.5;
inline constexpr double kMaxIpmSpacing = 0.5;

/// IPM connection by trapezoidal collocation of the slow-fast system on
/// [-L, L] with projection boundary conditions and the intermediate a0 as an
/// unknown. Seeded from `seed` (any model, any nearby v) or the TFE closed form.
HeteroclinicSolution find_ipm_heteroclinic(double v, double l, Branch branch,
                                           const std::optional<HeteroclinicSolution>& seed = std::nullopt,
                                           const BvpOptions& options = {});

struct LocusSample {
  double v = 0.0;
  ConcentrationPair state;  ///< intermediate state reached by the wave
  double residual = 0.0;    ///< |RH speed - v|
  bool ok = true;           ///< false marks a gap (solve failed)
  std::string message;
};

struct HugoniotLocus {
  Model model = Model::TFE;
  double l = 0.0;
  Side side = Side::FromLower;
  Branch branch = Branch::RNegative;
  std::vector<LocusSample> samples;
};

/// Locus of intermediate states on one sign branch. FromLower needs v < 0,
/// ToUpper v > 0. Failed IPM samples become gaps.
HugoniotLocus hugoniot_locus(Model model, double l, Side side, Branch branch, const std::vector<double>& v_samples,
                             const BvpOptions& options = {});

struct LocusCrossing {
  ConcentrationPair state;
  double v_first = 0.0;
  double v_second = 0.0;
};

/// Crossings of the two polylines (c1*, c2*) traced by the loci.
std::vector<LocusCrossing> intersect_loci(const HugoniotLocus& first, const HugoniotLocus& second);

struct TerraceSolverStats {
  int iterations = 0;
  double residual = 0.0;
  std::size_t wave_solves = 0;
};

struct Terrace {
  Model model = Model::TFE;
  double l = 0.0;
  ConcentrationPair sigma0{-1.0, -1.0};
  ConcentrationPair sigma1;
  ConcentrationPair sigma2{1.0, 1.0};
  double v1 = 0.0;
  double v2 = 0.0;
  std::vector<HeteroclinicSolution> waves;
  TerraceSolverStats stats;
};

/// Which of the two terraces: the one through (1/2,-1/2) or through (-1/2,1/2)
/// (and their l-dependent continuations).
enum class TerraceChoice { PlusMinus, MinusPlus };
std::string to_string(TerraceChoice c);
TerraceChoice parse_terrace_choice(const std::string& text);

/// Branches of the lower and upper waves of a terrace.
std::pair<Branch, Branch> terrace_branches(TerraceChoice choice);

struct TerraceOptions {
  BvpOptions bvp{.half_length = 100.0};
  double tol = 1e-10;
  int max_iterations = 20;
  double fd_step = 1e-6;
};

/// TFE: exact. IPM: Newton on (v1, v2) matching the intermediate states of the
/// two waves; l == 0 delegates to TFE.
Terrace find_terrace(Model model, double l, TerraceChoice choice = TerraceChoice::PlusMinus,
                     const TerraceOptions& options = {});

}  // namespace tubes
