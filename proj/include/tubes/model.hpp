#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tubes {

enum class Model { TFE, IPM };

std::string to_string(Model model);
Model parse_model(const std::string& text);

/// Uniform cell-centered grid on [y_min, y_max].
struct Grid1D {
  double y_min = -200.0;
  double y_max = 200.0;
  std::size_t n_cells = 4000;

  double h() const { return (y_max - y_min) / static_cast<double>(n_cells); }
  double center(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * h(); }
  std::vector<double> centers() const;

  bool operator==(const Grid1D&) const = default;
};

struct ModelParams {
  Model model = Model::TFE;
  /// Tube spacing. Only the IPM closure uses it.
  double l = 0.1;
  /// Molecular diffusion after rescaling; not configurable.
  static constexpr double diffusion = 1.0;

  bool operator==(const ModelParams&) const = default;
};

enum class Profile { SharpStep, TanhStep };

struct Perturbation {
  double amplitude = 0.0;
  double width = 5.0;
  /// +1: tube 1 receives +bump and tube 2 -bump; -1: reversed; 0: both tubes +bump.
  int asymmetry = 1;

  bool operator==(const Perturbation&) const = default;
};

struct InitialDataSpec {
  Profile profile = Profile::TanhStep;
  double tanh_width = 2.0;
  double interface_position = 0.0;
  Perturbation perturbation;

  bool operator==(const InitialDataSpec&) const = default;
};

struct RunControl {
  double t_max = 100.0;
  double cfl = 0.8;
  double output_every = 50.0;
  /// Cadence of the diagnostic series in time units; 0 records every step.
  double series_every = 0.5;
  std::string output_dir = "run";

  bool operator==(const RunControl&) const = default;
};

struct SimulationConfig {
  ModelParams params;
  Grid1D grid;
  InitialDataSpec initial;
  RunControl run;

  bool operator==(const SimulationConfig&) const = default;
};

/// Flat key/value configuration as read from a file or from command-line overrides.
using RawConfig = std::map<std::string, std::string>;

/// Parses flat `key = value` text (TOML subset: comments, quoted strings, numbers).
RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::string& path);

/// Validates a raw configuration. Unset keys take defaults. Throws ConfigError
/// listing every violated constraint.
SimulationConfig validate_config(const RawConfig& raw);

/// Inverse of validate_config for a valid configuration.
RawConfig to_raw(const SimulationConfig& config);

/// Concentrations of the two tubes on a grid.
struct TubesField {
  Grid1D grid;
  std::vector<double> c1;
  std::vector<double> c2;

  TubesField() = default;
  explicit TubesField(const Grid1D& g) : grid(g), c1(g.n_cells, 0.0), c2(g.n_cells, 0.0) {}

  std::size_t size() const { return c1.size(); }
  /// Returns a copy with the tubes exchanged.
  TubesField swapped() const;
};

/// Far-field values imposed through ghost cells.
inline constexpr double kLowerFarField = -1.0;
inline constexpr double kUpperFarField = 1.0;

TubesField make_initial_data(const Grid1D& grid, const InitialDataSpec& spec);

}  // namespace tubes
