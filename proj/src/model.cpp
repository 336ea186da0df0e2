#include "tubes/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tubes/errors.hpp"

namespace tubes {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model",        "l",           "y_min",           "y_max",          "n_cells",
      "profile",      "tanh_width",  "interface_position", "perturb_amplitude",
      "perturb_width", "perturb_asymmetry", "t_max",    "cfl",            "output_every",
      "series_every", "output_dir"};
  return keys;
}

// Collects parse failures instead of throwing on the first one.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  double real(const std::string& key, double fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    try {
      std::size_t pos = 0;
      double value = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      if (!std::isfinite(value)) {
        errors.push_back(fmt::format("{} must be finite", key));
        return fallback;
      }
      return value;
    } catch (const std::exception&) {
      errors.push_back(fmt::format("{}: expected a number, got '{}'", key, it->second));
      return fallback;
    }
  }

  long long integer(const std::string& key, long long fallback) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return fallback;
    try {
      std::size_t pos = 0;
      long long value = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      return value;
    } catch (const std::exception&) {
      errors.push_back(fmt::format("{}: expected an integer, got '{}'", key, it->second));
      return fallback;
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = raw_.find(key);
    return it == raw_.end() ? fallback : it->second;
  }

  std::vector<std::string> errors;

 private:
  const RawConfig& raw_;
};

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

std::string to_string(Model model) { return model == Model::TFE ? "tfe" : "ipm"; }

Model parse_model(const std::string& text) {
  const auto t = lower(trim(text));
  if (t == "tfe") return Model::TFE;
  if (t == "ipm") return Model::IPM;
  throw ConfigError(fmt::format("unknown model '{}' (expected tfe or ipm)", text));
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> y(n_cells);
  for (std::size_t j = 0; j < n_cells; ++j) y[j] = center(j);
  return y;
}

TubesField TubesField::swapped() const {
  TubesField out = *this;
  std::swap(out.c1, out.c2);
  return out;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg;
        for (std::size_t i = 0; i < violations.size(); ++i) {
          if (i) msg += "; ";
          msg += violations[i];
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(fmt::format("line {}: expected key = value", lineno));
      continue;
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) {
      errors.push_back(fmt::format("line {}: empty key", lineno));
      continue;
    }
    raw[key] = value;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return raw;
}

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

SimulationConfig validate_config(const RawConfig& raw) {
  SimulationConfig cfg;
  Reader rd(raw);

  for (const auto& [key, value] : raw)
    if (!known_keys().count(key)) rd.errors.push_back(fmt::format("unknown key '{}'", key));

  try {
    cfg.params.model = parse_model(rd.text("model", to_string(cfg.params.model)));
  } catch (const ConfigError& e) {
    rd.errors.push_back(e.what());
  }
  cfg.params.l = rd.real("l", cfg.params.l);
  cfg.grid.y_min = rd.real("y_min", cfg.grid.y_min);
  cfg.grid.y_max = rd.real("y_max", cfg.grid.y_max);
  const long long n = rd.integer("n_cells", static_cast<long long>(cfg.grid.n_cells));

  const auto profile = lower(rd.text("profile", "tanh_step"));
  if (profile == "sharp_step") {
    cfg.initial.profile = Profile::SharpStep;
  } else if (profile == "tanh_step") {
    cfg.initial.profile = Profile::TanhStep;
  } else {
    rd.errors.push_back(fmt::format("unknown profile '{}' (expected sharp_step or tanh_step)", profile));
  }
  cfg.initial.tanh_width = rd.real("tanh_width", cfg.initial.tanh_width);
  cfg.initial.interface_position = rd.real("interface_position", cfg.initial.interface_position);
  cfg.initial.perturbation.amplitude = rd.real("perturb_amplitude", cfg.initial.perturbation.amplitude);
  cfg.initial.perturbation.width = rd.real("perturb_width", cfg.initial.perturbation.width);
  const long long asym = rd.integer("perturb_asymmetry", cfg.initial.perturbation.asymmetry);

  cfg.run.t_max = rd.real("t_max", cfg.run.t_max);
  cfg.run.cfl = rd.real("cfl", cfg.run.cfl);
  cfg.run.output_every = rd.real("output_every", cfg.run.output_every);
  cfg.run.series_every = rd.real("series_every", cfg.run.series_every);
  cfg.run.output_dir = rd.text("output_dir", cfg.run.output_dir);

  auto& errors = rd.errors;
  if (cfg.params.model == Model::IPM && !(cfg.params.l > 0.0))
    errors.push_back("l must be positive for IPM");
  if (!(cfg.grid.y_min < cfg.grid.y_max)) errors.push_back("empty domain: y_min must be below y_max");
  if (n < 8) {
    errors.push_back("n_cells must be at least 8");
  } else {
    cfg.grid.n_cells = static_cast<std::size_t>(n);
  }
  if (cfg.initial.profile == Profile::TanhStep && !(cfg.initial.tanh_width > 0.0))
    errors.push_back("tanh_width must be positive");
  if (cfg.initial.perturbation.amplitude < 0.0) errors.push_back("perturb_amplitude must be non-negative");
  if (!(cfg.initial.perturbation.width > 0.0)) errors.push_back("perturb_width must be positive");
  if (asym < -1 || asym > 1) {
    errors.push_back("perturb_asymmetry must be -1, 0 or 1");
  } else {
    cfg.initial.perturbation.asymmetry = static_cast<int>(asym);
  }
  if (cfg.grid.y_min < cfg.grid.y_max &&
      (cfg.initial.interface_position <= cfg.grid.y_min || cfg.initial.interface_position >= cfg.grid.y_max))
    errors.push_back("interface_position must lie inside the domain");
  if (cfg.run.t_max < 0.0) errors.push_back("t_max must be non-negative");
  if (!(cfg.run.cfl > 0.0 && cfg.run.cfl <= 1.0)) errors.push_back("cfl must be in (0, 1]");
  if (!(cfg.run.output_every > 0.0)) errors.push_back("output_every must be positive");
  if (cfg.run.series_every < 0.0) errors.push_back("series_every must be non-negative");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RawConfig to_raw(const SimulationConfig& c) {
  return RawConfig{
      {"model", to_string(c.params.model)},
      {"l", format_real(c.params.l)},
      {"y_min", format_real(c.grid.y_min)},
      {"y_max", format_real(c.grid.y_max)},
      {"n_cells", std::to_string(c.grid.n_cells)},
      {"profile", c.initial.profile == Profile::SharpStep ? "sharp_step" : "tanh_step"},
      {"tanh_width", format_real(c.initial.tanh_width)},
      {"interface_position", format_real(c.initial.interface_position)},
      {"perturb_amplitude", format_real(c.initial.perturbation.amplitude)},
      {"perturb_width", format_real(c.initial.perturbation.width)},
      {"perturb_asymmetry", std::to_string(c.initial.perturbation.asymmetry)},
      {"t_max", format_real(c.run.t_max)},
      {"cfl", format_real(c.run.cfl)},
      {"output_every", format_real(c.run.output_every)},
      {"series_every", format_real(c.run.series_every)},
      {"output_dir", c.run.output_dir},
  };
}

TubesField make_initial_data(const Grid1D& grid, const InitialDataSpec& spec) {
  if (spec.profile == Profile::TanhStep && spec.tanh_width > grid.y_max - grid.y_min)
    throw ConfigError("interface not resolved: tanh_width exceeds the domain length");

  TubesField field(grid);
  const auto& p = spec.perturbation;
  const double s1 = p.asymmetry == 0 ? 1.0 : static_cast<double>(p.asymmetry);
  const double s2 = p.asymmetry == 0 ? 1.0 : -static_cast<double>(p.asymmetry);
  for (std::size_t j = 0; j < grid.n_cells; ++j) {
    const double x = grid.center(j) - spec.interface_position;
    const double base = spec.profile == Profile::SharpStep ? (x >= 0.0 ? 1.0 : -1.0)
                                                           : std::tanh(x / spec.tanh_width);
    double bump = 0.0;
    if (p.amplitude > 0.0) {
      const double z = x / p.width;
      bump = p.amplitude * std::exp(-z * z);
    }
    field.c1[j] = std::clamp(base + s1 * bump, -1.0, 1.0);
    field.c2[j] = std::clamp(base + s2 * bump, -1.0, 1.0);
  }
  return field;
}

}  // namespace tubes
