#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tubes/errors.hpp"
#include "tubes/model.hpp"

using namespace tubes;

namespace {

std::vector<std::string> violations_of(const RawConfig& raw) {
  try {
    validate_config(raw);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_config accepts a plain TFE configuration") {
  const auto cfg = validate_config({{"model", "TFE"}, {"y_min", "-200"}, {"y_max", "200"}, {"n_cells", "4000"},
                                    {"profile", "sharp_step"}, {"interface_position", "0"}});
  CHECK(cfg.params.model == Model::TFE);
  CHECK(cfg.grid.n_cells == 4000);
  CHECK(cfg.grid.h() == doctest::Approx(0.1));
  CHECK(cfg.initial.profile == Profile::SharpStep);
}

TEST_CASE("validate_config rejects IPM with non-positive l") {
  CHECK(mentions(violations_of({{"model", "ipm"}, {"l", "0"}}), "l must be positive for IPM"));
  CHECK(mentions(violations_of({{"model", "ipm"}, {"l", "-0.1"}}), "l must be positive for IPM"));
  // TFE ignores l in the dynamics.
  CHECK(violations_of({{"model", "tfe"}, {"l", "0"}}).empty());
}

TEST_CASE("validate_config reports an empty domain") {
  CHECK(mentions(violations_of({{"y_min", "100"}, {"y_max", "-100"}}), "empty domain"));
}

TEST_CASE("validate_config lists every violation at once") {
  const auto v = violations_of({{"model", "ipm"}, {"l", "0"}, {"n_cells", "4"}, {"perturb_amplitude", "-1"},
                                {"bogus", "1"}, {"cfl", "2"}});
  CHECK(mentions(v, "l must be positive"));
  CHECK(mentions(v, "n_cells must be at least 8"));
  CHECK(mentions(v, "perturb_amplitude must be non-negative"));
  CHECK(mentions(v, "unknown key 'bogus'"));
  CHECK(mentions(v, "cfl"));
  CHECK(v.size() >= 5);
}

TEST_CASE("validate_config rejects malformed numbers") {
  CHECK(mentions(violations_of({{"l", "abc"}}), "expected a number"));
  CHECK(mentions(violations_of({{"n_cells", "12.5"}}), "expected an integer"));
}

TEST_CASE("validate_config is idempotent") {
  const RawConfig raw{{"model", "ipm"}, {"l", "0.07"}, {"y_min", "-33.3"}, {"y_max", "41.7"}, {"n_cells", "999"},
                      {"tanh_width", "1.3"}, {"perturb_amplitude", "0.1"}, {"perturb_asymmetry", "-1"},
                      {"t_max", "12.5"}, {"output_dir", "x y"}};
  const auto once = validate_config(raw);
  const auto twice = validate_config(to_raw(once));
  CHECK(once == twice);
  CHECK(to_raw(once) == to_raw(twice));
}

TEST_CASE("config text parser handles comments, quotes and blank lines") {
  const auto raw = parse_config_text("# header\nmodel = \"ipm\"  # trailing\n\nl=0.2\noutput_dir = \"a#b\"\n");
  CHECK(raw.at("model") == "ipm");
  CHECK(raw.at("l") == "0.2");
  CHECK(raw.at("output_dir") == "a#b");
  CHECK_THROWS_AS(parse_config_text("no equals sign"), ConfigError);
}

TEST_CASE("sharp step gives the sign of y in both tubes") {
  Grid1D g{-10.0, 10.0, 20};
  InitialDataSpec spec;
  spec.profile = Profile::SharpStep;
  const auto f = make_initial_data(g, spec);
  for (std::size_t j = 0; j < g.n_cells; ++j) {
    const double expected = g.center(j) >= 0.0 ? 1.0 : -1.0;
    CHECK(f.c1[j] == expected);
    CHECK(f.c2[j] == expected);
  }
}

TEST_CASE("tanh step without perturbation has equal tubes") {
  Grid1D g{-50.0, 50.0, 500};
  InitialDataSpec spec;
  spec.tanh_width = 3.0;
  const auto f = make_initial_data(g, spec);
  for (std::size_t j = 0; j < g.n_cells; ++j) {
    CHECK(f.c1[j] == doctest::Approx(std::tanh(g.center(j) / 3.0)).epsilon(1e-15));
    CHECK(f.c1[j] == f.c2[j]);
  }
}

TEST_CASE("antisymmetric perturbation keeps the far-field limits and stays in [-1,1]") {
  Grid1D g{-200.0, 200.0, 4000};
  InitialDataSpec spec;
  spec.tanh_width = 2.0;
  spec.perturbation = {0.2, 5.0, 1};
  const auto f = make_initial_data(g, spec);
  // Interface at least 10 widths from both ends.
  CHECK(std::abs(f.c1.front() + 1.0) < 1e-6);
  CHECK(std::abs(f.c2.front() + 1.0) < 1e-6);
  CHECK(std::abs(f.c1.back() - 1.0) < 1e-6);
  CHECK(std::abs(f.c2.back() - 1.0) < 1e-6);
  double max_split = 0.0;
  for (std::size_t j = 0; j < g.n_cells; ++j) {
    CHECK(f.c1[j] <= 1.0);
    CHECK(f.c1[j] >= -1.0);
    CHECK(f.c2[j] <= 1.0);
    CHECK(f.c2[j] >= -1.0);
    const double y = g.center(j);
    const double bump = 0.2 * std::exp(-(y / 5.0) * (y / 5.0));
    const double base = std::tanh(y / 2.0);
    CHECK(f.c1[j] == doctest::Approx(std::clamp(base + bump, -1.0, 1.0)));
    CHECK(f.c2[j] == doctest::Approx(std::clamp(base - bump, -1.0, 1.0)));
    max_split = std::max(max_split, f.c1[j] - f.c2[j]);
  }
  CHECK(max_split > 0.3);

  spec.perturbation.asymmetry = -1;
  const auto g2 = make_initial_data(g, spec);
  CHECK(g2.c1 == f.c2);
  CHECK(g2.c2 == f.c1);
}

TEST_CASE("an interface wider than the domain is not resolved") {
  Grid1D g{-5.0, 5.0, 100};
  InitialDataSpec spec;
  spec.tanh_width = 20.0;
  CHECK_THROWS_WITH_AS(make_initial_data(g, spec), doctest::Contains("interface not resolved"), ConfigError);
}
