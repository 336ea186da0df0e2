#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "tubes/io.hpp"

using namespace tubes;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("tubes_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Snapshot sample_snapshot(Model m) {
  SimulationConfig c;
  c.params.model = m;
  c.grid = {-10.0, 10.0, 64};
  c.initial.perturbation = {0.2, 2.0, 1};
  return make_snapshot(1.25, make_initial_data(c.grid, c.initial), c.params);
}

}  // namespace

TEST_CASE("real() round-trips doubles and spells non-finite values") {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) CHECK(std::stod(io::real(x)) == x);
  CHECK(io::real(std::nan("")) == "nan");
  CHECK(io::real(INFINITY) == "inf");
  CHECK(io::real(-INFINITY) == "-inf");
}

TEST_CASE("snapshot file names encode the time") {
  CHECK(io::snapshot_filename(50.0) == "snap_t50.csv");
  CHECK(io::snapshot_filename(0.3) == "snap_t0.3.csv");
  for (double t : {0.0, 0.3, 12.5, 400.0, 1.0 / 3.0})
    CHECK(io::snapshot_time(io::snapshot_filename(t)).value() == t);
  CHECK_FALSE(io::snapshot_time("series.csv").has_value());
  CHECK_FALSE(io::snapshot_time("snap_tabc.csv").has_value());
}

TEST_CASE("snapshot CSV round trip is exact") {
  TempDir tmp;
  for (Model m : {Model::TFE, Model::IPM}) {
    const auto s = sample_snapshot(m);
    const auto p = tmp.path / "snap.csv";
    io::write_snapshot_csv(p, s);
    const auto back = io::read_snapshot_csv(p);
    CHECK(back.c1 == s.field.c1);
    CHECK(back.c2 == s.field.c2);
    CHECK(back.grid.n_cells == s.field.grid.n_cells);
    CHECK(back.grid.y_min == doctest::Approx(s.field.grid.y_min).epsilon(1e-12));
    CHECK(back.grid.y_max == doctest::Approx(s.field.grid.y_max).epsilon(1e-12));
    CHECK(io::read_text(p).rfind("y,c1,c2,u1,q,f\n", 0) == 0);
  }
}

TEST_CASE("series CSV round trip keeps NaN gaps") {
  TempDir tmp;
  std::vector<SeriesPoint> s{{0.0, NAN, NAN, NAN, NAN, NAN}, {0.5, 10.0, -5.0, 5.0, 0.49, -0.51},
                             {1.0, 10.5, -5.25, 5.25, 1.0 / 3.0, -2.0 / 3.0}};
  io::write_series_csv(tmp.path / "series.csv", s);
  const auto back = io::read_series_csv(tmp.path / "series.csv");
  REQUIRE(back.size() == 3);
  CHECK(std::isnan(back[0].h_width));
  CHECK(back[2].plateau_c1 == 1.0 / 3.0);
  CHECK(back[1].front_left == -5.0);
}

TEST_CASE("malformed snapshot files are reported") {
  TempDir tmp;
  io::write_text(tmp.path / "bad.csv", "y,c1\n0,1\n");
  CHECK_THROWS_AS(io::read_snapshot_csv(tmp.path / "bad.csv"), ConfigError);
  CHECK_THROWS_AS(io::read_snapshot_csv(tmp.path / "missing.csv"), ConfigError);
  std::string nonuniform = "y,c1,c2\n";
  for (double y : {0.0, 1.0, 2.0, 3.0, 4.0, 5.5, 6.0, 7.0}) nonuniform += std::to_string(y) + ",0,0\n";
  io::write_text(tmp.path / "nu.csv", nonuniform);
  CHECK_THROWS_WITH_AS(io::read_snapshot_csv(tmp.path / "nu.csv"), doctest::Contains("not uniform"), ConfigError);
}

TEST_CASE("outputs are byte-identical across repeated writes") {
  TempDir tmp;
  const auto s = sample_snapshot(Model::IPM);
  io::write_snapshot_csv(tmp.path / "a.csv", s);
  io::write_snapshot_csv(tmp.path / "b.csv", sample_snapshot(Model::IPM));
  CHECK(io::read_text(tmp.path / "a.csv") == io::read_text(tmp.path / "b.csv"));

  const auto t1 = io::terrace_json(find_terrace(Model::TFE, 0.0));
  const auto t2 = io::terrace_json(find_terrace(Model::TFE, 0.0));
  CHECK(t1.dump() == t2.dump());
}

TEST_CASE("terrace JSON carries the terrace, the theory and the deltas") {
  TempDir tmp;
  const auto j = io::terrace_json(find_terrace(Model::TFE, 0.0));
  io::write_json(tmp.path / "terrace.json", j);
  const auto back = io::read_json(tmp.path / "terrace.json");
  CHECK(back == j);
  CHECK(back["v1"].get<double>() == -0.25);
  CHECK(back["v2"].get<double>() == 0.25);
  CHECK(back["sigma1"][0].get<double>() == 0.5);
  CHECK(back["deltas"]["v1"].get<double>() == 0.0);
  CHECK(back["waves"].size() == 2);
  CHECK(back["model"] == "tfe");
}

TEST_CASE("report JSON writes missing values as null") {
  TerraceReport r;
  r.delta_sigma1 = NAN;
  SimulationConfig c;
  const auto j = io::json::parse(io::report_json(r, c).dump());
  CHECK(j["deltas"]["sigma1"].is_null());
  CHECK(j["pass"]["all"] == false);
  CHECK_FALSE(j.contains("sigma1"));
}

TEST_CASE("read_json reports parse errors as configuration errors") {
  TempDir tmp;
  io::write_text(tmp.path / "x.json", "{ not json");
  CHECK_THROWS_AS(io::read_json(tmp.path / "x.json"), ConfigError);
}
