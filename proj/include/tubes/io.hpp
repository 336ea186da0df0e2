#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tubes/analyzer.hpp"
#include "tubes/heteroclinic.hpp"
#include "tubes/pde.hpp"

namespace tubes::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// 17 significant digits; "nan"/"inf" for non-finite values.
std::string real(double x);

/// Writes text atomically enough for our purposes (temp file + rename).
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// snap_t<time>.csv with the shortest round-trip representation of time.
std::string snapshot_filename(double t);
/// Inverse of snapshot_filename; nullopt for other names.
std::optional<double> snapshot_time(const std::string& filename);

/// Header y,c1,c2,u1,q,f.
void write_snapshot_csv(const fs::path& path, const Snapshot& s);
/// Reads the concentrations back; the grid is reconstructed from the cell
/// centers, which must be uniform.
TubesField read_snapshot_csv(const fs::path& path);

/// Header t,h_width,front_left,front_right,plateau_c1,plateau_c2.
void write_series_csv(const fs::path& path, const std::vector<SeriesPoint>& series);
std::vector<SeriesPoint> read_series_csv(const fs::path& path);

/// Header xi,a,b,r,s (TFE) or xi,a,b,r,s,u1,q1 (IPM).
void write_profile_csv(const fs::path& path, const HeteroclinicSolution& sol);

/// Header v,c1_star,c2_star,residual; gaps are written with nan values.
void write_locus_csv(const fs::path& path, const HugoniotLocus& locus);

json to_json(const SimulationConfig& config);
json to_json(const RunStats& stats);
json to_json(const WaveEndpoints& w);
json to_json(const HeteroclinicDiagnostics& d);
json endpoints_json(const HeteroclinicSolution& sol);
json terrace_json(const Terrace& t);
json report_json(const TerraceReport& r, const SimulationConfig& config);

/// Run record for simulate: config echo, scheme, step statistics.
json run_json(const Trajectory& traj, const std::vector<double>& times,
              const std::vector<std::string>& snapshot_files);

/// Sidecar describing how an output directory was produced. The only place a
/// timestamp appears.
json metadata_json(const std::vector<std::string>& argv, const RawConfig& config,
                   const std::vector<std::string>& outputs);

}  // namespace tubes::io
