#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netform/dynamics.hpp"
#include "netform/equilibrium.hpp"
#include "netform/harness.hpp"
#include "netform/meanfield.hpp"
#include "netform/network_model.hpp"
#include "netform/simplex.hpp"

namespace netform::io {

using json = nlohmann::json;

/// git-describe string baked in at build time.
std::string_view version() noexcept;

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// --- files ----------------------------------------------------------------

/// Throws ConfigError naming the path when it cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Throws ConfigError on missing files or malformed JSON.
json read_json(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place; throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
/// Creates the directory if needed; throws IoError.
void ensure_directory(const std::filesystem::path& dir);

// --- games and points -----------------------------------------------------

/// Reads {"vertex_count", "edges": [{i, j, a, v0}], "nature": {"kind": ...}}.
/// Malformed structure throws ConfigError; instance errors keep their own codes.
WeightedGame parse_game(const json& j);
/// Nature is written as explicit atoms so that the result parses back equal.
json game_to_json(const WeightedGame& game);
WeightedGame load_game(const std::filesystem::path& path);

/// Tolerance on the ordered sum accepted when reading a point.
inline constexpr double kPointReadTol = 1e-9;

/// Reads {"x": [{i, j, value}]}; unlisted edges are zero. Accepted points are
/// renormalized when their sum is off by more than a few ulps.
SimplexPoint parse_point(const WeightedGame& game, const json& j);
json point_to_json(const WeightedGame& game, const SimplexPoint& point);
SimplexPoint load_point(const WeightedGame& game, const std::filesystem::path& path);

std::string edge_key(const Edge& e);
json edge_to_json(const Edge& e);
EdgeId edge_from_json(const WeightedGame& game, const json& j);

// --- trajectories ---------------------------------------------------------

/// One long-format row: `step` (or `time` for the ODE), observable, key, value.
struct TrajectoryRow {
  double index = 0.0;
  std::string observable;
  std::string key;
  double value = 0.0;
};

std::vector<TrajectoryRow> trajectory_rows(const WeightedGame& game, const Trajectory& traj);
std::vector<TrajectoryRow> ode_rows(const WeightedGame& game, const OdeTrajectory& traj);

/// CSV with header `<index_name>,observable,key,value`.
std::string rows_to_csv(const std::vector<TrajectoryRow>& rows, std::string_view index_name);
/// JSON array of row objects with the same content as the CSV.
json rows_to_json(const std::vector<TrajectoryRow>& rows, std::string_view index_name);

// --- reports --------------------------------------------------------------

json classify_report_to_json(const WeightedGame& game, const EquilibriumReport& report);
json stable_graphs_to_json(const WeightedGame& game, const std::vector<std::vector<EdgeId>>& graphs);

/// Campaign spec: {"game": path or inline object, "replicas", "horizon", "seed_base",
/// "recorder": {...}, "analysis": {"kind", ...}, "thresholds": {...}}.
struct CampaignSpec {
  WeightedGame game;
  Campaign campaign;
};

Campaign parse_campaign(const WeightedGame& game, const json& j);
json campaign_to_json(const WeightedGame& game, const Campaign& campaign);
/// Relative game paths resolve against the spec file's directory.
CampaignSpec load_campaign_spec(const std::filesystem::path& path);

json campaign_report_to_json(const WeightedGame& game, const CampaignReport& report);
CampaignReport parse_campaign_report(const WeightedGame& game, const json& j);
/// One row per replica.
std::string campaign_summary_csv(const WeightedGame& game, const CampaignReport& report);

/// Sidecar metadata: version, command, seed and the echoed configuration.
json metadata(std::string_view command, std::optional<std::uint64_t> seed, const json& config);

/// Serialized JSON text with a trailing newline.
std::string dump(const json& j);

}  // namespace netform::io
