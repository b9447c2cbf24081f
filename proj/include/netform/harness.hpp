#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netform/dynamics.hpp"
#include "netform/network_model.hpp"

namespace netform {

enum class AnalysisKind {
  PayoffConvergence,
  LinearGrowth,
  EquilibriumConvergence,
  LimitGraphBasin,
  BoundaryExponent,
};

std::string_view to_string(AnalysisKind kind) noexcept;
AnalysisKind analysis_from_string(std::string_view name);

/// Experiment configuration. Replica r runs with seed seed_base + r.
struct Campaign {
  std::string game_ref;  // echoed into reports
  std::uint64_t replicas = 20;
  std::uint64_t horizon = 1000000;
  std::uint64_t seed_base = 0;
  RecorderSchedule recorder{RecorderSchedule::Kind::Every, 1000, 2.0, kObsAll};
  AnalysisKind analysis = AnalysisKind::LinearGrowth;

  // limit-graph detection
  std::vector<std::vector<EdgeId>> targets;  // basin targets, each must satisfy P
  std::uint64_t window = 0;                  // W; 0 means horizon / 10
  double theta = 0.01;

  // boundary exponent
  std::optional<EdgeId> reference_edge;
  std::optional<EdgeId> edge;
  bool allow_non_star = false;

  // statistical thresholds
  std::uint64_t convergence_from = 100000;  // dyadic checks use checkpoints n >= this
  double payoff_threshold = 0.02;
  double growth_threshold = 0.05;
  double field_threshold = 0.05;
  double required_fraction = 0.9;
  double basin_min_frequency = 0.5;
  double exponent_band = 0.1;
  double leaf_mass_threshold = 0.05;

  std::uint64_t effective_window() const noexcept { return window > 0 ? window : horizon / 10; }

  friend bool operator==(const Campaign&, const Campaign&) = default;
};

/// Throws InvalidCampaign (horizon < 1000, no replicas, bad window) or the
/// analysis-specific errors (PropertyPViolated, NotStarGame, UnknownEdge).
void validate_campaign(const WeightedGame& game, const Campaign& campaign);

// --- limit graph detection ------------------------------------------------

struct LimitGraph {
  std::vector<EdgeId> edges;
  /// Edges still communicating in the window whose occupation is at or below
  /// theta: they fall out of use while reinforcing forever.
  std::vector<EdgeId> active_below_threshold;

  friend bool operator==(const LimitGraph&, const LimitGraph&) = default;
};

/// Edge kept iff its success count grew during the last W steps and x_ij > theta
/// at the final sample. `tail` needs count and occupation observables; throws
/// WindowTooShort if no sample lies W or more steps before the final one.
LimitGraph detect_limit_graph(const Trajectory& tail, std::uint64_t window, double theta);

// --- replicas -------------------------------------------------------------

struct ReplicaResult {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  double final_T = 0.0;
  double final_growth = 0.0;  // T_n / n
  double final_H = 0.0;
  double growth_gap = 0.0;    // |T_n / n - H(x_n)|
  std::optional<double> dyadic_sup;  // sup |H(x_2n) - H(x_n)| over checkpoints n >= convergence_from
  double field_l1 = 0.0;
  std::vector<std::uint64_t> counts;
  std::vector<double> final_x;
  LimitGraph limit_graph;
  std::optional<double> exponent;            // log V_edge / log n
  std::optional<double> reference_exponent;  // log V_reference / log n
  std::optional<double> leaf_mass;           // x of the non-central endpoint of `edge`

  friend bool operator==(const ReplicaResult&, const ReplicaResult&) = default;
};

ReplicaResult run_replica(const WeightedGame& game, const Campaign& campaign, std::uint64_t index);

/// OpenMP-parallel over replicas; `threads` <= 0 uses the runtime default.
/// Results depend only on replica indices, never on the thread count.
std::vector<ReplicaResult> run_replicas(const WeightedGame& game, const Campaign& campaign, int threads = 0);
/// Serial reference for run_replicas.
std::vector<ReplicaResult> run_replicas_serial(const WeightedGame& game, const Campaign& campaign);

// --- aggregation ----------------------------------------------------------

struct TargetFrequency {
  std::vector<EdgeId> edges;
  std::uint64_t hits = 0;
  double frequency = 0.0;
  double std_error = 0.0;

  friend bool operator==(const TargetFrequency&, const TargetFrequency&) = default;
};

struct LimitGraphEstimate {
  std::uint64_t window = 0;
  double theta = 0.0;
  std::vector<LimitGraph> per_replica;
  std::vector<TargetFrequency> targets;
  std::uint64_t undetermined = 0;
  double combined_frequency = 0.0;

  friend bool operator==(const LimitGraphEstimate&, const LimitGraphEstimate&) = default;
};

struct ExponentEstimate {
  EdgeId reference_edge = 0;
  EdgeId edge = 0;
  double predicted = 0.0;
  double median = 0.0;
  std::vector<double> per_replica;
  std::vector<double> leaf_mass;
  std::uint64_t leaf_mass_pass = 0;

  friend bool operator==(const ExponentEstimate&, const ExponentEstimate&) = default;
};

struct Aggregate {
  std::uint64_t replicas = 0;
  std::uint64_t required = 0;  // replicas that must pass a per-replica check
  std::uint64_t growth_pass = 0;
  std::uint64_t payoff_pass = 0;
  std::uint64_t field_pass = 0;
  double median_growth_gap = 0.0;
  std::optional<double> median_dyadic_sup;
  double median_field_l1 = 0.0;
  std::optional<LimitGraphEstimate> basin;
  std::optional<ExponentEstimate> exponent;
  bool passed = false;  // verdict of the campaign's analysis kind

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct CampaignReport {
  Campaign campaign;
  std::vector<ReplicaResult> replicas;
  Aggregate aggregate;

  friend bool operator==(const CampaignReport&, const CampaignReport&) = default;
};

/// Single-threaded fold over finished replicas.
Aggregate aggregate(const WeightedGame& game, const Campaign& campaign, const std::vector<ReplicaResult>& replicas);

CampaignReport run_campaign(const WeightedGame& game, const Campaign& campaign, int threads = 0);

/// Empirical frequency of each target limit graph.
LimitGraphEstimate basin_frequency(const WeightedGame& game, const std::vector<std::vector<EdgeId>>& targets,
                                   std::uint64_t replicas, std::uint64_t horizon, std::uint64_t seed,
                                   int threads = 0);

/// Friedman-urn exponent log V_edge / log n on a star with full nature; predicted a_edge / a_reference.
ExponentEstimate boundary_exponent(const WeightedGame& game, EdgeId reference_edge, EdgeId edge,
                                   std::uint64_t replicas, std::uint64_t horizon, std::uint64_t seed,
                                   int threads = 0, bool allow_non_star = false);

}  // namespace netform
