#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netform/network_model.hpp"
#include "netform/rng.hpp"
#include "netform/simplex.hpp"

namespace netform {

/// The evolving urn: cumulative payoffs V_ij, success counts N_ij, vertex totals V_i and T_n.
struct SimState {
  std::uint64_t step = 0;
  std::vector<double> payoff;               // per edge, V_ij = v0_ij + a_ij N_ij
  std::vector<std::uint64_t> success_count;  // per edge
  std::vector<double> vertex_total;         // per vertex, maintained incrementally
  double total = 0.0;                       // T_n over ordered pairs = 2 * sum of payoffs

  friend bool operator==(const SimState&, const SimState&) = default;
};

SimState initial_state(const WeightedGame& game);

/// Edges that communicated in one round, plus the draws that produced them.
struct RoundRecord {
  std::vector<EdgeId> communicating;
  std::vector<EdgeId> choice;  // per vertex, chosen edge; kNoChoice for isolated vertices
  VertexMask nature_subset = 0;

  static constexpr EdgeId kNoChoice = static_cast<EdgeId>(-1);
};

/// Draws one round (neighbour choices in vertex order, then Nature) without applying it.
RoundRecord sample_round(const WeightedGame& game, const SimState& state, RandomStream& rng);

/// Applies a drawn round: V_ij += a_ij and N_ij += 1 on each communicating edge.
void apply_round(const WeightedGame& game, SimState& state, const RoundRecord& round);

/// One full round of the game. Every kAuditPeriod steps the incremental totals
/// are checked against an exact recomputation.
RoundRecord step(const WeightedGame& game, SimState& state, RandomStream& rng);

inline constexpr std::uint64_t kAuditPeriod = std::uint64_t{1} << 16;
inline constexpr double kAuditTol = 1e-9;

/// Recomputes V_i and T from payoffs; throws InternalInconsistency if the
/// incremental values drifted beyond kAuditTol relative, then resyncs them.
void audit_totals(const WeightedGame& game, SimState& state);

/// p_ij V_ij^2 / (V_i V_j): marginal probability that edge communicates next round.
double success_probability(const WeightedGame& game, const SimState& state, EdgeId edge);

/// x_ij = V_ij / T_n.
SimplexPoint occupation(const WeightedGame& game, const SimState& state);

// --- recording ------------------------------------------------------------

enum Observable : unsigned {
  kObsOccupation = 1u << 0,  // x per edge
  kObsPayoff = 1u << 1,      // H(x)
  kObsGrowth = 1u << 2,      // T_n / n
  kObsFieldNorm = 1u << 3,   // ||F(x)||_1
  kObsCounts = 1u << 4,      // N per edge
  kObsAll = 0x1fu,
};

struct RecorderSchedule {
  enum class Kind { Every, Geometric };
  Kind kind = Kind::Every;
  std::uint64_t every = 1000;  // Every: record when step % every == 0
  double ratio = 2.0;          // Geometric: checkpoints ceil(ratio^m), m = 0, 1, ...
  unsigned observables = kObsAll;

  friend bool operator==(const RecorderSchedule&, const RecorderSchedule&) = default;
};

/// Checkpoint steps in (start, start + horizon], always including the final step.
std::vector<std::uint64_t> checkpoints(const RecorderSchedule& schedule, std::uint64_t start,
                                       std::uint64_t horizon);

struct Sample {
  std::uint64_t step = 0;
  double H = 0.0;
  double growth = 0.0;  // T_n / n
  double field_l1 = 0.0;
  std::vector<double> x;
  std::vector<std::uint64_t> counts;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Trajectory {
  unsigned observables = kObsAll;
  std::vector<Sample> samples;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Applies `step` horizon times, recording at the schedule's checkpoints.
Trajectory run(const WeightedGame& game, SimState& state, std::uint64_t horizon, RandomStream& rng,
               const RecorderSchedule& schedule);

Sample observe(const WeightedGame& game, const SimState& state, unsigned observables);

}  // namespace netform
