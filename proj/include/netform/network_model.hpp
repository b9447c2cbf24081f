#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netform/error.hpp"

namespace netform {

using Vertex = std::uint32_t;
using EdgeId = std::size_t;
using VertexMask = std::uint64_t;

inline constexpr std::size_t kMaxVertices = 64;

constexpr VertexMask vertex_bit(Vertex v) noexcept { return VertexMask{1} << v; }

constexpr VertexMask full_mask(std::size_t vertex_count) noexcept {
  return vertex_count >= 64 ? ~VertexMask{0} : (VertexMask{1} << vertex_count) - 1;
}

/// Unordered vertex pair, stored canonically with lo < hi.
struct Edge {
  Vertex lo = 0;
  Vertex hi = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(Vertex i, Vertex j);

struct EdgeSpec {
  Vertex i = 0;
  Vertex j = 0;
  double affinity = 0.0;
  double init_weight = 0.0;
};

struct NatureAtom {
  VertexMask subset = 0;
  double probability = 0.0;

  friend bool operator==(const NatureAtom&, const NatureAtom&) = default;
};

/// Nature's i.i.d. per-round law over vertex subsets, as an explicit atom list.
///
/// Atoms are kept sorted by subset mask with duplicates merged. Probabilities
/// must sum to one within 1e-12 and are then renormalized; renormalization is
/// skipped when the sum is already within a few ulps of one so that re-reading
/// a serialized distribution yields identical values.
class NatureDistribution {
 public:
  static NatureDistribution from_atoms(std::vector<NatureAtom> atoms);

  std::span<const NatureAtom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Sum of atom probabilities over subsets containing both i and j.
  double pair_probability(Vertex i, Vertex j) const noexcept;

  /// Index of the atom selected by a uniform draw u in [0,1).
  std::size_t sample_index(double u) const noexcept;

  friend bool operator==(const NatureDistribution&, const NatureDistribution&) = default;

 private:
  std::vector<NatureAtom> atoms_;
  std::vector<double> cumulative_;
};

NatureDistribution nature_full(std::size_t vertex_count);

/// One atom {i} ∪ neighbours(i) per vertex with positive weight.
NatureDistribution nature_vertex_neighborhood(std::size_t vertex_count, std::span<const Edge> edges,
                                              std::span<const double> vertex_weights);

/// Signaling-game nature: atom {i} ∪ S2 for each i in S1, weighted by state_weights (indexed like S1).
NatureDistribution nature_bipartite(std::size_t vertex_count, std::span<const Vertex> s1,
                                    std::span<const Vertex> s2, std::span<const double> state_weights);

struct Incidence {
  EdgeId edge = 0;
  Vertex neighbor = 0;

  friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// The immutable problem instance: graph, affinities, initial weights and Nature.
class WeightedGame {
 public:
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  double affinity(EdgeId e) const { return affinity_.at(e); }
  double init_weight(EdgeId e) const { return init_weight_.at(e); }
  double pair_probability(EdgeId e) const { return pair_prob_.at(e); }
  /// a_ij * p_ij, the quantity every mean-field formula uses.
  double ap(EdgeId e) const { return ap_.at(e); }
  bool is_live(EdgeId e) const { return ap_.at(e) > 0.0; }

  std::span<const double> affinities() const noexcept { return affinity_; }
  std::span<const double> init_weights() const noexcept { return init_weight_; }
  std::span<const double> pair_probabilities() const noexcept { return pair_prob_; }
  std::span<const double> ap_values() const noexcept { return ap_; }

  std::span<const Incidence> incident(Vertex v) const { return incidence_.at(v); }
  std::size_t degree(Vertex v) const { return incidence_.at(v).size(); }
  /// True when some incident edge has a_ij p_ij > 0.
  bool has_live_edge(Vertex v) const;

  std::optional<EdgeId> find_edge(Vertex i, Vertex j) const noexcept;
  EdgeId edge_id(Vertex i, Vertex j) const;

  const NatureDistribution& nature() const noexcept { return nature_; }

  /// min { a_ij p_ij : a_ij p_ij > 0 }.
  double w_min() const noexcept { return w_min_; }
  /// Sum over ordered pairs of a_ij p_ij (upper bound for H).
  double ap_total_ordered() const noexcept { return ap_total_ordered_; }
  /// Initial occupation mass carried by live edges.
  double h1() const noexcept { return h1_; }

  friend bool operator==(const WeightedGame&, const WeightedGame&) = default;

 private:
  friend WeightedGame build_game(std::size_t, std::span<const EdgeSpec>, NatureDistribution);

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> affinity_;
  std::vector<double> init_weight_;
  std::vector<double> pair_prob_;
  std::vector<double> ap_;
  std::vector<std::vector<Incidence>> incidence_;
  NatureDistribution nature_;
  double w_min_ = 0.0;
  double ap_total_ordered_ = 0.0;
  double h1_ = 0.0;
};

/// Validates and builds an instance. Edges keep the order given (after canonicalizing i < j).
WeightedGame build_game(std::size_t vertex_count, std::span<const EdgeSpec> edges, NatureDistribution nature);

/// p_ij per edge id, computed directly from the atom list.
std::vector<double> pairwise_probs(const WeightedGame& game);

}  // namespace netform
