#include "netform/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace netform {

namespace {

constexpr double kNormalizationTol = 1e-12;
// Sums this close to one are treated as already normalized (keeps parsing idempotent).
constexpr double kExactlyOneSlack = 8.0 * std::numeric_limits<double>::epsilon();

void check_vertex_count(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::VertexOutOfRange, "vertex count must be positive");
  if (n > kMaxVertices)
    throw Error(ErrorCode::TooManyVertices, std::to_string(n) + " vertices exceeds the cap of 64");
}

void check_vertex(Vertex v, std::size_t n) {
  if (v >= n)
    throw Error(ErrorCode::VertexOutOfRange,
                "vertex " + std::to_string(v) + " out of range for " + std::to_string(n) + " vertices");
}

std::vector<NatureAtom> weighted_atoms(std::span<const VertexMask> subsets, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::AllWeightsZero, "weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::AllWeightsZero, "weights sum to zero");
  std::vector<NatureAtom> atoms;
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    if (weights[k] > 0.0) atoms.push_back({subsets[k], weights[k] / total});
  }
  return atoms;
}

}  // namespace

Edge make_edge(Vertex i, Vertex j) {
  if (i == j) throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(i));
  return i < j ? Edge{i, j} : Edge{j, i};
}

NatureDistribution NatureDistribution::from_atoms(std::vector<NatureAtom> atoms) {
  if (atoms.empty()) throw Error(ErrorCode::ProbabilityNotNormalized, "nature has no atoms");
  for (const auto& atom : atoms) {
    if (!(atom.probability >= 0.0) || !std::isfinite(atom.probability))
      throw Error(ErrorCode::ProbabilityNotNormalized, "atom probability must be finite and nonnegative");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const NatureAtom& a, const NatureAtom& b) { return a.subset < b.subset; });

  NatureDistribution dist;
  for (const auto& atom : atoms) {
    if (atom.probability == 0.0) continue;
    if (!dist.atoms_.empty() && dist.atoms_.back().subset == atom.subset) {
      dist.atoms_.back().probability += atom.probability;
    } else {
      dist.atoms_.push_back(atom);
    }
  }

  double sum = 0.0;
  for (const auto& atom : dist.atoms_) sum += atom.probability;
  if (std::abs(sum - 1.0) > kNormalizationTol)
    throw Error(ErrorCode::ProbabilityNotNormalized, "atom probabilities sum to " + std::to_string(sum));
  if (std::abs(sum - 1.0) > kExactlyOneSlack) {
    for (auto& atom : dist.atoms_) atom.probability /= sum;
  }

  dist.cumulative_.reserve(dist.atoms_.size());
  double acc = 0.0;
  for (const auto& atom : dist.atoms_) {
    acc += atom.probability;
    dist.cumulative_.push_back(acc);
  }
  return dist;
}

double NatureDistribution::pair_probability(Vertex i, Vertex j) const noexcept {
  const VertexMask both = vertex_bit(i) | vertex_bit(j);
  double p = 0.0;
  for (const auto& atom : atoms_) {
    if ((atom.subset & both) == both) p += atom.probability;
  }
  return std::min(p, 1.0);
}

std::size_t NatureDistribution::sample_index(double u) const noexcept {
  const double target = u * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return cumulative_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

NatureDistribution nature_full(std::size_t vertex_count) {
  check_vertex_count(vertex_count);
  return NatureDistribution::from_atoms({{full_mask(vertex_count), 1.0}});
}

NatureDistribution nature_vertex_neighborhood(std::size_t vertex_count, std::span<const Edge> edges,
                                              std::span<const double> vertex_weights) {
  check_vertex_count(vertex_count);
  if (vertex_weights.size() != vertex_count)
    throw Error(ErrorCode::ConfigError, "vertex_weights must have one entry per vertex");
  std::vector<VertexMask> hood(vertex_count);
  for (Vertex v = 0; v < vertex_count; ++v) hood[v] = vertex_bit(v);
  for (const auto& e : edges) {
    check_vertex(e.hi, vertex_count);
    hood[e.lo] |= vertex_bit(e.hi);
    hood[e.hi] |= vertex_bit(e.lo);
  }
  return NatureDistribution::from_atoms(weighted_atoms(hood, vertex_weights));
}

NatureDistribution nature_bipartite(std::size_t vertex_count, std::span<const Vertex> s1,
                                    std::span<const Vertex> s2, std::span<const double> state_weights) {
  check_vertex_count(vertex_count);
  if (state_weights.size() != s1.size())
    throw Error(ErrorCode::ConfigError, "state_weights must have one entry per S1 vertex");
  VertexMask m1 = 0;
  VertexMask m2 = 0;
  for (Vertex v : s1) {
    check_vertex(v, vertex_count);
    if (m1 & vertex_bit(v)) throw Error(ErrorCode::NotAPartition, "S1 repeats a vertex");
    m1 |= vertex_bit(v);
  }
  for (Vertex v : s2) {
    check_vertex(v, vertex_count);
    if (m2 & vertex_bit(v)) throw Error(ErrorCode::NotAPartition, "S2 repeats a vertex");
    m2 |= vertex_bit(v);
  }
  if ((m1 & m2) != 0 || (m1 | m2) != full_mask(vertex_count) || s1.empty())
    throw Error(ErrorCode::NotAPartition, "S1 and S2 must partition the vertex set with S1 nonempty");
  std::vector<VertexMask> subsets;
  subsets.reserve(s1.size());
  for (Vertex v : s1) subsets.push_back(vertex_bit(v) | m2);
  return NatureDistribution::from_atoms(weighted_atoms(subsets, state_weights));
}

bool WeightedGame::has_live_edge(Vertex v) const {
  for (const auto& inc : incidence_.at(v)) {
    if (ap_[inc.edge] > 0.0) return true;
  }
  return false;
}

std::optional<EdgeId> WeightedGame::find_edge(Vertex i, Vertex j) const noexcept {
  if (i >= vertex_count_ || j >= vertex_count_ || i == j) return std::nullopt;
  const Vertex anchor = incidence_[i].size() <= incidence_[j].size() ? i : j;
  const Vertex other = anchor == i ? j : i;
  for (const auto& inc : incidence_[anchor]) {
    if (inc.neighbor == other) return inc.edge;
  }
  return std::nullopt;
}

EdgeId WeightedGame::edge_id(Vertex i, Vertex j) const {
  auto e = find_edge(i, j);
  if (!e) throw Error(ErrorCode::UnknownEdge, "no edge " + std::to_string(i) + "-" + std::to_string(j));
  return *e;
}

WeightedGame build_game(std::size_t vertex_count, std::span<const EdgeSpec> edges, NatureDistribution nature) {
  check_vertex_count(vertex_count);
  for (const auto& atom : nature.atoms()) {
    if ((atom.subset & ~full_mask(vertex_count)) != 0)
      throw Error(ErrorCode::VertexOutOfRange, "nature atom names a vertex outside the graph");
  }

  WeightedGame g;
  g.vertex_count_ = vertex_count;
  g.incidence_.resize(vertex_count);
  for (const auto& spec : edges) {
    check_vertex(spec.i, vertex_count);
    check_vertex(spec.j, vertex_count);
    const Edge e = make_edge(spec.i, spec.j);
    if (!(spec.affinity >= 0.0) || !std::isfinite(spec.affinity))
      throw Error(ErrorCode::NegativeAffinity, "affinity on " + std::to_string(e.lo) + "-" +
                                                   std::to_string(e.hi) + " must be finite and nonnegative");
    if (!(spec.init_weight > 0.0) || !std::isfinite(spec.init_weight))
      throw Error(ErrorCode::NonPositiveInitWeight,
                  "init weight on " + std::to_string(e.lo) + "-" + std::to_string(e.hi) + " must be positive");
    if (g.find_edge(e.lo, e.hi))
      throw Error(ErrorCode::DuplicateEdge, "edge " + std::to_string(e.lo) + "-" + std::to_string(e.hi));
    const EdgeId id = g.edges_.size();
    g.edges_.push_back(e);
    g.affinity_.push_back(spec.affinity);
    g.init_weight_.push_back(spec.init_weight);
    g.incidence_[e.lo].push_back({id, e.hi});
    g.incidence_[e.hi].push_back({id, e.lo});
  }

  g.nature_ = std::move(nature);
  g.pair_prob_ = pairwise_probs(g);
  g.ap_.resize(g.edges_.size());
  g.w_min_ = std::numeric_limits<double>::infinity();
  double init_total = 0.0;
  double init_live = 0.0;
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    g.ap_[e] = g.affinity_[e] * g.pair_prob_[e];
    init_total += g.init_weight_[e];
    if (g.ap_[e] > 0.0) {
      g.w_min_ = std::min(g.w_min_, g.ap_[e]);
      g.ap_total_ordered_ += 2.0 * g.ap_[e];
      init_live += g.init_weight_[e];
    }
  }
  if (g.ap_total_ordered_ == 0.0)
    throw Error(ErrorCode::DegenerateGame, "no edge has a_ij * p_ij > 0; the process would be frozen");
  g.h1_ = init_live / init_total;
  return g;
}

std::vector<double> pairwise_probs(const WeightedGame& game) {
  std::vector<double> p;
  p.reserve(game.edge_count());
  for (const auto& e : game.edges()) p.push_back(game.nature().pair_probability(e.lo, e.hi));
  return p;
}

}  // namespace netform
