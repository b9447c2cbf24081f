#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "netform/io.hpp"
#include "netform/network_model.hpp"
#include "netform/rng.hpp"
#include "netform/simplex.hpp"

namespace testutil {

inline std::string data(const std::string& name) { return std::string(NETFORM_TEST_DATA) + "/" + name; }

inline netform::WeightedGame fixture(const std::string& name) { return netform::io::load_game(data(name)); }

inline netform::WeightedGame game_from(std::size_t n, std::vector<netform::EdgeSpec> edges) {
  return netform::build_game(n, edges, netform::nature_full(n));
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double rel, double floor = 1e-300) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), floor});
}

/// Random game on 2..max_n vertices with a*p in (0, 2]. Every vertex gets at
/// least one edge; a third of the games use a neighbourhood Nature.
inline netform::WeightedGame random_game(netform::RandomStream& rng, std::size_t max_n = 8) {
  const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_n - 1));
  std::vector<netform::EdgeSpec> edges;
  std::vector<bool> touched(n, false);
  for (netform::Vertex i = 0; i < n; ++i) {
    for (netform::Vertex j = i + 1; j < n; ++j) {
      if (rng.uniform() < 0.45) {
        edges.push_back({i, j, 0.0, 0.5 + rng.uniform()});
        touched[i] = touched[j] = true;
      }
    }
  }
  for (netform::Vertex v = 0; v < n; ++v) {
    if (!touched[v]) {
      const netform::Vertex u = v == 0 ? 1 : 0;
      bool dup = false;
      for (const auto& e : edges) dup = dup || (std::min(e.i, e.j) == std::min(u, v) && std::max(e.i, e.j) == std::max(u, v));
      if (!dup) edges.push_back({u, v, 0.0, 0.5 + rng.uniform()});
      touched[v] = touched[u] = true;
    }
  }
  const bool neighbourhood = rng.uniform() < 1.0 / 3.0;
  netform::NatureDistribution nature = netform::nature_full(n);
  if (neighbourhood) {
    std::vector<netform::Edge> es;
    for (const auto& e : edges) es.push_back(netform::make_edge(e.i, e.j));
    std::vector<double> w(n);
    for (auto& x : w) x = 0.2 + rng.uniform();
    nature = netform::nature_vertex_neighborhood(n, es, w);
  }
  // Choose a so that a*p lands in (0, 2].
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double p = nature.pair_probability(edges[e].i, edges[e].j);
    const double target = 2.0 * (1.0 - rng.uniform());  // (0, 2]
    edges[e].affinity = target / p;
  }
  return netform::build_game(n, edges, nature);
}

/// Interior point with every coordinate bounded away from zero.
inline netform::SimplexPoint random_interior(const netform::WeightedGame& game, netform::RandomStream& rng,
                                             double floor = 0.05) {
  netform::SimplexPoint p;
  p.x.resize(game.edge_count());
  for (auto& v : p.x) v = floor + rng.uniform();
  netform::renormalize(p);
  return p;
}

}  // namespace testutil
