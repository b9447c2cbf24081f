#include "netform/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "netform/meanfield.hpp"
#include "netform/rng.hpp"

namespace netform {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool same_ap(double a, double b) { return std::abs(a - b) <= kBalanceTol * std::max(std::abs(a), std::abs(b)); }

std::vector<std::size_t> subgraph_degrees(const WeightedGame& game, const SupportGraph& sub) {
  std::vector<std::size_t> deg(game.vertex_count(), 0);
  for (EdgeId e : sub.edges) {
    ++deg[game.edge(e).lo];
    ++deg[game.edge(e).hi];
  }
  return deg;
}

// Common a*p of a component (0 for isolated vertices). Assumes balance holds.
double component_ap(const WeightedGame& game, const Component& c) {
  return c.edges.empty() ? 0.0 : game.ap(c.edges.front());
}

}  // namespace

SupportGraph make_subgraph(const WeightedGame& game, std::span<const EdgeId> edges) {
  SupportGraph g;
  g.contains.assign(game.edge_count(), false);
  for (EdgeId e : edges) {
    if (e >= game.edge_count()) throw Error(ErrorCode::UnknownEdge, "edge id " + std::to_string(e));
    g.contains[e] = true;
  }
  DisjointSets sets(game.vertex_count());
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (!g.contains[e]) continue;
    g.edges.push_back(e);
    sets.unite(game.edge(e).lo, game.edge(e).hi);
  }
  // Roots are the smallest vertex of each set, so scanning vertices in order
  // numbers components by their smallest vertex.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index_of_root(game.vertex_count(), kUnset);
  g.component_of.resize(game.vertex_count());
  for (Vertex v = 0; v < game.vertex_count(); ++v) {
    const std::size_t root = sets.find(v);
    if (index_of_root[root] == kUnset) {
      index_of_root[root] = g.components.size();
      g.components.emplace_back();
    }
    g.component_of[v] = index_of_root[root];
    g.components[index_of_root[root]].vertices.push_back(v);
  }
  for (EdgeId e : g.edges) g.components[g.component_of[game.edge(e).lo]].edges.push_back(e);
  return g;
}

SupportGraph support_graph(const WeightedGame& game, const SimplexPoint& point) {
  if (point.x.size() != game.edge_count()) throw Error(ErrorCode::InvalidPoint, "point dimension mismatch");
  std::vector<EdgeId> support;
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (point.x[e] > 0.0) support.push_back(e);
  }
  return make_subgraph(game, support);
}

PropertyPReport check_property_P(const WeightedGame& game, const SupportGraph& subgraph) {
  PropertyPReport report;
  const auto deg = subgraph_degrees(game, subgraph);

  for (std::size_t c = 0; c < subgraph.components.size(); ++c) {
    const auto& comp = subgraph.components[c];
    if (!comp.edges.empty()) {
      const double ref = game.ap(comp.edges.front());
      for (EdgeId e : comp.edges) {
        if (!(game.ap(e) > 0.0) || !same_ap(game.ap(e), ref)) {
          report.violations.push_back({PCondition::Balance, c,
                                       "a*p differs or vanishes within component " + std::to_string(c)});
          break;
        }
      }
    }
    const auto hubs = std::count_if(comp.vertices.begin(), comp.vertices.end(),
                                    [&](Vertex v) { return deg[v] >= 2; });
    if (hubs > 1)
      report.violations.push_back({PCondition::Star, c,
                                   std::to_string(hubs) + " vertices with several neighbours in component " +
                                       std::to_string(c)});
  }
  for (Vertex v = 0; v < game.vertex_count(); ++v) {
    const bool covered = deg[v] > 0;
    const bool live = game.has_live_edge(v);
    if (covered != live)
      report.violations.push_back({PCondition::Coverage, v,
                                   covered ? "vertex " + std::to_string(v) + " covered without a live edge"
                                           : "vertex " + std::to_string(v) + " has a live edge but is uncovered"});
  }

  report.holds = report.violations.empty();
  if (report.holds) {
    report.nuclei.reserve(subgraph.components.size());
    for (const auto& comp : subgraph.components) {
      Vertex nucleus = comp.vertices.front();  // singleton or two-vertex component: lowest index
      for (Vertex v : comp.vertices) {
        if (deg[v] >= 2) nucleus = v;
      }
      report.nuclei.push_back(nucleus);
    }
    report.nucleus_of.resize(game.vertex_count());
    for (Vertex v = 0; v < game.vertex_count(); ++v) report.nucleus_of[v] = report.nuclei[subgraph.component_of[v]];
  }
  return report;
}

SimplexPoint gamma_G_point(const WeightedGame& game, const SupportGraph& subgraph, const SatelliteSplit& split) {
  const auto report = check_property_P(game, subgraph);
  if (!report.holds)
    throw Error(ErrorCode::PropertyPViolated, report.violations.front().detail);

  std::vector<double> weight(game.edge_count(), 0.0);
  switch (split.kind) {
    case SatelliteSplit::Kind::Equal:
      for (EdgeId e : subgraph.edges) weight[e] = 1.0;
      break;
    case SatelliteSplit::Kind::Dirichlet: {
      RandomStream rng(split.seed);
      for (EdgeId e : subgraph.edges) {
        // open interval (0,1) so the exponential draw is strictly positive
        const double u = (static_cast<double>(rng.next_u64() >> 11) + 0.5) * 0x1.0p-53;
        weight[e] = -std::log(u);
      }
      break;
    }
    case SatelliteSplit::Kind::Explicit:
      if (split.weights.size() != game.edge_count())
        throw Error(ErrorCode::NonpositiveSplit, "explicit split needs one weight per edge");
      for (EdgeId e : subgraph.edges) {
        if (!(split.weights[e] > 0.0) || !std::isfinite(split.weights[e]))
          throw Error(ErrorCode::NonpositiveSplit, "split weight on edge " + std::to_string(e) + " is not positive");
        weight[e] = split.weights[e];
      }
      break;
  }

  double ap_sum = 0.0;
  for (const auto& comp : subgraph.components) ap_sum += component_ap(game, comp);

  SimplexPoint q{std::vector<double>(game.edge_count(), 0.0)};
  for (const auto& comp : subgraph.components) {
    if (comp.edges.empty()) continue;
    const double nucleus_mass = component_ap(game, comp) / (2.0 * ap_sum);
    double wsum = 0.0;
    for (EdgeId e : comp.edges) wsum += weight[e];
    for (EdgeId e : comp.edges) q.x[e] = nucleus_mass * (weight[e] / wsum);
  }
  return q;
}

bool in_gamma_G(const WeightedGame& game, const SimplexPoint& point, double tol) {
  const auto sub = support_graph(game, point);
  const auto report = check_property_P(game, sub);
  if (!report.holds) return false;
  const auto mass = vertex_masses(game, point);
  double ap_sum = 0.0;
  for (const auto& comp : sub.components) ap_sum += component_ap(game, comp);
  for (std::size_t c = 0; c < sub.components.size(); ++c) {
    const double expected = component_ap(game, sub.components[c]) / (2.0 * ap_sum);
    if (std::abs(mass[report.nuclei[c]] - expected) > tol) return false;
  }
  return true;
}

std::vector<std::vector<EdgeId>> enumerate_stable_graphs(const WeightedGame& game) {
  if (game.vertex_count() > 16)
    throw Error(ErrorCode::TooLarge, "exhaustive enumeration is limited to 16 vertices");

  // Only live edges can appear (balance requires a*p > 0).
  std::vector<EdgeId> live;
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (game.is_live(e)) live.push_back(e);
  }
  // Live edges remaining (undecided) per vertex, for the coverage prune.
  std::vector<std::size_t> undecided(game.vertex_count(), 0);
  for (EdgeId e : live) {
    ++undecided[game.edge(e).lo];
    ++undecided[game.edge(e).hi];
  }
  std::vector<std::size_t> chosen_deg(game.vertex_count(), 0);
  std::vector<EdgeId> current;
  std::vector<std::vector<EdgeId>> out;

  // Balance and star violations persist when edges are added, so a partial
  // selection that violates either can be abandoned.
  auto partial_ok = [&]() {
    const auto sub = make_subgraph(game, current);
    for (const auto& v : check_property_P(game, sub).violations) {
      if (v.condition != PCondition::Coverage) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> visit = [&](std::size_t k) {
    if (k == live.size()) {
      if (check_property_P(game, make_subgraph(game, current)).holds) out.push_back(current);
      return;
    }
    const Edge& edge = game.edge(live[k]);
    --undecided[edge.lo];
    --undecided[edge.hi];

    current.push_back(live[k]);
    ++chosen_deg[edge.lo];
    ++chosen_deg[edge.hi];
    if (partial_ok()) visit(k + 1);
    --chosen_deg[edge.lo];
    --chosen_deg[edge.hi];
    current.pop_back();

    const bool strands = (chosen_deg[edge.lo] == 0 && undecided[edge.lo] == 0) ||
                         (chosen_deg[edge.hi] == 0 && undecided[edge.hi] == 0);
    if (!strands) visit(k + 1);

    ++undecided[edge.lo];
    ++undecided[edge.hi];
  };
  visit(0);
  std::sort(out.begin(), out.end());
  return out;
}

Residuals is_equilibrium(const WeightedGame& game, const SimplexPoint& point, double tol) {
  Residuals r;
  const auto eff = efficiencies(game, point);
  r.H = expected_payoff(game, point);
  r.F_l1 = field_l1(game, point);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (eff.y[e]) r.y_dev = std::max(r.y_dev, std::abs(*eff.y[e] - r.H));
  }
  r.in_Gamma = r.F_l1 <= tol;
  return r;
}

namespace {

struct Layout {
  std::vector<EdgeId> coordinates;
  std::vector<std::size_t> blocks;
  std::size_t support_dim = 0;
};

Layout layout_for(const WeightedGame& game, const SimplexPoint& point) {
  Layout l;
  const auto sub = support_graph(game, point);
  for (const auto& comp : sub.components) {
    if (comp.edges.empty()) continue;
    l.blocks.push_back(comp.edges.size());
    l.coordinates.insert(l.coordinates.end(), comp.edges.begin(), comp.edges.end());
  }
  l.support_dim = l.coordinates.size();
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (!sub.contains[e]) l.coordinates.push_back(e);
  }
  return l;
}

bool touches(const Edge& e, Vertex v) { return e.lo == v || e.hi == v; }

void require_interior_point(const WeightedGame& game, const SimplexPoint& point) {
  validate_point(game, point, 1e-9);
  if (on_boundary(game, point)) throw Error(ErrorCode::BoundaryPoint, "Jacobian is undefined on the boundary");
}

}  // namespace

Jacobian jacobian_general(const WeightedGame& game, const SimplexPoint& point) {
  require_interior_point(game, point);
  const auto layout = layout_for(game, point);
  const auto mass = vertex_masses(game, point);
  const auto eff = efficiencies(game, point);
  const double H = expected_payoff(game, point);
  const auto& x = point.x;

  const std::size_t m = layout.coordinates.size();
  Jacobian J;
  J.coordinates = layout.coordinates;
  J.blocks = layout.blocks;
  J.support_dim = layout.support_dim;
  J.H = H;
  J.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));

  // dH/dx_e = 4 y_e [x_e > 0] - 2 N_i [x_i > 0] - 2 N_j [x_j > 0]
  std::vector<double> dH(game.edge_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const Edge& edge = game.edge(e);
    double d = eff.y[e] ? 4.0 * *eff.y[e] : 0.0;
    if (eff.N[edge.lo]) d -= 2.0 * *eff.N[edge.lo];
    if (eff.N[edge.hi]) d -= 2.0 * *eff.N[edge.hi];
    dH[e] = d;
  }

  for (std::size_t r = 0; r < m; ++r) {
    const EdgeId row = layout.coordinates[r];
    const Edge& rl = game.edge(row);
    if (!(x[row] > 0.0)) {
      J.matrix(r, r) = -H;
      continue;
    }
    const double yr = *eff.y[row];
    for (std::size_t c = 0; c < m; ++c) {
      const EdgeId col = layout.coordinates[c];
      const Edge& cl = game.edge(col);
      double v = 0.0;
      if (row == col) v += (yr - H) + yr;
      if (touches(cl, rl.lo)) v -= x[row] * yr / mass[rl.lo];
      if (touches(cl, rl.hi)) v -= x[row] * yr / mass[rl.hi];
      v -= x[row] * dH[col];
      J.matrix(r, c) = v;
    }
  }
  return J;
}

Jacobian jacobian(const WeightedGame& game, const SimplexPoint& point, const JacobianOptions& options) {
  require_interior_point(game, point);
  const auto res = is_equilibrium(game, point, options.equilibrium_tol);
  if (!res.in_Gamma) {
    if (!options.allow_non_equilibrium)
      throw Error(ErrorCode::NotAnEquilibrium,
                  "||F||_1 = " + std::to_string(res.F_l1) + " exceeds " + std::to_string(options.equilibrium_tol));
    return jacobian_general(game, point);
  }

  const auto layout = layout_for(game, point);
  const auto mass = vertex_masses(game, point);
  const double H = res.H;
  const auto& x = point.x;
  const std::size_t m = layout.coordinates.size();

  Jacobian J;
  J.coordinates = layout.coordinates;
  J.blocks = layout.blocks;
  J.support_dim = layout.support_dim;
  J.H = H;
  J.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));

  for (std::size_t r = 0; r < m; ++r) {
    const EdgeId row = layout.coordinates[r];
    const Edge& rl = game.edge(row);
    if (r >= layout.support_dim) {
      J.matrix(r, r) = -H;
      continue;
    }
    for (std::size_t c = 0; c < m; ++c) {
      const EdgeId col = layout.coordinates[c];
      const Edge& cl = game.edge(col);
      double v = 0.0;
      if (c < layout.support_dim) {
        if (row == col) {
          v = H * (1.0 - x[col] / mass[cl.lo] - x[col] / mass[cl.hi]);
        } else if (touches(rl, cl.lo)) {
          v = -(x[row] / mass[cl.lo]) * H;
        } else if (touches(rl, cl.hi)) {
          v = -(x[row] / mass[cl.hi]) * H;
        }
      } else {
        // Zero-support column: moving x_ij off zero lowers H by 2H per endpoint in use.
        if (touches(rl, cl.lo)) v -= (x[row] / mass[cl.lo]) * H;
        if (touches(rl, cl.hi)) v -= (x[row] / mass[cl.hi]) * H;
        if (mass[cl.lo] > 0.0) v += 2.0 * x[row] * H;
        if (mass[cl.hi] > 0.0) v += 2.0 * x[row] * H;
      }
      J.matrix(r, c) = v;
    }
  }
  return J;
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::InvalidPoint, "spectrum needs a square matrix");
  std::vector<std::complex<double>> out;
  if (matrix.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalue iteration did not converge");
  const auto& values = solver.eigenvalues();
  out.assign(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

std::string_view to_string(StabilityLabel label) noexcept {
  switch (label) {
    case StabilityLabel::Stable: return "stable";
    case StabilityLabel::Unstable: return "unstable";
    case StabilityLabel::Boundary: return "boundary";
    case StabilityLabel::NotEquilibrium: return "not_equilibrium";
  }
  return "unknown";
}

EquilibriumReport classify(const WeightedGame& game, const SimplexPoint& point, const Tolerances& tols) {
  validate_point(game, point, 1e-9);
  EquilibriumReport report;
  report.support = support_graph(game, point);
  report.property = check_property_P(game, report.support);
  report.residuals = is_equilibrium(game, point, tols.equilibrium);
  report.boundary = on_boundary(game, point);
  if (report.boundary) {
    report.label = StabilityLabel::Boundary;
    return report;
  }
  if (!report.residuals.in_Gamma) {
    report.label = StabilityLabel::NotEquilibrium;
    return report;
  }
  report.jacobian = jacobian(game, point, {false, tols.equilibrium});
  report.spectrum = spectrum(report.jacobian->matrix);
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& z : report.spectrum) max_re = std::max(max_re, z.real());
  report.max_real_part = max_re;
  report.label = max_re <= tols.eigen ? StabilityLabel::Stable : StabilityLabel::Unstable;
  return report;
}

}  // namespace netform
