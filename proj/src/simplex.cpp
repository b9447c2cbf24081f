#include "netform/simplex.hpp"

#include <cmath>
#include <string>

namespace netform {

double ordered_sum(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v;
  return 2.0 * s;
}

std::vector<double> vertex_masses(const WeightedGame& game, const SimplexPoint& point) {
  std::vector<double> mass(game.vertex_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const auto& edge = game.edge(e);
    mass[edge.lo] += point.x[e];
    mass[edge.hi] += point.x[e];
  }
  return mass;
}

double live_mass(const WeightedGame& game, const SimplexPoint& point) {
  double s = 0.0;
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (game.is_live(e)) s += point.x[e];
  }
  return 2.0 * s;
}

bool on_boundary(const WeightedGame& game, const SimplexPoint& point) {
  std::vector<double> live(game.vertex_count(), 0.0);
  std::vector<bool> has_live(game.vertex_count(), false);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (!game.is_live(e)) continue;
    const auto& edge = game.edge(e);
    has_live[edge.lo] = has_live[edge.hi] = true;
    live[edge.lo] += point.x[e];
    live[edge.hi] += point.x[e];
  }
  for (std::size_t v = 0; v < game.vertex_count(); ++v) {
    if (has_live[v] && live[v] == 0.0) return true;
  }
  return false;
}

void validate_point(const WeightedGame& game, const SimplexPoint& point, double tol) {
  if (point.x.size() != game.edge_count())
    throw Error(ErrorCode::InvalidPoint, "point has " + std::to_string(point.x.size()) + " coordinates, game has " +
                                             std::to_string(game.edge_count()) + " edges");
  for (double v : point.x) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidPoint, "coordinates must be finite and nonnegative");
  }
  const double s = ordered_sum(point.x);
  if (std::abs(s - 1.0) > tol)
    throw Error(ErrorCode::InvalidPoint, "ordered sum is " + std::to_string(s) + ", expected 1");
}

SimplexPoint uniform_point(const WeightedGame& game) {
  return {std::vector<double>(game.edge_count(), 1.0 / (2.0 * static_cast<double>(game.edge_count())))};
}

void renormalize(SimplexPoint& point) {
  const double s = ordered_sum(point.x);
  for (double& v : point.x) v /= s;
}

}  // namespace netform
