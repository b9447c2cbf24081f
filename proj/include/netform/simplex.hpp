#pragma once

#include <span>
#include <vector>

#include "netform/network_model.hpp"

namespace netform {

/// Occupation measure on the simplex, one value per edge id.
///
/// `x[e]` is the ordered-pair value x_ij (= x_ji) for edge e = {i,j}, so the
/// ordered sum is 2 * sum(x). Non-edges are implicitly zero.
struct SimplexPoint {
  std::vector<double> x;

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;
};

inline constexpr double kSimplexTol = 1e-12;

/// Sum over ordered pairs, i.e. 2 * sum over edges.
double ordered_sum(std::span<const double> x) noexcept;

/// x_i = sum_{j ~ i} x_ij.
std::vector<double> vertex_masses(const WeightedGame& game, const SimplexPoint& point);

/// Mass carried by edges with a_ij p_ij > 0, over ordered pairs.
double live_mass(const WeightedGame& game, const SimplexPoint& point);

/// Some vertex with a live incident edge has no live occupation.
bool on_boundary(const WeightedGame& game, const SimplexPoint& point);

/// Throws InvalidPoint unless the point has the game's dimension, nonnegative
/// finite entries and ordered sum within `tol` of one.
void validate_point(const WeightedGame& game, const SimplexPoint& point, double tol = kSimplexTol);

/// Equal mass on every edge.
SimplexPoint uniform_point(const WeightedGame& game);

/// Rescales so that the ordered sum is exactly representable as one (up to rounding).
void renormalize(SimplexPoint& point);

}  // namespace netform
