#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netform/network_model.hpp"
#include "netform/simplex.hpp"

namespace netform {

// --- support graphs and property P ----------------------------------------

struct Component {
  std::vector<Vertex> vertices;  // ascending
  std::vector<EdgeId> edges;     // ascending edge ids

  friend bool operator==(const Component&, const Component&) = default;
};

/// A subgraph of the game graph on all vertices. Components are ordered by
/// their smallest vertex; isolated vertices are singleton components.
struct SupportGraph {
  std::vector<bool> contains;  // per edge id
  std::vector<EdgeId> edges;   // ascending
  std::vector<std::size_t> component_of;
  std::vector<Component> components;

  friend bool operator==(const SupportGraph&, const SupportGraph&) = default;
};

/// Subgraph spanned by the given edge ids (duplicates ignored).
SupportGraph make_subgraph(const WeightedGame& game, std::span<const EdgeId> edges);

/// G_x: edges with x_ij > 0 (exact-zero threshold).
SupportGraph support_graph(const WeightedGame& game, const SimplexPoint& point);

enum class PCondition { Balance = 1, Star = 2, Coverage = 3 };

struct PViolation {
  PCondition condition = PCondition::Balance;
  std::size_t where = 0;  // component index for Balance/Star, vertex for Coverage
  std::string detail;
};

struct PropertyPReport {
  bool holds = false;
  std::vector<PViolation> violations;
  std::vector<Vertex> nuclei;         // one per component, in component order (only when holds)
  std::vector<Vertex> nucleus_of;     // projection: vertex -> nucleus of its component (only when holds)
};

/// Relative tolerance used when comparing a_ij p_ij values for the balance condition.
inline constexpr double kBalanceTol = 1e-12;

PropertyPReport check_property_P(const WeightedGame& game, const SupportGraph& subgraph);

// --- stable equilibrium families ------------------------------------------

struct SatelliteSplit {
  enum class Kind { Equal, Dirichlet, Explicit };
  Kind kind = Kind::Equal;
  std::uint64_t seed = 0;        // Dirichlet
  std::vector<double> weights;  // Explicit: per game edge id, positive on the subgraph

  static SatelliteSplit equal() { return {}; }
  static SatelliteSplit dirichlet(std::uint64_t seed) { return {Kind::Dirichlet, seed, {}}; }
  static SatelliteSplit explicit_weights(std::vector<double> w) { return {Kind::Explicit, 0, std::move(w)}; }
};

/// A point of the stable family with support `subgraph`: each nucleus carries
/// mass (ap)_i / (2 sum_j (ap)_j), split over its satellites per `split`.
/// Throws PropertyPViolated or NonpositiveSplit.
SimplexPoint gamma_G_point(const WeightedGame& game, const SupportGraph& subgraph, const SatelliteSplit& split);

/// True when P holds for G_x and every nucleus mass matches the closed form within tol.
bool in_gamma_G(const WeightedGame& game, const SimplexPoint& point, double tol = 1e-9);

/// All subgraphs satisfying P, as ascending edge-id lists in lexicographic
/// order. Throws TooLarge for more than 16 vertices.
std::vector<std::vector<EdgeId>> enumerate_stable_graphs(const WeightedGame& game);

// --- equilibria, Jacobian, spectrum ---------------------------------------

struct Tolerances {
  double equilibrium = 1e-9;  // on ||F||_1
  double eigen = 1e-9;        // on the max real part
};

struct Residuals {
  double F_l1 = 0.0;          // ||F(x)||_1 over ordered pairs
  double y_dev = 0.0;         // max |y_e - H| over support edges
  double H = 0.0;
  bool in_Gamma = false;
};

Residuals is_equilibrium(const WeightedGame& game, const SimplexPoint& point, double tol = 1e-9);

/// Dense Jacobian over unordered-edge coordinates: rows are F components,
/// columns are x coordinates. Support edges come first, grouped by support
/// component; zero-support edges last.
struct Jacobian {
  Eigen::MatrixXd matrix;
  std::vector<EdgeId> coordinates;   // edge id per row/column
  std::vector<std::size_t> blocks;   // sizes of the support blocks, in order
  std::size_t support_dim = 0;
  double H = 0.0;
};

struct JacobianOptions {
  /// Permits non-equilibrium interior points (general derivative formula).
  /// Outside the equilibrium set the stability reading no longer applies.
  bool allow_non_equilibrium = false;
  double equilibrium_tol = 1e-9;
};

/// Throws BoundaryPoint, or NotAnEquilibrium unless overridden.
Jacobian jacobian(const WeightedGame& game, const SimplexPoint& point, const JacobianOptions& options = {});

/// Derivative of F at any interior point, same coordinate order as `jacobian`.
Jacobian jacobian_general(const WeightedGame& game, const SimplexPoint& point);

/// All eigenvalues, sorted by decreasing real part then decreasing imaginary part.
/// Throws NoConvergence.
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& matrix);

enum class StabilityLabel { Stable, Unstable, Boundary, NotEquilibrium };

std::string_view to_string(StabilityLabel label) noexcept;

struct EquilibriumReport {
  Residuals residuals;
  bool boundary = false;
  StabilityLabel label = StabilityLabel::NotEquilibrium;
  std::optional<Jacobian> jacobian;
  std::vector<std::complex<double>> spectrum;
  std::optional<double> max_real_part;
  SupportGraph support;
  PropertyPReport property;
};

EquilibriumReport classify(const WeightedGame& game, const SimplexPoint& point, const Tolerances& tols = {});

}  // namespace netform
