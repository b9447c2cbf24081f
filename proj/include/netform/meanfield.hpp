#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "netform/network_model.hpp"
#include "netform/simplex.hpp"

namespace netform {

// All maps below are indexed by edge id (or vertex for N). A coordinate counts
// as zero iff it is exactly 0.0; quantities that divide by x_ij or x_i are only
// defined on the positive support.

/// H(x) = sum over ordered pairs with x_ij > 0 of a_ij p_ij x_ij^2 / (x_i x_j).
double expected_payoff(const WeightedGame& game, const SimplexPoint& point);

struct Efficiencies {
  std::vector<std::optional<double>> y;  // per edge, defined where x_ij > 0
  std::vector<std::optional<double>> N;  // per vertex, defined where x_i > 0
  bool boundary = false;                 // point lies on the boundary of the simplex

  /// Edges and vertices where the values are undefined.
  std::vector<EdgeId> undefined_edges() const;
  std::vector<Vertex> undefined_vertices() const;
};

/// Edge efficiencies y_ij = a_ij p_ij x_ij / (x_i x_j) and vertex efficiencies
/// N_i = sum_k (x_ik / x_i) y_ik. Never throws on boundary points; the
/// undefined entries are left empty and `boundary` is set.
Efficiencies efficiencies(const WeightedGame& game, const SimplexPoint& point);

/// Both closed forms of the dissipation, evaluated independently.
struct DissipationForms {
  double pairwise = 0.0;  // sum_{i,j,k} (x_ij x_ik / x_i) (y_ij - y_ik)^2
  double variance = 0.0;  // 2 sum_{i,j} x_ij (y_ij - N_i)^2
};

DissipationForms dissipation_forms(const WeightedGame& game, const SimplexPoint& point);

/// p(x) = grad H . F (x). Throws BoundaryPoint on the boundary, and
/// InternalInconsistency if the two closed forms disagree beyond 1e-10 relative.
double dissipation(const WeightedGame& game, const SimplexPoint& point);

/// F_ij = x_ij (y_ij - H(x)) on the positive support, 0 elsewhere.
std::vector<double> vector_field(const WeightedGame& game, const SimplexPoint& point);

/// ||F(x)||_1 over ordered pairs.
double field_l1(const WeightedGame& game, const SimplexPoint& point);

/// G_ij = y_ij (y_ij - N_i - N_j + H) on positive-support edges; empty elsewhere.
/// Throws BoundaryPoint.
std::vector<std::optional<double>> efficiency_field(const WeightedGame& game, const SimplexPoint& point);

/// Everything at once for interior points.
struct FieldValues {
  double H = 0.0;
  std::vector<double> y;  // 0 where x_ij = 0
  std::vector<double> N;  // 0 where x_i = 0
  double p = 0.0;
  double p_variance_form = 0.0;
  std::vector<double> F;
  std::vector<double> G;  // 0 where x_ij = 0

  friend bool operator==(const FieldValues&, const FieldValues&) = default;
};

/// Throws BoundaryPoint.
FieldValues field_values(const WeightedGame& game, const SimplexPoint& point);

/// Evaluates many points; OpenMP-parallel over points. `threads` <= 0 uses the runtime default.
std::vector<FieldValues> evaluate_batch(const WeightedGame& game, std::span<const SimplexPoint> points,
                                        int threads = 0);
/// Serial reference for evaluate_batch.
std::vector<FieldValues> evaluate_batch_serial(const WeightedGame& game, std::span<const SimplexPoint> points);

// --- ODE integration ------------------------------------------------------

enum class OdeMethod { Euler, Rk4 };

struct OdeOptions {
  double duration = 1.0;
  double step_size = 1e-3;
  OdeMethod method = OdeMethod::Rk4;
  std::size_t sample_every = 1;  // record every k-th step (the final step is always recorded)
};

inline constexpr double kMaxRenormDrift = 1e-9;
inline constexpr double kMonotonicityTol = 1e-7;

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<SimplexPoint> points;
  std::vector<double> H;
  std::size_t steps = 0;
  /// Steps where H dropped by more than kMonotonicityTol.
  std::size_t monotonicity_violations = 0;
  /// Largest single-step decrease of H (0 if H never decreased).
  double max_H_drop = 0.0;
  double max_renorm_drift = 0.0;
  double max_step_displacement = 0.0;  // L_inf over coordinates
};

/// Integrates dx/dt = F(x) from x0. After each step negative components are
/// clamped to zero and the point is renormalized; a renormalization larger
/// than kMaxRenormDrift raises StepSizeTooLarge. The start point is recorded at t = 0.
OdeTrajectory integrate(const WeightedGame& game, const SimplexPoint& x0, const OdeOptions& options);

}  // namespace netform
