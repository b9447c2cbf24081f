#include "netform/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netform {

namespace {

// Masses, efficiencies and H over the positive support. Negative entries
// (possible in intermediate Runge-Kutta stages) are treated like zeros.
struct Core {
  std::vector<double> mass;
  std::vector<double> y;
  double H = 0.0;
};

Core evaluate_core(const WeightedGame& game, std::span<const double> x) {
  Core c;
  c.mass.assign(game.vertex_count(), 0.0);
  c.y.assign(game.edge_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (x[e] > 0.0) {
      const auto& edge = game.edge(e);
      c.mass[edge.lo] += x[e];
      c.mass[edge.hi] += x[e];
    }
  }
  double half = 0.0;
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (x[e] > 0.0) {
      const auto& edge = game.edge(e);
      c.y[e] = game.ap(e) * x[e] / (c.mass[edge.lo] * c.mass[edge.hi]);
      half += x[e] * c.y[e];
    }
  }
  c.H = 2.0 * half;
  return c;
}

std::vector<double> vertex_efficiency(const WeightedGame& game, std::span<const double> x, const Core& c) {
  std::vector<double> n(game.vertex_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (x[e] > 0.0) {
      const auto& edge = game.edge(e);
      n[edge.lo] += x[e] * c.y[e];
      n[edge.hi] += x[e] * c.y[e];
    }
  }
  for (std::size_t v = 0; v < n.size(); ++v) {
    if (c.mass[v] > 0.0) n[v] /= c.mass[v];
  }
  return n;
}

DissipationForms dissipation_from(const WeightedGame& game, std::span<const double> x, const Core& c,
                                  std::span<const double> n) {
  DissipationForms d;
  for (Vertex v = 0; v < game.vertex_count(); ++v) {
    if (!(c.mass[v] > 0.0)) continue;
    const auto inc = game.incident(v);
    double pair_sum = 0.0;
    for (std::size_t a = 0; a < inc.size(); ++a) {
      const EdgeId ea = inc[a].edge;
      if (!(x[ea] > 0.0)) continue;
      const double dev = c.y[ea] - n[v];
      d.variance += x[ea] * dev * dev;
      for (std::size_t b = a + 1; b < inc.size(); ++b) {
        const EdgeId eb = inc[b].edge;
        if (!(x[eb] > 0.0)) continue;
        const double diff = c.y[ea] - c.y[eb];
        pair_sum += x[ea] * x[eb] * diff * diff;
      }
    }
    // (j,k) and (k,j) both appear in the ordered sum.
    d.pairwise += 2.0 * pair_sum / c.mass[v];
  }
  d.variance *= 2.0;
  return d;
}

void check_dimension(const WeightedGame& game, const SimplexPoint& point) {
  if (point.x.size() != game.edge_count())
    throw Error(ErrorCode::InvalidPoint, "point dimension " + std::to_string(point.x.size()) +
                                             " does not match edge count " + std::to_string(game.edge_count()));
}

void require_interior(const WeightedGame& game, const SimplexPoint& point) {
  check_dimension(game, point);
  if (on_boundary(game, point)) throw Error(ErrorCode::BoundaryPoint, "point lies on the simplex boundary");
}

bool forms_agree(const DissipationForms& d, double H) {
  const double scale = std::max({std::abs(d.pairwise), std::abs(d.variance), 1e-10 * H * H});
  return std::abs(d.pairwise - d.variance) <= 1e-10 * scale;
}

std::vector<double> field_from(std::span<const double> x, const Core& c) {
  std::vector<double> f(x.size(), 0.0);
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (x[e] > 0.0) f[e] = x[e] * (c.y[e] - c.H);
  }
  return f;
}

}  // namespace

std::vector<EdgeId> Efficiencies::undefined_edges() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < y.size(); ++e) {
    if (!y[e]) out.push_back(e);
  }
  return out;
}

std::vector<Vertex> Efficiencies::undefined_vertices() const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < N.size(); ++v) {
    if (!N[v]) out.push_back(v);
  }
  return out;
}

double expected_payoff(const WeightedGame& game, const SimplexPoint& point) {
  check_dimension(game, point);
  return evaluate_core(game, point.x).H;
}

Efficiencies efficiencies(const WeightedGame& game, const SimplexPoint& point) {
  check_dimension(game, point);
  const Core c = evaluate_core(game, point.x);
  const auto n = vertex_efficiency(game, point.x, c);
  Efficiencies out;
  out.y.resize(game.edge_count());
  out.N.resize(game.vertex_count());
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (point.x[e] > 0.0) out.y[e] = c.y[e];
  }
  for (Vertex v = 0; v < game.vertex_count(); ++v) {
    if (c.mass[v] > 0.0) out.N[v] = n[v];
  }
  out.boundary = on_boundary(game, point);
  return out;
}

DissipationForms dissipation_forms(const WeightedGame& game, const SimplexPoint& point) {
  require_interior(game, point);
  const Core c = evaluate_core(game, point.x);
  const auto n = vertex_efficiency(game, point.x, c);
  return dissipation_from(game, point.x, c, n);
}

double dissipation(const WeightedGame& game, const SimplexPoint& point) {
  require_interior(game, point);
  const Core c = evaluate_core(game, point.x);
  const auto n = vertex_efficiency(game, point.x, c);
  const auto d = dissipation_from(game, point.x, c, n);
  if (!forms_agree(d, c.H))
    throw Error(ErrorCode::InternalInconsistency, "dissipation forms disagree: " + std::to_string(d.pairwise) +
                                                      " vs " + std::to_string(d.variance));
  return d.pairwise;
}

std::vector<double> vector_field(const WeightedGame& game, const SimplexPoint& point) {
  check_dimension(game, point);
  return field_from(point.x, evaluate_core(game, point.x));
}

double field_l1(const WeightedGame& game, const SimplexPoint& point) {
  double s = 0.0;
  for (double f : vector_field(game, point)) s += std::abs(f);
  return 2.0 * s;
}

std::vector<std::optional<double>> efficiency_field(const WeightedGame& game, const SimplexPoint& point) {
  require_interior(game, point);
  const Core c = evaluate_core(game, point.x);
  const auto n = vertex_efficiency(game, point.x, c);
  std::vector<std::optional<double>> g(game.edge_count());
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (!(point.x[e] > 0.0)) continue;
    const auto& edge = game.edge(e);
    g[e] = c.y[e] * (c.y[e] - n[edge.lo] - n[edge.hi] + c.H);
  }
  return g;
}

FieldValues field_values(const WeightedGame& game, const SimplexPoint& point) {
  require_interior(game, point);
  const Core c = evaluate_core(game, point.x);
  FieldValues fv;
  fv.H = c.H;
  fv.y = c.y;
  fv.N = vertex_efficiency(game, point.x, c);
  const auto d = dissipation_from(game, point.x, c, fv.N);
  if (!forms_agree(d, c.H))
    throw Error(ErrorCode::InternalInconsistency, "dissipation forms disagree");
  fv.p = d.pairwise;
  fv.p_variance_form = d.variance;
  fv.F = field_from(point.x, c);
  fv.G.assign(game.edge_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    if (!(point.x[e] > 0.0)) continue;
    const auto& edge = game.edge(e);
    fv.G[e] = c.y[e] * (c.y[e] - fv.N[edge.lo] - fv.N[edge.hi] + c.H);
  }
  return fv;
}

std::vector<FieldValues> evaluate_batch(const WeightedGame& game, std::span<const SimplexPoint> points,
                                        int threads) {
  std::vector<FieldValues> out(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
  // Exceptions cannot cross the parallel region; stash the first one.
  std::exception_ptr failure;
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      out[k] = field_values(game, points[k]);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(netform_batch_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)threads;
  return out;
}

std::vector<FieldValues> evaluate_batch_serial(const WeightedGame& game, std::span<const SimplexPoint> points) {
  std::vector<FieldValues> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(field_values(game, p));
  return out;
}

namespace {

std::vector<double> field_at(const WeightedGame& game, std::span<const double> x) {
  return field_from(x, evaluate_core(game, x));
}

std::vector<double> axpy(std::span<const double> x, double h, std::span<const double> k) {
  std::vector<double> out(x.size());
  for (std::size_t e = 0; e < x.size(); ++e) out[e] = x[e] + h * k[e];
  return out;
}

}  // namespace

OdeTrajectory integrate(const WeightedGame& game, const SimplexPoint& x0, const OdeOptions& options) {
  try {
    validate_point(game, x0);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidStart, e.what());
  }
  if (!(options.step_size > 0.0) || !std::isfinite(options.step_size))
    throw Error(ErrorCode::InvalidStart, "step size must be positive");
  if (!(options.duration >= 0.0) || !std::isfinite(options.duration))
    throw Error(ErrorCode::InvalidStart, "duration must be nonnegative");
  const std::size_t every = std::max<std::size_t>(options.sample_every, 1);

  const double h = options.step_size;
  const auto steps = static_cast<std::size_t>(std::ceil(options.duration / h * (1.0 - 1e-12)));

  OdeTrajectory traj;
  traj.steps = steps;
  std::vector<double> x = x0.x;
  double H = evaluate_core(game, x).H;
  traj.times.push_back(0.0);
  traj.points.push_back(x0);
  traj.H.push_back(H);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const double t1 = (k + 1 == steps) ? options.duration : static_cast<double>(k + 1) * h;
    const double dt = t1 - t0;

    std::vector<double> next;
    if (options.method == OdeMethod::Euler) {
      next = axpy(x, dt, field_at(game, x));
    } else {
      const auto k1 = field_at(game, x);
      const auto k2 = field_at(game, axpy(x, dt / 2.0, k1));
      const auto k3 = field_at(game, axpy(x, dt / 2.0, k2));
      const auto k4 = field_at(game, axpy(x, dt, k3));
      next.resize(x.size());
      for (std::size_t e = 0; e < x.size(); ++e)
        next[e] = x[e] + dt / 6.0 * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
    }

    for (double& v : next) v = std::max(v, 0.0);
    const double s = ordered_sum(next);
    const double drift = std::abs(s - 1.0);
    traj.max_renorm_drift = std::max(traj.max_renorm_drift, drift);
    if (!(drift < kMaxRenormDrift))
      throw Error(ErrorCode::StepSizeTooLarge,
                  "renormalization drift " + std::to_string(drift) + " at t = " + std::to_string(t1));
    for (double& v : next) v /= s;

    for (std::size_t e = 0; e < x.size(); ++e)
      traj.max_step_displacement = std::max(traj.max_step_displacement, std::abs(next[e] - x[e]));
    x = std::move(next);

    const double H_next = evaluate_core(game, x).H;
    const double drop = H - H_next;
    if (drop > 0.0) traj.max_H_drop = std::max(traj.max_H_drop, drop);
    if (drop > kMonotonicityTol) ++traj.monotonicity_violations;
    H = H_next;

    if ((k + 1) % every == 0 || k + 1 == steps) {
      traj.times.push_back(t1);
      traj.points.push_back({x});
      traj.H.push_back(H);
    }
  }
  return traj;
}

}  // namespace netform
