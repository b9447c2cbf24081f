#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library's derivative or eigen code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netform/equilibrium.hpp"
#include "netform/meanfield.hpp"
#include "netform/network_model.hpp"
#include "netform/rng.hpp"
#include "netform/simplex.hpp"

namespace oracle {

using netform::EdgeId;
using netform::SimplexPoint;
using netform::WeightedGame;

/// H with x_ij and x_ji as independent variables and x_i taken as row sums.
inline double H_ordered(const WeightedGame& g, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd row = X.rowwise().sum();
  double h = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edge(e);
    if (X(i, j) > 0.0) h += g.ap(e) * X(i, j) * X(i, j) / (row(i) * row(j));
    if (X(j, i) > 0.0) h += g.ap(e) * X(j, i) * X(j, i) / (row(j) * row(i));
  }
  return h;
}

inline Eigen::MatrixXd ordered_matrix(const WeightedGame& g, const SimplexPoint& p) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edge(e);
    X(i, j) = X(j, i) = p.x[e];
  }
  return X;
}

/// Central-difference gradient of H over ordered coordinates, dotted with F.
inline double lyapunov_fd(const WeightedGame& g, const SimplexPoint& p, double h = 1e-6) {
  const Eigen::MatrixXd X = ordered_matrix(g, p);
  const auto F = netform::vector_field(g, p);
  double dot = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edge(e);
    for (auto [r, c] : {std::pair{i, j}, std::pair{j, i}}) {
      Eigen::MatrixXd up = X, dn = X;
      up(r, c) += h;
      dn(r, c) -= h;
      dot += (H_ordered(g, up) - H_ordered(g, dn)) / (2.0 * h) * F[e];
    }
  }
  return dot;
}

/// Direct transcription of the pairwise dissipation sum over vertex triples.
inline double dissipation_direct(const WeightedGame& g, const SimplexPoint& p) {
  const auto m = netform::vertex_masses(g, p);
  auto y = [&](EdgeId e) {
    const auto [i, j] = g.edge(e);
    return g.ap(e) * p.x[e] / (m[i] * m[j]);
  };
  double s = 0.0;
  for (netform::Vertex i = 0; i < g.vertex_count(); ++i) {
    for (const auto& a : g.incident(i)) {
      for (const auto& b : g.incident(i)) {
        if (p.x[a.edge] > 0.0 && p.x[b.edge] > 0.0) {
          const double d = y(a.edge) - y(b.edge);
          s += p.x[a.edge] * p.x[b.edge] / m[i] * d * d;
        }
      }
    }
  }
  return s;
}

/// dF/dx by finite differences in the Jacobian's coordinate order: central on
/// positive coordinates, second-order one-sided on zero coordinates.
inline Eigen::MatrixXd jacobian_fd(const WeightedGame& g, const SimplexPoint& p,
                                   const std::vector<EdgeId>& coords, double h = 1e-6) {
  const auto d = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd J(d, d);
  auto F_at = [&](EdgeId col, double delta) {
    SimplexPoint q = p;
    q.x[col] += delta;
    return netform::vector_field(g, q);
  };
  for (Eigen::Index c = 0; c < d; ++c) {
    const EdgeId col = coords[c];
    std::vector<double> dF(g.edge_count());
    if (p.x[col] > 0.0) {
      const double step = std::min(h, 0.5 * p.x[col]);
      const auto up = F_at(col, step), dn = F_at(col, -step);
      for (EdgeId e = 0; e < g.edge_count(); ++e) dF[e] = (up[e] - dn[e]) / (2.0 * step);
    } else {
      const auto f0 = F_at(col, 0.0), f1 = F_at(col, h), f2 = F_at(col, 2.0 * h);
      for (EdgeId e = 0; e < g.edge_count(); ++e) dF[e] = (-3.0 * f0[e] + 4.0 * f1[e] - f2[e]) / (2.0 * h);
    }
    for (Eigen::Index r = 0; r < d; ++r) J(r, c) = dF[coords[r]];
  }
  return J;
}

/// Eigenvalues at an equilibrium through the symmetric factorization A = diag(x) M
/// on the support block, plus -H for each zero coordinate. Ascending.
inline std::optional<std::vector<double>> equilibrium_spectrum_symmetric(const WeightedGame& g,
                                                                         const SimplexPoint& p,
                                                                         const netform::Jacobian& J) {
  const auto s = static_cast<Eigen::Index>(J.support_dim);
  Eigen::MatrixXd M(s, s);
  Eigen::VectorXd root(s);
  for (Eigen::Index r = 0; r < s; ++r) {
    const double xr = p.x[J.coordinates[r]];
    root(r) = std::sqrt(xr);
    for (Eigen::Index c = 0; c < s; ++c) M(r, c) = J.matrix(r, c) / xr;
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, M.cwiseAbs().maxCoeff())) return std::nullopt;
  const Eigen::MatrixXd S = root.asDiagonal() * (0.5 * (M + M.transpose())) * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + s);
  for (Eigen::Index k = s; k < J.matrix.rows(); ++k) out.push_back(-J.H);
  std::sort(out.begin(), out.end());
  return out;
}

/// Interior equilibrium with support exactly `support`, by damped Gauss-Newton
/// on y_e = H in log coordinates. Returns nothing when the iteration leaves the
/// support or fails to converge.
inline std::optional<SimplexPoint> solve_equilibrium(const WeightedGame& g, const std::vector<EdgeId>& support,
                                                     netform::RandomStream& rng, int max_iter = 200) {
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k == 0) return std::nullopt;
  Eigen::VectorXd z(k);
  for (Eigen::Index a = 0; a < k; ++a) z(a) = 2.0 * rng.uniform() - 1.0;

  auto point_of = [&](const Eigen::VectorXd& zz) {
    SimplexPoint p;
    p.x.assign(g.edge_count(), 0.0);
    const double top = zz.maxCoeff();
    double total = 0.0;
    for (Eigen::Index a = 0; a < k; ++a) total += std::exp(zz(a) - top);
    for (Eigen::Index a = 0; a < k; ++a) p.x[support[a]] = std::exp(zz(a) - top) / (2.0 * total);
    return p;
  };
  auto residual = [&](const Eigen::VectorXd& zz) {
    const SimplexPoint p = point_of(zz);
    const auto m = netform::vertex_masses(g, p);
    double H = 0.0;
    Eigen::VectorXd y(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto [i, j] = g.edge(support[a]);
      y(a) = g.ap(support[a]) * p.x[support[a]] / (m[i] * m[j]);
      H += 2.0 * p.x[support[a]] * y(a);
    }
    return Eigen::VectorXd((y.array() - H).matrix());
  };

  Eigen::VectorXd r = residual(z);
  for (int it = 0; it < max_iter && r.lpNorm<Eigen::Infinity>() > 1e-14; ++it) {
    Eigen::MatrixXd Jr(k, k);
    const double h = 1e-7;
    for (Eigen::Index a = 0; a < k; ++a) {
      Eigen::VectorXd up = z, dn = z;
      up(a) += h;
      dn(a) -= h;
      Jr.col(a) = (residual(up) - residual(dn)) / (2.0 * h);
    }
    const Eigen::VectorXd dz = -Jr.completeOrthogonalDecomposition().solve(r);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      const Eigen::VectorXd cand = z + t * dz;
      const Eigen::VectorXd rc = residual(cand);
      if (rc.norm() < r.norm()) {
        z = cand;
        r = rc;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (z.maxCoeff() - z.minCoeff() > 40.0) return std::nullopt;  // drifting to the boundary of the support
  }
  SimplexPoint p = point_of(z);
  for (EdgeId e : support) {
    if (!(p.x[e] > 1e-9)) return std::nullopt;
  }
  if (netform::on_boundary(g, p)) return std::nullopt;
  if (netform::field_l1(g, p) > 1e-12) return std::nullopt;
  return p;
}

}  // namespace oracle
