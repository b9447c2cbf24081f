#include "netform/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <string>

#include "netform/equilibrium.hpp"
#include "netform/meanfield.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netform {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::optional<Vertex> star_center(const WeightedGame& game) {
  for (Vertex v = 0; v < game.vertex_count(); ++v) {
    if (game.degree(v) == game.edge_count()) return v;
  }
  return std::nullopt;
}

bool is_star_with_full_nature(const WeightedGame& game) {
  if (!star_center(game)) return false;
  const auto atoms = game.nature().atoms();
  return atoms.size() == 1 && atoms.front().subset == full_mask(game.vertex_count());
}

Vertex leaf_of(const WeightedGame& game, EdgeId e) {
  const Edge& edge = game.edge(e);
  return game.degree(edge.lo) == 1 && game.degree(edge.hi) != 1 ? edge.lo : edge.hi;
}

std::vector<EdgeId> sorted_unique(std::vector<EdgeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string_view to_string(AnalysisKind kind) noexcept {
  switch (kind) {
    case AnalysisKind::PayoffConvergence: return "payoff_convergence";
    case AnalysisKind::LinearGrowth: return "linear_growth";
    case AnalysisKind::EquilibriumConvergence: return "equilibrium_convergence";
    case AnalysisKind::LimitGraphBasin: return "limit_graph_basin";
    case AnalysisKind::BoundaryExponent: return "boundary_exponent";
  }
  return "unknown";
}

AnalysisKind analysis_from_string(std::string_view name) {
  for (auto kind : {AnalysisKind::PayoffConvergence, AnalysisKind::LinearGrowth,
                    AnalysisKind::EquilibriumConvergence, AnalysisKind::LimitGraphBasin,
                    AnalysisKind::BoundaryExponent}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::ConfigError, "unknown analysis kind '" + std::string(name) + "'");
}

void validate_campaign(const WeightedGame& game, const Campaign& c) {
  if (c.horizon < 1000) throw Error(ErrorCode::InvalidCampaign, "horizon must be at least 1000");
  if (c.replicas == 0) throw Error(ErrorCode::InvalidCampaign, "at least one replica is required");
  const auto w = c.effective_window();
  if (w == 0 || w > c.horizon) throw Error(ErrorCode::InvalidCampaign, "window must lie in [1, horizon]");
  if (!(c.theta >= 0.0)) throw Error(ErrorCode::InvalidCampaign, "theta must be nonnegative");

  if (c.analysis == AnalysisKind::LimitGraphBasin) {
    if (c.targets.empty()) throw Error(ErrorCode::InvalidCampaign, "basin analysis needs target subgraphs");
    for (const auto& t : c.targets) {
      const auto report = check_property_P(game, make_subgraph(game, t));
      if (!report.holds) throw Error(ErrorCode::PropertyPViolated, "target subgraph: " + report.violations.front().detail);
    }
  }
  if (c.analysis == AnalysisKind::BoundaryExponent) {
    if (!c.edge || !c.reference_edge)
      throw Error(ErrorCode::InvalidCampaign, "boundary exponent needs edge and reference_edge");
    if (*c.edge >= game.edge_count() || *c.reference_edge >= game.edge_count())
      throw Error(ErrorCode::UnknownEdge, "exponent edge out of range");
    if (!c.allow_non_star) {
      if (!is_star_with_full_nature(game))
        throw Error(ErrorCode::NotStarGame, "boundary exponent expects a star graph with full nature");
      const double a_ref = game.affinity(*c.reference_edge);
      for (EdgeId e = 0; e < game.edge_count(); ++e) {
        if (game.affinity(e) > a_ref)
          throw Error(ErrorCode::InvalidCampaign, "reference edge must carry the largest affinity");
      }
    }
  }
}

LimitGraph detect_limit_graph(const Trajectory& tail, std::uint64_t window, double theta) {
  if (tail.samples.empty()) throw Error(ErrorCode::WindowTooShort, "empty trajectory");
  const Sample& last = tail.samples.back();
  if (last.counts.empty() || last.x.empty())
    throw Error(ErrorCode::WindowTooShort, "trajectory lacks count or occupation samples");
  if (last.step < window) throw Error(ErrorCode::WindowTooShort, "trajectory shorter than the window");
  const std::uint64_t cutoff = last.step - window;
  const Sample* start = nullptr;
  for (const auto& s : tail.samples) {
    if (s.step <= cutoff && !s.counts.empty()) start = &s;
  }
  if (start == nullptr)
    throw Error(ErrorCode::WindowTooShort, "no sample at least " + std::to_string(window) + " steps before the end");

  LimitGraph g;
  for (EdgeId e = 0; e < last.counts.size(); ++e) {
    if (last.counts[e] <= start->counts[e]) continue;
    if (last.x[e] > theta) {
      g.edges.push_back(e);
    } else {
      g.active_below_threshold.push_back(e);
    }
  }
  return g;
}

ReplicaResult run_replica(const WeightedGame& game, const Campaign& c, std::uint64_t index) {
  ReplicaResult r;
  r.index = index;
  r.seed = c.seed_base + index;

  SimState state = initial_state(game);
  RandomStream rng(r.seed);
  RecorderSchedule schedule = c.recorder;
  schedule.observables = kObsAll;

  const std::uint64_t w = c.effective_window();
  Trajectory traj;
  traj.observables = kObsAll;
  traj.samples.push_back(observe(game, state, kObsAll));
  for (std::uint64_t phase : {c.horizon - w, w}) {
    auto part = run(game, state, phase, rng, schedule);
    traj.samples.insert(traj.samples.end(), std::make_move_iterator(part.samples.begin()),
                        std::make_move_iterator(part.samples.end()));
  }

  std::map<std::uint64_t, double> H_at;
  for (const auto& s : traj.samples) H_at[s.step] = s.H;
  double sup = -1.0;
  for (const auto& [n, h] : H_at) {
    if (n < c.convergence_from || n == 0) continue;
    const auto it = H_at.find(2 * n);
    if (it != H_at.end()) sup = std::max(sup, std::abs(it->second - h));
  }
  if (sup >= 0.0) r.dyadic_sup = sup;

  const SimplexPoint x = occupation(game, state);
  r.steps = state.step;
  r.final_T = state.total;
  r.final_growth = state.total / static_cast<double>(state.step);
  r.final_H = expected_payoff(game, x);
  r.growth_gap = std::abs(r.final_growth - r.final_H);
  r.field_l1 = field_l1(game, x);
  r.counts = state.success_count;
  r.final_x = x.x;
  r.limit_graph = detect_limit_graph(traj, w, c.theta);

  if (c.edge && c.reference_edge) {
    const double log_n = std::log(static_cast<double>(state.step));
    r.exponent = std::log(state.payoff[*c.edge]) / log_n;
    r.reference_exponent = std::log(state.payoff[*c.reference_edge]) / log_n;
    r.leaf_mass = vertex_masses(game, x)[leaf_of(game, *c.edge)];
  }
  return r;
}

std::vector<ReplicaResult> run_replicas(const WeightedGame& game, const Campaign& c, int threads) {
  validate_campaign(game, c);
  std::vector<ReplicaResult> out(c.replicas);
  const auto count = static_cast<std::int64_t>(c.replicas);
  std::exception_ptr failure;
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = run_replica(game, c, static_cast<std::uint64_t>(k));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(netform_replica_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)threads;
  return out;
}

std::vector<ReplicaResult> run_replicas_serial(const WeightedGame& game, const Campaign& c) {
  validate_campaign(game, c);
  std::vector<ReplicaResult> out;
  out.reserve(c.replicas);
  for (std::uint64_t k = 0; k < c.replicas; ++k) out.push_back(run_replica(game, c, k));
  return out;
}

Aggregate aggregate(const WeightedGame& game, const Campaign& c, const std::vector<ReplicaResult>& replicas) {
  Aggregate a;
  a.replicas = replicas.size();
  a.required = static_cast<std::uint64_t>(std::ceil(c.required_fraction * static_cast<double>(a.replicas) - 1e-9));

  std::vector<double> gaps, sups, fields;
  for (const auto& r : replicas) {
    if (r.growth_gap <= c.growth_threshold) ++a.growth_pass;
    if (r.dyadic_sup && *r.dyadic_sup <= c.payoff_threshold) ++a.payoff_pass;
    if (r.field_l1 <= c.field_threshold) ++a.field_pass;
    gaps.push_back(r.growth_gap);
    if (r.dyadic_sup) sups.push_back(*r.dyadic_sup);
    fields.push_back(r.field_l1);
  }
  a.median_growth_gap = median_of(gaps);
  if (!sups.empty()) a.median_dyadic_sup = median_of(sups);
  a.median_field_l1 = median_of(fields);

  switch (c.analysis) {
    case AnalysisKind::PayoffConvergence: a.passed = a.payoff_pass >= a.required; break;
    case AnalysisKind::LinearGrowth: a.passed = a.growth_pass >= a.required; break;
    case AnalysisKind::EquilibriumConvergence: a.passed = a.field_pass >= a.required; break;
    case AnalysisKind::LimitGraphBasin: {
      LimitGraphEstimate est;
      est.window = c.effective_window();
      est.theta = c.theta;
      for (const auto& t : c.targets) est.targets.push_back({sorted_unique(t), 0, 0.0, 0.0});
      std::uint64_t matched = 0;
      for (const auto& r : replicas) {
        est.per_replica.push_back(r.limit_graph);
        for (auto& t : est.targets) {
          if (t.edges == r.limit_graph.edges) {
            ++t.hits;
            ++matched;
            break;
          }
        }
      }
      const double n = static_cast<double>(replicas.size());
      bool each_positive = true;
      for (auto& t : est.targets) {
        t.frequency = static_cast<double>(t.hits) / n;
        t.std_error = std::sqrt(t.frequency * (1.0 - t.frequency) / n);
        est.combined_frequency += t.frequency;
        each_positive = each_positive && t.hits > 0;
      }
      est.undetermined = replicas.size() - matched;
      a.passed = each_positive && est.combined_frequency >= c.basin_min_frequency;
      a.basin = std::move(est);
      break;
    }
    case AnalysisKind::BoundaryExponent: {
      ExponentEstimate est;
      est.reference_edge = *c.reference_edge;
      est.edge = *c.edge;
      est.predicted = game.affinity(*c.edge) / game.affinity(*c.reference_edge);
      for (const auto& r : replicas) {
        est.per_replica.push_back(r.exponent.value_or(std::numeric_limits<double>::quiet_NaN()));
        est.leaf_mass.push_back(r.leaf_mass.value_or(std::numeric_limits<double>::quiet_NaN()));
        if (r.leaf_mass && *r.leaf_mass < c.leaf_mass_threshold) ++est.leaf_mass_pass;
      }
      est.median = median_of(est.per_replica);
      const bool band = std::abs(est.median - est.predicted) <= c.exponent_band;
      // Leaves only fall out of use when their affinity is strictly smaller.
      const bool leaf_ok = est.predicted >= 1.0 || est.leaf_mass_pass >= a.required;
      a.passed = band && leaf_ok;
      a.exponent = std::move(est);
      break;
    }
  }
  return a;
}

CampaignReport run_campaign(const WeightedGame& game, const Campaign& campaign, int threads) {
  CampaignReport report;
  report.campaign = campaign;
  report.replicas = run_replicas(game, campaign, threads);
  report.aggregate = aggregate(game, campaign, report.replicas);
  return report;
}

LimitGraphEstimate basin_frequency(const WeightedGame& game, const std::vector<std::vector<EdgeId>>& targets,
                                   std::uint64_t replicas, std::uint64_t horizon, std::uint64_t seed,
                                   int threads) {
  Campaign c;
  c.analysis = AnalysisKind::LimitGraphBasin;
  c.targets = targets;
  c.replicas = replicas;
  c.horizon = horizon;
  c.seed_base = seed;
  c.recorder.every = std::max<std::uint64_t>(horizon / 1000, 1);
  return *run_campaign(game, c, threads).aggregate.basin;
}

ExponentEstimate boundary_exponent(const WeightedGame& game, EdgeId reference_edge, EdgeId edge,
                                   std::uint64_t replicas, std::uint64_t horizon, std::uint64_t seed, int threads,
                                   bool allow_non_star) {
  Campaign c;
  c.analysis = AnalysisKind::BoundaryExponent;
  c.reference_edge = reference_edge;
  c.edge = edge;
  c.allow_non_star = allow_non_star;
  c.replicas = replicas;
  c.horizon = horizon;
  c.seed_base = seed;
  c.recorder.every = std::max<std::uint64_t>(horizon / 1000, 1);
  return *run_campaign(game, c, threads).aggregate.exponent;
}

}  // namespace netform
