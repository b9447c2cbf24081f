#include "netform/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netform/meanfield.hpp"

namespace netform {

namespace {

void sample_into(const WeightedGame& game, const SimState& state, RandomStream& rng, RoundRecord& round) {
  const std::size_t n = game.vertex_count();
  round.choice.assign(n, RoundRecord::kNoChoice);
  round.communicating.clear();

  for (Vertex v = 0; v < n; ++v) {
    const auto inc = game.incident(v);
    if (inc.empty()) continue;
    const double threshold = rng.uniform() * state.vertex_total[v];
    double acc = 0.0;
    EdgeId chosen = inc.back().edge;
    for (const auto& link : inc) {
      acc += state.payoff[link.edge];
      if (threshold < acc) {
        chosen = link.edge;
        break;
      }
    }
    round.choice[v] = chosen;
  }

  const auto& nature = game.nature();
  round.nature_subset = nature.atoms()[nature.sample_index(rng.uniform())].subset;

  for (Vertex v = 0; v < n; ++v) {
    const EdgeId e = round.choice[v];
    if (e == RoundRecord::kNoChoice) continue;
    const Edge& edge = game.edge(e);
    if (edge.lo != v) continue;  // examine each mutual pair once, from its lower end
    if (round.choice[edge.hi] != e) continue;
    const VertexMask both = vertex_bit(edge.lo) | vertex_bit(edge.hi);
    if ((round.nature_subset & both) == both) round.communicating.push_back(e);
  }
}

void apply_into(const WeightedGame& game, SimState& state, const RoundRecord& round) {
  for (EdgeId e : round.communicating) {
    const double a = game.affinity(e);
    ++state.success_count[e];
    // Recomputed from the count so that V = v0 + a N holds exactly.
    const double updated = game.init_weight(e) + a * static_cast<double>(state.success_count[e]);
    const double delta = updated - state.payoff[e];
    state.payoff[e] = updated;
    const Edge& edge = game.edge(e);
    state.vertex_total[edge.lo] += delta;
    state.vertex_total[edge.hi] += delta;
    state.total += 2.0 * delta;
  }
  ++state.step;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

SimState initial_state(const WeightedGame& game) {
  SimState s;
  s.payoff.assign(game.init_weights().begin(), game.init_weights().end());
  s.success_count.assign(game.edge_count(), 0);
  s.vertex_total.assign(game.vertex_count(), 0.0);
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const Edge& edge = game.edge(e);
    s.vertex_total[edge.lo] += s.payoff[e];
    s.vertex_total[edge.hi] += s.payoff[e];
    s.total += 2.0 * s.payoff[e];
  }
  return s;
}

RoundRecord sample_round(const WeightedGame& game, const SimState& state, RandomStream& rng) {
  RoundRecord round;
  sample_into(game, state, rng, round);
  return round;
}

void apply_round(const WeightedGame& game, SimState& state, const RoundRecord& round) {
  apply_into(game, state, round);
}

RoundRecord step(const WeightedGame& game, SimState& state, RandomStream& rng) {
  RoundRecord round;
  sample_into(game, state, rng, round);
  apply_into(game, state, round);
  if (state.step % kAuditPeriod == 0) audit_totals(game, state);
  return round;
}

void audit_totals(const WeightedGame& game, SimState& state) {
  std::vector<double> vt(game.vertex_count(), 0.0);
  double total = 0.0;
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const Edge& edge = game.edge(e);
    vt[edge.lo] += state.payoff[e];
    vt[edge.hi] += state.payoff[e];
    total += 2.0 * state.payoff[e];
  }
  for (std::size_t v = 0; v < vt.size(); ++v) {
    if (!close_rel(vt[v], state.vertex_total[v], kAuditTol))
      throw Error(ErrorCode::InternalInconsistency, "vertex total drift at vertex " + std::to_string(v));
  }
  if (!close_rel(total, state.total, kAuditTol))
    throw Error(ErrorCode::InternalInconsistency, "total payoff drift");
  state.vertex_total = std::move(vt);
  state.total = total;
}

double success_probability(const WeightedGame& game, const SimState& state, EdgeId edge) {
  if (edge >= game.edge_count()) throw Error(ErrorCode::UnknownEdge, "edge id " + std::to_string(edge));
  const Edge& e = game.edge(edge);
  const double v = state.payoff[edge];
  return game.pair_probability(edge) * (v / state.vertex_total[e.lo]) * (v / state.vertex_total[e.hi]);
}

SimplexPoint occupation(const WeightedGame& game, const SimState& state) {
  SimplexPoint p;
  p.x.resize(game.edge_count());
  for (EdgeId e = 0; e < game.edge_count(); ++e) p.x[e] = state.payoff[e] / state.total;
  return p;
}

std::vector<std::uint64_t> checkpoints(const RecorderSchedule& schedule, std::uint64_t start,
                                       std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  if (horizon == 0) return out;
  const std::uint64_t end = start + horizon;
  if (schedule.kind == RecorderSchedule::Kind::Every) {
    const std::uint64_t k = std::max<std::uint64_t>(schedule.every, 1);
    for (std::uint64_t s = (start / k + 1) * k; s <= end; s += k) out.push_back(s);
  } else {
    if (!(schedule.ratio > 1.0)) throw Error(ErrorCode::ConfigError, "geometric ratio must exceed 1");
    double level = 1.0;
    std::uint64_t last = 0;
    while (true) {
      const auto s = static_cast<std::uint64_t>(std::ceil(level));
      if (s > end) break;
      if (s > start && s != last) out.push_back(s);
      last = s;
      level *= schedule.ratio;
    }
  }
  if (out.empty() || out.back() != end) out.push_back(end);
  return out;
}

Sample observe(const WeightedGame& game, const SimState& state, unsigned observables) {
  Sample s;
  s.step = state.step;
  const SimplexPoint x = occupation(game, state);
  if (observables & kObsPayoff) s.H = expected_payoff(game, x);
  if (observables & kObsGrowth) s.growth = state.step > 0 ? state.total / static_cast<double>(state.step) : 0.0;
  if (observables & kObsFieldNorm) s.field_l1 = field_l1(game, x);
  if (observables & kObsOccupation) s.x = x.x;
  if (observables & kObsCounts) s.counts = state.success_count;
  return s;
}

Trajectory run(const WeightedGame& game, SimState& state, std::uint64_t horizon, RandomStream& rng,
               const RecorderSchedule& schedule) {
  Trajectory traj;
  traj.observables = schedule.observables;
  const auto marks = checkpoints(schedule, state.step, horizon);
  traj.samples.reserve(marks.size());
  std::size_t next = 0;
  RoundRecord round;
  const std::uint64_t end = state.step + horizon;
  while (state.step < end) {
    sample_into(game, state, rng, round);
    apply_into(game, state, round);
    if (state.step % kAuditPeriod == 0) audit_totals(game, state);
    if (next < marks.size() && state.step == marks[next]) {
      traj.samples.push_back(observe(game, state, schedule.observables));
      ++next;
    }
  }
  return traj;
}

}  // namespace netform
