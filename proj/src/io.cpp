#include "netform/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#ifndef NETFORM_VERSION
#define NETFORM_VERSION "unknown"
#endif

namespace netform::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const json& field(const json& j, const char* key, const char* context) {
  if (!j.is_object()) config_error(std::string(context) + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) config_error(std::string(context) + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T as(const json& j, const char* what) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) config_error(std::string(what) + ": expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!j.is_number_integer()) config_error(std::string(what) + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)
          config_error(std::string(what) + ": expected a nonnegative integer");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) config_error(std::string(what) + ": expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) config_error(std::string(what) + ": expected a string");
    }
    return j.get<T>();
  } catch (const json::exception& e) {
    config_error(std::string(what) + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key, const char* context) {
  return as<T>(field(j, key, context), key);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return as<T>(*it, key);
}

Vertex vertex_from(const json& j, const char* what) {
  const auto v = as<std::uint64_t>(j, what);
  if (v >= kMaxVertices) throw Error(ErrorCode::VertexOutOfRange, std::string(what) + " = " + std::to_string(v));
  return static_cast<Vertex>(v);
}

std::vector<Vertex> vertex_list(const json& j, const char* what) {
  if (!j.is_array()) config_error(std::string(what) + ": expected an array of vertices");
  std::vector<Vertex> out;
  for (const auto& v : j) out.push_back(vertex_from(v, what));
  return out;
}

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) config_error(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as<double>(v, what));
  return out;
}

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_number_from(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return as<double>(*it, key);
}

json edge_list_to_json(const WeightedGame& game, const std::vector<EdgeId>& edges) {
  json out = json::array();
  for (EdgeId e : edges) out.push_back(edge_to_json(game.edge(e)));
  return out;
}

std::vector<EdgeId> edge_list_from_json(const WeightedGame& game, const json& j) {
  if (!j.is_array()) config_error("expected an array of [i, j] edges");
  std::vector<EdgeId> out;
  for (const auto& e : j) out.push_back(edge_from_json(game, e));
  return out;
}

std::string_view condition_name(PCondition c) {
  switch (c) {
    case PCondition::Balance: return "balance";
    case PCondition::Star: return "star";
    case PCondition::Coverage: return "coverage";
  }
  return "unknown";
}

json limit_graph_to_json(const WeightedGame& game, const LimitGraph& g) {
  return {{"edges", edge_list_to_json(game, g.edges)},
          {"active_below_threshold", edge_list_to_json(game, g.active_below_threshold)}};
}

LimitGraph limit_graph_from_json(const WeightedGame& game, const json& j) {
  LimitGraph g;
  g.edges = edge_list_from_json(game, field(j, "edges", "limit_graph"));
  g.active_below_threshold = edge_list_from_json(game, field(j, "active_below_threshold", "limit_graph"));
  return g;
}

std::string joined_edges(const WeightedGame& game, const std::vector<EdgeId>& edges) {
  std::string out;
  for (EdgeId e : edges) {
    if (!out.empty()) out += ';';
    out += edge_key(game.edge(e));
  }
  return out;
}

}  // namespace

std::string_view version() noexcept { return NETFORM_VERSION; }

std::string format_double(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) config_error("cannot read '" + path.string() + "'");
  return ss.str();
}

json read_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorCode::IoError, "cannot rename into '" + path.string() + "': " + ec.message());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::IoError, "cannot create directory '" + dir.string() + "'");
}

// --- games and points -----------------------------------------------------

WeightedGame parse_game(const json& j) {
  const auto n = get<std::uint64_t>(j, "vertex_count", "game");
  if (n > kMaxVertices)
    throw Error(ErrorCode::TooManyVertices, "vertex_count " + std::to_string(n) + " exceeds " +
                                                std::to_string(kMaxVertices));
  const json& edges_j = field(j, "edges", "game");
  if (!edges_j.is_array()) config_error("game: 'edges' must be an array");
  std::vector<EdgeSpec> specs;
  std::vector<Edge> edges;
  for (const auto& e : edges_j) {
    EdgeSpec s;
    s.i = vertex_from(field(e, "i", "edge"), "i");
    s.j = vertex_from(field(e, "j", "edge"), "j");
    s.affinity = get<double>(e, "a", "edge");
    s.init_weight = get<double>(e, "v0", "edge");
    specs.push_back(s);
    if (s.i < n && s.j < n && s.i != s.j) edges.push_back(make_edge(s.i, s.j));
  }

  NatureDistribution nature = nature_full(n);
  if (const auto it = j.find("nature"); it != j.end()) {
    const json& nj = *it;
    const auto kind = get<std::string>(nj, "kind", "nature");
    if (kind == "full") {
      nature = nature_full(n);
    } else if (kind == "vertex_neighborhood") {
      std::vector<double> w(n, 1.0 / static_cast<double>(n));
      if (const auto wi = nj.find("vertex_weights"); wi != nj.end()) w = number_list(*wi, "vertex_weights");
      nature = nature_vertex_neighborhood(n, edges, w);
    } else if (kind == "bipartite") {
      const auto s1 = vertex_list(field(nj, "S1", "nature"), "S1");
      const auto s2 = vertex_list(field(nj, "S2", "nature"), "S2");
      std::vector<double> w(s1.size(), s1.empty() ? 0.0 : 1.0 / static_cast<double>(s1.size()));
      if (const auto wi = nj.find("state_weights"); wi != nj.end()) w = number_list(*wi, "state_weights");
      nature = nature_bipartite(n, s1, s2, w);
    } else if (kind == "custom") {
      const json& atoms_j = field(nj, "atoms", "nature");
      if (!atoms_j.is_array()) config_error("nature: 'atoms' must be an array");
      std::vector<NatureAtom> atoms;
      for (const auto& a : atoms_j) {
        NatureAtom atom;
        for (Vertex v : vertex_list(field(a, "vertices", "atom"), "vertices")) {
          if (v >= n) throw Error(ErrorCode::VertexOutOfRange, "atom vertex " + std::to_string(v));
          atom.subset |= vertex_bit(v);
        }
        atom.probability = get<double>(a, "p", "atom");
        atoms.push_back(atom);
      }
      nature = NatureDistribution::from_atoms(std::move(atoms));
    } else {
      config_error("nature: unknown kind '" + kind + "'");
    }
  }
  return build_game(n, specs, std::move(nature));
}

json game_to_json(const WeightedGame& game) {
  json edges = json::array();
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const Edge& edge = game.edge(e);
    edges.push_back({{"i", edge.lo}, {"j", edge.hi}, {"a", game.affinity(e)}, {"v0", game.init_weight(e)}});
  }
  json atoms = json::array();
  for (const auto& atom : game.nature().atoms()) {
    json vs = json::array();
    for (Vertex v = 0; v < game.vertex_count(); ++v) {
      if (atom.subset & vertex_bit(v)) vs.push_back(v);
    }
    atoms.push_back({{"vertices", vs}, {"p", atom.probability}});
  }
  return {{"vertex_count", game.vertex_count()},
          {"edges", edges},
          {"nature", {{"kind", "custom"}, {"atoms", atoms}}}};
}

WeightedGame load_game(const fs::path& path) {
  const json j = read_json(path);
  try {
    return parse_game(j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

std::string edge_key(const Edge& e) { return std::to_string(e.lo) + "-" + std::to_string(e.hi); }

json edge_to_json(const Edge& e) { return json::array({e.lo, e.hi}); }

EdgeId edge_from_json(const WeightedGame& game, const json& j) {
  if (!j.is_array() || j.size() != 2) config_error("edge must be written as [i, j]");
  return game.edge_id(vertex_from(j[0], "i"), vertex_from(j[1], "j"));
}

SimplexPoint parse_point(const WeightedGame& game, const json& j) {
  const json& xs = field(j, "x", "point");
  if (!xs.is_array()) config_error("point: 'x' must be an array");
  SimplexPoint p;
  p.x.assign(game.edge_count(), 0.0);
  std::vector<bool> seen(game.edge_count(), false);
  for (const auto& entry : xs) {
    const Vertex i = vertex_from(field(entry, "i", "point entry"), "i");
    const Vertex k = vertex_from(field(entry, "j", "point entry"), "j");
    const auto e = game.find_edge(i, k);
    if (!e) throw Error(ErrorCode::InvalidPoint, "point lists non-edge " + std::to_string(i) + "-" + std::to_string(k));
    if (seen[*e]) throw Error(ErrorCode::InvalidPoint, "point lists edge " + edge_key(game.edge(*e)) + " twice");
    seen[*e] = true;
    p.x[*e] = get<double>(entry, "value", "point entry");
  }
  validate_point(game, p, kPointReadTol);
  if (std::abs(ordered_sum(p.x) - 1.0) > 8.0 * std::numeric_limits<double>::epsilon()) renormalize(p);
  return p;
}

json point_to_json(const WeightedGame& game, const SimplexPoint& point) {
  json xs = json::array();
  for (EdgeId e = 0; e < game.edge_count(); ++e) {
    const Edge& edge = game.edge(e);
    xs.push_back({{"i", edge.lo}, {"j", edge.hi}, {"value", point.x.at(e)}});
  }
  return {{"x", xs}};
}

SimplexPoint load_point(const WeightedGame& game, const fs::path& path) {
  const json j = read_json(path);
  try {
    return parse_point(game, j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

// --- trajectories ---------------------------------------------------------

std::vector<TrajectoryRow> trajectory_rows(const WeightedGame& game, const Trajectory& traj) {
  std::vector<TrajectoryRow> rows;
  for (const auto& s : traj.samples) {
    const auto idx = static_cast<double>(s.step);
    if (traj.observables & kObsPayoff) rows.push_back({idx, "H", "", s.H});
    if (traj.observables & kObsGrowth) rows.push_back({idx, "T_over_n", "", s.growth});
    if (traj.observables & kObsFieldNorm) rows.push_back({idx, "F_l1", "", s.field_l1});
    for (EdgeId e = 0; e < s.x.size(); ++e) rows.push_back({idx, "x", edge_key(game.edge(e)), s.x[e]});
    for (EdgeId e = 0; e < s.counts.size(); ++e)
      rows.push_back({idx, "N", edge_key(game.edge(e)), static_cast<double>(s.counts[e])});
  }
  return rows;
}

std::vector<TrajectoryRow> ode_rows(const WeightedGame& game, const OdeTrajectory& traj) {
  std::vector<TrajectoryRow> rows;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const double t = traj.times[k];
    rows.push_back({t, "H", "", traj.H[k]});
    for (EdgeId e = 0; e < game.edge_count(); ++e)
      rows.push_back({t, "x", edge_key(game.edge(e)), traj.points[k].x[e]});
  }
  return rows;
}

std::string rows_to_csv(const std::vector<TrajectoryRow>& rows, std::string_view index_name) {
  std::string out;
  out.reserve(rows.size() * 32);
  out.append(index_name).append(",observable,key,value\n");
  for (const auto& r : rows) {
    out.append(format_double(r.index)).append(",").append(r.observable).append(",").append(r.key).append(",");
    out.append(format_double(r.value)).append("\n");
  }
  return out;
}

json rows_to_json(const std::vector<TrajectoryRow>& rows, std::string_view index_name) {
  json out = json::array();
  const std::string idx(index_name);
  for (const auto& r : rows) {
    json row;
    if (r.index == std::trunc(r.index) && idx == "step") {
      row[idx] = static_cast<std::uint64_t>(r.index);
    } else {
      row[idx] = r.index;
    }
    row["observable"] = r.observable;
    row["key"] = r.key;
    row["value"] = r.value;
    out.push_back(std::move(row));
  }
  return out;
}

// --- reports --------------------------------------------------------------

json classify_report_to_json(const WeightedGame& game, const EquilibriumReport& report) {
  json spectrum = json::array();
  for (const auto& z : report.spectrum) spectrum.push_back(json::array({z.real(), z.imag()}));

  json violations = json::array();
  for (const auto& v : report.property.violations)
    violations.push_back({{"condition", condition_name(v.condition)}, {"where", v.where}, {"detail", v.detail}});

  json out = {
      {"label", to_string(report.label)},
      {"boundary", report.boundary},
      {"residuals",
       {{"F_l1", report.residuals.F_l1},
        {"y_dev", report.residuals.y_dev},
        {"H", report.residuals.H},
        {"in_Gamma", report.residuals.in_Gamma}}},
      {"max_real_part", opt_number(report.max_real_part)},
      {"spectrum", spectrum},
      {"support", edge_list_to_json(game, report.support.edges)},
      {"property_P",
       {{"holds", report.property.holds}, {"violations", violations}, {"nuclei", report.property.nuclei}}},
  };
  if (report.jacobian) {
    const auto& J = *report.jacobian;
    json rows = json::array();
    for (Eigen::Index r = 0; r < J.matrix.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < J.matrix.cols(); ++c) row.push_back(J.matrix(r, c));
      rows.push_back(std::move(row));
    }
    out["jacobian"] = {{"coordinates", edge_list_to_json(game, J.coordinates)},
                       {"blocks", J.blocks},
                       {"matrix", rows}};
  } else {
    out["jacobian"] = nullptr;
  }
  return out;
}

json stable_graphs_to_json(const WeightedGame& game, const std::vector<std::vector<EdgeId>>& graphs) {
  json out = json::array();
  for (const auto& g : graphs) out.push_back(edge_list_to_json(game, g));
  return out;
}

Campaign parse_campaign(const WeightedGame& game, const json& j) {
  if (!j.is_object()) config_error("campaign: expected an object");
  Campaign c;
  if (const auto it = j.find("game"); it != j.end() && it->is_string()) c.game_ref = it->get<std::string>();
  c.game_ref = get_or<std::string>(j, "game_ref", c.game_ref);
  c.replicas = get_or<std::uint64_t>(j, "replicas", c.replicas);
  c.horizon = get_or<std::uint64_t>(j, "horizon", c.horizon);
  c.seed_base = get_or<std::uint64_t>(j, "seed_base", c.seed_base);

  if (const auto it = j.find("recorder"); it != j.end()) {
    const json& r = *it;
    const auto kind = get_or<std::string>(r, "kind", "every");
    if (kind == "every") {
      c.recorder.kind = RecorderSchedule::Kind::Every;
      c.recorder.every = get_or<std::uint64_t>(r, "every", c.recorder.every);
      if (c.recorder.every == 0) config_error("recorder: 'every' must be positive");
    } else if (kind == "geometric") {
      c.recorder.kind = RecorderSchedule::Kind::Geometric;
      c.recorder.ratio = get_or<double>(r, "ratio", c.recorder.ratio);
      if (!(c.recorder.ratio > 1.0)) config_error("recorder: 'ratio' must exceed 1");
    } else {
      config_error("recorder: unknown kind '" + kind + "'");
    }
  }

  const json& a = field(j, "analysis", "campaign");
  c.analysis = analysis_from_string(get<std::string>(a, "kind", "analysis"));
  if (const auto it = a.find("targets"); it != a.end()) {
    if (!it->is_array()) config_error("analysis: 'targets' must be an array of edge lists");
    for (const auto& t : *it) c.targets.push_back(edge_list_from_json(game, t));
  }
  c.window = get_or<std::uint64_t>(a, "window", c.window);
  c.theta = get_or<double>(a, "theta", c.theta);
  if (const auto it = a.find("reference_edge"); it != a.end() && !it->is_null())
    c.reference_edge = edge_from_json(game, *it);
  if (const auto it = a.find("edge"); it != a.end() && !it->is_null()) c.edge = edge_from_json(game, *it);
  c.allow_non_star = get_or<bool>(a, "allow_non_star", c.allow_non_star);

  if (const auto it = j.find("thresholds"); it != j.end()) {
    const json& t = *it;
    c.convergence_from = get_or<std::uint64_t>(t, "convergence_from", c.convergence_from);
    c.payoff_threshold = get_or<double>(t, "payoff", c.payoff_threshold);
    c.growth_threshold = get_or<double>(t, "growth", c.growth_threshold);
    c.field_threshold = get_or<double>(t, "field", c.field_threshold);
    c.required_fraction = get_or<double>(t, "required_fraction", c.required_fraction);
    c.basin_min_frequency = get_or<double>(t, "basin_min_frequency", c.basin_min_frequency);
    c.exponent_band = get_or<double>(t, "exponent_band", c.exponent_band);
    c.leaf_mass_threshold = get_or<double>(t, "leaf_mass", c.leaf_mass_threshold);
  }
  return c;
}

json campaign_to_json(const WeightedGame& game, const Campaign& c) {
  json recorder;
  if (c.recorder.kind == RecorderSchedule::Kind::Every) {
    recorder = {{"kind", "every"}, {"every", c.recorder.every}};
  } else {
    recorder = {{"kind", "geometric"}, {"ratio", c.recorder.ratio}};
  }
  json targets = json::array();
  for (const auto& t : c.targets) targets.push_back(edge_list_to_json(game, t));
  json analysis = {
      {"kind", to_string(c.analysis)},
      {"targets", targets},
      {"window", c.window},
      {"theta", c.theta},
      {"reference_edge", c.reference_edge ? edge_to_json(game.edge(*c.reference_edge)) : json(nullptr)},
      {"edge", c.edge ? edge_to_json(game.edge(*c.edge)) : json(nullptr)},
      {"allow_non_star", c.allow_non_star},
  };
  return {
      {"game_ref", c.game_ref},
      {"replicas", c.replicas},
      {"horizon", c.horizon},
      {"seed_base", c.seed_base},
      {"recorder", recorder},
      {"analysis", analysis},
      {"thresholds",
       {{"convergence_from", c.convergence_from},
        {"payoff", c.payoff_threshold},
        {"growth", c.growth_threshold},
        {"field", c.field_threshold},
        {"required_fraction", c.required_fraction},
        {"basin_min_frequency", c.basin_min_frequency},
        {"exponent_band", c.exponent_band},
        {"leaf_mass", c.leaf_mass_threshold}}},
  };
}

CampaignSpec load_campaign_spec(const fs::path& path) {
  const json j = read_json(path);
  const json& g = field(j, "game", "campaign");
  try {
    if (g.is_string()) {
      fs::path game_path = g.get<std::string>();
      if (game_path.is_relative()) game_path = path.parent_path() / game_path;
      WeightedGame game = load_game(game_path);
      Campaign c = parse_campaign(game, j);
      return {std::move(game), std::move(c)};
    }
    WeightedGame game = parse_game(g);
    Campaign c = parse_campaign(game, j);
    if (c.game_ref.empty()) c.game_ref = "inline";
    return {std::move(game), std::move(c)};
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

json campaign_report_to_json(const WeightedGame& game, const CampaignReport& report) {
  json replicas = json::array();
  for (const auto& r : report.replicas) {
    replicas.push_back({
        {"index", r.index},
        {"seed", r.seed},
        {"steps", r.steps},
        {"final_T", r.final_T},
        {"final_growth", r.final_growth},
        {"final_H", r.final_H},
        {"growth_gap", r.growth_gap},
        {"dyadic_sup", opt_number(r.dyadic_sup)},
        {"field_l1", r.field_l1},
        {"counts", r.counts},
        {"final_x", r.final_x},
        {"limit_graph", limit_graph_to_json(game, r.limit_graph)},
        {"exponent", opt_number(r.exponent)},
        {"reference_exponent", opt_number(r.reference_exponent)},
        {"leaf_mass", opt_number(r.leaf_mass)},
    });
  }

  const Aggregate& a = report.aggregate;
  json agg = {
      {"replicas", a.replicas},
      {"required", a.required},
      {"growth_pass", a.growth_pass},
      {"payoff_pass", a.payoff_pass},
      {"field_pass", a.field_pass},
      {"median_growth_gap", a.median_growth_gap},
      {"median_dyadic_sup", opt_number(a.median_dyadic_sup)},
      {"median_field_l1", a.median_field_l1},
      {"passed", a.passed},
  };
  if (a.basin) {
    json targets = json::array();
    for (const auto& t : a.basin->targets) {
      targets.push_back({{"edges", edge_list_to_json(game, t.edges)},
                         {"hits", t.hits},
                         {"frequency", t.frequency},
                         {"std_error", t.std_error}});
    }
    agg["basin"] = {{"window", a.basin->window},
                    {"theta", a.basin->theta},
                    {"targets", targets},
                    {"undetermined", a.basin->undetermined},
                    {"combined_frequency", a.basin->combined_frequency}};
  } else {
    agg["basin"] = nullptr;
  }
  if (a.exponent) {
    const auto& x = *a.exponent;
    agg["exponent"] = {{"reference_edge", edge_to_json(game.edge(x.reference_edge))},
                       {"edge", edge_to_json(game.edge(x.edge))},
                       {"predicted", x.predicted},
                       {"median", x.median},
                       {"per_replica", x.per_replica},
                       {"leaf_mass", x.leaf_mass},
                       {"leaf_mass_pass", x.leaf_mass_pass}};
  } else {
    agg["exponent"] = nullptr;
  }
  return {{"campaign", campaign_to_json(game, report.campaign)}, {"replicas", replicas}, {"aggregate", agg}};
}

CampaignReport parse_campaign_report(const WeightedGame& game, const json& j) {
  CampaignReport report;
  report.campaign = parse_campaign(game, field(j, "campaign", "report"));

  const json& rs = field(j, "replicas", "report");
  if (!rs.is_array()) config_error("report: 'replicas' must be an array");
  for (const auto& rj : rs) {
    ReplicaResult r;
    r.index = get<std::uint64_t>(rj, "index", "replica");
    r.seed = get<std::uint64_t>(rj, "seed", "replica");
    r.steps = get<std::uint64_t>(rj, "steps", "replica");
    r.final_T = get<double>(rj, "final_T", "replica");
    r.final_growth = get<double>(rj, "final_growth", "replica");
    r.final_H = get<double>(rj, "final_H", "replica");
    r.growth_gap = get<double>(rj, "growth_gap", "replica");
    r.dyadic_sup = opt_number_from(rj, "dyadic_sup");
    r.field_l1 = get<double>(rj, "field_l1", "replica");
    for (const auto& c : field(rj, "counts", "replica")) r.counts.push_back(as<std::uint64_t>(c, "counts"));
    r.final_x = number_list(field(rj, "final_x", "replica"), "final_x");
    r.limit_graph = limit_graph_from_json(game, field(rj, "limit_graph", "replica"));
    r.exponent = opt_number_from(rj, "exponent");
    r.reference_exponent = opt_number_from(rj, "reference_exponent");
    r.leaf_mass = opt_number_from(rj, "leaf_mass");
    report.replicas.push_back(std::move(r));
  }

  const json& aj = field(j, "aggregate", "report");
  Aggregate& a = report.aggregate;
  a.replicas = get<std::uint64_t>(aj, "replicas", "aggregate");
  a.required = get<std::uint64_t>(aj, "required", "aggregate");
  a.growth_pass = get<std::uint64_t>(aj, "growth_pass", "aggregate");
  a.payoff_pass = get<std::uint64_t>(aj, "payoff_pass", "aggregate");
  a.field_pass = get<std::uint64_t>(aj, "field_pass", "aggregate");
  a.median_growth_gap = get<double>(aj, "median_growth_gap", "aggregate");
  a.median_dyadic_sup = opt_number_from(aj, "median_dyadic_sup");
  a.median_field_l1 = get<double>(aj, "median_field_l1", "aggregate");
  a.passed = get<bool>(aj, "passed", "aggregate");
  if (const auto it = aj.find("basin"); it != aj.end() && !it->is_null()) {
    LimitGraphEstimate b;
    b.window = get<std::uint64_t>(*it, "window", "basin");
    b.theta = get<double>(*it, "theta", "basin");
    for (const auto& r : report.replicas) b.per_replica.push_back(r.limit_graph);
    for (const auto& t : field(*it, "targets", "basin")) {
      TargetFrequency f;
      f.edges = edge_list_from_json(game, field(t, "edges", "target"));
      f.hits = get<std::uint64_t>(t, "hits", "target");
      f.frequency = get<double>(t, "frequency", "target");
      f.std_error = get<double>(t, "std_error", "target");
      b.targets.push_back(std::move(f));
    }
    b.undetermined = get<std::uint64_t>(*it, "undetermined", "basin");
    b.combined_frequency = get<double>(*it, "combined_frequency", "basin");
    a.basin = std::move(b);
  }
  if (const auto it = aj.find("exponent"); it != aj.end() && !it->is_null()) {
    ExponentEstimate x;
    x.reference_edge = edge_from_json(game, field(*it, "reference_edge", "exponent"));
    x.edge = edge_from_json(game, field(*it, "edge", "exponent"));
    x.predicted = get<double>(*it, "predicted", "exponent");
    x.median = get<double>(*it, "median", "exponent");
    x.per_replica = number_list(field(*it, "per_replica", "exponent"), "per_replica");
    x.leaf_mass = number_list(field(*it, "leaf_mass", "exponent"), "leaf_mass");
    x.leaf_mass_pass = get<std::uint64_t>(*it, "leaf_mass_pass", "exponent");
    a.exponent = std::move(x);
  }
  return report;
}

std::string campaign_summary_csv(const WeightedGame& game, const CampaignReport& report) {
  std::string out =
      "index,seed,steps,final_T,final_growth,final_H,growth_gap,dyadic_sup,field_l1,limit_graph,exponent,leaf_mass\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.replicas) {
    out += std::to_string(r.index) + "," + std::to_string(r.seed) + "," + std::to_string(r.steps) + ",";
    out += format_double(r.final_T) + "," + format_double(r.final_growth) + "," + format_double(r.final_H) + ",";
    out += format_double(r.growth_gap) + "," + opt(r.dyadic_sup) + "," + format_double(r.field_l1) + ",";
    out += joined_edges(game, r.limit_graph.edges) + "," + opt(r.exponent) + "," + opt(r.leaf_mass) + "\n";
  }
  return out;
}

json metadata(std::string_view command, std::optional<std::uint64_t> seed, const json& config) {
  return {{"version", version()},
          {"command", command},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"config", config}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace netform::io
