#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "netform/dynamics.hpp"
#include "netform/equilibrium.hpp"
#include "netform/harness.hpp"
#include "netform/io.hpp"
#include "netform/meanfield.hpp"

namespace fs = std::filesystem;
using netform::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitNotStable = 4;

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json schedule_json(const netform::RecorderSchedule& s) {
  if (s.kind == netform::RecorderSchedule::Kind::Every) return {{"kind", "every"}, {"every", s.every}};
  return {{"kind", "geometric"}, {"ratio", s.ratio}};
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    netform::io::write_file_atomic(out, text);
  }
}

struct SimulateArgs {
  std::string game;
  std::uint64_t horizon = 100000;
  std::optional<std::uint64_t> seed;
  std::uint64_t every = 1000;
  std::optional<double> geometric;
  std::string format = "csv";
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& a) {
  const auto game = netform::io::load_game(a.game);
  const std::uint64_t seed = a.seed ? *a.seed : entropy_seed();
  if (!a.seed) std::cerr << "seed: " << seed << "\n";

  netform::RecorderSchedule schedule;
  if (a.geometric) {
    schedule.kind = netform::RecorderSchedule::Kind::Geometric;
    schedule.ratio = *a.geometric;
  } else {
    schedule.every = a.every;
  }

  netform::SimState state = netform::initial_state(game);
  netform::RandomStream rng(seed);
  netform::Trajectory traj = netform::run(game, state, a.horizon, rng, schedule);
  traj.samples.insert(traj.samples.begin(), netform::observe(game, netform::initial_state(game), schedule.observables));

  const auto rows = netform::io::trajectory_rows(game, traj);
  const json config = {{"game", a.game},         {"game_spec", netform::io::game_to_json(game)},
                       {"horizon", a.horizon},    {"recorder", schedule_json(schedule)},
                       {"format", a.format}};
  netform::io::ensure_directory(a.out);
  const fs::path dir = a.out;
  if (a.format == "json") {
    netform::io::write_file_atomic(dir / "trajectory.json",
                                   netform::io::dump(netform::io::rows_to_json(rows, "step")));
  } else {
    netform::io::write_file_atomic(dir / "trajectory.csv", netform::io::rows_to_csv(rows, "step"));
  }
  netform::io::write_file_atomic(dir / "meta.json", netform::io::dump(netform::io::metadata("simulate", seed, config)));
  return kExitOk;
}

struct OdeArgs {
  std::string game;
  std::string from = "uniform";
  double duration = 1.0;
  double step = 1e-3;
  std::string method = "rk4";
  std::size_t every = 1;
  std::string format = "csv";
  std::string out = ".";
};

int cmd_ode(const OdeArgs& a) {
  const auto game = netform::io::load_game(a.game);
  const netform::SimplexPoint x0 =
      a.from == "uniform" ? netform::uniform_point(game) : netform::io::load_point(game, a.from);

  netform::OdeOptions opt;
  opt.duration = a.duration;
  opt.step_size = a.step;
  opt.method = a.method == "euler" ? netform::OdeMethod::Euler : netform::OdeMethod::Rk4;
  opt.sample_every = a.every;
  const auto traj = netform::integrate(game, x0, opt);

  const auto rows = netform::io::ode_rows(game, traj);
  const json config = {{"game", a.game},       {"game_spec", netform::io::game_to_json(game)},
                       {"from", a.from},       {"start", netform::io::point_to_json(game, x0)},
                       {"duration", a.duration}, {"step", a.step},
                       {"method", a.method},   {"every", a.every},
                       {"format", a.format}};
  json meta = netform::io::metadata("ode", std::nullopt, config);
  meta["diagnostics"] = {{"steps", traj.steps},
                         {"monotonicity_violations", traj.monotonicity_violations},
                         {"max_H_drop", traj.max_H_drop},
                         {"max_renorm_drift", traj.max_renorm_drift}};
  netform::io::ensure_directory(a.out);
  const fs::path dir = a.out;
  if (a.format == "json") {
    netform::io::write_file_atomic(dir / "trajectory.json",
                                   netform::io::dump(netform::io::rows_to_json(rows, "time")));
  } else {
    netform::io::write_file_atomic(dir / "trajectory.csv", netform::io::rows_to_csv(rows, "time"));
  }
  netform::io::write_file_atomic(dir / "meta.json", netform::io::dump(meta));
  return kExitOk;
}

struct ClassifyArgs {
  std::string game;
  std::string point;
  std::string out;
};

int cmd_classify(const ClassifyArgs& a) {
  const auto game = netform::io::load_game(a.game);
  const auto point = netform::io::load_point(game, a.point);
  const auto report = netform::classify(game, point);
  json j = netform::io::classify_report_to_json(game, report);
  j["meta"] = netform::io::metadata(
      "classify", std::nullopt, {{"game", a.game}, {"point", a.point}, {"point_spec", netform::io::point_to_json(game, point)}});
  emit(netform::io::dump(j), a.out);
  switch (report.label) {
    case netform::StabilityLabel::Stable: return kExitOk;
    case netform::StabilityLabel::Unstable: return kExitUnstable;
    default: return kExitNotStable;
  }
}

struct EnumerateArgs {
  std::string game;
  std::string out;
};

int cmd_enumerate(const EnumerateArgs& a) {
  const auto game = netform::io::load_game(a.game);
  const auto graphs = netform::enumerate_stable_graphs(game);
  json j = {{"graphs", netform::io::stable_graphs_to_json(game, graphs)},
            {"meta", netform::io::metadata("enumerate", std::nullopt,
                                           {{"game", a.game}, {"game_spec", netform::io::game_to_json(game)}})}};
  emit(netform::io::dump(j), a.out);
  return kExitOk;
}

struct CampaignArgs {
  std::string spec;
  int threads = 0;
  std::string out = ".";
};

int cmd_campaign(const CampaignArgs& a) {
  const auto spec = netform::io::load_campaign_spec(a.spec);
  const auto report = netform::run_campaign(spec.game, spec.campaign, a.threads);
  const json config = {{"spec", a.spec},
                       {"game_spec", netform::io::game_to_json(spec.game)},
                       {"campaign", netform::io::campaign_to_json(spec.game, spec.campaign)}};
  netform::io::ensure_directory(a.out);
  const fs::path dir = a.out;
  netform::io::write_file_atomic(dir / "report.json",
                                 netform::io::dump(netform::io::campaign_report_to_json(spec.game, report)));
  netform::io::write_file_atomic(dir / "replicas.csv", netform::io::campaign_summary_csv(spec.game, report));
  netform::io::write_file_atomic(dir / "meta.json",
                                 netform::io::dump(netform::io::metadata("campaign", spec.campaign.seed_base, config)));
  std::cout << netform::to_string(spec.campaign.analysis) << ": " << (report.aggregate.passed ? "pass" : "fail")
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement network-formation games: simulation, mean-field flow and stability"};
  app.set_version_flag("--version", std::string(netform::io::version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the stochastic game and record a trajectory");
  simulate->add_option("--game", sim.game, "Game file (JSON)")->required();
  simulate->add_option("--horizon", sim.horizon, "Number of rounds")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed (drawn from OS entropy and echoed if omitted)");
  auto* every = simulate->add_option("--every", sim.every, "Record every k rounds")->capture_default_str()
                    ->check(CLI::PositiveNumber);
  simulate->add_option("--geometric", sim.geometric, "Record at ceil(r^m) instead")
      ->check(CLI::Range(1.0 + 1e-12, 1e6))
      ->excludes(every);
  simulate->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  OdeArgs ode;
  auto* ode_cmd = app.add_subcommand("ode", "Integrate the mean-field ODE");
  ode_cmd->add_option("--game", ode.game, "Game file (JSON)")->required();
  ode_cmd->add_option("--from", ode.from, "'uniform' or a point file")->capture_default_str();
  ode_cmd->add_option("--duration", ode.duration)->check(CLI::NonNegativeNumber)->capture_default_str();
  ode_cmd->add_option("--step", ode.step)->check(CLI::PositiveNumber)->capture_default_str();
  ode_cmd->add_option("--method", ode.method)->check(CLI::IsMember({"rk4", "euler"}))->capture_default_str();
  ode_cmd->add_option("--every", ode.every, "Record every k steps")->check(CLI::PositiveNumber)->capture_default_str();
  ode_cmd->add_option("--format", ode.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  ode_cmd->add_option("--out", ode.out, "Output directory")->capture_default_str();

  ClassifyArgs cls;
  auto* classify = app.add_subcommand("classify", "Classify a point of the simplex");
  classify->add_option("--game", cls.game, "Game file (JSON)")->required();
  classify->add_option("--point", cls.point, "Point file (JSON)")->required();
  classify->add_option("--out", cls.out, "Report file (stdout if omitted)");

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand("enumerate", "List subgraphs supporting stable equilibria");
  enumerate->add_option("--game", en.game, "Game file (JSON)")->required();
  enumerate->add_option("--out", en.out, "Output file (stdout if omitted)");

  CampaignArgs camp;
  auto* campaign = app.add_subcommand("campaign", "Run a seeded Monte Carlo campaign");
  campaign->add_option("--spec", camp.spec, "Campaign spec (JSON)")->required();
  campaign->add_option("--threads", camp.threads, "Worker threads (0: runtime default)")->capture_default_str();
  campaign->add_option("--out", camp.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (ode_cmd->parsed()) return cmd_ode(ode);
    if (classify->parsed()) return cmd_classify(cls);
    if (enumerate->parsed()) return cmd_enumerate(en);
    if (campaign->parsed()) return cmd_campaign(camp);
  } catch (const netform::Error& e) {
    std::cerr << "netform: " << e.what() << "\n";
    return e.code() == netform::ErrorCode::IoError ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "netform: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
