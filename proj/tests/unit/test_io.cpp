#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "netform/io.hpp"
#include "test_util.hpp"

using namespace netform;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InternalInconsistency;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "netform_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("games round-trip through JSON") {
  RandomStream rng(1);
  for (int k = 0; k < 30; ++k) {
    const auto g = testutil::random_game(rng);
    const auto text = io::dump(io::game_to_json(g));
    const auto back = io::parse_game(io::json::parse(text));
    CHECK(back == g);
    CHECK(io::dump(io::game_to_json(back)) == text);
  }
}

TEST_CASE("nature kinds parse") {
  auto j = io::json::parse(R"({"vertex_count": 3, "edges": [{"i": 0, "j": 1, "a": 1, "v0": 1},
      {"i": 1, "j": 2, "a": 1, "v0": 1}], "nature": {"kind": "vertex_neighborhood"}})");
  auto g = io::parse_game(j);
  CHECK(g.pair_probability(0) == doctest::Approx(2.0 / 3.0));

  j["nature"] = {{"kind", "bipartite"}, {"S1", {0}}, {"S2", {1, 2}}, {"state_weights", {1.0}}};
  g = io::parse_game(j);
  CHECK(g.pair_probability(0) == 1.0);

  j["nature"] = {{"kind", "custom"}, {"atoms", {{{"vertices", {0, 1}}, {"p", 1.0}}}}};
  g = io::parse_game(j);
  CHECK_FALSE(g.is_live(1));

  j.erase("nature");
  CHECK(io::parse_game(j).pair_probability(1) == 1.0);
}

TEST_CASE("malformed games") {
  CHECK(code_of([] { io::parse_game(io::json::parse(R"({"edges": []})")); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_game(io::json::parse(R"({"vertex_count": 2, "edges": [{"i": 0, "j": 1, "a": "x", "v0": 1}]})")); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_game(io::json::parse(R"({"vertex_count": 2, "edges": [{"i": 0, "j": 1, "a": 1, "v0": 1}], "nature": {"kind": "magic"}})")); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_game(io::json::parse(R"({"vertex_count": 2, "edges": [{"i": 0, "j": 0, "a": 1, "v0": 1}]})")); }) ==
        ErrorCode::SelfLoop);
  try {
    io::load_game("/nonexistent/game.json");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("/nonexistent/game.json") != std::string::npos);
  }
}

TEST_CASE("points round-trip and are validated") {
  RandomStream rng(2);
  for (int k = 0; k < 30; ++k) {
    const auto g = testutil::random_game(rng);
    const auto p = testutil::random_interior(g, rng);
    const auto back = io::parse_point(g, io::json::parse(io::dump(io::point_to_json(g, p))));
    CHECK(back == p);
  }
  const auto g = testutil::fixture("path3.json");
  CHECK(code_of([&] { io::load_point(g, testutil::data("path3_unnormalized_point.json")); }) ==
        ErrorCode::InvalidPoint);
  CHECK(io::load_point(g, testutil::data("path3_star_point.json")).x == std::vector<double>{0.25, 0.25});
  CHECK(code_of([&] { io::parse_point(g, io::json::parse(R"({"x": [{"i": 0, "j": 2, "value": 0.5}]})")); }) ==
        ErrorCode::InvalidPoint);
}

TEST_CASE("doubles use shortest round-trip text") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, 123456789.125, -0.0625, 1e20}) {
    const auto s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(1000000.0) == "1000000");
  CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("trajectory CSV and JSON carry the same rows") {
  const auto g = testutil::fixture("path3.json");
  auto s = initial_state(g);
  RandomStream rng(3);
  RecorderSchedule sched;
  sched.every = 50;
  const auto t = run(g, s, 100, rng, sched);
  const auto rows = io::trajectory_rows(g, t);
  const auto csv = io::rows_to_csv(rows, "step");
  CHECK(csv.rfind("step,observable,key,value\n", 0) == 0);
  CHECK(csv.find("\n50,x,0-1,") != std::string::npos);
  CHECK(csv.find("\n100,N,1-2,") != std::string::npos);
  const auto js = io::rows_to_json(rows, "step");
  REQUIRE(js.size() == rows.size());
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == rows.size() + 1);
  CHECK(js[0]["step"] == 50);
  CHECK(js[0]["observable"] == "H");
}

TEST_CASE("campaign specs and reports round-trip") {
  const auto spec = io::load_campaign_spec(testutil::data("basin_path3.json"));
  CHECK(spec.campaign.game_ref == "path3.json");
  CHECK(spec.campaign.replicas == 100);
  CHECK(spec.campaign.targets == std::vector<std::vector<EdgeId>>{{0, 1}});
  CHECK(io::parse_campaign(spec.game, io::campaign_to_json(spec.game, spec.campaign)) == spec.campaign);

  auto c = spec.campaign;
  c.replicas = 3;
  c.horizon = 2000;
  const auto report = run_campaign(spec.game, c, 2);
  const auto text = io::dump(io::campaign_report_to_json(spec.game, report));
  const auto back = io::parse_campaign_report(spec.game, io::json::parse(text));
  CHECK(back == report);
  CHECK(io::dump(io::campaign_report_to_json(spec.game, back)) == text);
  const auto csv = io::campaign_summary_csv(spec.game, report);
  CHECK(csv.find("0-1;1-2") != std::string::npos);

  const auto unequal = testutil::fixture("star2_unequal.json");
  Campaign e;
  e.analysis = AnalysisKind::BoundaryExponent;
  e.reference_edge = 0;
  e.edge = 1;
  e.replicas = 2;
  e.horizon = 2000;
  const auto rep2 = run_campaign(unequal, e, 1);
  CHECK(io::parse_campaign_report(unequal, io::json::parse(io::dump(io::campaign_report_to_json(unequal, rep2)))) ==
        rep2);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto p = scratch("out.txt");
  io::write_file_atomic(p, "hello\n");
  CHECK(io::read_file(p) == "hello\n");
  fs::path tmp = p;
  tmp += ".tmp";
  CHECK_FALSE(fs::exists(tmp));
  CHECK(code_of([] { io::write_file_atomic("/nonexistent-dir/x/out.txt", "x"); }) == ErrorCode::IoError);
}

TEST_CASE("metadata carries version, seed and config") {
  const auto m = io::metadata("simulate", 7, {{"horizon", 10}});
  CHECK(m["seed"] == 7);
  CHECK(m["command"] == "simulate");
  CHECK(m["config"]["horizon"] == 10);
  CHECK_FALSE(m["version"].get<std::string>().empty());
}
