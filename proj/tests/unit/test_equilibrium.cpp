#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "netform/equilibrium.hpp"
#include "netform/meanfield.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace netform;
using doctest::Approx;

namespace {

std::vector<double> real_parts(const std::vector<std::complex<double>>& s) {
  std::vector<double> out;
  for (const auto& z : s) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

void check_spectrum(const std::vector<std::complex<double>>& got, std::vector<double> want, double tol = 1e-8) {
  std::sort(want.begin(), want.end());
  const auto re = real_parts(got);
  REQUIRE(re.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(re[k] - want[k]) <= tol);
  for (const auto& z : got) CHECK(std::abs(z.imag()) <= tol);
}

std::vector<std::vector<EdgeId>> brute_force_stable_graphs(const WeightedGame& g) {
  std::vector<std::vector<EdgeId>> out;
  const std::size_t m = g.edge_count();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<EdgeId> edges;
    for (EdgeId e = 0; e < m; ++e)
      if (mask >> e & 1) edges.push_back(e);
    if (check_property_P(g, make_subgraph(g, edges)).holds) out.push_back(edges);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_block_identities(const Jacobian& J) {
  std::size_t start = 0;
  for (std::size_t b : J.blocks) {
    std::size_t vertices = 0;
    (void)vertices;
    for (std::size_t c = start; c < start + b; ++c) {
      double col = 0.0;
      for (std::size_t r = start; r < start + b; ++r) col += J.matrix(r, c);
      CHECK(std::abs(col + J.H) <= 1e-9);
    }
    start += b;
  }
}

}  // namespace

TEST_CASE("support graphs and components") {
  const auto g = testutil::fixture("k4_mixed.json");
  const auto sg = make_subgraph(g, std::vector<EdgeId>{5, 0, 0});
  CHECK(sg.edges == std::vector<EdgeId>{0, 5});
  REQUIRE(sg.components.size() == 2);
  CHECK(sg.components[0].vertices == std::vector<Vertex>{0, 1});
  CHECK(sg.components[1].vertices == std::vector<Vertex>{2, 3});
  const auto pt = SimplexPoint{{0.25, 0.0, 0.0, 0.0, 0.0, 0.25}};
  CHECK(support_graph(g, pt) == sg);
}

TEST_CASE("property P on the fixtures") {
  const auto path = testutil::fixture("path3.json");
  auto r = check_property_P(path, make_subgraph(path, std::vector<EdgeId>{0, 1}));
  CHECK(r.holds);
  CHECK(r.nuclei == std::vector<Vertex>{1});
  CHECK(r.nucleus_of == std::vector<Vertex>{1, 1, 1});

  r = check_property_P(path, make_subgraph(path, std::vector<EdgeId>{0}));
  CHECK_FALSE(r.holds);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].condition == PCondition::Coverage);
  CHECK(r.violations[0].where == 2);

  const auto cyc = testutil::fixture("cycle4.json");
  r = check_property_P(cyc, make_subgraph(cyc, std::vector<EdgeId>{0, 1, 2, 3}));
  CHECK_FALSE(r.holds);
  CHECK(r.violations[0].condition == PCondition::Star);

  const auto star = testutil::game_from(4, {{0, 1, 1, 1}, {0, 2, 1, 1}, {0, 3, 2, 1}});
  r = check_property_P(star, make_subgraph(star, std::vector<EdgeId>{0, 1, 2}));
  CHECK_FALSE(r.holds);
  CHECK(r.violations[0].condition == PCondition::Balance);

  const auto two = testutil::fixture("two_edges.json");
  r = check_property_P(two, make_subgraph(two, std::vector<EdgeId>{0, 1}));
  CHECK(r.holds);
  CHECK(r.nuclei == std::vector<Vertex>{0, 2});
}

TEST_CASE("enumeration matches brute force") {
  const auto cyc = testutil::fixture("cycle4.json");
  CHECK(enumerate_stable_graphs(cyc) == std::vector<std::vector<EdgeId>>{{0, 2}, {1, 3}});
  const auto path = testutil::fixture("path3.json");
  CHECK(enumerate_stable_graphs(path) == std::vector<std::vector<EdgeId>>{{0, 1}});
  CHECK(enumerate_stable_graphs(testutil::fixture("single_edge.json")) == std::vector<std::vector<EdgeId>>{{0}});

  RandomStream rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    // few distinct weights so that balance can hold
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 5);
    std::vector<EdgeSpec> edges;
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) edges.push_back({i, j, rng.uniform() < 0.7 ? 1.0 : 2.0, 1.0});
    if (edges.empty()) edges.push_back({0, 1, 1.0, 1.0});
    const auto g = testutil::game_from(n, edges);
    CHECK(enumerate_stable_graphs(g) == brute_force_stable_graphs(g));
  }

  std::vector<EdgeSpec> big;
  for (Vertex v = 1; v < 17; ++v) big.push_back({0, v, 1, 1});
  CHECK_THROWS_AS(enumerate_stable_graphs(testutil::game_from(17, big)), Error);
}

TEST_CASE("stable family points") {
  const auto two = testutil::fixture("two_edges.json");
  const auto q = gamma_G_point(two, make_subgraph(two, std::vector<EdgeId>{0, 1}), SatelliteSplit::equal());
  CHECK(q.x[0] == Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(q.x[1] == Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(expected_payoff(two, q) == Approx(8.0).epsilon(1e-14));
  CHECK(in_gamma_G(two, q));

  const auto star = testutil::fixture("star4.json");
  const auto full = make_subgraph(star, std::vector<EdgeId>{0, 1, 2});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = gamma_G_point(star, full, SatelliteSplit::dirichlet(seed));
    CHECK(ordered_sum(p.x) == Approx(1.0).epsilon(1e-15));
    CHECK(field_l1(star, p) <= 1e-12);
    CHECK(in_gamma_G(star, p));
    const auto eff = efficiencies(star, p);
    for (EdgeId e = 0; e < 3; ++e) CHECK(*eff.y[e] == Approx(expected_payoff(star, p)).epsilon(1e-12));
  }
  const auto ex = gamma_G_point(star, full, SatelliteSplit::explicit_weights({1.0, 2.0, 1.0}));
  CHECK(ex.x[1] == Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(gamma_G_point(star, full, SatelliteSplit::explicit_weights({1.0, 0.0, 1.0})), Error);
  const auto cyc = testutil::fixture("cycle4.json");
  CHECK_THROWS_AS(gamma_G_point(cyc, make_subgraph(cyc, std::vector<EdgeId>{0, 1, 2, 3}), SatelliteSplit::equal()),
                  Error);
  CHECK_FALSE(in_gamma_G(cyc, uniform_point(cyc)));
}

TEST_CASE("Jacobian fixtures") {
  const auto single = testutil::fixture("single_edge.json");
  check_spectrum(spectrum(jacobian(single, SimplexPoint{{0.5}}).matrix), {-2.0});

  const auto star = testutil::fixture("star2.json");
  const auto q = gamma_G_point(star, make_subgraph(star, std::vector<EdgeId>{0, 1}), SatelliteSplit::dirichlet(1));
  const auto Js = jacobian(star, q);
  check_spectrum(spectrum(Js.matrix), {0.0, -2.0});
  check_block_identities(Js);

  const auto cyc = testutil::fixture("cycle4.json");
  const auto Jc = jacobian(cyc, uniform_point(cyc));
  check_spectrum(spectrum(Jc.matrix), {-2.0, 2.0, 0.0, 0.0});
  check_block_identities(Jc);
  CHECK(Jc.matrix.trace() == Approx(2.0 * (4.0 - 4.0)).epsilon(1e-9));
}

TEST_CASE("Jacobian trace per block is H(|E| - |V|)") {
  const auto g = testutil::fixture("k4_mixed.json");
  for (const auto& graph : enumerate_stable_graphs(g)) {
    const auto sg = make_subgraph(g, graph);
    const auto q = gamma_G_point(g, sg, SatelliteSplit::dirichlet(graph.size()));
    const auto J = jacobian(g, q);
    check_block_identities(J);
    std::size_t start = 0;
    std::size_t comp = 0;
    for (std::size_t b : J.blocks) {
      while (sg.components[comp].edges.empty()) ++comp;
      const double want = J.H * (double(sg.components[comp].edges.size()) - double(sg.components[comp].vertices.size()));
      CHECK(std::abs(J.matrix.block(start, start, b, b).trace() - want) <= 1e-9);
      start += b;
      ++comp;
    }
  }
}

TEST_CASE("analytic Jacobian against finite differences") {
  auto check_fd = [](const WeightedGame& g, const SimplexPoint& p, const Jacobian& J) {
    const auto fd = oracle::jacobian_fd(g, p, J.coordinates);
    for (Eigen::Index r = 0; r < fd.rows(); ++r)
      for (Eigen::Index c = 0; c < fd.cols(); ++c)
        CHECK(std::abs(fd(r, c) - J.matrix(r, c)) <= 1e-5 * std::max(std::abs(J.matrix(r, c)), J.H));
  };
  for (const char* name : {"path3.json", "cycle4.json", "star4.json", "two_edges.json", "k4_mixed.json"}) {
    const auto g = testutil::fixture(name);
    for (const auto& graph : enumerate_stable_graphs(g)) {
      const auto q = gamma_G_point(g, make_subgraph(g, graph), SatelliteSplit::dirichlet(7));
      check_fd(g, q, jacobian(g, q));
    }
  }
  RandomStream rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testutil::random_game(rng, 6);
    const auto p = testutil::random_interior(g, rng);
    check_fd(g, p, jacobian_general(g, p));
  }
}

TEST_CASE("spectrum agrees with the symmetric factorization at equilibria") {
  for (const char* name : {"path3.json", "cycle4.json", "star4.json", "two_edges.json", "k4_mixed.json"}) {
    const auto g = testutil::fixture(name);
    for (const auto& graph : enumerate_stable_graphs(g)) {
      for (std::uint64_t seed : {1u, 2u}) {
        const auto q = gamma_G_point(g, make_subgraph(g, graph), SatelliteSplit::dirichlet(seed));
        const auto J = jacobian(g, q);
        const auto sym = oracle::equilibrium_spectrum_symmetric(g, q, J);
        REQUIRE(sym.has_value());
        check_spectrum(spectrum(J.matrix), *sym);
      }
    }
  }
  const auto cyc = testutil::fixture("cycle4.json");
  const auto J = jacobian(cyc, uniform_point(cyc));
  check_spectrum(spectrum(J.matrix), *oracle::equilibrium_spectrum_symmetric(cyc, uniform_point(cyc), J));
}

TEST_CASE("classification labels") {
  const auto path = testutil::fixture("path3.json");
  auto rep = classify(path, SimplexPoint{{0.25, 0.25}});
  CHECK(rep.label == StabilityLabel::Stable);
  CHECK(rep.property.holds);
  CHECK(*rep.max_real_part <= 1e-9);

  const auto cyc = testutil::fixture("cycle4.json");
  rep = classify(cyc, uniform_point(cyc));
  CHECK(rep.label == StabilityLabel::Unstable);
  CHECK(*rep.max_real_part == Approx(2.0).epsilon(1e-9));
  CHECK_FALSE(rep.property.holds);

  rep = classify(path, SimplexPoint{{0.5, 0.0}});
  CHECK(rep.label == StabilityLabel::Boundary);
  CHECK(rep.boundary);

  const auto p12 = testutil::fixture("path12.json");
  rep = classify(p12, uniform_point(p12));
  CHECK(rep.label == StabilityLabel::NotEquilibrium);
  CHECK(rep.residuals.F_l1 == Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(rep.jacobian.has_value());
  CHECK_THROWS_AS(jacobian(p12, uniform_point(p12)), Error);
  JacobianOptions allow;
  allow.allow_non_equilibrium = true;
  CHECK(jacobian(p12, uniform_point(p12), allow).matrix.rows() == 2);

  CHECK_THROWS_AS(classify(path, SimplexPoint{{0.5, 0.5}}), Error);
}

TEST_CASE("non-star equilibria are unstable, stable ones satisfy P") {
  RandomStream rng(123);
  for (const char* name : {"path3.json", "cycle4.json", "star4.json", "two_edges.json", "k4_mixed.json"}) {
    const auto g = testutil::fixture(name);
    const std::size_t m = g.edge_count();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
      std::vector<EdgeId> support;
      for (EdgeId e = 0; e < m; ++e)
        if (mask >> e & 1) support.push_back(e);
      for (int start = 0; start < 3; ++start) {
        const auto eq = oracle::solve_equilibrium(g, support, rng);
        if (!eq) continue;
        const auto rep = classify(g, *eq);
        const bool P = check_property_P(g, support_graph(g, *eq)).holds;
        CHECK((rep.label == StabilityLabel::Stable) == P);
        CHECK(in_gamma_G(g, *eq) == P);
      }
    }
  }
}
