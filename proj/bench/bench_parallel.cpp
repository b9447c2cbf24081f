// Serial reference vs OpenMP kernels: replica campaigns and batched field evaluation.
#include <chrono>
#include <cstdio>
#include <vector>

#include "netform/harness.hpp"
#include "netform/meanfield.hpp"
#include "netform/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

netform::WeightedGame k6() {
  std::vector<netform::EdgeSpec> edges;
  for (netform::Vertex i = 0; i < 6; ++i)
    for (netform::Vertex j = i + 1; j < 6; ++j) edges.push_back({i, j, 1.0 + 0.25 * ((i + j) % 3), 1.0});
  return netform::build_game(6, edges, netform::nature_full(6));
}

}  // namespace

int main() {
  const auto game = k6();
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("threads: %d\n", threads);

  netform::Campaign c;
  c.replicas = 32;
  c.horizon = 200000;
  c.seed_base = 1;
  c.analysis = netform::AnalysisKind::LinearGrowth;
  std::vector<netform::ReplicaResult> a, b;
  const double ts = seconds([&] { a = netform::run_replicas_serial(game, c); });
  const double tp = seconds([&] { b = netform::run_replicas(game, c, threads); });
  std::printf("run_replicas     serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s\n", ts, tp, ts / tp,
              a == b ? "yes" : "no");

  netform::RandomStream rng(9);
  std::vector<netform::SimplexPoint> pts(200000);
  for (auto& p : pts) {
    p.x.resize(game.edge_count());
    for (auto& v : p.x) v = 0.05 + rng.uniform();
    netform::renormalize(p);
  }
  std::vector<netform::FieldValues> fs, fp;
  const double es = seconds([&] { fs = netform::evaluate_batch_serial(game, pts); });
  const double ep = seconds([&] { fp = netform::evaluate_batch(game, pts, threads); });
  bool same = fs.size() == fp.size();
  for (std::size_t k = 0; same && k < fs.size(); ++k) same = fs[k].F == fp[k].F && fs[k].H == fp[k].H;
  std::printf("evaluate_batch   serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s\n", es, ep, es / ep,
              same ? "yes" : "no");
  return 0;
}
