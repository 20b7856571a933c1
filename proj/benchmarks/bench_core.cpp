#include <benchmark/benchmark.h>

#include <random>

#include "dada/boost.hpp"
#include "dada/datagen.hpp"
#include "dada/eval.hpp"
#include "dada/graphlearn.hpp"
#include "dada/netsim.hpp"

namespace {

using namespace dada;

struct MoonsFixture {
  MoonsData data;
  StumpEnsemble stumps;
  Hyperparams hyper;
  BoostProblem problem;
  ModelState local;

  MoonsFixture() {
    MoonsConfig cfg = MoonsConfig::standard();
    cfg.seed = 1;
    data = generate_moons(cfg);
    stumps = build_stumps(data.feature_ranges, 10);
    hyper.beta = 10.0;
    problem = make_boost_problem(data.dataset, stumps, hyper.beta, hyper.mu1);
    local = run_local_boost(problem, 100);
  }
};

const MoonsFixture& fixture() {
  static const MoonsFixture f;
  return f;
}

void BM_ModelGradient(benchmark::State& state) {
  const MoonsFixture& f = fixture();
  const CollaborationGraph graph =
      oracle_graph(f.data.angles_deg, MoonsConfig{}.oracle_sigma, MoonsConfig{}.oracle_drop_threshold);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_gradient_model(k, f.local, graph, f.problem.confidences[k],
                                                    f.problem.margins[k], f.hyper.mu1));
    k = (k + 1) % graph.num_users();
  }
}
BENCHMARK(BM_ModelGradient);

void BM_Lmo(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> grad(static_cast<std::size_t>(state.range(0)));
  for (double& v : grad) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fw_lmo(grad, 10.0));
}
BENCHMARK(BM_Lmo)->Arg(200)->Arg(2000);

void BM_PcdUpdate(benchmark::State& state) {
  const MoonsFixture& f = fixture();
  Hyperparams h = f.hyper;
  h.kappa = static_cast<std::size_t>(state.range(0));
  GraphObjectiveCtx ctx = make_graph_ctx(f.local.models, f.problem, h);
  ctx.cache_distances();
  CollaborationGraph w(f.local.models.size());
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, w.num_users() - 1);
  for (auto _ : state) {
    const std::size_t k = pick(rng);
    pcd_update(w, k, peer_sample(k, h.kappa, w.num_users(), rng), ctx);
  }
}
BENCHMARK(BM_PcdUpdate)->Arg(1)->Arg(5)->Arg(25);

void BM_NetworkModelStep(benchmark::State& state) {
  const MoonsFixture& f = fixture();
  const CollaborationGraph graph =
      oracle_graph(f.data.angles_deg, MoonsConfig{}.oracle_sigma, MoonsConfig{}.oracle_drop_threshold);
  Network net(f.data.dataset, f.stumps, f.hyper, graph, f.local);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, graph.num_users() - 1);
  for (auto _ : state) net.model_step(pick(rng));
}
BENCHMARK(BM_NetworkModelStep);

}  // namespace
BENCHMARK_MAIN();
