#include <doctest.h>

#include <cmath>
#include <random>

#include "dada/boost.hpp"
#include "dada/eval.hpp"
#include "helpers.hpp"

using namespace dada;

namespace {

BoostProblem small_problem(std::mt19937_64& rng, std::size_t users, std::size_t n, double beta,
                           double mu1) {
  const PartitionedDataset ds = testing::random_dataset(rng, users, 3, 1, 5);
  const StumpEnsemble st = testing::random_stumps(rng, 3, n);
  return make_boost_problem(ds, st, beta, mu1);
}

}  // namespace

TEST_CASE("local loss matches the direct formula") {
  Matrix a(3, 2);
  a(0, 0) = 1;  a(0, 1) = -1;
  a(1, 0) = -1; a(1, 1) = -1;
  a(2, 0) = 1;  a(2, 1) = 1;
  SparseModel alpha(2, 5.0);
  alpha.coefficients = {{0, 0.7}, {1, -0.2}};
  const double z0 = 0.9, z1 = -0.5, z2 = 0.5;
  const double expected = std::log((std::exp(-z0) + std::exp(-z1) + std::exp(-z2)) / 3.0);
  CHECK(local_loss(a, alpha) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(local_loss(a, SparseModel(2, 5.0)) == doctest::Approx(0.0));
  // Large margins stay finite thanks to the max shift.
  alpha.coefficients = {{0, 900.0}};
  CHECK(std::isfinite(local_loss(a, alpha)));
  const auto w = ada_weights(a, SparseModel(2, 5.0));
  for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("model gradient matches central differences of f") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    BoostProblem p = small_problem(rng, 3, 6, 2.0, 0.7);
    const CollaborationGraph g = testing::random_graph(rng, 3, 0.8);
    ModelState s;
    for (std::size_t k = 0; k < 3; ++k) s.models.push_back(testing::random_model(rng, 6, 2.0));
    for (std::size_t k = 0; k < 3; ++k) {
      const auto grad = partial_gradient_model(k, s, g, p.confidences[k], p.margins[k], p.mu1);
      for (std::size_t j = 0; j < 6; ++j) {
        const double h = 1e-6;
        ModelState plus = s, minus = s;
        plus.models[k].coefficients[j] += h;
        minus.models[k].coefficients[j] -= h;
        const double fd = (objective_f(plus, g, p) - objective_f(minus, g, p)) / (2 * h);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("isolated users have zero gradient") {
  std::mt19937_64 rng(5);
  BoostProblem p = small_problem(rng, 2, 4, 1.0, 1.0);
  ModelState s = ModelState::zeros(2, 4, 1.0);
  const auto g = partial_gradient_model(0, s, CollaborationGraph(2), 1.0, p.margins[0], 1.0);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("lmo picks the largest magnitude with deterministic ties") {
  const std::vector<double> g{0.5, -2.0, 2.0, 1.0};
  CHECK(fw_lmo(g, 3.0) == LmoResult{1, 3.0});
  const std::vector<double> pos{1.0, 4.0, 4.0};
  CHECK(fw_lmo(pos, 2.0) == LmoResult{1, -2.0});
  const std::vector<double> zero{0.0, 0.0};
  CHECK(fw_lmo(zero, 2.0) == LmoResult{0, 2.0});
  CHECK_THROWS(fw_lmo(std::vector<double>{}, 1.0));
}

TEST_CASE("fw step is a convex combination with an atom") {
  SparseModel a(4, 2.0);
  a.coefficients = {{0, 1.0}, {2, -1.0}};
  const SparseModel b = fw_step(a, {2, 2.0}, 0.5);
  CHECK(b.coefficient(0) == doctest::Approx(0.5));
  CHECK(b.coefficient(2) == doctest::Approx(0.5));
  CHECK(b.update_count == 1);
  const SparseModel c = fw_step(a, {3, -2.0}, 1.0);
  CHECK(c.nnz() == 1);
  CHECK(c.coefficient(3) == -2.0);
  const SparseModel d = fw_step(a, {2, 2.0}, 1.0 / 3.0);
  CHECK(d.coefficient(2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS(fw_step(a, {0, 2.0}, 1.5));
  CHECK_THROWS(fw_step(a, {9, 2.0}, 0.5));
}

TEST_CASE("step size schedule") {
  CHECK(step_size(0, 10) == 1.0);
  CHECK(step_size(20, 10) == doctest::Approx(0.5));
  CHECK(step_size(180, 10) == doctest::Approx(0.1));
}

TEST_CASE("duality gap bounds suboptimality along a run") {
  std::mt19937_64 rng(17);
  BoostProblem p = small_problem(rng, 2, 5, 1.5, 0.3);
  CollaborationGraph g(2);
  g.set_weight(0, 1, 0.8);
  ModelState s = ModelState::zeros(2, 5, 1.5);
  double best = objective_f(s, g, p);
  std::vector<double> values;
  std::vector<double> gaps;
  for (int t = 0; t < 4000; ++t) {
    fw_activate(static_cast<std::size_t>(t % 2), s, g, p);
    values.push_back(objective_f(s, g, p));
    gaps.push_back(duality_gap(s, g, p));
    best = std::min(best, values.back());
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(gaps[i] >= -1e-12);
    CHECK(values[i] - best <= gaps[i] + 1e-9);
  }
}

TEST_CASE("curvature bound uses degrees, confidences and norms") {
  CollaborationGraph g(2);
  g.set_weight(0, 1, 2.0);
  const std::vector<double> c{1.0, 0.5};
  const std::vector<double> norms{3.0, 2.0};
  CHECK(curvature_bound(g, c, norms, 2.0, 1.0) ==
        doctest::Approx(4.0 * 4.0 * (2.0 * (9.0 + 1.0) + 2.0 * (0.5 * 4.0 + 1.0))));
  Matrix a(2, 2);
  a(0, 0) = 1; a(0, 1) = -3;
  a(1, 0) = 2; a(1, 1) = 1;
  CHECK(operator_one_norm(a) == 4.0);
  // Singular values of [[1,-3],[2,1]]: sqrt of eigenvalues of [[5,-1],[-1,10]].
  CHECK(spectral_norm(a) == doctest::Approx(std::sqrt((15.0 + std::sqrt(29.0)) / 2.0)).epsilon(1e-9));
}

TEST_CASE("local boost equals one user of a disconnected run") {
  std::mt19937_64 rng(23);
  BoostProblem p = small_problem(rng, 3, 6, 3.0, 0.0);
  const ModelState local = run_local_boost(p, 30);
  ModelState manual = ModelState::zeros(3, 6, 3.0);
  CollaborationGraph self(1);
  for (std::size_t k = 0; k < 3; ++k) {
    BoostProblem single;
    single.margins = {p.margins[k]};
    single.confidences = {p.confidences[k]};
    single.beta = 3.0;
    SparseModel a(6, 3.0);
    for (std::size_t t = 0; t < 30; ++t) {
      const auto g = model_gradient(p.margins[k], a, 1.0, p.confidences[k], 0.0, {});
      a = fw_step(a, fw_lmo(g, 3.0), 2.0 / (double(t) + 2.0));
    }
    CHECK(local.models[k] == a);
  }
}

TEST_CASE("global boost on one user equals local boost") {
  std::mt19937_64 rng(29);
  const PartitionedDataset ds = testing::random_dataset(rng, 1, 3, 5, 5);
  const StumpEnsemble st = testing::random_stumps(rng, 3, 8);
  const SparseModel global = run_global_boost(ds, st, 2.0, 40);
  const ModelState local = run_local_boost(ds, st, 2.0, 40);
  CHECK(global.coefficients == local.models[0].coefficients);
}

TEST_CASE("accuracy averages per user and ignores empty splits") {
  PartitionedDataset ds;
  ds.feature_dim = 1;
  StumpEnsemble st;
  st.stumps = {{0, 0.0, 1}};
  for (int k = 0; k < 2; ++k) {
    UserData u;
    u.train_x.append_row(std::vector<double>{1.0});
    u.train_y = {1};
    if (k == 0) {
      u.test_x.append_row(std::vector<double>{1.0});
      u.test_x.append_row(std::vector<double>{-1.0});
      u.test_y = {1, 1};
    }
    ds.users.push_back(u);
  }
  SparseModel a(1, 1.0);
  a.coefficients[0] = 1.0;
  const std::vector<SparseModel> models{a, a};
  const AccuracyReport r = average_accuracy(models, ds, st, Split::test);
  CHECK(r.mean == doctest::Approx(0.5));
  CHECK(std::isnan(r.per_user[1]));
  CHECK(average_accuracy(models, ds, st, Split::train).mean == 1.0);
  // The zero model predicts +1 everywhere.
  CHECK(predict(SparseModel(1, 1.0), st, std::vector<double>{-5.0}) == 1);
}
