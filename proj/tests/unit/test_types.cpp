#include <doctest.h>

#include <random>

#include "dada/types.hpp"
#include "helpers.hpp"

using namespace dada;

TEST_CASE("matrix append_row fixes width") {
  Matrix m;
  const std::vector<double> a{1, 2, 3};
  m.append_row(a);
  m.append_row(a);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 3.0);
  const std::vector<double> bad{1, 2};
  CHECK_THROWS_AS(m.append_row(bad), std::invalid_argument);
}

TEST_CASE("sign_of breaks ties toward +1") {
  CHECK(sign_of(0.0) == 1);
  CHECK(sign_of(-0.0) == 1);
  CHECK(sign_of(-1e-300) == -1);
  Stump s{0, 0.5, -1};
  const std::vector<double> at{0.5};
  CHECK(s(at) == -1);
}

TEST_CASE("confidences are relative to the largest user") {
  PartitionedDataset ds;
  ds.feature_dim = 1;
  for (std::size_t m : {2u, 4u, 8u}) {
    UserData u;
    for (std::size_t i = 0; i < m; ++i) {
      u.train_x.append_row(std::vector<double>{double(i)});
      u.train_y.push_back(1);
    }
    ds.users.push_back(u);
  }
  const auto c = confidences(ds);
  CHECK(c[0] == doctest::Approx(0.25));
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK(c[2] == 1.0);
  ds.validate();
  ds.users[1].train_y[0] = 0;
  CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("dataset validation rejects empty users and ragged rows") {
  PartitionedDataset ds;
  ds.feature_dim = 2;
  CHECK_THROWS(ds.validate());
  ds.users.emplace_back();
  CHECK_THROWS(ds.validate());
  ds.users[0].train_x.append_row(std::vector<double>{1.0});
  ds.users[0].train_y.push_back(1);
  CHECK_THROWS(ds.validate());
}

TEST_CASE("sparse model norms and distance") {
  SparseModel a(5, 3.0), b(5, 3.0);
  a.coefficients = {{0, 1.0}, {2, -2.0}};
  b.coefficients = {{2, 1.0}, {4, 0.5}};
  CHECK(a.l1_norm() == 3.0);
  CHECK(a.squared_norm() == 5.0);
  CHECK(squared_distance(a, b) == doctest::Approx(1.0 + 9.0 + 0.25));
  CHECK(squared_distance(a, a) == 0.0);
  CHECK(a.to_dense() == std::vector<double>{1.0, 0.0, -2.0, 0.0, 0.0});
  CHECK(a.coefficient(3) == 0.0);
}

TEST_CASE("collaboration graph is symmetric with cached degrees") {
  CollaborationGraph g(4);
  g.set_weight(0, 1, 0.5);
  g.set_weight(2, 0, 1.5);
  CHECK(g.weight(1, 0) == 0.5);
  CHECK(g.weight(0, 2) == 1.5);
  CHECK(g.degree(0) == 2.0);
  CHECK(degree(g, 3) == 0.0);
  CHECK(g.edge_count() == 2);
  CHECK(g.mean_neighbor_count() == doctest::Approx(1.0));
  g.set_weight(0, 1, 0.0);
  CHECK(g.edge_count() == 1);
  CHECK(g.neighbors(1).empty());
  CHECK(g.degree(0) == 1.5);
  CHECK_THROWS_AS(g.set_weight(1, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.set_weight(0, 1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.weight(0, 9), std::out_of_range);
}

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  h.validate(100);
  h.kappa = 100;
  CHECK_THROWS(h.validate(100));
  h.kappa = 0;
  CHECK_THROWS(h.validate());
  h = {};
  h.lambda = 0.0;
  CHECK_THROWS(h.validate());
  h = {};
  h.delta = -1.0;
  CHECK_THROWS(h.validate());
  h = {};
  h.mu2_override = 3.0;
  CHECK(h.mu2() == 3.0);
}
