#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dada/boost.hpp"
#include "dada/datagen.hpp"
#include "dada/eval.hpp"
#include "dada/graphlearn.hpp"
#include "dada/types.hpp"

namespace dada::testing {

inline PartitionedDataset random_dataset(std::mt19937_64& rng, std::size_t users, std::size_t dim,
                                         std::size_t m_lo, std::size_t m_hi, std::size_t m_test = 4) {
  std::uniform_int_distribution<std::size_t> m_dist(m_lo, m_hi);
  std::normal_distribution<double> x_dist(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  PartitionedDataset ds;
  ds.feature_dim = dim;
  for (std::size_t k = 0; k < users; ++k) {
    UserData u;
    std::vector<double> row(dim);
    const std::size_t m = m_dist(rng);
    for (std::size_t i = 0; i < m; ++i) {
      for (double& v : row) v = x_dist(rng);
      u.train_x.append_row(row);
      u.train_y.push_back(coin(rng) ? 1 : -1);
    }
    for (std::size_t i = 0; i < m_test; ++i) {
      for (double& v : row) v = x_dist(rng);
      u.test_x.append_row(row);
      u.test_y.push_back(coin(rng) ? 1 : -1);
    }
    ds.users.push_back(std::move(u));
  }
  assign_confidences(ds);
  return ds;
}

inline StumpEnsemble random_stumps(std::mt19937_64& rng, std::size_t dim, std::size_t n) {
  std::uniform_int_distribution<std::size_t> f(0, dim - 1);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  StumpEnsemble s;
  for (std::size_t j = 0; j < n; ++j) s.stumps.push_back({f(rng), t(rng), coin(rng) ? 1 : -1});
  return s;
}

/// Random point strictly inside the L1 ball of radius beta.
inline SparseModel random_model(std::mt19937_64& rng, std::size_t n, double beta) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SparseModel m(n, beta);
  std::vector<double> v(n);
  double l1 = 0.0;
  for (double& x : v) {
    x = u(rng);
    l1 += std::abs(x);
  }
  const double scale = 0.9 * beta / l1;
  for (std::size_t j = 0; j < n; ++j) m.coefficients[j] = v[j] * scale;
  return m;
}

inline CollaborationGraph random_graph(std::mt19937_64& rng, std::size_t users, double p = 0.6) {
  CollaborationGraph g(users);
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  for (std::size_t k = 0; k < users; ++k) {
    for (std::size_t l = k + 1; l < users; ++l) {
      if (edge(rng)) g.set_weight(k, l, w(rng));
    }
  }
  return g;
}

}  // namespace dada::testing
