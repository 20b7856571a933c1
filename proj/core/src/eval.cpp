#include "dada/eval.hpp"

#include <cmath>
#include <limits>

#include "dada/datagen.hpp"

namespace dada {

Label predict(const SparseModel& alpha, const StumpEnsemble& stumps, std::span<const double> x) {
  double score = 0.0;
  for (const auto& [j, v] : alpha.coefficients) score += v * stumps.stumps[j](x);
  return sign_of(score);
}

double user_accuracy(const SparseModel& alpha, const StumpEnsemble& stumps, const Matrix& x,
                     std::span<const Label> y) {
  if (y.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (predict(alpha, stumps, x.row(i)) == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

AccuracyReport average_accuracy(std::span<const SparseModel> models, const PartitionedDataset& dataset,
                                const StumpEnsemble& stumps, Split split) {
  if (models.size() != dataset.num_users()) {
    throw std::invalid_argument("average_accuracy: one model per user expected");
  }
  AccuracyReport report;
  report.per_user.reserve(models.size());
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const UserData& u = dataset.users[k];
    const double acc = split == Split::train ? user_accuracy(models[k], stumps, u.train_x, u.train_y)
                                             : user_accuracy(models[k], stumps, u.test_x, u.test_y);
    report.per_user.push_back(acc);
    if (!std::isnan(acc)) {
      sum += acc;
      ++counted;
    }
  }
  report.mean = counted == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : sum / static_cast<double>(counted);
  return report;
}

BoostProblem make_boost_problem(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                                double beta, double mu1) {
  BoostProblem problem;
  problem.margins = margin_matrices(dataset, stumps);
  problem.confidences.reserve(dataset.num_users());
  for (const UserData& u : dataset.users) problem.confidences.push_back(u.confidence);
  problem.beta = beta;
  problem.mu1 = mu1;
  return problem;
}

ModelState run_local_boost(const BoostProblem& problem, std::size_t steps) {
  ModelState state = ModelState::zeros(problem.num_users(), problem.num_predictors(), problem.beta);
  for (std::size_t k = 0; k < problem.num_users(); ++k) {
    SparseModel& alpha = state.models[k];
    for (std::size_t t = 0; t < steps; ++t) {
      const std::vector<double> g =
          model_gradient(problem.margins[k], alpha, 1.0, problem.confidences[k], 0.0, {});
      alpha = fw_step(alpha, fw_lmo(g, problem.beta), step_size(t, 1));
    }
  }
  state.global_step = steps * problem.num_users();
  return state;
}

ModelState run_local_boost(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                           double beta, std::size_t steps) {
  return run_local_boost(make_boost_problem(dataset, stumps, beta, 0.0), steps);
}

SparseModel run_global_boost(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                             double beta, std::size_t steps) {
  UserData pooled;
  for (const UserData& u : dataset.users) {
    for (std::size_t i = 0; i < u.num_train(); ++i) {
      pooled.train_x.append_row(u.train_x.row(i));
      pooled.train_y.push_back(u.train_y[i]);
    }
  }
  BoostProblem problem;
  problem.margins.push_back(margin_matrix(pooled, stumps));
  problem.confidences.push_back(1.0);
  problem.beta = beta;
  return std::move(run_local_boost(problem, steps).models.front());
}

}  // namespace dada
