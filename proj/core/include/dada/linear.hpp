#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dada/eval.hpp"
#include "dada/types.hpp"

namespace dada {

/// x -> sign(w^T x + bias).
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> x) const;
  Label predict(std::span<const double> x) const { return sign_of(score(x)); }
};

struct LinearFit {
  LinearModel model;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// Minimises (1/m) sum_i log(1 + exp(-y_i (w^T x_i + b))) + (l2/2)(||w||^2 + b^2)
/// by damped Newton steps until the gradient norm is at most `tol`.
LinearFit fit_logistic(const Matrix& x, std::span<const Label> y, double l2, double tol = 1e-6,
                       std::size_t max_iter = 100);

/// Value and gradient of the objective above at (w, b), for checking fits.
double logistic_objective(const Matrix& x, std::span<const Label> y, double l2, const LinearModel& m,
                          std::vector<double>* grad = nullptr);

enum class LinearMode { global, local };

/// One model per user: the pooled fit repeated (global) or a fit per user (local).
std::vector<LinearModel> run_linear_baselines(const PartitionedDataset& dataset, LinearMode mode,
                                              double l2);

AccuracyReport linear_accuracy(std::span<const LinearModel> models, const PartitionedDataset& dataset,
                               Split split);

}  // namespace dada
