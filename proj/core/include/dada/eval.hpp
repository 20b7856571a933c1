#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dada/boost.hpp"
#include "dada/types.hpp"

namespace dada {

enum class Split { train, test };

/// sign(sum_j alpha_j h_j(x)) with sign(0) = +1.
Label predict(const SparseModel& alpha, const StumpEnsemble& stumps, std::span<const double> x);

struct AccuracyReport {
  double mean = 0.0;              ///< unweighted mean over users with samples
  std::vector<double> per_user;   ///< NaN for users without samples in the split
};

/// Fraction of correctly classified rows of one user.
double user_accuracy(const SparseModel& alpha, const StumpEnsemble& stumps, const Matrix& x,
                     std::span<const Label> y);

AccuracyReport average_accuracy(std::span<const SparseModel> models, const PartitionedDataset& dataset,
                                const StumpEnsemble& stumps, Split split);

/// Margin matrices and confidences of `dataset` for the given hyperparameters.
BoostProblem make_boost_problem(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                                double beta, double mu1);

/// Frank-Wolfe on c_k L_k alone for every user (unit degree, no neighbours),
/// `steps` iterations each with gamma = 2 / (t_k + 2).
ModelState run_local_boost(const BoostProblem& problem, std::size_t steps);
ModelState run_local_boost(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                           double beta, std::size_t steps);

/// One model fitted by Frank-Wolfe on the pooled training rows of all users.
SparseModel run_global_boost(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                             double beta, std::size_t steps);

}  // namespace dada
