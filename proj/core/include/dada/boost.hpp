#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dada/types.hpp"

namespace dada {

/// Personalized models alpha = (alpha_1, ..., alpha_K) and the shared
/// Frank-Wolfe step counter.
struct ModelState {
  std::vector<SparseModel> models;
  std::size_t global_step = 0;

  static ModelState zeros(std::size_t num_users, std::size_t dim, double l1_budget);

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Everything the model objective needs besides the graph: margin matrices,
/// confidences and the two model hyperparameters.
struct BoostProblem {
  std::vector<MarginMatrix> margins;
  std::vector<double> confidences;
  double beta = 1.0;
  double mu1 = 0.0;

  std::size_t num_users() const noexcept { return margins.size(); }
  std::size_t num_predictors() const noexcept { return margins.empty() ? 0 : margins.front().cols(); }
};

struct FwCertificates {
  double objective = 0.0;
  double gap = 0.0;
  double curvature_bound = 0.0;
  double initial_gap = 0.0;
};

/// A_k alpha_k.
std::vector<double> margins_of(const MarginMatrix& margins, const SparseModel& alpha);

/// log((1/m) sum_i exp(-[A alpha]_i)), evaluated with a max shift.
double local_loss(const MarginMatrix& margins, const SparseModel& alpha);

/// Softmax of -A alpha: the boosting distribution over training points.
std::vector<double> ada_weights(const MarginMatrix& margins, const SparseModel& alpha);

/// Model of a neighbour l as seen by the active user, with w_{k,l}.
struct NeighborModel {
  double weight = 0.0;
  const SparseModel* model = nullptr;
};

/// -d c W^T A + mu1 (d alpha - sum_l w_l alpha_l), dense over the n predictors.
std::vector<double> model_gradient(const MarginMatrix& margins, const SparseModel& alpha,
                                   double degree, double confidence, double mu1,
                                   std::span<const NeighborModel> neighbors);

/// Block k of the gradient of objective_f, reading neighbour models from state.
std::vector<double> partial_gradient_model(std::size_t k, const ModelState& state,
                                           const CollaborationGraph& graph, double confidence,
                                           const MarginMatrix& margins, double mu1);

struct LmoResult {
  std::size_t index = 0;
  double value = 0.0;  ///< +beta or -beta
  friend bool operator==(const LmoResult&, const LmoResult&) = default;
};

/// Vertex of the L1 ball minimising s^T grad. Ties go to the lowest index and
/// a zero entry yields +beta.
LmoResult fw_lmo(std::span<const double> grad, double beta);

/// (1 - gamma) alpha + gamma * value * e_index. Throws for gamma outside [0,1].
SparseModel fw_step(const SparseModel& alpha, const LmoResult& atom, double gamma);

/// 2K / (t + 2K) where t counts completed global steps.
double step_size(std::size_t t, std::size_t num_users);

/// sum_k d_k c_k L_k(alpha_k) + (mu1/2) sum_{k<l} w_{k,l} ||alpha_k - alpha_l||^2.
double objective_f(const ModelState& state, const CollaborationGraph& graph,
                   const BoostProblem& problem);

/// sum_k [alpha_k^T grad_k + beta ||grad_k||_inf]; upper-bounds f - f*.
double duality_gap(const ModelState& state, const CollaborationGraph& graph,
                   const BoostProblem& problem);

/// Max absolute column sum.
double operator_one_norm(const Matrix& a);
/// Largest singular value, by power iteration on A^T A.
double spectral_norm(const Matrix& a);

/// 4 beta^2 sum_k d_k (c_k ||A_k||^2 + mu1) for the supplied per-user norms.
double curvature_bound(const CollaborationGraph& graph, std::span<const double> confidences,
                       std::span<const double> margin_norms, double beta, double mu1);

/// Curvature bound computed with the operator 1-norm of each A_k.
double curvature_bound(const CollaborationGraph& graph, const BoostProblem& problem);

/// One centralised Frank-Wolfe activation of user k: gradient from the true
/// models in `state`, LMO, step with gamma = step_size(state.global_step).
LmoResult fw_activate(std::size_t k, ModelState& state, const CollaborationGraph& graph,
                      const BoostProblem& problem);

}  // namespace dada
