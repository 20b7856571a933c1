#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "dada/boost.hpp"
#include "dada/types.hpp"

namespace dada {

/// Weight- and degree-separable graph regularizer
///   g(w) = sum_{k<l} g_edge(w_{k,l}) + sum_k g_degree(d_k(w)).
class GraphRegularizer {
 public:
  virtual ~GraphRegularizer() = default;

  virtual double edge_value(double w) const = 0;
  virtual double edge_derivative(double w) const = 0;
  virtual double degree_value(double d) const = 0;
  virtual double degree_derivative(double d) const = 0;

  /// Upper bound on the Lipschitz constant of the gradient of g restricted to
  /// a block of kappa weights sharing one endpoint.
  virtual double block_lipschitz(std::size_t kappa) const = 0;
  /// Same bound for the full gradient over all K(K-1)/2 weights.
  virtual double full_lipschitz(std::size_t num_users) const = 0;
  /// Strong-convexity modulus of g.
  virtual double strong_convexity() const = 0;
};

/// g(w) = lambda ||w||^2 - sum_k log(d_k(w) + delta).
class LogDegreeRegularizer final : public GraphRegularizer {
 public:
  LogDegreeRegularizer(double lambda, double delta);

  double edge_value(double w) const override { return lambda_ * w * w; }
  double edge_derivative(double w) const override { return 2.0 * lambda_ * w; }
  double degree_value(double d) const override;
  double degree_derivative(double d) const override { return -1.0 / (d + delta_); }
  double block_lipschitz(std::size_t kappa) const override;
  double full_lipschitz(std::size_t num_users) const override;
  double strong_convexity() const override { return 2.0 * lambda_; }

  double lambda() const noexcept { return lambda_; }
  double delta() const noexcept { return delta_; }

 private:
  double lambda_;
  double delta_;
};

/// Fixed-model quantities of the graph objective h(w). Loss terms are frozen
/// for a graph phase; model distances are read from `models` on demand.
struct GraphObjectiveCtx {
  std::vector<double> loss_terms;  ///< c_k L_k(alpha_k)
  const std::vector<SparseModel>* models = nullptr;
  double mu1 = 0.0;
  double mu2 = 0.0;
  std::shared_ptr<const GraphRegularizer> regularizer;
  /// Optional K x K table of squared model distances; see cache_distances.
  std::vector<double> sq_dist;

  std::size_t num_users() const noexcept { return loss_terms.size(); }
  double model_sq_dist(std::size_t k, std::size_t l) const;
  /// Fills sq_dist from `models`. The models must not change afterwards.
  void cache_distances();
};

/// Recomputes c_k L_k from the current models.
GraphObjectiveCtx make_graph_ctx(const std::vector<SparseModel>& models, const BoostProblem& problem,
                                 const Hyperparams& hyper);

struct ShrinkReport {
  double sigma = 0.0;
  double l_max = 0.0;
  double rho = 0.0;
};

/// h(w) = sum_k d_k loss_k + (mu1/2) sum w ||a_k - a_l||^2 + mu2 g(w).
double graph_objective(const CollaborationGraph& w, const GraphObjectiveCtx& ctx);

/// Partial gradient of h over the weights {(k, l)}_{l in block}.
std::vector<double> block_gradient(std::size_t k, std::span<const std::size_t> block,
                                   const CollaborationGraph& w, const GraphObjectiveCtx& ctx);

/// mu2 ((kappa + 1) / delta^2 + 2 lambda).
double block_lipschitz(std::size_t kappa, double mu2, double lambda, double delta);

/// Weights below this are stored as exact zeros after an update.
inline constexpr double kEdgeFloor = 1e-12;

/// w_{k,block} <- max(0, w_{k,block} - grad / L) with L from the regularizer.
/// Returns the new block weights.
std::vector<double> pcd_update(CollaborationGraph& w, std::size_t k,
                               std::span<const std::size_t> block, const GraphObjectiveCtx& ctx);

/// kappa distinct users drawn uniformly from [K] \ {k}.
std::vector<std::size_t> peer_sample(std::size_t k, std::size_t kappa, std::size_t num_users,
                                     std::mt19937_64& rng);

/// kappa distinct users drawn uniformly from `candidates` (which must not contain k).
std::vector<std::size_t> peer_sample_from(std::span<const std::size_t> candidates, std::size_t kappa,
                                          std::mt19937_64& rng);

/// sigma = mu2 * strong convexity of g, L_max = block_lipschitz, and
/// rho = 1 - 2 kappa sigma / (K (K-1) L_max).
ShrinkReport shrink_factor(std::size_t kappa, std::size_t num_users, double mu1, double lambda,
                           double delta);

/// The `keep` users closest to k in squared model distance, ties broken by index.
std::vector<std::size_t> prune_candidates(std::size_t k, std::span<const SparseModel> models,
                                          std::size_t keep);

}  // namespace dada
