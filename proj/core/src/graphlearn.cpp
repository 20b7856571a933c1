#include "dada/graphlearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dada {

LogDegreeRegularizer::LogDegreeRegularizer(double lambda, double delta)
    : lambda_(lambda), delta_(delta) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
}

double LogDegreeRegularizer::degree_value(double d) const { return -std::log(d + delta_); }

double LogDegreeRegularizer::block_lipschitz(std::size_t kappa) const {
  return (static_cast<double>(kappa) + 1.0) / (delta_ * delta_) + 2.0 * lambda_;
}

double LogDegreeRegularizer::full_lipschitz(std::size_t num_users) const {
  // The incidence matrix B of the complete graph has ||B^T B|| = 2(K-1).
  const double k = static_cast<double>(num_users);
  return 2.0 * (k - 1.0) / (delta_ * delta_) + 2.0 * lambda_;
}

double GraphObjectiveCtx::model_sq_dist(std::size_t k, std::size_t l) const {
  if (!sq_dist.empty()) return sq_dist[k * num_users() + l];
  return squared_distance((*models)[k], (*models)[l]);
}

void GraphObjectiveCtx::cache_distances() {
  const std::size_t n = num_users();
  sq_dist.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const double d = squared_distance((*models)[k], (*models)[l]);
      sq_dist[k * n + l] = d;
      sq_dist[l * n + k] = d;
    }
  }
}

GraphObjectiveCtx make_graph_ctx(const std::vector<SparseModel>& models, const BoostProblem& problem,
                                 const Hyperparams& hyper) {
  GraphObjectiveCtx ctx;
  ctx.loss_terms.resize(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    ctx.loss_terms[k] = problem.confidences[k] * local_loss(problem.margins[k], models[k]);
  }
  ctx.models = &models;
  ctx.mu1 = hyper.mu1;
  ctx.mu2 = hyper.mu2();
  ctx.regularizer = std::make_shared<LogDegreeRegularizer>(hyper.lambda, hyper.delta);
  return ctx;
}

double graph_objective(const CollaborationGraph& w, const GraphObjectiveCtx& ctx) {
  const std::size_t num_users = ctx.num_users();
  double h = 0.0;
  double reg = 0.0;
  for (std::size_t k = 0; k < num_users; ++k) {
    const double d = w.degree(k);
    h += d * ctx.loss_terms[k];
    reg += ctx.regularizer->degree_value(d);
  }
  double smooth = 0.0;
  for (const auto& [edge, weight] : w.edges()) {
    if (weight < 0.0) throw std::invalid_argument("graph_objective: negative weight");
    if (ctx.mu1 != 0.0) smooth += weight * ctx.model_sq_dist(edge.first, edge.second);
    reg += ctx.regularizer->edge_value(weight);
  }
  // Absent edges contribute g_edge(0), which is zero for the shipped regularizer.
  return h + 0.5 * ctx.mu1 * smooth + ctx.mu2 * reg;
}

std::vector<double> block_gradient(std::size_t k, std::span<const std::size_t> block,
                                   const CollaborationGraph& w, const GraphObjectiveCtx& ctx) {
  std::vector<double> grad;
  grad.reserve(block.size());
  const double dk_term = ctx.regularizer->degree_derivative(w.degree(k));
  for (std::size_t l : block) {
    if (l == k) throw std::invalid_argument("block_gradient: block contains the active user");
    const double p = ctx.loss_terms[k] + ctx.loss_terms[l];
    const double dist = ctx.mu1 != 0.0 ? ctx.model_sq_dist(k, l) : 0.0;
    const double v = dk_term + ctx.regularizer->degree_derivative(w.degree(l)) +
                     ctx.regularizer->edge_derivative(w.weight(k, l));
    grad.push_back(p + 0.5 * ctx.mu1 * dist + ctx.mu2 * v);
  }
  return grad;
}

double block_lipschitz(std::size_t kappa, double mu2, double lambda, double delta) {
  return mu2 * ((static_cast<double>(kappa) + 1.0) / (delta * delta) + 2.0 * lambda);
}

std::vector<double> pcd_update(CollaborationGraph& w, std::size_t k,
                               std::span<const std::size_t> block, const GraphObjectiveCtx& ctx) {
  const std::vector<double> grad = block_gradient(k, block, w, ctx);
  const double lipschitz = ctx.mu2 * ctx.regularizer->block_lipschitz(block.size());
  if (!(lipschitz > 0.0)) throw std::invalid_argument("pcd_update: mu2 must be > 0");

  std::vector<double> next(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    double v = std::max(0.0, w.weight(k, block[i]) - grad[i] / lipschitz);
    if (v < kEdgeFloor) v = 0.0;
    next[i] = v;
  }
  for (std::size_t i = 0; i < block.size(); ++i) w.set_weight(k, block[i], next[i]);
  return next;
}

std::vector<std::size_t> peer_sample_from(std::span<const std::size_t> candidates, std::size_t kappa,
                                          std::mt19937_64& rng) {
  if (kappa == 0 || kappa > candidates.size()) {
    throw std::invalid_argument("peer_sample: kappa must lie in [1, " +
                                std::to_string(candidates.size()) + "]");
  }
  // Partial Fisher-Yates: the first kappa slots form a uniform kappa-subset.
  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  for (std::size_t i = 0; i < kappa; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(kappa);
  return pool;
}

std::vector<std::size_t> peer_sample(std::size_t k, std::size_t kappa, std::size_t num_users,
                                     std::mt19937_64& rng) {
  if (k >= num_users) throw std::out_of_range("peer_sample: user index out of range");
  if (num_users < 2 || kappa == 0 || kappa > num_users - 1) {
    throw std::invalid_argument("peer_sample: kappa must lie in [1, K-1]");
  }
  std::vector<std::size_t> others;
  others.reserve(num_users - 1);
  for (std::size_t l = 0; l < num_users; ++l) {
    if (l != k) others.push_back(l);
  }
  return peer_sample_from(others, kappa, rng);
}

ShrinkReport shrink_factor(std::size_t kappa, std::size_t num_users, double mu1, double lambda,
                           double delta) {
  if (num_users < 2) throw std::invalid_argument("shrink_factor: need K >= 2");
  const LogDegreeRegularizer reg(lambda, delta);
  ShrinkReport out;
  out.sigma = mu1 * reg.strong_convexity();
  out.l_max = block_lipschitz(kappa, mu1, lambda, delta);
  const double pairs = static_cast<double>(num_users) * static_cast<double>(num_users - 1);
  out.rho = 1.0 - 2.0 * static_cast<double>(kappa) * out.sigma / (pairs * out.l_max);
  if (!(out.rho > 0.0 && out.rho < 1.0)) {
    throw std::invalid_argument("shrink_factor: rho outside (0,1); check mu1, lambda, delta");
  }
  return out;
}

std::vector<std::size_t> prune_candidates(std::size_t k, std::span<const SparseModel> models,
                                          std::size_t keep) {
  if (k >= models.size()) throw std::out_of_range("prune_candidates: user index out of range");
  if (keep > models.size() - 1) throw std::invalid_argument("prune_candidates: keep exceeds K-1");
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(models.size() - 1);
  for (std::size_t l = 0; l < models.size(); ++l) {
    if (l != k) order.emplace_back(squared_distance(models[k], models[l]), l);
  }
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(order[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dada
