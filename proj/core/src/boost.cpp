#include "dada/boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dada {

ModelState ModelState::zeros(std::size_t num_users, std::size_t dim, double l1_budget) {
  ModelState state;
  state.models.assign(num_users, SparseModel(dim, l1_budget));
  return state;
}

std::vector<double> margins_of(const MarginMatrix& margins, const SparseModel& alpha) {
  std::vector<double> z(margins.rows(), 0.0);
  for (const auto& [j, v] : alpha.coefficients) {
    for (std::size_t i = 0; i < margins.rows(); ++i) z[i] += margins(i, j) * v;
  }
  return z;
}

double local_loss(const MarginMatrix& margins, const SparseModel& alpha) {
  const std::vector<double> z = margins_of(margins, alpha);
  if (z.empty()) return 0.0;
  double shift = -z.front();
  for (double zi : z) shift = std::max(shift, -zi);
  double s = 0.0;
  for (double zi : z) s += std::exp(-zi - shift);
  return shift + std::log(s / static_cast<double>(z.size()));
}

std::vector<double> ada_weights(const MarginMatrix& margins, const SparseModel& alpha) {
  std::vector<double> w = margins_of(margins, alpha);
  if (w.empty()) return w;
  double shift = -w.front();
  for (double zi : w) shift = std::max(shift, -zi);
  double s = 0.0;
  for (double& v : w) {
    v = std::exp(-v - shift);
    s += v;
  }
  for (double& v : w) v /= s;
  return w;
}

std::vector<double> model_gradient(const MarginMatrix& margins, const SparseModel& alpha,
                                   double degree, double confidence, double mu1,
                                   std::span<const NeighborModel> neighbors) {
  const std::size_t n = margins.cols();
  std::vector<double> grad(n, 0.0);
  if (degree == 0.0) return grad;

  const std::vector<double> weights = ada_weights(margins, alpha);
  const double loss_scale = -degree * confidence;
  for (std::size_t i = 0; i < margins.rows(); ++i) {
    const double wi = loss_scale * weights[i];
    const auto row = margins.row(i);
    for (std::size_t j = 0; j < n; ++j) grad[j] += wi * row[j];
  }
  if (mu1 != 0.0) {
    for (const auto& [j, v] : alpha.coefficients) grad[j] += mu1 * degree * v;
    for (const NeighborModel& nb : neighbors) {
      for (const auto& [j, v] : nb.model->coefficients) grad[j] -= mu1 * nb.weight * v;
    }
  }
  return grad;
}

std::vector<double> partial_gradient_model(std::size_t k, const ModelState& state,
                                           const CollaborationGraph& graph, double confidence,
                                           const MarginMatrix& margins, double mu1) {
  std::vector<NeighborModel> nbrs;
  for (std::size_t l : graph.neighbors(k)) nbrs.push_back({graph.weight(k, l), &state.models.at(l)});
  return model_gradient(margins, state.models.at(k), graph.degree(k), confidence, mu1, nbrs);
}

LmoResult fw_lmo(std::span<const double> grad, double beta) {
  if (grad.empty()) throw std::invalid_argument("fw_lmo: empty gradient");
  std::size_t best = 0;
  double best_abs = std::abs(grad[0]);
  for (std::size_t j = 1; j < grad.size(); ++j) {
    const double a = std::abs(grad[j]);
    if (a > best_abs) {
      best_abs = a;
      best = j;
    }
  }
  return {best, beta * sign_of(-grad[best])};
}

SparseModel fw_step(const SparseModel& alpha, const LmoResult& atom, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("fw_step: gamma must lie in [0,1]");
  if (atom.index >= alpha.dim) throw std::out_of_range("fw_step: atom index out of range");
  SparseModel next = alpha;
  ++next.update_count;
  if (gamma == 0.0) return next;
  const double keep = 1.0 - gamma;
  for (auto it = next.coefficients.begin(); it != next.coefficients.end();) {
    it->second *= keep;
    it = it->second == 0.0 ? next.coefficients.erase(it) : std::next(it);
  }
  const double added = next.coefficient(atom.index) + gamma * atom.value;
  if (added == 0.0) {
    next.coefficients.erase(atom.index);
  } else {
    next.coefficients[atom.index] = added;
  }
  return next;
}

double step_size(std::size_t t, std::size_t num_users) {
  const double two_k = 2.0 * static_cast<double>(num_users);
  return two_k / (static_cast<double>(t) + two_k);
}

double objective_f(const ModelState& state, const CollaborationGraph& graph,
                   const BoostProblem& problem) {
  double f = 0.0;
  for (std::size_t k = 0; k < problem.num_users(); ++k) {
    const double d = graph.degree(k);
    if (d != 0.0) f += d * problem.confidences[k] * local_loss(problem.margins[k], state.models[k]);
  }
  if (problem.mu1 != 0.0) {
    double smooth = 0.0;
    for (const auto& [edge, w] : graph.edges()) {
      smooth += w * squared_distance(state.models[edge.first], state.models[edge.second]);
    }
    f += 0.5 * problem.mu1 * smooth;
  }
  return f;
}

double duality_gap(const ModelState& state, const CollaborationGraph& graph,
                   const BoostProblem& problem) {
  double gap = 0.0;
  for (std::size_t k = 0; k < problem.num_users(); ++k) {
    const std::vector<double> g = partial_gradient_model(k, state, graph, problem.confidences[k],
                                                         problem.margins[k], problem.mu1);
    double inf_norm = 0.0;
    for (double v : g) inf_norm = std::max(inf_norm, std::abs(v));
    double inner = 0.0;
    for (const auto& [j, v] : state.models[k].coefficients) inner += v * g[j];
    gap += inner + problem.beta * inf_norm;
  }
  return gap;
}

double operator_one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double spectral_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  std::vector<double> v(a.cols(), 1.0 / std::sqrt(static_cast<double>(a.cols())));
  std::vector<double> av(a.rows());
  double sigma = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const auto row = a.row(i);
      av[i] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
    }
    std::vector<double> next(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const auto row = a.row(i);
      for (std::size_t j = 0; j < a.cols(); ++j) next[j] += row[j] * av[i];
    }
    const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm == 0.0) return 0.0;
    for (double& x : next) x /= norm;
    const double prev = sigma;
    sigma = std::sqrt(norm);
    v.swap(next);
    if (std::abs(sigma - prev) <= 1e-12 * sigma) break;
  }
  return sigma;
}

double curvature_bound(const CollaborationGraph& graph, std::span<const double> confidences,
                       std::span<const double> margin_norms, double beta, double mu1) {
  double s = 0.0;
  for (std::size_t k = 0; k < graph.num_users(); ++k) {
    s += graph.degree(k) * (confidences[k] * margin_norms[k] * margin_norms[k] + mu1);
  }
  return 4.0 * beta * beta * s;
}

double curvature_bound(const CollaborationGraph& graph, const BoostProblem& problem) {
  std::vector<double> norms;
  norms.reserve(problem.num_users());
  for (const MarginMatrix& a : problem.margins) norms.push_back(operator_one_norm(a));
  return curvature_bound(graph, problem.confidences, norms, problem.beta, problem.mu1);
}

LmoResult fw_activate(std::size_t k, ModelState& state, const CollaborationGraph& graph,
                      const BoostProblem& problem) {
  const std::vector<double> g = partial_gradient_model(k, state, graph, problem.confidences[k],
                                                       problem.margins[k], problem.mu1);
  const LmoResult atom = fw_lmo(g, problem.beta);
  state.models[k] = fw_step(state.models[k], atom, step_size(state.global_step, problem.num_users()));
  ++state.global_step;
  return atom;
}

}  // namespace dada
