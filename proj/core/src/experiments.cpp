#include "dada/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dada {

namespace {

constexpr std::uint32_t kFoldStream = 3;
constexpr std::uint32_t kSweepStream = 2;

const std::pair<Method, const char*> kMethodNames[] = {
    {Method::dada_learned, "dada_learned"}, {Method::dada_oracle, "dada_oracle"},
    {Method::local_boost, "local_boost"},   {Method::global_boost, "global_boost"},
    {Method::local_linear, "local_linear"}, {Method::global_linear, "global_linear"},
};

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool uses_mu(Method m) { return m != Method::local_boost && m != Method::global_boost; }
bool uses_beta(Method m) { return m != Method::local_linear && m != Method::global_linear; }

}  // namespace

const char* method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& [method, label] : kMethodNames) {
    if (name == label) return method;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

MethodResult run_method(Method method, const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                        const Hyperparams& hyper, const ScheduleConfig& sched,
                        const CollaborationGraph* oracle) {
  MethodResult out;
  out.method = method;
  const std::size_t local_steps = sched.local_steps.value_or(sched.model_steps_per_phase);
  switch (method) {
    case Method::local_boost:
      out.boost_models = run_local_boost(dataset, stumps, hyper.beta, local_steps).models;
      break;
    case Method::global_boost:
      out.boost_models.assign(dataset.num_users(),
                              run_global_boost(dataset, stumps, hyper.beta, local_steps * dataset.num_users()));
      break;
    case Method::dada_learned:
      out.run = run_alternating(dataset, stumps, hyper, sched);
      out.boost_models = out.run->state.models;
      break;
    case Method::dada_oracle:
      if (oracle == nullptr) throw std::invalid_argument("dada_oracle needs an oracle graph");
      out.run = run_fixed_graph(dataset, stumps, *oracle, hyper,
                                sched.total_phases * sched.model_steps_per_phase, sched.seed,
                                std::max<std::size_t>(sched.model_steps_per_phase, 1));
      out.boost_models = out.run->state.models;
      break;
    case Method::local_linear:
    case Method::global_linear:
      out.linear_models = run_linear_baselines(
          dataset, method == Method::local_linear ? LinearMode::local : LinearMode::global, hyper.mu1);
      out.train = linear_accuracy(out.linear_models, dataset, Split::train);
      out.test = linear_accuracy(out.linear_models, dataset, Split::test);
      return out;
  }
  out.train = average_accuracy(out.boost_models, dataset, stumps, Split::train);
  out.test = average_accuracy(out.boost_models, dataset, stumps, Split::test);
  return out;
}

void CvGrid::validate() const {
  if (beta_grid.empty() || mu_grid.empty() || lambda_grid.empty()) {
    throw std::invalid_argument("cross-validation grid must be non-empty");
  }
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
}

std::vector<std::vector<std::size_t>> fold_assignment(const PartitionedDataset& dataset,
                                                      std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("fold_assignment: folds must be >= 2");
  std::mt19937_64 rng = make_stream(seed, kFoldStream);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(dataset.num_users());
  for (const UserData& u : dataset.users) {
    const std::size_t m = u.num_train();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = m; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    std::vector<std::size_t> fold(m, folds);
    if (m >= 2) {
      for (std::size_t pos = 0; pos < m; ++pos) fold[order[pos]] = pos % folds;
    }
    out.push_back(std::move(fold));
  }
  return out;
}

PartitionedDataset fold_split(const PartitionedDataset& dataset,
                              const std::vector<std::vector<std::size_t>>& assignment,
                              std::size_t fold) {
  if (assignment.size() != dataset.num_users()) throw std::invalid_argument("fold_split: bad assignment");
  PartitionedDataset out;
  out.feature_dim = dataset.feature_dim;
  out.users.reserve(dataset.num_users());
  for (std::size_t k = 0; k < dataset.num_users(); ++k) {
    const UserData& u = dataset.users[k];
    if (assignment[k].size() != u.num_train()) throw std::invalid_argument("fold_split: bad assignment");
    UserData part;
    part.angle_deg = u.angle_deg;
    for (std::size_t i = 0; i < u.num_train(); ++i) {
      const bool held_out = assignment[k][i] == fold;
      (held_out ? part.test_x : part.train_x).append_row(u.train_x.row(i));
      (held_out ? part.test_y : part.train_y).push_back(u.train_y[i]);
    }
    out.users.push_back(std::move(part));
  }
  assign_confidences(out);
  return out;
}

CvResult cross_validate(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                        const CvGrid& grid, Method method, const Hyperparams& base,
                        const ScheduleConfig& sched, const CollaborationGraph* oracle) {
  grid.validate();
  dataset.validate();
  const std::vector<double> betas =
      uses_beta(method) ? sorted_unique(grid.beta_grid) : std::vector<double>{sorted_unique(grid.beta_grid)[0]};
  const std::vector<double> mus =
      uses_mu(method) ? sorted_unique(grid.mu_grid) : std::vector<double>{sorted_unique(grid.mu_grid)[0]};
  const std::vector<double> lambdas = method == Method::dada_learned
                                          ? sorted_unique(grid.lambda_grid)
                                          : std::vector<double>{sorted_unique(grid.lambda_grid)[0]};

  const auto assignment = fold_assignment(dataset, grid.folds, sched.seed);
  std::vector<PartitionedDataset> splits;
  for (std::size_t f = 0; f < grid.folds; ++f) {
    PartitionedDataset split = fold_split(dataset, assignment, f);
    const bool any_validation = std::any_of(split.users.begin(), split.users.end(),
                                            [](const UserData& u) { return u.num_test() > 0; });
    if (any_validation) splits.push_back(std::move(split));
  }
  if (splits.empty()) throw std::invalid_argument("cross_validate: no fold has validation rows");

  CvResult result;
  result.best_accuracy = -std::numeric_limits<double>::infinity();
  for (double beta : betas) {
    for (double mu : mus) {
      for (double lambda : lambdas) {
        Hyperparams h = base;
        h.beta = beta;
        h.mu1 = mu;
        h.lambda = lambda;
        double total = 0.0;
        for (const PartitionedDataset& split : splits) {
          total += run_method(method, split, stumps, h, sched, oracle).test.mean;
        }
        const double acc = total / static_cast<double>(splits.size());
        result.table.push_back({beta, mu, lambda, acc});
        if (acc > result.best_accuracy) {
          result.best_accuracy = acc;
          result.best = h;
        }
      }
    }
  }
  return result;
}

CollaborationGraph graph_reference_optimum(const GraphObjectiveCtx& ctx, double tol,
                                           std::size_t max_iter) {
  const std::size_t num_users = ctx.num_users();
  if (num_users < 2) throw std::invalid_argument("graph_reference_optimum: need K >= 2");
  if (!(ctx.mu2 > 0.0)) throw std::invalid_argument("graph_reference_optimum: mu2 must be > 0");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> linear;  // loss and smoothness part of the gradient, constant in w
  for (std::size_t k = 0; k < num_users; ++k) {
    for (std::size_t l = k + 1; l < num_users; ++l) {
      pairs.emplace_back(k, l);
      const double dist = ctx.mu1 != 0.0 ? ctx.model_sq_dist(k, l) : 0.0;
      linear.push_back(ctx.loss_terms[k] + ctx.loss_terms[l] + 0.5 * ctx.mu1 * dist);
    }
  }
  const GraphRegularizer& reg = *ctx.regularizer;
  const double lipschitz = ctx.mu2 * reg.full_lipschitz(num_users);
  const std::size_t p = pairs.size();

  auto gradient = [&](const std::vector<double>& w, std::vector<double>& g) {
    std::vector<double> deg(num_users, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      deg[pairs[i].first] += w[i];
      deg[pairs[i].second] += w[i];
    }
    for (double& d : deg) d = reg.degree_derivative(d);
    for (std::size_t i = 0; i < p; ++i) {
      g[i] = linear[i] + ctx.mu2 * (deg[pairs[i].first] + deg[pairs[i].second] + reg.edge_derivative(w[i]));
    }
  };

  std::vector<double> w(p, 0.0), y(p, 0.0), next(p), g(p);
  double t = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    gradient(y, g);
    double change = 0.0;
    double restart_test = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      next[i] = std::max(0.0, y[i] - g[i] / lipschitz);
      restart_test += (y[i] - next[i]) * (next[i] - w[i]);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (restart_test > 0.0) {
      // Gradient-based restart of the momentum sequence.
      t = 1.0;
      y = w;
      continue;
    }
    for (std::size_t i = 0; i < p; ++i) {
      change = std::max(change, std::abs(next[i] - w[i]));
      y[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - w[i]);
    }
    w.swap(next);
    t = t_next;
    if (change <= tol) break;
  }

  CollaborationGraph out(num_users);
  for (std::size_t i = 0; i < p; ++i) {
    if (w[i] > 0.0) out.set_weight(pairs[i].first, pairs[i].second, w[i]);
  }
  return out;
}

KappaSweep sweep_kappa(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                       const Hyperparams& hyper, const KappaSweepConfig& cfg) {
  dataset.validate();
  const std::size_t num_users = dataset.num_users();
  const BoostProblem problem = make_boost_problem(dataset, stumps, hyper.beta, hyper.mu1);
  const ModelState local = run_local_boost(problem, cfg.local_steps);
  GraphObjectiveCtx ctx = make_graph_ctx(local.models, problem, hyper);
  ctx.cache_distances();

  KappaSweep sweep;
  sweep.h_initial = graph_objective(CollaborationGraph(num_users), ctx);
  sweep.h_star = graph_objective(graph_reference_optimum(ctx), ctx);
  sweep.target_h = cfg.target_h.value_or(sweep.h_star + cfg.target_rel * (sweep.h_initial - sweep.h_star));

  for (std::size_t kappa : cfg.kappas) {
    Hyperparams h = hyper;
    h.kappa = kappa;
    Network net(dataset, stumps, h, CollaborationGraph(num_users), local);
    std::mt19937_64 rng = make_stream(cfg.seed, kSweepStream);
    std::uniform_int_distribution<std::size_t> pick(0, num_users - 1);
    KappaRow row;
    row.kappa = kappa;
    double value = sweep.h_initial;
    while (value > sweep.target_h && row.rounds < cfg.max_rounds) {
      net.graph_step(pick(rng), rng, ctx);
      ++row.rounds;
      value = graph_objective(net.graph(), ctx);
    }
    row.capped = value > sweep.target_h;
    row.final_h = value;
    row.edge_sync_bits = net.ledger().edge_sync_bits;
    row.bits = net.ledger().graph_bits - row.edge_sync_bits;
    sweep.rows.push_back(row);
  }
  return sweep;
}

std::vector<LambdaRow> sweep_lambda(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                                    const Hyperparams& hyper, const ScheduleConfig& sched,
                                    const std::vector<double>& lambdas) {
  std::vector<LambdaRow> rows;
  for (double lambda : lambdas) {
    Hyperparams h = hyper;
    h.lambda = lambda;
    const RunResult run = run_alternating(dataset, stumps, h, sched);
    const MetricsRow& last = run.log.rows.back();
    rows.push_back({lambda, last.edges, last.mean_degree, last.test_acc, last.h});
  }
  return rows;
}

}  // namespace dada
