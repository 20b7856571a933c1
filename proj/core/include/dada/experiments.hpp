#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dada/linear.hpp"
#include "dada/netsim.hpp"

namespace dada {

enum class Method { dada_learned, dada_oracle, local_boost, global_boost, local_linear, global_linear };

const char* method_name(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(const std::string& name);

/// What a method produced on one dataset. Boosting methods fill `boost_models`,
/// linear ones `linear_models`; the alternating and fixed-graph runs also keep
/// their full result.
struct MethodResult {
  Method method = Method::local_boost;
  std::vector<SparseModel> boost_models;
  std::vector<LinearModel> linear_models;
  std::optional<RunResult> run;
  AccuracyReport train;
  AccuracyReport test;
};

/// Runs one method with the given schedule. Local-boost uses local_steps
/// (default model_steps_per_phase) per user, Global-boost that many steps
/// times K, the oracle method total_phases * model_steps_per_phase steps on
/// `oracle`, and the linear methods use mu1 as their L2 strength.
MethodResult run_method(Method method, const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                        const Hyperparams& hyper, const ScheduleConfig& sched,
                        const CollaborationGraph* oracle = nullptr);

struct CvGrid {
  std::vector<double> beta_grid{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> mu_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> lambda_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::size_t folds = 3;

  void validate() const;
};

/// fold[k][i] is the validation fold of training row i of user k. Rows are
/// shuffled per user and dealt round-robin. A user with a single training row
/// is never held out (its fold is `folds`); a user with fewer rows than folds
/// only appears in the first m_k folds.
std::vector<std::vector<std::size_t>> fold_assignment(const PartitionedDataset& dataset,
                                                      std::size_t folds, std::uint64_t seed);

/// Training rows outside `fold` become the training split; rows in `fold`
/// become the test split used for validation.
PartitionedDataset fold_split(const PartitionedDataset& dataset,
                              const std::vector<std::vector<std::size_t>>& assignment,
                              std::size_t fold);

struct CvPoint {
  double beta = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  double accuracy = 0.0;  ///< mean validation accuracy over folds
};

struct CvResult {
  Hyperparams best;
  double best_accuracy = 0.0;
  std::vector<CvPoint> table;
};

/// Grid search on the hyperparameters the method uses (beta for boosting,
/// mu for linear and collaborative methods, lambda for the learned graph).
/// Unused axes are fixed to their smallest grid value. Ties go to the
/// lexicographically smallest (beta, mu, lambda).
CvResult cross_validate(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                        const CvGrid& grid, Method method, const Hyperparams& base,
                        const ScheduleConfig& sched, const CollaborationGraph* oracle = nullptr);

/// Minimiser of h over nonnegative weights by accelerated projected gradient.
CollaborationGraph graph_reference_optimum(const GraphObjectiveCtx& ctx, double tol = 1e-10,
                                           std::size_t max_iter = 200000);

struct KappaRow {
  std::size_t kappa = 0;
  std::size_t rounds = 0;      ///< graph activations until h <= target
  Bits bits = 0;               ///< peer exchange bits over those rounds
  Bits edge_sync_bits = 0;     ///< model re-sends over created edges (not in bits)
  double final_h = 0.0;
  bool capped = false;
};

struct KappaSweepConfig {
  std::vector<std::size_t> kappas{1, 2, 5, 10, 25};
  /// Absolute target; when unset the target is h* + target_rel (h(0) - h*).
  std::optional<double> target_h;
  double target_rel = 0.5;
  std::size_t max_rounds = 1000000;
  std::size_t local_steps = 100;
  std::uint64_t seed = 0;
};

struct KappaSweep {
  double h_initial = 0.0;
  double h_star = 0.0;
  double target_h = 0.0;
  std::vector<KappaRow> rows;
};

/// Graph learning from fixed Local-boost models, starting from the empty graph,
/// once per kappa with the same seed.
KappaSweep sweep_kappa(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                       const Hyperparams& hyper, const KappaSweepConfig& cfg);

struct LambdaRow {
  double lambda = 0.0;
  std::size_t edges = 0;
  double mean_degree = 0.0;
  double test_acc = 0.0;
  double h = 0.0;
};

/// One full alternating run per lambda.
std::vector<LambdaRow> sweep_lambda(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                                    const Hyperparams& hyper, const ScheduleConfig& sched,
                                    const std::vector<double>& lambdas);

}  // namespace dada
