#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dada/boost.hpp"
#include "dada/comm_cost.hpp"
#include "dada/graphlearn.hpp"
#include "dada/types.hpp"

namespace dada {

/// Alternation schedule of the decentralized protocol.
struct ScheduleConfig {
  std::size_t model_steps_per_phase = 100;
  std::optional<std::size_t> graph_steps_per_phase;  ///< default K
  std::size_t total_phases = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> prune_keep;
  /// Graph activations used to build the first graph from the local models;
  /// default graph_steps_per_phase.
  std::optional<std::size_t> initial_graph_steps;
  /// Frank-Wolfe steps per user for the local models; default model_steps_per_phase.
  std::optional<std::size_t> local_steps;
  /// Restart the step-size counter at every model phase.
  bool reset_step_counter = false;
  /// Peers remember what they already sent to a given user.
  bool cache_peer_state = false;
  /// Start collaborative learning from the local models instead of zeros.
  bool warm_start = false;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

/// Bit counters for all simulated traffic.
struct CommLedger {
  int float_bits = 32;
  std::size_t n = 1;
  Bits model_bits = 0;
  Bits graph_bits = 0;       ///< includes edge_sync_bits
  Bits edge_sync_bits = 0;   ///< full models re-sent over newly created edges
  std::vector<std::uint64_t> model_messages;  ///< per sender
  std::vector<std::uint64_t> graph_messages;  ///< per active user, one per contacted peer
  std::uint64_t fresh_peer_contacts = 0;
  std::uint64_t repeat_peer_contacts = 0;

  friend bool operator==(const CommLedger&, const CommLedger&) = default;
};

struct MetricsRow {
  std::size_t global_step = 0;
  std::size_t phase = 0;
  double f = 0.0;
  double h = 0.0;
  double gap = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::size_t edges = 0;
  double mean_degree = 0.0;  ///< mean number of neighbours
  Bits model_bits = 0;
  Bits graph_bits = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MetricsLog {
  std::vector<MetricsRow> rows;

  static const char* csv_header();
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

  friend bool operator==(const MetricsLog&, const MetricsLog&) = default;
};

/// What one graph activation did.
struct GraphStepReport {
  std::size_t user = 0;
  std::vector<std::size_t> peers;
  std::size_t fresh_peers = 0;
  Bits bits = 0;
};

/// Simulated peer-to-peer network: every user holds its model, copies of its
/// neighbours' models and its incident weights. Delivery is reliable and
/// instantaneous. The simulator is single-threaded; every random draw comes
/// from generators the caller passes in.
class Network {
 public:
  Network(const PartitionedDataset& dataset, const StumpEnsemble& stumps, const Hyperparams& hyper,
          CollaborationGraph graph, ModelState initial, bool cache_peer_state = false);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  std::size_t num_users() const noexcept { return problem_.num_users(); }

  /// User k takes a Frank-Wolfe step from its own model and its neighbour
  /// copies, then sends (index, value, gamma) to every neighbour.
  LmoResult model_step(std::size_t k);

  /// User k samples kappa peers, requests their state and updates the
  /// incident weights by one proximal coordinate step on h. The objective is
  /// taken from `ctx`, whose models are the ones the peers report.
  GraphStepReport graph_step(std::size_t k, std::mt19937_64& rng, const GraphObjectiveCtx& ctx,
                             std::optional<std::size_t> prune_keep = std::nullopt);

  /// Graph objective context over the current models.
  GraphObjectiveCtx graph_ctx() const;

  void reset_step_counter() { state_.global_step = 0; }

  const ModelState& state() const noexcept { return state_; }
  const CollaborationGraph& graph() const noexcept { return graph_; }
  const CommLedger& ledger() const noexcept { return ledger_; }
  const BoostProblem& problem() const noexcept { return problem_; }
  const Hyperparams& hyper() const noexcept { return hyper_; }

  /// User k's stored copy of l's model (k and l must be neighbours).
  const SparseModel& neighbor_copy(std::size_t k, std::size_t l) const;

  MetricsRow snapshot(std::size_t phase) const;

 private:
  struct UserNode {
    std::map<std::size_t, SparseModel> copies;
    /// Peers this user has contacted in a graph step, with the model the
    /// peer reported at that time.
    std::map<std::size_t, SparseModel> contacted;
  };

  void sync_edge_change(std::size_t k, std::size_t l, bool was_edge);

  const PartitionedDataset* dataset_;
  const StumpEnsemble* stumps_;
  Hyperparams hyper_;
  BoostProblem problem_;
  CollaborationGraph graph_;
  ModelState state_;
  std::vector<UserNode> users_;
  CommLedger ledger_;
  bool cache_peer_state_;
};

struct RunResult {
  ModelState state;
  CollaborationGraph graph;
  MetricsLog log;
  CommLedger ledger;
  std::size_t graph_activations = 0;
};

/// Called after each phase with the phase index and the live network.
using PhaseCallback = std::function<void(std::size_t phase, const Network&)>;

/// Learn models and graph jointly: local models, a first graph from them,
/// then total_phases rounds of (model phase, graph phase).
RunResult run_alternating(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                          const Hyperparams& hyper, const ScheduleConfig& sched,
                          const CollaborationGraph* initial_graph = nullptr,
                          const PhaseCallback& on_phase = {});

/// Model phase only on a fixed graph; a metrics row every `log_every` steps.
RunResult run_fixed_graph(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                          const CollaborationGraph& graph, const Hyperparams& hyper, std::size_t steps,
                          std::uint64_t seed, std::size_t log_every = 100,
                          const PhaseCallback& on_phase = {});

/// Independent generator for one purpose (activation order, peer sampling).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream);

}  // namespace dada
