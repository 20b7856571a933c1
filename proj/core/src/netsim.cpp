#include "dada/netsim.hpp"

#include <charconv>
#include <fstream>

#include "dada/eval.hpp"

namespace dada {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                    0x6e657473u};
  return std::mt19937_64(seq);
}

namespace {

constexpr std::uint32_t kModelStream = 1;
constexpr std::uint32_t kGraphStream = 2;

std::size_t uniform_user(std::mt19937_64& rng, std::size_t num_users) {
  std::uniform_int_distribution<std::size_t> pick(0, num_users - 1);
  return pick(rng);
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Network::Network(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                 const Hyperparams& hyper, CollaborationGraph graph, ModelState initial,
                 bool cache_peer_state)
    : dataset_(&dataset),
      stumps_(&stumps),
      hyper_(hyper),
      problem_(make_boost_problem(dataset, stumps, hyper.beta, hyper.mu1)),
      graph_(std::move(graph)),
      state_(std::move(initial)),
      users_(dataset.num_users()),
      cache_peer_state_(cache_peer_state) {
  hyper_.validate(dataset.num_users());
  if (graph_.num_users() != dataset.num_users() || state_.models.size() != dataset.num_users()) {
    throw std::invalid_argument("Network: graph, models and dataset disagree on K");
  }
  ledger_.float_bits = hyper.float_bits;
  ledger_.n = stumps.size();
  ledger_.model_messages.assign(num_users(), 0);
  ledger_.graph_messages.assign(num_users(), 0);
  for (const auto& [edge, w] : graph_.edges()) {
    const auto [k, l] = edge;
    users_[k].copies[l] = state_.models[l];
    users_[l].copies[k] = state_.models[k];
    const Bits sync = model_sync_cost(hyper_.float_bits, ledger_.n, state_.models[k].nnz()) +
                      model_sync_cost(hyper_.float_bits, ledger_.n, state_.models[l].nnz());
    ledger_.edge_sync_bits += sync;
    ledger_.graph_bits += sync;
  }
}

LmoResult Network::model_step(std::size_t k) {
  UserNode& node = users_.at(k);
  const auto& nbrs = graph_.neighbors(k);
  std::vector<NeighborModel> view;
  view.reserve(nbrs.size());
  for (std::size_t l : nbrs) view.push_back({graph_.weight(k, l), &node.copies.at(l)});

  const std::vector<double> grad = model_gradient(problem_.margins[k], state_.models[k],
                                                  graph_.degree(k), problem_.confidences[k],
                                                  problem_.mu1, view);
  const LmoResult atom = fw_lmo(grad, problem_.beta);
  const double gamma = step_size(state_.global_step, num_users());
  state_.models[k] = fw_step(state_.models[k], atom, gamma);
  ++state_.global_step;

  for (std::size_t l : nbrs) {
    SparseModel& copy = users_[l].copies.at(k);
    copy = fw_step(copy, atom, gamma);
  }
  ledger_.model_bits += model_step_cost(hyper_.float_bits, ledger_.n, nbrs.size());
  ledger_.model_messages[k] += nbrs.size();
  return atom;
}

void Network::sync_edge_change(std::size_t k, std::size_t l, bool was_edge) {
  const bool is_edge = graph_.weight(k, l) > 0.0;
  if (is_edge == was_edge) return;
  if (is_edge) {
    users_[k].copies[l] = state_.models[l];
    users_[l].copies[k] = state_.models[k];
    const Bits sync = model_sync_cost(hyper_.float_bits, ledger_.n, state_.models[k].nnz()) +
                      model_sync_cost(hyper_.float_bits, ledger_.n, state_.models[l].nnz());
    ledger_.edge_sync_bits += sync;
    ledger_.graph_bits += sync;
  } else {
    users_[k].copies.erase(l);
    users_[l].copies.erase(k);
  }
}

GraphStepReport Network::graph_step(std::size_t k, std::mt19937_64& rng, const GraphObjectiveCtx& ctx,
                                    std::optional<std::size_t> prune_keep) {
  if (ctx.models == nullptr || ctx.num_users() != num_users()) {
    throw std::invalid_argument("graph_step: context does not match the network");
  }
  const std::vector<SparseModel>& reported = *ctx.models;
  std::vector<std::size_t> candidates;
  if (prune_keep) {
    candidates = prune_candidates(k, reported, std::min(*prune_keep, num_users() - 1));
  } else {
    candidates.reserve(num_users() - 1);
    for (std::size_t l = 0; l < num_users(); ++l) {
      if (l != k) candidates.push_back(l);
    }
  }

  GraphStepReport report;
  report.user = k;
  report.peers = peer_sample_from(candidates, std::min(hyper_.kappa, candidates.size()), rng);

  UserNode& node = users_.at(k);
  for (std::size_t l : report.peers) {
    const SparseModel& peer_model = reported[l];
    auto it = node.contacted.find(l);
    const bool fresh = it == node.contacted.end();
    const bool cached = cache_peer_state_ && !fresh && it->second == peer_model;
    report.bits += graph_peer_cost(hyper_.float_bits, ledger_.n, peer_model.nnz(), cached);
    if (fresh) {
      ++report.fresh_peers;
      ++ledger_.fresh_peer_contacts;
      node.contacted.emplace(l, peer_model);
    } else {
      ++ledger_.repeat_peer_contacts;
      if (!cached) it->second = peer_model;
    }
  }
  ledger_.graph_bits += report.bits;
  ledger_.graph_messages[k] += report.peers.size();

  std::vector<bool> was_edge;
  was_edge.reserve(report.peers.size());
  for (std::size_t l : report.peers) was_edge.push_back(graph_.weight(k, l) > 0.0);
  pcd_update(graph_, k, report.peers, ctx);
  for (std::size_t i = 0; i < report.peers.size(); ++i) sync_edge_change(k, report.peers[i], was_edge[i]);
  return report;
}

GraphObjectiveCtx Network::graph_ctx() const { return make_graph_ctx(state_.models, problem_, hyper_); }

const SparseModel& Network::neighbor_copy(std::size_t k, std::size_t l) const {
  const auto& copies = users_.at(k).copies;
  auto it = copies.find(l);
  if (it == copies.end()) throw std::out_of_range("neighbor_copy: users are not neighbours");
  return it->second;
}

MetricsRow Network::snapshot(std::size_t phase) const {
  MetricsRow row;
  row.global_step = state_.global_step;
  row.phase = phase;
  row.f = objective_f(state_, graph_, problem_);
  row.h = graph_objective(graph_, graph_ctx());
  row.gap = duality_gap(state_, graph_, problem_);
  row.train_acc = average_accuracy(state_.models, *dataset_, *stumps_, Split::train).mean;
  row.test_acc = average_accuracy(state_.models, *dataset_, *stumps_, Split::test).mean;
  row.edges = graph_.edge_count();
  row.mean_degree = graph_.mean_neighbor_count();
  row.model_bits = ledger_.model_bits;
  row.graph_bits = ledger_.graph_bits;
  return row;
}

const char* MetricsLog::csv_header() {
  return "global_step,phase,f,h,gap,train_acc,test_acc,edges,mean_degree,model_bits,graph_bits";
}

std::string MetricsLog::to_csv() const {
  std::string out = csv_header();
  out += '\n';
  for (const MetricsRow& r : rows) {
    out += std::to_string(r.global_step);
    out += ',';
    out += std::to_string(r.phase);
    for (double v : {r.f, r.h, r.gap, r.train_acc, r.test_acc}) {
      out += ',';
      append_number(out, v);
    }
    out += ',';
    out += std::to_string(r.edges);
    out += ',';
    append_number(out, r.mean_degree);
    out += ',';
    out += std::to_string(r.model_bits);
    out += ',';
    out += std::to_string(r.graph_bits);
    out += '\n';
  }
  return out;
}

void MetricsLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << to_csv();
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

RunResult finish(Network& net, MetricsLog log, std::size_t graph_activations) {
  RunResult out;
  out.state = net.state();
  out.graph = net.graph();
  out.log = std::move(log);
  out.ledger = net.ledger();
  out.graph_activations = graph_activations;
  return out;
}

/// Logged step counter: model activations performed by this run, independent
/// of step-size resets.
MetricsRow logged(const Network& net, std::size_t phase, std::size_t steps_done) {
  MetricsRow row = net.snapshot(phase);
  row.global_step = steps_done;
  return row;
}

}  // namespace

RunResult run_alternating(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                          const Hyperparams& hyper, const ScheduleConfig& sched,
                          const CollaborationGraph* initial_graph, const PhaseCallback& on_phase) {
  dataset.validate();
  hyper.validate(dataset.num_users());
  const std::size_t num_users = dataset.num_users();
  const std::size_t graph_steps = sched.graph_steps_per_phase.value_or(num_users);
  const std::size_t initial_steps = sched.initial_graph_steps.value_or(graph_steps);
  if ((graph_steps > 0 || initial_steps > 0) && num_users < 2) {
    throw std::invalid_argument("graph learning needs at least two users");
  }

  const BoostProblem local_problem = make_boost_problem(dataset, stumps, hyper.beta, 0.0);
  ModelState local = run_local_boost(local_problem, sched.local_steps.value_or(sched.model_steps_per_phase));

  CollaborationGraph graph = initial_graph != nullptr ? *initial_graph : CollaborationGraph(num_users);
  const bool start_local = sched.warm_start || sched.total_phases == 0;
  ModelState start = start_local ? local
                                 : ModelState::zeros(num_users, stumps.size(), hyper.beta);
  Network net(dataset, stumps, hyper, std::move(graph), std::move(start), sched.cache_peer_state);

  std::mt19937_64 model_rng = make_stream(sched.seed, kModelStream);
  std::mt19937_64 graph_rng = make_stream(sched.seed, kGraphStream);
  std::size_t graph_activations = 0;

  if (initial_steps > 0) {
    GraphObjectiveCtx ctx = make_graph_ctx(local.models, net.problem(), hyper);
    ctx.cache_distances();
    for (std::size_t s = 0; s < initial_steps; ++s) {
      net.graph_step(uniform_user(graph_rng, num_users), graph_rng, ctx, sched.prune_keep);
      ++graph_activations;
    }
  }

  MetricsLog log;
  std::size_t steps_done = 0;
  log.rows.push_back(logged(net, 0, steps_done));
  for (std::size_t phase = 1; phase <= sched.total_phases; ++phase) {
    if (sched.reset_step_counter) net.reset_step_counter();
    for (std::size_t s = 0; s < sched.model_steps_per_phase; ++s) {
      net.model_step(uniform_user(model_rng, num_users));
    }
    steps_done += sched.model_steps_per_phase;
    if (graph_steps > 0) {
      const std::vector<SparseModel> frozen = net.state().models;
      GraphObjectiveCtx ctx = make_graph_ctx(frozen, net.problem(), hyper);
      ctx.cache_distances();
      for (std::size_t s = 0; s < graph_steps; ++s) {
        net.graph_step(uniform_user(graph_rng, num_users), graph_rng, ctx, sched.prune_keep);
        ++graph_activations;
      }
    }
    log.rows.push_back(logged(net, phase, steps_done));
    if (on_phase) on_phase(phase, net);
  }
  return finish(net, std::move(log), graph_activations);
}

RunResult run_fixed_graph(const PartitionedDataset& dataset, const StumpEnsemble& stumps,
                          const CollaborationGraph& graph, const Hyperparams& hyper, std::size_t steps,
                          std::uint64_t seed, std::size_t log_every, const PhaseCallback& on_phase) {
  dataset.validate();
  if (log_every == 0) throw std::invalid_argument("run_fixed_graph: log_every must be >= 1");
  const std::size_t num_users = dataset.num_users();
  Network net(dataset, stumps, hyper, graph, ModelState::zeros(num_users, stumps.size(), hyper.beta));
  std::mt19937_64 model_rng = make_stream(seed, kModelStream);

  MetricsLog log;
  log.rows.push_back(logged(net, 0, 0));
  std::size_t phase = 0;
  for (std::size_t done = 0; done < steps;) {
    const std::size_t chunk = std::min(log_every, steps - done);
    for (std::size_t s = 0; s < chunk; ++s) net.model_step(uniform_user(model_rng, num_users));
    done += chunk;
    ++phase;
    log.rows.push_back(logged(net, phase, done));
    if (on_phase) on_phase(phase, net);
  }
  return finish(net, std::move(log), 0);
}

}  // namespace dada
