#include "dada/serialization.hpp"

#include <fstream>

namespace dada {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void to_json(json& j, const Stump& s) {
  j = json{{"feature", s.feature}, {"threshold", s.threshold}, {"polarity", s.polarity}};
}

void from_json(const json& j, Stump& s) {
  j.at("feature").get_to(s.feature);
  j.at("threshold").get_to(s.threshold);
  read_opt(j, "polarity", s.polarity);
  if (s.polarity != 1 && s.polarity != -1) throw std::invalid_argument("stump polarity must be +1 or -1");
}

void to_json(json& j, const StumpEnsemble& s) { j = s.stumps; }
void from_json(const json& j, StumpEnsemble& s) { j.get_to(s.stumps); }

void to_json(json& j, const SparseModel& m) {
  json coef = json::array();
  for (const auto& [idx, v] : m.coefficients) coef.push_back(json::array({idx, v}));
  j = json{{"dim", m.dim}, {"l1_budget", m.l1_budget}, {"update_count", m.update_count},
           {"coefficients", std::move(coef)}};
}

void from_json(const json& j, SparseModel& m) {
  m = SparseModel(j.at("dim").get<std::size_t>(), j.at("l1_budget").get<double>());
  read_opt(j, "update_count", m.update_count);
  for (const json& e : j.at("coefficients")) {
    const auto idx = e.at(0).get<std::size_t>();
    const auto v = e.at(1).get<double>();
    if (idx >= m.dim) throw std::out_of_range("model coefficient index out of range");
    if (v != 0.0) m.coefficients[idx] = v;
  }
}

void to_json(json& j, const ModelState& s) {
  j = json{{"global_step", s.global_step}, {"models", s.models}};
}

void from_json(const json& j, ModelState& s) {
  read_opt(j, "global_step", s.global_step);
  j.at("models").get_to(s.models);
}

void to_json(json& j, const CollaborationGraph& g) {
  json edges = json::array();
  for (const auto& [e, w] : g.edges()) edges.push_back(json::array({e.first, e.second, w}));
  j = json{{"num_users", g.num_users()}, {"weights", std::move(edges)}, {"degrees", g.degrees()}};
}

void from_json(const json& j, CollaborationGraph& g) {
  g = CollaborationGraph(j.at("num_users").get<std::size_t>());
  for (const json& e : j.at("weights")) {
    g.set_weight(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>());
  }
}

void to_json(json& j, const Hyperparams& h) {
  j = json{{"mu1", h.mu1},       {"mu2", opt_json(h.mu2_override)}, {"beta", h.beta},
           {"lambda", h.lambda}, {"delta", h.delta},                {"kappa", h.kappa},
           {"Z", h.float_bits}};
}

void from_json(const json& j, Hyperparams& h) {
  read_opt(j, "mu1", h.mu1);
  read_opt(j, "mu2", h.mu2_override);
  read_opt(j, "beta", h.beta);
  read_opt(j, "lambda", h.lambda);
  read_opt(j, "delta", h.delta);
  read_opt(j, "kappa", h.kappa);
  read_opt(j, "Z", h.float_bits);
}

void to_json(json& j, const ScheduleConfig& s) {
  j = json{{"model_steps_per_phase", s.model_steps_per_phase},
           {"graph_steps_per_phase", opt_json(s.graph_steps_per_phase)},
           {"total_phases", s.total_phases},
           {"seed", s.seed},
           {"prune_keep", opt_json(s.prune_keep)},
           {"initial_graph_steps", opt_json(s.initial_graph_steps)},
           {"local_steps", opt_json(s.local_steps)},
           {"reset_step_counter", s.reset_step_counter},
           {"cache_peer_state", s.cache_peer_state},
           {"warm_start", s.warm_start}};
}

void from_json(const json& j, ScheduleConfig& s) {
  read_opt(j, "model_steps_per_phase", s.model_steps_per_phase);
  read_opt(j, "graph_steps_per_phase", s.graph_steps_per_phase);
  read_opt(j, "total_phases", s.total_phases);
  read_opt(j, "seed", s.seed);
  read_opt(j, "prune_keep", s.prune_keep);
  read_opt(j, "initial_graph_steps", s.initial_graph_steps);
  read_opt(j, "local_steps", s.local_steps);
  read_opt(j, "reset_step_counter", s.reset_step_counter);
  read_opt(j, "cache_peer_state", s.cache_peer_state);
  read_opt(j, "warm_start", s.warm_start);
}

void to_json(json& j, const CommLedger& l) {
  j = json{{"Z", l.float_bits},
           {"n", l.n},
           {"model_bits", l.model_bits},
           {"graph_bits", l.graph_bits},
           {"edge_sync_bits", l.edge_sync_bits},
           {"model_messages", l.model_messages},
           {"graph_messages", l.graph_messages},
           {"fresh_peer_contacts", l.fresh_peer_contacts},
           {"repeat_peer_contacts", l.repeat_peer_contacts}};
}

void from_json(const json& j, CommLedger& l) {
  j.at("Z").get_to(l.float_bits);
  j.at("n").get_to(l.n);
  j.at("model_bits").get_to(l.model_bits);
  j.at("graph_bits").get_to(l.graph_bits);
  read_opt(j, "edge_sync_bits", l.edge_sync_bits);
  read_opt(j, "model_messages", l.model_messages);
  read_opt(j, "graph_messages", l.graph_messages);
  read_opt(j, "fresh_peer_contacts", l.fresh_peer_contacts);
  read_opt(j, "repeat_peer_contacts", l.repeat_peer_contacts);
}

void to_json(json& j, const MetricsRow& r) {
  j = json{{"global_step", r.global_step}, {"phase", r.phase},         {"f", r.f},
           {"h", r.h},                     {"gap", r.gap},             {"train_acc", r.train_acc},
           {"test_acc", r.test_acc},       {"edges", r.edges},         {"mean_degree", r.mean_degree},
           {"model_bits", r.model_bits},   {"graph_bits", r.graph_bits}};
}

void to_json(json& j, const FeatureRange& r) { j = json::array({r.min, r.max}); }

void from_json(const json& j, FeatureRange& r) {
  r.min = j.at(0).get<double>();
  r.max = j.at(1).get<double>();
}

void to_json(json& j, const Checkpoint& c) {
  j = json{{"phase", c.phase}, {"state", c.state}, {"graph", c.graph}, {"ledger", c.ledger}};
}

void from_json(const json& j, Checkpoint& c) {
  j.at("phase").get_to(c.phase);
  j.at("state").get_to(c.state);
  j.at("graph").get_to(c.graph);
  j.at("ledger").get_to(c.ledger);
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return json::parse(is);
}

}  // namespace dada
