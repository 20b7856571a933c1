#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "dada/datagen.hpp"
#include "dada/netsim.hpp"
#include "dada/types.hpp"

namespace dada {

// JSON mappings used for checkpoints, summaries and config files. Sparse
// models store their coefficients as [[index, value], ...]; graphs store
// their edges as [[k, l, w], ...] with k < l.

void to_json(nlohmann::json& j, const Stump& s);
void from_json(const nlohmann::json& j, Stump& s);
void to_json(nlohmann::json& j, const StumpEnsemble& s);
void from_json(const nlohmann::json& j, StumpEnsemble& s);

void to_json(nlohmann::json& j, const SparseModel& m);
void from_json(const nlohmann::json& j, SparseModel& m);
void to_json(nlohmann::json& j, const ModelState& s);
void from_json(const nlohmann::json& j, ModelState& s);

void to_json(nlohmann::json& j, const CollaborationGraph& g);
void from_json(const nlohmann::json& j, CollaborationGraph& g);

/// Keys: mu1, mu2 (optional), beta, lambda, delta, kappa, Z. Missing keys keep defaults.
void to_json(nlohmann::json& j, const Hyperparams& h);
void from_json(const nlohmann::json& j, Hyperparams& h);

void to_json(nlohmann::json& j, const ScheduleConfig& s);
void from_json(const nlohmann::json& j, ScheduleConfig& s);

void to_json(nlohmann::json& j, const CommLedger& l);
void from_json(const nlohmann::json& j, CommLedger& l);

void to_json(nlohmann::json& j, const MetricsRow& r);

void to_json(nlohmann::json& j, const FeatureRange& r);
void from_json(const nlohmann::json& j, FeatureRange& r);

struct Checkpoint {
  std::size_t phase = 0;
  ModelState state;
  CollaborationGraph graph;
  CommLedger ledger;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void to_json(nlohmann::json& j, const Checkpoint& c);
void from_json(const nlohmann::json& j, Checkpoint& c);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace dada
