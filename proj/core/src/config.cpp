#include "dada/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "dada/serialization.hpp"

namespace dada {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + section + "' must be a table");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (keys.count(item.key()) == 0) {
      throw ConfigError("unknown key '" + (section.empty() ? "" : section + ".") + item.key() + "'");
    }
  }
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

DataSource parse_source(const std::string& s) {
  if (s == "moons") return DataSource::moons;
  if (s == "moons100") return DataSource::moons100;
  if (s == "csv") return DataSource::csv;
  throw ConfigError("data.source must be moons, moons100 or csv (got '" + s + "')");
}

void read_data(const json& d, RunConfig& cfg) {
  check_keys(d, "data",
             {"source", "path", "graph", "stumps_per_dim", "feature_ranges", "num_users", "cluster_sizes",
              "cluster_angles_deg", "angle_noise_std", "m_train_lo", "m_train_hi", "m_test", "dim",
              "label_flip_frac", "moon_noise_std", "centre_crescents", "oracle_sigma", "oracle_drop_threshold"});
  if (auto it = d.find("source"); it != d.end()) cfg.source = parse_source(it->get<std::string>());
  cfg.moons = cfg.source == DataSource::moons100 ? MoonsConfig::per_user_angles() : MoonsConfig::standard();
  if (auto it = d.find("path"); it != d.end()) cfg.csv_path = it->get<std::string>();
  if (auto it = d.find("graph"); it != d.end()) cfg.graph_path = std::filesystem::path(it->get<std::string>());
  get_opt(d, "stumps_per_dim", cfg.stumps_per_dim);
  if (auto it = d.find("feature_ranges"); it != d.end()) {
    cfg.feature_ranges = it->get<std::vector<FeatureRange>>();
  }
  MoonsConfig& m = cfg.moons;
  get_opt(d, "num_users", m.num_users);
  get_opt(d, "cluster_sizes", m.cluster_sizes);
  get_opt(d, "cluster_angles_deg", m.cluster_angles_deg);
  get_opt(d, "angle_noise_std", m.angle_noise_std);
  get_opt(d, "m_train_lo", m.m_train_lo);
  get_opt(d, "m_train_hi", m.m_train_hi);
  get_opt(d, "m_test", m.m_test);
  get_opt(d, "dim", m.dim);
  get_opt(d, "label_flip_frac", m.label_flip_frac);
  get_opt(d, "moon_noise_std", m.moon_noise_std);
  get_opt(d, "centre_crescents", m.centre_crescents);
  get_opt(d, "oracle_sigma", m.oracle_sigma);
  get_opt(d, "oracle_drop_threshold", m.oracle_drop_threshold);
}

void parse_into(const json& j, RunConfig& cfg) {
  check_keys(j, "", {"method", "output", "seed", "data", "hyper", "schedule", "cv", "sweep_kappa", "sweep_lambda"});
  if (auto it = j.find("method"); it != j.end()) {
    try {
      cfg.method = parse_method(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto it = j.find("output"); it != j.end()) cfg.output_dir = it->get<std::string>();
  if (auto it = j.find("data"); it != j.end()) read_data(*it, cfg);
  if (auto it = j.find("hyper"); it != j.end()) {
    check_keys(*it, "hyper", {"mu1", "mu2", "beta", "lambda", "delta", "kappa", "Z"});
    it->get_to(cfg.hyper);
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    check_keys(*it, "schedule",
               {"model_steps_per_phase", "graph_steps_per_phase", "total_phases", "prune_keep",
                "initial_graph_steps", "local_steps", "reset_step_counter", "cache_peer_state", "warm_start"});
    it->get_to(cfg.schedule);
  }
  if (auto it = j.find("cv"); it != j.end()) {
    check_keys(*it, "cv", {"beta", "mu", "lambda", "folds"});
    get_opt(*it, "beta", cfg.cv.beta_grid);
    get_opt(*it, "mu", cfg.cv.mu_grid);
    get_opt(*it, "lambda", cfg.cv.lambda_grid);
    get_opt(*it, "folds", cfg.cv.folds);
  }
  if (auto it = j.find("sweep_kappa"); it != j.end()) {
    check_keys(*it, "sweep_kappa", {"kappas", "target_h", "target_rel", "max_rounds", "local_steps"});
    get_opt(*it, "kappas", cfg.kappa_sweep.kappas);
    if (auto t = it->find("target_h"); t != it->end()) cfg.kappa_sweep.target_h = t->get<double>();
    get_opt(*it, "target_rel", cfg.kappa_sweep.target_rel);
    get_opt(*it, "max_rounds", cfg.kappa_sweep.max_rounds);
    get_opt(*it, "local_steps", cfg.kappa_sweep.local_steps);
  }
  if (auto it = j.find("sweep_lambda"); it != j.end()) {
    check_keys(*it, "sweep_lambda", {"lambdas"});
    get_opt(*it, "lambdas", cfg.lambda_sweep);
  }
  std::uint64_t seed = 0;
  get_opt(j, "seed", seed);
  cfg.set_seed(seed);
}

json node_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = node_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(node_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_date()) {
    std::ostringstream os;
    os << *v;
    return os.str();
  }
  if (const auto* v = node.as_time()) {
    std::ostringstream os;
    os << *v;
    return os.str();
  }
  if (const auto* v = node.as_date_time()) {
    std::ostringstream os;
    os << *v;
    return os.str();
  }
  throw ConfigError("unsupported TOML value");
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  moons.seed = s;
  schedule.seed = s;
  kappa_sweep.seed = s;
}

void RunConfig::validate() const {
  try {
    if (source == DataSource::csv && csv_path.empty()) throw ConfigError("data.path is required for csv data");
    if (source != DataSource::csv) moons.validate();
    if (stumps_per_dim == 0) throw ConfigError("data.stumps_per_dim must be >= 1");
    hyper.validate(source == DataSource::csv ? 0 : moons.num_users);
    cv.validate();
    if (kappa_sweep.kappas.empty()) throw ConfigError("sweep_kappa.kappas must be non-empty");
    if (lambda_sweep.empty()) throw ConfigError("sweep_lambda.lambdas must be non-empty");
    if (method == Method::dada_oracle && source == DataSource::csv && !graph_path) {
      throw ConfigError("dada_oracle on csv data needs data.graph");
    }
    if ((method == Method::local_linear || method == Method::global_linear) && !(hyper.mu1 > 0.0)) {
      throw ConfigError("linear baselines use hyper.mu1 as L2 strength; it must be > 0");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  try {
    parse_into(j, cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

json toml_to_json(const std::string& text) {
  try {
    return node_to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  json j;
  if (path.extension() == ".toml") {
    j = toml_to_json(buf.str());
  } else {
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
  }
  RunConfig cfg = config_from_json(j);
  const std::filesystem::path base = path.parent_path();
  if (!cfg.csv_path.empty() && cfg.csv_path.is_relative()) cfg.csv_path = base / cfg.csv_path;
  if (cfg.graph_path && cfg.graph_path->is_relative()) cfg.graph_path = base / *cfg.graph_path;
  return cfg;
}

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData out;
  if (cfg.source == DataSource::csv) {
    out.dataset = load_csv(cfg.csv_path);
    out.ranges = cfg.feature_ranges.value_or(training_feature_ranges(out.dataset));
  } else {
    MoonsData data = generate_moons(cfg.moons);
    out.dataset = std::move(data.dataset);
    out.ranges = cfg.feature_ranges.value_or(data.feature_ranges);
    out.oracle = oracle_graph(data.angles_deg, cfg.moons.oracle_sigma, cfg.moons.oracle_drop_threshold);
    out.angles_deg = std::move(data.angles_deg);
  }
  if (out.ranges.size() != out.dataset.feature_dim) {
    throw ConfigError("data.feature_ranges must have one entry per feature");
  }
  out.stumps = build_stumps(out.ranges, cfg.stumps_per_dim);
  if (cfg.graph_path) {
    CollaborationGraph g = read_json(*cfg.graph_path).get<CollaborationGraph>();
    if (g.num_users() != out.dataset.num_users()) {
      throw ConfigError("graph file has " + std::to_string(g.num_users()) + " users, dataset has " +
                        std::to_string(out.dataset.num_users()));
    }
    out.oracle = std::move(g);
  }
  return out;
}

}  // namespace dada
