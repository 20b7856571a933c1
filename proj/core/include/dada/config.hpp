#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dada/datagen.hpp"
#include "dada/experiments.hpp"

namespace dada {

/// Invalid or unreadable configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataSource { moons, moons100, csv };

/// Everything a CLI run needs. See configs/ for annotated examples.
struct RunConfig {
  DataSource source = DataSource::moons;
  MoonsConfig moons = MoonsConfig::standard();
  std::filesystem::path csv_path;
  std::optional<std::filesystem::path> graph_path;  ///< fixed graph for dada_oracle
  std::size_t stumps_per_dim = 10;
  std::optional<std::vector<FeatureRange>> feature_ranges;
  std::uint64_t seed = 0;

  Method method = Method::dada_learned;
  Hyperparams hyper;
  ScheduleConfig schedule;
  std::filesystem::path output_dir = "out";

  CvGrid cv;
  KappaSweepConfig kappa_sweep;
  std::vector<double> lambda_sweep{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};

  /// Propagates `seed` to the generator, schedule and sweeps.
  void set_seed(std::uint64_t s);
  /// Throws ConfigError.
  void validate() const;
};

/// Builds a config from the JSON form. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);

/// Parses TOML text into the equivalent JSON document.
nlohmann::json toml_to_json(const std::string& text);

/// Reads a .toml or .json file. Relative data and graph paths resolve against
/// the config file's directory.
RunConfig load_config(const std::filesystem::path& path);

struct PreparedData {
  PartitionedDataset dataset;
  StumpEnsemble stumps;
  std::vector<FeatureRange> ranges;
  std::optional<std::vector<double>> angles_deg;
  std::optional<CollaborationGraph> oracle;
};

/// Generates or loads the dataset, lays out the stumps and, when possible,
/// builds the oracle graph (from a graph file or the generator's angles).
PreparedData prepare_data(const RunConfig& cfg);

}  // namespace dada
