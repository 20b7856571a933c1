#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dada/types.hpp"

namespace dada {

/// Closed interval of one feature, used to lay out stump thresholds.
struct FeatureRange {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

enum class MoonsPreset { clustered, per_user };

struct MoonsConfig {
  MoonsPreset preset = MoonsPreset::clustered;
  std::size_t num_users = 100;
  std::vector<std::size_t> cluster_sizes{10, 20, 30, 40};
  std::vector<double> cluster_angles_deg{45.0, 135.0, 225.0, 315.0};
  /// Std of the per-user angle around its cluster centre (clustered) or
  /// around 0 (per_user), in degrees.
  double angle_noise_std = 5.0;
  std::size_t m_train_lo = 3;
  std::size_t m_train_hi = 15;
  std::size_t m_test = 100;
  std::size_t dim = 20;
  double label_flip_frac = 0.05;
  double moon_noise_std = 0.1;
  /// Rotate about the crescents' centroid instead of the origin.
  bool centre_crescents = false;
  double oracle_sigma = 0.1;
  double oracle_drop_threshold = 1e-4;
  std::uint64_t seed = 0;

  /// K=100 users in clusters of 10/20/30/40 rotated by 45/135/225/315 degrees.
  static MoonsConfig standard();
  /// K=100 users with individual rotations, 3..20 training points each.
  static MoonsConfig per_user_angles();

  void validate() const;

  friend bool operator==(const MoonsConfig&, const MoonsConfig&) = default;
};

struct MoonsData {
  PartitionedDataset dataset;
  std::vector<double> angles_deg;
  /// Per-dimension range of the pooled generated points.
  std::vector<FeatureRange> feature_ranges;
};

/// Two-moons multi-task benchmark: each user gets its own rotation of the
/// crescents, a handful of training points and a fixed-size test set.
/// Deterministic in cfg.seed.
MoonsData generate_moons(const MoonsConfig& cfg);

/// w_{k,l} = exp((cos(theta_k - theta_l) - 1) / sigma); weights below
/// drop_threshold are left out.
CollaborationGraph oracle_graph(std::span<const double> angles_deg, double sigma,
                                double drop_threshold);

/// per_dim stumps per feature with thresholds at the interior points of a
/// uniform partition of each range, polarity +1.
StumpEnsemble build_stumps(std::span<const FeatureRange> ranges, std::size_t per_dim);

/// Same as build_stumps with per_dim = n / D; n must be a multiple of D.
StumpEnsemble build_stumps_total(std::span<const FeatureRange> ranges, std::size_t n);

/// Per-feature range of all training rows, widened when a feature is constant.
std::vector<FeatureRange> training_feature_ranges(const PartitionedDataset& dataset);

/// Entry (i, j) = h_j(x_i).
Matrix stump_outputs(const Matrix& x, const StumpEnsemble& stumps);

/// Entry (i, j) = y_i h_j(x_i) over the training split of `user`.
MarginMatrix margin_matrix(const UserData& user, const StumpEnsemble& stumps);

std::vector<MarginMatrix> margin_matrices(const PartitionedDataset& dataset,
                                          const StumpEnsemble& stumps);

/// Reads `user_id,split,y,f0..f{D-1}`. Users keep first-appearance order and
/// confidences are recomputed. Throws CsvError on malformed input.
PartitionedDataset load_csv(const std::filesystem::path& path);
PartitionedDataset parse_csv(const std::string& text);

/// Writes the same schema load_csv reads; values use shortest round-trip
/// formatting so a reload is exact. User ids are the user indices.
void write_csv(const PartitionedDataset& dataset, const std::filesystem::path& path);
std::string to_csv(const PartitionedDataset& dataset);

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dada
