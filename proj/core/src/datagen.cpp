#include "dada/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace dada {

MoonsConfig MoonsConfig::standard() { return MoonsConfig{}; }

MoonsConfig MoonsConfig::per_user_angles() {
  MoonsConfig cfg;
  cfg.preset = MoonsPreset::per_user;
  cfg.cluster_sizes.clear();
  cfg.cluster_angles_deg.clear();
  // Spread chosen so the oracle graph keeps roughly 60% of all pairs.
  cfg.angle_noise_std = 70.0;
  cfg.m_train_hi = 20;
  return cfg;
}

void MoonsConfig::validate() const {
  if (num_users == 0) throw std::invalid_argument("moons: num_users must be positive");
  if (preset == MoonsPreset::clustered) {
    if (cluster_sizes.size() != cluster_angles_deg.size()) {
      throw std::invalid_argument("moons: cluster_sizes and cluster_angles_deg differ in length");
    }
    const std::size_t total =
        std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0});
    if (total != num_users) {
      throw std::invalid_argument("moons: cluster sizes sum to " + std::to_string(total) +
                                  ", expected " + std::to_string(num_users));
    }
  }
  if (m_train_lo == 0 || m_train_lo > m_train_hi) {
    throw std::invalid_argument("moons: need 1 <= m_train_lo <= m_train_hi");
  }
  if (dim < 2) throw std::invalid_argument("moons: dim must be >= 2");
  if (!(label_flip_frac >= 0.0 && label_flip_frac < 1.0)) {
    throw std::invalid_argument("moons: label_flip_frac must lie in [0,1)");
  }
  if (!(oracle_sigma > 0.0)) throw std::invalid_argument("moons: oracle_sigma must be > 0");
  if (angle_noise_std < 0.0 || moon_noise_std < 0.0) {
    throw std::invalid_argument("moons: noise levels must be >= 0");
  }
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// One stream per user so users can be generated independently of each other.
std::mt19937_64 user_stream(std::uint64_t seed, std::size_t user) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(user), 0x6d6f6f6eu};
  return std::mt19937_64(seq);
}

struct MoonSampler {
  double noise_std;
  double cos_t;
  double sin_t;
  std::size_t dim;
  bool centre;

  // Standard crescents (radius 1, unit offset), rotated about the origin or,
  // with `centre`, about their joint centroid (0.5, 0.25).
  void sample(std::mt19937_64& rng, std::vector<double>& x, Label& y) const {
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> arc(0.0, std::numbers::pi);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> filler(-1.0, 1.0);

    const bool upper = coin(rng);
    const double t = arc(rng);
    double px, py;
    if (upper) {
      px = std::cos(t);
      py = std::sin(t);
      y = 1;
    } else {
      px = 1.0 - std::cos(t);
      py = 0.5 - std::sin(t);
      y = -1;
    }
    px += noise_std * noise(rng);
    py += noise_std * noise(rng);
    if (centre) {
      px -= 0.5;
      py -= 0.25;
    }

    x.assign(dim, 0.0);
    x[0] = cos_t * px - sin_t * py;
    x[1] = sin_t * px + cos_t * py;
    for (std::size_t d = 2; d < dim; ++d) x[d] = filler(rng);
  }
};

}  // namespace

MoonsData generate_moons(const MoonsConfig& cfg) {
  cfg.validate();

  MoonsData out;
  out.dataset.feature_dim = cfg.dim;
  out.dataset.users.resize(cfg.num_users);
  out.angles_deg.resize(cfg.num_users);

  std::vector<double> centre(cfg.num_users, 0.0);
  if (cfg.preset == MoonsPreset::clustered) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cfg.cluster_sizes.size(); ++c) {
      for (std::size_t i = 0; i < cfg.cluster_sizes[c]; ++i) centre[k++] = cfg.cluster_angles_deg[c];
    }
  }

  for (std::size_t k = 0; k < cfg.num_users; ++k) {
    std::mt19937_64 rng = user_stream(cfg.seed, k);
    std::normal_distribution<double> angle(centre[k], cfg.angle_noise_std);
    const double theta = cfg.angle_noise_std > 0.0 ? angle(rng) : centre[k];
    out.angles_deg[k] = theta;

    std::uniform_int_distribution<std::size_t> count(cfg.m_train_lo, cfg.m_train_hi);
    const std::size_t m = count(rng);

    const MoonSampler sampler{cfg.moon_noise_std, std::cos(theta * kDegToRad),
                              std::sin(theta * kDegToRad), cfg.dim, cfg.centre_crescents};
    UserData& user = out.dataset.users[k];
    user.angle_deg = theta;
    std::vector<double> x;
    Label y = 1;
    for (std::size_t i = 0; i < m; ++i) {
      sampler.sample(rng, x, y);
      user.train_x.append_row(x);
      user.train_y.push_back(y);
    }
    for (std::size_t i = 0; i < cfg.m_test; ++i) {
      sampler.sample(rng, x, y);
      user.test_x.append_row(x);
      user.test_y.push_back(y);
    }

    const auto flips = static_cast<std::size_t>(std::floor(cfg.label_flip_frac * static_cast<double>(m)));
    if (flips > 0) {
      std::vector<std::size_t> idx(m);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < flips; ++i) user.train_y[idx[i]] = -user.train_y[idx[i]];
    }
  }
  assign_confidences(out.dataset);

  out.feature_ranges.assign(cfg.dim, FeatureRange{std::numeric_limits<double>::infinity(),
                                                  -std::numeric_limits<double>::infinity()});
  auto widen = [&](const Matrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        out.feature_ranges[d].min = std::min(out.feature_ranges[d].min, x(i, d));
        out.feature_ranges[d].max = std::max(out.feature_ranges[d].max, x(i, d));
      }
    }
  };
  for (const UserData& u : out.dataset.users) {
    widen(u.train_x);
    widen(u.test_x);
  }
  return out;
}

CollaborationGraph oracle_graph(std::span<const double> angles_deg, double sigma,
                                double drop_threshold) {
  if (!(sigma > 0.0)) throw std::invalid_argument("oracle_graph: sigma must be > 0");
  CollaborationGraph graph(angles_deg.size());
  for (std::size_t k = 0; k < angles_deg.size(); ++k) {
    for (std::size_t l = k + 1; l < angles_deg.size(); ++l) {
      const double diff = (angles_deg[k] - angles_deg[l]) * kDegToRad;
      const double w = std::exp((std::cos(diff) - 1.0) / sigma);
      if (w >= drop_threshold && w > 0.0) graph.set_weight(k, l, w);
    }
  }
  return graph;
}

StumpEnsemble build_stumps(std::span<const FeatureRange> ranges, std::size_t per_dim) {
  if (per_dim == 0) throw std::invalid_argument("build_stumps: per_dim must be >= 1");
  StumpEnsemble out;
  out.stumps.reserve(ranges.size() * per_dim);
  for (std::size_t d = 0; d < ranges.size(); ++d) {
    const FeatureRange& r = ranges[d];
    if (!(r.min < r.max)) {
      throw std::invalid_argument("build_stumps: degenerate range for feature " + std::to_string(d));
    }
    const double step = (r.max - r.min) / static_cast<double>(per_dim + 1);
    for (std::size_t i = 1; i <= per_dim; ++i) {
      out.stumps.push_back(Stump{d, r.min + static_cast<double>(i) * step, 1});
    }
  }
  return out;
}

StumpEnsemble build_stumps_total(std::span<const FeatureRange> ranges, std::size_t n) {
  if (ranges.empty()) throw std::invalid_argument("build_stumps: no feature ranges");
  if (n == 0 || n % ranges.size() != 0) {
    throw std::invalid_argument("build_stumps: n=" + std::to_string(n) +
                                " is not a positive multiple of D=" + std::to_string(ranges.size()));
  }
  return build_stumps(ranges, n / ranges.size());
}

std::vector<FeatureRange> training_feature_ranges(const PartitionedDataset& dataset) {
  std::vector<FeatureRange> ranges(dataset.feature_dim,
                                   FeatureRange{std::numeric_limits<double>::infinity(),
                                                -std::numeric_limits<double>::infinity()});
  for (const UserData& u : dataset.users) {
    for (std::size_t i = 0; i < u.train_x.rows(); ++i) {
      for (std::size_t d = 0; d < dataset.feature_dim; ++d) {
        ranges[d].min = std::min(ranges[d].min, u.train_x(i, d));
        ranges[d].max = std::max(ranges[d].max, u.train_x(i, d));
      }
    }
  }
  for (FeatureRange& r : ranges) {
    if (!(r.min < r.max)) {
      const double c = std::isfinite(r.min) ? r.min : 0.0;
      r = FeatureRange{c - 0.5, c + 0.5};
    }
  }
  return ranges;
}

Matrix stump_outputs(const Matrix& x, const StumpEnsemble& stumps) {
  Matrix out(x.rows(), stumps.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < stumps.size(); ++j) out(i, j) = stumps.stumps[j](row);
  }
  return out;
}

MarginMatrix margin_matrix(const UserData& user, const StumpEnsemble& stumps) {
  MarginMatrix a = stump_outputs(user.train_x, stumps);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (double& v : a.row(i)) v *= user.train_y[i];
  }
  return a;
}

std::vector<MarginMatrix> margin_matrices(const PartitionedDataset& dataset,
                                          const StumpEnsemble& stumps) {
  std::vector<MarginMatrix> out;
  out.reserve(dataset.num_users());
  for (const UserData& u : dataset.users) out.push_back(margin_matrix(u, stumps));
  return out;
}

}  // namespace dada
