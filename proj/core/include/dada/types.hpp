#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dada {

/// Dense row-major matrix of doubles. Used for feature blocks and margin
/// matrices; no linear algebra beyond what the solvers need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  /// Appends one row; the first row fixes the column count of an empty matrix.
  void append_row(std::span<const double> values);

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Labels are stored as +1 / -1.
using Label = int;

struct UserData {
  Matrix train_x;
  std::vector<Label> train_y;
  Matrix test_x;
  std::vector<Label> test_y;
  double confidence = 1.0;
  std::optional<double> angle_deg;

  std::size_t num_train() const noexcept { return train_y.size(); }
  std::size_t num_test() const noexcept { return test_y.size(); }

  friend bool operator==(const UserData&, const UserData&) = default;
};

struct PartitionedDataset {
  std::vector<UserData> users;
  std::size_t feature_dim = 0;

  std::size_t num_users() const noexcept { return users.size(); }

  /// Throws std::invalid_argument when a user has no training sample, a row
  /// has the wrong width, or a label is not +1/-1.
  void validate() const;

  friend bool operator==(const PartitionedDataset&, const PartitionedDataset&) = default;
};

/// c_k = m_k / max_l m_l.
std::vector<double> confidences(const PartitionedDataset& dataset);

/// Recomputes and stores confidences on every user.
void assign_confidences(PartitionedDataset& dataset);

/// Sign with the tie rule sign(0) = +1.
inline int sign_of(double v) noexcept { return v >= 0.0 ? 1 : -1; }

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int operator()(std::span<const double> x) const noexcept {
    return polarity * sign_of(x[feature] - threshold);
  }

  friend bool operator==(const Stump&, const Stump&) = default;
};

/// Shared base predictors H; every user evaluates the same list.
struct StumpEnsemble {
  std::vector<Stump> stumps;

  std::size_t size() const noexcept { return stumps.size(); }

  friend bool operator==(const StumpEnsemble&, const StumpEnsemble&) = default;
};

/// m_k x n matrix with entry (i, j) = y_i h_j(x_i).
using MarginMatrix = Matrix;

/// Sparse coefficient vector constrained to the L1 ball of radius l1_budget.
struct SparseModel {
  std::size_t dim = 0;
  double l1_budget = 0.0;
  std::size_t update_count = 0;
  std::map<std::size_t, double> coefficients;

  SparseModel() = default;
  SparseModel(std::size_t dimension, double budget) : dim(dimension), l1_budget(budget) {}

  std::size_t nnz() const noexcept { return coefficients.size(); }
  double coefficient(std::size_t j) const;
  double l1_norm() const;
  double squared_norm() const;
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseModel&, const SparseModel&) = default;
};

/// Squared Euclidean distance between two sparse models of equal dimension.
double squared_distance(const SparseModel& a, const SparseModel& b);

/// Symmetric, nonnegative edge weights over K users. Each unordered pair owns
/// exactly one storage cell; zero weight means no edge.
class CollaborationGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // first < second

  CollaborationGraph() = default;
  explicit CollaborationGraph(std::size_t num_users);

  std::size_t num_users() const noexcept { return degrees_.size(); }

  double weight(std::size_t k, std::size_t l) const;

  /// Sets w_{k,l} = w_{l,k}. Zero removes the edge.
  void set_weight(std::size_t k, std::size_t l, double w);

  double degree(std::size_t k) const;
  const std::vector<double>& degrees() const noexcept { return degrees_; }

  const std::set<std::size_t>& neighbors(std::size_t k) const;
  std::size_t edge_count() const noexcept { return weights_.size(); }
  double mean_neighbor_count() const;
  const std::map<Edge, double>& edges() const noexcept { return weights_; }

  /// Degree recomputed from the edge list rather than the cache.
  double recompute_degree(std::size_t k) const;

  friend bool operator==(const CollaborationGraph&, const CollaborationGraph&) = default;

 private:
  void check_user(std::size_t k) const;
  static Edge key(std::size_t k, std::size_t l) { return k < l ? Edge{k, l} : Edge{l, k}; }
  void refresh_degree(std::size_t k);

  std::map<Edge, double> weights_;
  std::vector<std::set<std::size_t>> neighbors_;
  std::vector<double> degrees_;
};

/// Free-function form of CollaborationGraph::degree.
double degree(const CollaborationGraph& graph, std::size_t k);

struct Hyperparams {
  double mu1 = 1.0;
  std::optional<double> mu2_override;  ///< mu2 = mu1 unless set
  double beta = 10.0;
  double lambda = 1.0;
  double delta = 0.1;
  std::size_t kappa = 5;
  int float_bits = 32;  ///< Z

  double mu2() const noexcept { return mu2_override.value_or(mu1); }

  /// Throws std::invalid_argument for out-of-range values; kappa is checked
  /// against num_users when it is nonzero.
  void validate(std::size_t num_users = 0) const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

}  // namespace dada
