#include "dada/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dada {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw std::invalid_argument("row width " + std::to_string(values.size()) +
                                " does not match matrix width " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

namespace {

void check_block(const Matrix& x, const std::vector<Label>& y, std::size_t dim,
                 std::size_t user, const char* split) {
  const std::string where = "user " + std::to_string(user) + " " + split;
  if (x.rows() != y.size()) {
    throw std::invalid_argument(where + ": feature rows and labels differ in count");
  }
  if (x.rows() > 0 && x.cols() != dim) {
    throw std::invalid_argument(where + ": expected " + std::to_string(dim) + " features, got " +
                                std::to_string(x.cols()));
  }
  for (Label label : y) {
    if (label != 1 && label != -1) throw std::invalid_argument(where + ": label not in {-1,+1}");
  }
}

}  // namespace

void PartitionedDataset::validate() const {
  if (users.empty()) throw std::invalid_argument("no users");
  for (std::size_t k = 0; k < users.size(); ++k) {
    const UserData& u = users[k];
    if (u.num_train() == 0) {
      throw std::invalid_argument("user " + std::to_string(k) + " has no training samples");
    }
    check_block(u.train_x, u.train_y, feature_dim, k, "train");
    check_block(u.test_x, u.test_y, feature_dim, k, "test");
  }
}

std::vector<double> confidences(const PartitionedDataset& dataset) {
  if (dataset.users.empty()) throw std::invalid_argument("no users");
  std::size_t largest = 0;
  for (const UserData& u : dataset.users) largest = std::max(largest, u.num_train());
  if (largest == 0) throw std::invalid_argument("no training samples");
  std::vector<double> out;
  out.reserve(dataset.users.size());
  for (const UserData& u : dataset.users) {
    if (u.num_train() == 0) throw std::invalid_argument("user without training samples");
    out.push_back(static_cast<double>(u.num_train()) / static_cast<double>(largest));
  }
  return out;
}

void assign_confidences(PartitionedDataset& dataset) {
  const std::vector<double> c = confidences(dataset);
  for (std::size_t k = 0; k < c.size(); ++k) dataset.users[k].confidence = c[k];
}

double SparseModel::coefficient(std::size_t j) const {
  auto it = coefficients.find(j);
  return it == coefficients.end() ? 0.0 : it->second;
}

double SparseModel::l1_norm() const {
  double s = 0.0;
  for (const auto& [j, v] : coefficients) s += std::abs(v);
  return s;
}

double SparseModel::squared_norm() const {
  double s = 0.0;
  for (const auto& [j, v] : coefficients) s += v * v;
  return s;
}

std::vector<double> SparseModel::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [j, v] : coefficients) out.at(j) = v;
  return out;
}

double squared_distance(const SparseModel& a, const SparseModel& b) {
  double s = 0.0;
  auto ia = a.coefficients.begin();
  auto ib = b.coefficients.begin();
  while (ia != a.coefficients.end() || ib != b.coefficients.end()) {
    double diff;
    if (ib == b.coefficients.end() || (ia != a.coefficients.end() && ia->first < ib->first)) {
      diff = ia->second;
      ++ia;
    } else if (ia == a.coefficients.end() || ib->first < ia->first) {
      diff = ib->second;
      ++ib;
    } else {
      diff = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    s += diff * diff;
  }
  return s;
}

CollaborationGraph::CollaborationGraph(std::size_t num_users)
    : neighbors_(num_users), degrees_(num_users, 0.0) {}

void CollaborationGraph::check_user(std::size_t k) const {
  if (k >= degrees_.size()) {
    throw std::out_of_range("user index " + std::to_string(k) + " out of range for K=" +
                            std::to_string(degrees_.size()));
  }
}

double CollaborationGraph::weight(std::size_t k, std::size_t l) const {
  check_user(k);
  check_user(l);
  if (k == l) return 0.0;
  auto it = weights_.find(key(k, l));
  return it == weights_.end() ? 0.0 : it->second;
}

void CollaborationGraph::set_weight(std::size_t k, std::size_t l, double w) {
  check_user(k);
  check_user(l);
  if (k == l) throw std::invalid_argument("self-edges are not allowed");
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("edge weight must be finite and nonnegative");
  }
  const Edge e = key(k, l);
  if (w == 0.0) {
    if (weights_.erase(e) == 0) return;
    neighbors_[k].erase(l);
    neighbors_[l].erase(k);
  } else {
    weights_[e] = w;
    neighbors_[k].insert(l);
    neighbors_[l].insert(k);
  }
  refresh_degree(k);
  refresh_degree(l);
}

void CollaborationGraph::refresh_degree(std::size_t k) {
  double d = 0.0;
  for (std::size_t l : neighbors_[k]) d += weights_.at(key(k, l));
  degrees_[k] = d;
}

double CollaborationGraph::degree(std::size_t k) const {
  check_user(k);
  return degrees_[k];
}

const std::set<std::size_t>& CollaborationGraph::neighbors(std::size_t k) const {
  check_user(k);
  return neighbors_[k];
}

double CollaborationGraph::mean_neighbor_count() const {
  if (degrees_.empty()) return 0.0;
  return 2.0 * static_cast<double>(weights_.size()) / static_cast<double>(degrees_.size());
}

double CollaborationGraph::recompute_degree(std::size_t k) const {
  check_user(k);
  double d = 0.0;
  for (const auto& [e, w] : weights_) {
    if (e.first == k || e.second == k) d += w;
  }
  return d;
}

double degree(const CollaborationGraph& graph, std::size_t k) { return graph.degree(k); }

void Hyperparams::validate(std::size_t num_users) const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(mu1 >= 0.0 && std::isfinite(mu1), "mu1 must be a finite value >= 0");
  require(mu2() >= 0.0 && std::isfinite(mu2()), "mu2 must be a finite value >= 0");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be a finite value >= 0");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be > 0");
  require(delta > 0.0 && std::isfinite(delta), "delta must be > 0");
  require(float_bits > 0, "float_bits must be positive");
  require(kappa >= 1, "kappa must be >= 1");
  if (num_users >= 2) require(kappa <= num_users - 1, "kappa must be <= K-1");
}

}  // namespace dada
