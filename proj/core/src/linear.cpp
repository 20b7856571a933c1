#include "dada/linear.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace dada {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Design {
  Eigen::MatrixXd x;  // m x (D + 1), last column is the constant 1
  Eigen::VectorXd y;
};

Design make_design(const Matrix& x, std::span<const Label> y) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit_logistic: rows and labels differ");
  Design d{Eigen::MatrixXd(x.rows(), x.cols() + 1), Eigen::VectorXd(x.rows())};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) d.x(i, j) = x(i, j);
    d.x(i, x.cols()) = 1.0;
    d.y(i) = y[i];
  }
  return d;
}

double objective(const Design& d, double l2, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd z = d.x * theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(-d.y(i) * z(i));
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * theta.squaredNorm();
}

Eigen::VectorXd gradient(const Design& d, double l2, const Eigen::VectorXd& theta,
                         Eigen::VectorXd* curvature) {
  const Eigen::VectorXd z = d.x * theta;
  const double inv_m = 1.0 / static_cast<double>(z.size());
  Eigen::VectorXd coef(z.size());
  if (curvature != nullptr) curvature->resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = sigmoid(-d.y(i) * z(i));
    coef(i) = -d.y(i) * s * inv_m;
    if (curvature != nullptr) (*curvature)(i) = s * (1.0 - s) * inv_m;
  }
  return d.x.transpose() * coef + l2 * theta;
}

LinearModel unpack(const Eigen::VectorXd& theta) {
  LinearModel m;
  m.weights.assign(theta.data(), theta.data() + theta.size() - 1);
  m.bias = theta(theta.size() - 1);
  return m;
}

}  // namespace

double LinearModel::score(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("LinearModel: dimension mismatch");
  double s = bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
  return s;
}

double logistic_objective(const Matrix& x, std::span<const Label> y, double l2, const LinearModel& m,
                          std::vector<double>* grad) {
  const Design d = make_design(x, y);
  Eigen::VectorXd theta(m.weights.size() + 1);
  for (std::size_t j = 0; j < m.weights.size(); ++j) theta(j) = m.weights[j];
  theta(m.weights.size()) = m.bias;
  if (grad != nullptr) {
    const Eigen::VectorXd g = gradient(d, l2, theta, nullptr);
    grad->assign(g.data(), g.data() + g.size());
  }
  return objective(d, l2, theta);
}

LinearFit fit_logistic(const Matrix& x, std::span<const Label> y, double l2, double tol,
                       std::size_t max_iter) {
  if (!(l2 > 0.0)) throw std::invalid_argument("fit_logistic: l2 must be > 0");
  if (x.rows() == 0) throw std::invalid_argument("fit_logistic: no samples");
  const Design d = make_design(x, y);
  const Eigen::Index p = d.x.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);

  LinearFit fit;
  Eigen::VectorXd curv;
  Eigen::VectorXd g = gradient(d, l2, theta, &curv);
  double value = objective(d, l2, theta);
  while (fit.iterations < max_iter && g.norm() > tol) {
    Eigen::MatrixXd hess = d.x.transpose() * curv.asDiagonal() * d.x;
    hess.diagonal().array() += l2;
    const Eigen::VectorXd step = hess.ldlt().solve(g);
    // Backtracking keeps the damped Newton iteration monotone.
    double t = 1.0;
    Eigen::VectorXd next = theta - step;
    double next_value = objective(d, l2, next);
    while (next_value > value - 1e-4 * t * g.dot(step) && t > 1e-10) {
      t *= 0.5;
      next = theta - t * step;
      next_value = objective(d, l2, next);
    }
    theta = next;
    value = next_value;
    g = gradient(d, l2, theta, &curv);
    ++fit.iterations;
  }
  fit.model = unpack(theta);
  fit.grad_norm = g.norm();
  fit.converged = fit.grad_norm <= tol;
  return fit;
}

std::vector<LinearModel> run_linear_baselines(const PartitionedDataset& dataset, LinearMode mode,
                                              double l2) {
  dataset.validate();
  std::vector<LinearModel> models;
  models.reserve(dataset.num_users());
  if (mode == LinearMode::global) {
    Matrix x;
    std::vector<Label> y;
    for (const UserData& u : dataset.users) {
      for (std::size_t i = 0; i < u.num_train(); ++i) {
        x.append_row(u.train_x.row(i));
        y.push_back(u.train_y[i]);
      }
    }
    const LinearModel pooled = fit_logistic(x, y, l2).model;
    models.assign(dataset.num_users(), pooled);
  } else {
    for (const UserData& u : dataset.users) models.push_back(fit_logistic(u.train_x, u.train_y, l2).model);
  }
  return models;
}

AccuracyReport linear_accuracy(std::span<const LinearModel> models, const PartitionedDataset& dataset,
                               Split split) {
  if (models.size() != dataset.num_users()) {
    throw std::invalid_argument("linear_accuracy: one model per user expected");
  }
  AccuracyReport report;
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const UserData& u = dataset.users[k];
    const Matrix& x = split == Split::train ? u.train_x : u.test_x;
    const std::vector<Label>& y = split == Split::train ? u.train_y : u.test_y;
    double acc = std::numeric_limits<double>::quiet_NaN();
    if (!y.empty()) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < y.size(); ++i) correct += models[k].predict(x.row(i)) == y[i];
      acc = static_cast<double>(correct) / static_cast<double>(y.size());
      sum += acc;
      ++counted;
    }
    report.per_user.push_back(acc);
  }
  report.mean = counted == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(counted);
  return report;
}

}  // namespace dada
