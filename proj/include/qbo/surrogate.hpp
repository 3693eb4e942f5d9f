// Copyright 2026 The qbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <utility>

#include "qbo/bitvector.hpp"
#include "qbo/dataset.hpp"
#include "qbo/error.hpp"

namespace qbo {

/// Index layout of the quadratic feature expansion: constant, the N linear
/// terms, then the pairs (0,1),(0,2),...,(0,N-1),(1,2),...,(N-2,N-1).
class FeatureMap {
 public:
  explicit FeatureMap(std::size_t n_vars = 0) : n_(n_vars), p_(1 + n_vars + n_vars * (n_vars - 1) / 2) {}

  std::size_t n_vars() const noexcept { return n_; }
  std::size_t size() const noexcept { return p_; }

  std::size_t linear_index(std::size_t i) const noexcept { return 1 + i; }

  /// Feature index of x_i x_j, i < j.
  std::size_t pair_index(std::size_t i, std::size_t j) const noexcept {
    return 1 + n_ + i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  Eigen::VectorXd design_row(const BitVector& x) const {
    if (x.size() != n_)
      throw LengthMismatch("bit vector has length " + std::to_string(x.size()) + ", feature map expects " +
                           std::to_string(n_));
    Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
    row[0] = 1.0;
    std::size_t k = 1 + n_;
    for (std::size_t i = 0; i < n_; ++i) {
      row[static_cast<Eigen::Index>(1 + i)] = x[i];
      for (std::size_t j = i + 1; j < n_; ++j, ++k)
        row[static_cast<Eigen::Index>(k)] = x[i] & x[j];
    }
    return row;
  }

  Eigen::MatrixXd design_matrix(const Dataset& data) const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(p_));
    for (std::size_t r = 0; r < data.size(); ++r)
      X.row(static_cast<Eigen::Index>(r)) = design_row(data[r].x).transpose();
    return X;
  }

 private:
  std::size_t n_;
  std::size_t p_;
};

/// Surrogate coefficients (alpha_0, alpha_i, alpha_ij) in FeatureMap order.
struct CoefficientSample {
  Eigen::VectorXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

/// Gaussian posterior N(mean, sigma2 * (X^T X + lambda I)^-1) over the
/// surrogate coefficients. The precision matrix A = X^T X + lambda I is kept
/// as its Cholesky factor L (A = L L^T); L^-T is then a factor of A^-1 and
/// is applied by back-substitution when sampling.
class PosteriorModel {
 public:
  PosteriorModel(FeatureMap features, Eigen::VectorXd mean, Eigen::MatrixXd precision_factor, double sigma2,
                 double lambda)
      : features_(features),
        mean_(std::move(mean)),
        precision_factor_(std::move(precision_factor)),
        sigma2_(sigma2),
        lambda_(lambda) {}

  const FeatureMap& features() const noexcept { return features_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& precision_factor() const noexcept { return precision_factor_; }
  double sigma2() const noexcept { return sigma2_; }
  double lambda() const noexcept { return lambda_; }

  CoefficientSample mean_sample() const { return {mean_}; }

  /// Returns U = L^-T applied to v, so that U U^T = A^-1.
  Eigen::VectorXd apply_covariance_factor(const Eigen::VectorXd& v) const {
    return precision_factor_.triangularView<Eigen::Lower>().transpose().solve(v);
  }

 private:
  FeatureMap features_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd precision_factor_;
  double sigma2_;
  double lambda_;
};

inline Eigen::VectorXd design_row(const FeatureMap& fm, const BitVector& x) { return fm.design_row(x); }

/// Full refit from the dataset. Fails rather than adding jitter when the
/// precision matrix is not numerically positive definite.
inline PosteriorModel fit_posterior(const Dataset& data, double lambda, double sigma2) {
  if (!(lambda > 0)) throw InvalidArgument("lambda must be > 0");
  if (!(sigma2 >= 0)) throw InvalidArgument("sigma2 must be >= 0");
  if (data.empty()) throw InvalidArgument("cannot fit a posterior on an empty dataset");

  FeatureMap fm(data.n_bits());
  const auto p = static_cast<Eigen::Index>(fm.size());
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  {
    const Eigen::MatrixXd X = fm.design_matrix(data);
    const auto targets = data.targets();
    const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));
    precision.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    xty.noalias() = X.transpose() * y;
  }
  precision.diagonal().array() += lambda;

  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("Cholesky factorization of X^T X + lambda I failed (lambda=" + std::to_string(lambda) +
                           ")");
  Eigen::VectorXd mean = llt.solve(xty);
  if (!mean.allFinite()) throw NumericalFailure("posterior mean is not finite");
  Eigen::MatrixXd L = llt.matrixL();
  return PosteriorModel(fm, std::move(mean), std::move(L), sigma2, lambda);
}

/// Draws mean + sqrt(sigma2) * L^-T z with z standard normal. With sigma2 = 0
/// the mean is returned unchanged and the engine is not advanced.
template <typename Engine>
CoefficientSample sample_coefficients(const PosteriorModel& post, Engine& rng) {
  if (post.sigma2() == 0.0) return post.mean_sample();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(post.mean().size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return {post.mean() + std::sqrt(post.sigma2()) * post.apply_covariance_factor(z)};
}

/// alpha_0 + sum_i alpha_i x_i + sum_{i<j} alpha_ij x_i x_j.
inline double predict(const CoefficientSample& alpha, const BitVector& x) {
  const std::size_t n = x.size();
  const FeatureMap fm(n);
  if (alpha.size() != fm.size())
    throw LengthMismatch("coefficient vector has length " + std::to_string(alpha.size()) + ", expected " +
                         std::to_string(fm.size()));
  double value = alpha[0];
  std::size_t k = 1 + n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) {
      k += n - i - 1;
      continue;
    }
    value += alpha[1 + i];
    for (std::size_t j = i + 1; j < n; ++j, ++k)
      if (x[j]) value += alpha[k];
  }
  return value;
}

inline double r_squared(std::span<const double> predictions, std::span<const double> y) {
  if (predictions.size() != y.size()) throw LengthMismatch("prediction and target lengths differ");
  if (y.empty()) throw DegenerateTarget("no targets");
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - predictions[i]) * (y[i] - predictions[i]);
  }
  bool all_equal = true;
  for (double v : y) all_equal = all_equal && v == y[0];
  if (all_equal) throw DegenerateTarget("all targets are identical; R^2 is undefined");
  return 1.0 - ss_res / ss_tot;
}

/// In-sample coefficient of determination of the posterior-mean predictor.
inline double r_squared(const PosteriorModel& post, const Dataset& data) {
  std::vector<double> pred;
  pred.reserve(data.size());
  const auto mu = post.mean_sample();
  for (const auto& row : data) pred.push_back(predict(mu, row.x));
  const auto y = data.targets();
  return r_squared(pred, y);
}

}  // namespace qbo
