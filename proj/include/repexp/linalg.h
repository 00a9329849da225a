// Copyright 2026 The RepExp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPEXP_LINALG_H_
#define REPEXP_LINALG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "Eigen/Core"

namespace repexp {

// Raised when a vector or matrix does not have the expected dimension.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& what, Eigen::Index expected,
                 Eigen::Index actual);

  Eigen::Index expected() const { return expected_; }
  Eigen::Index actual() const { return actual_; }

 private:
  Eigen::Index expected_;
  Eigen::Index actual_;
};

// Raised when a covariance correction becomes numerically singular.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse of the regularized (non-centered) covariance
//
//   Sigma = lambda * I + sum_j h_j h_j^T
//
// maintained by Sherman-Morrison rank-one updates, together with the running
// sum and count of absorbed vectors so the mean-centered inverse can be
// recovered at any time. All arithmetic is in double precision.
class InverseCovariance {
 public:
  InverseCovariance(Eigen::Index dim, double lambda);

  Eigen::Index dim() const { return inverse_.rows(); }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return count_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }
  const Eigen::VectorXd& mean_sum() const { return mean_sum_; }

  // Running mean of absorbed vectors; the zero vector when nothing has been
  // absorbed yet.
  Eigen::VectorXd mean() const;

  // h^T Sigma^{-1} h. Does not modify the state.
  double Bonus(const Eigen::Ref<const Eigen::VectorXd>& h) const;

  // Folds h into Sigma^{-1} in O(d^2). The zero vector is accepted and only
  // bumps the count.
  void Absorb(const Eigen::Ref<const Eigen::VectorXd>& h);

  // Absorbs every row of `rows` in order.
  void AbsorbRows(const Eigen::Ref<const Eigen::MatrixXd>& rows);

  // Inverse of lambda * I + sum_j (h_j - mu)(h_j - mu)^T, obtained from the
  // non-centered inverse by a single rank-one correction with the current
  // mean mu. Throws std::logic_error when nothing has been absorbed and
  // NumericalError when the correction's denominator is below 1e-12.
  Eigen::MatrixXd MeanCenteredInverse() const;

 private:
  double lambda_;
  std::int64_t count_ = 0;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd mean_sum_;
};

inline constexpr double kCenteringDenominatorFloor = 1e-12;

// Leverage score of every row of `group` (k x d) against the covariance
// lambda * I + sum_j g_j g_j^T built from the whole group, row itself
// included. Each value lies in [0, 1).
Eigen::VectorXd LeverageScores(const Eigen::Ref<const Eigen::MatrixXd>& group,
                               double lambda);

// Leverage score of row `index` (zero-based) of `group`.
double LeverageScore(const Eigen::Ref<const Eigen::MatrixXd>& group,
                     Eigen::Index index, double lambda);

// Same, for a group given as separate vectors. All vectors must share the
// dimension of the first one.
double LeverageScore(const std::vector<Eigen::VectorXd>& group,
                     Eigen::Index index, double lambda);

}  // namespace repexp

#endif  // REPEXP_LINALG_H_
