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

#include "repexp/linalg.h"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "Eigen/Cholesky"

namespace repexp {

DimensionError::DimensionError(const std::string& what, Eigen::Index expected,
                               Eigen::Index actual)
    : std::invalid_argument(what + ": expected dimension " +
                            std::to_string(expected) + ", got " +
                            std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

InverseCovariance::InverseCovariance(Eigen::Index dim, double lambda)
    : lambda_(lambda) {
  if (dim < 1) throw std::invalid_argument("InverseCovariance: dim must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("InverseCovariance: lambda must be finite and > 0");
  }
  inverse_ = Eigen::MatrixXd::Identity(dim, dim) / lambda;
  mean_sum_ = Eigen::VectorXd::Zero(dim);
}

Eigen::VectorXd InverseCovariance::mean() const {
  if (count_ == 0) return Eigen::VectorXd::Zero(dim());
  return mean_sum_ / static_cast<double>(count_);
}

double InverseCovariance::Bonus(const Eigen::Ref<const Eigen::VectorXd>& h) const {
  if (h.size() != dim()) throw DimensionError("elliptic bonus", dim(), h.size());
  return h.dot(inverse_.selfadjointView<Eigen::Lower>() * h);
}

void InverseCovariance::Absorb(const Eigen::Ref<const Eigen::VectorXd>& h) {
  if (h.size() != dim()) throw DimensionError("rank-one update", dim(), h.size());
  if (!h.allFinite()) {
    throw std::invalid_argument("rank-one update: vector has non-finite entries");
  }
  ++count_;
  mean_sum_ += h;
  if (h.isZero(0.0)) return;

  const Eigen::VectorXd u = inverse_ * h;
  const double denom = 1.0 + h.dot(u);
  assert(denom > 0.0 && "inverse covariance lost positive definiteness");
  inverse_.noalias() -= (u / denom) * u.transpose();
  // Keep the stored inverse exactly symmetric.
  inverse_ = (0.5 * (inverse_ + inverse_.transpose())).eval();
}

void InverseCovariance::AbsorbRows(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.cols() != dim()) throw DimensionError("rank-one update", dim(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) Absorb(rows.row(i).transpose());
}

Eigen::MatrixXd InverseCovariance::MeanCenteredInverse() const {
  if (count_ == 0) {
    throw std::logic_error("mean-centered inverse: no data absorbed");
  }
  const double h_count = static_cast<double>(count_);
  const Eigen::VectorXd mu = mean_sum_ / h_count;
  const Eigen::VectorXd u = inverse_ * mu;
  const double denom = -1.0 / h_count + mu.dot(u);
  if (std::abs(denom) < kCenteringDenominatorFloor) {
    throw NumericalError("mean-centered inverse: degenerate denominator " +
                         std::to_string(denom));
  }
  Eigen::MatrixXd out = inverse_ - (u / denom) * u.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::VectorXd LeverageScores(const Eigen::Ref<const Eigen::MatrixXd>& group,
                               double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("leverage score: lambda must be > 0");
  if (group.rows() == 0) throw std::invalid_argument("leverage score: empty group");
  const Eigen::Index d = group.cols();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d) * lambda;
  sigma.selfadjointView<Eigen::Lower>().rankUpdate(group.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sigma.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("leverage score: covariance is not positive definite");
  }
  // Column i of L^{-1} G^T has squared norm g_i^T Sigma^{-1} g_i.
  Eigen::MatrixXd whitened = group.transpose();
  llt.matrixL().solveInPlace(whitened);
  return whitened.colwise().squaredNorm().transpose();
}

double LeverageScore(const Eigen::Ref<const Eigen::MatrixXd>& group,
                     Eigen::Index index, double lambda) {
  if (index < 0 || index >= group.rows()) {
    throw std::out_of_range("leverage score: index " + std::to_string(index) +
                            " outside group of size " + std::to_string(group.rows()));
  }
  return LeverageScores(group, lambda)(index);
}

double LeverageScore(const std::vector<Eigen::VectorXd>& group,
                     Eigen::Index index, double lambda) {
  if (group.empty()) throw std::invalid_argument("leverage score: empty group");
  const Eigen::Index d = group.front().size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(group.size()), d);
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i].size() != d) throw DimensionError("leverage score", d, group[i].size());
    rows.row(static_cast<Eigen::Index>(i)) = group[i].transpose();
  }
  return LeverageScore(rows, index, lambda);
}

}  // namespace repexp
