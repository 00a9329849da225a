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

#ifndef REPEXP_PROJECTION_H_
#define REPEXP_PROJECTION_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"

namespace repexp {

// Very sparse random projection from R^D to R^d. Each entry of the implicit
// D x d matrix is +sqrt(s/d) or -sqrt(s/d) with probability 1/(2s) each and
// zero otherwise, so squared norms are preserved in expectation. The matrix
// is a pure function of (seed, D, d, s).
class SparseProjection {
 public:
  // Throws std::invalid_argument unless D >= d >= 1 and s >= 1.
  static SparseProjection Make(Eigen::Index input_dim, Eigen::Index output_dim,
                               double sparsity, std::uint64_t seed);
  // Uses the default sparsity s = sqrt(D).
  static SparseProjection Make(Eigen::Index input_dim, Eigen::Index output_dim,
                               std::uint64_t seed);
  // Identity map on R^D. Test and debugging aid.
  static SparseProjection Passthrough(Eigen::Index dim);

  static double DefaultSparsity(Eigen::Index input_dim);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }
  double sparsity() const { return sparsity_; }
  std::uint64_t seed() const { return seed_; }
  bool passthrough() const { return passthrough_; }
  std::size_t nonzeros() const { return cols_.size(); }

  // Entry (row, col) of the implicit matrix.
  double entry(Eigen::Index row, Eigen::Index col) const;

  Eigen::VectorXd Apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  // Projects every row of an N x D matrix.
  Eigen::MatrixXd ApplyRows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;

 private:
  SparseProjection() = default;

  Eigen::Index input_dim_ = 0;
  Eigen::Index output_dim_ = 0;
  double sparsity_ = 1.0;
  std::uint64_t seed_ = 0;
  bool passthrough_ = false;
  double scale_ = 1.0;
  // CSR layout over input rows; signs are +1/-1.
  std::vector<std::int64_t> row_start_;
  std::vector<std::int32_t> cols_;
  std::vector<std::int8_t> signs_;
};

}  // namespace repexp

#endif  // REPEXP_PROJECTION_H_
