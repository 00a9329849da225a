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

#include "repexp/projection.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "repexp/linalg.h"
#include "repexp/rng.h"

namespace repexp {

double SparseProjection::DefaultSparsity(Eigen::Index input_dim) {
  return std::max(1.0, std::sqrt(static_cast<double>(input_dim)));
}

SparseProjection SparseProjection::Make(Eigen::Index input_dim,
                                        Eigen::Index output_dim,
                                        std::uint64_t seed) {
  return Make(input_dim, output_dim, DefaultSparsity(input_dim), seed);
}

SparseProjection SparseProjection::Make(Eigen::Index input_dim,
                                        Eigen::Index output_dim, double sparsity,
                                        std::uint64_t seed) {
  if (output_dim < 1) throw std::invalid_argument("projection: output dim must be >= 1");
  if (output_dim > input_dim) {
    throw std::invalid_argument("projection: output dim " + std::to_string(output_dim) +
                                " exceeds input dim " + std::to_string(input_dim));
  }
  if (!(sparsity >= 1.0) || !std::isfinite(sparsity)) {
    throw std::invalid_argument("projection: sparsity must be finite and >= 1");
  }
  SparseProjection p;
  p.input_dim_ = input_dim;
  p.output_dim_ = output_dim;
  p.sparsity_ = sparsity;
  p.seed_ = seed;
  p.scale_ = std::sqrt(sparsity / static_cast<double>(output_dim));

  const double half = 0.5 / sparsity;
  Rng rng(MixSeed(seed, 0x70726f6aULL));
  p.row_start_.reserve(static_cast<std::size_t>(input_dim) + 1);
  p.row_start_.push_back(0);
  for (Eigen::Index i = 0; i < input_dim; ++i) {
    for (Eigen::Index j = 0; j < output_dim; ++j) {
      const double u = Uniform01(rng);
      if (u < half) {
        p.cols_.push_back(static_cast<std::int32_t>(j));
        p.signs_.push_back(1);
      } else if (u < 2.0 * half) {
        p.cols_.push_back(static_cast<std::int32_t>(j));
        p.signs_.push_back(-1);
      }
    }
    p.row_start_.push_back(static_cast<std::int64_t>(p.cols_.size()));
  }
  return p;
}

SparseProjection SparseProjection::Passthrough(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("projection: dim must be >= 1");
  SparseProjection p;
  p.input_dim_ = dim;
  p.output_dim_ = dim;
  p.passthrough_ = true;
  p.scale_ = 1.0;
  p.row_start_.reserve(static_cast<std::size_t>(dim) + 1);
  p.row_start_.push_back(0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    p.cols_.push_back(static_cast<std::int32_t>(i));
    p.signs_.push_back(1);
    p.row_start_.push_back(static_cast<std::int64_t>(p.cols_.size()));
  }
  return p;
}

double SparseProjection::entry(Eigen::Index row, Eigen::Index col) const {
  if (row < 0 || row >= input_dim_ || col < 0 || col >= output_dim_) {
    throw std::out_of_range("projection: entry index out of range");
  }
  for (auto k = row_start_[row]; k < row_start_[row + 1]; ++k) {
    if (cols_[k] == col) return signs_[k] * scale_;
  }
  return 0.0;
}

Eigen::VectorXd SparseProjection::Apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != input_dim_) throw DimensionError("projection", input_dim_, v.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(output_dim_);
  for (Eigen::Index i = 0; i < input_dim_; ++i) {
    const double x = v(i);
    if (x == 0.0) continue;
    for (auto k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      out(cols_[k]) += signs_[k] * x;
    }
  }
  out *= scale_;
  return out;
}

Eigen::MatrixXd SparseProjection::ApplyRows(
    const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  if (rows.cols() != input_dim_) throw DimensionError("projection", input_dim_, rows.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows.rows(), output_dim_);
  for (Eigen::Index i = 0; i < input_dim_; ++i) {
    for (auto k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      if (signs_[k] > 0) {
        out.col(cols_[k]) += rows.col(i);
      } else {
        out.col(cols_[k]) -= rows.col(i);
      }
    }
  }
  out *= scale_;
  return out;
}

}  // namespace repexp
