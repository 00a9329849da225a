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

#include "repexp/selection.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "repexp/linalg.h"
#include "repexp/rng.h"

namespace repexp {
namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void CheckK(Eigen::Index n, Eigen::Index k) {
  if (k < 1) throw std::invalid_argument("selection: k must be >= 1");
  if (k > n) {
    throw std::invalid_argument("selection: k = " + std::to_string(k) +
                                " exceeds pool size " + std::to_string(n));
  }
}

// Fixed left-to-right summation so equal rows always produce equal values.
double Dot(const double* a, const double* b, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

SelectionResult RepExpSelect(const Eigen::Ref<const Eigen::MatrixXd>& vectors,
                             Eigen::Index k, double lambda, std::uint64_t seed) {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index d = vectors.cols();
  CheckK(n, k);
  if (!vectors.allFinite()) throw std::invalid_argument("selection: non-finite vectors");

  InverseCovariance cov(d, lambda);
  const RowMatrixXd rows = vectors;

  SelectionResult result;
  result.seed = seed;
  result.indices.reserve(static_cast<std::size_t>(k));
  result.bonuses.reserve(static_cast<std::size_t>(k));

  std::vector<double> bonus(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* h = rows.row(i).data();
    bonus[i] = Dot(h, h, d) / lambda;
  }
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  Rng rng(MixSeed(seed, 0x72657078ULL));
  Eigen::Index pick = static_cast<Eigen::Index>(UniformIndex(rng, static_cast<std::uint64_t>(n)));
  Eigen::VectorXd u(d);
  for (Eigen::Index step = 0; step < k; ++step) {
    if (step > 0) {
      pick = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (pick < 0 || bonus[i] > best) {
          pick = i;
          best = bonus[i];
        }
      }
    }
    taken[pick] = true;
    result.indices.push_back(pick);
    result.bonuses.push_back(bonus[pick]);
    if (step + 1 == k) break;

    // Downdate every candidate's quadratic form by (h_i^T u)^2 / (1 + h^T u)
    // with u = Lambda h, then fold h into Lambda.
    const Eigen::VectorXd h = rows.row(pick).transpose();
    u.noalias() = cov.inverse() * h;
    const double denom = 1.0 + Dot(h.data(), u.data(), d);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double proj = Dot(rows.row(i).data(), u.data(), d);
      bonus[i] = std::max(0.0, bonus[i] - proj * proj / denom);
    }
    cov.Absorb(h);
  }
  return result;
}

SelectionResult RepExpSelect(const PreprocessedPool& pool, Eigen::Index k,
                             double lambda, std::uint64_t seed) {
  return RepExpSelect(pool.vectors, k, lambda, seed);
}

SelectionResult RandomSelect(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  CheckK(n, k);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(MixSeed(seed, 0x72616e64ULL));
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           UniformIndex(rng, static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  SelectionResult result;
  result.seed = seed;
  result.indices.assign(perm.begin(), perm.begin() + k);
  result.bonuses.assign(static_cast<std::size_t>(k), 0.0);
  return result;
}

}  // namespace repexp
