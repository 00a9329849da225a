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

#ifndef REPEXP_SELECTION_H_
#define REPEXP_SELECTION_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "repexp/pool.h"

namespace repexp {

struct SelectionResult {
  std::vector<Eigen::Index> indices;  // selection order, distinct
  std::vector<double> bonuses;        // bonus of each pick when it was chosen
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultSelectionLambda = 1.0;
inline constexpr Eigen::Index kDefaultSelectionDim = 512;

// Greedy elliptic coreset selection over the rows of `vectors` (n x d).
//
// The first pick is uniform under `seed`; each later pick is the unselected
// row h maximizing h^T Lambda h, where Lambda is the inverse of
// lambda * I + sum of the already selected rows' outer products. Ties go to
// the lowest index. The bonus recorded for the first pick is |h|^2 / lambda.
//
// Cost is O(n d + d^2) per step: the candidate bonuses are downdated with the
// same rank-one term that updates Lambda instead of being recomputed.
SelectionResult RepExpSelect(const Eigen::Ref<const Eigen::MatrixXd>& vectors,
                             Eigen::Index k, double lambda, std::uint64_t seed);
SelectionResult RepExpSelect(const PreprocessedPool& pool, Eigen::Index k,
                             double lambda, std::uint64_t seed);

// k distinct indices drawn uniformly without replacement; bonuses are 0.
SelectionResult RandomSelect(Eigen::Index n, Eigen::Index k, std::uint64_t seed);

}  // namespace repexp

#endif  // REPEXP_SELECTION_H_
