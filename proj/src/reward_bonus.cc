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

#include "repexp/reward_bonus.h"

#include <algorithm>
#include <stdexcept>

#include "repexp/linalg.h"
#include "repexp/pool.h"
#include "repexp/projection.h"

namespace repexp {

RewardBonusConfig DefaultRewardBonusConfig() { return RewardBonusConfig{}; }

RewardBonusConfig LongContextRewardBonusConfig() {
  RewardBonusConfig config;
  config.projection_dim = 128;
  return config;
}

AugmentedRewards AugmentGroup(const RewardGroup& group) {
  const Eigen::Index k = group.embeddings.rows();
  if (k == 0) throw std::invalid_argument("reward bonus: empty group");
  if (static_cast<Eigen::Index>(group.extrinsic.size()) != k) {
    throw DimensionError("reward bonus: extrinsic rewards", k,
                         static_cast<Eigen::Index>(group.extrinsic.size()));
  }
  if (!(group.beta >= 0.0)) throw std::invalid_argument("reward bonus: beta must be >= 0");
  if (!(group.lambda > 0.0)) throw std::invalid_argument("reward bonus: lambda must be > 0");
  if (!group.embeddings.allFinite()) {
    throw std::invalid_argument("reward bonus: non-finite embeddings");
  }

  AugmentedRewards out;
  out.augmented = group.extrinsic;
  out.bonuses.assign(static_cast<std::size_t>(k), 0.0);
  const bool any_correct = std::any_of(group.extrinsic.begin(), group.extrinsic.end(),
                                       [](double r) { return r > 0.0; });
  if (!any_correct) return out;

  const auto projection = SparseProjection::Make(
      group.embeddings.cols(), group.projection_dim, group.projection_seed);
  Eigen::MatrixXd projected = projection.ApplyRows(group.embeddings);
  CenterRows(projected);
  const Eigen::VectorXd leverage = LeverageScores(projected, group.lambda);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.bonuses[i] = group.beta * leverage(i);
    out.augmented[i] = group.extrinsic[i] + out.bonuses[i];
  }
  return out;
}

}  // namespace repexp
