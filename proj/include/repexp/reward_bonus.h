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

#ifndef REPEXP_REWARD_BONUS_H_
#define REPEXP_REWARD_BONUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Core"

namespace repexp {

struct RewardBonusConfig {
  double beta = 0.01;
  double lambda = 1.0;
  Eigen::Index projection_dim = 32;
  // Rollouts per prompt in the reference training setup; informational.
  int group_size = 8;
};

// Reference settings for the RL reward path.
RewardBonusConfig DefaultRewardBonusConfig();
// Long-context preset: projection dim raised to 128.
RewardBonusConfig LongContextRewardBonusConfig();

// One prompt's rollout group for one optimization step.
struct RewardGroup {
  std::string prompt_id;
  Eigen::MatrixXd embeddings;     // k x D, raw
  std::vector<double> extrinsic;  // k values in {0, 1}
  double beta = 0.01;
  double lambda = 1.0;
  Eigen::Index projection_dim = 32;
  // Must change with every optimization step so each step sees a fresh
  // projection.
  std::uint64_t projection_seed = 0;
};

struct AugmentedRewards {
  std::vector<double> augmented;
  std::vector<double> bonuses;  // amount added to each extrinsic reward
};

// extrinsic_i + beta * leverage_i, with leverage scores taken on the
// projected, group-mean-centered embeddings. Groups with no correct rollout
// are returned unchanged.
AugmentedRewards AugmentGroup(const RewardGroup& group);

}  // namespace repexp

#endif  // REPEXP_REWARD_BONUS_H_
