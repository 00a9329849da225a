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

#ifndef REPEXP_GUIDED_H_
#define REPEXP_GUIDED_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "repexp/linalg.h"

namespace repexp {

struct ToyModelConfig {
  int vocab_size = 64;
  int hidden_dim = 16;
  std::uint64_t seed = 1;
  double recurrent_gain = 0.9;
  double embedding_gain = 1.0;
  double logit_gain = 3.0;
};

// Small deterministic recurrent language model:
//
//   h_t = tanh(W h_{t-1} + E[:, y_t]),   z_t = U h_t + b.
//
// All parameters are drawn from the config seed. Hidden states lie in
// (-1, 1)^d.
class ToyModel {
 public:
  explicit ToyModel(const ToyModelConfig& config);

  int vocab_size() const { return config_.vocab_size; }
  int hidden_dim() const { return config_.hidden_dim; }
  const ToyModelConfig& config() const { return config_; }

  Eigen::VectorXd InitialState() const;
  // State after appending `token` to the sequence whose state is `state`.
  Eigen::VectorXd Step(const Eigen::VectorXd& state, int token) const;
  Eigen::VectorXd Logits(const Eigen::VectorXd& state) const;
  // State after consuming every prompt token.
  Eigen::VectorXd Encode(const std::vector<int>& prompt) const;

 private:
  ToyModelConfig config_;
  Eigen::MatrixXd recurrent_;  // d x d
  Eigen::MatrixXd embedding_;  // d x V
  Eigen::MatrixXd unembed_;    // V x d
  Eigen::VectorXd bias_;       // V
};

struct DecodingParams {
  double beta = 0.0;
  double top_p = 0.95;
  int top_k = 128;
  double temperature = 1.0;
  int max_len = 16;
};

inline constexpr double kDefaultGuidedLambda = 0.1;

// Tokens surviving top-k then top-p filtering, ordered by descending logit
// (lower token id first on ties). The nucleus is computed on
// softmax(logits / temperature) over the top-k survivors; at least one token
// always survives.
std::vector<int> FilterTopKTopP(const Eigen::VectorXd& logits, int top_k,
                                double top_p, double temperature);

// Covariance state shared by the generations of one prompt: the
// non-centered inverse, the running mean of every absorbed token
// representation, and per-generation token counts.
class GuidedState {
 public:
  GuidedState(Eigen::Index dim, double lambda);

  const InverseCovariance& covariance() const { return covariance_; }
  std::int64_t total_tokens() const { return covariance_.count(); }
  int generations() const { return static_cast<int>(token_counts_.size()); }
  const std::vector<std::int64_t>& token_counts() const { return token_counts_; }
  Eigen::Index dim() const { return covariance_.dim(); }

  // Current mean (zero before any data) and mean-centered inverse
  // (lambda^{-1} I before any data).
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& centered_inverse() const { return centered_inverse_; }

  // sqrt((h - mu)^T Sigma^{-1} (h - mu)) with the mean-centered inverse.
  double TokenBonus(const Eigen::Ref<const Eigen::VectorXd>& rep) const;

  // Folds one finished generation's token representations (T x d, T >= 1)
  // into the state with T rank-one updates.
  void AbsorbGeneration(const Eigen::Ref<const Eigen::MatrixXd>& token_reps);

 private:
  void Refresh();

  InverseCovariance covariance_;
  std::vector<std::int64_t> token_counts_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd centered_inverse_;
};

// Per-step candidate distribution; exposed for inspection and tests.
struct StepDistribution {
  std::vector<int> tokens;       // surviving candidates
  std::vector<double> logits;    // unperturbed logits
  std::vector<double> bonuses;   // token-level bonuses (empty for vanilla)
  std::vector<double> probs;     // sampling probabilities
  std::vector<Eigen::VectorXd> states;  // candidate hidden states
};

// Builds the step distribution from `state` (the hidden state of the current
// prefix). With `guided` null no bonus is computed.
StepDistribution ComputeStep(const ToyModel& model, const Eigen::VectorXd& state,
                             const GuidedState* guided, const DecodingParams& params);

struct Generation {
  std::vector<int> tokens;
  std::vector<double> chosen_bonuses;  // empty for vanilla decoding
  Eigen::MatrixXd token_reps;          // T x d hidden states along the output
};

// Bonus-guided decoding; the state is read but not modified, so the sequence
// being generated never contributes to its own bonuses.
Generation GuidedGenerate(const ToyModel& model, const GuidedState& state,
                          const std::vector<int>& prompt, const DecodingParams& params,
                          std::uint64_t seed);

// Plain top-k/top-p sampling with the same random stream as GuidedGenerate.
Generation VanillaGenerate(const ToyModel& model, const std::vector<int>& prompt,
                           const DecodingParams& params, std::uint64_t seed);

// Runs `count` guided generations for one prompt, absorbing each one before
// the next starts. Generation i uses seed MixSeed(seed, i).
std::vector<Generation> GuidedBatch(const ToyModel& model, const std::vector<int>& prompt,
                                    const DecodingParams& params, double lambda,
                                    int count, std::uint64_t seed);

struct DiversityStats {
  double mean_pairwise_distance = 0.0;  // between mean-pooled generation reps
  int distinct_sequences = 0;
};

DiversityStats Diversity(const std::vector<Generation>& generations);

}  // namespace repexp

#endif  // REPEXP_GUIDED_H_
