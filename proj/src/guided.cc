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

#include "repexp/guided.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "repexp/rng.h"

namespace repexp {
namespace {

Eigen::MatrixXd Gaussian(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * normal(rng);
  }
  return m;
}

void CheckParams(const DecodingParams& params) {
  if (!(params.beta >= 0.0)) throw std::invalid_argument("decoding: beta must be >= 0");
  if (!(params.top_p > 0.0 && params.top_p <= 1.0)) {
    throw std::invalid_argument("decoding: top_p must be in (0, 1]");
  }
  if (params.top_k < 1) throw std::invalid_argument("decoding: top_k must be >= 1");
  if (!(params.temperature > 0.0)) {
    throw std::invalid_argument("decoding: temperature must be > 0");
  }
  if (params.max_len < 1) throw std::invalid_argument("decoding: max_len must be >= 1");
}

// Softmax of values / temperature.
std::vector<double> Softmax(const std::vector<double>& values, double temperature) {
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> p(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp((values[i] - top) / temperature);
    total += p[i];
  }
  for (auto& x : p) x /= total;
  return p;
}

std::size_t SampleIndex(const std::vector<double>& probs, Rng& rng) {
  const double u = Uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

constexpr std::uint64_t kDecodeStream = 0x6465636fULL;

Generation Decode(const ToyModel& model, const GuidedState* guided,
                  const std::vector<int>& prompt, const DecodingParams& params,
                  std::uint64_t seed) {
  CheckParams(params);
  if (guided && guided->dim() != model.hidden_dim()) {
    throw DimensionError("guided decoding: state", model.hidden_dim(), guided->dim());
  }
  Rng rng(MixSeed(seed, kDecodeStream));
  Generation gen;
  gen.token_reps.resize(params.max_len, model.hidden_dim());
  Eigen::VectorXd state = model.Encode(prompt);
  for (int t = 0; t < params.max_len; ++t) {
    StepDistribution step = ComputeStep(model, state, guided, params);
    const std::size_t choice = SampleIndex(step.probs, rng);
    gen.tokens.push_back(step.tokens[choice]);
    if (guided) gen.chosen_bonuses.push_back(step.bonuses[choice]);
    state = std::move(step.states[choice]);
    gen.token_reps.row(t) = state.transpose();
  }
  return gen;
}

}  // namespace

ToyModel::ToyModel(const ToyModelConfig& config) : config_(config) {
  if (config.vocab_size < 1 || config.hidden_dim < 1) {
    throw std::invalid_argument("toy model: vocab and hidden dims must be >= 1");
  }
  Rng rng(MixSeed(config.seed, 0x746f79ULL));
  const Eigen::Index d = config.hidden_dim;
  const Eigen::Index v = config.vocab_size;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  recurrent_ = Gaussian(d, d, config.recurrent_gain * inv_sqrt_d, rng);
  embedding_ = Gaussian(d, v, config.embedding_gain, rng);
  unembed_ = Gaussian(v, d, config.logit_gain * inv_sqrt_d, rng);
  bias_ = Gaussian(v, 1, 0.5, rng);
}

Eigen::VectorXd ToyModel::InitialState() const {
  return Eigen::VectorXd::Zero(config_.hidden_dim);
}

Eigen::VectorXd ToyModel::Step(const Eigen::VectorXd& state, int token) const {
  if (token < 0 || token >= config_.vocab_size) {
    throw std::out_of_range("toy model: token id out of range");
  }
  return (recurrent_ * state + embedding_.col(token)).array().tanh().matrix();
}

Eigen::VectorXd ToyModel::Logits(const Eigen::VectorXd& state) const {
  return unembed_ * state + bias_;
}

Eigen::VectorXd ToyModel::Encode(const std::vector<int>& prompt) const {
  Eigen::VectorXd state = InitialState();
  for (int token : prompt) state = Step(state, token);
  return state;
}

std::vector<int> FilterTopKTopP(const Eigen::VectorXd& logits, int top_k,
                                double top_p, double temperature) {
  const int v = static_cast<int>(logits.size());
  if (v == 0) throw std::invalid_argument("filter: empty logits");
  std::vector<int> order(static_cast<std::size_t>(v));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return logits(a) > logits(b); });
  order.resize(static_cast<std::size_t>(std::min(top_k, v)));

  std::vector<double> kept(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) kept[i] = logits(order[i]);
  const auto probs = Softmax(kept, temperature);
  double cumulative = 0.0;
  std::size_t keep = 0;
  while (keep < order.size()) {
    cumulative += probs[keep];
    ++keep;
    if (cumulative >= top_p) break;
  }
  order.resize(keep);
  return order;
}

GuidedState::GuidedState(Eigen::Index dim, double lambda) : covariance_(dim, lambda) {
  Refresh();
}

void GuidedState::Refresh() {
  mean_ = covariance_.mean();
  if (covariance_.count() == 0) {
    centered_inverse_ = covariance_.inverse();
  } else {
    centered_inverse_ = covariance_.MeanCenteredInverse();
  }
}

double GuidedState::TokenBonus(const Eigen::Ref<const Eigen::VectorXd>& rep) const {
  if (rep.size() != dim()) throw DimensionError("token bonus", dim(), rep.size());
  const Eigen::VectorXd centered = rep - mean_;
  return std::sqrt(std::max(0.0, centered.dot(centered_inverse_ * centered)));
}

void GuidedState::AbsorbGeneration(const Eigen::Ref<const Eigen::MatrixXd>& token_reps) {
  if (token_reps.rows() < 1) throw std::invalid_argument("absorb: generation has no tokens");
  if (token_reps.cols() != dim()) throw DimensionError("absorb", dim(), token_reps.cols());
  covariance_.AbsorbRows(token_reps);
  token_counts_.push_back(token_reps.rows());
  Refresh();
}

StepDistribution ComputeStep(const ToyModel& model, const Eigen::VectorXd& state,
                             const GuidedState* guided, const DecodingParams& params) {
  const Eigen::VectorXd logits = model.Logits(state);
  StepDistribution step;
  step.tokens = FilterTopKTopP(logits, params.top_k, params.top_p, params.temperature);
  std::vector<double> perturbed;
  perturbed.reserve(step.tokens.size());
  for (int token : step.tokens) {
    step.logits.push_back(logits(token));
    step.states.push_back(model.Step(state, token));
    if (guided) {
      const double b = guided->TokenBonus(step.states.back());
      step.bonuses.push_back(b);
      perturbed.push_back(logits(token) + params.beta * b);
    } else {
      perturbed.push_back(logits(token));
    }
  }
  step.probs = Softmax(perturbed, params.temperature);
  return step;
}

Generation GuidedGenerate(const ToyModel& model, const GuidedState& state,
                          const std::vector<int>& prompt, const DecodingParams& params,
                          std::uint64_t seed) {
  return Decode(model, &state, prompt, params, seed);
}

Generation VanillaGenerate(const ToyModel& model, const std::vector<int>& prompt,
                           const DecodingParams& params, std::uint64_t seed) {
  return Decode(model, nullptr, prompt, params, seed);
}

std::vector<Generation> GuidedBatch(const ToyModel& model, const std::vector<int>& prompt,
                                    const DecodingParams& params, double lambda,
                                    int count, std::uint64_t seed) {
  GuidedState state(model.hidden_dim(), lambda);
  std::vector<Generation> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    out.push_back(GuidedGenerate(model, state, prompt, params,
                                 MixSeed(seed, static_cast<std::uint64_t>(i))));
    state.AbsorbGeneration(out.back().token_reps);
  }
  return out;
}

DiversityStats Diversity(const std::vector<Generation>& generations) {
  DiversityStats stats;
  std::set<std::vector<int>> distinct;
  std::vector<Eigen::VectorXd> pooled;
  for (const auto& g : generations) {
    distinct.insert(g.tokens);
    pooled.push_back(g.token_reps.colwise().mean().transpose());
  }
  stats.distinct_sequences = static_cast<int>(distinct.size());
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      total += (pooled[i] - pooled[j]).norm();
      ++pairs;
    }
  }
  stats.mean_pairwise_distance = pairs ? total / static_cast<double>(pairs) : 0.0;
  return stats;
}

}  // namespace repexp
