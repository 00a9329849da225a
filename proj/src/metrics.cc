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

#include "repexp/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "repexp/rng.h"

namespace repexp {
namespace {

constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;

// C(n, k) if it does not exceed 2^53.
std::optional<std::uint64_t> SmallBinomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 value = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    // value * (n - k + i) / i stays integral at every step.
    value = value * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned>(i);
    if (value > kExactLimit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(value);
}

}  // namespace

double PassAtK(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n < 0 || c < 0 || c > n) {
    throw std::invalid_argument("pass@k: need 0 <= c <= n");
  }
  if (k < 1 || k > n) {
    throw std::invalid_argument("pass@k: need 1 <= k <= n, got k = " + std::to_string(k) +
                                ", n = " + std::to_string(n));
  }
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  const auto total = SmallBinomial(n, k);
  const auto miss = SmallBinomial(n - c, k);
  if (total && miss) {
    return static_cast<double>(*total - *miss) / static_cast<double>(*total);
  }
  double miss_ratio = 1.0;
  for (std::int64_t i = 0; i < k; ++i) {
    miss_ratio *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - miss_ratio;
}

PassAtKCurve DatasetPassAtK(std::span<const QuestionCounts> questions,
                            std::span<const std::int64_t> ks) {
  if (questions.empty()) throw std::invalid_argument("pass@k: no questions");
  PassAtKCurve curve;
  curve.ks.assign(ks.begin(), ks.end());
  for (auto k : ks) {
    double total = 0.0;
    for (const auto& q : questions) total += PassAtK(q.n, q.c, k);
    curve.values.push_back(total / static_cast<double>(questions.size()));
  }
  return curve;
}

SamplesToCorrect SamplesToCorrectRandom(std::int64_t n, std::int64_t c) {
  if (n <= 0) throw std::invalid_argument("samples-to-correct: empty pool");
  if (c < 0 || c > n) throw std::invalid_argument("samples-to-correct: need 0 <= c <= n");
  return {static_cast<double>(n + 1) / static_cast<double>(c + 1), c == 0};
}

SamplesToCorrect SamplesToCorrectOrdered(std::span<const Eigen::Index> order,
                                         std::span<const std::uint8_t> rewards) {
  if (order.empty()) throw std::invalid_argument("samples-to-correct: empty order");
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto idx = order[pos];
    if (idx < 0 || static_cast<std::size_t>(idx) >= rewards.size()) {
      throw std::out_of_range("samples-to-correct: index " + std::to_string(idx) +
                              " outside reward vector");
    }
    if (rewards[static_cast<std::size_t>(idx)] == 1) {
      return {static_cast<double>(pos + 1), false};
    }
  }
  return {static_cast<double>(order.size() + 1), true};
}

std::vector<std::vector<std::size_t>> HardnessBins(std::span<const double> hardness,
                                                   std::size_t n_bins) {
  if (n_bins == 0) throw std::invalid_argument("hardness bins: need at least one bin");
  if (hardness.size() < n_bins) {
    throw std::invalid_argument("hardness bins: " + std::to_string(hardness.size()) +
                                " questions for " + std::to_string(n_bins) + " bins");
  }
  std::vector<std::size_t> order(hardness.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return hardness[a] < hardness[b]; });
  const std::size_t q = hardness.size();
  std::vector<std::vector<std::size_t>> bins(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].assign(order.begin() + static_cast<std::ptrdiff_t>(b * q / n_bins),
                   order.begin() + static_cast<std::ptrdiff_t>((b + 1) * q / n_bins));
  }
  return bins;
}

double RelativeImprovement(double baseline, double value) {
  if (baseline == 0.0) throw std::invalid_argument("relative improvement: zero baseline");
  return (baseline - value) / baseline;
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double StdDev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Interval BootstrapMeanCI(std::span<const double> values, int resamples, double level,
                         std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("bootstrap: no values");
  if (resamples < 1 || !(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("bootstrap: bad resample count or level");
  }
  Rng rng(MixSeed(seed, 0x626f6f74ULL));
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      total += values[UniformIndex(rng, values.size())];
    }
    m = total / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, means.size() - 1)];
  };
  return {at(tail), at(1.0 - tail)};
}

}  // namespace repexp
