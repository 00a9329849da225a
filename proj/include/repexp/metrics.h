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

#ifndef REPEXP_METRICS_H_
#define REPEXP_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"

namespace repexp {

// Unbiased pass@k estimate 1 - C(n-c, k) / C(n, k) for one question with n
// samples of which c are correct. When both binomials are below 2^53 the
// value is computed from exact integers with a single rounding; otherwise
// from the running product of (n-c-i)/(n-i), which does not overflow.
double PassAtK(std::int64_t n, std::int64_t c, std::int64_t k);

struct PassAtKCurve {
  std::vector<std::int64_t> ks;
  std::vector<double> values;  // dataset mean per k
};

struct QuestionCounts {
  std::int64_t n = 0;
  std::int64_t c = 0;
};

// Arithmetic mean of PassAtK over questions, for each k.
PassAtKCurve DatasetPassAtK(std::span<const QuestionCounts> questions,
                            std::span<const std::int64_t> ks);

struct SamplesToCorrect {
  double value = 0.0;
  bool censored = false;  // no correct sample available
};

// Expected 1-based draw index of the first correct sample when drawing
// uniformly without replacement: (n + 1) / (c + 1). c = 0 yields n + 1,
// flagged censored.
SamplesToCorrect SamplesToCorrectRandom(std::int64_t n, std::int64_t c);

// 1-based position in `order` of the first index whose reward is 1. When no
// such index exists the result is order.size() + 1, flagged censored.
SamplesToCorrect SamplesToCorrectOrdered(std::span<const Eigen::Index> order,
                                         std::span<const std::uint8_t> rewards);

// Sorts questions by ascending hardness (stable, so ties keep input order)
// and splits them into n_bins contiguous bins whose sizes differ by at most
// one. Returns question indices per bin.
std::vector<std::vector<std::size_t>> HardnessBins(std::span<const double> hardness,
                                                   std::size_t n_bins = 10);

// Fractional reduction (baseline - value) / baseline.
double RelativeImprovement(double baseline, double value);

double Mean(std::span<const double> values);
// Sample standard deviation; 0 for fewer than two values.
double StdDev(std::span<const double> values);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap interval for the mean.
Interval BootstrapMeanCI(std::span<const double> values, int resamples, double level,
                         std::uint64_t seed);

}  // namespace repexp

#endif  // REPEXP_METRICS_H_
