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

#ifndef REPEXP_SYNTH_H_
#define REPEXP_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repexp/pool.h"
#include "repexp/report.h"

namespace repexp {

// Gaussian mixture with one planted correct cluster.
struct SynthConfig {
  int n_clusters = 8;
  int points_per_cluster = 100;
  // Expected distance between two cluster means, in units of within_std.
  double separation = 10.0;
  double within_std = 1.0;
  int correct_cluster = 0;
  // Fraction of the correct cluster's points labelled correct.
  double correct_fraction = 1.0;
  int dim = 64;
  std::uint64_t seed = 0;
};

struct SynthPool {
  EmbeddingPool pool;
  std::vector<int> labels;  // cluster of each row
};

// Rows are shuffled so cluster membership is not tied to index order.
// Throws std::invalid_argument for non-positive counts, an out-of-range
// correct cluster or fraction, or zero spread with coincident means.
SynthPool GeneratePool(const SynthConfig& config, std::string prompt_id = "synth");

enum class Method { kRepExp, kRandom };

struct ExperimentConfig {
  std::vector<Method> methods = {Method::kRepExp, Method::kRandom};
  Eigen::Index k_max = 0;  // 0 selects every response
  int trials = 5;
  double lambda = 1.0;
  Eigen::Index projection_dim = 32;
  std::uint64_t seed = 0;
  int threads = 1;
  ReportOptions report;
};

struct ExperimentResult {
  std::vector<QuestionOutcome> outcomes;  // same order as the input pools
  Report report;
};

// Projects and centers every pool, then records samples-to-correct for each
// method and trial. Trial t of pool p uses seed MixSeed(MixSeed(seed, p), t);
// the projection of pool p uses MixSeed(seed, p).
ExperimentResult RunExperiment(const std::vector<EmbeddingPool>& pools,
                               const ExperimentConfig& config);

// Everything a synthetic run needs, as read from a key = value file.
struct SynthRunConfig {
  SynthConfig synth;
  int n_pools = 1;
  ExperimentConfig experiment;
};

// Parses `key = value` lines; '#' starts a comment. Unknown keys and
// malformed values throw std::invalid_argument.
SynthRunConfig ParseSynthRunConfig(const std::string& text);
SynthRunConfig ReadSynthRunConfig(const std::filesystem::path& path);

std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);

}  // namespace repexp

#endif  // REPEXP_SYNTH_H_
