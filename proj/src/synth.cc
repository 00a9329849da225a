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

#include "repexp/synth.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "repexp/io_error.h"
#include "repexp/metrics.h"
#include "repexp/parallel.h"
#include "repexp/projection.h"
#include "repexp/rng.h"
#include "repexp/selection.h"

namespace repexp {

SynthPool GeneratePool(const SynthConfig& config, std::string prompt_id) {
  if (config.n_clusters < 1 || config.points_per_cluster < 1 || config.dim < 1) {
    throw std::invalid_argument("synth: cluster count, cluster size and dim must be positive");
  }
  if (config.correct_cluster < 0 || config.correct_cluster >= config.n_clusters) {
    throw std::invalid_argument("synth: correct_cluster out of range");
  }
  if (!(config.correct_fraction >= 0.0 && config.correct_fraction <= 1.0)) {
    throw std::invalid_argument("synth: correct_fraction must be in [0, 1]");
  }
  if (!(config.separation >= 0.0) || !std::isfinite(config.separation)) {
    throw std::invalid_argument("synth: separation must be finite and >= 0");
  }
  if (!(config.within_std > 0.0) || !std::isfinite(config.within_std)) {
    throw std::invalid_argument(
        "synth: degenerate config, within_std must be > 0 (zero spread collapses every "
        "cluster onto one point)");
  }

  Rng rng(MixSeed(config.seed, 0x73796e74ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = config.dim;
  // Means ~ N(0, tau^2 I) give E|m_a - m_b| ~= tau * sqrt(2 d).
  const double tau = config.separation * config.within_std / std::sqrt(2.0 * d);
  Eigen::MatrixXd means(config.n_clusters, d);
  for (int c = 0; c < config.n_clusters; ++c) {
    for (int j = 0; j < d; ++j) means(c, j) = tau * normal(rng);
  }

  const int n = config.n_clusters * config.points_per_cluster;
  const int n_correct =
      static_cast<int>(std::lround(config.correct_fraction * config.points_per_cluster));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(UniformIndex(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }

  SynthPool out;
  out.pool.prompt_id = std::move(prompt_id);
  out.pool.pooling_mode = PoolingMode::kMean;
  out.pool.embeddings.resize(n, d);
  out.pool.rewards.emplace(static_cast<std::size_t>(n), 0);
  out.labels.resize(static_cast<std::size_t>(n));
  // Generation index g = cluster * points_per_cluster + member lands on row
  // order[g].
  for (int g = 0; g < n; ++g) {
    const int cluster = g / config.points_per_cluster;
    const int member = g % config.points_per_cluster;
    const int row = order[g];
    for (int j = 0; j < d; ++j) {
      out.pool.embeddings(row, j) =
          static_cast<float>(means(cluster, j) + config.within_std * normal(rng));
    }
    out.labels[row] = cluster;
    if (cluster == config.correct_cluster && member < n_correct) (*out.pool.rewards)[row] = 1;
  }
  return out;
}

std::string_view MethodName(Method method) {
  return method == Method::kRepExp ? "repexp" : "random";
}

Method ParseMethod(std::string_view name) {
  if (name == "repexp") return Method::kRepExp;
  if (name == "random") return Method::kRandom;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

ExperimentResult RunExperiment(const std::vector<EmbeddingPool>& pools,
                               const ExperimentConfig& config) {
  if (pools.empty()) throw std::invalid_argument("experiment: no pools");
  if (config.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  for (const auto& pool : pools) {
    if (!pool.rewards) {
      throw std::invalid_argument("experiment: pool '" + pool.prompt_id + "' has no rewards");
    }
    if (config.k_max > pool.n()) {
      throw std::invalid_argument("experiment: k_max " + std::to_string(config.k_max) +
                                  " exceeds size of pool '" + pool.prompt_id + "'");
    }
  }

  ExperimentResult result;
  result.outcomes.resize(pools.size());
  ParallelFor(pools.size(), config.threads, [&](std::size_t p) {
    const auto& pool = pools[p];
    const std::uint64_t pool_seed = MixSeed(config.seed, p);
    const Eigen::Index k = config.k_max > 0 ? config.k_max : pool.n();
    QuestionOutcome& outcome = result.outcomes[p];
    outcome.prompt_id = pool.prompt_id;
    outcome.n = pool.n();
    outcome.c = pool.num_correct();

    std::optional<PreprocessedPool> prepared;
    for (Method method : config.methods) {
      if (method == Method::kRepExp && !prepared) {
        const auto dim = std::min<Eigen::Index>(config.projection_dim, pool.dim());
        prepared = Preprocess(pool, SparseProjection::Make(pool.dim(), dim, pool_seed));
      }
      for (int t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = MixSeed(pool_seed, static_cast<std::uint64_t>(t));
        const SelectionResult sel = method == Method::kRepExp
                                        ? RepExpSelect(*prepared, k, config.lambda, trial_seed)
                                        : RandomSelect(pool.n(), k, trial_seed);
        QuestionOutcome::Trial trial{SamplesToCorrectOrdered(sel.indices, *pool.rewards), k};
        (method == Method::kRepExp ? outcome.repexp : outcome.random).push_back(trial);
      }
    }
  });
  result.report = BuildReport(result.outcomes, config.report);
  return result;
}

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" + value + "'");
  }
  return out;
}

}  // namespace

SynthRunConfig ParseSynthRunConfig(const std::string& text) {
  SynthRunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    auto& s = cfg.synth;
    auto& e = cfg.experiment;
    if (key == "n_clusters") {
      s.n_clusters = ParseNumber<int>(key, value);
    } else if (key == "points_per_cluster") {
      s.points_per_cluster = ParseNumber<int>(key, value);
    } else if (key == "separation") {
      s.separation = ParseNumber<double>(key, value);
    } else if (key == "within_std") {
      s.within_std = ParseNumber<double>(key, value);
    } else if (key == "correct_cluster") {
      s.correct_cluster = ParseNumber<int>(key, value);
    } else if (key == "correct_fraction") {
      s.correct_fraction = ParseNumber<double>(key, value);
    } else if (key == "dim") {
      s.dim = ParseNumber<int>(key, value);
    } else if (key == "seed") {
      s.seed = ParseNumber<std::uint64_t>(key, value);
      e.seed = s.seed;
    } else if (key == "n_pools") {
      cfg.n_pools = ParseNumber<int>(key, value);
    } else if (key == "trials") {
      e.trials = ParseNumber<int>(key, value);
    } else if (key == "k_max") {
      e.k_max = ParseNumber<Eigen::Index>(key, value);
    } else if (key == "lambda") {
      e.lambda = ParseNumber<double>(key, value);
    } else if (key == "projection_dim") {
      e.projection_dim = ParseNumber<Eigen::Index>(key, value);
    } else if (key == "methods") {
      e.methods.clear();
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) e.methods.push_back(ParseMethod(Trim(part)));
      if (e.methods.empty()) throw std::invalid_argument("config: empty methods list");
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (cfg.n_pools < 1) throw std::invalid_argument("config: n_pools must be >= 1");
  if (cfg.experiment.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(cfg.experiment.lambda > 0.0)) throw std::invalid_argument("config: lambda must be > 0");
  if (cfg.experiment.projection_dim < 1) {
    throw std::invalid_argument("config: projection_dim must be >= 1");
  }
  if (cfg.experiment.k_max < 0) throw std::invalid_argument("config: k_max must be >= 0");
  return cfg;
}

SynthRunConfig ReadSynthRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSynthRunConfig(text.str());
}

}  // namespace repexp
