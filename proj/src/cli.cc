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

#include "repexp/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "repexp/guided.h"
#include "repexp/io_error.h"
#include "repexp/linalg.h"
#include "repexp/metrics.h"
#include "repexp/parallel.h"
#include "repexp/pool.h"
#include "repexp/projection.h"
#include "repexp/report.h"
#include "repexp/reward_bonus.h"
#include "repexp/rng.h"
#include "repexp/selection.h"
#include "repexp/synth.h"

namespace repexp {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t HashId(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Files are staged under <out>/.staging and moved into <out> on Commit, next
// to a manifest.json index. An abandoned run leaves no partial outputs.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    if (fs::exists(root_, ec)) {
      if (!fs::is_directory(root_, ec)) {
        throw ValidationError("--out " + root_.string() + " exists and is not a directory");
      }
      if (!fs::is_empty(root_, ec)) {
        throw ValidationError("--out " + root_.string() + " is not empty");
      }
    } else {
      fs::create_directories(root_, ec);
      if (ec) throw IoError("cannot create " + root_.string() + ": " + ec.message());
      created_ = true;
    }
    fs::create_directory(staging(), ec);
    if (ec) throw IoError("cannot create " + staging().string() + ": " + ec.message());
  }

  ~OutputDir() {
    if (committed_) return;
    std::error_code ec;
    fs::remove_all(staging(), ec);
    if (created_) fs::remove(root_, ec);
  }

  fs::path staging() const { return root_ / ".staging"; }

  // Path for a new output file, relative to the output root.
  fs::path File(const std::string& relative) {
    files_.push_back(relative);
    const fs::path p = staging() / relative;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }

  void WriteText(const std::string& relative, const std::string& body) {
    std::ofstream out(File(relative), std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw IoError("write failed for " + relative);
  }

  void Commit(const std::string& command, const ordered_json& parameters) {
    std::sort(files_.begin(), files_.end());
    ordered_json index;
    index["command"] = command;
    index["parameters"] = parameters;
    ordered_json list = ordered_json::array();
    for (const auto& f : files_) {
      ordered_json entry;
      entry["path"] = f;
      entry["bytes"] = fs::file_size(staging() / f);
      list.push_back(entry);
    }
    index["files"] = list;
    WriteText("manifest.json", index.dump(2) + "\n");
    for (const auto& entry : fs::directory_iterator(staging())) {
      fs::rename(entry.path(), root_ / entry.path().filename());
    }
    fs::remove(staging());
    committed_ = true;
  }

 private:
  fs::path root_;
  bool created_ = false;
  bool committed_ = false;
  std::vector<std::string> files_;
};

int ResolveThreads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("REPEXP_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("REPEXP_THREADS must be a positive integer");
  }
  return 1;
}

std::vector<ManifestRecord> LoadManifest(const fs::path& path) {
  try {
    return ReadManifest(path);
  } catch (const PoolError& e) {
    if (e.code() == PoolError::Code::kIo) throw;
    throw ValidationError(e.what());
  }
}

void CheckUniqueIds(const std::vector<ManifestRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.prompt_id);
  std::sort(ids.begin(), ids.end());
  if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end()) {
    throw ValidationError("duplicate prompt_id '" + *it + "' in manifest");
  }
}

ordered_json ToJson(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// ---------------------------------------------------------------- select

struct SelectFlags {
  std::string manifest;
  std::string method = "repexp";
  Eigen::Index k = 0;
  double lambda = kDefaultSelectionLambda;
  Eigen::Index dim = kDefaultSelectionDim;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  int trials = 5;
  int threads = 0;
  std::string out;
};

struct PromptSelections {
  std::string prompt_id;
  std::int64_t n = 0;
  std::optional<std::int64_t> c;
  std::vector<SelectionResult> trials;
  std::vector<SamplesToCorrect> stc;
};

int RunSelect(const SelectFlags& f) {
  const Method method = ParseMethod(f.method);
  const fs::path manifest_path(f.manifest);
  auto records = LoadManifest(manifest_path);
  CheckUniqueIds(records);
  for (const auto& r : records) {
    const Eigen::Index k = f.k > 0 ? f.k : r.n;
    if (k < 1 || k > r.n) {
      throw ValidationError("--k " + std::to_string(k) + " invalid for pool '" + r.prompt_id +
                            "' of size " + std::to_string(r.n));
    }
    if (method == Method::kRepExp && f.dim > r.dim) {
      throw ValidationError("--dim " + std::to_string(f.dim) + " exceeds embedding dim " +
                            std::to_string(r.dim) + " of pool '" + r.prompt_id + "'");
    }
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.prompt_id < b.prompt_id; });
  OutputDir out(f.out);
  const fs::path base = manifest_path.parent_path();

  std::vector<PromptSelections> results(records.size());
  ParallelFor(records.size(), ResolveThreads(f.threads), [&](std::size_t i) {
    const auto& rec = records[i];
    const EmbeddingPool pool = ReadPool(rec, base / rec.file);
    const std::uint64_t prompt_seed = MixSeed(f.seed, HashId(rec.prompt_id));
    const Eigen::Index k = f.k > 0 ? f.k : pool.n();
    auto& res = results[i];
    res.prompt_id = rec.prompt_id;
    res.n = pool.n();
    if (pool.rewards) res.c = pool.num_correct();
    std::optional<PreprocessedPool> prepared;
    if (method == Method::kRepExp) {
      const double s = f.sparsity > 0 ? f.sparsity : SparseProjection::DefaultSparsity(pool.dim());
      prepared = Preprocess(pool, SparseProjection::Make(pool.dim(), f.dim, s, prompt_seed));
    }
    for (int t = 0; t < f.trials; ++t) {
      const std::uint64_t seed = MixSeed(prompt_seed, static_cast<std::uint64_t>(t));
      res.trials.push_back(method == Method::kRepExp ? RepExpSelect(*prepared, k, f.lambda, seed)
                                                     : RandomSelect(pool.n(), k, seed));
      if (pool.rewards) {
        res.stc.push_back(SamplesToCorrectOrdered(res.trials.back().indices, *pool.rewards));
      }
    }
  });

  std::ostringstream lines;
  std::vector<QuestionOutcome> outcomes;
  bool all_rewarded = true;
  for (const auto& res : results) {
    QuestionOutcome outcome;
    outcome.prompt_id = res.prompt_id;
    outcome.n = res.n;
    outcome.c = res.c.value_or(0);
    for (std::size_t t = 0; t < res.trials.size(); ++t) {
      const auto& sel = res.trials[t];
      ordered_json j;
      j["prompt_id"] = res.prompt_id;
      j["method"] = f.method;
      j["trial"] = t;
      j["seed"] = sel.seed;
      j["n"] = res.n;
      j["c"] = res.c ? ordered_json(*res.c) : ordered_json(nullptr);
      j["indices"] = sel.indices;
      j["bonuses"] = ToJson(sel.bonuses);
      if (res.c) {
        j["stc"] = res.stc[t].value;
        j["censored"] = res.stc[t].censored;
        QuestionOutcome::Trial trial{res.stc[t], static_cast<std::int64_t>(sel.indices.size())};
        (method == Method::kRepExp ? outcome.repexp : outcome.random).push_back(trial);
      } else {
        j["stc"] = nullptr;
        j["censored"] = nullptr;
      }
      lines << j.dump() << '\n';
    }
    if (!res.c) all_rewarded = false;
    outcomes.push_back(std::move(outcome));
  }
  out.WriteText("selections.jsonl", lines.str());
  if (all_rewarded && !outcomes.empty()) {
    ReportOptions opts;
    opts.bootstrap_seed = f.seed;
    const Report report = BuildReport(outcomes, opts);
    out.WriteText("per_question.csv", QuestionCsv(report));
    out.WriteText("pass_at_k.csv", PassAtKCsv(report));
    out.WriteText("bins.csv", BinCsv(report));
    out.WriteText("summary.json", SummaryJson(report));
  }

  ordered_json params;
  params["manifest"] = f.manifest;
  params["method"] = f.method;
  params["k"] = f.k > 0 ? ordered_json(f.k) : ordered_json("all");
  params["lambda"] = f.lambda;
  params["dim"] = f.dim;
  params["sparsity"] = f.sparsity > 0 ? ordered_json(f.sparsity) : ordered_json("sqrt(D)");
  params["seed"] = f.seed;
  params["trials"] = f.trials;
  out.Commit("select", params);
  return kExitOk;
}

// ----------------------------------------------------------------- bonus

struct BonusFlags {
  std::string manifest;
  double beta = 0.01;
  double lambda = 1.0;
  Eigen::Index dim = 32;
  bool long_context = false;
  std::uint64_t step_seed = 0;
  std::string out;
};

int RunBonus(BonusFlags f, bool dim_given) {
  if (f.long_context && !dim_given) f.dim = LongContextRewardBonusConfig().projection_dim;
  const fs::path manifest_path(f.manifest);
  const auto records = LoadManifest(manifest_path);
  CheckUniqueIds(records);
  for (const auto& r : records) {
    if (!r.has_rewards) {
      throw ValidationError("group '" + r.prompt_id + "' has no extrinsic rewards");
    }
    if (r.n < 1) throw ValidationError("group '" + r.prompt_id + "' is empty");
    if (f.dim > r.dim) {
      throw ValidationError("--dim " + std::to_string(f.dim) + " exceeds embedding dim " +
                            std::to_string(r.dim) + " of group '" + r.prompt_id + "'");
    }
  }
  OutputDir out(f.out);
  const fs::path base = manifest_path.parent_path();
  std::ofstream lines(out.File("augmented.jsonl"), std::ios::binary | std::ios::trunc);
  // One group in memory at a time, emitted in manifest order.
  for (const auto& rec : records) {
    const EmbeddingPool pool = ReadPool(rec, base / rec.file);
    RewardGroup group;
    group.prompt_id = pool.prompt_id;
    group.embeddings = pool.embeddings.cast<double>();
    group.extrinsic.assign(pool.rewards->begin(), pool.rewards->end());
    group.beta = f.beta;
    group.lambda = f.lambda;
    group.projection_dim = f.dim;
    group.projection_seed = f.step_seed;
    const auto rewards = AugmentGroup(group);
    ordered_json j;
    j["prompt_id"] = group.prompt_id;
    j["augmented"] = ToJson(rewards.augmented);
    j["bonuses"] = ToJson(rewards.bonuses);
    lines << j.dump() << '\n';
  }
  lines.close();
  if (!lines) throw IoError("write failed for augmented.jsonl");

  ordered_json params;
  params["manifest"] = f.manifest;
  params["beta"] = f.beta;
  params["lambda"] = f.lambda;
  params["dim"] = f.dim;
  params["long_context"] = f.long_context;
  params["step_seed"] = f.step_seed;
  out.Commit("bonus", params);
  return kExitOk;
}

// -------------------------------------------------------------- simulate

struct SimulateFlags {
  ToyModelConfig model;
  std::string prompt = "0";
  int generations = 16;
  DecodingParams decoding{.beta = 1.0};
  double lambda = kDefaultGuidedLambda;
  std::uint64_t seed = 0;
  bool vanilla = false;
  std::string out;
};

std::vector<int> ParseTokens(const std::string& text, int vocab) {
  std::vector<int> tokens;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const int t = std::stoi(part, &used);
      if (used != part.size() || t < 0 || t >= vocab) throw std::out_of_range("token");
      tokens.push_back(t);
    } catch (const std::exception&) {
      throw ValidationError("--prompt: bad token '" + part + "'");
    }
  }
  return tokens;
}

int RunSimulate(const SimulateFlags& f) {
  const ToyModel model(f.model);
  const auto prompt = ParseTokens(f.prompt, model.vocab_size());
  OutputDir out(f.out);

  std::vector<Generation> gens;
  if (f.vanilla) {
    for (int i = 0; i < f.generations; ++i) {
      gens.push_back(
          VanillaGenerate(model, prompt, f.decoding, MixSeed(f.seed, static_cast<std::uint64_t>(i))));
    }
  } else {
    gens = GuidedBatch(model, prompt, f.decoding, f.lambda, f.generations, f.seed);
  }

  std::ostringstream lines;
  std::vector<Generation> so_far;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    so_far.push_back(gens[i]);
    const auto stats = Diversity(so_far);
    ordered_json j;
    j["gen_index"] = i;
    j["tokens"] = gens[i].tokens;
    j["bonuses"] = ToJson(gens[i].chosen_bonuses);
    j["diversity"]["mean_pairwise_distance"] = stats.mean_pairwise_distance;
    j["diversity"]["distinct_sequences"] = stats.distinct_sequences;
    lines << j.dump() << '\n';
  }
  out.WriteText("generations.jsonl", lines.str());

  ordered_json params;
  params["vocab"] = f.model.vocab_size;
  params["hidden"] = f.model.hidden_dim;
  params["model_seed"] = f.model.seed;
  params["prompt"] = prompt;
  params["generations"] = f.generations;
  params["beta"] = f.decoding.beta;
  params["lambda"] = f.lambda;
  params["top_p"] = f.decoding.top_p;
  params["top_k"] = f.decoding.top_k;
  params["temperature"] = f.decoding.temperature;
  params["max_len"] = f.decoding.max_len;
  params["seed"] = f.seed;
  params["vanilla"] = f.vanilla;
  out.Commit("simulate", params);
  return kExitOk;
}

// ----------------------------------------------------------------- synth

struct SynthFlags {
  std::string config;
  std::uint64_t seed = 0;
  bool experiment = false;
  int threads = 0;
  std::string out;
};

int RunSynth(const SynthFlags& f) {
  SynthRunConfig cfg;
  if (!f.config.empty()) {
    try {
      cfg = ReadSynthRunConfig(f.config);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }
  cfg.synth.seed = f.seed;
  cfg.experiment.seed = f.seed;
  cfg.experiment.report.bootstrap_seed = f.seed;
  cfg.experiment.threads = ResolveThreads(f.threads);
  // Surface config errors before touching the output directory.
  GeneratePool([&] {
    SynthConfig probe = cfg.synth;
    probe.points_per_cluster = std::min(probe.points_per_cluster, 1);
    return probe;
  }());
  const auto pool_size =
      static_cast<Eigen::Index>(cfg.synth.n_clusters) * cfg.synth.points_per_cluster;
  if (cfg.experiment.k_max > pool_size) {
    throw ValidationError("k_max exceeds pool size " + std::to_string(pool_size));
  }

  OutputDir out(f.out);
  std::vector<EmbeddingPool> pools;
  std::vector<ManifestRecord> records;
  for (int p = 0; p < cfg.n_pools; ++p) {
    SynthConfig sc = cfg.synth;
    sc.seed = MixSeed(f.seed, static_cast<std::uint64_t>(p));
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03d", p);
    SynthPool sp = GeneratePool(sc, id);
    const std::string file = std::string("pools/") + id + ".bin";
    WritePool(sp.pool, out.File(file));
    records.push_back(RecordFor(sp.pool, file));
    pools.push_back(std::move(sp.pool));
  }
  WriteManifest(records, out.File("manifest.jsonl"));

  if (f.experiment) {
    const auto result = RunExperiment(pools, cfg.experiment);
    out.WriteText("per_question.csv", QuestionCsv(result.report));
    out.WriteText("pass_at_k.csv", PassAtKCsv(result.report));
    out.WriteText("bins.csv", BinCsv(result.report));
    out.WriteText("summary.json", SummaryJson(result.report));
  }

  ordered_json params;
  params["config"] = f.config;
  params["seed"] = f.seed;
  params["n_pools"] = cfg.n_pools;
  params["n_clusters"] = cfg.synth.n_clusters;
  params["points_per_cluster"] = cfg.synth.points_per_cluster;
  params["separation"] = cfg.synth.separation;
  params["within_std"] = cfg.synth.within_std;
  params["correct_cluster"] = cfg.synth.correct_cluster;
  params["correct_fraction"] = cfg.synth.correct_fraction;
  params["dim"] = cfg.synth.dim;
  params["experiment"] = f.experiment;
  if (f.experiment) {
    ordered_json methods = ordered_json::array();
    for (auto m : cfg.experiment.methods) methods.push_back(MethodName(m));
    params["methods"] = methods;
    params["trials"] = cfg.experiment.trials;
    params["k_max"] = cfg.experiment.k_max;
    params["lambda"] = cfg.experiment.lambda;
    params["projection_dim"] = cfg.experiment.projection_dim;
  }
  out.Commit("synth", params);
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportFlags {
  std::vector<std::string> runs;
  std::size_t bins = 10;
  int bootstrap = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<QuestionOutcome> LoadOutcomes(const std::vector<std::string>& runs) {
  std::map<std::string, QuestionOutcome> by_id;
  for (const auto& run : runs) {
    const fs::path path = fs::path(run) / "selections.jsonl";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        if (j.at("c").is_null()) {
          throw std::invalid_argument("selection record has no reward information");
        }
        auto& q = by_id[j.at("prompt_id").get<std::string>()];
        q.prompt_id = j.at("prompt_id").get<std::string>();
        q.n = j.at("n").get<std::int64_t>();
        q.c = j.at("c").get<std::int64_t>();
        QuestionOutcome::Trial trial;
        trial.stc.value = j.at("stc").get<double>();
        trial.stc.censored = j.at("censored").get<bool>();
        trial.observed = static_cast<std::int64_t>(j.at("indices").size());
        const Method m = ParseMethod(j.at("method").get<std::string>());
        (m == Method::kRepExp ? q.repexp : q.random).push_back(trial);
      } catch (const std::exception& e) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (by_id.empty()) throw ValidationError("no selection records found");
  std::vector<QuestionOutcome> outcomes;
  for (auto& [id, q] : by_id) outcomes.push_back(std::move(q));
  return outcomes;
}

int RunReport(const ReportFlags& f) {
  auto outcomes = LoadOutcomes(f.runs);
  ReportOptions opts;
  opts.n_bins = f.bins;
  opts.bootstrap_resamples = f.bootstrap;
  opts.bootstrap_seed = f.seed;
  const Report report = BuildReport(std::move(outcomes), opts);
  OutputDir out(f.out);
  out.WriteText("per_question.csv", QuestionCsv(report));
  out.WriteText("pass_at_k.csv", PassAtKCsv(report));
  out.WriteText("bins.csv", BinCsv(report));
  out.WriteText("summary.json", SummaryJson(report));
  ordered_json params;
  params["runs"] = f.runs;
  params["bins"] = f.bins;
  params["bootstrap"] = f.bootstrap;
  params["seed"] = f.seed;
  out.Commit("report", params);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representation-based exploration: diverse selection, reward bonuses, "
               "guided decoding and verifier-efficiency reports"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SelectFlags sel;
  auto* select = app.add_subcommand("select", "Select diverse responses from embedding pools");
  select->add_option("--manifest", sel.manifest, "Pool manifest (JSONL)")->required();
  select->add_option("--method", sel.method, "repexp or random")
      ->check(CLI::IsMember({"repexp", "random"}))
      ->capture_default_str();
  select->add_option("--k", sel.k, "Responses to select per prompt (default: all)")
      ->check(CLI::PositiveNumber);
  select->add_option("--lambda", sel.lambda, "Covariance regularization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  select->add_option("--dim", sel.dim, "Projection dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  select->add_option("--sparsity", sel.sparsity, "Projection sparsity s (default sqrt(D))")
      ->check(CLI::Range(1.0, 1e12));
  select->add_option("--seed", sel.seed, "Random seed")->required();
  select->add_option("--trials", sel.trials, "Selection trials per prompt")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  select->add_option("--threads", sel.threads, "Worker threads (env REPEXP_THREADS)")
      ->check(CLI::PositiveNumber);
  select->add_option("--out", sel.out, "Output directory")->required();

  BonusFlags bon;
  auto* bonus = app.add_subcommand("bonus", "Augment rollout rewards with leverage bonuses");
  bonus->add_option("--manifest", bon.manifest, "Rollout-group manifest (JSONL)")->required();
  bonus->add_option("--beta", bon.beta, "Bonus coefficient")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bonus->add_option("--lambda", bon.lambda, "Covariance regularization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* bonus_dim = bonus->add_option("--dim", bon.dim, "Projection dimension")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
  bonus->add_flag("--long-context", bon.long_context, "Use projection dimension 128");
  bonus->add_option("--step-seed", bon.step_seed, "Seed of this optimization step")->required();
  bonus->add_option("--out", bon.out, "Output directory")->required();

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Bonus-guided decoding on a toy model");
  simulate->add_option("--vocab", sim.model.vocab_size)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--hidden", sim.model.hidden_dim)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--model-seed", sim.model.seed)->capture_default_str();
  simulate->add_option("--prompt", sim.prompt, "Comma-separated prompt tokens")->capture_default_str();
  simulate->add_option("--generations", sim.generations)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--beta", sim.decoding.beta)->check(CLI::NonNegativeNumber)->capture_default_str();
  simulate->add_option("--lambda", sim.lambda)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--top-p", sim.decoding.top_p)->check(CLI::Range(1e-12, 1.0))->capture_default_str();
  simulate->add_option("--top-k", sim.decoding.top_k)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--temperature", sim.decoding.temperature)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--max-len", sim.decoding.max_len)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->required();
  simulate->add_flag("--vanilla", sim.vanilla, "Plain top-k/top-p sampling without bonuses");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  SynthFlags syn;
  auto* synth = app.add_subcommand("synth", "Generate synthetic pools and run experiments");
  synth->add_option("--config", syn.config, "key = value config file");
  synth->add_option("--seed", syn.seed, "Random seed")->required();
  synth->add_flag("--experiment", syn.experiment, "Also run RepExp vs. random and report");
  synth->add_option("--threads", syn.threads, "Worker threads (env REPEXP_THREADS)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--out", syn.out, "Output directory")->required();

  ReportFlags rep;
  auto* report = app.add_subcommand("report", "Aggregate selection runs into report files");
  report->add_option("--run", rep.runs, "Run directory holding selections.jsonl (repeatable)")
      ->required();
  report->add_option("--bins", rep.bins, "Hardness bins")->check(CLI::PositiveNumber)->capture_default_str();
  report->add_option("--bootstrap", rep.bootstrap, "Bootstrap resamples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  report->add_option("--seed", rep.seed, "Bootstrap seed")->required();
  report->add_option("--out", rep.out, "Output directory")->required();

  std::vector<const char*> argv{"repexp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "repexp: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (select->parsed()) return RunSelect(sel);
    if (bonus->parsed()) return RunBonus(bon, bonus_dim->count() > 0);
    if (simulate->parsed()) return RunSimulate(sim);
    if (synth->parsed()) return RunSynth(syn);
    if (report->parsed()) return RunReport(rep);
  } catch (const IoError& e) {
    err << "repexp: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "repexp: " << e.what() << '\n';
    return kExitIo;
  } catch (const PoolError& e) {
    err << "repexp: " << e.what() << '\n';
    return e.code() == PoolError::Code::kIo ? kExitIo : kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "repexp: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "repexp: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace repexp
