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

#ifndef REPEXP_REPORT_H_
#define REPEXP_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repexp/io_error.h"
#include "repexp/metrics.h"

namespace repexp {

// One question's outcome for the verifier-efficiency report.
struct QuestionOutcome {
  std::string prompt_id;
  std::int64_t n = 0;
  std::int64_t c = 0;
  // Samples-to-correct of each selection trial. `observed` is how many
  // responses the trial ordered; pass@k is only defined for k <= observed.
  struct Trial {
    SamplesToCorrect stc;
    std::int64_t observed = 0;
  };
  std::vector<Trial> repexp;
  std::vector<Trial> random;  // measured random trials, optional
};

struct ReportOptions {
  std::size_t n_bins = 10;
  int bootstrap_resamples = 1000;
  double bootstrap_level = 0.95;
  std::uint64_t bootstrap_seed = 0;
};

struct QuestionRow {
  std::string prompt_id;
  std::int64_t n = 0;
  std::int64_t c = 0;
  double stc_random = 0.0;
  bool stc_random_censored = false;
  std::optional<double> stc_random_measured;
  std::optional<double> stc_repexp_mean;
  std::optional<double> stc_repexp_std;
  int repexp_trials = 0;
  int repexp_censored = 0;
  std::optional<double> relative_improvement;
};

struct PassAtKRow {
  std::int64_t k = 0;
  double random = 0.0;
  std::optional<double> repexp;
};

struct BinRow {
  std::size_t bin = 0;
  std::size_t questions = 0;
  double hardness_min = 0.0;
  double hardness_max = 0.0;
  double stc_random_mean = 0.0;
  std::optional<double> stc_repexp_mean;
  std::optional<double> relative_improvement;
  std::optional<Interval> improvement_ci;
};

struct StcSummary {
  double mean_all = 0.0;       // censored values included at their cap
  double mean_uncensored = 0.0;  // meaningless when every question is censored
  std::size_t censored = 0;
  std::size_t count = 0;
};

struct Report {
  std::vector<QuestionRow> questions;
  std::vector<PassAtKRow> pass_at_k;
  std::vector<BinRow> bins;  // empty when there are fewer questions than bins
  StcSummary random;
  std::optional<StcSummary> repexp;
  std::optional<double> relative_improvement;  // of the mean samples-to-correct
};

// Aggregates question outcomes. Questions are reported in prompt_id order;
// hardness for binning is the random baseline's samples-to-correct.
Report BuildReport(std::vector<QuestionOutcome> outcomes, const ReportOptions& options);

// Column headers, in order, of the CSV files written by WriteReport.
extern const std::vector<std::string> kQuestionColumns;
extern const std::vector<std::string> kPassAtKColumns;
extern const std::vector<std::string> kBinColumns;

std::string QuestionCsv(const Report& report);
std::string PassAtKCsv(const Report& report);
std::string BinCsv(const Report& report);
std::string SummaryJson(const Report& report);

// Writes per_question.csv, pass_at_k.csv, bins.csv and summary.json into
// `dir`; returns the file names written.
std::vector<std::string> WriteReport(const Report& report, const std::filesystem::path& dir);

// Shortest round-trip decimal form used by every emitted file.
std::string FormatDouble(double value);

}  // namespace repexp

#endif  // REPEXP_REPORT_H_
