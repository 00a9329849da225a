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

#include "repexp/report.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace repexp {

const std::vector<std::string> kQuestionColumns = {
    "prompt_id",      "n",
    "c",              "stc_random",
    "stc_random_censored", "stc_random_measured",
    "stc_repexp_mean", "stc_repexp_std",
    "repexp_trials",  "repexp_censored_trials",
    "relative_improvement"};
const std::vector<std::string> kPassAtKColumns = {"k", "random", "repexp"};
const std::vector<std::string> kBinColumns = {
    "bin",
    "questions",
    "hardness_min",
    "hardness_max",
    "stc_random_mean",
    "stc_repexp_mean",
    "relative_improvement",
    "improvement_ci_low",
    "improvement_ci_high"};

namespace {

std::string Opt(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }

nlohmann::ordered_json OptJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string Header(const std::vector<std::string>& columns) {
  std::string line;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) line += ',';
    line += columns[i];
  }
  return line + '\n';
}

// Quotes a CSV field when needed.
std::string Field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::vector<std::int64_t> PassAtKGrid(std::int64_t max_k) {
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 1; k <= max_k; k *= 2) ks.push_back(k);
  if (ks.empty() || ks.back() != max_k) ks.push_back(max_k);
  return ks;
}

StcSummary Summarize(const std::vector<double>& all, const std::vector<bool>& censored) {
  StcSummary s;
  s.count = all.size();
  s.mean_all = Mean(all);
  std::vector<double> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (censored[i]) {
      ++s.censored;
    } else {
      kept.push_back(all[i]);
    }
  }
  s.mean_uncensored = Mean(kept);
  return s;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Report BuildReport(std::vector<QuestionOutcome> outcomes, const ReportOptions& options) {
  if (outcomes.empty()) throw std::invalid_argument("report: no questions");
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& a, const auto& b) { return a.prompt_id < b.prompt_id; });

  Report report;
  std::vector<double> random_all;
  std::vector<bool> random_censored;
  std::vector<double> repexp_all;
  std::vector<bool> repexp_censored;
  std::vector<double> hardness;
  std::int64_t min_n = outcomes.front().n;
  std::int64_t min_observed = -1;
  bool have_repexp = true;

  for (const auto& q : outcomes) {
    QuestionRow row;
    row.prompt_id = q.prompt_id;
    row.n = q.n;
    row.c = q.c;
    const auto baseline = SamplesToCorrectRandom(q.n, q.c);
    row.stc_random = baseline.value;
    row.stc_random_censored = baseline.censored;
    random_all.push_back(baseline.value);
    random_censored.push_back(baseline.censored);
    hardness.push_back(baseline.value);
    min_n = std::min(min_n, q.n);

    if (!q.random.empty()) {
      std::vector<double> v;
      for (const auto& t : q.random) v.push_back(t.stc.value);
      row.stc_random_measured = Mean(v);
    }
    if (q.repexp.empty()) {
      have_repexp = false;
    } else {
      std::vector<double> v;
      for (const auto& t : q.repexp) {
        v.push_back(t.stc.value);
        if (t.stc.censored) ++row.repexp_censored;
        min_observed = min_observed < 0 ? t.observed : std::min(min_observed, t.observed);
      }
      row.repexp_trials = static_cast<int>(v.size());
      row.stc_repexp_mean = Mean(v);
      row.stc_repexp_std = StdDev(v);
      if (q.c > 0) {
        row.relative_improvement = RelativeImprovement(row.stc_random, *row.stc_repexp_mean);
      }
      repexp_all.push_back(*row.stc_repexp_mean);
      repexp_censored.push_back(row.repexp_censored > 0);
    }
    report.questions.push_back(std::move(row));
  }

  report.random = Summarize(random_all, random_censored);
  if (have_repexp) {
    report.repexp = Summarize(repexp_all, repexp_censored);
    if (report.random.mean_all > 0.0) {
      report.relative_improvement =
          RelativeImprovement(report.random.mean_all, report.repexp->mean_all);
    }
  }

  std::vector<QuestionCounts> counts;
  for (const auto& q : outcomes) counts.push_back({q.n, q.c});
  const auto ks = PassAtKGrid(min_n);
  const auto random_curve = DatasetPassAtK(counts, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    PassAtKRow row;
    row.k = ks[i];
    row.random = random_curve.values[i];
    if (have_repexp && ks[i] <= min_observed) {
      double total = 0.0;
      for (const auto& q : outcomes) {
        double hits = 0.0;
        for (const auto& t : q.repexp) {
          if (!t.stc.censored && t.stc.value <= static_cast<double>(ks[i])) hits += 1.0;
        }
        total += hits / static_cast<double>(q.repexp.size());
      }
      row.repexp = total / static_cast<double>(outcomes.size());
    }
    report.pass_at_k.push_back(row);
  }

  if (outcomes.size() >= options.n_bins) {
    const auto bins = HardnessBins(hardness, options.n_bins);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      BinRow row;
      row.bin = b;
      row.questions = bins[b].size();
      std::vector<double> rnd;
      std::vector<double> rep;
      std::vector<double> improvement;
      for (auto qi : bins[b]) {
        const auto& q = report.questions[qi];
        rnd.push_back(q.stc_random);
        if (q.stc_repexp_mean) rep.push_back(*q.stc_repexp_mean);
        if (q.relative_improvement) improvement.push_back(*q.relative_improvement);
      }
      row.hardness_min = hardness[bins[b].front()];
      row.hardness_max = hardness[bins[b].back()];
      row.stc_random_mean = Mean(rnd);
      if (have_repexp) {
        row.stc_repexp_mean = Mean(rep);
        row.relative_improvement = RelativeImprovement(row.stc_random_mean, *row.stc_repexp_mean);
      }
      if (!improvement.empty()) {
        row.improvement_ci =
            BootstrapMeanCI(improvement, options.bootstrap_resamples, options.bootstrap_level,
                            options.bootstrap_seed + b);
      }
      report.bins.push_back(row);
    }
  }
  return report;
}

std::string QuestionCsv(const Report& report) {
  std::ostringstream out;
  out << Header(kQuestionColumns);
  for (const auto& q : report.questions) {
    out << Field(q.prompt_id) << ',' << q.n << ',' << q.c << ',' << FormatDouble(q.stc_random)
        << ',' << (q.stc_random_censored ? 1 : 0) << ',' << Opt(q.stc_random_measured) << ','
        << Opt(q.stc_repexp_mean) << ',' << Opt(q.stc_repexp_std) << ',' << q.repexp_trials
        << ',' << q.repexp_censored << ',' << Opt(q.relative_improvement) << '\n';
  }
  return out.str();
}

std::string PassAtKCsv(const Report& report) {
  std::ostringstream out;
  out << Header(kPassAtKColumns);
  for (const auto& row : report.pass_at_k) {
    out << row.k << ',' << FormatDouble(row.random) << ',' << Opt(row.repexp) << '\n';
  }
  return out.str();
}

std::string BinCsv(const Report& report) {
  std::ostringstream out;
  out << Header(kBinColumns);
  for (const auto& b : report.bins) {
    out << b.bin << ',' << b.questions << ',' << FormatDouble(b.hardness_min) << ','
        << FormatDouble(b.hardness_max) << ',' << FormatDouble(b.stc_random_mean) << ','
        << Opt(b.stc_repexp_mean) << ',' << Opt(b.relative_improvement) << ','
        << (b.improvement_ci ? FormatDouble(b.improvement_ci->low) : "") << ','
        << (b.improvement_ci ? FormatDouble(b.improvement_ci->high) : "") << '\n';
  }
  return out.str();
}

std::string SummaryJson(const Report& report) {
  using nlohmann::ordered_json;
  auto stc = [](const StcSummary& s) {
    ordered_json j;
    j["mean_censored_included"] = s.mean_all;
    j["mean_censored_excluded"] =
        s.censored < s.count ? ordered_json(s.mean_uncensored) : ordered_json(nullptr);
    j["censored_questions"] = s.censored;
    j["questions"] = s.count;
    return j;
  };
  ordered_json j;
  j["questions"] = report.questions.size();
  j["samples_to_correct"]["random"] = stc(report.random);
  j["samples_to_correct"]["repexp"] =
      report.repexp ? stc(*report.repexp) : ordered_json(nullptr);
  j["relative_improvement"] = OptJson(report.relative_improvement);
  ordered_json curve = ordered_json::array();
  for (const auto& row : report.pass_at_k) {
    ordered_json r;
    r["k"] = row.k;
    r["random"] = row.random;
    r["repexp"] = OptJson(row.repexp);
    curve.push_back(r);
  }
  j["pass_at_k"] = curve;
  return j.dump(2) + '\n';
}

std::vector<std::string> WriteReport(const Report& report, const std::filesystem::path& dir) {
  const std::vector<std::pair<std::string, std::string>> files = {
      {"per_question.csv", QuestionCsv(report)},
      {"pass_at_k.csv", PassAtKCsv(report)},
      {"bins.csv", BinCsv(report)},
      {"summary.json", SummaryJson(report)}};
  std::vector<std::string> names;
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << body;
    if (!out) throw IoError("write failed for " + (dir / name).string());
    names.push_back(name);
  }
  return names;
}

}  // namespace repexp
