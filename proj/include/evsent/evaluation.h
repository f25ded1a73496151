// Copyright 2026 The evsent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact-match span metrics, event-level sentiment metrics and Krippendorff's
// alpha.

#ifndef EVSENT_EVALUATION_H_
#define EVSENT_EVALUATION_H_

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evsent/corpus.h"
#include "json.hpp"

namespace evsent {

class EventExtractor;

struct Prf {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Prf FromCounts(long tp, long fp, long fn);
  Prf& operator+=(const Prf& other);  // adds counts, recomputes ratios
  nlohmann::json ToJson() const;
};

// F1 = 2PR / (P + R), 0 when P + R = 0.
double F1Score(double precision, double recall);

// Multiset intersection of exact (start, end) pairs.
Prf SpanPrf(const std::vector<std::pair<int, int>>& predicted,
            const std::vector<std::pair<int, int>>& gold);

// A predicted event counts when its trigger span equals that of a still
// unmatched gold event with the same polarity (and, when `strict`, identical
// arguments). Predictions are matched greedily in document order.
Prf EventMatchSentiment(const std::vector<Event>& predicted,
                        const std::vector<Event>& gold, bool strict = false);

// Rows gold, columns predicted, both in [P, N, O] order.
using ConfusionMatrix = std::array<std::array<long, kNumPolarities>,
                                   kNumPolarities>;

struct GoldArgumentReport {
  ConfusionMatrix confusion{};
  std::array<Prf, kNumPolarities> per_class;
  std::string average = "macro";
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  long events = 0;

  nlohmann::json ToJson() const;
};

// `average` is "macro" or "micro".
GoldArgumentReport SentimentFromConfusion(const ConfusionMatrix& confusion,
                                          const std::string& average = "macro");
GoldArgumentReport GoldArgumentSentiment(const std::vector<Polarity>& gold,
                                         const std::vector<Polarity>& predicted,
                                         const std::string& average = "macro");

class AlphaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ratings[u][a]: category given to unit u by annotator a, nullopt if missing.
// Nominal metric. Perfect agreement (including a single category throughout)
// gives 1.
double KrippendorffAlpha(
    const std::vector<std::vector<std::optional<std::string>>>& ratings);

inline constexpr std::array<const char*, 6> kSubtasks = {
    "trigger", "subject", "object", "time", "location", "sentiment"};

struct MetricReport {
  std::string mode;  // "end2end" or "gold-args"
  std::map<std::string, Prf> subtasks;
  std::optional<GoldArgumentReport> gold_arguments;
  long documents = 0;
  long truncated_documents = 0;

  nlohmann::json ToJson() const;
  // Aligned text table.
  std::string ToTable() const;
};

struct EvalOptions {
  bool strict_sentiment = false;
  std::string average = "macro";
};

// Scores predicted documents against gold ones (same order and length).
// Argument matches require the trigger span to match as well.
MetricReport ScoreEndToEnd(const Corpus& predicted, const Corpus& gold,
                           const EvalOptions& options = {});

MetricReport EvaluateEndToEnd(EventExtractor& extractor, const Corpus& gold,
                              const EvalOptions& options = {});
MetricReport EvaluateGoldArguments(EventExtractor& extractor,
                                   const Corpus& gold,
                                   const EvalOptions& options = {});

}  // namespace evsent

#endif  // EVSENT_EVALUATION_H_
