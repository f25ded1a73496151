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

#include "evsent/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "evsent/model.h"

namespace evsent {

using nlohmann::json;

double F1Score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Prf Prf::FromCounts(long tp, long fp, long fn) {
  Prf r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = F1Score(r.precision, r.recall);
  return r;
}

Prf& Prf::operator+=(const Prf& other) {
  *this = FromCounts(tp + other.tp, fp + other.fp, fn + other.fn);
  return *this;
}

json Prf::ToJson() const {
  return json{{"tp", tp},       {"fp", fp},         {"fn", fn},
              {"precision", precision}, {"recall", recall}, {"f1", f1}};
}

namespace {

template <typename T>
Prf MultisetPrf(std::vector<T> predicted, std::vector<T> gold) {
  std::sort(predicted.begin(), predicted.end());
  std::sort(gold.begin(), gold.end());
  std::vector<T> common;
  std::set_intersection(predicted.begin(), predicted.end(), gold.begin(),
                        gold.end(), std::back_inserter(common));
  const long tp = static_cast<long>(common.size());
  return Prf::FromCounts(tp, static_cast<long>(predicted.size()) - tp,
                         static_cast<long>(gold.size()) - tp);
}

bool SameArguments(const Event& a, const Event& b) {
  for (Role r : kAllRoles) {
    const auto& x = a.argument(r);
    const auto& y = b.argument(r);
    if (x.has_value() != y.has_value()) return false;
    if (x && !x->SameBounds(*y)) return false;
  }
  return true;
}

}  // namespace

Prf SpanPrf(const std::vector<std::pair<int, int>>& predicted,
            const std::vector<std::pair<int, int>>& gold) {
  return MultisetPrf(predicted, gold);
}

Prf EventMatchSentiment(const std::vector<Event>& predicted,
                        const std::vector<Event>& gold, bool strict) {
  std::vector<bool> used(gold.size(), false);
  long tp = 0;
  for (const Event& p : predicted) {
    for (size_t k = 0; k < gold.size(); ++k) {
      if (used[k]) continue;
      const Event& g = gold[k];
      if (!p.trigger.SameBounds(g.trigger) || p.polarity != g.polarity) continue;
      if (strict && !SameArguments(p, g)) continue;
      used[k] = true;
      ++tp;
      break;
    }
  }
  return Prf::FromCounts(tp, static_cast<long>(predicted.size()) - tp,
                         static_cast<long>(gold.size()) - tp);
}

json GoldArgumentReport::ToJson() const {
  json classes = json::object();
  for (int c = 0; c < kNumPolarities; ++c) {
    classes[std::string(PolarityLabel(static_cast<Polarity>(c)))] =
        per_class[static_cast<size_t>(c)].ToJson();
  }
  json matrix = json::array();
  for (const auto& row : confusion) matrix.push_back(row);
  return json{{"average", average},     {"precision", precision},
              {"recall", recall},       {"f1", f1},
              {"accuracy", accuracy},   {"events", events},
              {"per_class", classes},   {"confusion", matrix}};
}

GoldArgumentReport SentimentFromConfusion(const ConfusionMatrix& confusion,
                                          const std::string& average) {
  if (average != "macro" && average != "micro") {
    throw std::invalid_argument("average must be macro or micro, got '" +
                                average + "'");
  }
  GoldArgumentReport r;
  r.confusion = confusion;
  r.average = average;
  long correct = 0;
  for (int c = 0; c < kNumPolarities; ++c) {
    long tp = confusion[c][c];
    long fp = 0, fn = 0;
    for (int o = 0; o < kNumPolarities; ++o) {
      r.events += confusion[c][o];
      if (o == c) continue;
      fp += confusion[o][c];
      fn += confusion[c][o];
    }
    correct += tp;
    r.per_class[static_cast<size_t>(c)] = Prf::FromCounts(tp, fp, fn);
  }
  r.accuracy = r.events > 0 ? static_cast<double>(correct) /
                                  static_cast<double>(r.events)
                            : 0.0;
  if (average == "macro") {
    for (const Prf& p : r.per_class) {
      r.precision += p.precision / kNumPolarities;
      r.recall += p.recall / kNumPolarities;
    }
    r.f1 = F1Score(r.precision, r.recall);
  } else {
    Prf total;
    for (const Prf& p : r.per_class) total += p;
    r.precision = total.precision;
    r.recall = total.recall;
    r.f1 = total.f1;
  }
  return r;
}

GoldArgumentReport GoldArgumentSentiment(const std::vector<Polarity>& gold,
                                         const std::vector<Polarity>& predicted,
                                         const std::string& average) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("GoldArgumentSentiment: length mismatch");
  }
  ConfusionMatrix confusion{};
  for (size_t i = 0; i < gold.size(); ++i) {
    ++confusion[static_cast<size_t>(gold[i])][static_cast<size_t>(predicted[i])];
  }
  return SentimentFromConfusion(confusion, average);
}

double KrippendorffAlpha(
    const std::vector<std::vector<std::optional<std::string>>>& ratings) {
  std::map<std::string, int> categories;
  for (const auto& unit : ratings) {
    for (const auto& v : unit) {
      if (v) categories.emplace(*v, 0);
    }
  }
  int next = 0;
  for (auto& [name, id] : categories) id = next++;
  const size_t k = categories.size();
  std::vector<std::vector<double>> coincidence(k, std::vector<double>(k, 0.0));
  bool pairable = false;
  for (const auto& unit : ratings) {
    std::vector<int> values;
    for (const auto& v : unit) {
      if (v) values.push_back(categories.at(*v));
    }
    if (values.size() < 2) continue;
    pairable = true;
    const double weight = 1.0 / static_cast<double>(values.size() - 1);
    for (size_t i = 0; i < values.size(); ++i) {
      for (size_t j = 0; j < values.size(); ++j) {
        if (i != j) coincidence[values[i]][values[j]] += weight;
      }
    }
  }
  if (!pairable) {
    throw AlphaError("Krippendorff's alpha is undefined: no unit has two ratings");
  }
  std::vector<double> marginal(k, 0.0);
  double n = 0.0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) marginal[c] += coincidence[c][d];
    n += marginal[c];
  }
  double observed = 0.0, expected = 0.0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      observed += coincidence[c][d];
      expected += marginal[c] * marginal[d];
    }
  }
  if (observed == 0.0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

json MetricReport::ToJson() const {
  json j = {{"mode", mode},
            {"documents", documents},
            {"truncated_documents", truncated_documents}};
  json tasks = json::object();
  for (const auto& [name, prf] : subtasks) tasks[name] = prf.ToJson();
  j["subtasks"] = tasks;
  if (gold_arguments) j["gold_arguments"] = gold_arguments->ToJson();
  return j;
}

std::string MetricReport::ToTable() const {
  std::ostringstream out;
  char line[160];
  if (gold_arguments) {
    const GoldArgumentReport& g = *gold_arguments;
    std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s\n", "", "P", "R",
                  "F1", "Acc");
    out << line;
    std::snprintf(line, sizeof(line), "%-10s %8.2f %8.2f %8.2f %8.2f\n",
                  "sentiment", 100 * g.precision, 100 * g.recall, 100 * g.f1,
                  100 * g.accuracy);
    out << line;
    for (int c = 0; c < kNumPolarities; ++c) {
      const Prf& p = g.per_class[static_cast<size_t>(c)];
      std::snprintf(line, sizeof(line), "  %-8s %8.2f %8.2f %8.2f\n",
                    std::string(PolarityLabel(static_cast<Polarity>(c))).c_str(),
                    100 * p.precision, 100 * p.recall, 100 * p.f1);
      out << line;
    }
    return out.str();
  }
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %7s %7s %7s\n", "", "P",
                "R", "F1", "TP", "FP", "FN");
  out << line;
  for (const char* task : kSubtasks) {
    auto it = subtasks.find(task);
    if (it == subtasks.end()) continue;
    const Prf& p = it->second;
    std::snprintf(line, sizeof(line),
                  "%-10s %8.2f %8.2f %8.2f %7ld %7ld %7ld\n", task,
                  100 * p.precision, 100 * p.recall, 100 * p.f1, p.tp, p.fp,
                  p.fn);
    out << line;
  }
  return out.str();
}

MetricReport ScoreEndToEnd(const Corpus& predicted, const Corpus& gold,
                           const EvalOptions& options) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("ScoreEndToEnd: document count mismatch");
  }
  MetricReport report;
  report.mode = "end2end";
  for (const char* task : kSubtasks) report.subtasks[task] = Prf{};
  using Tuple = std::tuple<int, int, int, int>;
  for (size_t d = 0; d < gold.size(); ++d) {
    const Document& p = predicted[d];
    const Document& g = gold[d];
    ++report.documents;
    if (p.truncated) ++report.truncated_documents;
    std::vector<std::pair<int, int>> pt, gt;
    for (const Event& e : p.events) pt.emplace_back(e.trigger.start, e.trigger.end);
    for (const Event& e : g.events) gt.emplace_back(e.trigger.start, e.trigger.end);
    report.subtasks["trigger"] += SpanPrf(pt, gt);
    for (Role r : kAllRoles) {
      std::vector<Tuple> pa, ga;
      for (const Event& e : p.events) {
        if (const auto& a = e.argument(r)) {
          pa.emplace_back(e.trigger.start, e.trigger.end, a->start, a->end);
        }
      }
      for (const Event& e : g.events) {
        if (const auto& a = e.argument(r)) {
          ga.emplace_back(e.trigger.start, e.trigger.end, a->start, a->end);
        }
      }
      report.subtasks[std::string(RoleName(r))] += MultisetPrf(pa, ga);
    }
    report.subtasks["sentiment"] +=
        EventMatchSentiment(p.events, g.events, options.strict_sentiment);
  }
  return report;
}

MetricReport EvaluateEndToEnd(EventExtractor& extractor, const Corpus& gold,
                              const EvalOptions& options) {
  Corpus predicted;
  predicted.reserve(gold.size());
  for (const Document& doc : gold) predicted.push_back(extractor.Predict(doc));
  return ScoreEndToEnd(predicted, gold, options);
}

MetricReport EvaluateGoldArguments(EventExtractor& extractor,
                                   const Corpus& gold,
                                   const EvalOptions& options) {
  std::vector<Polarity> gold_labels, predicted;
  MetricReport report;
  report.mode = "gold-args";
  for (const Document& doc : gold) {
    const Document truncated = extractor.Truncated(doc);
    ++report.documents;
    if (truncated.truncated) ++report.truncated_documents;
    const std::vector<Polarity> labels = extractor.ClassifyGold(truncated);
    for (size_t k = 0; k < truncated.events.size(); ++k) {
      gold_labels.push_back(truncated.events[k].polarity);
      predicted.push_back(labels[k]);
    }
  }
  report.gold_arguments =
      GoldArgumentSentiment(gold_labels, predicted, options.average);
  return report;
}

}  // namespace evsent
