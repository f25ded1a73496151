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

#include "evsent/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace evsent {

using nlohmann::json;

std::string_view PolarityLabel(Polarity p) {
  switch (p) {
    case Polarity::kPositive:
      return "P";
    case Polarity::kNegative:
      return "N";
    case Polarity::kNeutral:
      return "O";
  }
  return "O";
}

std::optional<Polarity> ParsePolarity(std::string_view label) {
  if (label == "P") return Polarity::kPositive;
  if (label == "N") return Polarity::kNegative;
  if (label == "O") return Polarity::kNeutral;
  return std::nullopt;
}

std::string_view RoleName(Role r) {
  switch (r) {
    case Role::kSubject:
      return "subject";
    case Role::kObject:
      return "object";
    case Role::kTime:
      return "time";
    case Role::kLocation:
      return "location";
  }
  return "subject";
}

int Document::SentenceOf(int i) const {
  if (sentence_boundaries.empty()) return 0;
  auto it = std::upper_bound(sentence_boundaries.begin(),
                             sentence_boundaries.end(), i);
  return std::max(0, static_cast<int>(it - sentence_boundaries.begin()) - 1);
}

std::optional<std::vector<std::pair<int, int>>> AlignTokens(
    const std::string& text, const std::vector<std::string>& tokens) {
  std::vector<std::pair<int, int>> offsets;
  offsets.reserve(tokens.size());
  size_t cursor = 0;
  for (const std::string& token : tokens) {
    if (token.empty()) return std::nullopt;
    while (cursor < text.size() &&
           std::isspace(static_cast<unsigned char>(text[cursor]))) {
      ++cursor;
    }
    if (text.compare(cursor, token.size(), token) != 0) return std::nullopt;
    offsets.emplace_back(static_cast<int>(cursor),
                         static_cast<int>(cursor + token.size()));
    cursor += token.size();
  }
  return offsets;
}

namespace {

std::string JoinTokens(const std::vector<std::string>& tokens, int start,
                       int end) {
  std::string out;
  for (int i = start; i <= end; ++i) {
    if (i > start) out += ' ';
    out += tokens[static_cast<size_t>(i)];
  }
  return out;
}

std::string SpanTextWith(const Document& doc,
                         const std::optional<std::vector<std::pair<int, int>>>&
                             offsets,
                         int start, int end) {
  if (offsets) {
    const int begin_char = (*offsets)[static_cast<size_t>(start)].first;
    const int end_char = (*offsets)[static_cast<size_t>(end)].second;
    return doc.text.substr(static_cast<size_t>(begin_char),
                           static_cast<size_t>(end_char - begin_char));
  }
  return JoinTokens(doc.tokens, start, end);
}

json SpanToJson(const Span& span,
                const std::optional<std::vector<std::pair<int, int>>>&
                    offsets) {
  json j = {{"start", span.start}, {"end", span.end}, {"text", span.text}};
  if (offsets && span.end < static_cast<int>(offsets->size())) {
    j["char_start"] = (*offsets)[static_cast<size_t>(span.start)].first;
    j["char_end"] = (*offsets)[static_cast<size_t>(span.end)].second;
  }
  return j;
}

Span SpanFromJson(const json& j, const char* field) {
  if (!j.is_object() || !j.contains("start") || !j.contains("end")) {
    throw CorpusError(std::string(field) + ": span needs start and end");
  }
  Span span;
  span.start = j.at("start").get<int>();
  span.end = j.at("end").get<int>();
  if (j.contains("text") && !j.at("text").is_null()) {
    span.text = j.at("text").get<std::string>();
  }
  return span;
}

}  // namespace

std::string SpanText(const Document& doc, int start, int end) {
  return SpanTextWith(doc, AlignTokens(doc.text, doc.tokens), start, end);
}

Span MakeSpan(const Document& doc, int start, int end) {
  return Span{start, end, SpanText(doc, start, end)};
}

std::vector<std::string> ValidateDocument(const Document& doc) {
  std::vector<std::string> problems;
  const int n = doc.num_tokens();
  const auto offsets = AlignTokens(doc.text, doc.tokens);
  int previous = -1;
  for (int b : doc.sentence_boundaries) {
    if (b < 0 || b > n || b <= previous) {
      problems.push_back("sentence boundary " + std::to_string(b) +
                         " is out of order or out of range");
    }
    previous = b;
  }
  auto check = [&](const Span& span, const std::string& what) {
    if (span.start < 0 || span.end < span.start || span.end >= n) {
      problems.push_back(what + " span (" + std::to_string(span.start) + "," +
                         std::to_string(span.end) + ") outside " +
                         std::to_string(n) + " tokens");
      return;
    }
    const std::string expected = SpanTextWith(doc, offsets, span.start,
                                              span.end);
    if (span.text != expected) {
      problems.push_back(what + " text '" + span.text +
                         "' does not match tokens '" + expected + "'");
    }
  };
  for (size_t k = 0; k < doc.events.size(); ++k) {
    const Event& e = doc.events[k];
    const std::string prefix = "event " + std::to_string(k) + " ";
    check(e.trigger, prefix + "trigger");
    for (Role r : kAllRoles) {
      if (e.argument(r)) check(*e.argument(r), prefix + std::string(RoleName(r)));
    }
  }
  return problems;
}

Document DocumentFromJson(const json& j) {
  if (!j.is_object()) throw CorpusError("line is not a JSON object");
  Document doc;
  if (!j.contains("doc_id") || !j.at("doc_id").is_string()) {
    throw CorpusError("missing string field doc_id");
  }
  doc.doc_id = j.at("doc_id").get<std::string>();
  try {
    doc.text = j.value("text", std::string());
    if (!j.contains("tokens")) throw CorpusError("missing field tokens");
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (j.contains("sentence_boundaries")) {
      doc.sentence_boundaries =
          j.at("sentence_boundaries").get<std::vector<int>>();
    }
    if (doc.sentence_boundaries.empty()) doc.sentence_boundaries = {0};
    doc.truncated = j.value("truncated", false);
    if (j.contains("extra")) doc.extra = j.at("extra");
    if (j.contains("events") && !j.at("events").is_null()) {
      for (const json& je : j.at("events")) {
        Event e;
        if (!je.contains("trigger")) throw CorpusError("event lacks trigger");
        e.trigger = SpanFromJson(je.at("trigger"), "trigger");
        for (Role r : kAllRoles) {
          const std::string key(RoleName(r));
          if (je.contains(key) && !je.at(key).is_null()) {
            e.argument(r) = SpanFromJson(je.at(key), key.c_str());
          }
        }
        const std::string label = je.value("polarity", std::string());
        auto polarity = ParsePolarity(label);
        if (!polarity) {
          throw CorpusError("unknown polarity label '" + label + "'");
        }
        e.polarity = *polarity;
        doc.events.push_back(std::move(e));
      }
    }
  } catch (const json::exception& ex) {
    throw CorpusError(std::string("schema error: ") + ex.what());
  }
  // Missing surface text is filled from the tokens; present text is checked.
  for (Event& e : doc.events) {
    auto fill = [&](Span& s) {
      if (s.text.empty() && s.start >= 0 && s.end >= s.start &&
          s.end < doc.num_tokens()) {
        s.text = SpanText(doc, s.start, s.end);
      }
    };
    fill(e.trigger);
    for (auto& a : e.arguments) {
      if (a) fill(*a);
    }
  }
  return doc;
}

json DocumentToJson(const Document& doc, bool include_events) {
  const auto offsets = AlignTokens(doc.text, doc.tokens);
  json j;
  j["doc_id"] = doc.doc_id;
  j["text"] = doc.text;
  j["tokens"] = doc.tokens;
  j["sentence_boundaries"] = doc.sentence_boundaries;
  if (include_events) {
    json events = json::array();
    for (const Event& e : doc.events) {
      json je;
      je["trigger"] = SpanToJson(e.trigger, offsets);
      for (Role r : kAllRoles) {
        const auto& a = e.argument(r);
        je[std::string(RoleName(r))] = a ? SpanToJson(*a, offsets) : json();
      }
      je["polarity"] = std::string(PolarityLabel(e.polarity));
      events.push_back(std::move(je));
    }
    j["events"] = std::move(events);
  }
  if (doc.truncated) j["truncated"] = true;
  if (!doc.extra.is_null()) j["extra"] = doc.extra;
  return j;
}

LoadResult ReadJsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  LoadResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      result.errors.push_back({line_no, "", "UTF-8 byte order mark is not allowed"});
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      result.errors.push_back({line_no, "", std::string("parse error: ") + ex.what()});
      continue;
    }
    std::string doc_id;
    if (j.is_object() && j.contains("doc_id") && j.at("doc_id").is_string()) {
      doc_id = j.at("doc_id").get<std::string>();
    }
    try {
      Document doc = DocumentFromJson(j);
      std::vector<std::string> problems = ValidateDocument(doc);
      if (!problems.empty()) {
        for (const std::string& p : problems) {
          result.errors.push_back({line_no, doc_id, "validation error: " + p});
        }
        continue;
      }
      result.documents.push_back(std::move(doc));
    } catch (const CorpusError& ex) {
      result.errors.push_back({line_no, doc_id, ex.what()});
    }
  }
  return result;
}

Corpus LoadJsonl(const std::string& path) {
  LoadResult result = ReadJsonl(path);
  if (!result.errors.empty()) {
    const LoadError& e = result.errors.front();
    std::ostringstream msg;
    msg << path << ":" << e.line;
    if (!e.doc_id.empty()) msg << " [doc " << e.doc_id << "]";
    msg << ": " << e.message;
    if (result.errors.size() > 1) {
      msg << " (and " << result.errors.size() - 1 << " more errors)";
    }
    throw CorpusError(msg.str());
  }
  return std::move(result.documents);
}

std::string SerializeJsonl(const Corpus& corpus) {
  std::string out;
  for (const Document& doc : corpus) {
    out += DocumentToJson(doc).dump();
    out += '\n';
  }
  return out;
}

void WriteJsonl(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write corpus file: " + path);
  out << SerializeJsonl(corpus);
}

void Truncate(Document& doc, int max_tokens) {
  if (doc.num_tokens() <= max_tokens) return;
  const auto offsets = AlignTokens(doc.text, doc.tokens);
  doc.tokens.resize(static_cast<size_t>(std::max(0, max_tokens)));
  if (offsets && max_tokens > 0) {
    doc.text = doc.text.substr(
        0, static_cast<size_t>((*offsets)[static_cast<size_t>(max_tokens - 1)].second));
  } else if (offsets) {
    doc.text.clear();
  }
  doc.truncated = true;
  std::erase_if(doc.sentence_boundaries,
                [&](int b) { return b > 0 && b >= max_tokens; });
  if (doc.sentence_boundaries.empty()) doc.sentence_boundaries = {0};
  std::vector<Event> kept;
  for (Event& e : doc.events) {
    if (e.trigger.end >= max_tokens) {
      ++doc.dropped_events;
      continue;
    }
    for (auto& a : e.arguments) {
      if (a && a->end >= max_tokens) a.reset();
    }
    kept.push_back(std::move(e));
  }
  doc.events = std::move(kept);
}

Corpus WithEvents(const Corpus& corpus) {
  Corpus out;
  for (const Document& doc : corpus) {
    if (!doc.events.empty()) out.push_back(doc);
  }
  return out;
}

LabelTensors BuildLabelTensors(const Document& doc) {
  LabelTensors labels;
  const int m = doc.sequence_length();
  labels.length = m;
  labels.trigger_start = nn::Matrix::Zero(m, 1);
  labels.trigger_end = nn::Matrix::Zero(m, 1);
  for (const Event& e : doc.events) {
    labels.trigger_start(ToSequence(e.trigger.start), 0) = 1.0;
    labels.trigger_end(ToSequence(e.trigger.end), 0) = 1.0;
    RoleTargets targets{nn::Matrix::Zero(m, kNumRoles),
                        nn::Matrix::Zero(m, kNumRoles)};
    for (Role r : kAllRoles) {
      const auto& a = e.argument(r);
      if (!a) continue;
      targets.start(ToSequence(a->start), static_cast<int>(r)) = 1.0;
      targets.end(ToSequence(a->end), static_cast<int>(r)) = 1.0;
    }
    labels.roles.push_back(std::move(targets));
    labels.polarity_ids.push_back(static_cast<int>(e.polarity));
  }
  return labels;
}

CorpusSplits Split(const Corpus& corpus, SplitRatios ratios, uint64_t seed) {
  const double sum = ratios.train + ratios.dev + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9 || ratios.train < 0 || ratios.dev < 0 ||
      ratios.test < 0) {
    throw CorpusError("split ratios must be non-negative and sum to 1 (got " +
                      std::to_string(sum) + ")");
  }
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n = corpus.size();
  const size_t n_train = std::min(
      n, static_cast<size_t>(std::llround(static_cast<double>(n) * ratios.train)));
  const size_t n_dev = std::min(
      n - n_train,
      static_cast<size_t>(std::llround(static_cast<double>(n) * ratios.dev)));
  CorpusSplits splits;
  for (size_t k = 0; k < n; ++k) {
    const Document& doc = corpus[order[k]];
    if (k < n_train) {
      splits.train.push_back(doc);
    } else if (k < n_train + n_dev) {
      splits.dev.push_back(doc);
    } else {
      splits.test.push_back(doc);
    }
  }
  return splits;
}

bool IsCrossSentence(const Document& doc, const Event& event) {
  const int sentence = doc.SentenceOf(event.trigger.start);
  auto outside = [&](const Span& s) {
    return doc.SentenceOf(s.start) != sentence ||
           doc.SentenceOf(s.end) != sentence;
  };
  if (outside(event.trigger)) return true;
  for (const auto& a : event.arguments) {
    if (a && outside(*a)) return true;
  }
  return false;
}

json StatsReport::ToJson() const {
  return json{{"documents", documents},
              {"average_length", average_length},
              {"events", events},
              {"multi_event_documents", multi_event_documents},
              {"positive_events", positive_events},
              {"negative_events", negative_events},
              {"neutral_events", neutral_events},
              {"average_sentences", average_sentences},
              {"multi_polarity_documents", multi_polarity_documents},
              {"cross_sentence_events", cross_sentence_events}};
}

StatsReport CorpusStats(const Corpus& corpus) {
  StatsReport s;
  long tokens = 0;
  long sentences = 0;
  for (const Document& doc : corpus) {
    ++s.documents;
    tokens += doc.num_tokens();
    sentences += std::max<long>(1, static_cast<long>(doc.sentence_boundaries.size()));
    s.events += static_cast<long>(doc.events.size());
    if (doc.events.size() > 1) ++s.multi_event_documents;
    std::set<Polarity> polarities;
    for (const Event& e : doc.events) {
      polarities.insert(e.polarity);
      switch (e.polarity) {
        case Polarity::kPositive:
          ++s.positive_events;
          break;
        case Polarity::kNegative:
          ++s.negative_events;
          break;
        case Polarity::kNeutral:
          ++s.neutral_events;
          break;
      }
      if (IsCrossSentence(doc, e)) ++s.cross_sentence_events;
    }
    if (polarities.size() > 1) ++s.multi_polarity_documents;
  }
  if (s.documents > 0) {
    s.average_length = static_cast<double>(tokens) / static_cast<double>(s.documents);
    s.average_sentences =
        static_cast<double>(sentences) / static_cast<double>(s.documents);
  }
  return s;
}

}  // namespace evsent
