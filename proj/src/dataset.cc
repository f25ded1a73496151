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

#include "evsent/dataset.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace evsent {

using nlohmann::json;

ImportMapping ImportMapping::FromJson(const json& j) {
  ImportMapping m;
  m.doc_id = j.value("doc_id", m.doc_id);
  m.text = j.value("text", m.text);
  m.tokens = j.value("tokens", m.tokens);
  m.sentence_boundaries = j.value("sentence_boundaries", m.sentence_boundaries);
  m.events = j.value("events", m.events);
  m.trigger = j.value("trigger", m.trigger);
  if (j.contains("roles")) {
    for (Role r : kAllRoles) {
      const std::string name(RoleName(r));
      m.roles[static_cast<size_t>(r)] =
          j.at("roles").value(name, m.roles[static_cast<size_t>(r)]);
    }
  }
  m.polarity = j.value("polarity", m.polarity);
  m.span_start = j.value("span_start", m.span_start);
  m.span_end = j.value("span_end", m.span_end);
  m.span_unit = j.value("span_unit", m.span_unit);
  m.tokenizer = j.value("tokenizer", m.tokenizer);
  if (j.contains("polarity_labels")) {
    m.polarity_labels =
        j.at("polarity_labels").get<std::map<std::string, std::string>>();
  }
  if (m.span_unit != "token" && m.span_unit != "char") {
    throw CorpusError("span_unit must be token or char");
  }
  return m;
}

json ImportMapping::ToJson() const {
  json roles_json;
  for (Role r : kAllRoles) {
    roles_json[std::string(RoleName(r))] = roles[static_cast<size_t>(r)];
  }
  return json{{"doc_id", doc_id},
              {"text", text},
              {"tokens", tokens},
              {"sentence_boundaries", sentence_boundaries},
              {"events", events},
              {"trigger", trigger},
              {"roles", roles_json},
              {"polarity", polarity},
              {"span_start", span_start},
              {"span_end", span_end},
              {"span_unit", span_unit},
              {"tokenizer", tokenizer},
              {"polarity_labels", polarity_labels}};
}

std::vector<std::string> TokenizeText(const std::string& text,
                                      const std::string& tokenizer) {
  std::vector<std::string> tokens;
  if (tokenizer == "whitespace") {
    std::istringstream in(text);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
  }
  if (tokenizer == "char") {
    for (size_t i = 0; i < text.size();) {
      const unsigned char c = static_cast<unsigned char>(text[i]);
      size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
      len = std::min(len, text.size() - i);
      if (!std::isspace(c)) tokens.push_back(text.substr(i, len));
      i += len;
    }
    return tokens;
  }
  throw CorpusError("unknown tokenizer '" + tokenizer + "'");
}

namespace {

// Maps a [begin, end) character range onto inclusive token indices.
std::optional<std::pair<int, int>> CharsToTokens(
    const std::vector<std::pair<int, int>>& offsets, int begin, int end) {
  int first = -1, last = -1;
  for (size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i].second > begin && offsets[i].first < end) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
    }
  }
  if (first < 0) return std::nullopt;
  return std::make_pair(first, last);
}

}  // namespace

Document ImportRecord(const json& record, const ImportMapping& m,
                      std::vector<std::string>& warnings) {
  if (!record.is_object()) throw CorpusError("record is not a JSON object");
  Document doc;
  if (!record.contains(m.doc_id)) {
    throw CorpusError("missing field '" + m.doc_id + "'");
  }
  const json& id = record.at(m.doc_id);
  doc.doc_id = id.is_string() ? id.get<std::string>() : id.dump();
  doc.text = record.value(m.text, std::string());
  if (record.contains(m.tokens)) {
    doc.tokens = record.at(m.tokens).get<std::vector<std::string>>();
  } else {
    doc.tokens = TokenizeText(doc.text, m.tokenizer);
  }
  if (record.contains(m.sentence_boundaries)) {
    doc.sentence_boundaries =
        record.at(m.sentence_boundaries).get<std::vector<int>>();
  }
  if (doc.sentence_boundaries.empty()) doc.sentence_boundaries = {0};

  std::optional<std::vector<std::pair<int, int>>> offsets;
  if (m.span_unit == "char") {
    offsets = AlignTokens(doc.text, doc.tokens);
    if (!offsets) {
      throw CorpusError(doc.doc_id + ": tokens do not align with text");
    }
  }
  auto read_span = [&](const json& j, const std::string& what) -> Span {
    if (!j.is_object() || !j.contains(m.span_start) || !j.contains(m.span_end)) {
      throw CorpusError(doc.doc_id + ": " + what + " span lacks '" +
                        m.span_start + "'/'" + m.span_end + "'");
    }
    int start = j.at(m.span_start).get<int>();
    int end = j.at(m.span_end).get<int>();
    if (offsets) {
      auto tokens = CharsToTokens(*offsets, start, end);
      if (!tokens) {
        throw CorpusError(doc.doc_id + ": " + what +
                          " character span covers no token");
      }
      start = tokens->first;
      end = tokens->second;
    }
    if (start < 0 || end < start || end >= doc.num_tokens()) {
      throw CorpusError(doc.doc_id + ": " + what + " span (" +
                        std::to_string(start) + "," + std::to_string(end) +
                        ") out of bounds");
    }
    return MakeSpan(doc, start, end);
  };

  if (record.contains(m.events) && !record.at(m.events).is_null()) {
    for (const json& je : record.at(m.events)) {
      Event e;
      if (!je.contains(m.trigger)) throw CorpusError(doc.doc_id + ": event lacks trigger");
      const json& trigger = je.at(m.trigger);
      if (trigger.is_array()) {
        if (trigger.empty()) throw CorpusError(doc.doc_id + ": empty trigger list");
        if (trigger.size() > 1) {
          warnings.push_back(doc.doc_id + ": event has " +
                             std::to_string(trigger.size()) +
                             " trigger spans, keeping the first");
        }
        e.trigger = read_span(trigger.front(), "trigger");
      } else {
        e.trigger = read_span(trigger, "trigger");
      }
      for (Role r : kAllRoles) {
        const std::string& key = m.roles[static_cast<size_t>(r)];
        if (!je.contains(key) || je.at(key).is_null()) continue;
        const json& value = je.at(key);
        if (value.is_array()) {
          if (value.empty()) continue;
          if (value.size() > 1) {
            warnings.push_back(doc.doc_id + ": " + std::string(RoleName(r)) +
                               " has " + std::to_string(value.size()) +
                               " spans, keeping the first");
          }
          e.argument(r) = read_span(value.front(), std::string(RoleName(r)));
        } else {
          e.argument(r) = read_span(value, std::string(RoleName(r)));
        }
      }
      const json& label_json = je.value(m.polarity, json());
      const std::string label =
          label_json.is_string() ? label_json.get<std::string>() : label_json.dump();
      auto mapped = m.polarity_labels.find(label);
      if (mapped == m.polarity_labels.end()) {
        throw CorpusError(doc.doc_id + ": unknown polarity label '" + label + "'");
      }
      auto polarity = ParsePolarity(mapped->second);
      if (!polarity) {
        throw CorpusError(doc.doc_id + ": polarity label maps to '" +
                          mapped->second + "'");
      }
      e.polarity = *polarity;
      doc.events.push_back(std::move(e));
    }
  }
  const std::set<std::string> mapped = {m.doc_id, m.text, m.tokens,
                                        m.sentence_boundaries, m.events};
  json extra = json::object();
  for (const auto& [key, value] : record.items()) {
    if (mapped.count(key) == 0) extra[key] = value;
  }
  if (!extra.empty()) doc.extra = extra;
  return doc;
}

ImportResult ImportDataset(const std::string& path, const ImportMapping& m) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open dataset file: " + path);
  ImportResult result;
  std::vector<std::pair<int, json>> records;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  const size_t first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    try {
      int index = 0;
      for (json& r : json::parse(content)) records.emplace_back(++index, std::move(r));
    } catch (const json::exception& ex) {
      result.errors.push_back({0, "", std::string("parse error: ") + ex.what()});
    }
  } else {
    std::istringstream lines(content);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        records.emplace_back(line_no, json::parse(line));
      } catch (const json::exception& ex) {
        result.errors.push_back({line_no, "", std::string("parse error: ") + ex.what()});
      }
    }
  }
  for (const auto& [line, record] : records) {
    try {
      Document doc = ImportRecord(record, m, result.warnings);
      const std::vector<std::string> problems = ValidateDocument(doc);
      if (!problems.empty()) {
        for (const std::string& p : problems) {
          result.errors.push_back({line, doc.doc_id, "validation error: " + p});
        }
        continue;
      }
      result.documents.push_back(std::move(doc));
    } catch (const std::exception& ex) {
      result.errors.push_back({line, "", ex.what()});
    }
  }
  return result;
}

std::vector<std::string> CompareWithPublished(const StatsReport& stats,
                                          const PublishedStatistics& expected) {
  std::vector<std::string> out;
  auto check = [&](const char* field, long actual, long want) {
    if (actual != want) {
      out.push_back(std::string(field) + ": expected " + std::to_string(want) +
                    ", found " + std::to_string(actual));
    }
  };
  check("documents", stats.documents, expected.documents);
  check("events", stats.events, expected.events);
  check("positive_events", stats.positive_events, expected.positive_events);
  check("negative_events", stats.negative_events, expected.negative_events);
  check("neutral_events", stats.neutral_events, expected.neutral_events);
  return out;
}

}  // namespace evsent
