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

// Import of externally formatted event-sentiment data into the canonical
// corpus schema, and comparison of corpus statistics with the published
// dataset totals.
//
// The field mapping is configurable because the released files' exact layout
// is not documented. Unmapped top-level fields are preserved under `extra`.

#ifndef EVSENT_DATASET_H_
#define EVSENT_DATASET_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "evsent/corpus.h"
#include "json.hpp"

namespace evsent {

struct ImportMapping {
  std::string doc_id = "doc_id";
  std::string text = "text";
  std::string tokens = "tokens";  // missing tokens: tokenized from text
  std::string sentence_boundaries = "sentence_boundaries";
  std::string events = "events";
  std::string trigger = "trigger";
  std::array<std::string, kNumRoles> roles = {"subject", "object", "time",
                                             "location"};
  std::string polarity = "polarity";
  std::string span_start = "start";
  std::string span_end = "end";
  // "token": inclusive token indices; "char": character offsets, end
  // exclusive, mapped onto tokens.
  std::string span_unit = "token";
  // "whitespace" or "char" (one token per UTF-8 character, skipping spaces).
  std::string tokenizer = "whitespace";
  std::map<std::string, std::string> polarity_labels = {
      {"P", "P"}, {"N", "N"}, {"O", "O"},
      {"positive", "P"}, {"negative", "N"}, {"neutral", "O"}};

  static ImportMapping FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct ImportResult {
  Corpus documents;
  std::vector<LoadError> errors;
  std::vector<std::string> warnings;
};

// Reads JSONL (or a single JSON array) and converts each record.
ImportResult ImportDataset(const std::string& path,
                           const ImportMapping& mapping);
Document ImportRecord(const nlohmann::json& record,
                      const ImportMapping& mapping,
                      std::vector<std::string>& warnings);

std::vector<std::string> TokenizeText(const std::string& text,
                                      const std::string& tokenizer);

// Published totals: 3142 documents, 6177 events, 3912/927/1337 P/N/O.
struct PublishedStatistics {
  long documents = 3142;
  long events = 6177;
  long positive_events = 3912;
  long negative_events = 927;
  long neutral_events = 1337;
};

// One message per mismatching field; empty when all match.
std::vector<std::string> CompareWithPublished(const StatsReport& stats,
                                          const PublishedStatistics& expected = {});

}  // namespace evsent

#endif  // EVSENT_DATASET_H_
