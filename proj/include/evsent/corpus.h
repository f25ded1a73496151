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

// Document/event data model and JSONL corpus I/O.
//
// Token indices in Span are document token indices. The model sees every
// document wrapped in two boundary tokens, so document token i sits at
// sequence position i + 1 (see ToSequence/FromSequence).

#ifndef EVSENT_CORPUS_H_
#define EVSENT_CORPUS_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evsent/nn/parameter.h"
#include "json.hpp"

namespace evsent {

// Class order is fixed and persisted with checkpoints.
enum class Polarity { kPositive = 0, kNegative = 1, kNeutral = 2 };
inline constexpr int kNumPolarities = 3;

enum class Role { kSubject = 0, kObject = 1, kTime = 2, kLocation = 3 };
inline constexpr int kNumRoles = 4;
inline constexpr std::array<Role, kNumRoles> kAllRoles = {
    Role::kSubject, Role::kObject, Role::kTime, Role::kLocation};

std::string_view PolarityLabel(Polarity p);  // "P", "N" or "O"
std::optional<Polarity> ParsePolarity(std::string_view label);
std::string_view RoleName(Role r);  // "subject", "object", "time", "location"

// Inclusive token interval.
struct Span {
  int start = 0;
  int end = 0;
  std::string text;

  int length() const { return end - start + 1; }
  bool SameBounds(const Span& other) const {
    return start == other.start && end == other.end;
  }
  bool operator==(const Span& other) const = default;
};

struct Event {
  Span trigger;
  std::array<std::optional<Span>, kNumRoles> arguments;
  Polarity polarity = Polarity::kNeutral;

  std::optional<Span>& argument(Role r) {
    return arguments[static_cast<int>(r)];
  }
  const std::optional<Span>& argument(Role r) const {
    return arguments[static_cast<int>(r)];
  }
  bool operator==(const Event& other) const = default;
};

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<std::string> tokens;
  // Token index at which each sentence begins, ascending.
  std::vector<int> sentence_boundaries;
  std::vector<Event> events;
  bool truncated = false;
  // Events removed by truncation.
  int dropped_events = 0;
  // Unmapped fields carried through from imported data.
  nlohmann::json extra;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  // Sequence length including the two boundary tokens.
  int sequence_length() const { return num_tokens() + 2; }
  // Index of the sentence containing token `i`.
  int SentenceOf(int i) const;
  bool operator==(const Document& other) const = default;
};

using Corpus = std::vector<Document>;

inline int ToSequence(int token_index) { return token_index + 1; }
inline int FromSequence(int position) { return position - 1; }

// Character offsets of every token in `text`, found by scanning tokens left
// to right. Returns nullopt when some token cannot be located verbatim.
std::optional<std::vector<std::pair<int, int>>> AlignTokens(
    const std::string& text, const std::vector<std::string>& tokens);

// Surface text of tokens [start, end]: the slice of `doc.text` covered by the
// tokens when alignment succeeds, otherwise the tokens joined by spaces.
std::string SpanText(const Document& doc, int start, int end);
Span MakeSpan(const Document& doc, int start, int end);

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadError {
  int line = 0;  // 1-based
  std::string doc_id;
  std::string message;
};

struct LoadResult {
  Corpus documents;
  std::vector<LoadError> errors;
};

// Checks span bounds and surface text; returns one message per problem.
std::vector<std::string> ValidateDocument(const Document& doc);

Document DocumentFromJson(const nlohmann::json& j);
nlohmann::json DocumentToJson(const Document& doc, bool include_events = true);

// Parses every line, collecting structured errors instead of stopping.
LoadResult ReadJsonl(const std::string& path);
// Strict variant: throws CorpusError describing the first error (line and
// doc_id) if any line fails.
Corpus LoadJsonl(const std::string& path);
void WriteJsonl(const std::string& path, const Corpus& corpus);
std::string SerializeJsonl(const Corpus& corpus);

// Truncates to at most `max_tokens` tokens, dropping events whose trigger
// falls outside and clearing arguments that do.
void Truncate(Document& doc, int max_tokens);

// Documents that carry at least one event; training uses only these.
Corpus WithEvents(const Corpus& corpus);

struct RoleTargets {
  nn::Matrix start;  // m x kNumRoles
  nn::Matrix end;    // m x kNumRoles
};

// Gold 0/1 targets in sequence space (length m = tokens + 2). The boundary
// tokens always carry 0.
struct LabelTensors {
  int length = 0;
  nn::Matrix trigger_start;  // m x 1
  nn::Matrix trigger_end;    // m x 1
  std::vector<RoleTargets> roles;  // one per event
  std::vector<int> polarity_ids;   // one per event
};

LabelTensors BuildLabelTensors(const Document& doc);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct CorpusSplits {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Deterministic shuffled split. Sizes are round(n * train), round(n * dev)
// and the remainder.
CorpusSplits Split(const Corpus& corpus, SplitRatios ratios, uint64_t seed);

struct StatsReport {
  long documents = 0;
  double average_length = 0.0;  // tokens per document
  long events = 0;
  long multi_event_documents = 0;
  long positive_events = 0;
  long negative_events = 0;
  long neutral_events = 0;
  double average_sentences = 0.0;
  long multi_polarity_documents = 0;
  long cross_sentence_events = 0;

  nlohmann::json ToJson() const;
};

// True when the event's trigger and arguments do not all share a sentence.
bool IsCrossSentence(const Document& doc, const Event& event);
StatsReport CorpusStats(const Corpus& corpus);

}  // namespace evsent

#endif  // EVSENT_CORPUS_H_
