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

// Template-grammar generator for financial-news style event corpora.
//
// Every event sentence is produced from a template whose slots are filled
// from a lexicon, so triggers, argument spans and polarities are known
// exactly. Polarity follows a fixed rule over two lexemes:
//
//   sign(trigger direction * subject valence):  + -> P,  - -> N,  0 -> O
//
// so the same trigger lexeme flips polarity with its subject ("revenue
// increased" vs "debt increased"). An event without a subject is neutral.

#ifndef EVSENT_SYNTHETIC_H_
#define EVSENT_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "evsent/corpus.h"
#include "json.hpp"

namespace evsent {

// A multi-token lexicon entry with a signed score (valence for subjects,
// direction for triggers, unused elsewhere).
struct Lexeme {
  std::vector<std::string> tokens;
  int score = 0;
};

struct SynthGrammar {
  std::vector<std::string> companies;
  std::vector<Lexeme> subjects;
  std::vector<Lexeme> triggers;
  std::vector<Lexeme> objects;
  std::vector<Lexeme> times;
  std::vector<Lexeme> locations;
  // Sentences without events.
  std::vector<Lexeme> fillers;

  static SynthGrammar Default();
  static SynthGrammar FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct SynthConfig {
  int num_documents = 100;
  // Probability that a document carries 2..max_events events.
  double multi_event_rate = 0.3;
  int max_events = 3;
  // Probability that an event's time/location sit in a preceding sentence.
  double cross_sentence_rate = 0.15;
  // In multi-event documents, probability that later events reuse the first
  // event's trigger lexeme with a subject of opposite valence.
  double shared_trigger_rate = 0.3;
  // Per-document probability of a leading filler sentence and of a
  // distractor sentence mentioning a subject phrase outside any event.
  double filler_rate = 0.5;
  double distractor_rate = 0.3;
  double subject_rate = 0.95;
  double object_rate = 0.85;
  double time_rate = 0.6;
  double location_rate = 0.4;
  SynthGrammar grammar = SynthGrammar::Default();

  static SynthConfig FromJson(const nlohmann::json& j);
};

Polarity SyntheticPolarity(int trigger_direction, int subject_valence);

// Pure function of (config, seed). Throws CorpusError for an empty grammar.
Corpus GenerateSynthetic(const SynthConfig& config, uint64_t seed);

}  // namespace evsent

#endif  // EVSENT_SYNTHETIC_H_
