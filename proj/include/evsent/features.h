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

// Token-level POS/NER features and the per-token id sequences (relative
// position, argument role) that feed the trainable embedding tables.

#ifndef EVSENT_FEATURES_H_
#define EVSENT_FEATURES_H_

#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/nn/parameter.h"
#include "evsent/synthetic.h"
#include "json.hpp"

namespace evsent {

inline constexpr int kPadTagId = 0;
inline constexpr int kUnkTagId = 1;

// Tag string <-> id. Ids 0 and 1 are reserved for PAD and UNK.
class TagVocab {
 public:
  TagVocab();

  int Add(const std::string& tag);
  // Unseen tags map to kUnkTagId.
  int Id(const std::string& tag) const;
  const std::string& Tag(int id) const { return tags_.at(static_cast<size_t>(id)); }
  int size() const { return static_cast<int>(tags_.size()); }
  const std::vector<std::string>& tags() const { return tags_; }

  // JSON array of tag strings, index = id.
  nlohmann::json ToJson() const { return tags_; }
  static TagVocab FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static TagVocab Load(const std::string& path);

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> ids_;
};

struct TaggedTokens {
  std::vector<std::string> pos;
  std::vector<std::string> ner;
};

class TaggerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;
  virtual std::string name() const = 0;
  virtual TaggedTokens Tag(const std::vector<std::string>& tokens) = 0;
  // Tags many documents at once; backends with startup cost override this.
  virtual std::vector<TaggedTokens> TagBatch(
      const std::vector<std::vector<std::string>>& documents);
};

struct LexiconEntry {
  std::string pos;
  std::string ner = "O";
};

// Word -> tags table consulted before the rule tagger's heuristics.
struct TaggerLexicon {
  std::map<std::string, LexiconEntry> words;

  // Function words, a small Chinese financial list and every word of the
  // default synthetic grammar.
  static TaggerLexicon Default();
  void AddGrammar(const SynthGrammar& grammar);
};

// Deterministic lexicon + suffix/shape heuristics. UPOS tags and coarse
// OntoNotes-style entity labels.
class RuleTagger : public TaggerBackend {
 public:
  RuleTagger() : RuleTagger(TaggerLexicon::Default()) {}
  explicit RuleTagger(TaggerLexicon lexicon) : lexicon_(std::move(lexicon)) {}

  std::string name() const override { return "rule"; }
  TaggedTokens Tag(const std::vector<std::string>& tokens) override;

 private:
  TaggerLexicon lexicon_;
};

// Runs an external tagging program. The program reads JSONL lines
// {"tokens": [...]} on stdin and writes one line per input with
// {"upos": [...], "xpos": [...], "ner": [...]} on stdout.
// tools/stanza_tagger.py implements this protocol.
class ExternalTagger : public TaggerBackend {
 public:
  ExternalTagger(std::string command, std::string tagset);

  std::string name() const override { return "external"; }
  TaggedTokens Tag(const std::vector<std::string>& tokens) override;
  std::vector<TaggedTokens> TagBatch(
      const std::vector<std::vector<std::string>>& documents) override;

 private:
  std::string command_;
  std::string tagset_;  // "upos" or "xpos"
};

// backend: "rule" or "external". Never falls back silently.
std::unique_ptr<TaggerBackend> MakeTagger(const std::string& backend,
                                          const std::string& command = "",
                                          const std::string& tagset = "upos");

// Per-position tag ids over the full sequence (length m); the two boundary
// positions receive kPadTagId.
struct TokenFeatures {
  std::vector<int> pos_ids;
  std::vector<int> ner_ids;
};

TokenFeatures ToFeatureIds(const TaggedTokens& tags, const TagVocab& pos_vocab,
                           const TagVocab& ner_vocab);
TokenFeatures Tag(const Document& doc, TaggerBackend& backend,
                  const TagVocab& pos_vocab, const TagVocab& ner_vocab);

// id_i = clip(i - anchor, -radius, radius) + radius, for i in [0, m).
std::vector<int> RelativePositionIds(int m, int anchor, int radius);

enum RoleId : int {
  kRoleNone = 0,
  kRoleTrigger = 1,
  kRoleSubject = 2,
  kRoleObject = 3,
  kRoleTime = 4,
  kRoleLocation = 5,
};
inline constexpr int kNumRoleIds = 6;

// Per-position role ids for an event whose span indices map to positions
// index + offset. Earlier ids in the order above win at overlaps.
std::vector<int> RoleIds(int m, const Event& event, int offset);

// The trainable feature tables, owned by a ParameterStore.
struct FeatureEmbeddings {
  nn::Parameter* pos = nullptr;       // |POS| x dim
  nn::Parameter* ner = nullptr;       // |NER| x dim
  nn::Parameter* position = nullptr;  // (2 * radius + 1) x dim
  nn::Parameter* role = nullptr;      // kNumRoleIds x dim
  int dim = 0;
  int radius = 0;

  static FeatureEmbeddings Create(nn::ParameterStore& store, int pos_size,
                                  int ner_size, int dim, int radius,
                                  std::mt19937_64& rng);
};

}  // namespace evsent

#endif  // EVSENT_FEATURES_H_
