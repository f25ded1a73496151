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

// The joint event-level sentiment model: encoder, feature embeddings and the
// trigger, argument and sentiment heads over one shared parameter store.
//
// Checkpoint directory layout:
//   model.json     version, kind "joint", model config, class order, roles
//   vocab.txt      encoder vocabulary
//   pos_tags.json  POS tag vocabulary (JSON array, index = id)
//   ner_tags.json  NER tag vocabulary
//   weights.bin    every parameter, see nn/tensor_file.h

#ifndef EVSENT_MODEL_H_
#define EVSENT_MODEL_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "evsent/argument_extractor.h"
#include "evsent/corpus.h"
#include "evsent/encoder.h"
#include "evsent/features.h"
#include "evsent/nn/graph.h"
#include "evsent/nn/parameter.h"
#include "evsent/sentiment_classifier.h"
#include "evsent/trigger_extractor.h"
#include "json.hpp"

namespace evsent {

inline constexpr int kModelCheckpointVersion = 1;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  EncoderConfig encoder;
  // Pre-trained encoder directory; empty selects the small encoder.
  std::string encoder_checkpoint;
  int freeze_layers = 0;
  int feature_dim = 128;
  int position_radius = 256;
  int head_dim = 0;  // 0 means the encoder hidden size
  double dropout = 0.1;
  bool use_features = true;
  bool use_trigger_info = true;
  bool use_argument_info = true;
  SpanDecodeConfig trigger_decode{0.5, 10};
  SpanDecodeConfig argument_decode{0.5, 30};
  int max_seq_len = 512;
  double trigger_positive_weight = 1.0;
  std::string tagger_backend = "rule";
  std::string tagger_command;
  std::string tagger_tagset = "upos";

  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
};

// Loss components a model is trained on; pipeline stages train one each.
struct LossMask {
  bool trigger = true;
  bool argument = true;
  bool sentiment = true;
};

enum class TriggerSource { kGold, kPredicted };

// A document ready for the model: truncated, tagged, labelled.
struct PreparedDocument {
  Document doc;
  TokenFeatures features;
  EncoderInput input;
  LabelTensors labels;
  int length() const { return labels.length; }
};

struct LossNodes {
  nn::Var total;
  nn::Var trigger;
  nn::Var argument;
  nn::Var sentiment;
};

// Common inference interface of the joint model and the pipeline chain.
class EventExtractor {
 public:
  virtual ~EventExtractor() = default;
  // Truncates `doc` to the model's limits, keeping gold events that fit.
  virtual Document Truncated(const Document& doc) const = 0;
  // Returns the truncated document with predicted events, sorted by trigger
  // start then end.
  virtual Document Predict(const Document& doc) = 0;
  // Polarity for each event of an already truncated document, using its
  // gold trigger and arguments.
  virtual std::vector<Polarity> ClassifyGold(const Document& truncated) = 0;
  virtual void Save(const std::string& dir) const = 0;
};

class JointModel : public EventExtractor {
 public:
  // Randomly initialized from `seed`. When config.encoder_checkpoint is set
  // the encoder and its vocabulary come from there and `vocab` is ignored.
  JointModel(ModelConfig config, Vocabulary vocab, TagVocab pos_tags,
             TagVocab ner_tags, uint64_t seed);

  static std::unique_ptr<JointModel> Load(const std::string& dir);
  void Save(const std::string& dir) const override;

  PreparedDocument Prepare(const Document& doc);
  // Prepares many documents, tagging them in one batch.
  std::vector<PreparedDocument> PrepareAll(const Corpus& corpus);

  // Per-document losses. Masked components are constant zero.
  LossNodes Loss(nn::Graph& g, const PreparedDocument& p,
                 std::mt19937_64* dropout_rng, const LossMask& mask,
                 TriggerSource source = TriggerSource::kGold) const;

  // Stage-level inference over one prepared document. Spans are
  // sequence-indexed.
  class Session {
   public:
    Session(const JointModel& model, const PreparedDocument& p);
    TriggerScores Triggers();
    RoleScores Roles(SpanBounds trigger);
    PolarityProbs Sentiment(const Event& event);  // token-indexed event

   private:
    nn::Var Conditioned(SpanBounds trigger);
    const JointModel& model_;
    const PreparedDocument& p_;
    nn::Graph g_;
    nn::Var fused_;
    std::vector<std::pair<SpanBounds, nn::Var>> conditioned_;
  };

  Document Truncated(const Document& doc) const override;
  Document Predict(const Document& doc) override;
  std::vector<Polarity> ClassifyGold(const Document& truncated) override;

  nn::ParameterStore& store() { return *store_; }
  const nn::ParameterStore& store() const { return *store_; }
  const ModelConfig& config() const { return config_; }
  ModelConfig& mutable_config() { return config_; }
  const Encoder& encoder() const { return *encoder_; }
  const TagVocab& pos_tags() const { return pos_tags_; }
  const TagVocab& ner_tags() const { return ner_tags_; }

 private:
  JointModel(ModelConfig config, Vocabulary vocab, TagVocab pos_tags,
             TagVocab ner_tags, uint64_t seed, bool load_encoder);

  nn::Var Fused(nn::Graph& g, const PreparedDocument& p,
                std::mt19937_64* rng) const;
  nn::Var Conditioned(nn::Graph& g, nn::Var fused, int m, SpanBounds trigger,
                      std::mt19937_64* rng) const;
  nn::Var RoleEmbeddings(nn::Graph& g, int m, const Event& event) const;
  TaggerBackend& tagger();

  ModelConfig config_;
  std::unique_ptr<nn::ParameterStore> store_;
  std::unique_ptr<Encoder> encoder_;
  TagVocab pos_tags_;
  TagVocab ner_tags_;
  FeatureEmbeddings features_;
  TriggerHead trigger_head_;
  ArgumentHead argument_head_;
  SentimentHead sentiment_head_;
  std::unique_ptr<TaggerBackend> tagger_;
};

// Converts sequence-indexed bounds to a token-indexed span of `doc`.
Span SpanFromSequence(const Document& doc, SpanBounds bounds);

}  // namespace evsent

#endif  // EVSENT_MODEL_H_
