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

#include "evsent/model.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "evsent/nn/tensor_file.h"

namespace evsent {

using nlohmann::json;
namespace fs = std::filesystem;

json ModelConfig::ToJson() const {
  return json{{"encoder", encoder.ToJson()},
              {"encoder_checkpoint", encoder_checkpoint},
              {"freeze_layers", freeze_layers},
              {"feature_dim", feature_dim},
              {"position_radius", position_radius},
              {"head_dim", head_dim},
              {"dropout", dropout},
              {"use_features", use_features},
              {"use_trigger_info", use_trigger_info},
              {"use_argument_info", use_argument_info},
              {"trigger_threshold", trigger_decode.threshold},
              {"trigger_max_length", trigger_decode.max_length},
              {"argument_threshold", argument_decode.threshold},
              {"argument_max_length", argument_decode.max_length},
              {"max_seq_len", max_seq_len},
              {"trigger_positive_weight", trigger_positive_weight},
              {"tagger_backend", tagger_backend},
              {"tagger_command", tagger_command},
              {"tagger_tagset", tagger_tagset}};
}

ModelConfig ModelConfig::FromJson(const json& j) {
  ModelConfig c;
  if (j.contains("encoder")) c.encoder = EncoderConfig::FromJson(j.at("encoder"));
  c.encoder_checkpoint = j.value("encoder_checkpoint", c.encoder_checkpoint);
  c.freeze_layers = j.value("freeze_layers", c.freeze_layers);
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.position_radius = j.value("position_radius", c.position_radius);
  c.head_dim = j.value("head_dim", c.head_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.use_features = j.value("use_features", c.use_features);
  c.use_trigger_info = j.value("use_trigger_info", c.use_trigger_info);
  c.use_argument_info = j.value("use_argument_info", c.use_argument_info);
  c.trigger_decode.threshold =
      j.value("trigger_threshold", c.trigger_decode.threshold);
  c.trigger_decode.max_length =
      j.value("trigger_max_length", c.trigger_decode.max_length);
  c.argument_decode.threshold =
      j.value("argument_threshold", c.argument_decode.threshold);
  c.argument_decode.max_length =
      j.value("argument_max_length", c.argument_decode.max_length);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.trigger_positive_weight =
      j.value("trigger_positive_weight", c.trigger_positive_weight);
  c.tagger_backend = j.value("tagger_backend", c.tagger_backend);
  c.tagger_command = j.value("tagger_command", c.tagger_command);
  c.tagger_tagset = j.value("tagger_tagset", c.tagger_tagset);
  return c;
}

JointModel::JointModel(ModelConfig config, Vocabulary vocab, TagVocab pos_tags,
                       TagVocab ner_tags, uint64_t seed)
    : JointModel(std::move(config), std::move(vocab), std::move(pos_tags),
                 std::move(ner_tags), seed, true) {}

JointModel::JointModel(ModelConfig config, Vocabulary vocab, TagVocab pos_tags,
                       TagVocab ner_tags, uint64_t seed, bool load_encoder)
    : config_(std::move(config)),
      store_(std::make_unique<nn::ParameterStore>()),
      pos_tags_(std::move(pos_tags)),
      ner_tags_(std::move(ner_tags)) {
  std::mt19937_64 rng(seed);
  if (load_encoder && !config_.encoder_checkpoint.empty()) {
    encoder_ = std::make_unique<Encoder>(
        Encoder::LoadPretrained(config_.encoder_checkpoint, *store_));
    config_.encoder = encoder_->config();
  } else {
    encoder_ = std::make_unique<Encoder>(config_.encoder, std::move(vocab),
                                         *store_, rng);
  }
  encoder_->FreezeLayers(config_.freeze_layers);
  const int h = encoder_->hidden_size();
  const int d = config_.head_dim > 0 ? config_.head_dim : h;
  const int f = config_.feature_dim;
  features_ = FeatureEmbeddings::Create(*store_, pos_tags_.size(),
                                        ner_tags_.size(), f,
                                        config_.position_radius, rng);
  trigger_head_ = TriggerHead::Create(*store_, h, f, d, rng);
  argument_head_ = ArgumentHead::Create(*store_, d, f, rng);
  sentiment_head_ = SentimentHead::Create(*store_, d, f, rng);
}

void JointModel::Save(const std::string& dir) const {
  fs::create_directories(dir);
  const fs::path root(dir);
  json roles = json::array();
  for (Role r : kAllRoles) roles.push_back(std::string(RoleName(r)));
  json meta = {{"version", kModelCheckpointVersion},
               {"kind", "joint"},
               {"config", config_.ToJson()},
               {"class_order", {"P", "N", "O"}},
               {"roles", roles},
               {"vocab_size", encoder_->vocab().size()}};
  std::ofstream(root / "model.json") << meta.dump(2) << "\n";
  encoder_->vocab().Save((root / "vocab.txt").string());
  pos_tags_.Save((root / "pos_tags.json").string());
  ner_tags_.Save((root / "ner_tags.json").string());
  nn::SaveParameters(*store_, (root / "weights.bin").string());
}

std::unique_ptr<JointModel> JointModel::Load(const std::string& dir) {
  const fs::path root(dir);
  const fs::path meta_path = root / "model.json";
  if (!fs::exists(meta_path)) {
    throw ModelError("model checkpoint not found: " + meta_path.string());
  }
  json meta;
  try {
    std::ifstream in(meta_path);
    meta = json::parse(in);
  } catch (const json::exception& ex) {
    throw ModelError(meta_path.string() + ": " + ex.what());
  }
  if (meta.value("version", -1) != kModelCheckpointVersion) {
    throw ModelError(meta_path.string() + ": missing or unsupported version");
  }
  if (meta.value("kind", "") != "joint") {
    throw ModelError(meta_path.string() + ": not a joint model checkpoint");
  }
  if (meta.value("class_order", json::array()) != json({"P", "N", "O"})) {
    throw ModelError(meta_path.string() + ": unexpected class order");
  }
  ModelConfig config = ModelConfig::FromJson(meta.at("config"));
  Vocabulary vocab = Vocabulary::Load((root / "vocab.txt").string());
  TagVocab pos = TagVocab::Load((root / "pos_tags.json").string());
  TagVocab ner = TagVocab::Load((root / "ner_tags.json").string());
  std::unique_ptr<JointModel> model(
      new JointModel(std::move(config), std::move(vocab), std::move(pos),
                     std::move(ner), 0, false));
  nn::LoadParameters(*model->store_, (root / "weights.bin").string());
  return model;
}

TaggerBackend& JointModel::tagger() {
  if (!tagger_) {
    tagger_ = MakeTagger(config_.tagger_backend, config_.tagger_command,
                         config_.tagger_tagset);
  }
  return *tagger_;
}

Document JointModel::Truncated(const Document& doc) const {
  Document d = doc;
  const int fits = encoder_->MaxFittingWords(d.tokens, config_.max_seq_len);
  if (fits < d.num_tokens()) Truncate(d, fits);
  return d;
}

namespace {

void PadFeatures(TokenFeatures& f, int m) {
  if (static_cast<int>(f.pos_ids.size()) != m) f.pos_ids.assign(m, kPadTagId);
  if (static_cast<int>(f.ner_ids.size()) != m) f.ner_ids.assign(m, kPadTagId);
}

}  // namespace

PreparedDocument JointModel::Prepare(const Document& doc) {
  PreparedDocument p;
  p.doc = Truncated(doc);
  p.features = Tag(p.doc, tagger(), pos_tags_, ner_tags_);
  p.input = encoder_->Prepare(p.doc.tokens);
  p.labels = BuildLabelTensors(p.doc);
  PadFeatures(p.features, p.length());
  return p;
}

std::vector<PreparedDocument> JointModel::PrepareAll(const Corpus& corpus) {
  std::vector<PreparedDocument> out(corpus.size());
  std::vector<std::vector<std::string>> token_lists;
  for (size_t i = 0; i < corpus.size(); ++i) {
    out[i].doc = Truncated(corpus[i]);
    token_lists.push_back(out[i].doc.tokens);
  }
  std::vector<TaggedTokens> tags = tagger().TagBatch(token_lists);
  for (size_t i = 0; i < corpus.size(); ++i) {
    PreparedDocument& p = out[i];
    if (!p.doc.tokens.empty()) {
      p.features = ToFeatureIds(tags[i], pos_tags_, ner_tags_);
    }
    p.input = encoder_->Prepare(p.doc.tokens);
    p.labels = BuildLabelTensors(p.doc);
    PadFeatures(p.features, p.length());
  }
  return out;
}

nn::Var JointModel::Fused(nn::Graph& g, const PreparedDocument& p,
                          std::mt19937_64* rng) const {
  const int m = p.length();
  nn::Var encoded = encoder_->Encode(g, p.input, rng);
  nn::Var pos, ner;
  if (config_.use_features) {
    pos = nn::GatherRows(g, g.Param(*features_.pos), p.features.pos_ids);
    ner = nn::GatherRows(g, g.Param(*features_.ner), p.features.ner_ids);
  } else {
    pos = g.Constant(nn::Matrix::Zero(m, features_.dim));
    ner = pos;
  }
  return trigger_head_.Fuse(g, encoded, pos, ner, config_.dropout, rng);
}

nn::Var JointModel::Conditioned(nn::Graph& g, nn::Var fused, int m,
                                SpanBounds trigger,
                                std::mt19937_64* rng) const {
  nn::Var position = nn::GatherRows(
      g, g.Param(*features_.position),
      RelativePositionIds(m, trigger.first, features_.radius));
  return argument_head_.Condition(g, fused, trigger.first, trigger.second,
                                  position, config_.use_trigger_info,
                                  config_.dropout, rng);
}

nn::Var JointModel::RoleEmbeddings(nn::Graph& g, int m,
                                   const Event& event) const {
  if (!config_.use_argument_info) {
    return g.Constant(nn::Matrix::Zero(m, features_.dim));
  }
  return nn::GatherRows(g, g.Param(*features_.role), RoleIds(m, event, 1));
}

namespace {

nn::Var Mean(nn::Graph& g, const std::vector<nn::Var>& terms) {
  nn::Var total = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) total = nn::Add(g, total, terms[i]);
  return nn::Scale(g, total, 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

LossNodes JointModel::Loss(nn::Graph& g, const PreparedDocument& p,
                           std::mt19937_64* dropout_rng, const LossMask& mask,
                           TriggerSource source) const {
  const int m = p.length();
  const nn::Var zero = g.Constant(nn::Matrix::Zero(1, 1));
  LossNodes out{zero, zero, zero, zero};
  nn::Var fused = Fused(g, p, dropout_rng);
  nn::Var start_logits, end_logits;
  if (mask.trigger || source == TriggerSource::kPredicted) {
    start_logits = trigger_head_.StartLogits(g, fused);
    end_logits = trigger_head_.EndLogits(g, fused);
  }
  if (mask.trigger) {
    out.trigger = TriggerLossNode(g, start_logits, end_logits,
                                  p.labels.trigger_start, p.labels.trigger_end,
                                  config_.trigger_positive_weight);
  }
  if (mask.argument || mask.sentiment) {
    struct Target {
      SpanBounds trigger;
      int gold = -1;  // index into p.doc.events
    };
    std::vector<Target> targets;
    if (source == TriggerSource::kGold) {
      for (size_t k = 0; k < p.doc.events.size(); ++k) {
        const Span& t = p.doc.events[k].trigger;
        targets.push_back(
            {{ToSequence(t.start), ToSequence(t.end)}, static_cast<int>(k)});
      }
    } else {
      const TriggerScores scores =
          ScoreTriggers(g.value(start_logits), g.value(end_logits));
      for (SpanBounds b : DecodeTriggerSpans(scores, config_.trigger_decode)) {
        Target t{b, -1};
        for (size_t k = 0; k < p.doc.events.size(); ++k) {
          const Span& gold = p.doc.events[k].trigger;
          if (ToSequence(gold.start) == b.first &&
              ToSequence(gold.end) == b.second) {
            t.gold = static_cast<int>(k);
            break;
          }
        }
        targets.push_back(t);
      }
    }
    const RoleTargets empty{nn::Matrix::Zero(m, kNumRoles),
                            nn::Matrix::Zero(m, kNumRoles)};
    std::vector<nn::Var> argument_terms, sentiment_terms;
    for (const Target& t : targets) {
      nn::Var cond = Conditioned(g, fused, m, t.trigger, dropout_rng);
      if (mask.argument) {
        const RoleTargets& rt =
            t.gold >= 0 ? p.labels.roles[static_cast<size_t>(t.gold)] : empty;
        argument_terms.push_back(
            ArgumentLossNode(g, argument_head_.StartLogits(g, cond),
                             argument_head_.EndLogits(g, cond), rt));
      }
      if (mask.sentiment && t.gold >= 0) {
        const Event& event = p.doc.events[static_cast<size_t>(t.gold)];
        nn::Var v = SentimentHead::EventRepresentation(
            g, cond, RoleEmbeddings(g, m, event));
        sentiment_terms.push_back(nn::SoftmaxCrossEntropy(
            g, sentiment_head_.Logits(g, v),
            p.labels.polarity_ids[static_cast<size_t>(t.gold)]));
      }
    }
    if (!argument_terms.empty()) out.argument = Mean(g, argument_terms);
    if (!sentiment_terms.empty()) out.sentiment = Mean(g, sentiment_terms);
  }
  out.total = nn::Add(g, nn::Add(g, out.trigger, out.argument), out.sentiment);
  return out;
}

JointModel::Session::Session(const JointModel& model, const PreparedDocument& p)
    : model_(model), p_(p) {
  fused_ = model_.Fused(g_, p_, nullptr);
}

TriggerScores JointModel::Session::Triggers() {
  return ScoreTriggers(g_.value(model_.trigger_head_.StartLogits(g_, fused_)),
                       g_.value(model_.trigger_head_.EndLogits(g_, fused_)));
}

nn::Var JointModel::Session::Conditioned(SpanBounds trigger) {
  for (const auto& [bounds, var] : conditioned_) {
    if (bounds == trigger) return var;
  }
  nn::Var cond = model_.Conditioned(g_, fused_, p_.length(), trigger, nullptr);
  conditioned_.emplace_back(trigger, cond);
  return cond;
}

RoleScores JointModel::Session::Roles(SpanBounds trigger) {
  nn::Var cond = Conditioned(trigger);
  return ScoreArguments(
      g_.value(model_.argument_head_.StartLogits(g_, cond)),
      g_.value(model_.argument_head_.EndLogits(g_, cond)));
}

PolarityProbs JointModel::Session::Sentiment(const Event& event) {
  nn::Var cond = Conditioned(
      {ToSequence(event.trigger.start), ToSequence(event.trigger.end)});
  nn::Var v = SentimentHead::EventRepresentation(
      g_, cond, model_.RoleEmbeddings(g_, p_.length(), event));
  return Classify(g_.value(model_.sentiment_head_.Logits(g_, v)));
}

Span SpanFromSequence(const Document& doc, SpanBounds bounds) {
  return MakeSpan(doc, FromSequence(bounds.first), FromSequence(bounds.second));
}

Document JointModel::Predict(const Document& doc) {
  const PreparedDocument p = Prepare(doc);
  Document out = p.doc;
  out.events.clear();
  if (p.doc.tokens.empty()) return out;
  Session session(*this, p);
  std::vector<SpanBounds> triggers =
      DecodeTriggerSpans(session.Triggers(), config_.trigger_decode);
  std::sort(triggers.begin(), triggers.end());
  triggers.erase(std::unique(triggers.begin(), triggers.end()), triggers.end());
  for (SpanBounds t : triggers) {
    Event event;
    event.trigger = SpanFromSequence(p.doc, t);
    const RoleSpans roles =
        DecodeArguments(session.Roles(t), config_.argument_decode);
    for (int r = 0; r < kNumRoles; ++r) {
      if (roles[static_cast<size_t>(r)]) {
        event.arguments[static_cast<size_t>(r)] =
            SpanFromSequence(p.doc, *roles[static_cast<size_t>(r)]);
      }
    }
    event.polarity = ArgmaxPolarity(session.Sentiment(event));
    out.events.push_back(std::move(event));
  }
  return out;
}

std::vector<Polarity> JointModel::ClassifyGold(const Document& truncated) {
  std::vector<Polarity> out;
  if (truncated.events.empty()) return out;
  const PreparedDocument p = Prepare(truncated);
  Session session(*this, p);
  for (const Event& e : p.doc.events) {
    out.push_back(ArgmaxPolarity(session.Sentiment(e)));
  }
  return out;
}

}  // namespace evsent
