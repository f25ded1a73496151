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

#include "evsent/training.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evsent/config.h"
#include "evsent/pipeline.h"

namespace evsent {

using nlohmann::json;
namespace fs = std::filesystem;

json TrainConfig::ToJson() const {
  json seed_list = json::array();
  for (uint64_t s : seeds) seed_list.push_back(s);
  return json{{"model", model.ToJson()},
              {"learning_rate", learning_rate},
              {"batch_size", batch_size},
              {"epochs", epochs},
              {"seeds", seed_list},
              {"clip_norm", clip_norm},
              {"pipeline_mode", pipeline_mode},
              {"trigger_source",
               trigger_source == TriggerSource::kGold ? "gold" : "predicted"},
              {"metric_average", eval.average},
              {"strict_sentiment", eval.strict_sentiment}};
}

TrainConfig TrainConfigFrom(const Config& c) {
  TrainConfig t;
  t.model = ModelConfigFrom(c);
  const std::string& lr = c.Get("train.learning_rate");
  if (lr == "auto") {
    t.learning_rate = t.model.encoder_checkpoint.empty() ? 1e-3 : 1e-5;
  } else {
    t.learning_rate = c.GetDouble("train.learning_rate");
  }
  if (!(t.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  t.batch_size = c.GetInt("train.batch_size");
  t.epochs = c.GetInt("train.epochs");
  if (t.batch_size < 1 || t.epochs < 1) {
    throw ConfigError("train.batch_size and train.epochs must be positive");
  }
  t.seeds = c.GetSeeds("train.seeds");
  t.clip_norm = c.GetDouble("train.clip_norm");
  t.pipeline_mode = c.GetBool("train.pipeline_mode");
  const std::string& source = c.Get("train.trigger_source");
  if (source == "gold") {
    t.trigger_source = TriggerSource::kGold;
  } else if (source == "predicted") {
    t.trigger_source = TriggerSource::kPredicted;
  } else {
    throw ConfigError("train.trigger_source must be gold or predicted");
  }
  t.eval = EvalOptionsFrom(c);
  return t;
}

void BuildTagVocabs(const Corpus& corpus, TaggerBackend& tagger, TagVocab& pos,
                    TagVocab& ner) {
  std::vector<std::vector<std::string>> token_lists;
  for (const Document& doc : corpus) {
    if (!doc.tokens.empty()) token_lists.push_back(doc.tokens);
  }
  for (const TaggedTokens& tags : tagger.TagBatch(token_lists)) {
    for (const std::string& t : tags.pos) pos.Add(t);
    for (const std::string& t : tags.ner) ner.Add(t);
  }
}

std::unique_ptr<JointModel> CreateModel(const ModelConfig& config,
                                        const Corpus& train, uint64_t seed) {
  std::unique_ptr<TaggerBackend> tagger = MakeTagger(
      config.tagger_backend, config.tagger_command, config.tagger_tagset);
  TagVocab pos, ner;
  BuildTagVocabs(train, *tagger, pos, ner);
  Vocabulary vocab = config.encoder_checkpoint.empty()
                         ? Vocabulary::FromCorpus(train, config.encoder.lowercase)
                         : Vocabulary({Vocabulary::kPad, Vocabulary::kUnk,
                                       Vocabulary::kCls, Vocabulary::kSep});
  return std::make_unique<JointModel>(config, std::move(vocab), std::move(pos),
                                      std::move(ner), seed);
}

Trainer::Trainer(JointModel& model, const TrainConfig& config, uint64_t seed,
                 LossMask mask)
    : model_(model),
      config_(config),
      mask_(mask),
      adam_(nn::AdamOptions{config.learning_rate, 0.9, 0.999, 1e-8,
                            config.clip_norm}),
      rng_(seed) {
  for (nn::Parameter* p : model_.store().all()) {
    if (p->trainable) trainable_.push_back(p);
  }
}

namespace {

StepLosses Values(const nn::Graph& g, const LossNodes& l) {
  return StepLosses{g.scalar(l.total), g.scalar(l.trigger),
                    g.scalar(l.argument), g.scalar(l.sentiment)};
}

void CheckFinite(const StepLosses& l, const PreparedDocument& doc,
                 const std::vector<const PreparedDocument*>& batch, long step) {
  if (std::isfinite(l.total) && std::isfinite(l.trigger) &&
      std::isfinite(l.argument) && std::isfinite(l.sentiment)) {
    return;
  }
  std::ostringstream msg;
  msg << "non-finite loss at step " << step << " on document " << doc.doc.doc_id
      << ": total=" << l.total << " trigger=" << l.trigger
      << " argument=" << l.argument << " sentiment=" << l.sentiment
      << "; batch:";
  for (const PreparedDocument* p : batch) msg << " " << p->doc.doc_id;
  throw TrainingError(msg.str());
}

}  // namespace

StepLosses Trainer::Step(const std::vector<const PreparedDocument*>& batch) {
  if (batch.empty()) throw TrainingError("empty batch");
  for (nn::Parameter* p : trainable_) p->ZeroGrad();
  const double scale = 1.0 / static_cast<double>(batch.size());
  StepLosses mean;
  for (const PreparedDocument* doc : batch) {
    nn::Graph g;
    const LossNodes l =
        model_.Loss(g, *doc, &rng_, mask_, config_.trigger_source);
    const StepLosses v = Values(g, l);
    CheckFinite(v, *doc, batch, adam_.steps() + 1);
    if (g.requires_grad(l.total)) g.Backward(l.total, scale);
    mean.total += v.total * scale;
    mean.trigger += v.trigger * scale;
    mean.argument += v.argument * scale;
    mean.sentiment += v.sentiment * scale;
  }
  adam_.Step(trainable_);
  return mean;
}

StepLosses Trainer::Evaluate(const std::vector<const PreparedDocument*>& batch,
                             bool dropout) {
  const double scale = 1.0 / static_cast<double>(std::max<size_t>(batch.size(), 1));
  StepLosses mean;
  for (const PreparedDocument* doc : batch) {
    nn::Graph g;
    const StepLosses v = Values(
        g, model_.Loss(g, *doc, dropout ? &rng_ : nullptr, mask_,
                       config_.trigger_source));
    mean.total += v.total * scale;
    mean.trigger += v.trigger * scale;
    mean.argument += v.argument * scale;
    mean.sentiment += v.sentiment * scale;
  }
  return mean;
}

Prf ArgumentF1WithGoldTriggers(JointModel& model, const Corpus& corpus) {
  long tp = 0, fp = 0, fn = 0;
  for (const Document& doc : corpus) {
    if (doc.events.empty()) continue;
    const PreparedDocument p = model.Prepare(doc);
    if (p.doc.events.empty()) continue;
    JointModel::Session session(model, p);
    for (const Event& e : p.doc.events) {
      const RoleSpans roles = DecodeArguments(
          session.Roles({ToSequence(e.trigger.start), ToSequence(e.trigger.end)}),
          model.config().argument_decode);
      for (Role r : kAllRoles) {
        const auto& pred = roles[static_cast<size_t>(r)];
        const auto& gold = e.argument(r);
        const bool match = pred && gold &&
                           pred->first == ToSequence(gold->start) &&
                           pred->second == ToSequence(gold->end);
        if (match) {
          ++tp;
        } else {
          if (pred) ++fp;
          if (gold) ++fn;
        }
      }
    }
  }
  return Prf::FromCounts(tp, fp, fn);
}

namespace {

using Snapshot = std::vector<nn::Matrix>;

Snapshot TakeSnapshot(const nn::ParameterStore& store) {
  Snapshot s;
  for (const nn::Parameter* p : store.all()) s.push_back(p->value);
  return s;
}

void RestoreSnapshot(nn::ParameterStore& store, const Snapshot& s) {
  for (size_t i = 0; i < s.size(); ++i) store.all()[i]->value = s[i];
}

// Scores a model on dev for epoch selection.
using Selector = std::function<double(JointModel&, MetricReport&)>;

struct StageSpec {
  std::string name;
  LossMask mask;
  Selector select;
};

// Trains `model` for config.epochs and restores the best epoch's parameters.
std::vector<EpochRecord> TrainStage(JointModel& model, const TrainConfig& config,
                                    uint64_t seed, const Corpus& train,
                                    const StageSpec& stage, std::ostream* log,
                                    std::ostream* dev_log, int& best_epoch,
                                    double& best_score) {
  std::vector<PreparedDocument> prepared = model.PrepareAll(WithEvents(train));
  if (prepared.empty()) throw TrainingError("training split has no events");
  Trainer trainer(model, config, seed, stage.mask);
  std::vector<size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochRecord> records;
  Snapshot best;
  best_epoch = 0;
  best_score = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), trainer.rng());
    for (size_t b = 0; b < order.size(); b += static_cast<size_t>(config.batch_size)) {
      std::vector<const PreparedDocument*> batch;
      for (size_t i = b; i < std::min(order.size(), b + static_cast<size_t>(config.batch_size)); ++i) {
        batch.push_back(&prepared[order[i]]);
      }
      const StepLosses l = trainer.Step(batch);
      if (log != nullptr) {
        json line = {{"step", trainer.steps()}, {"epoch", epoch},
                     {"L", l.total},            {"L_t", l.trigger},
                     {"L_a", l.argument},       {"L_c", l.sentiment},
                     {"lr", config.learning_rate}};
        if (stage.name != "joint") line["stage"] = stage.name;
        *log << line.dump() << "\n";
      }
    }
    EpochRecord record;
    record.stage = stage.name;
    record.epoch = epoch;
    record.dev_score = stage.select(model, record.dev);
    if (dev_log != nullptr) {
      *dev_log << json{{"stage", stage.name},
                       {"epoch", epoch},
                       {"score", record.dev_score},
                       {"metrics", record.dev.ToJson()}}
                      .dump()
               << "\n";
    }
    if (config.progress) {
      std::ostringstream msg;
      msg << "seed " << seed << " " << stage.name << " epoch " << epoch
          << " dev score " << record.dev_score;
      config.progress(msg.str());
    }
    if (record.dev_score > best_score) {
      best_score = record.dev_score;
      best_epoch = epoch;
      best = TakeSnapshot(model.store());
    }
    records.push_back(std::move(record));
  }
  RestoreSnapshot(model.store(), best);
  return records;
}

}  // namespace

json CheckpointSet::Summary() const {
  json per_seed = json::array();
  for (const SeedResult& s : seeds) {
    per_seed.push_back({{"seed", s.seed},
                        {"best_epoch", s.best_epoch},
                        {"dev_sentiment_f1", s.best_dev_score},
                        {"checkpoint", s.checkpoint}});
  }
  return json{{"seeds", per_seed},
              {"best_seed", seeds.empty() ? json(nullptr) : json(seeds[best].seed)},
              {"best_checkpoint", best_checkpoint}};
}

CheckpointSet Train(const TrainConfig& config, const Corpus& train,
                    const Corpus& dev) {
  if (WithEvents(train).empty()) {
    throw ConfigError("training split is empty or has no event-bearing documents");
  }
  if (config.seeds.empty()) throw TrainingError("at least one seed is required");
  const bool write = !config.output_dir.empty();
  if (write) fs::create_directories(config.output_dir);

  const Selector sentiment_f1 = [&](JointModel& m, MetricReport& r) {
    r = EvaluateEndToEnd(m, dev, config.eval);
    return r.subtasks.at("sentiment").f1;
  };

  CheckpointSet set;
  for (uint64_t seed : config.seeds) {
    SeedResult result;
    result.seed = seed;
    const fs::path dir = fs::path(config.output_dir) / ("seed-" + std::to_string(seed));
    std::ofstream log, dev_log;
    if (write) {
      fs::create_directories(dir);
      log.open(dir / "train_log.jsonl");
      dev_log.open(dir / "dev.jsonl");
    }
    std::ostream* log_ptr = write ? &log : nullptr;
    std::ostream* dev_ptr = write ? &dev_log : nullptr;
    if (!config.pipeline_mode) {
      std::unique_ptr<JointModel> model = CreateModel(config.model, train, seed);
      result.epochs = TrainStage(*model, config, seed, train,
                                 {"joint", LossMask{}, sentiment_f1}, log_ptr,
                                 dev_ptr, result.best_epoch,
                                 result.best_dev_score);
      result.model = std::move(model);
    } else {
      const StageSpec stages[] = {
          {"trigger", LossMask{true, false, false},
           [&](JointModel& m, MetricReport& r) {
             r = EvaluateEndToEnd(m, dev, config.eval);
             return r.subtasks.at("trigger").f1;
           }},
          {"argument", LossMask{false, true, false},
           [&](JointModel& m, MetricReport& r) {
             r.mode = "argument-gold-triggers";
             r.subtasks["argument"] = ArgumentF1WithGoldTriggers(m, dev);
             return r.subtasks["argument"].f1;
           }},
          {"sentiment", LossMask{false, false, true},
           [&](JointModel& m, MetricReport& r) {
             r = EvaluateGoldArguments(m, dev, config.eval);
             return r.gold_arguments->accuracy;
           }}};
      TrainConfig stage_config = config;
      stage_config.trigger_source = TriggerSource::kGold;
      std::unique_ptr<JointModel> models[3];
      for (int s = 0; s < 3; ++s) {
        models[s] = CreateModel(config.model, train, seed);
        int epoch = 0;
        double score = 0.0;
        std::vector<EpochRecord> records =
            TrainStage(*models[s], stage_config, seed, train, stages[s],
                       log_ptr, dev_ptr, epoch, score);
        for (EpochRecord& r : records) result.epochs.push_back(std::move(r));
      }
      auto pipeline = std::make_unique<PipelineModel>(
          std::move(models[0]), std::move(models[1]), std::move(models[2]));
      const MetricReport report = EvaluateEndToEnd(*pipeline, dev, config.eval);
      result.best_dev_score = report.subtasks.at("sentiment").f1;
      result.best_epoch = config.epochs;
      result.model = std::move(pipeline);
    }
    if (write) {
      result.model->Save(dir.string());
      result.checkpoint = dir.string();
    }
    set.seeds.push_back(std::move(result));
  }
  for (size_t i = 1; i < set.seeds.size(); ++i) {
    if (set.seeds[i].best_dev_score > set.seeds[set.best].best_dev_score) {
      set.best = i;
    }
  }
  if (write) {
    const fs::path best = fs::path(config.output_dir) / "best";
    fs::remove_all(best);
    set.seeds[set.best].model->Save(best.string());
    set.best_checkpoint = best.string();
    std::ofstream(fs::path(config.output_dir) / "summary.json")
        << set.Summary().dump(2) << "\n";
  }
  return set;
}

// ---------------------------------------------------------------------------
// Gradient checks.

namespace {

using LossBuilder = std::function<nn::Var(nn::Graph&)>;

double InfNorm(const nn::Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

GradCheckReport RunCheck(const std::string& module, double tolerance,
                         nn::ParameterStore& store, const LossBuilder& build,
                         bool finite_only) {
  GradCheckReport report;
  report.module = module;
  report.tolerance = tolerance;
  store.ZeroGrad();
  {
    nn::Graph g;
    nn::Var loss = build(g);
    if (g.requires_grad(loss)) g.Backward(loss);
  }
  bool all_finite = true;
  const double h = 1e-5;
  for (nn::Parameter* p : store.all()) {
    GradCheckEntry entry;
    entry.tensor = p->name;
    entry.size = p->value.size();
    entry.finite = p->grad.allFinite();
    entry.analytic_norm = InfNorm(p->grad);
    all_finite = all_finite && entry.finite;
    if (!finite_only) {
      nn::Matrix numeric(p->value.rows(), p->value.cols());
      for (Eigen::Index i = 0; i < p->value.size(); ++i) {
        const double original = p->value.data()[i];
        p->value.data()[i] = original + h;
        nn::Graph gp;
        const double up = gp.scalar(build(gp));
        p->value.data()[i] = original - h;
        nn::Graph gm;
        const double down = gm.scalar(build(gm));
        p->value.data()[i] = original;
        numeric.data()[i] = (up - down) / (2 * h);
      }
      const double scale =
          std::max({InfNorm(p->grad), InfNorm(numeric), 1e-6});
      entry.deviation = InfNorm(p->grad - numeric) / scale;
      report.max_deviation = std::max(report.max_deviation, entry.deviation);
    }
    report.tensors.push_back(entry);
  }
  report.passed = all_finite && (finite_only || report.max_deviation <= tolerance);
  return report;
}

void Randomize(nn::ParameterStore& store, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (nn::Parameter* p : store.all()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = u(rng);
  }
}

nn::Matrix RandomMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Document TinyDocument() {
  Document doc;
  doc.doc_id = "gradcheck";
  doc.tokens = {"Acme", "profit", "rose", "sharply"};
  doc.text = "Acme profit rose sharply";
  doc.sentence_boundaries = {0};
  Event e;
  e.trigger = MakeSpan(doc, 2, 2);
  e.argument(Role::kSubject) = MakeSpan(doc, 0, 1);
  e.argument(Role::kTime) = MakeSpan(doc, 3, 3);
  e.polarity = Polarity::kPositive;
  doc.events.push_back(e);
  Event f;
  f.trigger = MakeSpan(doc, 3, 3);
  f.argument(Role::kObject) = MakeSpan(doc, 0, 0);
  f.polarity = Polarity::kNegative;
  doc.events.push_back(f);
  return doc;
}

ModelConfig TinyModelConfig() {
  ModelConfig c;
  c.encoder.hidden_size = 8;
  c.encoder.num_layers = 2;
  c.encoder.num_heads = 2;
  c.encoder.intermediate_size = 8;
  c.encoder.max_positions = 8;
  c.encoder.dropout = 0.0;
  c.feature_dim = 4;
  c.position_radius = 4;
  c.head_dim = 8;
  c.dropout = 0.0;
  return c;
}

}  // namespace

const std::vector<std::string>& GradCheckModules() {
  static const std::vector<std::string> modules = {
      "classifier", "trigger", "argument", "sentiment", "encoder", "full", "zero"};
  return modules;
}

GradCheckReport GradientCheck(const std::string& module, double tolerance,
                              uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (module == "classifier") {
    nn::ParameterStore store;
    SentimentHead head = SentimentHead::Create(store, 3, 2, rng);
    Randomize(store, rng);
    const nn::Matrix v = RandomMatrix(1, 5, rng);
    return RunCheck(module, tolerance, store, [&](nn::Graph& g) {
      return nn::SoftmaxCrossEntropy(g, head.Logits(g, g.Constant(v)), 1);
    }, false);
  }
  if (module == "trigger") {
    nn::ParameterStore store;
    TriggerHead head = TriggerHead::Create(store, 4, 2, 6, rng);
    nn::Parameter& pos = store.CreateNormal("features.pos", 5, 2, 0.5, rng);
    nn::Parameter& ner = store.CreateNormal("features.ner", 4, 2, 0.5, rng);
    Randomize(store, rng);
    const nn::Matrix encoded = RandomMatrix(6, 4, rng);
    const std::vector<int> pos_ids = {0, 2, 3, 4, 2, 0};
    const std::vector<int> ner_ids = {0, 1, 2, 3, 1, 0};
    nn::Matrix ys = nn::Matrix::Zero(6, 1), ye = nn::Matrix::Zero(6, 1);
    ys(2, 0) = 1;
    ye(3, 0) = 1;
    return RunCheck(module, tolerance, store, [&](nn::Graph& g) {
      nn::Var fused = head.Fuse(g, g.Constant(encoded),
                                nn::GatherRows(g, g.Param(pos), pos_ids),
                                nn::GatherRows(g, g.Param(ner), ner_ids), 0.0,
                                nullptr);
      return TriggerLossNode(g, head.StartLogits(g, fused),
                             head.EndLogits(g, fused), ys, ye);
    }, false);
  }
  if (module == "argument" || module == "sentiment") {
    nn::ParameterStore store;
    ArgumentHead head = ArgumentHead::Create(store, 6, 2, rng);
    nn::Parameter& position = store.CreateNormal("features.position", 7, 2, 0.5, rng);
    nn::Parameter& role = store.CreateNormal("features.role", kNumRoleIds, 2, 0.5, rng);
    SentimentHead sentiment = SentimentHead::Create(store, 6, 2, rng);
    Randomize(store, rng);
    const nn::Matrix fused = RandomMatrix(6, 6, rng);
    const std::vector<int> position_ids = RelativePositionIds(6, 2, 3);
    const std::vector<int> role_ids = {0, 2, 1, 1, 3, 0};
    RoleTargets targets{nn::Matrix::Zero(6, kNumRoles), nn::Matrix::Zero(6, kNumRoles)};
    targets.start(1, 0) = targets.end(1, 0) = 1;
    targets.start(4, 1) = targets.end(4, 1) = 1;
    const bool arguments = module == "argument";
    return RunCheck(module, tolerance, store, [&](nn::Graph& g) {
      nn::Var cond = head.Condition(g, g.Constant(fused), 2, 3,
                                    nn::GatherRows(g, g.Param(position), position_ids),
                                    true, 0.0, nullptr);
      if (arguments) {
        return ArgumentLossNode(g, head.StartLogits(g, cond), head.EndLogits(g, cond),
                                targets);
      }
      nn::Var v = SentimentHead::EventRepresentation(
          g, cond, nn::GatherRows(g, g.Param(role), role_ids));
      return nn::SoftmaxCrossEntropy(g, sentiment.Logits(g, v), 2);
    }, false);
  }
  if (module == "encoder") {
    nn::ParameterStore store;
    EncoderConfig config = TinyModelConfig().encoder;
    Encoder encoder(config, Vocabulary({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "a", "b", "c"}),
                    store, rng);
    Randomize(store, rng);
    const EncoderInput input = encoder.Prepare({"a", "c", "b", "z"});
    const nn::Matrix probe = RandomMatrix(6, config.hidden_size, rng);
    return RunCheck(module, tolerance, store, [&](nn::Graph& g) {
      nn::Var out = encoder.Encode(g, input, nullptr);
      return nn::Sum(g, nn::CwiseProduct(g, nn::Tanh(g, out), g.Constant(probe)));
    }, false);
  }
  if (module == "full" || module == "zero") {
    const Corpus corpus = {TinyDocument()};
    std::unique_ptr<JointModel> model = CreateModel(TinyModelConfig(), corpus, seed);
    if (module == "zero") {
      model->store().SetAll(0.0);
    } else {
      Randomize(model->store(), rng);
    }
    const PreparedDocument p = model->Prepare(corpus.front());
    return RunCheck(module, tolerance, model->store(), [&](nn::Graph& g) {
      return model->Loss(g, p, nullptr, LossMask{}).total;
    }, module == "zero");
  }
  throw std::invalid_argument("unknown gradient check module '" + module + "'");
}

json GradCheckReport::ToJson() const {
  json tensors_json = json::array();
  for (const GradCheckEntry& e : tensors) {
    tensors_json.push_back({{"tensor", e.tensor},
                            {"size", e.size},
                            {"deviation", e.deviation},
                            {"analytic_inf_norm", e.analytic_norm},
                            {"finite", e.finite}});
  }
  return json{{"module", module},
              {"tolerance", tolerance},
              {"max_deviation", max_deviation},
              {"passed", passed},
              {"tensors", tensors_json}};
}

}  // namespace evsent
