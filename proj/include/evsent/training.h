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

// Joint training under L = L_t + L_a + L_c with Adam, per-epoch dev selection,
// per-seed checkpoints, the pipeline ablation and finite-difference gradient
// checks.
//
// Output directory layout:
//   seed-<s>/            best checkpoint of that seed
//   seed-<s>/train_log.jsonl   one {step, L, L_t, L_a, L_c, lr, epoch} per step
//   seed-<s>/dev.jsonl         dev metrics per epoch
//   best/                copy of the best seed's checkpoint
//   summary.json

#ifndef EVSENT_TRAINING_H_
#define EVSENT_TRAINING_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/evaluation.h"
#include "evsent/model.h"
#include "evsent/nn/optimizer.h"
#include "json.hpp"

namespace evsent {

class Config;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-3;
  int batch_size = 8;
  int epochs = 10;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  double clip_norm = 1.0;
  bool pipeline_mode = false;
  TriggerSource trigger_source = TriggerSource::kGold;
  EvalOptions eval;
  std::string output_dir;  // empty: nothing is written
  // Called after every epoch; for progress reporting.
  std::function<void(const std::string&)> progress;

  nlohmann::json ToJson() const;
};

// "auto" learning rate resolves to 1e-5 with a pre-trained encoder, 1e-3
// otherwise.
TrainConfig TrainConfigFrom(const Config& config);

struct StepLosses {
  double total = 0.0;
  double trigger = 0.0;
  double argument = 0.0;
  double sentiment = 0.0;
};

// Builds POS/NER vocabularies from the tags `tagger` assigns to `corpus`.
void BuildTagVocabs(const Corpus& corpus, TaggerBackend& tagger,
                    TagVocab& pos, TagVocab& ner);

// Creates a randomly initialized model for `train` (vocabularies included).
std::unique_ptr<JointModel> CreateModel(const ModelConfig& config,
                                        const Corpus& train, uint64_t seed);

// Owns the optimizer state for one model.
class Trainer {
 public:
  Trainer(JointModel& model, const TrainConfig& config, uint64_t seed,
          LossMask mask = {});

  // One Adam update on the documents of `batch`; losses are batch means.
  // Throws TrainingError with diagnostics on a non-finite loss.
  StepLosses Step(const std::vector<const PreparedDocument*>& batch);
  // Forward only, no update.
  StepLosses Evaluate(const std::vector<const PreparedDocument*>& batch,
                      bool dropout = false);

  long steps() const { return adam_.steps(); }
  std::mt19937_64& rng() { return rng_; }

 private:
  JointModel& model_;
  const TrainConfig& config_;
  LossMask mask_;
  nn::Adam adam_;
  std::mt19937_64 rng_;
  std::vector<nn::Parameter*> trainable_;
};

struct EpochRecord {
  std::string stage;  // "joint", or a pipeline stage name
  int epoch = 0;
  double dev_score = 0.0;
  MetricReport dev;
};

struct SeedResult {
  uint64_t seed = 0;
  int best_epoch = 0;
  double best_dev_score = -1.0;
  std::vector<EpochRecord> epochs;
  std::string checkpoint;  // directory, empty when not written
  std::unique_ptr<EventExtractor> model;  // best-epoch model
};

struct CheckpointSet {
  std::vector<SeedResult> seeds;
  size_t best = 0;  // index into seeds
  std::string best_checkpoint;
  nlohmann::json Summary() const;
};

// Trains one model per seed (three chained models in pipeline mode) and
// selects, per seed and across seeds, by dev end-to-end sentiment F1; ties go
// to the earlier epoch or seed.
CheckpointSet Train(const TrainConfig& config, const Corpus& train,
                    const Corpus& dev);

// Argument F1 (all roles pooled) when decoding with gold triggers.
Prf ArgumentF1WithGoldTriggers(JointModel& model, const Corpus& corpus);

struct GradCheckEntry {
  std::string tensor;
  long size = 0;
  double deviation = 0.0;
  double analytic_norm = 0.0;
  bool finite = true;
};

struct GradCheckReport {
  std::string module;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  bool passed = false;
  std::vector<GradCheckEntry> tensors;
  nlohmann::json ToJson() const;
};

// Modules: classifier, trigger, argument, sentiment, encoder, full, zero.
// Deviation per tensor is ||a - n||_inf / max(||a||_inf, ||n||_inf, 1e-6)
// with central differences; "zero" runs the full model with all parameters
// zero and checks only that gradients are finite.
GradCheckReport GradientCheck(const std::string& module, double tolerance,
                              uint64_t seed);
const std::vector<std::string>& GradCheckModules();

}  // namespace evsent

#endif  // EVSENT_TRAINING_H_
