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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "evsent/config.h"
#include "evsent/synthetic.h"
#include "test_util.h"

namespace evsent {
namespace {

TEST(GradientCheckTest, LinearClassifierIsExact) {
  GradCheckReport r = GradientCheck("classifier", 1e-6, 1);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_deviation, 1e-6);
}

class GradientCheckModuleTest : public ::testing::TestWithParam<std::string> {};

TEST_P(GradientCheckModuleTest, WithinTolerance) {
  GradCheckReport r = GradientCheck(GetParam(), 1e-4, 1);
  EXPECT_TRUE(r.passed) << r.ToJson().dump(2);
  EXPECT_FALSE(r.tensors.empty());
}

INSTANTIATE_TEST_SUITE_P(Heads, GradientCheckModuleTest,
                         ::testing::Values("trigger", "argument", "sentiment",
                                           "encoder", "full", "zero"));

TEST(GradientCheckTest, ZeroModelGradientsFinite) {
  GradCheckReport r = GradientCheck("zero", 1e-4, 1);
  for (const GradCheckEntry& e : r.tensors) EXPECT_TRUE(e.finite) << e.tensor;
}

TEST(GradientCheckTest, FailingReportListsTensors) {
  GradCheckReport r = GradientCheck("full", 0.0, 1);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.tensors.empty());
  EXPECT_THROW(GradientCheck("nope", 1e-4, 1), std::invalid_argument);
}

TrainConfig TinyTrainConfig() {
  TrainConfig t;
  t.model.encoder.hidden_size = 16;
  t.model.encoder.num_layers = 1;
  t.model.encoder.num_heads = 2;
  t.model.encoder.intermediate_size = 32;
  t.model.feature_dim = 8;
  t.model.position_radius = 16;
  t.epochs = 2;
  t.seeds = {3};
  return t;
}

Corpus Synthetic(int n, uint64_t seed) {
  SynthConfig s;
  s.num_documents = n;
  return GenerateSynthetic(s, seed);
}

TEST(TrainTest, SeedDeterminism) {
  testing_util::TempDir a("train"), b("train");
  const Corpus train = Synthetic(40, 1), dev = Synthetic(10, 2);
  TrainConfig config = TinyTrainConfig();
  config.output_dir = a.path().string();
  Train(config, train, dev);
  config.output_dir = b.path().string();
  Train(config, train, dev);
  EXPECT_EQ(testing_util::ReadFile(a.File("seed-3/train_log.jsonl")),
            testing_util::ReadFile(b.File("seed-3/train_log.jsonl")));
  EXPECT_FALSE(testing_util::ReadFile(a.File("seed-3/train_log.jsonl")).empty());
  EXPECT_EQ(testing_util::ReadFile(a.File("best/weights.bin")),
            testing_util::ReadFile(b.File("best/weights.bin")));
  EXPECT_TRUE(std::filesystem::exists(a.File("summary.json")));
}

TEST(TrainTest, LossDecreases) {
  const Corpus train = WithEvents(Synthetic(30, 1));
  TrainConfig config = TinyTrainConfig();
  std::unique_ptr<JointModel> model = CreateModel(config.model, train, 1);
  std::vector<PreparedDocument> prepared = model->PrepareAll(train);
  std::vector<const PreparedDocument*> batch;
  for (const PreparedDocument& p : prepared) batch.push_back(&p);
  Trainer trainer(*model, config, 1);
  const double before = trainer.Evaluate(batch).total;
  for (int step = 0; step < 30; ++step) trainer.Step(batch);
  EXPECT_LT(trainer.Evaluate(batch).total, 0.5 * before);
  EXPECT_EQ(trainer.steps(), 30);
}

TEST(TrainTest, NonFiniteLossAborts) {
  const Corpus train = WithEvents(Synthetic(5, 1));
  TrainConfig config = TinyTrainConfig();
  std::unique_ptr<JointModel> model = CreateModel(config.model, train, 1);
  model->store().Get("trigger.start.bias").value(0, 0) = std::nan("");
  std::vector<PreparedDocument> prepared = model->PrepareAll(train);
  Trainer trainer(*model, config, 1);
  try {
    trainer.Step({&prepared[0]});
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find(prepared[0].doc.doc_id), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("trigger"), std::string::npos);
  }
}

TEST(TrainTest, EmptyTrainSplitIsConfigError) {
  EXPECT_THROW(Train(TinyTrainConfig(), {}, Synthetic(5, 2)), ConfigError);
}

TEST(TrainTest, PipelineModeTrainsThreeStages) {
  testing_util::TempDir dir("pipeline");
  TrainConfig config = TinyTrainConfig();
  config.epochs = 1;
  config.pipeline_mode = true;
  config.output_dir = dir.path().string();
  CheckpointSet result = Train(config, Synthetic(30, 1), Synthetic(8, 2));
  ASSERT_EQ(result.seeds.size(), 1u);
  std::set<std::string> stages;
  for (const EpochRecord& e : result.seeds[0].epochs) stages.insert(e.stage);
  EXPECT_EQ(stages.size(), 3u);
  for (const char* sub : {"pipeline.json", "trigger", "argument", "sentiment"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "best" / sub)) << sub;
  }
}

TEST(TrainConfigTest, LearningRateAuto) {
  Config c = Config::Defaults();
  EXPECT_DOUBLE_EQ(TrainConfigFrom(c).learning_rate, 1e-3);
  c.Set("encoder.checkpoint", "/some/bert");
  EXPECT_DOUBLE_EQ(TrainConfigFrom(c).learning_rate, 1e-5);
  c.Set("train.learning_rate", "0.01");
  EXPECT_DOUBLE_EQ(TrainConfigFrom(c).learning_rate, 0.01);
}

}  // namespace
}  // namespace evsent
