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

#include "evsent/config.h"

#include <gtest/gtest.h>

#include <cstdlib>

#include "test_util.h"

namespace evsent {
namespace {

TEST(ConfigTest, Defaults) {
  Config c = Config::Defaults();
  EXPECT_EQ(c.GetInt("train.batch_size"), 8);
  EXPECT_EQ(c.Get("train.learning_rate"), "auto");
  EXPECT_EQ(c.GetSeeds("train.seeds"), (std::vector<uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.SourceOf("seed"), "default");
  EXPECT_EQ(c.GetInt("features.dim"), 128);
}

TEST(ConfigTest, Precedence) {
  testing_util::TempDir dir("config");
  testing_util::WriteFile(dir.File("c.cfg"),
                          "# comment\n"
                          "train.batch_size = 4   # trailing\n"
                          "train.epochs = 3\n"
                          "seed = 99\n");
  ::setenv("EVSENT_TRAIN_EPOCHS", "5", 1);
  ::setenv("EVSENT_SEED", "100", 1);
  Config c = Config::Defaults();
  c.LoadFile(dir.File("c.cfg"));
  c.ApplyEnvironment();
  c.Set("seed", "7");
  ::unsetenv("EVSENT_TRAIN_EPOCHS");
  ::unsetenv("EVSENT_SEED");
  EXPECT_EQ(c.GetInt("train.batch_size"), 4);
  EXPECT_EQ(c.SourceOf("train.batch_size"), "file");
  EXPECT_EQ(c.GetInt("train.epochs"), 5);
  EXPECT_EQ(c.SourceOf("train.epochs"), "env");
  EXPECT_EQ(c.GetUint64("seed"), 7u);
  EXPECT_EQ(c.SourceOf("seed"), "flag");
}

TEST(ConfigTest, EnvironmentNames) {
  EXPECT_EQ(Config::EnvironmentName("train.batch_size"), "EVSENT_TRAIN_BATCH_SIZE");
  EXPECT_EQ(Config::EnvironmentName("decode.trigger.threshold"),
            "EVSENT_DECODE_TRIGGER_THRESHOLD");
}

TEST(ConfigTest, Errors) {
  Config c = Config::Defaults();
  EXPECT_THROW(c.Set("no.such.key", "1"), ConfigError);
  c.Set("train.batch_size", "many");
  EXPECT_THROW(c.GetInt("train.batch_size"), ConfigError);
  testing_util::TempDir dir("config");
  testing_util::WriteFile(dir.File("bad.cfg"), "this line has no equals sign\n");
  EXPECT_THROW(Config::Defaults().LoadFile(dir.File("bad.cfg")), ConfigError);
  EXPECT_THROW(Config::Defaults().LoadFile(dir.File("absent.cfg")), ConfigError);
}

TEST(ConfigTest, TextRoundTrip) {
  Config c = Config::Defaults();
  c.Set("model.dropout", "0.25");
  testing_util::TempDir dir("config");
  testing_util::WriteFile(dir.File("echo.cfg"), c.ToText());
  Config again = Config::Defaults();
  again.LoadFile(dir.File("echo.cfg"));
  EXPECT_EQ(again.values(), c.values());
}

TEST(ConfigTest, ModelConfigMapping) {
  Config c = Config::Defaults();
  c.Set("train.use_argument_info", "false");
  c.Set("decode.argument.max_length", "12");
  c.Set("encoder.hidden_size", "32");
  ModelConfig m = ModelConfigFrom(c);
  EXPECT_FALSE(m.use_argument_info);
  EXPECT_TRUE(m.use_trigger_info);
  EXPECT_EQ(m.argument_decode.max_length, 12);
  EXPECT_EQ(m.encoder.hidden_size, 32);
  EXPECT_EQ(ModelConfig::FromJson(m.ToJson()).ToJson(), m.ToJson());
}

TEST(ConfigTest, SplitRatiosMustSumToOne) {
  Config c = Config::Defaults();
  c.Set("data.split", "0.5,0.1,0.1");
  EXPECT_THROW(SplitRatiosFrom(c), ConfigError);
}

}  // namespace
}  // namespace evsent
