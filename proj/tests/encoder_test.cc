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

#include "evsent/encoder.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "evsent/nn/tensor_file.h"
#include "test_util.h"

namespace evsent {
namespace {

using testing_util::PlainDocument;
using testing_util::TempDir;

Vocabulary SmallVocab() {
  return Vocabulary({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "w0", "w1", "w2", "w3",
                     "w4", "w5", "w6", "w7", "w8", "w9", "w10", "w11"});
}

EncoderConfig SmallConfig() {
  EncoderConfig c;
  c.hidden_size = 8;
  c.num_layers = 2;
  c.num_heads = 2;
  c.intermediate_size = 16;
  c.max_positions = 32;
  return c;
}

TEST(EncoderTest, EmptyDocumentHasBoundaryRowsOnly) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Encoder encoder(SmallConfig(), SmallVocab(), store, rng);
  EncodedDocument out = encoder.EncodeDocument(PlainDocument(0));
  EXPECT_EQ(out.vectors.rows(), 2);
  EXPECT_EQ(out.vectors.cols(), 8);
  EXPECT_EQ(out.special_token_mask, (std::vector<int>{1, 1}));
}

TEST(EncoderTest, InferenceIsDeterministic) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Encoder encoder(SmallConfig(), SmallVocab(), store, rng);
  Document doc = PlainDocument(6);
  EXPECT_EQ(encoder.EncodeDocument(doc).vectors, encoder.EncodeDocument(doc).vectors);
  EncodedDocument out = encoder.EncodeDocument(doc);
  EXPECT_EQ(out.vectors.rows(), 8);
  EXPECT_EQ(out.special_token_mask.front(), 1);
  EXPECT_EQ(out.special_token_mask[3], 0);
}

TEST(EncoderTest, ZeroParametersWithoutPositionsGiveEqualRows) {
  EncoderConfig c = SmallConfig();
  c.position_embeddings = false;
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Encoder encoder(c, SmallVocab(), store, rng);
  store.SetAll(0.0);
  const nn::Matrix v = encoder.EncodeDocument(PlainDocument(5)).vectors;
  for (Eigen::Index r = 1; r < v.rows(); ++r) {
    EXPECT_LT((v.row(r) - v.row(0)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(EncoderTest, AttentionWindowLimitsReceptiveField) {
  EncoderConfig c = SmallConfig();
  c.attention_window = 1;
  nn::ParameterStore store;
  std::mt19937_64 rng(4);
  Encoder encoder(c, SmallVocab(), store, rng);
  Document a = PlainDocument(10);
  Document b = a;
  b.tokens[9] = "w0";
  const nn::Matrix va = encoder.EncodeDocument(a).vectors;
  const nn::Matrix vb = encoder.EncodeDocument(b).vectors;
  // Token 9 sits at position 10; two layers of window 1 reach back to 8.
  for (int p = 0; p <= 7; ++p) {
    EXPECT_LT((va.row(p) - vb.row(p)).cwiseAbs().maxCoeff(), 1e-12) << p;
  }
  EXPECT_GT((va.row(10) - vb.row(10)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EncoderTest, OverLengthIsContractError) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Encoder encoder(SmallConfig(), SmallVocab(), store, rng);
  nn::Graph g;
  EXPECT_THROW(encoder.Encode(g, encoder.Prepare(PlainDocument(31).tokens), nullptr),
               EncoderError);
  EXPECT_EQ(encoder.MaxFittingWords(PlainDocument(40).tokens, 512), 30);
  EXPECT_EQ(encoder.MaxFittingWords(PlainDocument(40).tokens, 12), 10);
}

TEST(EncoderTest, WordPieceUsesFirstSubword) {
  EncoderConfig c = SmallConfig();
  c.tokenizer = "wordpiece";
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Vocabulary vocab({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "play", "##ing", "##s", "the"});
  Encoder encoder(c, vocab, store, rng);
  EncoderInput in = encoder.Prepare({"the", "playing", "plays", "xyz"});
  EXPECT_EQ(in.ids, (std::vector<int>{2, 7, 4, 5, 4, 6, 1, 3}));
  EXPECT_EQ(in.rows, (std::vector<int>{0, 1, 2, 4, 6, 7}));
  EXPECT_EQ(encoder.EncodedLength({"the", "playing", "plays", "xyz"}), 8);
  nn::Graph g;
  EXPECT_EQ(g.value(encoder.Encode(g, in, nullptr)).rows(), 6);
}

TEST(EncoderTest, VocabularyRequiresSpecials) {
  EXPECT_THROW(Vocabulary({"a", "b"}), EncoderError);
  Vocabulary v = SmallVocab();
  EXPECT_EQ(v.Id("w3"), 7);
  EXPECT_EQ(v.Id("zzz"), v.unk_id());
}

TEST(EncoderCheckpointTest, SaveLoadRoundTrip) {
  TempDir dir("encoder");
  nn::ParameterStore store;
  std::mt19937_64 rng(9);
  Encoder encoder(SmallConfig(), SmallVocab(), store, rng);
  encoder.Save(dir.path().string());
  nn::ParameterStore loaded_store;
  Encoder loaded = Encoder::LoadPretrained(dir.path().string(), loaded_store);
  Document doc = PlainDocument(7);
  EXPECT_EQ(loaded.EncodeDocument(doc).vectors, encoder.EncodeDocument(doc).vectors);
}

TEST(EncoderCheckpointTest, MissingDirectory) {
  nn::ParameterStore store;
  try {
    Encoder::LoadPretrained("/nonexistent/encoder", store);
    FAIL();
  } catch (const EncoderError& e) {
    EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos);
  }
}

TEST(EncoderCheckpointTest, MissingVersion) {
  TempDir dir("encoder");
  nn::ParameterStore store;
  std::mt19937_64 rng(9);
  Encoder(SmallConfig(), SmallVocab(), store, rng).Save(dir.path().string());
  nlohmann::json meta = nlohmann::json::parse(testing_util::ReadFile(dir.File("encoder.json")));
  meta.erase("version");
  testing_util::WriteFile(dir.File("encoder.json"), meta.dump());
  nn::ParameterStore other;
  EXPECT_THROW(Encoder::LoadPretrained(dir.path().string(), other), EncoderError);
}

TEST(EncoderCheckpointTest, TamperedShapeNamesTensor) {
  TempDir dir("encoder");
  nn::ParameterStore store;
  std::mt19937_64 rng(9);
  Encoder(SmallConfig(), SmallVocab(), store, rng).Save(dir.path().string());
  std::vector<nn::NamedTensor> tensors = nn::ReadTensorFile(dir.File("weights.bin"));
  for (nn::NamedTensor& t : tensors) {
    if (t.name == "encoder.layer1.attention.query.weight") t.value = nn::Matrix::Zero(8, 7);
  }
  nn::WriteTensorFile(dir.File("weights.bin"), tensors);
  nn::ParameterStore other;
  try {
    Encoder::LoadPretrained(dir.path().string(), other);
    FAIL();
  } catch (const nn::TensorFileError& e) {
    EXPECT_NE(std::string(e.what()).find("encoder.layer1.attention.query.weight"),
              std::string::npos);
  }
}

TEST(EncoderCheckpointTest, MetadataWidthIsRespected) {
  EncoderConfig c;
  c.hidden_size = 768;
  c.num_layers = 1;
  c.num_heads = 12;
  c.intermediate_size = 64;
  c.max_positions = 16;
  c.type_vocab_size = 2;
  TempDir dir("encoder");
  {
    nn::ParameterStore store;
    std::mt19937_64 rng(2);
    Encoder(c, SmallVocab(), store, rng).Save(dir.path().string());
  }
  nn::ParameterStore store;
  Encoder loaded = Encoder::LoadPretrained(dir.path().string(), store);
  EXPECT_EQ(loaded.EncodeDocument(PlainDocument(3)).vectors.cols(), 768);
}

TEST(EncoderTest, FreezeLayers) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  Encoder encoder(SmallConfig(), SmallVocab(), store, rng);
  encoder.FreezeLayers(1);
  EXPECT_FALSE(store.Get("encoder.embeddings.word").trainable);
  EXPECT_FALSE(store.Get("encoder.layer0.attention.query.weight").trainable);
  EXPECT_TRUE(store.Get("encoder.layer1.attention.query.weight").trainable);
}

// Fixture from tests/tools/bert_parity.py: a converted random BERT and the
// reference hidden states. Skipped unless EVSENT_PARITY_DIR is set.
TEST(PretrainedParityTest, MatchesReferenceHiddenStates) {
  const char* dir = std::getenv("EVSENT_PARITY_DIR");
  if (dir == nullptr) GTEST_SKIP() << "EVSENT_PARITY_DIR not set";
  std::ifstream in(std::string(dir) + "/expected.json");
  ASSERT_TRUE(in) << dir;
  const nlohmann::json expected = nlohmann::json::parse(in);
  nn::ParameterStore store;
  Encoder encoder =
      Encoder::LoadPretrained(std::string(dir) + "/encoder", store);
  Document doc = PlainDocument(0);
  doc.tokens = expected.at("words").get<std::vector<std::string>>();
  EXPECT_EQ(encoder.Prepare(doc.tokens).ids,
            expected.at("ids").get<std::vector<int>>());
  const nn::Matrix got = encoder.EncodeDocument(doc).vectors;
  const auto rows = expected.at("hidden").get<std::vector<std::vector<double>>>();
  ASSERT_EQ(got.rows(), static_cast<Eigen::Index>(rows.size()));
  double worst = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    ASSERT_EQ(got.cols(), static_cast<Eigen::Index>(rows[i].size()));
    for (size_t j = 0; j < rows[i].size(); ++j) {
      worst = std::max(worst, std::abs(got(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)) -
                                       rows[i][j]));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

}  // namespace
}  // namespace evsent
