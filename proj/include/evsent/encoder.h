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

// Contextual token encoder.
//
// One post-LayerNorm transformer implementation backs both the small model
// trained from scratch and BERT-style pre-trained checkpoints. Inputs are
// wrapped as [CLS] w_1 ... w_n [SEP]; with a WordPiece vocabulary each word
// is represented by its first sub-word.
//
// Checkpoint directory layout:
//   encoder.json  architecture metadata, "version" is mandatory
//   vocab.txt     one token per line, line number = id
//   weights.bin   tensors in the layout documented in nn/tensor_file.h, named
//                 "encoder.embeddings.word", "encoder.layer0.attention.query
//                 .weight", ... (see Encoder::Encoder for the full list)

#ifndef EVSENT_ENCODER_H_
#define EVSENT_ENCODER_H_

#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/nn/graph.h"
#include "evsent/nn/layers.h"
#include "evsent/nn/parameter.h"
#include "json.hpp"

namespace evsent {

inline constexpr int kEncoderCheckpointVersion = 1;

class EncoderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncoderConfig {
  int hidden_size = 64;
  int num_layers = 2;
  int num_heads = 4;
  int intermediate_size = 256;
  int max_positions = 512;
  // 0 disables segment embeddings (small model); BERT uses 2.
  int type_vocab_size = 0;
  bool position_embeddings = true;
  // Tokens attend to positions within this distance; < 0 means unlimited.
  int attention_window = -1;
  double layer_norm_eps = 1e-12;
  double dropout = 0.1;
  // "word" (one id per word) or "wordpiece".
  std::string tokenizer = "word";
  bool lowercase = false;

  nlohmann::json ToJson() const;
  static EncoderConfig FromJson(const nlohmann::json& j);
};

class Vocabulary {
 public:
  static constexpr const char* kPad = "[PAD]";
  static constexpr const char* kUnk = "[UNK]";
  static constexpr const char* kCls = "[CLS]";
  static constexpr const char* kSep = "[SEP]";

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  // [PAD] [UNK] [CLS] [SEP] followed by corpus words in first-seen order.
  static Vocabulary FromCorpus(const Corpus& corpus, bool lowercase = false);
  static Vocabulary Load(const std::string& path);
  void Save(const std::string& path) const;

  int Id(const std::string& token) const;  // kUnk id when absent
  bool Contains(const std::string& token) const {
    return ids_.count(token) > 0;
  }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
  int pad_id() const { return pad_; }
  int unk_id() const { return unk_; }
  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  int pad_ = 0, unk_ = 1, cls_ = 2, sep_ = 3;
};

// Encoder input for one document.
struct EncoderInput {
  std::vector<int> ids;  // sub-word ids including [CLS] and [SEP]
  // For each output position (boundary tokens included) the row of `ids`
  // that represents it.
  std::vector<int> rows;
};

struct EncodedDocument {
  nn::Matrix vectors;                   // m x H
  std::vector<int> special_token_mask;  // 1 at the two boundary positions
};

class Encoder {
 public:
  // Creates "encoder.*" parameters in `store`, randomly initialized.
  Encoder(EncoderConfig config, Vocabulary vocab, nn::ParameterStore& store,
          std::mt19937_64& rng);

  // Reads a checkpoint directory and creates + loads parameters into `store`.
  // Throws EncoderError when files are missing or metadata is inconsistent,
  // nn::TensorFileError naming every tensor whose shape does not match.
  static Encoder LoadPretrained(const std::string& dir,
                                nn::ParameterStore& store);
  void Save(const std::string& dir) const;

  EncoderInput Prepare(const std::vector<std::string>& words) const;
  // Number of encoder positions `words` would occupy, boundary tokens
  // included.
  int EncodedLength(const std::vector<std::string>& words) const;
  // Length of the longest word prefix of `words` whose encoding fits in
  // min(budget, max_positions) positions.
  int MaxFittingWords(const std::vector<std::string>& words, int budget) const;

  // Returns an m x H node (m = words + 2). Dropout is applied to the output
  // when `dropout_rng` is non-null. Throws EncoderError for over-length input.
  nn::Var Encode(nn::Graph& g, const EncoderInput& input,
                 std::mt19937_64* dropout_rng) const;
  // Inference-mode convenience wrapper.
  EncodedDocument EncodeDocument(const Document& doc) const;

  // Marks the embeddings and the lowest `layers` transformer layers as
  // frozen when layers > 0.
  void FreezeLayers(int layers);

  const EncoderConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  int hidden_size() const { return config_.hidden_size; }

 private:
  struct Layer {
    nn::Linear query, key, value, attention_output;
    nn::Parameter* attention_norm_gain = nullptr;
    nn::Parameter* attention_norm_bias = nullptr;
    nn::Linear intermediate, output;
    nn::Parameter* output_norm_gain = nullptr;
    nn::Parameter* output_norm_bias = nullptr;
  };

  Encoder(EncoderConfig config, Vocabulary vocab);
  void CreateParameters(nn::ParameterStore& store, std::mt19937_64& rng);
  std::vector<std::string> WordPieces(const std::string& word) const;
  nn::Var SelfAttention(nn::Graph& g, const Layer& layer, nn::Var x) const;

  EncoderConfig config_;
  Vocabulary vocab_;
  nn::Parameter* word_embedding_ = nullptr;
  nn::Parameter* position_embedding_ = nullptr;
  nn::Parameter* type_embedding_ = nullptr;
  nn::Parameter* embedding_norm_gain_ = nullptr;
  nn::Parameter* embedding_norm_bias_ = nullptr;
  std::vector<Layer> layers_;
  std::vector<nn::Parameter*> parameters_;
};

}  // namespace evsent

#endif  // EVSENT_ENCODER_H_
