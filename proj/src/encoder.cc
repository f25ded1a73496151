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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "evsent/nn/tensor_file.h"

namespace evsent {

using nlohmann::json;
namespace fs = std::filesystem;

json EncoderConfig::ToJson() const {
  return json{{"hidden_size", hidden_size},
              {"num_layers", num_layers},
              {"num_heads", num_heads},
              {"intermediate_size", intermediate_size},
              {"max_positions", max_positions},
              {"type_vocab_size", type_vocab_size},
              {"position_embeddings", position_embeddings},
              {"attention_window", attention_window},
              {"layer_norm_eps", layer_norm_eps},
              {"dropout", dropout},
              {"tokenizer", tokenizer},
              {"lowercase", lowercase}};
}

EncoderConfig EncoderConfig::FromJson(const json& j) {
  EncoderConfig c;
  c.hidden_size = j.value("hidden_size", c.hidden_size);
  c.num_layers = j.value("num_layers", c.num_layers);
  c.num_heads = j.value("num_heads", c.num_heads);
  c.intermediate_size = j.value("intermediate_size", c.intermediate_size);
  c.max_positions = j.value("max_positions", c.max_positions);
  c.type_vocab_size = j.value("type_vocab_size", c.type_vocab_size);
  c.position_embeddings = j.value("position_embeddings", c.position_embeddings);
  c.attention_window = j.value("attention_window", c.attention_window);
  c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
  c.dropout = j.value("dropout", c.dropout);
  c.tokenizer = j.value("tokenizer", c.tokenizer);
  c.lowercase = j.value("lowercase", c.lowercase);
  return c;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    ids_.emplace(tokens_[i], static_cast<int>(i));
  }
  auto require = [&](const char* special) {
    auto it = ids_.find(special);
    if (it == ids_.end()) {
      throw EncoderError(std::string("vocabulary lacks special token ") +
                         special);
    }
    return it->second;
  };
  pad_ = require(kPad);
  unk_ = require(kUnk);
  cls_ = require(kCls);
  sep_ = require(kSep);
}

Vocabulary Vocabulary::FromCorpus(const Corpus& corpus, bool lowercase) {
  std::vector<std::string> tokens = {kPad, kUnk, kCls, kSep};
  std::unordered_map<std::string, int> seen;
  for (const std::string& t : tokens) seen.emplace(t, 0);
  for (const Document& doc : corpus) {
    for (std::string w : doc.tokens) {
      if (lowercase) {
        for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      if (seen.emplace(w, 0).second) tokens.push_back(w);
    }
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EncoderError("vocabulary file not found: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw EncoderError("cannot write vocabulary: " + path);
  for (const std::string& t : tokens_) out << t << "\n";
}

int Vocabulary::Id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? unk_ : it->second;
}

Encoder::Encoder(EncoderConfig config, Vocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  if (config_.hidden_size <= 0 || config_.num_heads <= 0 ||
      config_.hidden_size % config_.num_heads != 0) {
    throw EncoderError("hidden_size must be a positive multiple of num_heads");
  }
  if (config_.tokenizer != "word" && config_.tokenizer != "wordpiece") {
    throw EncoderError("unknown tokenizer '" + config_.tokenizer + "'");
  }
}

Encoder::Encoder(EncoderConfig config, Vocabulary vocab,
                 nn::ParameterStore& store, std::mt19937_64& rng)
    : Encoder(std::move(config), std::move(vocab)) {
  CreateParameters(store, rng);
}

void Encoder::CreateParameters(nn::ParameterStore& store,
                               std::mt19937_64& rng) {
  const int h = config_.hidden_size;
  auto track = [&](nn::Parameter& p) {
    parameters_.push_back(&p);
    return &p;
  };
  word_embedding_ = track(
      store.CreateNormal("encoder.embeddings.word", vocab_.size(), h, 0.02, rng));
  if (config_.position_embeddings) {
    position_embedding_ = track(store.CreateNormal(
        "encoder.embeddings.position", config_.max_positions, h, 0.02, rng));
  }
  if (config_.type_vocab_size > 0) {
    type_embedding_ = track(store.CreateNormal(
        "encoder.embeddings.token_type", config_.type_vocab_size, h, 0.02, rng));
  }
  embedding_norm_gain_ =
      track(store.CreateConstant("encoder.embeddings.norm.gain", 1, h, 1.0));
  embedding_norm_bias_ =
      track(store.Create("encoder.embeddings.norm.bias", 1, h));
  for (int l = 0; l < config_.num_layers; ++l) {
    const std::string prefix = "encoder.layer" + std::to_string(l);
    Layer layer;
    auto linear = [&](const std::string& name, int in, int out) {
      nn::Linear lin = nn::Linear::Create(store, prefix + name, in, out, rng);
      track(*lin.weight);
      track(*lin.bias);
      return lin;
    };
    layer.query = linear(".attention.query", h, h);
    layer.key = linear(".attention.key", h, h);
    layer.value = linear(".attention.value", h, h);
    layer.attention_output = linear(".attention.output", h, h);
    layer.attention_norm_gain =
        track(store.CreateConstant(prefix + ".attention.norm.gain", 1, h, 1.0));
    layer.attention_norm_bias =
        track(store.Create(prefix + ".attention.norm.bias", 1, h));
    layer.intermediate = linear(".ffn.intermediate", h, config_.intermediate_size);
    layer.output = linear(".ffn.output", config_.intermediate_size, h);
    layer.output_norm_gain =
        track(store.CreateConstant(prefix + ".ffn.norm.gain", 1, h, 1.0));
    layer.output_norm_bias = track(store.Create(prefix + ".ffn.norm.bias", 1, h));
    layers_.push_back(layer);
  }
}

Encoder Encoder::LoadPretrained(const std::string& dir,
                                nn::ParameterStore& store) {
  const fs::path root(dir);
  const fs::path meta_path = root / "encoder.json";
  if (!fs::is_directory(root)) {
    throw EncoderError("encoder checkpoint not found: " + dir);
  }
  if (!fs::exists(meta_path)) {
    throw EncoderError("encoder metadata not found: " + meta_path.string());
  }
  json meta;
  {
    std::ifstream in(meta_path);
    try {
      meta = json::parse(in);
    } catch (const json::exception& ex) {
      throw EncoderError(meta_path.string() + ": " + ex.what());
    }
  }
  if (!meta.contains("version")) {
    throw EncoderError(meta_path.string() + ": missing mandatory version field");
  }
  if (meta.at("version").get<int>() != kEncoderCheckpointVersion) {
    throw EncoderError(meta_path.string() + ": unsupported version " +
                       meta.at("version").dump());
  }
  EncoderConfig config = EncoderConfig::FromJson(meta.value("config", json::object()));
  Vocabulary vocab = Vocabulary::Load((root / "vocab.txt").string());
  if (meta.contains("vocab_size") &&
      meta.at("vocab_size").get<int>() != vocab.size()) {
    throw EncoderError("vocab.txt has " + std::to_string(vocab.size()) +
                       " entries, metadata declares " +
                       meta.at("vocab_size").dump());
  }
  Encoder encoder(std::move(config), std::move(vocab));
  std::mt19937_64 rng(0);
  encoder.CreateParameters(store, rng);
  const fs::path weights = root / "weights.bin";
  if (!fs::exists(weights)) {
    throw EncoderError("encoder weights not found: " + weights.string());
  }
  nn::LoadParameters(store, weights.string(), "encoder.");
  return encoder;
}

void Encoder::Save(const std::string& dir) const {
  fs::create_directories(dir);
  const fs::path root(dir);
  json meta = {{"version", kEncoderCheckpointVersion},
               {"architecture", "transformer-encoder"},
               {"vocab_size", vocab_.size()},
               {"config", config_.ToJson()}};
  std::ofstream(root / "encoder.json") << meta.dump(2) << "\n";
  vocab_.Save((root / "vocab.txt").string());
  std::vector<nn::NamedTensor> tensors;
  for (const nn::Parameter* p : parameters_) tensors.push_back({p->name, p->value, 2});
  nn::WriteTensorFile((root / "weights.bin").string(), tensors);
}

std::vector<std::string> Encoder::WordPieces(const std::string& raw) const {
  std::string word = raw;
  if (config_.lowercase) {
    for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (config_.tokenizer == "word") {
    return {word};
  }
  if (word.size() > 100) return {Vocabulary::kUnk};
  std::vector<std::string> pieces;
  size_t start = 0;
  while (start < word.size()) {
    size_t end = word.size();
    std::string found;
    while (end > start) {
      std::string candidate = word.substr(start, end - start);
      if (start > 0) candidate = "##" + candidate;
      if (vocab_.Contains(candidate)) {
        found = std::move(candidate);
        break;
      }
      --end;
    }
    if (found.empty()) return {Vocabulary::kUnk};
    pieces.push_back(std::move(found));
    start = end;
  }
  return pieces;
}

EncoderInput Encoder::Prepare(const std::vector<std::string>& words) const {
  EncoderInput input;
  input.ids.push_back(vocab_.cls_id());
  input.rows.push_back(0);
  for (const std::string& w : words) {
    input.rows.push_back(static_cast<int>(input.ids.size()));
    for (const std::string& piece : WordPieces(w)) {
      input.ids.push_back(vocab_.Id(piece));
    }
  }
  input.rows.push_back(static_cast<int>(input.ids.size()));
  input.ids.push_back(vocab_.sep_id());
  return input;
}

int Encoder::EncodedLength(const std::vector<std::string>& words) const {
  int length = 2;
  for (const std::string& w : words) {
    length += static_cast<int>(WordPieces(w).size());
  }
  return length;
}

int Encoder::MaxFittingWords(const std::vector<std::string>& words,
                             int budget) const {
  budget = std::min(budget, config_.max_positions);
  int length = 2;
  int count = 0;
  for (const std::string& w : words) {
    length += static_cast<int>(WordPieces(w).size());
    if (length > budget) break;
    ++count;
  }
  return count;
}

nn::Var Encoder::SelfAttention(nn::Graph& g, const Layer& layer,
                               nn::Var x) const {
  const int length = static_cast<int>(g.value(x).rows());
  const int heads = config_.num_heads;
  const int head_dim = config_.hidden_size / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  nn::Var q = layer.query.Apply(g, x);
  nn::Var k = layer.key.Apply(g, x);
  nn::Var v = layer.value.Apply(g, x);
  nn::Var mask;
  if (config_.attention_window >= 0) {
    nn::Matrix m = nn::Matrix::Zero(length, length);
    for (int i = 0; i < length; ++i) {
      for (int j = 0; j < length; ++j) {
        if (std::abs(i - j) > config_.attention_window) m(i, j) = -1e9;
      }
    }
    mask = g.Constant(std::move(m));
  }
  std::vector<nn::Var> contexts;
  contexts.reserve(static_cast<size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    nn::Var qh = nn::SliceCols(g, q, h * head_dim, head_dim);
    nn::Var kh = nn::SliceCols(g, k, h * head_dim, head_dim);
    nn::Var vh = nn::SliceCols(g, v, h * head_dim, head_dim);
    nn::Var scores = nn::Scale(g, nn::MatMul(g, qh, nn::Transpose(g, kh)), scale);
    if (mask.valid()) scores = nn::Add(g, scores, mask);
    contexts.push_back(nn::MatMul(g, nn::SoftmaxRows(g, scores), vh));
  }
  nn::Var context = heads == 1 ? contexts.front() : nn::ConcatCols(g, contexts);
  return layer.attention_output.Apply(g, context);
}

nn::Var Encoder::Encode(nn::Graph& g, const EncoderInput& input,
                        std::mt19937_64* dropout_rng) const {
  const int length = static_cast<int>(input.ids.size());
  if (length > config_.max_positions) {
    throw EncoderError("input of " + std::to_string(length) +
                       " positions exceeds the maximum of " +
                       std::to_string(config_.max_positions) +
                       "; truncate upstream");
  }
  nn::Var x = nn::GatherRows(g, g.Param(*word_embedding_), input.ids);
  if (position_embedding_ != nullptr) {
    std::vector<int> positions(static_cast<size_t>(length));
    std::iota(positions.begin(), positions.end(), 0);
    x = nn::Add(g, x, nn::GatherRows(g, g.Param(*position_embedding_), positions));
  }
  if (type_embedding_ != nullptr) {
    std::vector<int> types(static_cast<size_t>(length), 0);
    x = nn::Add(g, x, nn::GatherRows(g, g.Param(*type_embedding_), types));
  }
  const double eps = config_.layer_norm_eps;
  x = nn::LayerNorm(g, x, g.Param(*embedding_norm_gain_),
                    g.Param(*embedding_norm_bias_), eps);
  for (const Layer& layer : layers_) {
    nn::Var attended = SelfAttention(g, layer, x);
    x = nn::LayerNorm(g, nn::Add(g, x, attended), g.Param(*layer.attention_norm_gain),
                      g.Param(*layer.attention_norm_bias), eps);
    nn::Var ffn = layer.output.Apply(
        g, nn::Gelu(g, layer.intermediate.Apply(g, x)));
    x = nn::LayerNorm(g, nn::Add(g, x, ffn), g.Param(*layer.output_norm_gain),
                      g.Param(*layer.output_norm_bias), eps);
  }
  bool identity_rows = static_cast<int>(input.rows.size()) == length;
  for (size_t i = 0; identity_rows && i < input.rows.size(); ++i) {
    identity_rows = input.rows[i] == static_cast<int>(i);
  }
  if (!identity_rows) x = nn::GatherRows(g, x, input.rows);
  return nn::Dropout(g, x, config_.dropout, dropout_rng);
}

EncodedDocument Encoder::EncodeDocument(const Document& doc) const {
  nn::Graph g;
  nn::Var out = Encode(g, Prepare(doc.tokens), nullptr);
  EncodedDocument encoded;
  encoded.vectors = g.value(out);
  const int m = static_cast<int>(encoded.vectors.rows());
  encoded.special_token_mask.assign(static_cast<size_t>(m), 0);
  encoded.special_token_mask.front() = 1;
  encoded.special_token_mask.back() = 1;
  return encoded;
}

void Encoder::FreezeLayers(int layers) {
  if (layers <= 0) return;
  for (nn::Parameter* p : parameters_) {
    if (p->name.rfind("encoder.embeddings.", 0) == 0) {
      p->trainable = false;
      continue;
    }
    for (int l = 0; l < std::min(layers, config_.num_layers); ++l) {
      if (p->name.rfind("encoder.layer" + std::to_string(l) + ".", 0) == 0) {
        p->trainable = false;
      }
    }
  }
}

}  // namespace evsent
