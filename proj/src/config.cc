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

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace evsent {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, std::string>>& DefaultEntries() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"seed", "13"},
      {"data.corpus", ""},
      {"data.train", ""},
      {"data.dev", ""},
      {"data.test", ""},
      {"data.split", "0.8,0.1,0.1"},
      {"encoder.checkpoint", ""},
      {"encoder.hidden_size", "64"},
      {"encoder.num_layers", "2"},
      {"encoder.num_heads", "4"},
      {"encoder.intermediate_size", "256"},
      {"encoder.max_positions", "512"},
      {"encoder.attention_window", "-1"},
      {"encoder.position_embeddings", "true"},
      {"encoder.tokenizer", "word"},
      {"encoder.lowercase", "false"},
      {"encoder.freeze_layers", "0"},
      {"encoder.dropout", "0.1"},
      {"features.dim", "128"},
      {"features.position_radius", "256"},
      {"model.head_dim", "0"},
      {"model.dropout", "0.1"},
      {"tagger.backend", "rule"},
      {"tagger.command", ""},
      {"tagger.tagset", "upos"},
      {"decode.trigger.threshold", "0.5"},
      {"decode.trigger.max_length", "10"},
      {"decode.argument.threshold", "0.5"},
      {"decode.argument.max_length", "30"},
      {"train.learning_rate", "auto"},
      {"train.batch_size", "8"},
      {"train.epochs", "10"},
      {"train.seeds", "1,2,3,4,5"},
      {"train.max_seq_len", "512"},
      {"train.clip_norm", "1.0"},
      {"train.trigger_source", "gold"},
      {"train.trigger_positive_weight", "1.0"},
      {"train.pipeline_mode", "false"},
      {"train.use_features", "true"},
      {"train.use_trigger_info", "true"},
      {"train.use_argument_info", "true"},
      {"metric.average", "macro"},
      {"metric.strict_sentiment", "false"},
      {"synth.num_documents", "100"},
      {"synth.multi_event_rate", "0.3"},
      {"synth.max_events", "3"},
      {"synth.cross_sentence_rate", "0.15"},
      {"synth.shared_trigger_rate", "0.3"},
      {"synth.filler_rate", "0.5"},
      {"synth.distractor_rate", "0.3"},
      {"synth.grammar", ""},
      {"gradcheck.tolerance", "1e-4"},
  };
  return entries;
}

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::Defaults() {
  Config c;
  for (const auto& [key, value] : DefaultEntries()) c.SetFrom(key, value, "default");
  return c;
}

void Config::SetFrom(const std::string& key, const std::string& value,
                     const std::string& source) {
  if (source != "default" && values_.count(key) == 0) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  values_[key] = value;
  sources_[key] = source;
}

void Config::Set(const std::string& key, const std::string& value) {
  SetFrom(key, value, "flag");
}

void Config::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    try {
      SetFrom(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), "file");
    } catch (const ConfigError& ex) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
}

std::string Config::EnvironmentName(const std::string& key) {
  std::string name = "EVSENT_";
  for (char c : key) {
    name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

void Config::ApplyEnvironment() {
  for (auto& [key, value] : values_) {
    if (const char* env = std::getenv(EnvironmentName(key).c_str())) {
      value = env;
      sources_[key] = "env";
    }
  }
}

const std::string& Config::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

const std::string& Config::SourceOf(const std::string& key) const {
  auto it = sources_.find(key);
  if (it == sources_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

int Config::GetInt(const std::string& key) const {
  const std::string& v = Get(key);
  try {
    size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

uint64_t Config::GetUint64(const std::string& key) const {
  const std::string& v = Get(key);
  try {
    size_t used = 0;
    const uint64_t out = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
}

double Config::GetDouble(const std::string& key) const {
  const std::string& v = Get(key);
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

bool Config::GetBool(const std::string& key) const {
  const std::string& v = Get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::GetDoubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : SplitList(Get(key))) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(key + ": bad number '" + item + "'");
    }
  }
  return out;
}

std::vector<uint64_t> Config::GetSeeds(const std::string& key) const {
  std::vector<uint64_t> out;
  for (const std::string& item : SplitList(Get(key))) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError(key + ": bad seed '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(key + ": at least one seed is required");
  return out;
}

json Config::ToJson() const {
  json j = json::object();
  for (const auto& [key, value] : values_) j[key] = value;
  return j;
}

std::string Config::ToText() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) {
    out << key << " = " << value << "  # " << sources_.at(key) << "\n";
  }
  return out.str();
}

ModelConfig ModelConfigFrom(const Config& c) {
  ModelConfig m;
  m.encoder_checkpoint = c.Get("encoder.checkpoint");
  m.encoder.hidden_size = c.GetInt("encoder.hidden_size");
  m.encoder.num_layers = c.GetInt("encoder.num_layers");
  m.encoder.num_heads = c.GetInt("encoder.num_heads");
  m.encoder.intermediate_size = c.GetInt("encoder.intermediate_size");
  m.encoder.max_positions = c.GetInt("encoder.max_positions");
  m.encoder.attention_window = c.GetInt("encoder.attention_window");
  m.encoder.position_embeddings = c.GetBool("encoder.position_embeddings");
  m.encoder.tokenizer = c.Get("encoder.tokenizer");
  m.encoder.lowercase = c.GetBool("encoder.lowercase");
  m.encoder.dropout = c.GetDouble("encoder.dropout");
  m.freeze_layers = c.GetInt("encoder.freeze_layers");
  m.feature_dim = c.GetInt("features.dim");
  m.position_radius = c.GetInt("features.position_radius");
  m.head_dim = c.GetInt("model.head_dim");
  m.dropout = c.GetDouble("model.dropout");
  m.use_features = c.GetBool("train.use_features");
  m.use_trigger_info = c.GetBool("train.use_trigger_info");
  m.use_argument_info = c.GetBool("train.use_argument_info");
  m.trigger_decode.threshold = c.GetDouble("decode.trigger.threshold");
  m.trigger_decode.max_length = c.GetInt("decode.trigger.max_length");
  m.argument_decode.threshold = c.GetDouble("decode.argument.threshold");
  m.argument_decode.max_length = c.GetInt("decode.argument.max_length");
  m.max_seq_len = c.GetInt("train.max_seq_len");
  m.trigger_positive_weight = c.GetDouble("train.trigger_positive_weight");
  m.tagger_backend = c.Get("tagger.backend");
  m.tagger_command = c.Get("tagger.command");
  m.tagger_tagset = c.Get("tagger.tagset");
  for (double t : {m.trigger_decode.threshold, m.argument_decode.threshold}) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("decode thresholds must lie in (0, 1)");
  }
  if (m.trigger_decode.max_length < 1 || m.argument_decode.max_length < 1) {
    throw ConfigError("decode max lengths must be positive");
  }
  if (m.max_seq_len < 2) throw ConfigError("train.max_seq_len must be at least 2");
  return m;
}

EvalOptions EvalOptionsFrom(const Config& c) {
  EvalOptions o;
  o.average = c.Get("metric.average");
  if (o.average != "macro" && o.average != "micro") {
    throw ConfigError("metric.average must be macro or micro");
  }
  o.strict_sentiment = c.GetBool("metric.strict_sentiment");
  return o;
}

SynthConfig SynthConfigFrom(const Config& c) {
  SynthConfig s;
  s.num_documents = c.GetInt("synth.num_documents");
  s.multi_event_rate = c.GetDouble("synth.multi_event_rate");
  s.max_events = c.GetInt("synth.max_events");
  s.cross_sentence_rate = c.GetDouble("synth.cross_sentence_rate");
  s.shared_trigger_rate = c.GetDouble("synth.shared_trigger_rate");
  s.filler_rate = c.GetDouble("synth.filler_rate");
  s.distractor_rate = c.GetDouble("synth.distractor_rate");
  const std::string& grammar = c.Get("synth.grammar");
  if (!grammar.empty()) {
    std::ifstream in(grammar);
    if (!in) throw ConfigError("cannot open grammar file: " + grammar);
    try {
      s.grammar = SynthGrammar::FromJson(json::parse(in));
    } catch (const json::exception& ex) {
      throw ConfigError(grammar + ": " + ex.what());
    }
  }
  if (s.num_documents < 0) throw ConfigError("synth.num_documents must be >= 0");
  return s;
}

SplitRatios SplitRatiosFrom(const Config& c) {
  const std::vector<double> r = c.GetDoubles("data.split");
  if (r.size() != 3) throw ConfigError("data.split needs three ratios");
  if (r[0] < 0 || r[1] < 0 || r[2] < 0 || std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw ConfigError("data.split ratios must be non-negative and sum to 1");
  }
  return SplitRatios{r[0], r[1], r[2]};
}

}  // namespace evsent
