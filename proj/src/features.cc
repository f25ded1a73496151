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

#include "evsent/features.h"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace evsent {

using nlohmann::json;

TagVocab::TagVocab() {
  Add("<pad>");
  Add("<unk>");
}

int TagVocab::Add(const std::string& tag) {
  auto it = ids_.find(tag);
  if (it != ids_.end()) return it->second;
  const int id = size();
  tags_.push_back(tag);
  ids_[tag] = id;
  return id;
}

int TagVocab::Id(const std::string& tag) const {
  auto it = ids_.find(tag);
  return it == ids_.end() ? kUnkTagId : it->second;
}

TagVocab TagVocab::FromJson(const json& j) {
  TagVocab vocab;
  const auto tags = j.get<std::vector<std::string>>();
  if (tags.size() < 2) {
    throw std::invalid_argument("tag vocabulary must start with <pad>, <unk>");
  }
  for (size_t i = 2; i < tags.size(); ++i) vocab.Add(tags[i]);
  return vocab;
}

void TagVocab::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tag vocabulary: " + path);
  out << ToJson().dump() << "\n";
}

TagVocab TagVocab::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tag vocabulary not found: " + path);
  return FromJson(json::parse(in));
}

std::vector<TaggedTokens> TaggerBackend::TagBatch(
    const std::vector<std::vector<std::string>>& documents) {
  std::vector<TaggedTokens> out;
  out.reserve(documents.size());
  for (const auto& tokens : documents) out.push_back(Tag(tokens));
  return out;
}

TaggerLexicon TaggerLexicon::Default() {
  TaggerLexicon lex;
  auto add = [&](std::initializer_list<const char*> words, const char* pos,
                 const char* ner = "O") {
    for (const char* w : words) lex.words[w] = {pos, ner};
  };
  add({"the", "a", "an", "its", "this", "that"}, "DET");
  add({"of", "in", "by", "on", "at", "to", "for", "from", "with", "about"},
      "ADP");
  add({"'s"}, "PART");
  add({"and", "or", "but"}, "CCONJ");
  add({"said", "opened", "reorganized", "watched", "remain", "meet",
       "comment", "reviewing", "increase", "decrease"},
      "VERB");
  add({"will", "did", "are", "is", "be"}, "AUX");
  add({"not", "closely", "again", "further"}, "ADV");
  add({"percent"}, "NOUN", "PERCENT");
  add({"yuan", "dollars"}, "NOUN", "MONEY");
  add({"million", "billion"}, "NUM", "CARDINAL");
  add({"quarter", "half", "year", "week"}, "NOUN", "DATE");
  add({"January", "February", "March", "April", "May", "June", "July",
       "August", "September", "October", "November", "December", "Monday",
       "Tuesday", "Wednesday", "Thursday", "Friday"},
      "PROPN", "DATE");
  // Chinese financial vocabulary.
  add({"增长", "下降", "上涨", "下跌", "收购", "发布", "减少", "增加"}, "VERB");
  add({"营收", "净利润", "亏损", "债务", "公司", "股价", "业绩"}, "NOUN");
  add({"上海", "北京", "深圳"}, "PROPN", "GPE");
  lex.AddGrammar(SynthGrammar::Default());
  return lex;
}

void TaggerLexicon::AddGrammar(const SynthGrammar& grammar) {
  auto add_if_absent = [&](const std::string& w, const char* pos,
                           const char* ner) {
    words.emplace(w, LexiconEntry{pos, ner});
  };
  for (const std::string& c : grammar.companies) {
    words[c] = {"PROPN", "ORG"};
  }
  for (const Lexeme& l : grammar.triggers) {
    for (size_t i = 0; i < l.tokens.size(); ++i) {
      // Head word is the verb; particles like "up"/"steady" follow it.
      if (i == 0) {
        words[l.tokens[i]] = {l.tokens.size() > 1 && l.tokens[i] == "was"
                                  ? "AUX"
                                  : "VERB",
                              "O"};
      } else {
        add_if_absent(l.tokens[i], "ADV", "O");
      }
    }
    if (l.tokens.size() > 1 && l.tokens[0] == "was") {
      words[l.tokens[1]] = {"VERB", "O"};
    }
  }
  for (const Lexeme& l : grammar.subjects) {
    for (const std::string& w : l.tokens) add_if_absent(w, "NOUN", "O");
  }
  for (const Lexeme& l : grammar.locations) {
    for (const std::string& w : l.tokens) words[w] = {"PROPN", "GPE"};
  }
  for (const Lexeme& l : grammar.times) {
    for (const std::string& w : l.tokens) {
      if (w == "the") continue;
      add_if_absent(w, std::isdigit(static_cast<unsigned char>(w[0])) ? "NUM"
                                                                       : "NOUN",
                    "DATE");
    }
  }
}

namespace {

bool IsPunctuation(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

bool IsNumber(const std::string& w) {
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '%') {
      return false;
    }
  }
  return digit;
}

bool EndsWith(const std::string& w, const std::string& suffix) {
  return w.size() > suffix.size() + 1 &&
         w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string Lower(std::string w) {
  for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return w;
}

}  // namespace

TaggedTokens RuleTagger::Tag(const std::vector<std::string>& tokens) {
  TaggedTokens out;
  out.pos.reserve(tokens.size());
  out.ner.reserve(tokens.size());
  for (const std::string& w : tokens) {
    auto it = lexicon_.words.find(w);
    if (it == lexicon_.words.end()) it = lexicon_.words.find(Lower(w));
    if (it != lexicon_.words.end()) {
      out.pos.push_back(it->second.pos);
      out.ner.push_back(it->second.ner);
      continue;
    }
    std::string pos = "NOUN";
    std::string ner = "O";
    const unsigned char first = w.empty() ? 0 : static_cast<unsigned char>(w[0]);
    if (IsPunctuation(w)) {
      pos = "PUNCT";
    } else if (IsNumber(w)) {
      pos = "NUM";
      const bool year = w.size() == 4 && (w.rfind("19", 0) == 0 || w.rfind("20", 0) == 0) &&
                        std::all_of(w.begin(), w.end(), [](char c) {
                          return std::isdigit(static_cast<unsigned char>(c)) != 0;
                        });
      ner = year ? "DATE" : (w.back() == '%' ? "PERCENT" : "CARDINAL");
    } else if (first >= 0x80) {
      pos = "NOUN";  // Non-ASCII words outside the lexicon.
    } else if (EndsWith(w, "ly")) {
      pos = "ADV";
    } else if (EndsWith(w, "ed") || EndsWith(w, "ing")) {
      pos = "VERB";
    } else if (std::isupper(first)) {
      pos = "PROPN";
    }
    out.pos.push_back(pos);
    out.ner.push_back(ner);
  }
  return out;
}

ExternalTagger::ExternalTagger(std::string command, std::string tagset)
    : command_(std::move(command)), tagset_(std::move(tagset)) {
  if (command_.empty()) {
    throw TaggerError("external tagger selected but tagger.command is empty");
  }
  if (tagset_ != "upos" && tagset_ != "xpos") {
    throw TaggerError("tagger.tagset must be upos or xpos, got '" + tagset_ + "'");
  }
}

TaggedTokens ExternalTagger::Tag(const std::vector<std::string>& tokens) {
  return TagBatch({tokens}).front();
}

std::vector<TaggedTokens> ExternalTagger::TagBatch(
    const std::vector<std::vector<std::string>>& documents) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string stem =
      "evsent_tagger_" + std::to_string(::getpid()) + "_" +
      std::to_string(reinterpret_cast<std::uintptr_t>(&documents));
  const fs::path in_path = dir / (stem + ".in.jsonl");
  const fs::path out_path = dir / (stem + ".out.jsonl");
  {
    std::ofstream in(in_path);
    for (const auto& tokens : documents) {
      in << json{{"tokens", tokens}}.dump() << "\n";
    }
  }
  const std::string cmd = command_ + " < '" + in_path.string() + "' > '" +
                          out_path.string() + "'";
  const int status = std::system(cmd.c_str());
  std::error_code ignored;
  fs::remove(in_path, ignored);
  if (status != 0) {
    fs::remove(out_path, ignored);
    throw TaggerError("external tagger unavailable: '" + command_ +
                      "' exited with status " + std::to_string(status));
  }
  std::vector<TaggedTokens> result;
  std::ifstream out(out_path);
  std::string line;
  while (result.size() < documents.size() && std::getline(out, line)) {
    const size_t k = result.size();
    TaggedTokens tags;
    try {
      json j = json::parse(line);
      tags.pos = j.at(tagset_).get<std::vector<std::string>>();
      tags.ner = j.at("ner").get<std::vector<std::string>>();
    } catch (const json::exception& ex) {
      fs::remove(out_path, ignored);
      throw TaggerError("external tagger produced malformed output on line " +
                        std::to_string(k + 1) + ": " + ex.what());
    }
    if (tags.pos.size() != documents[k].size() ||
        tags.ner.size() != documents[k].size()) {
      fs::remove(out_path, ignored);
      throw TaggerError("external tagger returned " +
                        std::to_string(tags.pos.size()) + " tags for " +
                        std::to_string(documents[k].size()) + " tokens");
    }
    result.push_back(std::move(tags));
  }
  fs::remove(out_path, ignored);
  if (result.size() != documents.size()) {
    throw TaggerError("external tagger returned " +
                      std::to_string(result.size()) + " lines for " +
                      std::to_string(documents.size()) + " documents");
  }
  return result;
}

std::unique_ptr<TaggerBackend> MakeTagger(const std::string& backend,
                                          const std::string& command,
                                          const std::string& tagset) {
  if (backend == "rule") return std::make_unique<RuleTagger>();
  if (backend == "external") {
    return std::make_unique<ExternalTagger>(command, tagset);
  }
  throw TaggerError("unknown tagger backend '" + backend +
                    "' (expected rule or external)");
}

TokenFeatures ToFeatureIds(const TaggedTokens& tags, const TagVocab& pos_vocab,
                           const TagVocab& ner_vocab) {
  TokenFeatures f;
  const size_t n = tags.pos.size();
  f.pos_ids.assign(n + 2, kPadTagId);
  f.ner_ids.assign(n + 2, kPadTagId);
  for (size_t i = 0; i < n; ++i) {
    f.pos_ids[i + 1] = pos_vocab.Id(tags.pos[i]);
    f.ner_ids[i + 1] = ner_vocab.Id(tags.ner[i]);
  }
  return f;
}

TokenFeatures Tag(const Document& doc, TaggerBackend& backend,
                  const TagVocab& pos_vocab, const TagVocab& ner_vocab) {
  if (doc.tokens.empty()) return {};
  return ToFeatureIds(backend.Tag(doc.tokens), pos_vocab, ner_vocab);
}

std::vector<int> RelativePositionIds(int m, int anchor, int radius) {
  std::vector<int> ids(static_cast<size_t>(std::max(0, m)));
  for (int i = 0; i < m; ++i) {
    ids[static_cast<size_t>(i)] = std::clamp(i - anchor, -radius, radius) + radius;
  }
  return ids;
}

std::vector<int> RoleIds(int m, const Event& event, int offset) {
  std::vector<int> ids(static_cast<size_t>(std::max(0, m)), kRoleNone);
  auto mark = [&](const Span& s, int id) {
    for (int i = s.start; i <= s.end; ++i) {
      const int p = i + offset;
      if (p >= 0 && p < m && ids[static_cast<size_t>(p)] == kRoleNone) {
        ids[static_cast<size_t>(p)] = id;
      }
    }
  };
  mark(event.trigger, kRoleTrigger);
  for (Role r : kAllRoles) {
    if (event.argument(r)) mark(*event.argument(r), kRoleSubject + static_cast<int>(r));
  }
  return ids;
}

FeatureEmbeddings FeatureEmbeddings::Create(nn::ParameterStore& store,
                                            int pos_size, int ner_size,
                                            int dim, int radius,
                                            std::mt19937_64& rng) {
  FeatureEmbeddings f;
  f.dim = dim;
  f.radius = radius;
  f.pos = &store.CreateNormal("features.pos", pos_size, dim, 0.02, rng);
  f.ner = &store.CreateNormal("features.ner", ner_size, dim, 0.02, rng);
  f.position =
      &store.CreateNormal("features.position", 2 * radius + 1, dim, 0.02, rng);
  f.role = &store.CreateNormal("features.role", kNumRoleIds, dim, 0.02, rng);
  return f;
}

}  // namespace evsent
