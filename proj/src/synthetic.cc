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

#include "evsent/synthetic.h"

#include <cstdio>
#include <random>
#include <sstream>

namespace evsent {
namespace {

using nlohmann::json;

std::vector<std::string> Words(const std::string& phrase) {
  std::vector<std::string> out;
  std::istringstream in(phrase);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<Lexeme> Lexemes(std::initializer_list<const char*> phrases,
                            int score) {
  std::vector<Lexeme> out;
  for (const char* p : phrases) out.push_back({Words(p), score});
  return out;
}

void Extend(std::vector<Lexeme>& into, const std::vector<Lexeme>& more) {
  into.insert(into.end(), more.begin(), more.end());
}

json LexemesToJson(const std::vector<Lexeme>& lexemes) {
  json out = json::array();
  for (const Lexeme& l : lexemes) {
    std::string phrase;
    for (const std::string& t : l.tokens) {
      if (!phrase.empty()) phrase += ' ';
      phrase += t;
    }
    out.push_back({{"text", phrase}, {"score", l.score}});
  }
  return out;
}

std::vector<Lexeme> LexemesFromJson(const json& j, const char* key) {
  std::vector<Lexeme> out;
  if (!j.contains(key)) return out;
  for (const json& item : j.at(key)) {
    if (item.is_string()) {
      out.push_back({Words(item.get<std::string>()), 0});
    } else {
      out.push_back({Words(item.at("text").get<std::string>()),
                     item.value("score", 0)});
    }
  }
  return out;
}

class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}

  bool Coin(double p) { return Uniform() < p; }
  double Uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }
  size_t Index(size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
  }
  template <typename T>
  const T& Pick(const std::vector<T>& items) {
    return items[Index(items.size())];
  }

 private:
  std::mt19937_64 rng_;
};

// Accumulates tokens and sentence starts; spans are inclusive token ranges.
class DocumentBuilder {
 public:
  void BeginSentence() { boundaries_.push_back(size()); }
  void Word(const std::string& w) { tokens_.push_back(w); }
  std::pair<int, int> Phrase(const std::vector<std::string>& words) {
    const int start = size();
    for (const std::string& w : words) tokens_.push_back(w);
    return {start, size() - 1};
  }
  int size() const { return static_cast<int>(tokens_.size()); }

  Document Build(std::string doc_id) const {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.tokens = tokens_;
    doc.sentence_boundaries = boundaries_.empty() ? std::vector<int>{0}
                                                  : boundaries_;
    for (size_t i = 0; i < tokens_.size(); ++i) {
      if (i > 0) doc.text += ' ';
      doc.text += tokens_[i];
    }
    return doc;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<int> boundaries_;
};

struct EventPlan {
  const Lexeme* trigger = nullptr;
  const Lexeme* subject = nullptr;
  const Lexeme* object = nullptr;
  const Lexeme* time = nullptr;
  const Lexeme* location = nullptr;
  std::string company;
  bool cross_sentence = false;
};

struct PlacedEvent {
  std::pair<int, int> trigger;
  std::optional<std::pair<int, int>> args[kNumRoles];
  Polarity polarity = Polarity::kNeutral;
};

std::vector<const Lexeme*> WithScore(const std::vector<Lexeme>& lexemes,
                                     int score) {
  std::vector<const Lexeme*> out;
  for (const Lexeme& l : lexemes) {
    if (l.score == score) out.push_back(&l);
  }
  return out;
}

PlacedEvent RenderEvent(const EventPlan& plan, Sampler& sampler,
                        DocumentBuilder& b) {
  PlacedEvent placed;
  auto set = [&](Role r, std::pair<int, int> span) {
    placed.args[static_cast<int>(r)] = span;
  };
  const bool has_time = plan.time != nullptr;
  const bool has_loc = plan.location != nullptr;

  if (plan.cross_sentence && (has_time || has_loc)) {
    // Context sentence that carries the event's time and place.
    b.BeginSentence();
    if (has_time) {
      b.Word("In");
      set(Role::kTime, b.Phrase(plan.time->tokens));
      b.Word(",");
    }
    b.Word(plan.company);
    if (has_loc) {
      b.Word("opened");
      b.Word("a");
      b.Word("branch");
      b.Word("in");
      set(Role::kLocation, b.Phrase(plan.location->tokens));
    } else {
      b.Word("reorganized");
      b.Word("its");
      b.Word("divisions");
    }
    b.Word(".");
  }
  const bool inline_time = has_time && !plan.cross_sentence;
  const bool inline_loc = has_loc && !plan.cross_sentence;

  b.BeginSentence();
  const size_t variant = plan.subject == nullptr ? 3 : sampler.Index(3);
  bool time_done = false;
  if (variant == 0 && inline_time && sampler.Coin(0.5)) {
    b.Word("In");
    set(Role::kTime, b.Phrase(plan.time->tokens));
    b.Word(",");
    time_done = true;
  }
  switch (variant) {
    case 0:
      b.Word(plan.company);
      b.Word("'s");
      set(Role::kSubject, b.Phrase(plan.subject->tokens));
      break;
    case 1:
      set(Role::kSubject, b.Phrase(plan.subject->tokens));
      b.Word("of");
      b.Word(plan.company);
      break;
    case 2:
      b.Word(plan.company);
      b.Word("said");
      b.Word("its");
      set(Role::kSubject, b.Phrase(plan.subject->tokens));
      break;
    default:
      b.Word(plan.company);
      break;
  }
  placed.trigger = b.Phrase(plan.trigger->tokens);
  if (plan.object != nullptr) {
    b.Word("by");
    set(Role::kObject, b.Phrase(plan.object->tokens));
  }
  // Variant 2 puts time before place; the others place first.
  auto emit_time = [&] {
    if (inline_time && !time_done) {
      b.Word("in");
      set(Role::kTime, b.Phrase(plan.time->tokens));
      time_done = true;
    }
  };
  if (variant == 2) emit_time();
  if (inline_loc) {
    b.Word("in");
    set(Role::kLocation, b.Phrase(plan.location->tokens));
  }
  emit_time();
  b.Word(".");

  placed.polarity = SyntheticPolarity(
      plan.trigger->score, plan.subject ? plan.subject->score : 0);
  return placed;
}

void RenderFiller(const Lexeme& filler, DocumentBuilder& b) {
  b.BeginSentence();
  b.Phrase(filler.tokens);
}

void RenderDistractor(const Lexeme& subject, const std::string& company,
                      DocumentBuilder& b) {
  b.BeginSentence();
  b.Word("Investors");
  b.Word("watched");
  b.Word("the");
  b.Phrase(subject.tokens);
  b.Word("of");
  b.Word(company);
  b.Word("closely");
  b.Word(".");
}

}  // namespace

Polarity SyntheticPolarity(int trigger_direction, int subject_valence) {
  const int sign = trigger_direction * subject_valence;
  if (sign > 0) return Polarity::kPositive;
  if (sign < 0) return Polarity::kNegative;
  return Polarity::kNeutral;
}

SynthGrammar SynthGrammar::Default() {
  SynthGrammar g;
  g.companies = {"Acme",    "Globex",    "Initech", "Umbrella", "Hooli",
                 "Stark",   "Wayne",     "Wonka",   "Cyberdyne", "Tyrell",
                 "Vandelay", "Oscorp",   "Soylent", "Massive"};
  Extend(g.subjects,
         Lexemes({"net profit", "revenue", "sales", "market share",
                  "operating income", "dividend payout", "order backlog",
                  "gross margin", "cash flow", "export volume"},
                 +1));
  Extend(g.subjects,
         Lexemes({"debt", "losses", "costs", "bad loans", "legal expenses",
                  "default risk", "inventory write-downs",
                  "customer complaints", "pension deficit",
                  "production delays"},
                 -1));
  Extend(g.subjects,
         Lexemes({"headcount", "share count", "office space", "board size"},
                 0));
  Extend(g.triggers,
         Lexemes({"increased", "rose", "grew", "surged", "climbed", "jumped",
                  "went up", "edged up"},
                 +1));
  Extend(g.triggers,
         Lexemes({"decreased", "fell", "dropped", "declined", "shrank",
                  "plunged", "went down", "edged down"},
                 -1));
  Extend(g.triggers,
         Lexemes({"stabilized", "held steady", "was unchanged"}, 0));
  g.objects = Lexemes({"3 percent", "9 percent", "12 percent", "27 percent",
                       "2.5 billion yuan", "40 million yuan",
                       "18 million dollars", "6 billion dollars"},
                      0);
  g.times = Lexemes({"2019", "2020", "2021", "2022", "2023", "January",
                     "March", "the first quarter", "the second half",
                     "the past year"},
                    0);
  g.locations = Lexemes({"Shanghai", "Beijing", "Shenzhen", "Hong Kong",
                         "Singapore", "London", "Frankfurt", "New York"},
                        0);
  g.fillers = Lexemes({"Analysts remain cautious about the sector .",
                       "The board will meet again next week .",
                       "Trading volume was light on the exchange .",
                       "The company did not comment further .",
                       "Regulators are reviewing the filing ."},
                      0);
  return g;
}

SynthGrammar SynthGrammar::FromJson(const json& j) {
  SynthGrammar g;
  if (j.contains("companies")) {
    g.companies = j.at("companies").get<std::vector<std::string>>();
  }
  g.subjects = LexemesFromJson(j, "subjects");
  g.triggers = LexemesFromJson(j, "triggers");
  g.objects = LexemesFromJson(j, "objects");
  g.times = LexemesFromJson(j, "times");
  g.locations = LexemesFromJson(j, "locations");
  g.fillers = LexemesFromJson(j, "fillers");
  return g;
}

json SynthGrammar::ToJson() const {
  return json{{"companies", companies},
              {"subjects", LexemesToJson(subjects)},
              {"triggers", LexemesToJson(triggers)},
              {"objects", LexemesToJson(objects)},
              {"times", LexemesToJson(times)},
              {"locations", LexemesToJson(locations)},
              {"fillers", LexemesToJson(fillers)}};
}

SynthConfig SynthConfig::FromJson(const json& j) {
  SynthConfig c;
  c.num_documents = j.value("num_documents", c.num_documents);
  c.multi_event_rate = j.value("multi_event_rate", c.multi_event_rate);
  c.max_events = j.value("max_events", c.max_events);
  c.cross_sentence_rate = j.value("cross_sentence_rate", c.cross_sentence_rate);
  c.shared_trigger_rate = j.value("shared_trigger_rate", c.shared_trigger_rate);
  c.filler_rate = j.value("filler_rate", c.filler_rate);
  c.distractor_rate = j.value("distractor_rate", c.distractor_rate);
  c.subject_rate = j.value("subject_rate", c.subject_rate);
  c.object_rate = j.value("object_rate", c.object_rate);
  c.time_rate = j.value("time_rate", c.time_rate);
  c.location_rate = j.value("location_rate", c.location_rate);
  if (j.contains("grammar")) c.grammar = SynthGrammar::FromJson(j.at("grammar"));
  return c;
}

Corpus GenerateSynthetic(const SynthConfig& config, uint64_t seed) {
  const SynthGrammar& g = config.grammar;
  if (config.num_documents < 0) {
    throw CorpusError("synthetic config: negative document count");
  }
  if (config.num_documents == 0) return {};
  if (g.triggers.empty() || g.subjects.empty() || g.companies.empty()) {
    throw CorpusError(
        "synthetic config: template set needs triggers, subjects and "
        "companies");
  }
  if (config.max_events < 1) {
    throw CorpusError("synthetic config: max_events must be >= 1");
  }
  Sampler sampler(seed);
  Corpus corpus;
  corpus.reserve(static_cast<size_t>(config.num_documents));
  for (int d = 0; d < config.num_documents; ++d) {
    int num_events = 1;
    if (config.max_events > 1 && sampler.Coin(config.multi_event_rate)) {
      num_events = 2 + static_cast<int>(sampler.Index(
                           static_cast<size_t>(config.max_events - 1)));
    }
    const bool shared = num_events > 1 && sampler.Coin(config.shared_trigger_rate);

    std::vector<EventPlan> plans;
    for (int k = 0; k < num_events; ++k) {
      EventPlan plan;
      plan.company = sampler.Pick(g.companies);
      if (shared && k > 0) {
        plan.trigger = plans.front().trigger;
      } else {
        plan.trigger = &sampler.Pick(g.triggers);
      }
      if (sampler.Coin(config.subject_rate)) {
        std::vector<const Lexeme*> pool;
        if (shared && k > 0 && plans.front().subject != nullptr &&
            plans.front().subject->score != 0) {
          pool = WithScore(g.subjects, -plans.front().subject->score);
        }
        plan.subject = pool.empty() ? &sampler.Pick(g.subjects)
                                    : pool[sampler.Index(pool.size())];
      }
      if (plan.trigger->score != 0 && !g.objects.empty() &&
          sampler.Coin(config.object_rate)) {
        plan.object = &sampler.Pick(g.objects);
      }
      if (!g.times.empty() && sampler.Coin(config.time_rate)) {
        plan.time = &sampler.Pick(g.times);
      }
      if (!g.locations.empty() && sampler.Coin(config.location_rate)) {
        plan.location = &sampler.Pick(g.locations);
      }
      plan.cross_sentence = sampler.Coin(config.cross_sentence_rate);
      plans.push_back(plan);
    }

    DocumentBuilder builder;
    if (!g.fillers.empty() && sampler.Coin(config.filler_rate)) {
      RenderFiller(sampler.Pick(g.fillers), builder);
    }
    const bool distract = sampler.Coin(config.distractor_rate);
    const size_t distract_at = sampler.Index(plans.size() + 1);
    std::vector<PlacedEvent> placed;
    for (size_t k = 0; k <= plans.size(); ++k) {
      if (distract && k == distract_at) {
        RenderDistractor(sampler.Pick(g.subjects), sampler.Pick(g.companies),
                         builder);
      }
      if (k < plans.size()) placed.push_back(RenderEvent(plans[k], sampler, builder));
    }

    char id[32];
    std::snprintf(id, sizeof(id), "synth-%06d", d);
    Document doc = builder.Build(id);
    for (const PlacedEvent& p : placed) {
      Event e;
      e.trigger = MakeSpan(doc, p.trigger.first, p.trigger.second);
      for (int r = 0; r < kNumRoles; ++r) {
        if (p.args[r]) {
          e.arguments[static_cast<size_t>(r)] =
              MakeSpan(doc, p.args[r]->first, p.args[r]->second);
        }
      }
      e.polarity = p.polarity;
      doc.events.push_back(std::move(e));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace evsent
