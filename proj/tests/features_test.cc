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

#include <gtest/gtest.h>

#include "evsent/synthetic.h"
#include "test_util.h"

namespace evsent {
namespace {

using testing_util::MakeEvent;
using testing_util::PlainDocument;

TEST(RelativePositionTest, Formula) {
  EXPECT_EQ(RelativePositionIds(5, 2, 256),
            (std::vector<int>{254, 255, 256, 257, 258}));
}

TEST(RelativePositionTest, AnchorIsRadius) {
  for (int anchor : {0, 3, 9}) {
    EXPECT_EQ(RelativePositionIds(10, anchor, 256)[static_cast<size_t>(anchor)], 256);
  }
}

TEST(RelativePositionTest, Clipping) {
  const std::vector<int> ids = RelativePositionIds(600, 0, 256);
  for (int id : ids) {
    EXPECT_GE(id, 0);
    EXPECT_LE(id, 512);
  }
  EXPECT_EQ(ids.back(), 512);
  EXPECT_EQ(ids[256], 512);
  EXPECT_EQ(ids[255], 511);
}

TEST(RoleIdsTest, TriggerOnly) {
  Document doc = PlainDocument(6);
  EXPECT_EQ(RoleIds(6, MakeEvent(doc, 2, 3), 0),
            (std::vector<int>{0, 0, 1, 1, 0, 0}));
}

TEST(RoleIdsTest, DisjointSubject) {
  Document doc = PlainDocument(6);
  Event e = MakeEvent(doc, 2, 2);
  e.argument(Role::kSubject) = MakeSpan(doc, 0, 1);
  EXPECT_EQ(RoleIds(6, e, 0), (std::vector<int>{2, 2, 1, 0, 0, 0}));
  // Sequence offset shifts everything by one.
  EXPECT_EQ(RoleIds(8, e, 1), (std::vector<int>{0, 2, 2, 1, 0, 0, 0, 0}));
}

TEST(RoleIdsTest, TriggerWinsOverlap) {
  Document doc = PlainDocument(6);
  Event e = MakeEvent(doc, 2, 2);
  e.argument(Role::kSubject) = MakeSpan(doc, 1, 3);
  e.argument(Role::kLocation) = MakeSpan(doc, 3, 4);
  EXPECT_EQ(RoleIds(6, e, 0), (std::vector<int>{0, 2, 1, 2, 5, 0}));
}

TEST(TaggerTest, EmptyTokens) {
  RuleTagger tagger;
  TagVocab pos, ner;
  TokenFeatures f = Tag(PlainDocument(0), tagger, pos, ner);
  EXPECT_TRUE(f.pos_ids.empty());
  EXPECT_TRUE(f.ner_ids.empty());
}

TEST(TaggerTest, TriggerLexiconIsVerb) {
  RuleTagger tagger;
  TaggedTokens t = tagger.Tag({"increase", "增长"});
  ASSERT_EQ(t.pos.size(), 2u);
  EXPECT_EQ(t.pos[0], "VERB");
  EXPECT_EQ(t.pos[1], "VERB");
  for (const Lexeme& l : SynthGrammar::Default().triggers) {
    const bool aux = l.tokens.size() > 1 && l.tokens.front() == "was";
    const std::string& head = l.tokens[aux ? 1 : 0];
    EXPECT_EQ(tagger.Tag({head}).pos[0], "VERB") << head;
  }
}

TEST(TaggerTest, DeterministicAndBoundaryPadded) {
  RuleTagger tagger;
  TagVocab pos, ner;
  for (const std::string& tag : tagger.Tag({"Acme", "rose", "in", "May"}).pos) pos.Add(tag);
  Document doc = PlainDocument(4);
  doc.tokens = {"Acme", "rose", "in", "May"};
  TokenFeatures a = Tag(doc, tagger, pos, ner);
  TokenFeatures b = Tag(doc, tagger, pos, ner);
  EXPECT_EQ(a.pos_ids, b.pos_ids);
  EXPECT_EQ(a.ner_ids, b.ner_ids);
  ASSERT_EQ(a.pos_ids.size(), 6u);
  EXPECT_EQ(a.pos_ids.front(), kPadTagId);
  EXPECT_EQ(a.pos_ids.back(), kPadTagId);
  for (size_t i = 1; i + 1 < a.pos_ids.size(); ++i) EXPECT_GT(a.pos_ids[i], kUnkTagId);
}

TEST(TagVocabTest, UnseenIsUnk) {
  TagVocab v;
  const int noun = v.Add("NOUN");
  EXPECT_EQ(v.Add("NOUN"), noun);
  EXPECT_EQ(v.Id("NOUN"), noun);
  EXPECT_EQ(v.Id("never-seen"), kUnkTagId);
  EXPECT_EQ(TagVocab::FromJson(v.ToJson()).tags(), v.tags());
}

TEST(TaggerTest, UnknownBackendIsError) {
  EXPECT_THROW(MakeTagger("magic"), TaggerError);
  EXPECT_THROW(MakeTagger("external", ""), TaggerError);
}

TEST(TaggerTest, ExternalProtocol) {
  testing_util::TempDir dir("tagger");
  const std::string script = dir.File("fake_tagger.py");
  testing_util::WriteFile(script,
                          "import json, sys\n"
                          "for line in sys.stdin:\n"
                          "    toks = json.loads(line)['tokens']\n"
                          "    print(json.dumps({'upos': ['X'] * len(toks),\n"
                          "                      'xpos': ['NN'] * len(toks),\n"
                          "                      'ner': ['O'] * len(toks)}), flush=True)\n");
  ExternalTagger tagger("python3 " + script, "xpos");
  std::vector<TaggedTokens> out = tagger.TagBatch({{"a", "b"}, {"c"}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].pos, (std::vector<std::string>{"NN", "NN"}));
  EXPECT_EQ(out[1].ner, (std::vector<std::string>{"O"}));

  ExternalTagger broken("false", "upos");
  EXPECT_THROW(broken.Tag({"a"}), TaggerError);
}

}  // namespace
}  // namespace evsent
