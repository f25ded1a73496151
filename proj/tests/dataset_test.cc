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

#include "evsent/dataset.h"

#include <gtest/gtest.h>

#include <fstream>

#include "test_util.h"

namespace evsent {
namespace {

using testing_util::DataPath;

ImportMapping ExternalMapping() {
  std::ifstream in(DataPath("external_mapping.json"));
  return ImportMapping::FromJson(nlohmann::json::parse(in));
}

TEST(ImportTest, MapsFieldsAndKeepsExtra) {
  ImportResult r = ImportDataset(DataPath("external.jsonl"), ExternalMapping());
  ASSERT_TRUE(r.errors.empty());
  ASSERT_EQ(r.documents.size(), 2u);
  const Document& doc = r.documents[0];
  EXPECT_EQ(doc.doc_id, "7");
  EXPECT_EQ(doc.tokens, (std::vector<std::string>{"Profit", "rose", "in", "May"}));
  ASSERT_EQ(doc.events.size(), 1u);
  EXPECT_EQ(doc.events[0].trigger.text, "rose");
  EXPECT_EQ(doc.events[0].polarity, Polarity::kPositive);
  EXPECT_EQ(doc.events[0].argument(Role::kSubject)->text, "Profit");
  EXPECT_EQ(doc.extra["source"], "news");
  EXPECT_EQ(doc.extra["url"], "http://example.com/a");
  EXPECT_TRUE(r.documents[1].extra.is_null());
  EXPECT_EQ(r.documents[1].events[0].polarity, Polarity::kNegative);
}

TEST(ImportTest, FirstSpanWinsWithWarning) {
  ImportResult r = ImportDataset(DataPath("external.jsonl"), ExternalMapping());
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_NE(r.warnings[0].find("keeping the first"), std::string::npos);
  EXPECT_NE(r.warnings[1].find("subject"), std::string::npos);
}

TEST(ImportTest, CharacterOffsets) {
  ImportMapping m;
  m.span_unit = "char";
  nlohmann::json record = {
      {"doc_id", "c"},
      {"text", "Costs fell sharply"},
      {"events", {{{"trigger", {{"start", 6}, {"end", 10}}},
                   {"subject", {{"start", 0}, {"end", 5}}},
                   {"polarity", "N"}}}}};
  std::vector<std::string> warnings;
  Document doc = ImportRecord(record, m, warnings);
  EXPECT_EQ(doc.events[0].trigger.start, 1);
  EXPECT_EQ(doc.events[0].trigger.end, 1);
  EXPECT_EQ(doc.events[0].argument(Role::kSubject)->end, 0);
}

TEST(ImportTest, CharacterTokenizer) {
  EXPECT_EQ(TokenizeText("利润 增长", "char"),
            (std::vector<std::string>{"利", "润", "增", "长"}));
  EXPECT_THROW(TokenizeText("x", "sentencepiece"), CorpusError);
}

TEST(ImportTest, UnknownPolarityIsError) {
  nlohmann::json record = {{"doc_id", "u"}, {"text", "a b"},
                           {"events", {{{"trigger", {{"start", 0}, {"end", 0}}},
                                        {"polarity", "mixed"}}}}};
  std::vector<std::string> warnings;
  EXPECT_THROW(ImportRecord(record, ImportMapping{}, warnings), CorpusError);
}

TEST(PublishedStatisticsTest, ReportsMismatchPerField) {
  StatsReport s;
  s.documents = 3142;
  s.events = 6177;
  s.positive_events = 3912;
  s.negative_events = 927;
  s.neutral_events = 1337;
  EXPECT_TRUE(CompareWithPublished(s).empty());
  s.negative_events = 926;
  s.documents = 10;
  std::vector<std::string> m = CompareWithPublished(s);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], "documents: expected 3142, found 10");
  EXPECT_EQ(m[1], "negative_events: expected 927, found 926");
}

}  // namespace
}  // namespace evsent
