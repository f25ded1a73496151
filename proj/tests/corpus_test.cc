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

#include "evsent/corpus.h"

#include <gtest/gtest.h>

#include <set>

#include "test_util.h"

namespace evsent {
namespace {

using testing_util::DataPath;
using testing_util::MakeEvent;
using testing_util::PlainDocument;
using testing_util::TempDir;

TEST(CorpusIoTest, ZeroEventDocument) {
  Corpus corpus = LoadJsonl(DataPath("zero_events.jsonl"));
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_TRUE(corpus[0].events.empty());
}

TEST(CorpusIoTest, FourEventsKeepOrder) {
  Corpus corpus = LoadJsonl(DataPath("four_events.jsonl"));
  ASSERT_EQ(corpus.size(), 1u);
  const std::vector<Event>& events = corpus[0].events;
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].polarity, Polarity::kPositive);
  EXPECT_EQ(events[1].polarity, Polarity::kNegative);
  EXPECT_EQ(events[2].polarity, Polarity::kPositive);
  EXPECT_EQ(events[3].polarity, Polarity::kNegative);
  EXPECT_EQ(events[0].trigger.text, "increased");
  EXPECT_EQ(events[1].trigger.text, "increased");
  EXPECT_EQ(events[0].argument(Role::kTime)->text, "May");
}

TEST(CorpusIoTest, OutOfBoundsNamesDocument) {
  LoadResult result = ReadJsonl(DataPath("out_of_bounds.jsonl"));
  EXPECT_TRUE(result.documents.empty());
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_EQ(result.errors[0].line, 1);
  EXPECT_EQ(result.errors[0].doc_id, "oob-doc");
  try {
    LoadJsonl(DataPath("out_of_bounds.jsonl"));
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    EXPECT_NE(std::string(e.what()).find("oob-doc"), std::string::npos);
  }
}

TEST(CorpusIoTest, UnknownPolarityRejected) {
  LoadResult result = ReadJsonl(DataPath("bad_polarity.jsonl"));
  EXPECT_TRUE(result.documents.empty());
  ASSERT_EQ(result.errors.size(), 1u);
}

TEST(CorpusIoTest, MalformedJsonIsParseError) {
  TempDir dir("corpus");
  testing_util::WriteFile(dir.File("bad.jsonl"), "{\"doc_id\": \n");
  LoadResult result = ReadJsonl(dir.File("bad.jsonl"));
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_NE(result.errors[0].message.find("parse"), std::string::npos);
}

TEST(CorpusIoTest, RoundTrip) {
  TempDir dir("corpus");
  Corpus corpus = LoadJsonl(DataPath("four_events.jsonl"));
  WriteJsonl(dir.File("out.jsonl"), corpus);
  Corpus again = LoadJsonl(dir.File("out.jsonl"));
  EXPECT_EQ(corpus, again);
  EXPECT_EQ(SerializeJsonl(corpus), SerializeJsonl(again));
}

TEST(SpanTextTest, FallsBackToJoinedTokens) {
  Document doc = PlainDocument(3);
  EXPECT_EQ(SpanText(doc, 0, 1), "w0 w1");
  doc.text = "unrelated";
  EXPECT_EQ(SpanText(doc, 1, 2), "w1 w2");
}

TEST(LabelTensorsTest, ZeroEvents) {
  LabelTensors t = BuildLabelTensors(PlainDocument(5));
  EXPECT_EQ(t.length, 7);
  EXPECT_EQ(t.trigger_start.sum(), 0.0);
  EXPECT_EQ(t.trigger_end.sum(), 0.0);
  EXPECT_TRUE(t.roles.empty());
  EXPECT_TRUE(t.polarity_ids.empty());
}

TEST(LabelTensorsTest, SingleTokenTrigger) {
  Document doc = PlainDocument(6);
  doc.events.push_back(MakeEvent(doc, 3, 3));
  LabelTensors t = BuildLabelTensors(doc);
  for (int p = 0; p < t.length; ++p) {
    const double want = p == ToSequence(3) ? 1.0 : 0.0;
    EXPECT_EQ(t.trigger_start(p, 0), want) << p;
    EXPECT_EQ(t.trigger_end(p, 0), want) << p;
  }
}

TEST(LabelTensorsTest, TwoTriggersMatchEnumeration) {
  Document doc = PlainDocument(10);
  doc.events.push_back(MakeEvent(doc, 2, 3, Polarity::kNegative));
  doc.events.push_back(MakeEvent(doc, 7, 8, Polarity::kNeutral));
  doc.events[0].argument(Role::kObject) = MakeSpan(doc, 5, 6);
  LabelTensors t = BuildLabelTensors(doc);
  std::set<int> starts, ends;
  for (const Event& e : doc.events) {
    starts.insert(ToSequence(e.trigger.start));
    ends.insert(ToSequence(e.trigger.end));
  }
  for (int p = 0; p < t.length; ++p) {
    EXPECT_EQ(t.trigger_start(p, 0), starts.count(p) ? 1.0 : 0.0);
    EXPECT_EQ(t.trigger_end(p, 0), ends.count(p) ? 1.0 : 0.0);
  }
  EXPECT_EQ(t.trigger_start(0, 0) + t.trigger_start(t.length - 1, 0), 0.0);
  ASSERT_EQ(t.roles.size(), 2u);
  const int object = static_cast<int>(Role::kObject);
  EXPECT_EQ(t.roles[0].start.sum(), 1.0);
  EXPECT_EQ(t.roles[0].start(ToSequence(5), object), 1.0);
  EXPECT_EQ(t.roles[0].end(ToSequence(6), object), 1.0);
  EXPECT_EQ(t.roles[1].start.sum(), 0.0);
  EXPECT_EQ(t.polarity_ids, (std::vector<int>{1, 2}));
}

TEST(SplitTest, Sizes) {
  Corpus corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back(PlainDocument(2, "d" + std::to_string(i)));
  CorpusSplits s = Split(corpus, {0.8, 0.1, 0.1}, 5);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.dev.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
  CorpusSplits again = Split(corpus, {0.8, 0.1, 0.1}, 5);
  EXPECT_EQ(s.train, again.train);
  EXPECT_EQ(s.dev, again.dev);
  EXPECT_THROW(Split(corpus, {0.8, 0.1, 0.2}, 5), CorpusError);
}

TEST(StatsTest, EmptyCorpus) {
  StatsReport s = CorpusStats({});
  EXPECT_EQ(s.documents, 0);
  EXPECT_EQ(s.events, 0);
  EXPECT_EQ(s.average_length, 0.0);
  EXPECT_EQ(s.multi_polarity_documents, 0);
}

TEST(StatsTest, MultiPolarity) {
  Document doc = PlainDocument(6);
  doc.events.push_back(MakeEvent(doc, 1, 1, Polarity::kPositive));
  doc.events.push_back(MakeEvent(doc, 3, 3, Polarity::kNegative));
  StatsReport s = CorpusStats({doc});
  EXPECT_EQ(s.multi_polarity_documents, 1);
  EXPECT_EQ(s.multi_event_documents, 1);
  EXPECT_EQ(s.positive_events, 1);
  EXPECT_EQ(s.negative_events, 1);
}

TEST(StatsTest, CrossSentence) {
  Document doc = PlainDocument(8);
  doc.sentence_boundaries = {0, 4};
  Event e = MakeEvent(doc, 5, 5);
  EXPECT_FALSE(IsCrossSentence(doc, e));
  e.argument(Role::kTime) = MakeSpan(doc, 1, 1);
  EXPECT_TRUE(IsCrossSentence(doc, e));
}

TEST(TruncateTest, DropsEventsAndArguments) {
  Document doc = PlainDocument(10);
  doc.events.push_back(MakeEvent(doc, 1, 1));
  doc.events.back().argument(Role::kObject) = MakeSpan(doc, 7, 8);
  doc.events.push_back(MakeEvent(doc, 6, 6));
  Truncate(doc, 5);
  EXPECT_TRUE(doc.truncated);
  EXPECT_EQ(doc.num_tokens(), 5);
  EXPECT_EQ(doc.text, "w0 w1 w2 w3 w4");
  ASSERT_EQ(doc.events.size(), 1u);
  EXPECT_FALSE(doc.events[0].argument(Role::kObject).has_value());
  EXPECT_EQ(doc.dropped_events, 1);
  EXPECT_TRUE(ValidateDocument(doc).empty());
}

}  // namespace
}  // namespace evsent
