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

#include "evsent/trigger_extractor.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "evsent/synthetic.h"

namespace evsent {
namespace {

TriggerHead ToyHead(nn::ParameterStore& store) {
  std::mt19937_64 rng(1);
  TriggerHead head = TriggerHead::Create(store, 1, 1, 2, rng);
  store.Get("trigger.fusion.hidden.weight").value << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;
  store.Get("trigger.fusion.hidden.bias").value << 0.05, -0.05;
  store.Get("trigger.fusion.output.weight").value << 1.0, -1.0, 0.5, 2.0;
  store.Get("trigger.fusion.output.bias").value << 0.1, 0.2;
  store.Get("trigger.start.weight").value << 0.7, -0.3;
  store.Get("trigger.start.bias").value << 0.25;
  store.Get("trigger.end.weight").value << -0.4, 0.9;
  store.Get("trigger.end.bias").value << -0.1;
  return head;
}

nn::Matrix Row(std::initializer_list<double> v) {
  nn::Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

TEST(TriggerHeadTest, ToyWeightsMatchOracle) {
  nn::ParameterStore store;
  TriggerHead head = ToyHead(store);
  nn::Graph g;
  nn::Var fused = head.Fuse(g, g.Constant(Row({0.5})), g.Constant(Row({-1.0})),
                            g.Constant(Row({2.0})), 0.0, nullptr);
  // Values from tests/oracles/derive_values.py.
  EXPECT_NEAR(g.value(fused)(0, 0), 0.20311640972204395, 1e-12);
  EXPECT_NEAR(g.value(fused)(0, 1), 1.3028836602184257, 1e-12);
  TriggerScores s = ScoreTriggers(g.value(head.StartLogits(g, fused)),
                                  g.value(head.EndLogits(g, fused)));
  EXPECT_NEAR(s.p_start[0], 0.500329097137452, 1e-12);
  EXPECT_NEAR(s.p_end[0], 0.7293542395120238, 1e-12);
}

TEST(TriggerHeadTest, ZeroWeightsGiveZeroRowsAndHalfProbabilities) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  TriggerHead head = TriggerHead::Create(store, 4, 2, 3, rng);
  store.SetAll(0.0);
  nn::Graph g;
  nn::Var fused = head.Fuse(g, g.Constant(nn::Matrix::Ones(5, 4)),
                            g.Constant(nn::Matrix::Ones(5, 2)),
                            g.Constant(nn::Matrix::Ones(5, 2)), 0.0, nullptr);
  EXPECT_EQ(g.value(fused), nn::Matrix::Zero(5, 3));
  TriggerScores s = ScoreTriggers(g.value(head.StartLogits(g, fused)),
                                  g.value(head.EndLogits(g, fused)));
  for (double p : s.p_start) EXPECT_EQ(p, 0.5);
  for (double p : s.p_end) EXPECT_EQ(p, 0.5);
}

TEST(TriggerHeadTest, BiasTenGivesSigmoidTen) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  TriggerHead head = TriggerHead::Create(store, 2, 1, 2, rng);
  store.SetAll(0.0);
  store.Get("trigger.start.bias").value << 10.0;
  nn::Graph g;
  nn::Var fused = head.Fuse(g, g.Constant(nn::Matrix::Ones(3, 2)),
                            g.Constant(nn::Matrix::Ones(3, 1)),
                            g.Constant(nn::Matrix::Ones(3, 1)), 0.0, nullptr);
  TriggerScores s = ScoreTriggers(g.value(head.StartLogits(g, fused)),
                                  g.value(head.EndLogits(g, fused)));
  for (double p : s.p_start) EXPECT_NEAR(p, 0.9999546021312976, 1e-15);
}

TEST(TriggerHeadTest, WidthMismatchIsContractError) {
  nn::ParameterStore store;
  std::mt19937_64 rng(1);
  TriggerHead head = TriggerHead::Create(store, 4, 2, 3, rng);
  nn::Graph g;
  EXPECT_THROW(head.Fuse(g, g.Constant(nn::Matrix::Ones(2, 3)),
                         g.Constant(nn::Matrix::Ones(2, 2)),
                         g.Constant(nn::Matrix::Ones(2, 2)), 0.0, nullptr),
               std::invalid_argument);
}

TEST(TriggerLossTest, HalfEverywhereIsTwoLnTwo) {
  TriggerScores s{std::vector<double>(7, 0.5), std::vector<double>(7, 0.5)};
  nn::Matrix ys = nn::Matrix::Zero(7, 1), ye = nn::Matrix::Zero(7, 1);
  ys(2, 0) = 1;
  ye(3, 0) = 1;
  EXPECT_NEAR(TriggerLoss(s, ys, ye), 1.3862943611198906, 1e-12);
}

TEST(TriggerLossTest, ConfidentPredictionsBounded) {
  nn::Matrix ys = nn::Matrix::Zero(6, 1), ye = nn::Matrix::Zero(6, 1);
  ys(1, 0) = ye(2, 0) = 1;
  TriggerScores s{std::vector<double>(6, 0.0), std::vector<double>(6, 0.0)};
  s.p_start[1] = 1.0;
  s.p_end[2] = 1.0;
  EXPECT_LE(TriggerLoss(s, ys, ye), -2.0 * std::log(1.0 - kProbabilityEpsilon) + 1e-15);
}

TEST(TriggerLossTest, NodeMatchesPureLoss) {
  nn::Matrix zs(5, 1), ze(5, 1);
  zs << -1.0, 2.0, 0.3, -4.0, 0.0;
  ze << 0.5, -0.5, 3.0, 1.0, -2.0;
  nn::Matrix ys = nn::Matrix::Zero(5, 1), ye = nn::Matrix::Zero(5, 1);
  ys(1, 0) = ye(2, 0) = 1;
  nn::Graph g;
  const double node = g.scalar(TriggerLossNode(g, g.Constant(zs), g.Constant(ze), ys, ye));
  EXPECT_NEAR(node, TriggerLoss(ScoreTriggers(zs, ze), ys, ye), 1e-9);
}

TriggerScores Peaks(int m, const std::set<int>& starts, const std::set<int>& ends) {
  TriggerScores s{std::vector<double>(static_cast<size_t>(m), 0.1),
                  std::vector<double>(static_cast<size_t>(m), 0.1)};
  for (int i : starts) s.p_start[static_cast<size_t>(i)] = 0.9;
  for (int j : ends) s.p_end[static_cast<size_t>(j)] = 0.9;
  return s;
}

TEST(TriggerDecodeTest, SubThresholdIsEmpty) {
  EXPECT_TRUE(DecodeTriggerSpans(Peaks(8, {}, {2}), {}).empty());
}

TEST(TriggerDecodeTest, TwoPeaks) {
  std::vector<SpanBounds> spans = DecodeTriggerSpans(Peaks(11, {2, 7}, {3, 8}), {});
  EXPECT_EQ(spans, (std::vector<SpanBounds>{{2, 3}, {7, 8}}));
}

TEST(TriggerDecodeTest, MissingEndFallsBackToSingleToken) {
  EXPECT_EQ(DecodeTriggerSpans(Peaks(8, {4}, {2}), {}),
            (std::vector<SpanBounds>{{4, 4}}));
}

TEST(TriggerDecodeTest, BoundaryTokensMasked) {
  EXPECT_TRUE(DecodeTriggerSpans(Peaks(6, {0, 5}, {0, 5}), {}).empty());
}

// Brute force: enumerate every (i, j) pair satisfying the constraints and
// keep, per start, the smallest end.
std::vector<SpanBounds> OracleTriggers(const TriggerScores& s, double tau,
                                       int max_length, int first, int last) {
  std::vector<int> starts;
  for (int i = first; i <= last; ++i) {
    if (s.p_start[static_cast<size_t>(i)] >= tau) starts.push_back(i);
  }
  std::map<int, int> chosen;
  for (int i : starts) chosen[i] = i;
  std::map<int, std::set<int>> candidates;
  for (int i : starts) {
    for (int j = first; j <= last; ++j) {
      const bool end_ok = s.p_end[static_cast<size_t>(j)] >= tau;
      const bool length_ok = j >= i && j - i + 1 <= max_length;
      bool crosses = false;
      for (int k : starts) crosses = crosses || (k > i && k <= j);
      if (end_ok && length_ok && !crosses) candidates[i].insert(j);
    }
  }
  std::vector<SpanBounds> out;
  for (int i : starts) {
    out.emplace_back(i, candidates[i].empty() ? i : *candidates[i].begin());
  }
  return out;
}

TEST(TriggerDecodeTest, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(2024);
  const double levels[] = {0.05, 0.3, 0.5, 0.6, 0.95};
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 10);  // 3..12
    TriggerScores s;
    for (int i = 0; i < m; ++i) {
      s.p_start.push_back(levels[rng() % 5]);
      s.p_end.push_back(levels[rng() % 5]);
    }
    SpanDecodeConfig config{(rng() % 2) ? 0.5 : 0.6, 1 + static_cast<int>(rng() % 5)};
    ASSERT_EQ(DecodeTriggerSpans(s, config),
              OracleTriggers(s, config.threshold, config.max_length, 1, m - 2))
        << "trial " << trial;
  }
}

TEST(TriggerDecodeTest, GoldLabelsDecodeToGoldSpans) {
  SynthConfig config;
  config.num_documents = 200;
  for (const Document& doc : GenerateSynthetic(config, 17)) {
    LabelTensors labels = BuildLabelTensors(doc);
    TriggerScores s;
    for (int p = 0; p < labels.length; ++p) {
      s.p_start.push_back(labels.trigger_start(p, 0));
      s.p_end.push_back(labels.trigger_end(p, 0));
    }
    std::set<SpanBounds> gold;
    for (const Event& e : doc.events) {
      gold.emplace(ToSequence(e.trigger.start), ToSequence(e.trigger.end));
    }
    std::vector<SpanBounds> decoded = DecodeTriggerSpans(s, {0.5, 10});
    EXPECT_EQ(std::set<SpanBounds>(decoded.begin(), decoded.end()), gold) << doc.doc_id;
    EXPECT_EQ(decoded.size(), gold.size()) << doc.doc_id;
  }
}

}  // namespace
}  // namespace evsent
