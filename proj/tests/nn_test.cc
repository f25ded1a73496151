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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "evsent/nn/graph.h"
#include "evsent/nn/layers.h"
#include "evsent/nn/optimizer.h"
#include "evsent/nn/parameter.h"
#include "evsent/nn/tensor_file.h"
#include "test_util.h"

namespace evsent {
namespace nn {
namespace {

Matrix RandomMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

using Op = std::function<Var(Graph&, std::vector<Var>&)>;

// Compares backprop through `op` with central differences of the scalar
// sum(op(inputs) .* R) for a fixed random R.
double MaxGradError(const std::vector<std::pair<int, int>>& shapes, const Op& op,
                    uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  ParameterStore store;
  std::vector<Parameter*> params;
  for (size_t k = 0; k < shapes.size(); ++k) {
    Parameter& p = store.Create("p" + std::to_string(k), shapes[k].first,
                                shapes[k].second);
    p.value = RandomMatrix(shapes[k].first, shapes[k].second, rng);
    params.push_back(&p);
  }
  Matrix weights;
  auto forward = [&](bool backward) {
    Graph g;
    std::vector<Var> in;
    for (Parameter* p : params) in.push_back(g.Param(*p));
    Var out = op(g, in);
    if (weights.size() == 0) {
      weights = RandomMatrix(static_cast<int>(g.value(out).rows()),
                             static_cast<int>(g.value(out).cols()), rng);
    }
    Var loss = Sum(g, CwiseProduct(g, out, g.Constant(weights)));
    if (backward) g.Backward(loss);
    return g.scalar(loss);
  };
  store.ZeroGrad();
  forward(true);
  double worst = 0.0;
  const double h = 1e-6;
  for (Parameter* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double saved = p->value.data()[i];
      p->value.data()[i] = saved + h;
      const double up = forward(false);
      p->value.data()[i] = saved - h;
      const double down = forward(false);
      p->value.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - p->grad.data()[i]) /
                                  std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

constexpr double kTol = 1e-6;

TEST(GraphGradTest, ElementwiseAndLinear) {
  EXPECT_LT(MaxGradError({{3, 4}, {4, 2}}, [](Graph& g, std::vector<Var>& v) {
              return MatMul(g, v[0], v[1]);
            }), kTol);
  EXPECT_LT(MaxGradError({{3, 4}, {3, 4}}, [](Graph& g, std::vector<Var>& v) {
              return Sub(g, Add(g, v[0], v[1]), CwiseProduct(g, v[0], v[1]));
            }), kTol);
  EXPECT_LT(MaxGradError({{3, 4}, {1, 4}}, [](Graph& g, std::vector<Var>& v) {
              return Scale(g, AddRowBroadcast(g, v[0], v[1]), -2.5);
            }), kTol);
  EXPECT_LT(MaxGradError({{3, 4}}, [](Graph& g, std::vector<Var>& v) {
              return Transpose(g, Tanh(g, Gelu(g, v[0])));
            }), kTol);
}

TEST(GraphGradTest, NormalizationAndSoftmax) {
  EXPECT_LT(MaxGradError({{3, 5}}, [](Graph& g, std::vector<Var>& v) {
              return SoftmaxRows(g, v[0]);
            }), kTol);
  EXPECT_LT(MaxGradError({{3, 5}, {1, 5}, {1, 5}},
                         [](Graph& g, std::vector<Var>& v) {
                           return LayerNorm(g, v[0], v[1], v[2], 1e-12);
                         }), 1e-5);
}

TEST(GraphGradTest, Structural) {
  EXPECT_LT(MaxGradError({{3, 2}, {3, 3}}, [](Graph& g, std::vector<Var>& v) {
              const Var parts[] = {v[0], v[1], v[0]};
              return SliceCols(g, ConcatCols(g, parts), 1, 5);
            }), kTol);
  EXPECT_LT(MaxGradError({{2, 3}, {4, 3}}, [](Graph& g, std::vector<Var>& v) {
              const Var parts[] = {v[1], v[0]};
              return SliceRows(g, ConcatRows(g, parts), 1, 4);
            }), kTol);
  EXPECT_LT(MaxGradError({{5, 3}}, [](Graph& g, std::vector<Var>& v) {
              const int ids[] = {4, 0, 4, 2};
              return GatherRows(g, v[0], ids);
            }), kTol);
  EXPECT_LT(MaxGradError({{4, 3}}, [](Graph& g, std::vector<Var>& v) {
              return RepeatRow(g, v[0], 2, 5);
            }), kTol);
  EXPECT_LT(MaxGradError({{6, 4}}, [](Graph& g, std::vector<Var>& v) {
              return MaxPoolRows(g, v[0], 1, 4);
            }), kTol);
}

TEST(GraphGradTest, Losses) {
  Matrix targets(4, 2);
  targets << 1, 0, 0, 1, 0, 0, 1, 1;
  EXPECT_LT(MaxGradError({{4, 2}}, [&](Graph& g, std::vector<Var>& v) {
              return BceWithLogitsSum(g, v[0], targets, 3.0);
            }), kTol);
  EXPECT_LT(MaxGradError({{1, 3}}, [](Graph& g, std::vector<Var>& v) {
              return SoftmaxCrossEntropy(g, v[0], 2);
            }), kTol);
}

TEST(GraphTest, BceClosedForm) {
  Graph g;
  Var z = g.Constant(Matrix::Zero(3, 1));
  EXPECT_NEAR(g.scalar(BceWithLogitsSum(g, z, Matrix::Ones(3, 1))),
              3 * std::log(2.0), 1e-12);
  Var big = g.Constant(Matrix::Constant(1, 1, 800.0));
  const double loss = g.scalar(BceWithLogitsSum(g, big, Matrix::Zero(1, 1)));
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 800.0, 1e-9);
  EXPECT_NEAR(Sigmoid(10.0), 0.9999546021312976, 1e-15);
  EXPECT_NEAR(Sigmoid(-800.0), 0.0, 1e-300);
}

TEST(GraphTest, MaxPoolPermutationInvariant) {
  std::mt19937_64 rng(3);
  Matrix x = RandomMatrix(7, 5, rng);
  Graph g;
  const Matrix pooled = g.value(MaxPoolRows(g, g.Constant(x), 1, 5));
  std::vector<int> order = {1, 2, 3, 4, 5};
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    Matrix y = x;
    for (int k = 0; k < 5; ++k) y.row(1 + k) = x.row(order[static_cast<size_t>(k)]);
    Graph h;
    EXPECT_EQ(h.value(MaxPoolRows(h, h.Constant(y), 1, 5)), pooled);
  }
}

TEST(GraphTest, MaxPoolTiesRouteToLowestRow) {
  ParameterStore store;
  Parameter& p = store.Create("x", 3, 1);
  p.value << 2.0, 2.0, 1.0;
  store.ZeroGrad();
  Graph g;
  g.Backward(Sum(g, MaxPoolRows(g, g.Param(p), 0, 3)));
  EXPECT_EQ(p.grad(0, 0), 1.0);
  EXPECT_EQ(p.grad(1, 0), 0.0);
  EXPECT_EQ(p.grad(2, 0), 0.0);
}

TEST(GraphTest, SoftmaxShiftInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x = RandomMatrix(1, 3, rng) * 5.0;
    const double c = std::uniform_real_distribution<double>(-100, 100)(rng);
    Graph g;
    const Matrix a = g.value(SoftmaxRows(g, g.Constant(x)));
    const Matrix b = g.value(SoftmaxRows(g, g.Constant(x.array() + c)));
    Eigen::Index ia, ib;
    a.row(0).maxCoeff(&ia);
    b.row(0).maxCoeff(&ib);
    EXPECT_EQ(ia, ib);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GraphTest, DropoutIdentityWithoutRng) {
  std::mt19937_64 rng(1);
  Matrix x = RandomMatrix(4, 4, rng);
  Graph g;
  EXPECT_EQ(g.value(Dropout(g, g.Constant(x), 0.5, nullptr)), x);
  EXPECT_EQ(g.value(Dropout(g, g.Constant(x), 0.0, &rng)), x);
  const Matrix d = g.value(Dropout(g, g.Constant(x), 0.5, &rng));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    EXPECT_TRUE(d.data()[i] == 0.0 || std::abs(d.data()[i] - 2 * x.data()[i]) < 1e-12);
  }
}

TEST(AdamTest, MinimizesQuadratic) {
  ParameterStore store;
  Parameter& p = store.Create("w", 1, 2);
  p.value << 3.0, -2.0;
  Adam adam({.learning_rate = 0.1, .clip_norm = 0.0});
  for (int step = 0; step < 500; ++step) {
    store.ZeroGrad();
    Graph g;
    Var w = g.Param(p);
    g.Backward(Sum(g, CwiseProduct(g, w, w)));
    adam.Step({&p});
  }
  EXPECT_LT(p.value.cwiseAbs().maxCoeff(), 1e-2);
  EXPECT_EQ(adam.steps(), 500);
}

TEST(AdamTest, FrozenParametersUntouched) {
  ParameterStore store;
  Parameter& p = store.Create("w", 1, 1);
  p.value << 1.0;
  p.trainable = false;
  p.grad = Matrix::Ones(1, 1);
  Adam adam({});
  adam.Step({&p});
  EXPECT_EQ(p.value(0, 0), 1.0);
}

TEST(TensorFileTest, RoundTripAndErrors) {
  testing_util::TempDir dir("tensors");
  std::mt19937_64 rng(2);
  ParameterStore store;
  store.Create("a.weight", 3, 4).value = RandomMatrix(3, 4, rng);
  store.Create("b.bias", 1, 4).value = RandomMatrix(1, 4, rng);
  SaveParameters(store, dir.File("w.bin"));

  ParameterStore copy;
  copy.Create("a.weight", 3, 4);
  copy.Create("b.bias", 1, 4);
  LoadParameters(copy, dir.File("w.bin"));
  EXPECT_EQ(copy.Get("a.weight").value, store.Get("a.weight").value);
  EXPECT_EQ(copy.Get("b.bias").value, store.Get("b.bias").value);

  ParameterStore wrong;
  wrong.Create("a.weight", 4, 3);
  wrong.Create("c.extra", 1, 1);
  try {
    LoadParameters(wrong, dir.File("w.bin"));
    FAIL() << "expected TensorFileError";
  } catch (const TensorFileError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a.weight (expected 4x3, found 3x4)"), std::string::npos);
    EXPECT_NE(msg.find("c.extra (missing)"), std::string::npos);
  }
  EXPECT_THROW(ReadTensorFile(dir.File("nope.bin")), TensorFileError);
  testing_util::WriteFile(dir.File("junk.bin"), "JUNKJUNK");
  EXPECT_THROW(ReadTensorFile(dir.File("junk.bin")), TensorFileError);
}

TEST(TensorFileTest, Float32Rank1) {
  testing_util::TempDir dir("tensors");
  Matrix v(1, 3);
  v << 0.5, -1.25, 3.0;
  WriteTensorFile(dir.File("f.bin"), {{"v", v, 1}}, DType::kFloat32);
  std::vector<NamedTensor> t = ReadTensorFile(dir.File("f.bin"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].rank, 1);
  EXPECT_EQ(t[0].value, v);
}

}  // namespace
}  // namespace nn
}  // namespace evsent
