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

#ifndef EVSENT_NN_GRAPH_H_
#define EVSENT_NN_GRAPH_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evsent/nn/parameter.h"

namespace evsent {
namespace nn {

// Handle to a node on a Graph tape. Only valid for the graph that made it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// A reverse-mode automatic differentiation tape over dense matrices.
//
// Every op appends a node holding its forward value and a closure that
// propagates the node's gradient to its inputs. Backward() walks the tape in
// reverse and finally accumulates parameter gradients into Parameter::grad.
// Nodes that do not depend on any parameter are never differentiated.
//
// A graph is built per document and discarded after the backward pass.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf nodes.
  Var Constant(Matrix value);
  Var Param(Parameter& param);

  const Matrix& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.param != nullptr ? n.param->value : n.value;
  }
  // The parameter behind a Param() leaf, else nullptr.
  Parameter* param(Var v) const { return nodes_[v.id].param; }
  double scalar(Var v) const { return value(v)(0, 0); }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Runs the backward pass from a 1x1 node, seeding its gradient with
  // `seed`. Parameter gradients are accumulated (not overwritten).
  void Backward(Var loss, double seed = 1.0);

  // Gradient of a node after Backward(); zero matrix if never reached.
  Matrix grad(Var v) const;

  // Op plumbing: add a node computed from `inputs`. `backward` receives the
  // node's output gradient and must call AccumulateGrad on inputs.
  using BackwardFn = std::function<void(Graph&, const Matrix& out_grad)>;
  Var AddNode(Matrix value, std::span<const Var> inputs, BackwardFn backward);
  void AccumulateGrad(Var v, const Matrix& g);
  template <typename Expr>
  void AccumulateGradExpr(Var v, const Expr& g) {
    Node& n = nodes_[v.id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;  // stable references across growth
};

// Differentiable operations. All shapes are (rows, cols); vectors are rows.

Var MatMul(Graph& g, Var a, Var b);
Var Add(Graph& g, Var a, Var b);
Var Sub(Graph& g, Var a, Var b);
// Adds a 1xN row to every row of an MxN matrix.
Var AddRowBroadcast(Graph& g, Var a, Var row);
Var Scale(Graph& g, Var a, double factor);
Var CwiseProduct(Graph& g, Var a, Var b);
Var Transpose(Graph& g, Var a);
Var Sum(Graph& g, Var a);

Var Gelu(Graph& g, Var a);
Var Tanh(Graph& g, Var a);
// Row-wise softmax.
Var SoftmaxRows(Graph& g, Var a);
// Row-wise layer normalization with 1xN gain and bias.
Var LayerNorm(Graph& g, Var x, Var gain, Var bias, double eps = 1e-12);

Var ConcatCols(Graph& g, std::span<const Var> parts);
Var ConcatRows(Graph& g, std::span<const Var> parts);
Var SliceCols(Graph& g, Var a, int begin, int count);
Var SliceRows(Graph& g, Var a, int begin, int count);
// Embedding lookup: row ids[i] of `table` becomes output row i.
Var GatherRows(Graph& g, Var table, std::span<const int> ids);
// Repeats row `row` of `a` `times` times.
Var RepeatRow(Graph& g, Var a, int row, int times);
// Column-wise maximum over rows [begin, begin + count). Gradient routes to the
// lowest row index among ties.
Var MaxPoolRows(Graph& g, Var a, int begin, int count);

// Inverted dropout. Identity when rate == 0 or rng == nullptr.
Var Dropout(Graph& g, Var a, double rate, std::mt19937_64* rng);

// Sum over entries of binary cross-entropy between sigmoid(logits) and the
// targets, computed stably from the logits. Positive targets are weighted by
// `positive_weight`.
Var BceWithLogitsSum(Graph& g, Var logits, const Matrix& targets,
                     double positive_weight = 1.0);
// Categorical cross-entropy of a 1xC row of logits against `target`.
Var SoftmaxCrossEntropy(Graph& g, Var logits, int target);

// Numerically stable scalar helpers shared by ops and the pure-scoring paths.
double Sigmoid(double x);
double GeluValue(double x);

}  // namespace nn
}  // namespace evsent

#endif  // EVSENT_NN_GRAPH_H_
