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

#include "evsent/nn/graph.h"

#include <cmath>
#include <stdexcept>

namespace evsent {
namespace nn {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void CheckSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double GeluValue(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

Var Graph::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::Param(Parameter& param) {
  Node n;
  n.param = &param;
  n.requires_grad = param.trainable;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::AddNode(Matrix value, std::span<const Var> inputs,
                   BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (Var in : inputs) {
    if (nodes_[in.id].requires_grad) {
      n.requires_grad = true;
      break;
    }
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Graph::AccumulateGrad(Var v, const Matrix& g) { AccumulateGradExpr(v, g); }

void Graph::Backward(Var loss, double seed) {
  if (value(loss).size() != 1) {
    throw std::invalid_argument("Backward: loss must be 1x1");
  }
  Node& root = nodes_[loss.id];
  if (!root.requires_grad) return;
  root.grad = Matrix::Constant(1, 1, seed);
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, n.grad);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

Matrix Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.size() == 0) return Matrix::Zero(value(v).rows(), value(v).cols());
  return n.grad;
}

Var MatMul(Graph& g, Var a, Var b) {
  const Matrix& av = g.value(a);
  const Matrix& bv = g.value(b);
  if (av.cols() != bv.rows()) {
    throw std::invalid_argument(
        "MatMul: inner dimensions differ (" + std::to_string(av.cols()) +
        " vs " + std::to_string(bv.rows()) + ")");
  }
  Matrix out = av * bv;
  const Var inputs[] = {a, b};
  return g.AddNode(std::move(out), inputs, [a, b](Graph& g, const Matrix& dg) {
    if (g.requires_grad(a)) g.AccumulateGradExpr(a, dg * g.value(b).transpose());
    if (g.requires_grad(b)) g.AccumulateGradExpr(b, g.value(a).transpose() * dg);
  });
}

Var Add(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "Add");
  Matrix out = g.value(a) + g.value(b);
  const Var inputs[] = {a, b};
  return g.AddNode(std::move(out), inputs, [a, b](Graph& g, const Matrix& dg) {
    g.AccumulateGrad(a, dg);
    g.AccumulateGrad(b, dg);
  });
}

Var Sub(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "Sub");
  Matrix out = g.value(a) - g.value(b);
  const Var inputs[] = {a, b};
  return g.AddNode(std::move(out), inputs, [a, b](Graph& g, const Matrix& dg) {
    g.AccumulateGrad(a, dg);
    if (g.requires_grad(b)) g.AccumulateGradExpr(b, -dg);
  });
}

Var AddRowBroadcast(Graph& g, Var a, Var row) {
  const Matrix& av = g.value(a);
  const Matrix& rv = g.value(row);
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::invalid_argument("AddRowBroadcast: bias must be 1x" +
                                std::to_string(av.cols()));
  }
  Matrix out = av.rowwise() + rv.row(0);
  const Var inputs[] = {a, row};
  return g.AddNode(std::move(out), inputs,
                   [a, row](Graph& g, const Matrix& dg) {
                     g.AccumulateGrad(a, dg);
                     if (g.requires_grad(row)) {
                       g.AccumulateGradExpr(row, dg.colwise().sum());
                     }
                   });
}

Var Scale(Graph& g, Var a, double factor) {
  Matrix out = g.value(a) * factor;
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, factor](Graph& g, const Matrix& dg) {
                     g.AccumulateGradExpr(a, dg * factor);
                   });
}

Var CwiseProduct(Graph& g, Var a, Var b) {
  CheckSameShape(g.value(a), g.value(b), "CwiseProduct");
  Matrix out = g.value(a).cwiseProduct(g.value(b));
  const Var inputs[] = {a, b};
  return g.AddNode(std::move(out), inputs, [a, b](Graph& g, const Matrix& dg) {
    if (g.requires_grad(a)) g.AccumulateGradExpr(a, dg.cwiseProduct(g.value(b)));
    if (g.requires_grad(b)) g.AccumulateGradExpr(b, dg.cwiseProduct(g.value(a)));
  });
}

Var Transpose(Graph& g, Var a) {
  Matrix out = g.value(a).transpose();
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs, [a](Graph& g, const Matrix& dg) {
    g.AccumulateGradExpr(a, dg.transpose());
  });
}

Var Sum(Graph& g, Var a) {
  Matrix out(1, 1);
  out(0, 0) = g.value(a).sum();
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs, [a](Graph& g, const Matrix& dg) {
    const Matrix& av = g.value(a);
    g.AccumulateGradExpr(a, Matrix::Constant(av.rows(), av.cols(), dg(0, 0)));
  });
}

Var Gelu(Graph& g, Var a) {
  Matrix out = g.value(a).unaryExpr([](double x) { return GeluValue(x); });
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs, [a](Graph& g, const Matrix& dg) {
    Matrix d = g.value(a).unaryExpr([](double x) {
      const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return cdf + x * pdf;
    });
    g.AccumulateGradExpr(a, dg.cwiseProduct(d));
  });
}

Var Tanh(Graph& g, Var a) {
  Matrix out = g.value(a).array().tanh().matrix();
  Matrix deriv = (1.0 - out.array().square()).matrix();
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, deriv = std::move(deriv)](Graph& g, const Matrix& dg) {
                     g.AccumulateGradExpr(a, dg.cwiseProduct(deriv));
                   });
}

Var SoftmaxRows(Graph& g, Var a) {
  const Matrix& av = g.value(a);
  Matrix out(av.rows(), av.cols());
  for (Eigen::Index r = 0; r < av.rows(); ++r) {
    const double mx = av.row(r).maxCoeff();
    out.row(r) = (av.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  Matrix saved = out;
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, s = std::move(saved)](Graph& g, const Matrix& dg) {
                     Eigen::VectorXd dot =
                         dg.cwiseProduct(s).rowwise().sum();
                     Matrix d = s.cwiseProduct(
                         (dg.colwise() - dot));
                     g.AccumulateGrad(a, d);
                   });
}

Var LayerNorm(Graph& g, Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = g.value(x);
  const Matrix& gv = g.value(gain);
  const Matrix& bv = g.value(bias);
  const Eigen::Index n = xv.cols();
  if (gv.rows() != 1 || gv.cols() != n || bv.rows() != 1 || bv.cols() != n) {
    throw std::invalid_argument("LayerNorm: gain/bias must be 1x" +
                                std::to_string(n));
  }
  Matrix xhat(xv.rows(), n);
  Eigen::VectorXd inv_std(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mu = xv.row(r).mean();
    const double var = (xv.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gv.row(0).array()).matrix();
  out.rowwise() += bv.row(0);
  const Var inputs[] = {x, gain, bias};
  return g.AddNode(
      std::move(out), inputs,
      [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          Graph& g, const Matrix& dg) {
        if (g.requires_grad(gain)) {
          g.AccumulateGradExpr(gain, dg.cwiseProduct(xhat).colwise().sum());
        }
        if (g.requires_grad(bias)) {
          g.AccumulateGradExpr(bias, dg.colwise().sum());
        }
        if (g.requires_grad(x)) {
          const Matrix& gv = g.value(gain);
          const double n = static_cast<double>(xhat.cols());
          Matrix dxhat = (dg.array().rowwise() * gv.row(0).array()).matrix();
          Eigen::VectorXd sum_d = dxhat.rowwise().sum();
          Eigen::VectorXd sum_dx = dxhat.cwiseProduct(xhat).rowwise().sum();
          Matrix dx(xhat.rows(), xhat.cols());
          for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
            dx.row(r) = (inv_std(r) / n) *
                        (n * dxhat.row(r).array() - sum_d(r) -
                         xhat.row(r).array() * sum_dx(r))
                            .matrix();
          }
          g.AccumulateGrad(x, dx);
        }
      });
}

Var ConcatCols(Graph& g, std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no inputs");
  const Eigen::Index rows = g.value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (g.value(p).rows() != rows) {
      throw std::invalid_argument("ConcatCols: row count mismatch");
    }
    cols += g.value(p).cols();
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  std::vector<Var> saved(parts.begin(), parts.end());
  for (Var p : parts) {
    out.middleCols(offset, g.value(p).cols()) = g.value(p);
    offset += g.value(p).cols();
  }
  return g.AddNode(std::move(out), parts,
                   [saved](Graph& g, const Matrix& dg) {
                     Eigen::Index off = 0;
                     for (Var p : saved) {
                       const Eigen::Index c = g.value(p).cols();
                       if (g.requires_grad(p)) {
                         g.AccumulateGradExpr(p, dg.middleCols(off, c));
                       }
                       off += c;
                     }
                   });
}

Var ConcatRows(Graph& g, std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatRows: no inputs");
  const Eigen::Index cols = g.value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    if (g.value(p).cols() != cols) {
      throw std::invalid_argument("ConcatRows: column count mismatch");
    }
    rows += g.value(p).rows();
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  std::vector<Var> saved(parts.begin(), parts.end());
  for (Var p : parts) {
    out.middleRows(offset, g.value(p).rows()) = g.value(p);
    offset += g.value(p).rows();
  }
  return g.AddNode(std::move(out), parts,
                   [saved](Graph& g, const Matrix& dg) {
                     Eigen::Index off = 0;
                     for (Var p : saved) {
                       const Eigen::Index r = g.value(p).rows();
                       if (g.requires_grad(p)) {
                         g.AccumulateGradExpr(p, dg.middleRows(off, r));
                       }
                       off += r;
                     }
                   });
}

Var SliceCols(Graph& g, Var a, int begin, int count) {
  const Matrix& av = g.value(a);
  if (begin < 0 || count < 0 || begin + count > av.cols()) {
    throw std::out_of_range("SliceCols: range out of bounds");
  }
  Matrix out = av.middleCols(begin, count);
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, begin, count](Graph& g, const Matrix& dg) {
                     const Matrix& av = g.value(a);
                     Matrix d = Matrix::Zero(av.rows(), av.cols());
                     d.middleCols(begin, count) = dg;
                     g.AccumulateGrad(a, d);
                   });
}

Var SliceRows(Graph& g, Var a, int begin, int count) {
  const Matrix& av = g.value(a);
  if (begin < 0 || count < 0 || begin + count > av.rows()) {
    throw std::out_of_range("SliceRows: range out of bounds");
  }
  Matrix out = av.middleRows(begin, count);
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, begin, count](Graph& g, const Matrix& dg) {
                     const Matrix& av = g.value(a);
                     Matrix d = Matrix::Zero(av.rows(), av.cols());
                     d.middleRows(begin, count) = dg;
                     g.AccumulateGrad(a, d);
                   });
}

Var GatherRows(Graph& g, Var table, std::span<const int> ids) {
  const Matrix& tv = g.value(table);
  Matrix out(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tv.rows()) {
      throw std::out_of_range("GatherRows: id " + std::to_string(ids[i]) +
                              " outside table of " +
                              std::to_string(tv.rows()) + " rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  const Var inputs[] = {table};
  return g.AddNode(std::move(out), inputs,
                   [table, saved = std::move(saved)](Graph& g,
                                                     const Matrix& dg) {
                     // Embedding tables: scatter straight into the
                     // parameter gradient instead of a dense temporary.
                     if (Parameter* p = g.param(table)) {
                       for (size_t i = 0; i < saved.size(); ++i) {
                         p->grad.row(saved[i]) +=
                             dg.row(static_cast<Eigen::Index>(i));
                       }
                       return;
                     }
                     const Matrix& tv = g.value(table);
                     Matrix d = Matrix::Zero(tv.rows(), tv.cols());
                     for (size_t i = 0; i < saved.size(); ++i) {
                       d.row(saved[i]) += dg.row(static_cast<Eigen::Index>(i));
                     }
                     g.AccumulateGrad(table, d);
                   });
}

Var RepeatRow(Graph& g, Var a, int row, int times) {
  const Matrix& av = g.value(a);
  if (row < 0 || row >= av.rows()) {
    throw std::out_of_range("RepeatRow: row " + std::to_string(row) +
                            " out of bounds");
  }
  Matrix out = av.row(row).replicate(times, 1);
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, row](Graph& g, const Matrix& dg) {
                     const Matrix& av = g.value(a);
                     Matrix d = Matrix::Zero(av.rows(), av.cols());
                     d.row(row) = dg.colwise().sum();
                     g.AccumulateGrad(a, d);
                   });
}

Var MaxPoolRows(Graph& g, Var a, int begin, int count) {
  const Matrix& av = g.value(a);
  if (count <= 0 || begin < 0 || begin + count > av.rows()) {
    throw std::out_of_range("MaxPoolRows: empty or out-of-bounds row range");
  }
  Matrix out(1, av.cols());
  std::vector<int> argmax(static_cast<size_t>(av.cols()));
  for (Eigen::Index c = 0; c < av.cols(); ++c) {
    int best = begin;
    for (int r = begin + 1; r < begin + count; ++r) {
      if (av(r, c) > av(best, c)) best = r;
    }
    argmax[static_cast<size_t>(c)] = best;
    out(0, c) = av(best, c);
  }
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, argmax = std::move(argmax)](Graph& g,
                                                   const Matrix& dg) {
                     const Matrix& av = g.value(a);
                     Matrix d = Matrix::Zero(av.rows(), av.cols());
                     for (size_t c = 0; c < argmax.size(); ++c) {
                       d(argmax[c], static_cast<Eigen::Index>(c)) =
                           dg(0, static_cast<Eigen::Index>(c));
                     }
                     g.AccumulateGrad(a, d);
                   });
}

Var Dropout(Graph& g, Var a, double rate, std::mt19937_64* rng) {
  if (rate <= 0.0 || rng == nullptr) return a;
  const Matrix& av = g.value(a);
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(av.rows(), av.cols());
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(*rng) ? scale : 0.0;
  }
  Matrix out = av.cwiseProduct(mask);
  const Var inputs[] = {a};
  return g.AddNode(std::move(out), inputs,
                   [a, mask = std::move(mask)](Graph& g, const Matrix& dg) {
                     g.AccumulateGradExpr(a, dg.cwiseProduct(mask));
                   });
}

Var BceWithLogitsSum(Graph& g, Var logits, const Matrix& targets,
                     double positive_weight) {
  const Matrix& z = g.value(logits);
  CheckSameShape(z, targets, "BceWithLogitsSum");
  auto softplus = [](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  };
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z.data()[i];
    const double y = targets.data()[i];
    total += positive_weight * y * softplus(-x) + (1.0 - y) * softplus(x);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  const Var inputs[] = {logits};
  return g.AddNode(
      std::move(out), inputs,
      [logits, targets, positive_weight](Graph& g, const Matrix& dg) {
        const Matrix& z = g.value(logits);
        Matrix d(z.rows(), z.cols());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          const double p = Sigmoid(z.data()[i]);
          const double y = targets.data()[i];
          d.data()[i] =
              (positive_weight * y * (p - 1.0) + (1.0 - y) * p) * dg(0, 0);
        }
        g.AccumulateGrad(logits, d);
      });
}

Var SoftmaxCrossEntropy(Graph& g, Var logits, int target) {
  const Matrix& z = g.value(logits);
  if (z.rows() != 1 || target < 0 || target >= z.cols()) {
    throw std::invalid_argument("SoftmaxCrossEntropy: bad logits or target");
  }
  const double mx = z.maxCoeff();
  Matrix probs = (z.array() - mx).exp().matrix();
  const double denom = probs.sum();
  probs /= denom;
  Matrix out(1, 1);
  out(0, 0) = (mx + std::log(denom)) - z(0, target);
  const Var inputs[] = {logits};
  return g.AddNode(std::move(out), inputs,
                   [logits, target, probs = std::move(probs)](
                       Graph& g, const Matrix& dg) {
                     Matrix d = probs;
                     d(0, target) -= 1.0;
                     g.AccumulateGradExpr(logits, d * dg(0, 0));
                   });
}

}  // namespace nn
}  // namespace evsent
