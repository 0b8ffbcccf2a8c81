// Copyright 2026 The INSET Authors. All Rights Reserved.
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

// Differentiable operations on Tensor<Scalar>. Each op computes its value
// eagerly with Eigen and records a closure that pushes the output gradient
// back into its inputs.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "inset/tensor.hpp"

namespace inset {

template <typename Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, lhs " + a.shape_string() +
                     " rhs " + b.shape_string());
  }
  Matrix<Scalar> out = a.value() * b.value();
  auto* pa = a.node();
  auto* pb = b.node();
  return detail::make_op<Scalar>(std::move(out), {a, b},
                                 [pa, pb](Node<Scalar>& self) {
                                   if (pa->requires_grad)
                                     pa->accumulate(self.grad * pb->value.transpose());
                                   if (pb->requires_grad)
                                     pb->accumulate(pa->value.transpose() * self.grad);
                                 });
}

template <typename Scalar>
Tensor<Scalar> transpose(const Tensor<Scalar>& x) {
  Matrix<Scalar> out = x.value().transpose();
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px](Node<Scalar>& self) {
    px->accumulate(self.grad.transpose());
  });
}

template <typename Scalar>
Tensor<Scalar> add(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add: shapes differ, lhs " + a.shape_string() + " rhs " +
                     b.shape_string());
  }
  Matrix<Scalar> out = a.value() + b.value();
  auto* pa = a.node();
  auto* pb = b.node();
  return detail::make_op<Scalar>(std::move(out), {a, b},
                                 [pa, pb](Node<Scalar>& self) {
                                   pa->accumulate(self.grad);
                                   pb->accumulate(self.grad);
                                 });
}

template <typename Scalar>
Tensor<Scalar> sub(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("sub: shapes differ, lhs " + a.shape_string() + " rhs " +
                     b.shape_string());
  }
  Matrix<Scalar> out = a.value() - b.value();
  auto* pa = a.node();
  auto* pb = b.node();
  return detail::make_op<Scalar>(std::move(out), {a, b},
                                 [pa, pb](Node<Scalar>& self) {
                                   pa->accumulate(self.grad);
                                   pb->accumulate(-self.grad);
                                 });
}

/// Elementwise product.
template <typename Scalar>
Tensor<Scalar> mul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mul: shapes differ, lhs " + a.shape_string() + " rhs " +
                     b.shape_string());
  }
  Matrix<Scalar> out = a.value().cwiseProduct(b.value());
  auto* pa = a.node();
  auto* pb = b.node();
  return detail::make_op<Scalar>(std::move(out), {a, b},
                                 [pa, pb](Node<Scalar>& self) {
                                   if (pa->requires_grad)
                                     pa->accumulate(self.grad.cwiseProduct(pb->value));
                                   if (pb->requires_grad)
                                     pb->accumulate(self.grad.cwiseProduct(pa->value));
                                 });
}

template <typename Scalar>
Tensor<Scalar> scale(const Tensor<Scalar>& x, Scalar factor) {
  Matrix<Scalar> out = x.value() * factor;
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x},
                                 [px, factor](Node<Scalar>& self) {
                                   px->accumulate(self.grad * factor);
                                 });
}

template <typename Scalar>
Tensor<Scalar> operator+(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
Tensor<Scalar> operator-(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  return sub(a, b);
}

/// x (m x n) plus a broadcast 1 x n row.
template <typename Scalar>
Tensor<Scalar> add_row(const Tensor<Scalar>& x, const Tensor<Scalar>& row) {
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw ShapeError("add_row: row " + row.shape_string() +
                     " does not broadcast onto " + x.shape_string());
  }
  Matrix<Scalar> out = x.value().rowwise() + row.value().row(0);
  auto* px = x.node();
  auto* pr = row.node();
  return detail::make_op<Scalar>(std::move(out), {x, row},
                                 [px, pr](Node<Scalar>& self) {
                                   px->accumulate(self.grad);
                                   if (pr->requires_grad)
                                     pr->accumulate(self.grad.colwise().sum());
                                 });
}

/// Adds a non-differentiable constant (e.g. an attention mask).
template <typename Scalar>
Tensor<Scalar> add_constant(const Tensor<Scalar>& x, const Matrix<Scalar>& c) {
  if (c.rows() != x.rows() || c.cols() != x.cols()) {
    throw ShapeError("add_constant: constant " + detail::dims(c.rows(), c.cols()) +
                     " vs tensor " + x.shape_string());
  }
  Matrix<Scalar> out = x.value() + c;
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px](Node<Scalar>& self) {
    px->accumulate(self.grad);
  });
}

/// GELU with the exact Gaussian CDF.
template <typename Scalar>
Tensor<Scalar> gelu(const Tensor<Scalar>& x) {
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  Matrix<Scalar> out = x.value().unaryExpr([inv_sqrt2](Scalar v) {
    return Scalar(0.5) * v * (Scalar(1) + std::erf(v * inv_sqrt2));
  });
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px, inv_sqrt2](Node<Scalar>& self) {
    const Scalar inv_sqrt_2pi = Scalar(1) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
    Matrix<Scalar> d = px->value.unaryExpr([&](Scalar v) {
      Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(v * inv_sqrt2));
      Scalar pdf = inv_sqrt_2pi * std::exp(Scalar(-0.5) * v * v);
      return cdf + v * pdf;
    });
    px->accumulate(self.grad.cwiseProduct(d));
  });
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& x) {
  Matrix<Scalar> y(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const Scalar mx = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - mx).unaryExpr([](Scalar v) { return std::exp(v); }).matrix();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

template <typename Scalar>
Matrix<Scalar> softmax_rows_backward(const Matrix<Scalar>& y, const Matrix<Scalar>& g) {
  Matrix<Scalar> gx(y.rows(), y.cols());
  for (Index r = 0; r < y.rows(); ++r) {
    const Scalar dot = y.row(r).dot(g.row(r));
    gx.row(r) = y.row(r).cwiseProduct((g.row(r).array() - dot).matrix());
  }
  return gx;
}

}  // namespace detail

/// Softmax along `axis` (1 or -1: within each row; 0: within each column).
/// Uses max-subtraction, so large equal logits do not overflow.
template <typename Scalar>
Tensor<Scalar> softmax(const Tensor<Scalar>& x, int axis = -1) {
  if (axis != -1 && axis != 0 && axis != 1) {
    throw IndexError("softmax: axis must be -1, 0 or 1, got " + std::to_string(axis));
  }
  const bool by_row = axis != 0;
  Matrix<Scalar> y = by_row ? detail::softmax_rows<Scalar>(x.value())
                            : Matrix<Scalar>(detail::softmax_rows<Scalar>(x.value().transpose()).transpose());
  auto* px = x.node();
  auto node_y = std::make_shared<Matrix<Scalar>>(y);
  return detail::make_op<Scalar>(std::move(y), {x}, [px, node_y, by_row](Node<Scalar>& self) {
    if (by_row) {
      px->accumulate(detail::softmax_rows_backward<Scalar>(*node_y, self.grad));
    } else {
      Matrix<Scalar> yt = node_y->transpose();
      Matrix<Scalar> gt = self.grad.transpose();
      px->accumulate(detail::softmax_rows_backward<Scalar>(yt, gt).transpose());
    }
  });
}

/// Row-wise (x - mean) / sqrt(var + eps) followed by gamma * . + beta.
template <typename Scalar>
Tensor<Scalar> layer_norm(const Tensor<Scalar>& x, const Tensor<Scalar>& gamma,
                          const Tensor<Scalar>& beta, Scalar eps) {
  const Index d = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != d || beta.rows() != 1 || beta.cols() != d) {
    throw ShapeError("layer_norm: gamma " + gamma.shape_string() + " / beta " +
                     beta.shape_string() + " do not match input " + x.shape_string());
  }
  if (d < 2) throw ShapeError("layer_norm: need at least 2 features, input " + x.shape_string());

  auto xhat = std::make_shared<Matrix<Scalar>>(x.rows(), d);
  auto inv_std = std::make_shared<RowVector<Scalar>>(x.rows());
  for (Index r = 0; r < x.rows(); ++r) {
    const Scalar mean = x.value().row(r).mean();
    auto centered = (x.value().row(r).array() - mean);
    const Scalar var = centered.square().mean();
    const Scalar inv = Scalar(1) / std::sqrt(var + eps);
    (*inv_std)(r) = inv;
    xhat->row(r) = (centered * inv).matrix();
  }
  Matrix<Scalar> out = xhat->array().rowwise() * gamma.value().row(0).array();
  out.rowwise() += beta.value().row(0);

  auto* px = x.node();
  auto* pg = gamma.node();
  auto* pb = beta.node();
  return detail::make_op<Scalar>(
      std::move(out), {x, gamma, beta}, [px, pg, pb, xhat, inv_std, d](Node<Scalar>& self) {
        const Matrix<Scalar>& g = self.grad;
        if (pg->requires_grad) pg->accumulate(g.cwiseProduct(*xhat).colwise().sum());
        if (pb->requires_grad) pb->accumulate(g.colwise().sum());
        if (!px->requires_grad) return;
        Matrix<Scalar> gxhat = g.array().rowwise() * pg->value.row(0).array();
        Matrix<Scalar> gx(g.rows(), d);
        for (Index r = 0; r < g.rows(); ++r) {
          const Scalar mean_g = gxhat.row(r).mean();
          const Scalar mean_gx = gxhat.row(r).dot(xhat->row(r)) / Scalar(d);
          gx.row(r) = (*inv_std)(r) *
                      (gxhat.row(r).array() - mean_g - xhat->row(r).array() * mean_gx).matrix();
        }
        px->accumulate(gx);
      });
}

/// Mean over rows of -log softmax(logits)[target].
template <typename Scalar>
Tensor<Scalar> cross_entropy(const Tensor<Scalar>& logits, std::span<const int> targets) {
  const Index t = logits.rows();
  const Index v = logits.cols();
  if (static_cast<Index>(targets.size()) != t) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) +
                     " targets for logits " + logits.shape_string());
  }
  for (int id : targets) {
    if (id < 0 || id >= v) {
      throw IndexError("cross_entropy: target id " + std::to_string(id) +
                       " outside [0," + std::to_string(v) + ")");
    }
  }
  auto probs = std::make_shared<Matrix<Scalar>>(detail::softmax_rows<Scalar>(logits.value()));
  Scalar total = 0;
  for (Index r = 0; r < t; ++r) {
    const Scalar mx = logits.value().row(r).maxCoeff();
    const Scalar lse = mx + std::log((logits.value().row(r).array() - mx).unaryExpr([](Scalar v) { return std::exp(v); }).sum());
    total += lse - logits.value()(r, targets[r]);
  }
  Matrix<Scalar> out(1, 1);
  out(0, 0) = total / Scalar(t);
  auto* pl = logits.node();
  std::vector<int> tgt(targets.begin(), targets.end());
  return detail::make_op<Scalar>(std::move(out), {logits},
                                 [pl, probs, tgt = std::move(tgt)](Node<Scalar>& self) {
                                   Matrix<Scalar> g = *probs;
                                   for (Index r = 0; r < g.rows(); ++r) g(r, tgt[r]) -= Scalar(1);
                                   pl->accumulate(g * (self.grad(0, 0) / Scalar(g.rows())));
                                 });
}

/// Cosine similarity u.v / (|u| |v|) of two same-shape tensors.
template <typename Scalar>
Tensor<Scalar> cosine(const Tensor<Scalar>& u, const Tensor<Scalar>& v) {
  if (u.shape() != v.shape()) {
    throw ShapeError("cosine: shapes differ, lhs " + u.shape_string() + " rhs " +
                     v.shape_string());
  }
  const Scalar nu = u.value().norm();
  const Scalar nv = v.value().norm();
  if (!(nu > 0) || !(nv > 0)) {
    throw DegenerateInputError("cosine: zero-norm argument");
  }
  const Scalar dot = u.value().cwiseProduct(v.value()).sum();
  const Scalar c = dot / (nu * nv);
  Matrix<Scalar> out(1, 1);
  out(0, 0) = c;
  auto* pu = u.node();
  auto* pv = v.node();
  return detail::make_op<Scalar>(std::move(out), {u, v},
                                 [pu, pv, nu, nv, c](Node<Scalar>& self) {
                                   const Scalar g = self.grad(0, 0);
                                   if (pu->requires_grad)
                                     pu->accumulate(g * (pv->value / (nu * nv) - c * pu->value / (nu * nu)));
                                   if (pv->requires_grad)
                                     pv->accumulate(g * (pu->value / (nu * nv) - c * pv->value / (nv * nv)));
                                 });
}

template <typename Scalar>
Tensor<Scalar> sum(const Tensor<Scalar>& x) {
  Matrix<Scalar> out(1, 1);
  out(0, 0) = x.value().sum();
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px](Node<Scalar>& self) {
    px->accumulate(Matrix<Scalar>::Constant(px->value.rows(), px->value.cols(), self.grad(0, 0)));
  });
}

template <typename Scalar>
Tensor<Scalar> mean(const Tensor<Scalar>& x) {
  return scale(sum(x), Scalar(1) / Scalar(x.size()));
}

/// Rows of `table` selected by `ids`; gradients scatter-add back.
template <typename Scalar>
Tensor<Scalar> gather_rows(const Tensor<Scalar>& table, std::span<const int> ids) {
  Matrix<Scalar> out(static_cast<Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw IndexError("gather_rows: id " + std::to_string(ids[i]) + " outside table " +
                       table.shape_string());
    }
    out.row(static_cast<Index>(i)) = table.value().row(ids[i]);
  }
  auto* pt = table.node();
  std::vector<int> idx(ids.begin(), ids.end());
  return detail::make_op<Scalar>(std::move(out), {table},
                                 [pt, idx = std::move(idx)](Node<Scalar>& self) {
                                   Matrix<Scalar> g = Matrix<Scalar>::Zero(pt->value.rows(), pt->value.cols());
                                   for (std::size_t i = 0; i < idx.size(); ++i)
                                     g.row(idx[i]) += self.grad.row(static_cast<Index>(i));
                                   pt->accumulate(g);
                                 });
}

template <typename Scalar>
Tensor<Scalar> slice_rows(const Tensor<Scalar>& x, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > x.rows()) {
    throw IndexError("slice_rows: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                     ") outside " + x.shape_string());
  }
  Matrix<Scalar> out = x.value().middleRows(begin, count);
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px, begin, count](Node<Scalar>& self) {
    Matrix<Scalar> g = Matrix<Scalar>::Zero(px->value.rows(), px->value.cols());
    g.middleRows(begin, count) = self.grad;
    px->accumulate(g);
  });
}

template <typename Scalar>
Tensor<Scalar> slice_cols(const Tensor<Scalar>& x, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > x.cols()) {
    throw IndexError("slice_cols: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                     ") outside " + x.shape_string());
  }
  Matrix<Scalar> out = x.value().middleCols(begin, count);
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px, begin, count](Node<Scalar>& self) {
    Matrix<Scalar> g = Matrix<Scalar>::Zero(px->value.rows(), px->value.cols());
    g.middleCols(begin, count) = self.grad;
    px->accumulate(g);
  });
}

template <typename Scalar>
Tensor<Scalar> concat_rows(const std::vector<Tensor<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) {
      throw ShapeError("concat_rows: column mismatch, " + parts.front().shape_string() +
                       " vs " + p.shape_string());
    }
    rows += p.rows();
  }
  Matrix<Scalar> out(rows, cols);
  std::vector<Node<Scalar>*> nodes;
  Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
    nodes.push_back(p.node());
  }
  return detail::make_op_n<Scalar>(std::move(out), parts, [nodes](Node<Scalar>& self) {
    Index offset = 0;
    for (auto* n : nodes) {
      const Index r = n->value.rows();
      if (n->requires_grad) n->accumulate(self.grad.middleRows(offset, r));
      offset += r;
    }
  });
}

template <typename Scalar>
Tensor<Scalar> concat_cols(const std::vector<Tensor<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw ShapeError("concat_cols: row mismatch, " + parts.front().shape_string() +
                       " vs " + p.shape_string());
    }
    cols += p.cols();
  }
  Matrix<Scalar> out(rows, cols);
  std::vector<Node<Scalar>*> nodes;
  Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
    nodes.push_back(p.node());
  }
  return detail::make_op_n<Scalar>(std::move(out), parts, [nodes](Node<Scalar>& self) {
    Index offset = 0;
    for (auto* n : nodes) {
      const Index c = n->value.cols();
      if (n->requires_grad) n->accumulate(self.grad.middleCols(offset, c));
      offset += c;
    }
  });
}

/// Inverted dropout. Identity when p == 0.
template <typename Scalar, typename Rng>
Tensor<Scalar> dropout(const Tensor<Scalar>& x, double p, Rng& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) throw ContractError("dropout: p must be < 1");
  std::bernoulli_distribution keep(1.0 - p);
  const Scalar s = Scalar(1.0 / (1.0 - p));
  auto mask = std::make_shared<Matrix<Scalar>>(x.rows(), x.cols());
  for (Index i = 0; i < mask->size(); ++i) mask->data()[i] = keep(rng) ? s : Scalar(0);
  Matrix<Scalar> out = x.value().cwiseProduct(*mask);
  auto* px = x.node();
  return detail::make_op<Scalar>(std::move(out), {x}, [px, mask](Node<Scalar>& self) {
    px->accumulate(self.grad.cwiseProduct(*mask));
  });
}

}  // namespace inset
