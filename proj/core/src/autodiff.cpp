// Copyright 2026 The qstpinn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qstpinn/autodiff.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>

#include "qstpinn/errors.hpp"

namespace qst {

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw Error("autodiff: operands live on different tapes");
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

// Elementwise op from a value map and a derivative map evaluated on the input.
template <typename F, typename DF>
Var unary(Var x, F f, DF df) {
  Tape& t = *x.tape;
  Matrix out = t.value(x).unaryExpr(f);
  return t.record(std::move(out), {x}, [x, df](Tape& tape, const Matrix& g) {
    tape.accumulate(x, g.cwiseProduct(tape.value(x).unaryExpr(df)));
  });
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Matrix& Var::value() const { return tape->value(*this); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, nullptr, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{p.value, {}, true, false, &p, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, std::vector<Var> inputs, Backward backward) {
  bool needs = false;
  for (Var in : inputs) {
    if (in.tape != this) throw Error("autodiff: input recorded on another tape");
    needs = needs || nodes_[in.id].requires_grad;
  }
  if (!value.allFinite()) throw NumericalError("autodiff: non-finite value produced by an op");
  nodes_.push_back(Node{std::move(value), {}, needs, false, nullptr,
                        needs ? std::move(backward) : Backward{}});
  return {this, nodes_.size() - 1};
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  if (!n.has_grad) {
    n.grad.setZero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (!n.requires_grad) return;
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw Error("backward: loss lives on another tape");
  const Matrix& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be a scalar, got " + std::to_string(lv.rows()) + "x" +
                     std::to_string(lv.cols()));
  }
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss).setOnes();
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad) continue;
    if (n.backward) {
      // The rule may grow other nodes' grads but never this one.
      Matrix g = std::move(n.grad);
      n.backward(*this, g);
      n.grad = std::move(g);
    }
    if (n.param != nullptr) {
      Parameter& p = *n.param;
      if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) p.zero_grad();
      p.grad += n.grad;
    }
  }
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (av.cols() != bv.rows()) throw ShapeError("matmul: inner dimensions differ");
  Matrix out = av * bv;
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(a)) tape.grad(a).noalias() += g * tape.value(b).transpose();
    if (tape.requires_grad(b)) tape.grad(b).noalias() += tape.value(a).transpose() * g;
  });
}

Var add_row(Var x, Var b) {
  check_same_tape(x, b);
  Tape& t = *x.tape;
  const Matrix& xv = t.value(x);
  const Matrix& bv = t.value(b);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw ShapeError("add_row: bias must be 1 x cols");
  Matrix out = xv.rowwise() + bv.row(0);
  return t.record(std::move(out), {x, b}, [x, b](Tape& tape, const Matrix& g) {
    tape.accumulate(x, g);
    if (tape.requires_grad(b)) tape.grad(b) += g.colwise().sum();
  });
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "add");
  Matrix out = t.value(a) + t.value(b);
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    tape.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "sub");
  Matrix out = t.value(a) - t.value(b);
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    tape.accumulate(b, -g);
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  check_same_shape(t.value(a), t.value(b), "mul");
  Matrix out = t.value(a).cwiseProduct(t.value(b));
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(a)) tape.grad(a) += g.cwiseProduct(tape.value(b));
    if (tape.requires_grad(b)) tape.grad(b) += g.cwiseProduct(tape.value(a));
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  Matrix out = t.value(a) * s;
  return t.record(std::move(out), {a}, [a, s](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g * s);
  });
}

Var scale_rows(Var x, Var w) {
  check_same_tape(x, w);
  Tape& t = *x.tape;
  const Matrix& xv = t.value(x);
  const Matrix& wv = t.value(w);
  if (wv.cols() != 1 || wv.rows() != xv.rows()) throw ShapeError("scale_rows: weights must be B x 1");
  Matrix out = wv.col(0).asDiagonal() * xv;
  return t.record(std::move(out), {x, w}, [x, w](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(x)) tape.grad(x) += tape.value(w).col(0).asDiagonal() * g;
    if (tape.requires_grad(w)) {
      tape.grad(w) += g.cwiseProduct(tape.value(x)).rowwise().sum();
    }
  });
}

Var stop_gradient(Var a) { return a.tape->constant(a.tape->value(a)); }

Var relu(Var x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Var gelu(Var x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [kInvSqrt2Pi](double v) {
        return 0.5 * (1.0 + std::erf(v * kInvSqrt2)) + v * kInvSqrt2Pi * std::exp(-0.5 * v * v);
      });
}

Var silu(Var x) {
  return unary(
      x, [](double v) { return v * sigmoid_scalar(v); },
      [](double v) {
        const double s = sigmoid_scalar(v);
        return s * (1.0 + v * (1.0 - s));
      });
}

Var sigmoid(Var x) {
  Tape& t = *x.tape;
  Matrix out = t.value(x).unaryExpr(&sigmoid_scalar);
  const Var y{&t, t.size()};  // id the output is about to receive
  return t.record(std::move(out), {x}, [x, y](Tape& tape, const Matrix& g) {
    const Matrix& s = tape.value(y);
    tape.accumulate(x, g.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix())));
  });
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw DomainError("softplus_inverse: argument must be positive");
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

Var softplus(Var x) {
  return unary(x, [](double v) { return softplus(v); }, &sigmoid_scalar);
}

Var square(Var x) {
  return unary(x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Var softplus_cols(Var x, Eigen::Index n_cols) {
  Tape& t = *x.tape;
  Matrix out = t.value(x);
  if (n_cols > out.cols()) throw ShapeError("softplus_cols: column count out of range");
  out.leftCols(n_cols) = out.leftCols(n_cols).unaryExpr([](double v) { return softplus(v); });
  return t.record(std::move(out), {x}, [x, n_cols](Tape& tape, const Matrix& g) {
    Matrix gx = g;
    gx.leftCols(n_cols) =
        g.leftCols(n_cols).cwiseProduct(tape.value(x).leftCols(n_cols).unaryExpr(&sigmoid_scalar));
    tape.accumulate(x, gx);
  });
}

Var dropout(Var x, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout: p must lie in [0, 1)");
  if (p == 0.0) return x;
  Tape& t = *x.tape;
  const Matrix& xv = t.value(x);
  std::bernoulli_distribution keep(1.0 - p);
  const double inv = 1.0 / (1.0 - p);
  auto mask = std::make_shared<Matrix>(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < mask->size(); ++i) mask->data()[i] = keep(rng) ? inv : 0.0;
  Matrix out = xv.cwiseProduct(*mask);
  return t.record(std::move(out), {x}, [x, mask](Tape& tape, const Matrix& g) {
    tape.accumulate(x, g.cwiseProduct(*mask));
  });
}

Var sum(Var x) {
  Tape& t = *x.tape;
  Matrix out(1, 1);
  out(0, 0) = t.value(x).sum();
  return t.record(std::move(out), {x}, [x](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(x)) tape.grad(x).array() += g(0, 0);
  });
}

Var mean(Var x) {
  const auto n = static_cast<double>(x.value().size());
  if (n == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(x), 1.0 / n);
}

Var row_sum(Var x) {
  Tape& t = *x.tape;
  Matrix out = t.value(x).rowwise().sum();
  return t.record(std::move(out), {x}, [x](Tape& tape, const Matrix& g) {
    if (tape.requires_grad(x)) tape.grad(x).colwise() += g.col(0);
  });
}

}  // namespace qst
