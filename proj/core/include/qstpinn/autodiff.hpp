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


#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qstpinn/rng.hpp"

namespace qst {

/// Dense real 2-D tensor (batch x features), row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Trainable tensor plus its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
};

class Tape;

/// Handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so the node list
/// is already topologically sorted.
class Tape {
 public:
  /// Called with the output gradient; must accumulate into the inputs' grads.
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

  Var constant(Matrix value);
  /// Leaf bound to `p`; backward() adds into p.grad.
  Var parameter(Parameter& p);
  Var record(Matrix value, std::vector<Var> inputs, Backward backward);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  /// Gradient accumulator of `v`, allocated on first use.
  Matrix& grad(Var v);
  /// Adds `g` to the gradient of `v` when it requires one.
  void accumulate(Var v, const Matrix& g);

  /// Seeds d(loss)/d(loss) = 1 and runs every recorded rule in reverse order.
  /// Throws ShapeError unless `loss` is 1x1.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    Parameter* param = nullptr;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

// Linear algebra.
Var matmul(Var a, Var b);
/// x (B x n) + b (1 x n) broadcast over rows.
Var add_row(Var x, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// x (B x n) with row i scaled by w(i, 0); w is B x 1.
Var scale_rows(Var x, Var w);
/// Value copy that blocks gradient flow.
Var stop_gradient(Var a);

// Elementwise nonlinearities.
Var relu(Var x);
Var gelu(Var x);
Var silu(Var x);
Var sigmoid(Var x);
Var softplus(Var x);
Var square(Var x);
/// Softplus on columns [0, n_cols) only; identity elsewhere.
Var softplus_cols(Var x, Eigen::Index n_cols);
/// Inverted dropout with a mask drawn from `rng`; identity when p == 0.
Var dropout(Var x, double p, Rng& rng);

// Reductions.
Var sum(Var x);
Var mean(Var x);
/// B x n -> B x 1.
Var row_sum(Var x);

/// Numerically safe softplus and its inverse on scalars.
double softplus(double x);
double softplus_inverse(double y);

}  // namespace qst
