#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "na2q/tensor.hpp"

namespace na2q {

// Reverse-mode automatic differentiation over Tensor values.
//
// Ops build a define-by-run graph of shared Node objects; backward(root)
// topologically sorts the ancestors of `root` and runs each node's pullback
// in reverse order, accumulating into Tensor::grad. Evaluation inside a
// NoGrad scope produces constant nodes with no parents, so rollouts and
// target-network passes cost no graph memory.

struct Node {
  Tensor value;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> pullback;  // reads value.grad, accumulates into parents
  bool requires_grad = false;
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Var leaf(Tensor t, bool requires_grad = false);
  static Var constant(Tensor t) { return leaf(std::move(t), false); }

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& value() { return node_->value; }
  const std::vector<double>& grad() const { return node_->value.grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  double item() const { return node_->value.item(); }
  int rows() const { return node_->value.rows(); }
  int cols() const { return node_->value.cols(); }

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// RAII scope that disables graph construction on the current thread.
class NoGrad {
 public:
  NoGrad();
  ~NoGrad();
  NoGrad(const NoGrad&) = delete;
  NoGrad& operator=(const NoGrad&) = delete;
  static bool enabled();  // true when gradients are currently being recorded
};

// Runs the reverse pass from a scalar root (seeds its grad with 1).
void backward(const Var& root);

enum class WeightTransform { kIdentity, kAbsolute };

// y = x . T(w) + b, with T identity or elementwise absolute value. b is a
// rank-1 tensor broadcast over rows; pass an undefined Var to skip the bias.
Var affine(const Var& x, const Var& w, const Var& b,
           WeightTransform transform = WeightTransform::kIdentity);

Var matmul(const Var& a, const Var& b);

// Fused GRU cell. wx: [in x 3H], wh: [H x 3H], gate blocks ordered
// (reset, update, candidate); bx/bh: rank-1 of length 3H. Returns the new
// hidden state, bounded in (-1, 1) elementwise.
Var gru_cell(const Var& x, const Var& h, const Var& wx, const Var& wh,
             const Var& bx, const Var& bh);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var add_scalar(const Var& a, double c);

Var sigmoid(const Var& x);
Var tanh_op(const Var& x);
Var relu(const Var& x);
Var elu(const Var& x);           // alpha = 1
Var exp_op(const Var& x);
Var square(const Var& x);
Var clamp(const Var& x, double lo, double hi);  // pass-through grad inside range

// Row-wise softmax with max subtraction; every output row is a probability
// vector.
Var softmax_rows(const Var& x);

Var row_sum(const Var& x);               // [R x C] -> [R x 1]
Var sum_all(const Var& x);               // -> [1 x 1]
Var mul_const(const Var& x, Tensor c);   // elementwise product with a constant
Var dot_const(const Var& x, Tensor c);   // sum(x * c) -> [1 x 1]

// y[r, 0] = x[r, idx[r]].
Var gather_cols(const Var& x, std::vector<int> idx);
// y[:, j] = x[:, cols[j]].
Var select_cols(const Var& x, std::vector<int> cols);

Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var reshape(const Var& x, std::vector<int> shape);

}  // namespace na2q
