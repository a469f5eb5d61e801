#pragma once

#include <cstddef>
#include <vector>

#include "bfgnn/mlp.hpp"

namespace bfgnn {

/// Registry of trainable tensors. Assigns each registered tensor a stable id
/// and an offset into a single flat parameter ordering that gradients and
/// optimizer state follow.
class ParamSet {
 public:
  struct TensorRef {
    double* data = nullptr;
    int len = 0;
    std::size_t offset = 0;
  };

  int add(double* data, int len) {
    TensorRef ref{data, len, total_};
    total_ += static_cast<std::size_t>(len);
    tensors_.push_back(ref);
    return static_cast<int>(tensors_.size()) - 1;
  }

  int add(Mat& m) { return add(m.a.data(), static_cast<int>(m.a.size())); }
  int add(std::vector<double>& v) { return add(v.data(), static_cast<int>(v.size())); }

  const TensorRef& tensor(int id) const { return tensors_[static_cast<std::size_t>(id)]; }
  int count() const { return static_cast<int>(tensors_.size()); }
  std::size_t total() const { return total_; }

  void gather(std::vector<double>& flat) const {
    flat.resize(total_);
    for (const auto& t : tensors_) {
      for (int i = 0; i < t.len; ++i) flat[t.offset + i] = t.data[i];
    }
  }

  void scatter(const std::vector<double>& flat) {
    for (const auto& t : tensors_) {
      for (int i = 0; i < t.len; ++i) t.data[i] = flat[t.offset + i];
    }
  }

 private:
  std::vector<TensorRef> tensors_;
  std::size_t total_ = 0;
};

/// Same flat layout as the ParamSet that produced it.
using GradientRecord = std::vector<double>;

/// Reverse-mode tape over small dense vectors. The computation structure is
/// recorded once; forward() re-evaluates values in place against the current
/// parameter tensors, so one tape serves an entire training run.
///
/// Gradient conventions: ReLU uses subgradient 0 at exactly 0, and the
/// elementwise min routes each coordinate's gradient to the first operand
/// attaining the minimum (operands are pushed in ascending neighbor order).
class Tape {
 public:
  explicit Tape(const ParamSet* params) : params_(params) {}

  int constant(const std::vector<double>& v);
  int affine(int w_tensor, int b_tensor, int x);
  int relu(int x);
  int min_ewise(const std::vector<int>& xs);
  int concat(int a, int b);

  /// Registers coeff * (value(x)[0] - target)^2 as an objective term; the
  /// same pass also accumulates coeff * |value(x)[0] - target| as a
  /// non-differentiated side metric.
  void add_squared_error(int x, double target, double coeff);

  /// Recomputes every node; returns the squared-error objective.
  double forward();
  /// Side metric from the latest forward pass.
  double abs_error() const { return abs_error_; }
  double objective() const { return objective_; }

  /// Accumulates d(objective)/d(theta) into grad (flat ParamSet layout).
  /// grad is resized and zeroed first.
  void backward(GradientRecord& grad);

  /// Distance of the latest forward pass from a non-differentiable point:
  /// the smallest |input| over ReLU nodes and the smallest winner-to-runner-up
  /// gap over min nodes. Used to detect (and avoid) kinks in gradient checks.
  double kink_margin() const;

  int len(int node) const { return nodes_[static_cast<std::size_t>(node)].len; }
  const double* value(int node) const {
    return &values_[nodes_[static_cast<std::size_t>(node)].val];
  }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op { Constant, Affine, Relu, MinEwise, Concat };

  struct Node {
    Op op;
    int len;
    std::size_t val;
    int a = -1;
    int b = -1;
    int w_tensor = -1;
    int b_tensor = -1;
    int list_begin = 0;
    int list_end = 0;
    int argmin_off = 0;
  };

  struct ErrorTerm {
    int node;
    double target;
    double coeff;
  };

  int push(Node n);

  const ParamSet* params_;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> node_grads_;
  std::vector<int> operand_list_;
  std::vector<int> argmins_;
  std::vector<ErrorTerm> terms_;
  double objective_ = 0.0;
  double abs_error_ = 0.0;
};

}  // namespace bfgnn
