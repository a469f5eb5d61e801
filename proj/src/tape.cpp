#include "bfgnn/tape.hpp"
#include <algorithm>
#include <limits>

#include <cmath>
#include <cstring>

namespace bfgnn {

int Tape::push(Node n) {
  n.val = values_.size();
  values_.resize(values_.size() + static_cast<std::size_t>(n.len), 0.0);
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::constant(const std::vector<double>& v) {
  Node n{};
  n.op = Op::Constant;
  n.len = static_cast<int>(v.size());
  int id = push(n);
  std::memcpy(&values_[nodes_.back().val], v.data(), v.size() * sizeof(double));
  return id;
}

int Tape::affine(int w_tensor, int b_tensor, int x) {
  if (w_tensor < 0 || w_tensor >= params_->count() || b_tensor < 0 ||
      b_tensor >= params_->count())
    throw ValidationError("affine references an unregistered parameter tensor");
  const auto& w = params_->tensor(w_tensor);
  const auto& b = params_->tensor(b_tensor);
  int cols = len(x);
  if (b.len * cols != w.len) throw ValidationError("affine shape mismatch");
  Node n{};
  n.op = Op::Affine;
  n.len = b.len;
  n.a = x;
  n.w_tensor = w_tensor;
  n.b_tensor = b_tensor;
  return push(n);
}

int Tape::relu(int x) {
  Node n{};
  n.op = Op::Relu;
  n.len = len(x);
  n.a = x;
  return push(n);
}

int Tape::min_ewise(const std::vector<int>& xs) {
  if (xs.empty()) throw ValidationError("min over empty set");
  int l = len(xs.front());
  for (int id : xs) {
    if (len(id) != l) throw ValidationError("min operands must share length");
  }
  Node n{};
  n.op = Op::MinEwise;
  n.len = l;
  n.list_begin = static_cast<int>(operand_list_.size());
  operand_list_.insert(operand_list_.end(), xs.begin(), xs.end());
  n.list_end = static_cast<int>(operand_list_.size());
  n.argmin_off = static_cast<int>(argmins_.size());
  argmins_.resize(argmins_.size() + static_cast<std::size_t>(l), 0);
  return push(n);
}

int Tape::concat(int a, int b) {
  Node n{};
  n.op = Op::Concat;
  n.len = len(a) + len(b);
  n.a = a;
  n.b = b;
  return push(n);
}

void Tape::add_squared_error(int x, double target, double coeff) {
  if (len(x) != 1) throw ValidationError("error terms apply to scalar nodes");
  terms_.push_back({x, target, coeff});
}

double Tape::forward() {
  for (const Node& n : nodes_) {
    double* out = &values_[n.val];
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Affine: {
        const auto& wt = params_->tensor(n.w_tensor);
        const auto& bt = params_->tensor(n.b_tensor);
        const double* x = &values_[nodes_[static_cast<std::size_t>(n.a)].val];
        int cols = nodes_[static_cast<std::size_t>(n.a)].len;
        for (int i = 0; i < n.len; ++i) {
          double acc = bt.data[i];
          const double* row = wt.data + static_cast<std::size_t>(i) * cols;
          for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
          out[i] = acc;
        }
        break;
      }
      case Op::Relu: {
        const double* x = &values_[nodes_[static_cast<std::size_t>(n.a)].val];
        for (int i = 0; i < n.len; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
        break;
      }
      case Op::MinEwise: {
        int* arg = &argmins_[static_cast<std::size_t>(n.argmin_off)];
        for (int i = 0; i < n.len; ++i) {
          double best = 0.0;
          int best_idx = -1;
          for (int s = n.list_begin; s < n.list_end; ++s) {
            int src = operand_list_[static_cast<std::size_t>(s)];
            double v = values_[nodes_[static_cast<std::size_t>(src)].val + i];
            if (best_idx < 0 || v < best) {
              best = v;
              best_idx = s;
            }
          }
          out[i] = best;
          arg[i] = best_idx;
        }
        break;
      }
      case Op::Concat: {
        const Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        std::memcpy(out, &values_[na.val], static_cast<std::size_t>(na.len) * sizeof(double));
        std::memcpy(out + na.len, &values_[nb.val],
                    static_cast<std::size_t>(nb.len) * sizeof(double));
        break;
      }
    }
  }
  objective_ = 0.0;
  abs_error_ = 0.0;
  for (const auto& t : terms_) {
    double diff = values_[nodes_[static_cast<std::size_t>(t.node)].val] - t.target;
    objective_ += t.coeff * diff * diff;
    abs_error_ += t.coeff * std::fabs(diff);
  }
  return objective_;
}

double Tape::kink_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (const Node& n : nodes_) {
    if (n.op == Op::Relu) {
      const double* x = &values_[nodes_[static_cast<std::size_t>(n.a)].val];
      for (int i = 0; i < n.len; ++i) margin = std::min(margin, std::fabs(x[i]));
    } else if (n.op == Op::MinEwise) {
      for (int i = 0; i < n.len; ++i) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        for (int s = n.list_begin; s < n.list_end; ++s) {
          int src = operand_list_[static_cast<std::size_t>(s)];
          double v = values_[nodes_[static_cast<std::size_t>(src)].val + i];
          if (v < best) {
            second = best;
            best = v;
          } else if (v < second) {
            second = v;
          }
        }
        // exact ties come from ReLU-clipped zeros, which cannot move under a
        // small perturbation; movable zeros are caught by the ReLU term above
        if (std::isfinite(second) && second != best) margin = std::min(margin, second - best);
      }
    }
  }
  return margin;
}

void Tape::backward(GradientRecord& grad) {
  grad.assign(params_->total(), 0.0);
  node_grads_.assign(values_.size(), 0.0);
  for (const auto& t : terms_) {
    double diff = values_[nodes_[static_cast<std::size_t>(t.node)].val] - t.target;
    node_grads_[nodes_[static_cast<std::size_t>(t.node)].val] += 2.0 * t.coeff * diff;
  }
  for (std::size_t idx = nodes_.size(); idx-- > 0;) {
    const Node& n = nodes_[idx];
    const double* gy = &node_grads_[n.val];
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Affine: {
        const auto& wt = params_->tensor(n.w_tensor);
        const auto& bt = params_->tensor(n.b_tensor);
        const Node& nx = nodes_[static_cast<std::size_t>(n.a)];
        const double* x = &values_[nx.val];
        double* gx = &node_grads_[nx.val];
        double* gw = &grad[wt.offset];
        double* gb = &grad[bt.offset];
        int cols = nx.len;
        for (int i = 0; i < n.len; ++i) {
          double g = gy[i];
          if (g == 0.0) continue;
          gb[i] += g;
          const double* row = wt.data + static_cast<std::size_t>(i) * cols;
          double* gw_row = gw + static_cast<std::size_t>(i) * cols;
          for (int c = 0; c < cols; ++c) {
            gw_row[c] += g * x[c];
            gx[c] += g * row[c];
          }
        }
        break;
      }
      case Op::Relu: {
        const Node& nx = nodes_[static_cast<std::size_t>(n.a)];
        const double* x = &values_[nx.val];
        double* gx = &node_grads_[nx.val];
        for (int i = 0; i < n.len; ++i) {
          if (x[i] > 0.0) gx[i] += gy[i];
        }
        break;
      }
      case Op::MinEwise: {
        const int* arg = &argmins_[static_cast<std::size_t>(n.argmin_off)];
        for (int i = 0; i < n.len; ++i) {
          if (gy[i] == 0.0) continue;
          int src = operand_list_[static_cast<std::size_t>(arg[i])];
          node_grads_[nodes_[static_cast<std::size_t>(src)].val + i] += gy[i];
        }
        break;
      }
      case Op::Concat: {
        const Node& na = nodes_[static_cast<std::size_t>(n.a)];
        const Node& nb = nodes_[static_cast<std::size_t>(n.b)];
        double* ga = &node_grads_[na.val];
        double* gb = &node_grads_[nb.val];
        for (int i = 0; i < na.len; ++i) ga[i] += gy[i];
        for (int i = 0; i < nb.len; ++i) gb[i] += gy[na.len + i];
        break;
      }
    }
  }
}

}  // namespace bfgnn
