#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bfgnn/graph.hpp"

namespace bfgnn {

/// Dense row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// Feedforward net with ReLU after every layer, including the last.
struct Mlp {
  std::vector<Mat> weights;
  std::vector<std::vector<double>> biases;

  int depth() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return weights.empty() ? 0 : weights.front().cols; }
  int out_dim() const { return weights.empty() ? 0 : weights.back().rows; }

  std::vector<double> forward(const std::vector<double>& x) const;
};

/// Zero-initialized MLP with the given layer widths (dims.size() >= 2).
Mlp make_mlp(const std::vector<int>& dims);

nlohmann::ordered_json mlp_to_json(const Mlp& f);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace bfgnn
