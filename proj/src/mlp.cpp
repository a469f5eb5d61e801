#include "bfgnn/mlp.hpp"

#include <nlohmann/json.hpp>

namespace bfgnn {

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != in_dim())
    throw ValidationError("mlp input dimension mismatch");
  std::vector<double> cur = x;
  std::vector<double> next;
  for (int j = 0; j < depth(); ++j) {
    const Mat& w = weights[j];
    next.assign(w.rows, 0.0);
    for (int i = 0; i < w.rows; ++i) {
      double acc = biases[j][i];
      const double* row = &w.a[static_cast<std::size_t>(i) * w.cols];
      for (int c = 0; c < w.cols; ++c) acc += row[c] * cur[c];
      next[i] = acc > 0.0 ? acc : 0.0;
    }
    cur.swap(next);
  }
  return cur;
}

Mlp make_mlp(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ValidationError("mlp needs at least one layer");
  Mlp f;
  for (std::size_t j = 1; j < dims.size(); ++j) {
    if (dims[j - 1] < 1 || dims[j] < 1) throw ValidationError("mlp dimension must be positive");
    f.weights.emplace_back(dims[j], dims[j - 1]);
    f.biases.emplace_back(dims[j], 0.0);
  }
  return f;
}

nlohmann::ordered_json mlp_to_json(const Mlp& f) {
  nlohmann::ordered_json arch;
  nlohmann::ordered_json dims = nlohmann::ordered_json::array();
  dims.push_back(f.in_dim());
  for (const auto& w : f.weights) dims.push_back(w.rows);
  arch["dims"] = std::move(dims);

  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (int j = 0; j < f.depth(); ++j) {
    nlohmann::ordered_json lj;
    nlohmann::ordered_json wj = nlohmann::ordered_json::array();
    for (int i = 0; i < f.weights[j].rows; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int c = 0; c < f.weights[j].cols; ++c) row.push_back(f.weights[j].at(i, c));
      wj.push_back(std::move(row));
    }
    lj["W"] = std::move(wj);
    lj["b"] = f.biases[j];
    layers.push_back(std::move(lj));
  }

  nlohmann::ordered_json out;
  out["arch"] = std::move(arch);
  out["layers"] = std::move(layers);
  return out;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp f;
  try {
    for (const auto& lj : j.at("layers")) {
      const auto& wj = lj.at("W");
      int rows = static_cast<int>(wj.size());
      int cols = rows > 0 ? static_cast<int>(wj.at(0).size()) : 0;
      Mat w(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int c = 0; c < cols; ++c) w.at(i, c) = wj.at(i).at(c).get<double>();
      }
      f.weights.push_back(std::move(w));
      f.biases.push_back(lj.at("b").get<std::vector<double>>());
      if (static_cast<int>(f.biases.back().size()) != rows)
        throw ValidationError("mlp bias length mismatch");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed mlp JSON: ") + ex.what());
  }
  for (int j = 1; j < f.depth(); ++j) {
    if (f.weights[j].cols != f.weights[j - 1].rows)
      throw ValidationError("mlp layer dimensions do not chain");
  }
  return f;
}

}  // namespace bfgnn
