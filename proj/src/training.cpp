#include "bfgnn/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bfgnn/certificate.hpp"

namespace bfgnn {

double default_eta(const DatasetManifest& manifest, const MinAggConfig& config) {
  double ceiling = 1.0 / (2.0 * static_cast<double>(manifest.total_reachable) *
                          static_cast<double>(config.param_budget()));
  return 0.9 * ceiling;
}

namespace {

double accumulate_error(const MinAggGnnParams& params, const DatasetManifest& manifest,
                        bool squared) {
  if (manifest.pairs.empty()) throw ValidationError("manifest has no pairs");
  if (manifest.k_steps != params.config.K)
    throw ConfigMismatchError("manifest K does not match model K");
  if (manifest.total_reachable < 1)
    throw ValidationError("manifest has no reachable target nodes");
  double total = 0.0;
  for (const auto& pair : manifest.pairs) {
    AttributedGraph out = forward(params, pair.input);
    for (int v = 0; v < pair.target.n; ++v) {
      if (pair.target.features[v] == pair.target.beta) continue;
      double diff = out.features[v] - pair.target.features[v];
      total += squared ? diff * diff : std::fabs(diff);
    }
  }
  return total / static_cast<double>(manifest.total_reachable);
}

}  // namespace

double loss_mae(const MinAggGnnParams& params, const DatasetManifest& manifest) {
  return accumulate_error(params, manifest, false);
}

double loss_mse(const MinAggGnnParams& params, const DatasetManifest& manifest) {
  return accumulate_error(params, manifest, true);
}

double loss_reg(const MinAggGnnParams& params, const DatasetManifest& manifest,
                const LossConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw ValidationError("eta must be positive");
  return loss_mae(params, manifest) +
         cfg.eta * static_cast<double>(count_nonzero(params, cfg.nonzero_threshold));
}

double l1_norm(const MinAggGnnParams& params) {
  double total = 0.0;
  for (const auto& layer : params.layers) {
    for (const Mlp* f : {&layer.agg, &layer.up}) {
      for (const auto& w : f->weights) {
        for (double x : w.a) total += std::fabs(x);
      }
      for (const auto& b : f->biases) {
        for (double x : b) total += std::fabs(x);
      }
    }
  }
  return total;
}

double loss_mse_l1(const MinAggGnnParams& params, const DatasetManifest& manifest,
                   const LossConfig& cfg) {
  return loss_mse(params, manifest) + cfg.lambda_l1 * l1_norm(params);
}

TrainResult train(const MinAggGnnParams& init, const DatasetManifest& manifest,
                  const LossConfig& cfg, const AdamWSettings& opt, const TrainOptions& options,
                  const std::vector<AttributedGraph>& eval_suite) {
  if (options.steps < 0) throw ValidationError("step budget must be non-negative");
  TrainResult result;
  result.params = init;
  if (options.steps == 0) return result;

  double eta = cfg.eta > 0.0 ? cfg.eta : default_eta(manifest, init.config);

  ParamSet pset = bind_params(result.params);
  Tape tape = record_mse_objective(pset, result.params, manifest);
  AdamW optimizer(pset.total(), opt);
  GradientRecord grad;

  long long stride = options.eval_stride > 0 ? options.eval_stride : options.steps;
  double last_e_test = std::numeric_limits<double>::quiet_NaN();

  double mse = tape.forward();
  for (long long s = 1; s <= options.steps; ++s) {
    if (!std::isfinite(mse))
      throw NumericError("training diverged at step " + std::to_string(s - 1));
    tape.backward(grad);
    add_l1_subgradient(pset, cfg.lambda_l1, grad);
    optimizer.step(pset, grad);

    mse = tape.forward();  // metrics of the just-updated parameters
    TraceRow row;
    row.step = s;
    row.loss_mse = mse;
    row.loss_mse_l1 = mse + cfg.lambda_l1 * l1_norm(result.params);
    row.loss_reg =
        tape.abs_error() +
        eta * static_cast<double>(count_nonzero(result.params, cfg.nonzero_threshold));
    if (!eval_suite.empty() && (s % stride == 0 || s == options.steps)) {
      last_e_test = e_test(result.params, eval_suite, init.config.K, 1);
    }
    row.e_test = last_e_test;
    row.summary = param_summaries(result.params);
    result.trace.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<double> smooth_trace(const std::vector<double>& values, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (sigma < 0.25) return values;
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int j = -radius; j <= radius; ++j) {
    kernel[j + radius] = std::exp(-0.5 * (j * j) / (sigma * sigma));
  }
  int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0, mass = 0.0;
    int lo = std::max(0, i - radius);
    int hi = std::min(n - 1, i + radius);
    for (int j = lo; j <= hi; ++j) {
      if (!std::isfinite(values[j])) continue;  // gaps stay out of the window
      double k = kernel[j - i + radius];
      acc += k * values[j];
      mass += k;
    }
    out[i] = mass > 0.0 ? acc / mass : values[i];
  }
  return out;
}

namespace {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> summary_headers(const MinAggConfig& config) {
  MinAggGnnParams zero = make_zero_params(config);
  ParamSummary s = param_summaries(zero);
  std::vector<std::string> headers;
  for (std::size_t ell = 0; ell < s.layers.size(); ++ell) {
    std::string prefix = "_l" + std::to_string(ell + 1) + "_";
    for (std::size_t i = 0; i < s.layers[ell].node_params.size(); ++i)
      headers.push_back("node" + prefix + std::to_string(i));
    for (std::size_t i = 0; i < s.layers[ell].edge_params.size(); ++i)
      headers.push_back("edge" + prefix + std::to_string(i));
    for (std::size_t i = 0; i < s.layers[ell].biases.size(); ++i)
      headers.push_back("bias" + prefix + std::to_string(i));
  }
  return headers;
}

}  // namespace

void write_trace_csv(const TrainTrace& trace, const MinAggConfig& config, std::ostream& out) {
  out << "step,loss_mse,loss_mse_l1,loss_reg,e_test";
  for (const auto& h : summary_headers(config)) out << ',' << h;
  out << '\n';
  for (const auto& row : trace.rows) {
    out << row.step << ',' << format_double(row.loss_mse) << ','
        << format_double(row.loss_mse_l1) << ',' << format_double(row.loss_reg) << ','
        << format_double(row.e_test);
    for (const auto& layer : row.summary.layers) {
      for (double x : layer.node_params) out << ',' << format_double(x);
      for (double x : layer.edge_params) out << ',' << format_double(x);
      for (double x : layer.biases) out << ',' << format_double(x);
    }
    out << '\n';
  }
}

void save_trace_csv(const TrainTrace& trace, const MinAggConfig& config,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_trace_csv(trace, config, out);
}

void smooth_csv(std::istream& in, std::ostream& out, double sigma) {
  std::string header;
  if (!std::getline(in, header)) throw ValidationError("empty trace CSV");

  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  if (names.empty()) throw ValidationError("trace CSV has no columns");

  std::vector<std::vector<double>> columns(names.size());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= names.size()) throw ValidationError("trace CSV row has extra columns");
      columns[col].push_back(std::strtod(cell.c_str(), nullptr));
      ++col;
    }
    if (col != names.size()) throw ValidationError("trace CSV row has missing columns");
  }

  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (names[c] == "step") continue;
    columns[c] = smooth_trace(columns[c], sigma);
  }

  out << header << '\n';
  std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      if (names[c] == "step")
        out << static_cast<long long>(columns[c][r]);
      else
        out << format_double(columns[c][r]);
    }
    out << '\n';
  }
}

}  // namespace bfgnn
