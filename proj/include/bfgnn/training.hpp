#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bfgnn/adamw.hpp"
#include "bfgnn/dataset.hpp"
#include "bfgnn/model.hpp"

namespace bfgnn {

struct LossConfig {
  double eta = 0.0;              // L0 coefficient; see default_eta
  double lambda_l1 = 1.0;        // L1 coefficient of the trainable proxy loss
  double nonzero_threshold = 1e-6;
};

/// 0.9 / (2 M (mL + mK + K)): keeps the certificate window open by
/// construction for the given training set and architecture.
double default_eta(const DatasetManifest& manifest, const MinAggConfig& config);

/// Mean absolute error over target-reachable nodes, normalized by the
/// manifest's M.
double loss_mae(const MinAggGnnParams& params, const DatasetManifest& manifest);

/// Mean squared error over target-reachable nodes, normalized by M.
double loss_mse(const MinAggGnnParams& params, const DatasetManifest& manifest);

/// loss_mae + eta * count_nonzero(params, threshold)  (the L0-regularized loss).
double loss_reg(const MinAggGnnParams& params, const DatasetManifest& manifest,
                const LossConfig& cfg);

/// loss_mse + lambda * ||theta||_1  (the trainable proxy).
double loss_mse_l1(const MinAggGnnParams& params, const DatasetManifest& manifest,
                   const LossConfig& cfg);

double l1_norm(const MinAggGnnParams& params);

struct TraceRow {
  long long step = 0;
  double loss_mse = 0.0;
  double loss_mse_l1 = 0.0;
  double loss_reg = 0.0;
  double e_test = 0.0;
  ParamSummary summary;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
};

struct TrainOptions {
  long long steps = 20000;
  std::uint64_t seed = 0;
  long long eval_stride = 50;  // e_test cadence; rows in between repeat the last value
};

struct TrainResult {
  MinAggGnnParams params;
  TrainTrace trace;
};

/// Full-batch AdamW on loss_mse_l1 (plain MSE when lambda is 0). One trace
/// row per optimizer step, holding the metrics of the just-updated
/// parameters. Deterministic: identical inputs give bitwise-identical
/// trajectories.
TrainResult train(const MinAggGnnParams& init, const DatasetManifest& manifest,
                  const LossConfig& cfg, const AdamWSettings& opt, const TrainOptions& options,
                  const std::vector<AttributedGraph>& eval_suite);

/// Truncated-Gaussian smoothing (radius 3 sigma, renormalized at the
/// boundaries); sigma below 0.25 returns the input unchanged.
std::vector<double> smooth_trace(const std::vector<double>& values, double sigma);

void write_trace_csv(const TrainTrace& trace, const MinAggConfig& config, std::ostream& out);
void save_trace_csv(const TrainTrace& trace, const MinAggConfig& config,
                    const std::string& path);

/// Column-wise smoothing of a trace CSV (every column except "step").
void smooth_csv(std::istream& in, std::ostream& out, double sigma);

}  // namespace bfgnn
