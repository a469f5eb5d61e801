#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bfgnn/dataset.hpp"
#include "bfgnn/graph.hpp"
#include "bfgnn/mlp.hpp"
#include "bfgnn/tape.hpp"

namespace bfgnn {

/// Architecture of a min-aggregation GNN: L node-update layers learning K
/// relaxation steps, each layer holding an m-layer aggregation MLP
/// (d_{l-1}+1 -> d) and an m-layer update MLP (d + d_{l-1} -> d_l); MLP
/// interiors are `hidden` wide.
struct MinAggConfig {
  int L = 1;
  int K = 1;
  int m = 1;
  int d = 1;
  int hidden = 1;
  std::vector<int> d_ell;  // size L+1, d_ell[0] == d_ell[L] == 1

  int param_budget() const { return m * L + m * K + K; }
  std::vector<int> agg_dims(int ell) const;  // ell is 1-based
  std::vector<int> up_dims(int ell) const;
  void check() const;

  static MinAggConfig preset(const std::string& name);
  static std::vector<std::string> preset_names();
};

struct MinAggGnnParams {
  MinAggConfig config;
  struct LayerParams {
    Mlp agg;
    Mlp up;
  };
  std::vector<LayerParams> layers;
};

/// The five-parameter single-layer network
/// h_v = relu(w2 * min_u relu(W11 x_u + W12 x_uv + b1) + b2).
struct SimpleGnnParams {
  double W11 = 0.0;
  double W12 = 0.0;
  double b1 = 0.0;
  double w2 = 0.0;
  double b2 = 0.0;
};

struct CollapsedUpdate {
  std::vector<double> mu;  // per relaxation step k = 1..K
  std::vector<double> nu;
};

struct LayerSummary {
  std::vector<double> node_params;
  std::vector<double> edge_params;
  std::vector<double> biases;
};

struct ParamSummary {
  std::vector<LayerSummary> layers;
};

struct StructureReport {
  bool pattern_ok = false;
  bool counts_ok = false;
  bool biases_ok = false;
  bool chains_ok = false;
  bool all_positive = false;
  long long nonzero_count = 0;
  std::vector<int> message_passing_layers;  // 1-based
  std::vector<std::string> violations;
  std::string to_string() const;
};

MinAggGnnParams make_zero_params(const MinAggConfig& config);

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
MinAggGnnParams init_params(const MinAggConfig& config, std::uint64_t seed);

/// The explicit sparse assignment that makes the network compute exactly K
/// relaxation steps: first aggregation layer sums node feature and edge
/// weight, identity chains elsewhere, skip-identity for layers beyond K,
/// all biases zero. Uses m*L + m*K + K nonzero entries.
MinAggGnnParams build_exact_bf(const MinAggConfig& config);

/// Registers every tensor (layer 1..L, aggregation then update, W_j then b_j)
/// and returns the registry; the flat ordering is canonical for gradients,
/// optimizer state, and L1.
ParamSet bind_params(MinAggGnnParams& params);

/// L layers of min-aggregation message passing over the closed neighborhood;
/// features of the result are h^(L). Checks the input graph's structure but
/// tolerates features outside [0, beta] so that model outputs can be fed
/// back in.
AttributedGraph forward(const MinAggGnnParams& params, const AttributedGraph& g);

/// reps-fold composition of forward, feeding output features into the next
/// pass.
AttributedGraph iterate_model(const MinAggGnnParams& params, const AttributedGraph& g,
                              int reps);

AttributedGraph simple_forward(const SimpleGnnParams& p, const AttributedGraph& g);

/// SimpleGnnParams as a 1-layer, m=1, d=1 MinAgg network (skip weight zero).
MinAggGnnParams embed_simple(const SimpleGnnParams& p);

long long count_nonzero(const MinAggGnnParams& params, double threshold);

/// Materializes the thresholded readout of a trained model: every entry with
/// |value| <= threshold becomes exactly zero. Entries the optimizer parked
/// near zero otherwise scale with the sentinel feature on large
/// out-of-distribution graphs and swamp small targets.
MinAggGnnParams prune_params(const MinAggGnnParams& params, double threshold);

/// Checks the thresholded nonzero pattern demanded of any near-minimal
/// model: one nonzero per update matrix, K aggregation chains whose first
/// matrix has exactly two nonzeros sharing a row (one node column, one edge
/// column), connected single-path chains, zero biases.
StructureReport check_sparsity_structure(const MinAggGnnParams& params, double threshold);

/// Folds the single nonzero path of a structure-checked model into per-step
/// scalars (mu, nu); mu = nu = 1 for every step is exact relaxation. Refuses
/// (with the report text) when the structure check fails or a chain value is
/// not positive.
CollapsedUpdate collapse_params(const MinAggGnnParams& params, double threshold);

/// Per-layer node/edge/bias summaries: elementwise products of effective
/// update rows with effective aggregation columns, where "effective" means
/// the product of the MLP's weight matrices.
ParamSummary param_summaries(const MinAggGnnParams& params);

/// Objective recording: the full-batch squared-error objective over a
/// manifest (mean over target-reachable nodes), differentiable through the
/// tape. The tape's abs_error() side metric equals the mean absolute error.
Tape record_mse_objective(const ParamSet& pset, const MinAggGnnParams& params,
                          const DatasetManifest& manifest);

nlohmann::ordered_json checkpoint_to_json(const MinAggGnnParams& params);
MinAggGnnParams checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const MinAggGnnParams& params, const std::string& path);
MinAggGnnParams load_checkpoint(const std::string& path);

nlohmann::ordered_json summary_to_json(const ParamSummary& s);

}  // namespace bfgnn
