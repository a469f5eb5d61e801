#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bfgnn/graph.hpp"

namespace bfgnn {

/// A supervised pair: a t-step instance and the graph obtained by applying
/// k_steps further relaxation passes to it.
struct LabeledPair {
  AttributedGraph input;
  AttributedGraph target;
  int k_steps = 1;
};

struct DatasetManifest {
  std::string name;
  int k_steps = 1;
  // Total number of nodes, over all pairs, whose target feature is finite
  // (!= beta). This is the normalizer for the training losses and the M
  // constant of the certificates.
  long long total_reachable = 0;
  std::vector<LabeledPair> pairs;
};

/// Counts target-reachable nodes over all pairs.
long long count_total_reachable(const std::vector<LabeledPair>& pairs);

/// Builds a manifest from input graphs, labelling each with bf_k(input, k).
DatasetManifest make_manifest(std::string name, int k,
                              const std::vector<AttributedGraph>& inputs);

/// Path v_0..v_k with the given edge weights; features are the t-step
/// relaxation of the 0-step instance (source v_0). beta defaults to
/// (sum of weights) + 1.
AttributedGraph gen_path(int t, const std::vector<double>& weights);

/// The eight-pair single-step toy set: four one-edge paths at step 0 and four
/// two-edge paths at step 1, edge weights 2i for i in 1..8.
DatasetManifest gen_h_small();

/// Scale-probing paths: for each k in k_range and (a, b) in
/// {0..2K} x {0, 2K+1}, a step-1 path with K+1 edges, first edge weight a,
/// (k+1)-th edge weight b, all others zero. Order: k, then a, then b.
std::vector<AttributedGraph> gen_scale_set(int K, const std::set<int>& k_range);

/// Ladder gadget on 2K+2 nodes: two zero-weight rails v_0..v_K and u_0..u_K
/// plus unit-weight rungs (u_{i-1}, v_i) and (v_{i-1}, u_i); 0-step instance
/// with source v_0.
AttributedGraph gen_gadget_h(int K);

/// The K-step training set: scale set over k_range (default 1..K) plus the
/// one-edge unit path, the two-edge step-1 path, and the ladder gadget.
DatasetManifest gen_gk(int K);
DatasetManifest gen_gk(int K, const std::set<int>& k_range);

/// gen_gk(2) extended with four random 3-node step-0 paths and four random
/// 5-node step-2 paths, weights uniform integers in {1..8}.
DatasetManifest gen_experiment_train(int K, std::uint64_t seed);

/// 200 step-0 test graphs: 50 each of 3-cycles, 4-cycles, complete graphs
/// (sizes log-uniform in 5..200) and Erdos-Renyi p=0.5 graphs (sizes 5..50).
std::vector<AttributedGraph> gen_test_suite(std::uint64_t seed);

/// Sparse Erdos-Renyi 0-step instance with p = 5/n (expected degree 5).
AttributedGraph gen_er_sparse(int n, std::uint64_t seed);

nlohmann::ordered_json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

nlohmann::ordered_json suite_to_json(const std::vector<AttributedGraph>& suite);
std::vector<AttributedGraph> suite_from_json(const nlohmann::json& j);

}  // namespace bfgnn
