#pragma once

#include <vector>

#include "bfgnn/dataset.hpp"
#include "bfgnn/graph.hpp"
#include "bfgnn/rng.hpp"

namespace bfgnn::testing {

/// Random connected-ish small graph: n in [2, max_n], each pair an edge with
/// probability 0.5, weights a mix of small integers and halves, features the
/// t-step relaxation of a 0-step instance with source 0.
inline AttributedGraph random_small_graph(Rng& rng, int max_n = 8, int max_t = 2) {
  AttributedGraph g;
  g.n = rng.next_int(2, max_n);
  g.step_tag = 0;
  double sum = 0.0;
  for (int u = 0; u < g.n; ++u) {
    for (int v = u + 1; v < g.n; ++v) {
      if (!rng.next_bool(0.5)) continue;
      double w = rng.next_int(0, 8) * 0.5;
      sum += w;
      g.edges.push_back({u, v, w});
    }
  }
  g.beta = sum + 1.0;
  g.features.assign(g.n, g.beta);
  g.features[0] = 0.0;
  validate(g);
  return bf_k(g, rng.next_int(0, max_t));
}

inline AttributedGraph relabel(const AttributedGraph& g, const std::vector<int>& perm) {
  AttributedGraph out;
  out.n = g.n;
  out.beta = g.beta;
  out.step_tag = g.step_tag;
  out.features.assign(g.n, 0.0);
  for (int v = 0; v < g.n; ++v) out.features[perm[v]] = g.features[v];
  for (const auto& e : g.edges) out.edges.push_back({perm[e.u], perm[e.v], e.w});
  normalize_edges(out);
  return out;
}

inline std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = rng.next_int(0, i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace bfgnn::testing
