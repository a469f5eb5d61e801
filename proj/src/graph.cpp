#include "bfgnn/graph.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace bfgnn {

void normalize_edges(AttributedGraph& g) {
  for (auto& e : g.edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
}

void validate(const AttributedGraph& g) {
  if (g.n < 1) throw ValidationError("graph must have at least one node");
  if (static_cast<int>(g.features.size()) != g.n)
    throw ValidationError("feature count does not match node count");
  if (!(g.beta > 0.0) || !std::isfinite(g.beta))
    throw ValidationError("beta must be positive and finite");

  double weight_sum = 0.0;
  const Edge* prev = nullptr;
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.n || e.v >= g.n)
      throw ValidationError("edge endpoint out of range");
    if (e.u >= e.v) throw ValidationError("edges must be stored with u < v");
    if (prev && prev->u == e.u && prev->v == e.v)
      throw ValidationError("duplicate edge");
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw ValidationError("edge weight must be non-negative and finite");
    weight_sum += e.w;
    prev = &e;
  }
  if (!(weight_sum < g.beta))
    throw ValidationError("sum of edge weights must be below beta");
  for (double x : g.features) {
    if (!std::isfinite(x) || x < 0.0 || x > g.beta)
      throw ValidationError("node feature outside [0, beta]");
  }
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const AttributedGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.n);
  for (int v = 0; v < g.n; ++v) adj[v].push_back({v, 0.0});
  for (const auto& e : g.edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());
  return adj;
}

NeighborView neighbors(const AttributedGraph& g, int node) {
  if (node < 0 || node >= g.n) throw ValidationError("node id out of range");
  NeighborView view;
  view.node = node;
  view.neighbors.push_back({node, 0.0});
  for (const auto& e : g.edges) {
    if (e.u == node) view.neighbors.push_back({e.v, e.w});
    if (e.v == node) view.neighbors.push_back({e.u, e.w});
  }
  std::sort(view.neighbors.begin(), view.neighbors.end());
  return view;
}

AttributedGraph bf_step(const AttributedGraph& g) {
  validate(g);
  AttributedGraph out = g;
  auto adj = adjacency(g);
  for (int v = 0; v < g.n; ++v) {
    double best = g.features[v];
    for (const auto& [u, w] : adj[v]) {
      double cand = g.features[u] + w;
      if (cand < best) best = cand;
    }
    out.features[v] = best;
  }
  if (out.step_tag) out.step_tag = *out.step_tag + 1;
  return out;
}

AttributedGraph bf_k(const AttributedGraph& g, int k) {
  if (k < 0) throw ValidationError("step count must be non-negative");
  AttributedGraph out = g;
  validate(out);
  for (int i = 0; i < k; ++i) out = bf_step(out);
  return out;
}

std::vector<int> reachable_nodes(const AttributedGraph& g) {
  validate(g);
  std::vector<int> nodes;
  for (int v = 0; v < g.n; ++v) {
    if (g.features[v] != g.beta) nodes.push_back(v);
  }
  return nodes;
}

std::vector<double> brute_force_khop(const AttributedGraph& g, int k) {
  validate(g);
  if (g.n > 8) throw RefusalError("walk enumeration capped at 8 nodes");
  if (k < 0 || k > 6) throw RefusalError("walk enumeration capped at k <= 6");

  auto adj = adjacency(g);
  std::vector<double> best(g.n, g.beta);

  // Every walk of <= k stored edges, charged with the start node's feature.
  // The implicit self-loop means shorter walks already cover "waiting", so
  // enumerating walks of exactly j edges for all j <= k is exhaustive.
  struct Frame {
    int node;
    double cost;
    int depth;
  };
  for (int start = 0; start < g.n; ++start) {
    std::vector<Frame> stack{{start, g.features[start], 0}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (f.cost < best[f.node]) best[f.node] = f.cost;
      if (f.depth == k) continue;
      for (const auto& [u, w] : adj[f.node]) {
        if (u == f.node) continue;  // self-loop walks never improve cost
        stack.push_back({u, f.cost + w, f.depth + 1});
      }
    }
  }
  for (double& x : best) {
    if (x > g.beta) x = g.beta;
  }
  return best;
}

nlohmann::ordered_json graph_to_json(const AttributedGraph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.n;
  j["beta"] = g.beta;
  if (g.step_tag)
    j["step"] = *g.step_tag;
  else
    j["step"] = nullptr;
  j["features"] = g.features;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    edges.push_back(nlohmann::ordered_json::array({e.u, e.v, e.w}));
  }
  j["edges"] = std::move(edges);
  return j;
}

AttributedGraph graph_from_json(const nlohmann::json& j) {
  AttributedGraph g;
  try {
    g.n = j.at("n").get<int>();
    g.beta = j.at("beta").get<double>();
    if (j.contains("step") && !j.at("step").is_null())
      g.step_tag = j.at("step").get<int>();
    g.features = j.at("features").get<std::vector<double>>();
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed graph JSON: ") + ex.what());
  }
  normalize_edges(g);
  validate(g);
  return g;
}

std::string graph_to_string(const AttributedGraph& g) { return graph_to_json(g).dump(); }

AttributedGraph graph_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed graph JSON: ") + ex.what());
  }
  return graph_from_json(j);
}

}  // namespace bfgnn
