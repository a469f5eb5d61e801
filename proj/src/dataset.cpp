#include "bfgnn/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "bfgnn/rng.hpp"

namespace bfgnn {

long long count_total_reachable(const std::vector<LabeledPair>& pairs) {
  long long total = 0;
  for (const auto& p : pairs) {
    total += static_cast<long long>(reachable_nodes(p.target).size());
  }
  return total;
}

DatasetManifest make_manifest(std::string name, int k,
                              const std::vector<AttributedGraph>& inputs) {
  if (k < 1) throw ValidationError("k_steps must be positive");
  DatasetManifest m;
  m.name = std::move(name);
  m.k_steps = k;
  for (const auto& g : inputs) {
    m.pairs.push_back({g, bf_k(g, k), k});
  }
  m.total_reachable = count_total_reachable(m.pairs);
  return m;
}

AttributedGraph gen_path(int t, const std::vector<double>& weights) {
  if (weights.empty()) throw ValidationError("path needs at least one edge");
  if (t < 0) throw ValidationError("step tag must be non-negative");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("negative edge weight");
    sum += w;
  }
  AttributedGraph g;
  g.n = static_cast<int>(weights.size()) + 1;
  g.beta = sum + 1.0;
  g.step_tag = 0;
  g.features.assign(g.n, g.beta);
  g.features[0] = 0.0;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    g.edges.push_back({i, i + 1, weights[i]});
  }
  validate(g);
  return bf_k(g, t);
}

DatasetManifest gen_h_small() {
  std::vector<AttributedGraph> inputs;
  for (int i = 1; i <= 4; ++i) {
    inputs.push_back(gen_path(0, {2.0 * i}));
  }
  for (int i = 5; i <= 8; ++i) {
    inputs.push_back(gen_path(1, {2.0 * i, 0.0}));
  }
  return make_manifest("h-small", 1, inputs);
}

std::vector<AttributedGraph> gen_scale_set(int K, const std::set<int>& k_range) {
  if (K < 1) throw ValidationError("K must be positive");
  for (int k : k_range) {
    if (k < 1 || k > K) throw ValidationError("k_range must be within 1..K");
  }
  std::vector<AttributedGraph> out;
  for (int k : k_range) {
    for (int a = 0; a <= 2 * K; ++a) {
      for (int b : {0, 2 * K + 1}) {
        std::vector<double> weights(K + 1, 0.0);
        weights[0] = a;
        weights[k] = b;  // the (k+1)-th edge
        out.push_back(gen_path(1, weights));
      }
    }
  }
  return out;
}

AttributedGraph gen_gadget_h(int K) {
  if (K < 1) throw ValidationError("K must be positive");
  AttributedGraph g;
  g.n = 2 * K + 2;
  g.step_tag = 0;
  auto v = [](int i) { return i; };
  auto u = [K](int i) { return K + 1 + i; };
  for (int i = 1; i <= K; ++i) {
    g.edges.push_back({v(i - 1), v(i), 0.0});
    g.edges.push_back({u(i - 1), u(i), 0.0});
    g.edges.push_back({u(i - 1), v(i), 1.0});
    g.edges.push_back({v(i - 1), u(i), 1.0});
  }
  g.beta = 2.0 * K + 1.0;
  g.features.assign(g.n, g.beta);
  g.features[v(0)] = 0.0;
  normalize_edges(g);
  validate(g);
  return g;
}

DatasetManifest gen_gk(int K, const std::set<int>& k_range) {
  std::vector<AttributedGraph> inputs = gen_scale_set(K, k_range);
  inputs.push_back(gen_path(0, {1.0}));
  inputs.push_back(gen_path(1, {1.0, 0.0}));
  inputs.push_back(gen_gadget_h(K));
  return make_manifest("gk-" + std::to_string(K), K, inputs);
}

DatasetManifest gen_gk(int K) {
  std::set<int> k_range;
  for (int k = 1; k <= K; ++k) k_range.insert(k);
  return gen_gk(K, k_range);
}

DatasetManifest gen_experiment_train(int K, std::uint64_t seed) {
  if (K != 2) throw ValidationError("experiment training set is defined for K = 2");
  DatasetManifest base = gen_gk(2);
  Rng rng(seed);
  std::vector<AttributedGraph> extras;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> w(2);
    for (auto& x : w) x = rng.next_int(1, 8);
    extras.push_back(gen_path(0, w));
  }
  for (int i = 0; i < 4; ++i) {
    std::vector<double> w(4);
    for (auto& x : w) x = rng.next_int(1, 8);
    extras.push_back(gen_path(2, w));
  }
  for (const auto& g : extras) {
    base.pairs.push_back({g, bf_k(g, 2), 2});
  }
  base.name = "experiment-train-k2";
  base.total_reachable = count_total_reachable(base.pairs);
  return base;
}

namespace {

AttributedGraph cycle_graph(int n, Rng& rng) {
  AttributedGraph g;
  g.n = n;
  g.step_tag = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = rng.next_double(0.0, 10.0);
    sum += w;
    g.edges.push_back({i, (i + 1) % n, w});
  }
  g.beta = sum + 1.0;
  g.features.assign(n, g.beta);
  g.features[0] = 0.0;
  normalize_edges(g);
  validate(g);
  return g;
}

AttributedGraph complete_graph(int n, Rng& rng) {
  AttributedGraph g;
  g.n = n;
  g.step_tag = 0;
  double sum = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      double w = rng.next_double(0.0, 10.0);
      sum += w;
      g.edges.push_back({u, v, w});
    }
  }
  g.beta = sum + 1.0;
  g.features.assign(n, g.beta);
  g.features[0] = 0.0;
  validate(g);
  return g;
}

AttributedGraph er_graph(int n, double p, Rng& rng) {
  AttributedGraph g;
  g.n = n;
  g.step_tag = 0;
  double sum = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!rng.next_bool(p)) continue;
      double w = rng.next_double(0.0, 10.0);
      sum += w;
      g.edges.push_back({u, v, w});
    }
  }
  g.beta = sum + 1.0;
  g.features.assign(n, g.beta);
  g.features[0] = 0.0;
  validate(g);
  return g;
}

}  // namespace

std::vector<AttributedGraph> gen_test_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AttributedGraph> suite;
  for (int i = 0; i < 50; ++i) suite.push_back(cycle_graph(3, rng));
  for (int i = 0; i < 50; ++i) suite.push_back(cycle_graph(4, rng));
  for (int i = 0; i < 50; ++i) {
    // log-uniform size in 5..200
    double x = rng.next_double(std::log(5.0), std::log(201.0));
    int n = std::clamp(static_cast<int>(std::exp(x)), 5, 200);
    suite.push_back(complete_graph(n, rng));
  }
  for (int i = 0; i < 50; ++i) {
    int n = rng.next_int(5, 50);
    suite.push_back(er_graph(n, 0.5, rng));
  }
  return suite;
}

AttributedGraph gen_er_sparse(int n, std::uint64_t seed) {
  if (n < 6) throw ValidationError("sparse ER generator needs n >= 6");
  Rng rng(seed);
  return er_graph(n, 5.0 / n, rng);
}

nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["K"] = m.k_steps;
  j["M"] = m.total_reachable;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : m.pairs) {
    nlohmann::ordered_json pj;
    pj["input"] = graph_to_json(p.input);
    pj["target"] = graph_to_json(p.target);
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.k_steps = j.at("K").get<int>();
    m.total_reachable = j.at("M").get<long long>();
    for (const auto& pj : j.at("pairs")) {
      LabeledPair p;
      p.input = graph_from_json(pj.at("input"));
      p.target = graph_from_json(pj.at("target"));
      p.k_steps = m.k_steps;
      m.pairs.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed manifest JSON: ") + ex.what());
  }
  if (m.total_reachable != count_total_reachable(m.pairs))
    throw ValidationError("manifest M does not match recomputed reachable count");
  return m;
}

nlohmann::ordered_json suite_to_json(const std::vector<AttributedGraph>& suite) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& g : suite) j.push_back(graph_to_json(g));
  return j;
}

std::vector<AttributedGraph> suite_from_json(const nlohmann::json& j) {
  std::vector<AttributedGraph> suite;
  for (const auto& gj : j) suite.push_back(graph_from_json(gj));
  return suite;
}

}  // namespace bfgnn
