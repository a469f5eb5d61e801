#include "bfgnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bfgnn/rng.hpp"

namespace bfgnn {

std::vector<int> MinAggConfig::agg_dims(int ell) const {
  std::vector<int> dims;
  dims.push_back(d_ell[ell - 1] + 1);
  for (int j = 0; j < m - 1; ++j) dims.push_back(hidden);
  dims.push_back(d);
  return dims;
}

std::vector<int> MinAggConfig::up_dims(int ell) const {
  std::vector<int> dims;
  dims.push_back(d + d_ell[ell - 1]);
  for (int j = 0; j < m - 1; ++j) dims.push_back(hidden);
  dims.push_back(d_ell[ell]);
  return dims;
}

void MinAggConfig::check() const {
  if (K < 1 || L < K) throw ValidationError("architecture requires L >= K >= 1");
  if (m < 1 || d < 1 || hidden < 1) throw ValidationError("m, d, hidden must be positive");
  if (static_cast<int>(d_ell.size()) != L + 1)
    throw ValidationError("d_ell must list L+1 widths");
  if (d_ell.front() != 1 || d_ell.back() != 1)
    throw ValidationError("d_ell must start and end at width 1");
  for (int w : d_ell) {
    if (w < 1) throw ValidationError("feature widths must be positive");
  }
}

MinAggConfig MinAggConfig::preset(const std::string& name) {
  MinAggConfig c;
  if (name == "deep-2layer") {
    c = {2, 2, 2, 8, 64, {1, 8, 1}};
  } else if (name == "wide-1layer") {
    c = {1, 1, 1, 64, 1, {1, 1}};
  } else if (name == "wide-2layer-1step") {
    c = {2, 1, 1, 64, 1, {1, 1, 1}};
  } else if (name == "wide-2layer-2step") {
    c = {2, 2, 1, 64, 1, {1, 1, 1}};
  } else {
    throw ValidationError("unknown preset: " + name);
  }
  c.check();
  return c;
}

std::vector<std::string> MinAggConfig::preset_names() {
  return {"deep-2layer", "wide-1layer", "wide-2layer-1step",
          "wide-2layer-2step"};
}

MinAggGnnParams make_zero_params(const MinAggConfig& config) {
  config.check();
  MinAggGnnParams p;
  p.config = config;
  for (int ell = 1; ell <= config.L; ++ell) {
    MinAggGnnParams::LayerParams layer;
    layer.agg = make_mlp(config.agg_dims(ell));
    layer.up = make_mlp(config.up_dims(ell));
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MinAggGnnParams init_params(const MinAggConfig& config, std::uint64_t seed) {
  MinAggGnnParams p = make_zero_params(config);
  Rng rng(seed);
  for (auto& layer : p.layers) {
    for (Mlp* f : {&layer.agg, &layer.up}) {
      for (auto& w : f->weights) {
        double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
        for (auto& x : w.a) x = rng.next_double(-scale, scale);
      }
    }
  }
  return p;
}

MinAggGnnParams build_exact_bf(const MinAggConfig& config) {
  MinAggGnnParams p = make_zero_params(config);
  const int m = config.m;
  for (int ell = 1; ell <= config.L; ++ell) {
    auto& agg = p.layers[ell - 1].agg;
    auto& up = p.layers[ell - 1].up;
    if (ell <= config.K) {
      // sum node coordinate 0 with the edge weight, then pass it along
      agg.weights[0].at(0, 0) = 1.0;
      agg.weights[0].at(0, agg.weights[0].cols - 1) = 1.0;
      for (int j = 1; j < m; ++j) agg.weights[j].at(0, 0) = 1.0;
      for (int j = 0; j < m; ++j) up.weights[j].at(0, 0) = 1.0;
    } else {
      // aggregation silent; copy the previous feature through the skip
      up.weights[0].at(0, config.d) = 1.0;
      for (int j = 1; j < m; ++j) up.weights[j].at(0, 0) = 1.0;
    }
  }
  return p;
}

ParamSet bind_params(MinAggGnnParams& params) {
  // Canonical flat order: layer 1..L, aggregation then update, W_j then b_j.
  // record_mse_objective relies on this layout to compute tensor ids.
  ParamSet pset;
  for (auto& layer : params.layers) {
    for (Mlp* f : {&layer.agg, &layer.up}) {
      for (int j = 0; j < f->depth(); ++j) {
        pset.add(f->weights[j]);
        pset.add(f->biases[j]);
      }
    }
  }
  return pset;
}

namespace {

void check_structure_only(const AttributedGraph& g) {
  if (g.n < 1) throw ValidationError("graph must have at least one node");
  if (static_cast<int>(g.features.size()) != g.n)
    throw ValidationError("feature count does not match node count");
  const Edge* prev = nullptr;
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.n || e.v >= g.n)
      throw ValidationError("edge endpoint out of range");
    if (e.u >= e.v) throw ValidationError("edges must be stored with u < v");
    if (prev && prev->u == e.u && prev->v == e.v)
      throw ValidationError("duplicate edge");
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw ValidationError("edge weight must be non-negative and finite");
    prev = &e;
  }
  for (double x : g.features) {
    if (!std::isfinite(x)) throw ValidationError("node feature must be finite");
  }
}

}  // namespace

AttributedGraph forward(const MinAggGnnParams& params, const AttributedGraph& g) {
  params.config.check();
  check_structure_only(g);
  const auto& cfg = params.config;
  auto adj = adjacency(g);

  std::vector<std::vector<double>> h(g.n);
  for (int v = 0; v < g.n; ++v) h[v] = {g.features[v]};

  std::vector<std::vector<double>> next(g.n);
  std::vector<double> agg_in;
  for (int ell = 1; ell <= cfg.L; ++ell) {
    const auto& layer = params.layers[ell - 1];
    int in_node = cfg.d_ell[ell - 1];
    for (int v = 0; v < g.n; ++v) {
      std::vector<double> agg_min(cfg.d, 0.0);
      bool first = true;
      for (const auto& [u, w] : adj[v]) {
        agg_in.assign(h[u].begin(), h[u].end());
        agg_in.push_back(w);
        std::vector<double> z = layer.agg.forward(agg_in);
        if (first) {
          agg_min = std::move(z);
          first = false;
        } else {
          for (int i = 0; i < cfg.d; ++i) {
            if (z[i] < agg_min[i]) agg_min[i] = z[i];
          }
        }
      }
      std::vector<double> up_in;
      up_in.reserve(cfg.d + in_node);
      up_in.insert(up_in.end(), agg_min.begin(), agg_min.end());
      up_in.insert(up_in.end(), h[v].begin(), h[v].end());
      next[v] = layer.up.forward(up_in);
    }
    h.swap(next);
  }

  AttributedGraph out = g;
  for (int v = 0; v < g.n; ++v) out.features[v] = h[v][0];
  out.step_tag.reset();
  return out;
}

AttributedGraph iterate_model(const MinAggGnnParams& params, const AttributedGraph& g,
                              int reps) {
  if (reps < 1) throw ValidationError("reps must be positive");
  AttributedGraph cur = g;
  for (int r = 0; r < reps; ++r) cur = forward(params, cur);
  return cur;
}

AttributedGraph simple_forward(const SimpleGnnParams& p, const AttributedGraph& g) {
  check_structure_only(g);
  auto adj = adjacency(g);
  AttributedGraph out = g;
  for (int v = 0; v < g.n; ++v) {
    double best = 0.0;
    bool first = true;
    for (const auto& [u, w] : adj[v]) {
      double z = p.W11 * g.features[u] + p.W12 * w + p.b1;
      if (z < 0.0) z = 0.0;
      if (first || z < best) {
        best = z;
        first = false;
      }
    }
    double y = p.w2 * best + p.b2;
    out.features[v] = y > 0.0 ? y : 0.0;
  }
  out.step_tag.reset();
  return out;
}

MinAggGnnParams embed_simple(const SimpleGnnParams& p) {
  MinAggConfig cfg{1, 1, 1, 1, 1, {1, 1}};
  MinAggGnnParams params = make_zero_params(cfg);
  auto& layer = params.layers[0];
  layer.agg.weights[0].at(0, 0) = p.W11;
  layer.agg.weights[0].at(0, 1) = p.W12;
  layer.agg.biases[0][0] = p.b1;
  layer.up.weights[0].at(0, 0) = p.w2;
  layer.up.biases[0][0] = p.b2;
  return params;
}

long long count_nonzero(const MinAggGnnParams& params, double threshold) {
  if (threshold < 0.0) throw ValidationError("threshold must be non-negative");
  long long count = 0;
  for (const auto& layer : params.layers) {
    for (const Mlp* f : {&layer.agg, &layer.up}) {
      for (const auto& w : f->weights) {
        for (double x : w.a) {
          if (std::fabs(x) > threshold) ++count;
        }
      }
      for (const auto& b : f->biases) {
        for (double x : b) {
          if (std::fabs(x) > threshold) ++count;
        }
      }
    }
  }
  return count;
}

MinAggGnnParams prune_params(const MinAggGnnParams& params, double threshold) {
  if (threshold < 0.0) throw ValidationError("threshold must be non-negative");
  MinAggGnnParams out = params;
  for (auto& layer : out.layers) {
    for (Mlp* f : {&layer.agg, &layer.up}) {
      for (auto& w : f->weights) {
        for (auto& x : w.a) {
          if (std::fabs(x) <= threshold) x = 0.0;
        }
      }
      for (auto& b : f->biases) {
        for (auto& x : b) {
          if (std::fabs(x) <= threshold) x = 0.0;
        }
      }
    }
  }
  return out;
}

namespace {

struct NonzeroEntry {
  int row = -1;
  int col = -1;
  double value = 0.0;
};

std::vector<NonzeroEntry> matrix_nonzeros(const Mat& w, double threshold) {
  std::vector<NonzeroEntry> out;
  for (int i = 0; i < w.rows; ++i) {
    for (int j = 0; j < w.cols; ++j) {
      if (std::fabs(w.at(i, j)) > threshold) out.push_back({i, j, w.at(i, j)});
    }
  }
  return out;
}

struct LayerTrace {
  bool message_passing = false;
  double rho = 0.0;    // node-path scale through the aggregation MLP
  double tau = 0.0;    // edge-path scale through the aggregation MLP
  double gamma = 0.0;  // scale through the update MLP
};

struct StructureAnalysis {
  StructureReport report;
  std::vector<LayerTrace> traces;
};

StructureAnalysis analyze_structure(const MinAggGnnParams& params, double threshold) {
  const auto& cfg = params.config;
  StructureAnalysis out;
  StructureReport& rep = out.report;
  rep.counts_ok = true;
  rep.biases_ok = true;
  rep.chains_ok = true;
  rep.all_positive = true;
  rep.nonzero_count = count_nonzero(params, threshold);
  out.traces.resize(cfg.L);

  auto violation = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

  int active_coord = 0;
  for (int ell = 1; ell <= cfg.L; ++ell) {
    const auto& layer = params.layers[ell - 1];
    LayerTrace& trace = out.traces[ell - 1];
    std::string where = "layer " + std::to_string(ell);

    for (const Mlp* f : {&layer.agg, &layer.up}) {
      for (const auto& b : f->biases) {
        for (double x : b) {
          if (std::fabs(x) > threshold) {
            rep.biases_ok = false;
            violation(where + ": nonzero bias " + std::to_string(x));
          }
        }
      }
    }

    long long agg_total = 0;
    for (const auto& w : layer.agg.weights) {
      agg_total += static_cast<long long>(matrix_nonzeros(w, threshold).size());
    }
    trace.message_passing = agg_total > 0;

    if (trace.message_passing) {
      rep.message_passing_layers.push_back(ell);
      auto first = matrix_nonzeros(layer.agg.weights[0], threshold);
      int node_width = layer.agg.weights[0].cols - 1;
      double node_val = 0.0, edge_val = 0.0;
      int chain_row = -1;
      if (first.size() != 2) {
        rep.counts_ok = false;
        violation(where + ": first aggregation matrix has " + std::to_string(first.size()) +
                  " nonzeros, expected 2");
      } else if (first[0].row != first[1].row) {
        rep.counts_ok = false;
        violation(where + ": aggregation nonzeros do not share a row");
      } else {
        const NonzeroEntry* node_entry = nullptr;
        const NonzeroEntry* edge_entry = nullptr;
        for (const auto& e : first) {
          if (e.col == node_width)
            edge_entry = &e;
          else
            node_entry = &e;
        }
        if (!node_entry || !edge_entry) {
          rep.counts_ok = false;
          violation(where + ": aggregation must touch one node column and the edge column");
        } else {
          node_val = node_entry->value;
          edge_val = edge_entry->value;
          chain_row = node_entry->row;
          if (node_entry->col != active_coord) {
            rep.chains_ok = false;
            violation(where + ": aggregation reads node column " +
                      std::to_string(node_entry->col) + ", active coordinate is " +
                      std::to_string(active_coord));
          }
        }
      }
      double chain_prod = 1.0;
      for (int j = 1; j < cfg.m; ++j) {
        auto nz = matrix_nonzeros(layer.agg.weights[j], threshold);
        if (nz.size() != 1) {
          rep.counts_ok = false;
          violation(where + ": aggregation matrix " + std::to_string(j + 1) + " has " +
                    std::to_string(nz.size()) + " nonzeros, expected 1");
          chain_row = -1;
        } else {
          if (chain_row >= 0 && nz[0].col != chain_row) {
            rep.chains_ok = false;
            violation(where + ": aggregation chain broken at matrix " + std::to_string(j + 1));
          }
          chain_row = nz[0].row;
          chain_prod *= nz[0].value;
        }
      }
      trace.rho = node_val * chain_prod;
      trace.tau = edge_val * chain_prod;

      // update MLP must read the aggregation output coordinate
      int up_expected_col = chain_row;
      double gamma = 1.0;
      int up_row = -1;
      for (int j = 0; j < cfg.m; ++j) {
        auto nz = matrix_nonzeros(layer.up.weights[j], threshold);
        if (nz.size() != 1) {
          rep.counts_ok = false;
          violation(where + ": update matrix " + std::to_string(j + 1) + " has " +
                    std::to_string(nz.size()) + " nonzeros, expected 1");
          up_expected_col = -2;
          continue;
        }
        if (j == 0) {
          if (nz[0].col >= cfg.d) {
            rep.chains_ok = false;
            violation(where + ": update reads the skip segment of a message-passing layer");
          } else if (up_expected_col >= 0 && nz[0].col != up_expected_col) {
            rep.chains_ok = false;
            violation(where + ": update does not read the aggregation output coordinate");
          }
        } else if (up_row >= 0 && nz[0].col != up_row) {
          rep.chains_ok = false;
          violation(where + ": update chain broken at matrix " + std::to_string(j + 1));
        }
        up_row = nz[0].row;
        gamma *= nz[0].value;
      }
      trace.gamma = gamma;
      if (up_row >= 0) active_coord = up_row;
    } else {
      // stationary layer: the update must copy (scale) the previous feature
      double gamma = 1.0;
      int up_row = -1;
      for (int j = 0; j < cfg.m; ++j) {
        auto nz = matrix_nonzeros(layer.up.weights[j], threshold);
        if (nz.size() != 1) {
          rep.counts_ok = false;
          violation(where + ": update matrix " + std::to_string(j + 1) + " has " +
                    std::to_string(nz.size()) + " nonzeros, expected 1");
          continue;
        }
        if (j == 0) {
          int want = cfg.d + active_coord;
          if (nz[0].col != want) {
            rep.chains_ok = false;
            violation(where + ": stationary update reads column " + std::to_string(nz[0].col) +
                      ", expected skip column " + std::to_string(want));
          }
        } else if (up_row >= 0 && nz[0].col != up_row) {
          rep.chains_ok = false;
          violation(where + ": update chain broken at matrix " + std::to_string(j + 1));
        }
        up_row = nz[0].row;
        gamma *= nz[0].value;
      }
      trace.gamma = gamma;
      if (up_row >= 0) active_coord = up_row;
    }
  }

  if (static_cast<int>(rep.message_passing_layers.size()) != cfg.K) {
    rep.counts_ok = false;
    rep.violations.push_back("found " + std::to_string(rep.message_passing_layers.size()) +
                             " message-passing layers, expected " + std::to_string(cfg.K));
  }
  if (rep.nonzero_count != cfg.param_budget() && rep.counts_ok && rep.biases_ok) {
    rep.counts_ok = false;
    rep.violations.push_back("nonzero count " + std::to_string(rep.nonzero_count) +
                             " differs from budget " + std::to_string(cfg.param_budget()));
  }

  for (int ell = 1; ell <= cfg.L; ++ell) {
    const LayerTrace& t = out.traces[ell - 1];
    bool positive = t.message_passing ? (t.rho > 0.0 && t.tau > 0.0 && t.gamma > 0.0)
                                      : (t.gamma > 0.0);
    if (!positive) {
      rep.all_positive = false;
      rep.violations.push_back("layer " + std::to_string(ell) +
                               ": chain values are not all positive");
    }
  }

  rep.pattern_ok = rep.counts_ok && rep.biases_ok && rep.chains_ok;
  return out;
}

}  // namespace

std::string StructureReport::to_string() const {
  std::ostringstream os;
  os << (pattern_ok ? "pattern holds" : "pattern fails");
  os << "; nonzeros=" << nonzero_count;
  os << "; message-passing layers:";
  for (int ell : message_passing_layers) os << ' ' << ell;
  if (!violations.empty()) {
    os << "; violations:";
    for (const auto& v : violations) os << "\n  - " << v;
  }
  return os.str();
}

StructureReport check_sparsity_structure(const MinAggGnnParams& params, double threshold) {
  return analyze_structure(params, threshold).report;
}

CollapsedUpdate collapse_params(const MinAggGnnParams& params, double threshold) {
  StructureAnalysis analysis = analyze_structure(params, threshold);
  if (!analysis.report.pattern_ok || !analysis.report.all_positive) {
    throw RefusalError("cannot collapse parameters: " + analysis.report.to_string());
  }
  const auto& cfg = params.config;
  CollapsedUpdate cu;
  double pending_scale = 1.0;  // product of stationary scalings not yet folded
  for (int ell = 1; ell <= cfg.L; ++ell) {
    const LayerTrace& t = analysis.traces[ell - 1];
    if (t.message_passing) {
      double alpha_bar = t.rho * pending_scale;
      double gamma_bar = t.gamma;
      double tau_bar = t.tau;
      cu.mu.push_back(gamma_bar * alpha_bar);
      cu.nu.push_back(tau_bar / alpha_bar);
      pending_scale = 1.0;
    } else {
      pending_scale *= t.gamma;
    }
  }
  // stationary layers after the last message-passing layer rescale the output
  if (!cu.mu.empty()) cu.mu.back() *= pending_scale;
  return cu;
}

namespace {

Mat mat_mul(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

Mat effective_weight(const Mlp& f) {
  Mat acc = f.weights[0];
  for (int j = 1; j < f.depth(); ++j) acc = mat_mul(f.weights[j], acc);
  return acc;
}

}  // namespace

ParamSummary param_summaries(const MinAggGnnParams& params) {
  const auto& cfg = params.config;
  ParamSummary summary;
  for (int ell = 1; ell <= cfg.L; ++ell) {
    const auto& layer = params.layers[ell - 1];
    Mat agg = effective_weight(layer.agg);  // d x (node_width + 1)
    Mat up = effective_weight(layer.up);    // d_ell x (d + node_width)
    int node_width = cfg.d_ell[ell - 1];

    LayerSummary ls;
    for (int j = 0; j < node_width; ++j) {
      for (int i = 0; i < up.rows; ++i) {
        for (int c = 0; c < cfg.d; ++c) {
          ls.node_params.push_back(up.at(i, c) * agg.at(c, j));
        }
      }
    }
    for (int i = 0; i < up.rows; ++i) {
      for (int j = 0; j < node_width; ++j) ls.node_params.push_back(up.at(i, cfg.d + j));
    }
    for (int i = 0; i < up.rows; ++i) {
      for (int c = 0; c < cfg.d; ++c) {
        ls.edge_params.push_back(up.at(i, c) * agg.at(c, node_width));
      }
    }
    for (const Mlp* f : {&layer.agg, &layer.up}) {
      for (const auto& b : f->biases) {
        ls.biases.insert(ls.biases.end(), b.begin(), b.end());
      }
    }
    summary.layers.push_back(std::move(ls));
  }
  return summary;
}

Tape record_mse_objective(const ParamSet& pset, const MinAggGnnParams& params,
                          const DatasetManifest& manifest) {
  const auto& cfg = params.config;
  if (manifest.pairs.empty()) throw ValidationError("manifest has no pairs");
  if (manifest.k_steps != cfg.K)
    throw ConfigMismatchError("manifest K does not match model K");
  if (pset.count() != cfg.L * 4 * cfg.m)
    throw ConfigMismatchError("parameter set does not match architecture");

  // Tensor ids follow bind_params' canonical order.
  auto w_id = [&cfg](int ell, int role, int j) {
    return (ell - 1) * 4 * cfg.m + role * 2 * cfg.m + 2 * j;
  };
  auto b_id = [&cfg](int ell, int role, int j) {
    return (ell - 1) * 4 * cfg.m + role * 2 * cfg.m + 2 * j + 1;
  };

  if (manifest.total_reachable < 1)
    throw ValidationError("manifest has no reachable target nodes");

  Tape tape(&pset);
  double coeff = 1.0 / static_cast<double>(manifest.total_reachable);
  for (const auto& pair : manifest.pairs) {
    const AttributedGraph& g = pair.input;
    auto adj = adjacency(g);
    std::vector<int> h(g.n);
    for (int v = 0; v < g.n; ++v) h[v] = tape.constant({g.features[v]});
    std::vector<std::vector<int>> weight_const(g.n);
    for (int v = 0; v < g.n; ++v) {
      for (const auto& [u, w] : adj[v]) weight_const[v].push_back(tape.constant({w}));
    }

    std::vector<int> next(g.n);
    for (int ell = 1; ell <= cfg.L; ++ell) {
      for (int v = 0; v < g.n; ++v) {
        std::vector<int> candidates;
        candidates.reserve(adj[v].size());
        for (std::size_t i = 0; i < adj[v].size(); ++i) {
          int u = adj[v][i].first;
          int z = tape.concat(h[u], weight_const[v][i]);
          for (int j = 0; j < cfg.m; ++j) {
            z = tape.relu(tape.affine(w_id(ell, 0, j), b_id(ell, 0, j), z));
          }
          candidates.push_back(z);
        }
        int z = tape.concat(tape.min_ewise(candidates), h[v]);
        for (int j = 0; j < cfg.m; ++j) {
          z = tape.relu(tape.affine(w_id(ell, 1, j), b_id(ell, 1, j), z));
        }
        next[v] = z;
      }
      h = next;
    }
    for (int v = 0; v < g.n; ++v) {
      if (pair.target.features[v] == pair.target.beta) continue;
      tape.add_squared_error(h[v], pair.target.features[v], coeff);
    }
  }
  return tape;
}

nlohmann::ordered_json checkpoint_to_json(const MinAggGnnParams& params) {
  nlohmann::ordered_json cfg;
  cfg["L"] = params.config.L;
  cfg["K"] = params.config.K;
  cfg["m"] = params.config.m;
  cfg["d"] = params.config.d;
  cfg["hidden"] = params.config.hidden;
  cfg["d_ell"] = params.config.d_ell;

  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& layer : params.layers) {
    for (const Mlp* f : {&layer.agg, &layer.up}) {
      for (int j = 0; j < f->depth(); ++j) {
        nlohmann::ordered_json lj;
        nlohmann::ordered_json wj = nlohmann::ordered_json::array();
        for (int i = 0; i < f->weights[j].rows; ++i) {
          nlohmann::ordered_json row = nlohmann::ordered_json::array();
          for (int c = 0; c < f->weights[j].cols; ++c) row.push_back(f->weights[j].at(i, c));
          wj.push_back(std::move(row));
        }
        lj["W"] = std::move(wj);
        lj["b"] = f->biases[j];
        layers.push_back(std::move(lj));
      }
    }
  }

  nlohmann::ordered_json out;
  out["config"] = std::move(cfg);
  out["layers"] = std::move(layers);
  return out;
}

MinAggGnnParams checkpoint_from_json(const nlohmann::json& j) {
  MinAggConfig cfg;
  try {
    const auto& cj = j.at("config");
    cfg.L = cj.at("L").get<int>();
    cfg.K = cj.at("K").get<int>();
    cfg.m = cj.at("m").get<int>();
    cfg.d = cj.at("d").get<int>();
    cfg.hidden = cj.at("hidden").get<int>();
    cfg.d_ell = cj.at("d_ell").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed checkpoint config: ") + ex.what());
  }
  MinAggGnnParams params = make_zero_params(cfg);

  const auto& layers = j.at("layers");
  std::size_t idx = 0;
  auto read_mlp = [&](Mlp& f) {
    for (int jj = 0; jj < f.depth(); ++jj) {
      if (idx >= layers.size()) throw ConfigMismatchError("checkpoint has too few layers");
      const auto& lj = layers.at(idx++);
      const auto& wj = lj.at("W");
      if (static_cast<int>(wj.size()) != f.weights[jj].rows)
        throw ConfigMismatchError("checkpoint matrix shape mismatch");
      for (int i = 0; i < f.weights[jj].rows; ++i) {
        if (static_cast<int>(wj.at(i).size()) != f.weights[jj].cols)
          throw ConfigMismatchError("checkpoint matrix shape mismatch");
        for (int c = 0; c < f.weights[jj].cols; ++c)
          f.weights[jj].at(i, c) = wj.at(i).at(c).get<double>();
      }
      auto b = lj.at("b").get<std::vector<double>>();
      if (b.size() != f.biases[jj].size())
        throw ConfigMismatchError("checkpoint bias shape mismatch");
      f.biases[jj] = std::move(b);
    }
  };
  try {
    for (auto& layer : params.layers) {
      read_mlp(layer.agg);
      read_mlp(layer.up);
    }
    if (idx != layers.size()) throw ConfigMismatchError("checkpoint has extra layers");
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed checkpoint layers: ") + ex.what());
  }
  return params;
}

void save_checkpoint(const MinAggGnnParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << checkpoint_to_json(params).dump(2) << '\n';
}

MinAggGnnParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed checkpoint JSON: ") + ex.what());
  }
  return checkpoint_from_json(j);
}

nlohmann::ordered_json summary_to_json(const ParamSummary& s) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& layer : s.layers) {
    nlohmann::ordered_json lj;
    lj["node"] = layer.node_params;
    lj["edge"] = layer.edge_params;
    lj["biases"] = layer.biases;
    j.push_back(std::move(lj));
  }
  return j;
}

}  // namespace bfgnn
