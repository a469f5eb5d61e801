#include "bfgnn/certificate.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bfgnn/training.hpp"

namespace bfgnn {

namespace {
constexpr double kZeroGuard = 1e-9;
}

double e_test(const MinAggGnnParams& params, const std::vector<AttributedGraph>& suite,
              int K, int reps) {
  if (suite.empty()) throw ValidationError("test suite is empty");
  if (K < 1 || reps < 1) throw ValidationError("K and reps must be positive");
  double total = 0.0;
  for (const auto& g : suite) {
    AttributedGraph truth = bf_k(g, K * reps);
    AttributedGraph pred = iterate_model(params, g, reps);
    double graph_sum = 0.0;
    for (int v = 0; v < g.n; ++v) {
      double x = truth.features[v];
      double h = pred.features[v];
      if (std::fabs(h) < kZeroGuard) {
        graph_sum += std::fabs(x) < kZeroGuard ? 0.0 : 1.0;
      } else {
        graph_sum += std::fabs(1.0 - x / h);
      }
    }
    total += graph_sum / static_cast<double>(g.n);
  }
  return total / static_cast<double>(suite.size());
}

namespace {

bool graphs_equal(const AttributedGraph& a, const AttributedGraph& b) {
  if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    if (a.edges[i].u != b.edges[i].u || a.edges[i].v != b.edges[i].v ||
        a.edges[i].w != b.edges[i].w)
      return false;
  }
  for (int v = 0; v < a.n; ++v) {
    if (a.features[v] != b.features[v]) return false;
  }
  return true;
}

bool manifest_contains(const DatasetManifest& manifest, const AttributedGraph& g) {
  for (const auto& pair : manifest.pairs) {
    if (graphs_equal(pair.input, g)) return true;
  }
  return false;
}

}  // namespace

Certificate certify(const MinAggGnnParams& params, const DatasetManifest& manifest,
                    const LossConfig& cfg) {
  const int K = params.config.K;
  if (manifest.k_steps != K) throw ConfigMismatchError("manifest K does not match model K");

  std::vector<std::string> missing;
  std::set<int> k_range;
  for (int k = 1; k <= K; ++k) k_range.insert(k);
  for (const auto& g : gen_scale_set(K, k_range)) {
    if (!manifest_contains(manifest, g)) {
      missing.push_back("scale-grid path");
      break;
    }
  }
  if (!manifest_contains(manifest, gen_path(0, {1.0})))
    missing.push_back("unit one-edge path at step 0");
  if (!manifest_contains(manifest, gen_path(1, {1.0, 0.0})))
    missing.push_back("unit two-edge path at step 1");
  if (!manifest_contains(manifest, gen_gadget_h(K)))
    missing.push_back("ladder gadget");
  if (!missing.empty()) {
    std::string msg = "manifest is missing required training graphs:";
    for (const auto& s : missing) msg += " [" + s + "]";
    throw RefusalError(msg);
  }

  Certificate cert;
  cert.eta = cfg.eta;
  cert.M = manifest.total_reachable;
  cert.param_budget = params.config.param_budget();
  cert.threshold = cfg.nonzero_threshold;
  cert.nonzero_count = count_nonzero(params, cfg.nonzero_threshold);
  cert.loss_mae_value = loss_mae(params, manifest);
  double reg = cert.loss_mae_value + cfg.eta * static_cast<double>(cert.nonzero_count);
  cert.epsilon = reg - cfg.eta * static_cast<double>(cert.param_budget);
  double eta_ceiling =
      1.0 / (2.0 * static_cast<double>(cert.M) * static_cast<double>(cert.param_budget));
  cert.hypothesis_ok =
      cert.epsilon >= 0.0 && cert.epsilon < cert.eta && cert.eta < eta_ceiling;
  cert.structure_ok = check_sparsity_structure(params, cfg.nonzero_threshold).pattern_ok;
  cert.bound_factor = static_cast<double>(cert.M) * cert.epsilon;
  return cert;
}

AuditReport audit_extrapolation(const MinAggGnnParams& params, const Certificate& cert,
                                const std::vector<AttributedGraph>& suite, int K,
                                double zero_tol) {
  if (!cert.hypothesis_ok)
    throw RefusalError("certificate hypothesis does not hold; the envelope is not guaranteed");
  if (suite.empty()) throw ValidationError("audit suite is empty");

  AuditReport report;
  report.bound_factor = cert.bound_factor;
  for (std::size_t gi = 0; gi < suite.size(); ++gi) {
    const auto& g = suite[gi];
    AttributedGraph truth = bf_k(g, K);
    AttributedGraph pred = forward(params, g);
    double graph_max = 0.0;
    for (int v = 0; v < g.n; ++v) {
      double x = truth.features[v];
      if (x == truth.beta) continue;  // unreachable targets carry the arbitrary sentinel
      double h = pred.features[v];
      if (std::fabs(x) < kZeroGuard) {
        double a = std::fabs(h);
        if (a > report.max_abs_at_zero) report.max_abs_at_zero = a;
        if (a > zero_tol) report.zero_targets_ok = false;
        continue;
      }
      double dev = std::fabs(h / x - 1.0);
      if (dev > graph_max) graph_max = dev;
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        report.worst = {static_cast<int>(gi), v, x, h, dev};
      }
    }
    report.per_graph_max.push_back(graph_max);
  }
  report.pass_m_eps =
      report.max_deviation <= report.bound_factor + 1e-15 && report.zero_targets_ok;
  report.pass_2m_eps =
      report.max_deviation <= 2.0 * report.bound_factor + 1e-15 && report.zero_targets_ok;
  return report;
}

SimpleTheoremReport check_simple_theorem(const SimpleGnnParams& p, double epsilon,
                                         const std::vector<AttributedGraph>& suite) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must be in (0, 1)");

  SimpleTheoremReport report;
  report.epsilon = epsilon;

  DatasetManifest toy = gen_h_small();
  for (const auto& pair : toy.pairs) {
    AttributedGraph out = simple_forward(p, pair.input);
    for (int v = 0; v < pair.target.n; ++v) {
      double err = std::fabs(out.features[v] - pair.target.features[v]);
      if (err > report.max_hsmall_error) report.max_hsmall_error = err;
    }
  }
  report.hypothesis_ok = report.max_hsmall_error < epsilon / 20.0;

  report.w2w_gap_l1 = std::fabs(p.w2 * p.W11 - 1.0) + std::fabs(p.w2 * p.W12 - 1.0);
  report.affine_offset = std::fabs(p.w2 * p.b1 + p.b2);
  report.w2w_gap_ok = report.w2w_gap_l1 < epsilon;
  report.affine_offset_ok = report.affine_offset < 20.0 * epsilon;

  if (!report.hypothesis_ok || suite.empty()) return report;

  report.conclusion_checked = true;
  report.conclusion_ok = true;
  for (std::size_t gi = 0; gi < suite.size(); ++gi) {
    const auto& g = suite[gi];
    AttributedGraph truth = bf_step(g);
    AttributedGraph pred = simple_forward(p, g);
    for (int v = 0; v < g.n; ++v) {
      double x = truth.features[v];
      double h = pred.features[v];
      double lo = (1.0 - epsilon) * x - epsilon;
      double hi = (1.0 + epsilon) * x + epsilon;
      double slack = std::max(lo - h, h - hi);
      if (slack > report.max_conclusion_slack) {
        report.max_conclusion_slack = slack;
        report.worst = {static_cast<int>(gi), v, x, h, slack};
      }
      if (slack > 0.0) report.conclusion_ok = false;
    }
  }
  return report;
}

nlohmann::ordered_json certificate_to_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["eta"] = c.eta;
  j["epsilon"] = c.epsilon;
  j["M"] = c.M;
  j["param_budget"] = c.param_budget;
  j["nonzero_count"] = c.nonzero_count;
  j["threshold"] = c.threshold;
  j["loss_mae"] = c.loss_mae_value;
  j["hypothesis_ok"] = c.hypothesis_ok;
  j["structure_ok"] = c.structure_ok;
  j["bound_factor"] = c.bound_factor;
  return j;
}

nlohmann::ordered_json audit_to_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["bound_factor"] = r.bound_factor;
  j["max_deviation"] = r.max_deviation;
  j["pass_m_eps"] = r.pass_m_eps;
  j["pass_2m_eps"] = r.pass_2m_eps;
  j["zero_targets_ok"] = r.zero_targets_ok;
  j["max_abs_at_zero"] = r.max_abs_at_zero;
  nlohmann::ordered_json w;
  w["graph"] = r.worst.graph_index;
  w["node"] = r.worst.node;
  w["target"] = r.worst.target;
  w["predicted"] = r.worst.predicted;
  w["deviation"] = r.worst.deviation;
  j["worst"] = std::move(w);
  j["per_graph_max"] = r.per_graph_max;
  return j;
}

std::string render_verdict(const Certificate& c, const AuditReport* audit) {
  std::ostringstream os;
  os << "certificate\n";
  os << "  eta            " << c.eta << "\n";
  os << "  epsilon        " << c.epsilon << "\n";
  os << "  M              " << c.M << "\n";
  os << "  budget         " << c.param_budget << "\n";
  os << "  nonzeros       " << c.nonzero_count << " (threshold " << c.threshold << ")\n";
  os << "  mae            " << c.loss_mae_value << "\n";
  os << "  hypothesis     " << (c.hypothesis_ok ? "ok" : "NOT satisfied") << "\n";
  os << "  structure      " << (c.structure_ok ? "ok" : "NOT satisfied") << "\n";
  os << "  bound factor   " << c.bound_factor << " (envelope 1 +- M*eps)\n";
  if (audit) {
    os << "audit\n";
    os << "  max deviation  " << audit->max_deviation << "\n";
    os << "  within M*eps   " << (audit->pass_m_eps ? "yes" : "no") << "\n";
    os << "  within 2M*eps  " << (audit->pass_2m_eps ? "yes" : "no") << "\n";
    os << "  zero targets   " << (audit->zero_targets_ok ? "ok" : "violated") << " (max |h| "
       << audit->max_abs_at_zero << ")\n";
    if (audit->worst.node >= 0) {
      os << "  worst offender graph " << audit->worst.graph_index << " node "
         << audit->worst.node << ": predicted " << audit->worst.predicted << " target "
         << audit->worst.target << "\n";
    }
  }
  return os.str();
}

}  // namespace bfgnn
