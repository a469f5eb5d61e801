#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bfgnn/dataset.hpp"
#include "bfgnn/model.hpp"

namespace bfgnn {

struct LossConfig;

/// Mean multiplicative error |1 - truth/prediction|, averaged per node within
/// each graph and then over graphs. The model is iterated `reps` times and
/// compared against K*reps relaxation steps of the input. Guards: when the
/// prediction is (numerically) zero, the node contributes 0 if the truth is
/// also zero and 1 otherwise.
double e_test(const MinAggGnnParams& params, const std::vector<AttributedGraph>& suite,
              int K, int reps);

struct Certificate {
  double eta = 0.0;
  double epsilon = 0.0;      // measured loss_reg - eta * (mL + mK + K)
  long long M = 0;           // total reachable target nodes of the manifest
  int param_budget = 0;      // mL + mK + K
  long long nonzero_count = 0;
  double threshold = 0.0;
  double loss_mae_value = 0.0;
  bool hypothesis_ok = false;  // 0 <= eps < eta < 1 / (2 M budget)
  bool structure_ok = false;
  double bound_factor = 0.0;  // M * epsilon
};

/// Measures how far the L0-regularized loss sits above its global minimum
/// and whether the extrapolation-theorem hypothesis window holds. Refuses
/// manifests that do not contain the K-step core training set (the scale
/// grid and the three fixed instances).
Certificate certify(const MinAggGnnParams& params, const DatasetManifest& manifest,
                    const LossConfig& cfg);

struct AuditWorst {
  int graph_index = -1;
  int node = -1;
  double target = 0.0;
  double predicted = 0.0;
  double deviation = 0.0;
};

struct AuditReport {
  double bound_factor = 0.0;       // M * epsilon
  double max_deviation = 0.0;      // max |h/x - 1| over audited nodes with x > 0
  bool pass_m_eps = false;         // within (1 +- M eps)
  bool pass_2m_eps = false;        // within (1 +- 2 M eps)
  bool zero_targets_ok = true;     // nodes with x == 0 carried |h| <= zero_tol
  double max_abs_at_zero = 0.0;
  AuditWorst worst;
  std::vector<double> per_graph_max;  // per audited graph, max deviation
};

/// Checks every reachable-target node of every suite graph against the
/// multiplicative envelope around bf_k ground truth. Nodes whose true value
/// is zero are checked absolutely against zero_tol. Refuses when the
/// certificate hypothesis does not hold.
AuditReport audit_extrapolation(const MinAggGnnParams& params, const Certificate& cert,
                                const std::vector<AttributedGraph>& suite, int K,
                                double zero_tol = 1e-9);

struct SimpleTheoremReport {
  double epsilon = 0.0;
  double max_hsmall_error = 0.0;
  bool hypothesis_ok = false;   // max error < epsilon / 20 on the toy set
  double w2w_gap_l1 = 0.0;      // |w2 W11 - 1| + |w2 W12 - 1|
  double affine_offset = 0.0;   // |w2 b1 + b2|
  bool w2w_gap_ok = false;      // < epsilon
  bool affine_offset_ok = false;  // < 20 epsilon
  bool conclusion_checked = false;
  bool conclusion_ok = false;   // (1 +- eps) x +- eps envelope on the suite
  double max_conclusion_slack = 0.0;
  AuditWorst worst;
};

/// Verifies the single-layer theorem: hypothesis on the eight-pair toy set,
/// the parameter facts it implies, and (when the hypothesis holds) the
/// additive-multiplicative envelope against one relaxation step on the suite.
SimpleTheoremReport check_simple_theorem(const SimpleGnnParams& p, double epsilon,
                                         const std::vector<AttributedGraph>& suite);

nlohmann::ordered_json certificate_to_json(const Certificate& c);
nlohmann::ordered_json audit_to_json(const AuditReport& r);
std::string render_verdict(const Certificate& c, const AuditReport* audit);

}  // namespace bfgnn
