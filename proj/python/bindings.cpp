#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "bfgnn/certificate.hpp"
#include "bfgnn/dataset.hpp"
#include "bfgnn/model.hpp"
#include "bfgnn/training.hpp"

namespace py = pybind11;
using namespace bfgnn;

namespace {

std::string manifest_json(const DatasetManifest& m) { return manifest_to_json(m).dump(); }

DatasetManifest manifest_from_text(const std::string& text) {
  return manifest_from_json(nlohmann::json::parse(text));
}

std::string checkpoint_json(const MinAggGnnParams& p) { return checkpoint_to_json(p).dump(); }

MinAggGnnParams checkpoint_from_text(const std::string& text) {
  return checkpoint_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_bfgnn, m) {
  m.doc() = "min-aggregation GNNs that provably run Bellman-Ford relaxation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RefusalError>(m, "RefusalError", PyExc_RuntimeError);

  py::class_<Edge>(m, "Edge")
      .def(py::init<>())
      .def(py::init([](int u, int v, double w) { return Edge{u, v, w}; }))
      .def_readwrite("u", &Edge::u)
      .def_readwrite("v", &Edge::v)
      .def_readwrite("w", &Edge::w);

  py::class_<AttributedGraph>(m, "AttributedGraph")
      .def(py::init<>())
      .def_readwrite("n", &AttributedGraph::n)
      .def_readwrite("beta", &AttributedGraph::beta)
      .def_readwrite("step_tag", &AttributedGraph::step_tag)
      .def_readwrite("features", &AttributedGraph::features)
      .def_readwrite("edges", &AttributedGraph::edges)
      .def("to_json", &graph_to_string)
      .def_static("from_json", &graph_from_string);

  m.def("validate", &validate);
  m.def("normalize_edges", &normalize_edges);
  m.def("bf_step", &bf_step);
  m.def("bf_k", &bf_k);
  m.def("reachable_nodes", &reachable_nodes);
  m.def("brute_force_khop", &brute_force_khop);

  py::class_<LabeledPair>(m, "LabeledPair")
      .def_readonly("input", &LabeledPair::input)
      .def_readonly("target", &LabeledPair::target)
      .def_readonly("k_steps", &LabeledPair::k_steps);

  py::class_<DatasetManifest>(m, "DatasetManifest")
      .def_readonly("name", &DatasetManifest::name)
      .def_readonly("k_steps", &DatasetManifest::k_steps)
      .def_readonly("total_reachable", &DatasetManifest::total_reachable)
      .def_readonly("pairs", &DatasetManifest::pairs)
      .def("to_json", &manifest_json)
      .def_static("from_json", &manifest_from_text);

  m.def("gen_path", &gen_path);
  m.def("gen_h_small", &gen_h_small);
  m.def("gen_scale_set", &gen_scale_set);
  m.def("gen_gadget_h", &gen_gadget_h);
  m.def("gen_gk", py::overload_cast<int>(&gen_gk));
  m.def("gen_experiment_train", &gen_experiment_train);
  m.def("gen_test_suite", &gen_test_suite);
  m.def("gen_er_sparse", &gen_er_sparse);

  py::class_<MinAggConfig>(m, "MinAggConfig")
      .def(py::init<>())
      .def_readwrite("L", &MinAggConfig::L)
      .def_readwrite("K", &MinAggConfig::K)
      .def_readwrite("m", &MinAggConfig::m)
      .def_readwrite("d", &MinAggConfig::d)
      .def_readwrite("hidden", &MinAggConfig::hidden)
      .def_readwrite("d_ell", &MinAggConfig::d_ell)
      .def("param_budget", &MinAggConfig::param_budget)
      .def_static("preset", &MinAggConfig::preset)
      .def_static("preset_names", &MinAggConfig::preset_names);

  py::class_<MinAggGnnParams>(m, "MinAggGnnParams")
      .def_readonly("config", &MinAggGnnParams::config)
      .def("to_json", &checkpoint_json)
      .def_static("from_json", &checkpoint_from_text);

  py::class_<SimpleGnnParams>(m, "SimpleGnnParams")
      .def(py::init<>())
      .def(py::init([](double w11, double w12, double b1, double w2, double b2) {
        return SimpleGnnParams{w11, w12, b1, w2, b2};
      }))
      .def_readwrite("W11", &SimpleGnnParams::W11)
      .def_readwrite("W12", &SimpleGnnParams::W12)
      .def_readwrite("b1", &SimpleGnnParams::b1)
      .def_readwrite("w2", &SimpleGnnParams::w2)
      .def_readwrite("b2", &SimpleGnnParams::b2);

  m.def("make_zero_params", &make_zero_params);
  m.def("init_params", &init_params);
  m.def("build_exact_bf", &build_exact_bf);
  m.def("forward", &forward);
  m.def("iterate_model", &iterate_model);
  m.def("simple_forward", &simple_forward);
  m.def("embed_simple", &embed_simple);
  m.def("count_nonzero", &count_nonzero);
  m.def("prune_params", &prune_params);
  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint);

  py::class_<StructureReport>(m, "StructureReport")
      .def_readonly("pattern_ok", &StructureReport::pattern_ok)
      .def_readonly("counts_ok", &StructureReport::counts_ok)
      .def_readonly("biases_ok", &StructureReport::biases_ok)
      .def_readonly("chains_ok", &StructureReport::chains_ok)
      .def_readonly("all_positive", &StructureReport::all_positive)
      .def_readonly("nonzero_count", &StructureReport::nonzero_count)
      .def_readonly("message_passing_layers", &StructureReport::message_passing_layers)
      .def_readonly("violations", &StructureReport::violations)
      .def("__str__", &StructureReport::to_string);
  m.def("check_sparsity_structure", &check_sparsity_structure);

  py::class_<CollapsedUpdate>(m, "CollapsedUpdate")
      .def_readonly("mu", &CollapsedUpdate::mu)
      .def_readonly("nu", &CollapsedUpdate::nu);
  m.def("collapse_params", &collapse_params);

  py::class_<LayerSummary>(m, "LayerSummary")
      .def_readonly("node_params", &LayerSummary::node_params)
      .def_readonly("edge_params", &LayerSummary::edge_params)
      .def_readonly("biases", &LayerSummary::biases);
  py::class_<ParamSummary>(m, "ParamSummary")
      .def_readonly("layers", &ParamSummary::layers);
  m.def("param_summaries", &param_summaries);

  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def(py::init([](double eta, double lambda_l1, double threshold) {
        return LossConfig{eta, lambda_l1, threshold};
      }))
      .def_readwrite("eta", &LossConfig::eta)
      .def_readwrite("lambda_l1", &LossConfig::lambda_l1)
      .def_readwrite("nonzero_threshold", &LossConfig::nonzero_threshold);

  m.def("default_eta", &default_eta);
  m.def("loss_mae", &loss_mae);
  m.def("loss_mse", &loss_mse);
  m.def("loss_reg", &loss_reg);
  m.def("loss_mse_l1", &loss_mse_l1);
  m.def("l1_norm", &l1_norm);
  m.def("smooth_trace", &smooth_trace);

  py::class_<AdamWSettings>(m, "AdamWSettings")
      .def(py::init<>())
      .def_readwrite("lr", &AdamWSettings::lr)
      .def_readwrite("beta1", &AdamWSettings::beta1)
      .def_readwrite("beta2", &AdamWSettings::beta2)
      .def_readwrite("eps", &AdamWSettings::eps)
      .def_readwrite("weight_decay", &AdamWSettings::weight_decay);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("step", &TraceRow::step)
      .def_readonly("loss_mse", &TraceRow::loss_mse)
      .def_readonly("loss_mse_l1", &TraceRow::loss_mse_l1)
      .def_readonly("loss_reg", &TraceRow::loss_reg)
      .def_readonly("e_test", &TraceRow::e_test)
      .def_readonly("summary", &TraceRow::summary);
  py::class_<TrainTrace>(m, "TrainTrace").def_readonly("rows", &TrainTrace::rows);
  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("steps", &TrainOptions::steps)
      .def_readwrite("seed", &TrainOptions::seed)
      .def_readwrite("eval_stride", &TrainOptions::eval_stride);
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("trace", &TrainResult::trace);
  m.def("train", &train, py::arg("init"), py::arg("manifest"), py::arg("cfg"),
        py::arg("opt") = AdamWSettings{}, py::arg("options") = TrainOptions{},
        py::arg("eval_suite") = std::vector<AttributedGraph>{});
  m.def("save_trace_csv", &save_trace_csv);

  m.def("e_test", &e_test);
  py::class_<Certificate>(m, "Certificate")
      .def_readonly("eta", &Certificate::eta)
      .def_readonly("epsilon", &Certificate::epsilon)
      .def_readonly("M", &Certificate::M)
      .def_readonly("param_budget", &Certificate::param_budget)
      .def_readonly("nonzero_count", &Certificate::nonzero_count)
      .def_readonly("threshold", &Certificate::threshold)
      .def_readonly("loss_mae", &Certificate::loss_mae_value)
      .def_readonly("hypothesis_ok", &Certificate::hypothesis_ok)
      .def_readonly("structure_ok", &Certificate::structure_ok)
      .def_readonly("bound_factor", &Certificate::bound_factor);
  m.def("certify", &certify);

  py::class_<AuditWorst>(m, "AuditWorst")
      .def_readonly("graph_index", &AuditWorst::graph_index)
      .def_readonly("node", &AuditWorst::node)
      .def_readonly("target", &AuditWorst::target)
      .def_readonly("predicted", &AuditWorst::predicted)
      .def_readonly("deviation", &AuditWorst::deviation);
  py::class_<AuditReport>(m, "AuditReport")
      .def_readonly("bound_factor", &AuditReport::bound_factor)
      .def_readonly("max_deviation", &AuditReport::max_deviation)
      .def_readonly("pass_m_eps", &AuditReport::pass_m_eps)
      .def_readonly("pass_2m_eps", &AuditReport::pass_2m_eps)
      .def_readonly("zero_targets_ok", &AuditReport::zero_targets_ok)
      .def_readonly("max_abs_at_zero", &AuditReport::max_abs_at_zero)
      .def_readonly("worst", &AuditReport::worst)
      .def_readonly("per_graph_max", &AuditReport::per_graph_max);
  m.def("audit_extrapolation", &audit_extrapolation, py::arg("params"), py::arg("cert"),
        py::arg("suite"), py::arg("K"), py::arg("zero_tol") = 1e-9);

  py::class_<SimpleTheoremReport>(m, "SimpleTheoremReport")
      .def_readonly("epsilon", &SimpleTheoremReport::epsilon)
      .def_readonly("max_hsmall_error", &SimpleTheoremReport::max_hsmall_error)
      .def_readonly("hypothesis_ok", &SimpleTheoremReport::hypothesis_ok)
      .def_readonly("w2w_gap_l1", &SimpleTheoremReport::w2w_gap_l1)
      .def_readonly("affine_offset", &SimpleTheoremReport::affine_offset)
      .def_readonly("w2w_gap_ok", &SimpleTheoremReport::w2w_gap_ok)
      .def_readonly("affine_offset_ok", &SimpleTheoremReport::affine_offset_ok)
      .def_readonly("conclusion_checked", &SimpleTheoremReport::conclusion_checked)
      .def_readonly("conclusion_ok", &SimpleTheoremReport::conclusion_ok)
      .def_readonly("max_conclusion_slack", &SimpleTheoremReport::max_conclusion_slack);
  m.def("check_simple_theorem", &check_simple_theorem);
}
