#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bfgnn/certificate.hpp"
#include "bfgnn/dataset.hpp"
#include "bfgnn/model.hpp"
#include "bfgnn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// exit codes: 0 ok, 2 usage, 3 unreadable/unwritable file, 4 config or
// architecture mismatch, 5 invalid input, 6 refused operation, 7 numeric
// failure
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bfgnn::IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& ex) {
    throw bfgnn::ValidationError("malformed JSON in " + path + ": " + ex.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw bfgnn::IoError("cannot open for writing: " + path.string());
  out << text;
}

fs::path resolve_out_dir(const std::string& out_flag, const std::string& command) {
  fs::path dir;
  if (!out_flag.empty()) {
    dir = out_flag;
  } else {
    const char* root = std::getenv("BFGNN_OUT_ROOT");
    dir = fs::path(root ? root : "runs") / command;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw bfgnn::IoError("cannot create output directory: " + dir.string());
  return dir;
}

void write_config(const fs::path& dir, const ordered_json& cfg) {
  write_text(dir / "config.json", cfg.dump(2) + "\n");
}

struct ArchFlags {
  std::string preset = "deep-2layer";
  int L = 0, K = 0, m = 0, d = 0, hidden = 0;
  std::string d_ell;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "architecture preset")->default_val(preset);
    cmd->add_option("--L", L, "layer count (overrides the preset)");
    cmd->add_option("--K", K, "relaxation steps to learn");
    cmd->add_option("--m", m, "MLP depth");
    cmd->add_option("--d", d, "aggregation output width");
    cmd->add_option("--hidden", hidden, "MLP hidden width");
    cmd->add_option("--d-ell", d_ell, "comma-separated feature widths (L+1 entries)");
  }

  bool custom() const { return L > 0 || K > 0 || m > 0; }

  bfgnn::MinAggConfig resolve() const {
    bfgnn::MinAggConfig cfg;
    if (custom()) {
      cfg.L = L > 0 ? L : 1;
      cfg.K = K > 0 ? K : 1;
      cfg.m = m > 0 ? m : 1;
      cfg.d = d > 0 ? d : 8;
      cfg.hidden = hidden > 0 ? hidden : 16;
      if (!d_ell.empty()) {
        std::stringstream ss(d_ell);
        std::string cell;
        while (std::getline(ss, cell, ',')) cfg.d_ell.push_back(std::stoi(cell));
      } else {
        cfg.d_ell.assign(cfg.L + 1, cfg.d);
        cfg.d_ell.front() = 1;
        cfg.d_ell.back() = 1;
      }
    } else {
      cfg = bfgnn::MinAggConfig::preset(preset);
      if (d > 0) cfg.d = d;
      if (hidden > 0) cfg.hidden = hidden;
    }
    cfg.check();
    return cfg;
  }

  ordered_json to_json() const {
    auto cfg = resolve();
    ordered_json j;
    j["preset"] = custom() ? "custom" : preset;
    j["L"] = cfg.L;
    j["K"] = cfg.K;
    j["m"] = cfg.m;
    j["d"] = cfg.d;
    j["hidden"] = cfg.hidden;
    j["d_ell"] = cfg.d_ell;
    return j;
  }
};

std::vector<bfgnn::AttributedGraph> audit_default_suite(std::uint64_t seed) {
  // the mixed 200-graph suite plus 100 sparse random graphs across three sizes
  auto suite = bfgnn::gen_test_suite(seed);
  int counts[3] = {34, 33, 33};
  int sizes[3] = {100, 500, 1000};
  std::uint64_t s = seed;
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < counts[i]; ++c) {
      suite.push_back(bfgnn::gen_er_sparse(sizes[i], ++s));
    }
  }
  return suite;
}

int run_gen_train(const std::string& set, int K, std::uint64_t seed,
                  const std::string& k_range_flag, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "gen-train");
  bfgnn::DatasetManifest manifest;
  if (set == "hsmall") {
    manifest = bfgnn::gen_h_small();
  } else if (set == "gk") {
    if (k_range_flag.empty()) {
      manifest = bfgnn::gen_gk(K);
    } else {
      std::set<int> k_range;
      std::stringstream ss(k_range_flag);
      std::string cell;
      while (std::getline(ss, cell, ',')) k_range.insert(std::stoi(cell));
      manifest = bfgnn::gen_gk(K, k_range);
    }
  } else if (set == "experiment") {
    manifest = bfgnn::gen_experiment_train(K, seed);
  } else {
    throw bfgnn::ValidationError("unknown training set: " + set);
  }
  ordered_json cfg;
  cfg["command"] = "gen-train";
  cfg["set"] = set;
  cfg["K"] = K;
  cfg["seed"] = seed;
  cfg["k_range"] = k_range_flag;
  write_config(dir, cfg);
  write_text(dir / "manifest.json", bfgnn::manifest_to_json(manifest).dump(2) + "\n");
  std::cout << "wrote " << (dir / "manifest.json").string() << " with "
            << manifest.pairs.size() << " pairs (M=" << manifest.total_reachable << ")\n";
  return 0;
}

int run_gen_test(const std::string& kind, int n, int count, std::uint64_t seed,
                 const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "gen-test");
  std::vector<bfgnn::AttributedGraph> suite;
  if (kind == "mixed") {
    suite = bfgnn::gen_test_suite(seed);
  } else if (kind == "er") {
    for (int i = 0; i < count; ++i) suite.push_back(bfgnn::gen_er_sparse(n, seed + i));
  } else {
    throw bfgnn::ValidationError("unknown suite kind: " + kind);
  }
  ordered_json cfg;
  cfg["command"] = "gen-test";
  cfg["suite"] = kind;
  cfg["n"] = n;
  cfg["count"] = count;
  cfg["seed"] = seed;
  write_config(dir, cfg);
  write_text(dir / "suite.json", bfgnn::suite_to_json(suite).dump(2) + "\n");
  std::cout << "wrote " << (dir / "suite.json").string() << " with " << suite.size()
            << " graphs\n";
  return 0;
}

int run_train(const std::string& manifest_path, const ArchFlags& arch, double lambda,
              double eta, double threshold, long long steps, std::uint64_t seed, double lr,
              const std::string& eval_suite_path, std::uint64_t eval_seed,
              long long eval_stride, long long checkpoint_every, double prune_threshold,
              const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "train");
  auto manifest = bfgnn::manifest_from_json(parse_json_file(manifest_path));
  auto cfg = arch.resolve();

  std::vector<bfgnn::AttributedGraph> eval_suite;
  if (eval_suite_path == "auto") {
    eval_suite = bfgnn::gen_test_suite(eval_seed);
  } else if (eval_suite_path != "none") {
    eval_suite = bfgnn::suite_from_json(parse_json_file(eval_suite_path));
  }

  bfgnn::LossConfig loss_cfg;
  loss_cfg.lambda_l1 = lambda;
  loss_cfg.eta = eta > 0.0 ? eta : bfgnn::default_eta(manifest, cfg);
  loss_cfg.nonzero_threshold = threshold;

  bfgnn::AdamWSettings opt;
  opt.lr = lr;

  bfgnn::TrainOptions options;
  options.steps = steps;
  options.seed = seed;
  options.eval_stride = eval_stride;

  ordered_json rc;
  rc["command"] = "train";
  rc["manifest"] = manifest_path;
  rc["arch"] = arch.to_json();
  rc["lambda_l1"] = lambda;
  rc["eta"] = loss_cfg.eta;
  rc["nonzero_threshold"] = threshold;
  rc["steps"] = steps;
  rc["seed"] = seed;
  rc["lr"] = lr;
  rc["eval_suite"] = eval_suite_path;
  rc["eval_seed"] = eval_seed;
  rc["eval_stride"] = eval_stride;
  rc["checkpoint_every"] = checkpoint_every;
  rc["prune_threshold"] = prune_threshold;
  write_config(dir, rc);

  auto init = bfgnn::init_params(cfg, seed);
  if (checkpoint_every > 0) {
    // periodic checkpointing trains in segments of the requested length
    bfgnn::MinAggGnnParams params = init;
    bfgnn::TrainTrace trace;
    long long done = 0;
    while (done < steps) {
      bfgnn::TrainOptions slice = options;
      slice.steps = std::min(checkpoint_every, steps - done);
      auto part = bfgnn::train(params, manifest, loss_cfg, opt, slice, eval_suite);
      params = std::move(part.params);
      for (auto& row : part.trace.rows) {
        row.step += done;
        trace.rows.push_back(std::move(row));
      }
      done += slice.steps;
      bfgnn::save_checkpoint(
          params, (dir / ("checkpoint_" + std::to_string(done) + ".json")).string());
    }
    bfgnn::save_trace_csv(trace, cfg, (dir / "trace.csv").string());
    bfgnn::save_checkpoint(params, (dir / "checkpoint.json").string());
    std::cout << "trained " << steps << " steps; final loss_mse "
              << (trace.rows.empty() ? 0.0 : trace.rows.back().loss_mse) << "\n";
    return 0;
  }

  auto result = bfgnn::train(init, manifest, loss_cfg, opt, options, eval_suite);
  bfgnn::save_trace_csv(result.trace, cfg, (dir / "trace.csv").string());
  bfgnn::save_checkpoint(result.params, (dir / "checkpoint.json").string());
  if (prune_threshold > 0.0) {
    auto snapped = bfgnn::prune_params(result.params, prune_threshold);
    bfgnn::save_checkpoint(snapped, (dir / "checkpoint_pruned.json").string());
  }
  if (!result.trace.rows.empty()) {
    const auto& last = result.trace.rows.back();
    std::cout << "trained " << steps << " steps; loss_mse " << last.loss_mse
              << ", loss_reg " << last.loss_reg << ", e_test " << last.e_test << "\n";
  }
  return 0;
}

int run_prune(const std::string& checkpoint_path, double threshold,
              const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "prune");
  auto params = bfgnn::load_checkpoint(checkpoint_path);
  auto snapped = bfgnn::prune_params(params, threshold);

  ordered_json rc;
  rc["command"] = "prune";
  rc["checkpoint"] = checkpoint_path;
  rc["threshold"] = threshold;
  write_config(dir, rc);
  bfgnn::save_checkpoint(snapped, (dir / "checkpoint.json").string());

  auto report = bfgnn::check_sparsity_structure(snapped, 0.0);
  std::cout << "kept " << bfgnn::count_nonzero(snapped, 0.0) << " of "
            << bfgnn::count_nonzero(params, 0.0) << " nonzeros; " << report.to_string()
            << "\n";
  return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& suite_path, int er_n,
             int er_count, std::uint64_t seed, int reps, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "eval");
  auto params = bfgnn::load_checkpoint(checkpoint_path);

  std::vector<bfgnn::AttributedGraph> suite;
  std::string suite_desc;
  if (!suite_path.empty()) {
    suite = bfgnn::suite_from_json(parse_json_file(suite_path));
    suite_desc = suite_path;
  } else {
    for (int i = 0; i < er_count; ++i) suite.push_back(bfgnn::gen_er_sparse(er_n, seed + i));
    suite_desc = "er(n=" + std::to_string(er_n) + ", count=" + std::to_string(er_count) + ")";
  }

  double err = bfgnn::e_test(params, suite, params.config.K, reps);

  ordered_json rc;
  rc["command"] = "eval";
  rc["checkpoint"] = checkpoint_path;
  rc["suite"] = suite_desc;
  rc["er_n"] = er_n;
  rc["er_count"] = er_count;
  rc["seed"] = seed;
  rc["reps"] = reps;
  write_config(dir, rc);

  ordered_json result;
  result["e_test"] = err;
  result["reps"] = reps;
  result["K"] = params.config.K;
  result["suite_size"] = suite.size();
  write_text(dir / "eval.json", result.dump(2) + "\n");
  std::cout << "e_test " << err << " (reps " << reps << ", " << suite.size() << " graphs)\n";
  return 0;
}

int run_certify(const std::string& checkpoint_path, const std::string& manifest_path,
                double eta, double threshold, const std::string& audit_suite_path,
                std::uint64_t audit_seed, double zero_tol, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "certify");
  auto params = bfgnn::load_checkpoint(checkpoint_path);
  auto manifest = bfgnn::manifest_from_json(parse_json_file(manifest_path));

  bfgnn::LossConfig cfg;
  cfg.eta = eta > 0.0 ? eta : bfgnn::default_eta(manifest, params.config);
  cfg.nonzero_threshold = threshold;

  ordered_json rc;
  rc["command"] = "certify";
  rc["checkpoint"] = checkpoint_path;
  rc["manifest"] = manifest_path;
  rc["eta"] = cfg.eta;
  rc["nonzero_threshold"] = threshold;
  rc["audit_suite"] = audit_suite_path;
  rc["audit_seed"] = audit_seed;
  rc["zero_tol"] = zero_tol;
  write_config(dir, rc);

  auto cert = bfgnn::certify(params, manifest, cfg);
  write_text(dir / "certificate.json", bfgnn::certificate_to_json(cert).dump(2) + "\n");

  if (!cert.hypothesis_ok) {
    std::cout << bfgnn::render_verdict(cert, nullptr);
    std::cout << "hypothesis not satisfied; audit skipped\n";
    return 0;
  }

  std::vector<bfgnn::AttributedGraph> suite;
  if (audit_suite_path.empty()) {
    suite = audit_default_suite(audit_seed);
  } else {
    suite = bfgnn::suite_from_json(parse_json_file(audit_suite_path));
  }
  auto audit = bfgnn::audit_extrapolation(params, cert, suite, params.config.K, zero_tol);
  write_text(dir / "audit.json", bfgnn::audit_to_json(audit).dump(2) + "\n");
  std::cout << bfgnn::render_verdict(cert, &audit);
  return 0;
}

int run_exact_bf(const ArchFlags& arch, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "exact-bf");
  auto cfg = arch.resolve();
  auto params = bfgnn::build_exact_bf(cfg);

  ordered_json rc;
  rc["command"] = "exact-bf";
  rc["arch"] = arch.to_json();
  write_config(dir, rc);
  bfgnn::save_checkpoint(params, (dir / "checkpoint.json").string());
  std::cout << "wrote exact construction with " << bfgnn::count_nonzero(params, 0.0)
            << " nonzero parameters (budget " << cfg.param_budget() << ")\n";
  return 0;
}

int run_export(const std::string& trace_path, double sigma, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "export");
  ordered_json rc;
  rc["command"] = "export";
  rc["trace"] = trace_path;
  rc["sigma"] = sigma;
  write_config(dir, rc);

  std::ifstream in(trace_path);
  if (!in) throw bfgnn::IoError("cannot open: " + trace_path);
  std::ofstream out(dir / "smoothed.csv");
  if (!out) throw bfgnn::IoError("cannot open for writing: " + (dir / "smoothed.csv").string());
  bfgnn::smooth_csv(in, out, sigma);
  std::cout << "wrote " << (dir / "smoothed.csv").string() << "\n";
  return 0;
}

int run_oracle(const std::string& graph_path, int k, bool brute, const std::string& out_flag) {
  auto dir = resolve_out_dir(out_flag, "oracle");
  auto g = bfgnn::graph_from_json(parse_json_file(graph_path));

  ordered_json rc;
  rc["command"] = "oracle";
  rc["graph"] = graph_path;
  rc["k"] = k;
  rc["brute"] = brute;
  write_config(dir, rc);

  ordered_json result;
  result["k"] = k;
  result["method"] = brute ? "walk-enumeration" : "relaxation";
  if (brute) {
    result["features"] = bfgnn::brute_force_khop(g, k);
  } else {
    result["features"] = bfgnn::bf_k(g, k).features;
  }
  write_text(dir / "result.json", result.dump(2) + "\n");
  std::cout << result["features"].dump() << "\n";
  return 0;
}

}  // namespace

std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config_path.empty()) return args;

  json cfg = parse_json_file(config_path);
  if (!cfg.is_object()) throw bfgnn::ValidationError("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) {
        present = true;
        break;
      }
    }
    if (present) continue;  // explicit flags override the file
    args.push_back(flag);
    if (value.is_string())
      args.push_back(value.get<std::string>());
    else if (!value.is_boolean() || !value.get<bool>())
      args.push_back(value.dump());
  }
  return args;
}

int main(int argc, char** argv) {
  CLI::App app{"min-aggregation GNNs that provably run Bellman-Ford relaxation"};
  app.require_subcommand(1);
  app.fallthrough(true);  // allow --out after the subcommand name
  app.footer("--config FILE loads flag defaults from a flat JSON object; explicit flags win.");

  std::string out_flag;
  app.add_option("--out", out_flag, "output directory (default $BFGNN_OUT_ROOT/<command>)");

  auto* gen_train = app.add_subcommand("gen-train", "generate a labeled training manifest");
  std::string set = "gk";
  int gt_k = 2;
  std::uint64_t gt_seed = 0;
  gen_train->add_option("--set", set, "hsmall | gk | experiment")->default_val(set);
  gen_train->add_option("--K", gt_k, "relaxation steps")->default_val(gt_k);
  gen_train->add_option("--seed", gt_seed, "seed for the randomized extras")->default_val(gt_seed);
  std::string gt_k_range;
  gen_train->add_option("--k-range", gt_k_range,
                        "comma-separated scale-grid steps for the gk set (default 1..K)");

  auto* gen_test = app.add_subcommand("gen-test", "generate an evaluation suite");
  std::string suite_kind = "mixed";
  int er_n = 100, er_count = 20;
  std::uint64_t suite_seed = 0;
  gen_test->add_option("--suite", suite_kind, "mixed | er")->default_val(suite_kind);
  gen_test->add_option("--n", er_n, "node count for er suites")->default_val(er_n);
  gen_test->add_option("--count", er_count, "graph count for er suites")->default_val(er_count);
  gen_test->add_option("--seed", suite_seed, "generator seed")->default_val(suite_seed);

  auto* train_cmd = app.add_subcommand("train", "full-batch training run");
  std::string manifest_path;
  ArchFlags train_arch;
  double lambda = 1.0, eta = 0.0, threshold = 1e-6, lr = 0.001;
  long long steps = 20000, eval_stride = 500, checkpoint_every = 0;
  std::uint64_t train_seed = 0, eval_seed = 0;
  std::string eval_suite_path = "auto";
  train_cmd->add_option("--manifest", manifest_path, "training manifest JSON")->required();
  train_arch.attach(train_cmd);
  train_cmd->add_option("--l1", lambda, "L1 coefficient (0 disables)")->default_val(lambda);
  train_cmd->add_option("--eta", eta, "L0 reporting coefficient (0 = auto window)")
      ->default_val(eta);
  train_cmd->add_option("--threshold", threshold, "nonzero threshold")->default_val(threshold);
  train_cmd->add_option("--steps", steps, "optimizer steps")->default_val(steps);
  train_cmd->add_option("--seed", train_seed, "init seed")->default_val(train_seed);
  train_cmd->add_option("--lr", lr, "learning rate")->default_val(lr);
  train_cmd->add_option("--eval-suite", eval_suite_path, "suite JSON | auto | none")
      ->default_val(eval_suite_path);
  train_cmd->add_option("--eval-seed", eval_seed, "seed for the auto suite")
      ->default_val(eval_seed);
  train_cmd->add_option("--eval-stride", eval_stride, "steps between test evaluations")
      ->default_val(eval_stride);
  train_cmd->add_option("--checkpoint-every", checkpoint_every, "periodic checkpoint interval")
      ->default_val(checkpoint_every);
  double prune_threshold = 0.0;
  train_cmd
      ->add_option("--prune-threshold", prune_threshold,
                   "also write checkpoint_pruned.json with entries at or below this "
                   "magnitude zeroed (0 = off)")
      ->default_val(prune_threshold);

  auto* eval_cmd = app.add_subcommand("eval", "multiplicative test error of a checkpoint");
  std::string eval_checkpoint, eval_suite_file;
  int reps = 1, ev_er_n = 100, ev_er_count = 20;
  std::uint64_t ev_seed = 0;
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint JSON")->required();
  eval_cmd->add_option("--suite", eval_suite_file, "suite JSON (omit to sample er graphs)");
  eval_cmd->add_option("--er-n", ev_er_n, "er node count")->default_val(ev_er_n);
  eval_cmd->add_option("--er-count", ev_er_count, "er graph count")->default_val(ev_er_count);
  eval_cmd->add_option("--seed", ev_seed, "er seed")->default_val(ev_seed);
  eval_cmd->add_option("--reps", reps, "model iterations (targets K*reps steps)")
      ->default_val(reps);

  auto* certify_cmd = app.add_subcommand("certify", "loss certificate and envelope audit");
  std::string cert_checkpoint, cert_manifest, audit_suite_path;
  double cert_eta = 0.0, cert_threshold = 1e-6, zero_tol = 1e-9;
  std::uint64_t audit_seed = 0;
  certify_cmd->add_option("--checkpoint", cert_checkpoint, "model checkpoint JSON")->required();
  certify_cmd->add_option("--manifest", cert_manifest, "training manifest JSON")->required();
  certify_cmd->add_option("--eta", cert_eta, "L0 coefficient (0 = auto window)")
      ->default_val(cert_eta);
  certify_cmd->add_option("--threshold", cert_threshold, "nonzero threshold")
      ->default_val(cert_threshold);
  certify_cmd->add_option("--audit-suite", audit_suite_path, "suite JSON (omit for default)");
  certify_cmd->add_option("--audit-seed", audit_seed, "seed for the default audit suite")
      ->default_val(audit_seed);
  certify_cmd->add_option("--zero-tol", zero_tol, "absolute tolerance at zero targets")
      ->default_val(zero_tol);

  auto* exact_cmd = app.add_subcommand("exact-bf", "materialize the exact sparse construction");
  ArchFlags exact_arch;
  exact_arch.attach(exact_cmd);

  auto* prune_cmd = app.add_subcommand("prune", "zero all entries at or below a threshold");
  std::string prune_checkpoint;
  double prune_t = 1e-3;
  prune_cmd->add_option("--checkpoint", prune_checkpoint, "model checkpoint JSON")->required();
  prune_cmd->add_option("--threshold", prune_t, "magnitude cutoff")->default_val(prune_t);

  auto* export_cmd = app.add_subcommand("export", "smooth a trace CSV for plotting");
  std::string trace_path;
  double sigma = 20.0;
  export_cmd->add_option("--trace", trace_path, "trace CSV")->required();
  export_cmd->add_option("--sigma", sigma, "gaussian sigma")->default_val(sigma);

  auto* oracle_cmd = app.add_subcommand("oracle", "run the relaxation or the walk oracle");
  std::string graph_path;
  int oracle_k = 1;
  bool brute = false;
  oracle_cmd->add_option("--graph", graph_path, "graph JSON")->required();
  oracle_cmd->add_option("--k", oracle_k, "steps / max walk edges")->default_val(oracle_k);
  oracle_cmd->add_flag("--brute", brute, "use exhaustive walk enumeration");

  std::vector<std::string> args;
  try {
    args = inject_config(argc, argv);
  } catch (const bfgnn::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const bfgnn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  try {
    // CLI11 parses reversed argument vectors
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_train->parsed()) return run_gen_train(set, gt_k, gt_seed, gt_k_range, out_flag);
    if (gen_test->parsed())
      return run_gen_test(suite_kind, er_n, er_count, suite_seed, out_flag);
    if (train_cmd->parsed())
      return run_train(manifest_path, train_arch, lambda, eta, threshold, steps, train_seed,
                       lr, eval_suite_path, eval_seed, eval_stride, checkpoint_every,
                       prune_threshold, out_flag);
    if (eval_cmd->parsed())
      return run_eval(eval_checkpoint, eval_suite_file, ev_er_n, ev_er_count, ev_seed, reps,
                      out_flag);
    if (certify_cmd->parsed())
      return run_certify(cert_checkpoint, cert_manifest, cert_eta, cert_threshold,
                         audit_suite_path, audit_seed, zero_tol, out_flag);
    if (exact_cmd->parsed()) return run_exact_bf(exact_arch, out_flag);
    if (prune_cmd->parsed()) return run_prune(prune_checkpoint, prune_t, out_flag);
    if (export_cmd->parsed()) return run_export(trace_path, sigma, out_flag);
    if (oracle_cmd->parsed()) return run_oracle(graph_path, oracle_k, brute, out_flag);
  } catch (const bfgnn::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const bfgnn::ConfigMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const bfgnn::RefusalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const bfgnn::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 7;
  } catch (const bfgnn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
