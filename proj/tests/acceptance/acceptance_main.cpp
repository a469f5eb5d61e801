// Acceptance suite: one checked criterion per section, each printing a
// single PASS/FAIL line with its measurements.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bfgnn/certificate.hpp"
#include "bfgnn/dataset.hpp"
#include "bfgnn/model.hpp"
#include "bfgnn/rng.hpp"
#include "bfgnn/training.hpp"

using namespace bfgnn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s - %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MinAggConfig small_cfg(int L, int K, int m) {
  std::vector<int> d_ell(L + 1, 4);
  d_ell.front() = 1;
  d_ell.back() = 1;
  return {L, K, m, 4, 8, d_ell};
}

std::vector<AttributedGraph> er_suite(int n, int count, std::uint64_t seed0) {
  std::vector<AttributedGraph> suite;
  for (int i = 0; i < count; ++i) suite.push_back(gen_er_sparse(n, seed0 + i));
  return suite;
}

std::vector<AttributedGraph> audit_suites(std::uint64_t seed) {
  auto suite = gen_test_suite(seed);
  for (int n : {100, 500, 1000}) {
    for (int i = 0; i < 8; ++i) suite.push_back(gen_er_sparse(n, seed + 17 * n + i));
  }
  return suite;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  long long graphs_checked = 0, mismatches = 0;
  for (int K : {1, 2, 3}) {
    auto params = build_exact_bf(small_cfg(K, K, 2));
    auto check = [&](const AttributedGraph& g) {
      ++graphs_checked;
      if (forward(params, g).features != bf_k(g, K).features) ++mismatches;
    };
    for (const auto& pair : gen_gk(K).pairs) check(pair.input);
    for (const auto& g : gen_test_suite(0)) check(g);
    for (int i = 0; i < 100; ++i) check(gen_er_sparse(6 + i % 45, 7000 + i));
  }
  double dt = seconds_since(t0);
  std::ostringstream os;
  os << "exact construction vs relaxation on " << graphs_checked << " graphs, " << mismatches
     << " mismatches at zero tolerance, " << dt << " s";
  report(1, mismatches == 0 && dt < 10.0, os.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream os;
  for (auto [L, K, m] : {std::tuple{1, 1, 1}, {2, 2, 2}, {3, 2, 2}}) {
    auto cfg = small_cfg(L, K, m);
    auto params = build_exact_bf(cfg);
    long long budget = cfg.param_budget();
    long long count = count_nonzero(params, 0.0);
    LossConfig lc{0.001, 1.0, 0.0};
    double reg = loss_reg(params, gen_gk(K), lc);
    bool here = count == budget && reg == lc.eta * static_cast<double>(budget);
    ok = ok && here;
    os << "(L=" << L << ",K=" << K << ",m=" << m << "): " << count << "/" << budget
       << (here ? " ok; " : " MISMATCH; ");
  }
  double dt = seconds_since(t0);
  os << dt << " s";
  report(2, ok && dt < 1.0, os.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  auto t0 = std::chrono::steady_clock::now();
  MinAggConfig cfg{2, 2, 2, 3, 4, {1, 3, 1}};
  const double h = 1e-5;
  const double tol = 1e-4;
  const double lambda = 0.01;

  int seeds_checked = 0, attempts = 0;
  double worst = 0.0;
  std::uint64_t seed = 5000;
  while (seeds_checked < 20 && attempts < 400) {
    ++attempts;
    ++seed;
    Rng rng(seed);
    std::vector<AttributedGraph> graphs;
    for (int i = 0; i < 2; ++i) {
      AttributedGraph g;
      g.n = rng.next_int(3, 5);
      double sum = 0.0;
      for (int u = 0; u < g.n; ++u) {
        for (int v = u + 1; v < g.n; ++v) {
          if (!rng.next_bool(0.6) && v != u + 1) continue;
          double w = rng.next_double(0.5, 4.0);
          sum += w;
          g.edges.push_back({u, v, w});
        }
      }
      g.beta = sum + 10.0;
      for (int v = 0; v < g.n; ++v) g.features.push_back(rng.next_double(0.1, 5.0));
      graphs.push_back(g);
    }
    auto manifest = make_manifest("fd", 2, graphs);

    auto params = init_params(cfg, seed);
    for (auto& layer : params.layers) {
      for (Mlp* f : {&layer.agg, &layer.up}) {
        for (auto& b : f->biases) {
          for (auto& x : b) {
            x = rng.next_double(0.01, 0.05) * (rng.next_bool(0.5) ? 1.0 : -1.0);
          }
        }
      }
    }
    ParamSet pset = bind_params(params);
    Tape tape = record_mse_objective(pset, params, manifest);
    tape.forward();
    if (tape.kink_margin() < 3e-4) continue;

    std::vector<double> flat;
    pset.gather(flat);
    bool near_l1_kink = false;
    for (double x : flat) {
      if (std::fabs(x) < 1e-3) near_l1_kink = true;  // |.| corner of the L1 term
    }
    if (near_l1_kink) continue;

    GradientRecord grad;
    tape.backward(grad);
    add_l1_subgradient(pset, lambda, grad);

    auto objective = [&] {
      double l1 = 0.0;
      std::vector<double> cur;
      pset.gather(cur);
      for (double x : cur) l1 += std::fabs(x);
      return tape.forward() + lambda * l1;
    };
    for (std::size_t i = 0; i < flat.size(); ++i) {
      double keep = flat[i];
      flat[i] = keep + h;
      pset.scatter(flat);
      double up = objective();
      flat[i] = keep - h;
      pset.scatter(flat);
      double down = objective();
      flat[i] = keep;
      pset.scatter(flat);
      double fd = (up - down) / (2.0 * h);
      double scale = std::max({std::fabs(fd), std::fabs(grad[i]), 1e-6});
      worst = std::max(worst, std::fabs(fd - grad[i]) / scale);
    }
    ++seeds_checked;
  }
  double dt = seconds_since(t0);
  std::ostringstream os;
  os << seeds_checked << "/20 seeds, max relative gap " << worst << " (tol " << tol << "), "
     << dt << " s";
  report(3, seeds_checked == 20 && worst < tol && dt < 30.0, os.str());
}

// ----------------------------------------------------------- criteria 4 and 5

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool pass = false;
  double e_reg = 0.0;
  double e_unreg = 0.0;
  MinAggGnnParams reg_pruned;
  MinAggGnnParams unreg;
  bool clean_support = false;
};

SeedOutcome run_seed(const MinAggConfig& cfg, const DatasetManifest& manifest,
                     const std::vector<AttributedGraph>& mixed, std::uint64_t seed,
                     long long steps, double lambda, double prune_threshold) {
  SeedOutcome out;
  out.seed = seed;
  auto init = init_params(cfg, seed);

  TrainOptions options;
  options.steps = steps;
  options.seed = seed;
  options.eval_stride = 0;

  auto reg = train(init, manifest, {0.0, lambda, 1e-6}, {}, options, {});
  out.reg_pruned = prune_params(reg.params, prune_threshold);
  auto unreg = train(init, manifest, {0.0, 0.0, 1e-6}, {}, options, {});
  out.unreg = std::move(unreg.params);

  out.e_reg = e_test(out.reg_pruned, mixed, cfg.K, 1);
  out.e_unreg = e_test(out.unreg, mixed, cfg.K, 1);
  out.pass = out.e_reg <= 0.02 && out.e_unreg >= 5.0 * out.e_reg;
  out.clean_support = count_nonzero(out.reg_pruned, 0.0) == cfg.param_budget();
  return out;
}

void criteria_4_and_5() {
  auto t0 = std::chrono::steady_clock::now();
  const long long steps = 60000;
  const double lambda = 0.001;
  const double prune_threshold = 1e-3;

  auto cfg = MinAggConfig::preset("deep-2layer");
  auto manifest = gen_experiment_train(2, 0);
  auto mixed = gen_test_suite(0);

  std::vector<SeedOutcome> outcomes;
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto out = run_seed(cfg, manifest, mixed, seed, steps, lambda, prune_threshold);
    std::printf(
        "  seed %llu: e_test regularized %.3g, unregularized %.3g (ratio %.1fx) %s\n",
        static_cast<unsigned long long>(seed), out.e_reg, out.e_unreg,
        out.e_unreg / std::max(out.e_reg, 1e-300), out.pass ? "pass" : "fail");
    std::fflush(stdout);
    if (out.pass) ++passes;
    outcomes.push_back(std::move(out));
  }
  {
    std::ostringstream os;
    os << passes << "/5 seeds reached e_test <= 0.02 with a 5x unregularized gap ("
       << seconds_since(t0) << " s)";
    report(4, passes >= 3, os.str());
  }

  // criterion 5 runs on the first passing seed, preferring a clean support
  const SeedOutcome* chosen = nullptr;
  for (const auto& o : outcomes) {
    if (o.pass && o.clean_support) {
      chosen = &o;
      break;
    }
  }
  if (!chosen) {
    for (const auto& o : outcomes) {
      if (o.pass) {
        chosen = &o;
        break;
      }
    }
  }
  if (!chosen) {
    report(5, false, "no passing seed available from criterion 4");
    return;
  }

  auto t5 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream os;
  os << "seed " << chosen->seed << ":";
  double unreg_single_1k = 0.0, unreg_iter_1k = 0.0;
  for (int n : {100, 500, 1000}) {
    int count = n == 100 ? 20 : (n == 500 ? 10 : 5);
    auto suite = er_suite(n, count, 9000 + static_cast<std::uint64_t>(n));
    double single = e_test(chosen->reg_pruned, suite, 2, 1);
    double iterated = e_test(chosen->reg_pruned, suite, 2, 3);
    ok = ok && single <= 0.01 && iterated <= 0.015;
    os << " n=" << n << " single " << single << " iterated " << iterated << ";";
    if (n == 1000) {
      unreg_single_1k = e_test(chosen->unreg, suite, 2, 1);
      unreg_iter_1k = e_test(chosen->unreg, suite, 2, 3);
    }
  }
  bool blowup = unreg_iter_1k >= 2.0 * unreg_single_1k;
  ok = ok && blowup;
  os << " unregularized n=1000 single " << unreg_single_1k << " vs iterated " << unreg_iter_1k
     << (blowup ? " (>=2x)" : " (<2x)");
  double dt = seconds_since(t5);
  os << "; " << dt << " s";
  report(5, ok && dt < 300.0, os.str());

  // certificate of the chosen trained model (informational, not gated):
  // thresholded support, measured loss window, and the envelope audit
  auto gk = gen_gk(2);
  LossConfig lc{default_eta(gk, cfg), lambda, 1e-6};
  auto cert = certify(chosen->reg_pruned, gk, lc);
  std::printf(
      "  trained-model certificate: epsilon %.3g, eta %.3g, nonzeros %lld/%d, hypothesis %s, "
      "structure %s\n",
      cert.epsilon, cert.eta, cert.nonzero_count, cert.param_budget,
      cert.hypothesis_ok ? "ok" : "not satisfied", cert.structure_ok ? "ok" : "violated");
  if (cert.hypothesis_ok) {
    auto audit = audit_extrapolation(chosen->reg_pruned, cert, audit_suites(0), 2);
    std::printf(
        "  trained-model audit: max deviation %.3g vs bound %.3g (2x bound %.3g), within "
        "2M*eps %s, zero targets %s\n",
        audit.max_deviation, audit.bound_factor, 2.0 * audit.bound_factor,
        audit.pass_2m_eps ? "yes" : "NO", audit.zero_targets_ok ? "ok" : "violated");
  }
  if (cert.structure_ok) {
    auto cu = collapse_params(chosen->reg_pruned, lc.nonzero_threshold);
    std::printf("  trained-model per-step scalars: mu = (");
    for (std::size_t k = 0; k < cu.mu.size(); ++k)
      std::printf("%s%.6g", k ? ", " : "", cu.mu[k]);
    std::printf("), nu = (");
    for (std::size_t k = 0; k < cu.nu.size(); ++k)
      std::printf("%s%.6g", k ? ", " : "", cu.nu[k]);
    std::printf(")\n");
    double worst_gap = 0.0;
    for (std::size_t k = 0; k < cu.nu.size(); ++k) {
      double prod = cu.nu[k];
      for (std::size_t i = k; i < cu.mu.size(); ++i) prod *= cu.mu[i];
      worst_gap = std::max(worst_gap, std::fabs(prod - 1.0));
    }
    std::printf("  trained-model edge-scalar gap: %.3g (2M*eps window %.3g) %s\n", worst_gap,
                2.0 * cert.bound_factor,
                worst_gap <= 2.0 * cert.bound_factor ? "inside" : "OUTSIDE");
  }
  std::fflush(stdout);
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = small_cfg(2, 2, 2);
  auto gk = gen_gk(2);
  LossConfig lc{default_eta(gk, cfg), 1.0, 1e-6};
  auto suite = audit_suites(0);

  auto scaled = [&](double s) {
    auto p = build_exact_bf(cfg);
    p.layers.back().up.weights.back().at(0, 0) *= s;
    return p;
  };

  bool ok = true;
  std::ostringstream os;

  // every certified model passes the doubled envelope
  std::vector<std::pair<std::string, MinAggGnnParams>> certified;
  certified.emplace_back("exact", build_exact_bf(cfg));
  certified.emplace_back("scaled-in", scaled(1.0 + 1e-4));
  Certificate cert_in;
  for (auto& [name, params] : certified) {
    auto cert = certify(params, gk, lc);
    if (!cert.hypothesis_ok) {
      ok = false;
      os << name << ": hypothesis unexpectedly failed; ";
      continue;
    }
    auto audit = audit_extrapolation(params, cert, suite, 2);
    if (!audit.pass_2m_eps) {
      ok = false;
      os << name << ": exceeded doubled envelope (" << audit.max_deviation << "); ";
    }
    if (name == "scaled-in") cert_in = cert;
  }
  os << "certified models within (1±2Mε); ";

  // a model scaled past the doubled bound must fail and report how far out
  double injected = 2.0 * cert_in.bound_factor;
  auto violator = scaled(1.0 + injected);
  auto bad = audit_extrapolation(violator, cert_in, suite, 2);
  bool caught = !bad.pass_m_eps &&
                std::fabs(bad.max_deviation - injected) <= 0.1 * injected;
  ok = ok && caught;
  os << "violator injected " << injected << ", reported " << bad.max_deviation
     << (caught ? " (caught)" : " (MISSED)");

  double dt = seconds_since(t0);
  os << "; " << dt << " s";
  report(6, ok && dt < 120.0, os.str());
}

// ---------------------------------------------------------------- criterion 7

AttributedGraph random_integer_graph(Rng& rng) {
  AttributedGraph g;
  g.n = rng.next_int(2, 7);
  double sum = 0.0;
  for (int u = 0; u < g.n; ++u) {
    for (int v = u + 1; v < g.n; ++v) {
      if (!rng.next_bool(0.6)) continue;
      double w = rng.next_int(0, 6);
      sum += w;
      g.edges.push_back({u, v, w});
    }
  }
  g.beta = sum + 1.0;
  g.features.assign(g.n, g.beta);
  g.features[0] = 0.0;
  return g;
}

void criterion_7() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream os;

  auto toy = gen_h_small();
  Rng rng(321);
  std::vector<AttributedGraph> graphs;
  for (int i = 0; i < 100; ++i) graphs.push_back(random_integer_graph(rng));

  // the exact family: power-of-two scales and non-negative dyadic offsets
  // keep every intermediate exactly representable on integer weights
  int family_failures = 0;
  std::vector<SimpleGnnParams> family;
  family.push_back({1.0, 1.0, 0.0, 1.0, 0.0});
  for (int i = 0; i < 50; ++i) {
    double w2 = std::ldexp(1.0, rng.next_int(-2, 2));
    double b1 = rng.next_int(0, 8) * 0.25;
    family.push_back({1.0 / w2, 1.0 / w2, b1, w2, -w2 * b1});
  }
  for (const auto& p : family) {
    for (const auto& pair : toy.pairs) {
      if (simple_forward(p, pair.input).features != pair.target.features) ++family_failures;
    }
    for (const auto& g : graphs) {
      if (simple_forward(p, g).features != bf_step(g).features) ++family_failures;
    }
  }
  ok = ok && family_failures == 0;
  os << family.size() << " exact draws, " << family_failures << " mismatches; ";

  // perturbed families inside the hypothesis window
  auto audit = gen_test_suite(3);
  audit.resize(100);
  int envelope_failures = 0;
  for (double epsilon : {0.5, 0.2}) {
    // the largest toy-set input is 16, so error 16*delta must stay under
    // epsilon/20 for the hypothesis to hold
    for (double fraction : {0.1, 0.5, 0.9}) {
      double delta = fraction * epsilon / (20.0 * 16.0);
      SimpleGnnParams near{1.0 + delta, 1.0 + delta, 0.0, 1.0, 0.0};
      auto rep = check_simple_theorem(near, epsilon, audit);
      if (!rep.hypothesis_ok || !rep.conclusion_checked || !rep.conclusion_ok)
        ++envelope_failures;
    }
  }
  ok = ok && envelope_failures == 0;
  os << "perturbed families: " << envelope_failures << " envelope failures";

  double dt = seconds_since(t0);
  os << "; " << dt << " s";
  report(7, ok && dt < 30.0, os.str());
}

// ---------------------------------------------------------------- criterion 8

void criterion_8(const fs::path& workdir) {
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = MinAggConfig::preset("deep-2layer");
  auto manifest = gen_experiment_train(2, 0);

  auto run_once = [&](const fs::path& path) {
    TrainOptions options;
    options.steps = 60000;
    options.seed = 1;
    options.eval_stride = 0;
    auto result = train(init_params(cfg, 1), manifest, {0.0, 0.001, 1e-6}, {}, options, {});
    save_trace_csv(result.trace, cfg, path.string());
  };

  fs::create_directories(workdir);
  fs::path a = workdir / "trace_a.csv";
  fs::path b = workdir / "trace_b.csv";
  run_once(a);
  run_once(b);

  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  bool identical = sa.str() == sb.str() && !sa.str().empty();
  std::uintmax_t bytes = fs::file_size(a);
  fs::remove(a);
  fs::remove(b);

  double dt = seconds_since(t0);
  std::ostringstream os;
  os << "two criterion-4 trainings, trace CSVs " << (identical ? "bitwise identical" : "DIFFER")
     << " (" << bytes << " bytes); " << dt << " s";
  report(8, identical, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string criterion = "all";
  std::string workdir = "acceptance_tmp";
  app.add_option("--criterion", criterion, "c1|c2|c3|c45|c6|c7|c8|all")->default_val(criterion);
  app.add_option("--workdir", workdir, "scratch directory for temporary files")
      ->default_val(workdir);
  CLI11_PARSE(app, argc, argv);

  auto want = [&](const std::string& c) { return criterion == "all" || criterion == c; };
  if (want("c1")) criterion_1();
  if (want("c2")) criterion_2();
  if (want("c3")) criterion_3();
  if (want("c45")) criteria_4_and_5();
  if (want("c6")) criterion_6();
  if (want("c7")) criterion_7();
  if (want("c8")) criterion_8(workdir);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  return 0;
}
