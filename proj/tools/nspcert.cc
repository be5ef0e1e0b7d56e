// nspcert: certify the nullspace property of small sensing matrices.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nspcert/experiments.h"
#include "nspcert/report.h"

namespace {

using namespace nspcert;

constexpr int kExitCertified = 0;
constexpr int kExitNotCertified = 1;
constexpr int kExitError = 2;

struct Globals {
  std::uint64_t seed = 1;
  double epsilon = BoundOptions{}.epsilon;
  double bisect_tol = BoundOptions{}.bisect_tol;
  int threads = 1;
  std::string out;
};

// Where an instance comes from: a matrix file or a generator.
struct Source {
  std::string matrix;
  std::string gen;
  int m = 0;
  int n = 0;
  std::uint64_t matrix_seed = 0;
  bool matrix_seed_set = false;

  void Attach(CLI::App* app) {
    app->add_option("--matrix", matrix, "matrix file written by `gen`");
    app->add_option("--gen", gen, "ensemble: gaussian, bernoulli or fourier");
    app->add_option("--m", m, "rows for --gen");
    app->add_option("--n", n, "columns for --gen");
    app->add_option_function<std::uint64_t>(
        "--matrix-seed",
        [this](std::uint64_t s) {
          matrix_seed = s;
          matrix_seed_set = true;
        },
        "generator seed (defaults to --seed)");
  }

  ProblemInstance Load(std::uint64_t fallback_seed) const {
    if (!matrix.empty() == !gen.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "give exactly one of --matrix and --gen");
    }
    if (!matrix.empty()) return LoadMatrix(matrix);
    const auto e = ParseEnsemble(gen);
    if (!e || *e == Ensemble::kFile) {
      throw Error(ErrorCode::kInvalidArgument, "unknown ensemble '" + gen + "'");
    }
    return Generate(*e, m, n, matrix_seed_set ? matrix_seed : fallback_seed);
  }
};

std::vector<double> ReadVector(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::vector<double> v;
  std::string tok;
  while (f >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedFile, path + ": bad number '" + tok + "'");
    }
  }
  return v;
}

Eigen::VectorXd ToEigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Writes to --out when given, stdout otherwise.
void Emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + g.out);
  f << text;
}

std::vector<double> ParseDoubles(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> ParseInts(const std::string& list) {
  std::vector<int> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int a = std::stoi(item.substr(0, dash));
      const int b = std::stoi(item.substr(dash + 1));
      for (int k = a; k <= b; ++k) out.push_back(k);
    } else {
      out.push_back(std::stoi(item));
    }
  }
  return out;
}

void AttachBoundOptions(CLI::App* app, BoundOptions& o,
                        const std::string& samples_flag = "--samples") {
  app->add_option("--max-iters", o.max_iters, "iteration cap per bisection level")
      ->check(CLI::PositiveNumber);
  app->add_option(samples_flag, o.randomized_samples,
                  "Gaussian samples for the randomized lower bound");
  app->add_option("--direct-samples", o.direct_samples,
                  "nullspace samples for the direct lower bound");
  app->add_option("--lp-trials", o.lp_trials, "random sign patterns for the LP bound");
  app->add_option("--exact-budget", o.exact_budget,
                  "largest enumeration run by the exact oracle (0 skips it)");
}

void ApplyGlobals(const Globals& g, BoundOptions& o) {
  o.epsilon = g.epsilon;
  o.bisect_tol = g.bisect_tol;
  o.seed = g.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nullspace property certificates for sensing matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "base seed")->envname("NSPCERT_SEED");
  app.add_option("--epsilon", g.epsilon, "smoothing precision of the first-order solver")
      ->envname("NSPCERT_EPSILON")
      ->check(CLI::PositiveNumber);
  app.add_option("--bisect-tol", g.bisect_tol, "bisection tolerance on alpha")
      ->envname("NSPCERT_BISECT_TOL")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads for sweeps")
      ->envname("NSPCERT_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (directory for `tables`)")
      ->envname("NSPCERT_OUT");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random sensing matrix");
  std::string gen_ensemble = "gaussian";
  int gen_m = 0, gen_n = 0;
  gen->add_option("--ensemble", gen_ensemble, "gaussian, bernoulli or fourier");
  gen->add_option("--m", gen_m, "rows")->required();
  gen->add_option("--n", gen_n, "columns")->required();

  // bound
  auto* bound = app.add_subcommand("bound", "upper and lower bounds on alpha_k");
  Source bound_src;
  bound_src.Attach(bound);
  int bound_k = 0;
  BoundOptions bound_opts;
  bound->add_option("--k", bound_k, "cardinality")->required();
  AttachBoundOptions(bound, bound_opts);

  // lower
  auto* lower = app.add_subcommand("lower", "lower bounds on alpha_k only");
  Source lower_src;
  lower_src.Attach(lower);
  int lower_k = 0;
  int lower_samples = 10000, lower_trials = 50;
  lower->add_option("--k", lower_k, "cardinality")->required();
  lower->add_option("--direct-samples", lower_samples, "nullspace samples");
  lower->add_option("--lp-trials", lower_trials, "random sign patterns");

  // exact
  auto* exact = app.add_subcommand("exact", "alpha_k by exhaustive enumeration");
  Source exact_src;
  exact_src.Attach(exact);
  int exact_k = 0;
  long long exact_budget = kDefaultEnumerationBudget;
  exact->add_option("--k", exact_k, "cardinality")->required();
  exact->add_option("--budget", exact_budget, "largest number of sign patterns");

  // decode
  auto* decode = app.add_subcommand("decode", "basis pursuit decoding of A x = v");
  Source decode_src;
  decode_src.Attach(decode);
  std::string v_path, ref_path;
  int decode_k = 0;
  double decode_alpha = -1.0;
  decode->add_option("--v", v_path, "measurement vector file")->required();
  decode->add_option("--ref", ref_path, "reference signal for diagnostics");
  decode->add_option("--k", decode_k, "cardinality for sigma_k and the bound");
  decode->add_option("--alpha-upper", decode_alpha,
                     "certified upper bound on alpha_k for the error bound");

  // tables
  auto* tables = app.add_subcommand("tables", "median bounds over random matrices");
  ExperimentConfig tcfg;
  std::string t_ensemble = "gaussian", t_rhos = "0.5", t_ks = "1";
  tcfg.bound.exact_budget = 0;
  tcfg.bound.lp_trials = 0;
  tables->add_option("--ensemble", t_ensemble, "gaussian, bernoulli or fourier");
  tables->add_option("--n", tcfg.n, "columns");
  tables->add_option("--rho", t_rhos, "comma-separated m/n ratios");
  tables->add_option("--k", t_ks, "comma-separated k values or ranges like 1-5");
  tables->add_option("--samples", tcfg.samples, "matrices per cell");
  AttachBoundOptions(tables, tcfg.bound, "--randomized-samples");

  // recover
  auto* recover = app.add_subcommand("recover", "empirical recovery of sparse signals");
  Source rec_src;
  rec_src.Attach(recover);
  RecoverConfig rcfg;
  recover->add_option("--k-min", rcfg.k_min, "smallest k");
  recover->add_option("--k-max", rcfg.k_max, "largest k")->required();
  recover->add_option("--trials", rcfg.trials, "signals per k");
  recover->add_option("--max-iters", rcfg.bound.max_iters, "iteration cap per level");

  // counterexample
  auto* cex = app.add_subcommand("counterexample",
                                 "orthoprojector point for n = 2m with sqrt(n) integral");
  int cex_m = 0;
  cex->add_option("--m", cex_m, "rows; n = 2m must be a perfect square")->required();

  // tightness
  auto* tight = app.add_subcommand("tightness", "histogram of mu from cells files");
  std::vector<std::string> cell_files;
  int bins = 20;
  tight->add_option("--cells", cell_files, "cells CSV files from `tables`");
  tight->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);

  // export
  auto* exp = app.add_subcommand("export", "write the relaxation in SDPA sparse format");
  Source exp_src;
  exp_src.Attach(exp);
  int exp_k = 0;
  std::string exp_form = "primal_basic";
  double exp_level = -1.0;
  exp->add_option("--k", exp_k, "cardinality")->required();
  exp->add_option("--form", exp_form, "primal_basic or decision");
  exp->add_option("--alpha-bar", exp_level, "target level for the decision form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (*gen) {
      const auto e = ParseEnsemble(gen_ensemble);
      if (!e || *e == Ensemble::kFile) {
        throw Error(ErrorCode::kInvalidArgument, "unknown ensemble '" + gen_ensemble + "'");
      }
      if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "gen needs --out");
      SaveMatrix(Generate(*e, gen_m, gen_n, g.seed), g.out);
      return 0;
    }
    if (*bound) {
      const ProblemInstance inst = bound_src.Load(g.seed);
      ApplyGlobals(g, bound_opts);
      const BoundReport r = ComputeBoundReport(inst, bound_k, bound_opts);
      Emit(g, ToJson(r).dump(2) + "\n");
      return r.l1_certified() ? kExitCertified : kExitNotCertified;
    }
    if (*lower) {
      const ProblemInstance inst = lower_src.Load(g.seed);
      if (lower_k < 1 || lower_k > inst.cols()) {
        throw Error(ErrorCode::kInvalidArgument, "k must be in [1, n]");
      }
      const NullspaceBasis basis = ComputeNullspace(inst);
      nlohmann::json j = {
          {"k", lower_k},
          {"alpha_lower_direct",
           DirectNullspaceLowerBound(basis, lower_k, lower_samples, g.seed)},
          {"alpha_lower_lp", LpLowerBound(basis, lower_k, lower_trials, g.seed)}};
      Emit(g, j.dump(2) + "\n");
      return 0;
    }
    if (*exact) {
      const ProblemInstance inst = exact_src.Load(g.seed);
      const ExactAlphaResult r = ExactAlpha(inst, exact_k, exact_budget);
      std::vector<double> w(r.witness.data(), r.witness.data() + r.witness.size());
      nlohmann::json j = {{"k", exact_k},
                          {"alpha_exact", r.alpha},
                          {"lps_solved", r.lps_solved},
                          {"witness", w}};
      Emit(g, j.dump(2) + "\n");
      return 0;
    }
    if (*decode) {
      const ProblemInstance inst = decode_src.Load(g.seed);
      const Eigen::VectorXd v = ToEigen(ReadVector(v_path));
      DecodeResult d;
      if (ref_path.empty()) {
        d = DecodeL1(inst, v);
      } else {
        if (decode_k < 1) throw Error(ErrorCode::kInvalidArgument, "--ref needs --k");
        std::optional<double> a;
        if (decode_alpha >= 0) a = decode_alpha;
        d = DecodeL1(inst, v, ToEigen(ReadVector(ref_path)), decode_k, a);
      }
      Emit(g, ToJson(d).dump(2) + "\n");
      return 0;
    }
    if (*tables) {
      const auto e = ParseEnsemble(t_ensemble);
      if (!e) throw Error(ErrorCode::kInvalidArgument, "unknown ensemble '" + t_ensemble + "'");
      tcfg.ensemble = *e;
      tcfg.rhos = ParseDoubles(t_rhos);
      tcfg.ks = ParseInts(t_ks);
      tcfg.base_seed = g.seed;
      tcfg.threads = g.threads;
      tcfg.out_dir = g.out.empty() ? "." : g.out;
      ApplyGlobals(g, tcfg.bound);
      const TablesResult res = RunTables(tcfg);
      for (const auto& path : WriteTables(tcfg, res)) std::cout << path << "\n";
      int failed = 0;
      for (const auto& c : res.cells) failed += c.ok ? 0 : 1;
      if (failed > 0) std::cerr << failed << " cell(s) failed\n";
      return 0;
    }
    if (*recover) {
      rcfg.instance = rec_src.Load(g.seed);
      rcfg.seed = g.seed;
      rcfg.bound.epsilon = g.epsilon;
      rcfg.bound.bisect_tol = g.bisect_tol;
      std::ostringstream out;
      WriteRecoverCsv(out, RunRecover(rcfg));
      Emit(g, out.str());
      return 0;
    }
    if (*cex) {
      Emit(g, RunCounterexample(cex_m, g.seed).dump(2) + "\n");
      return 0;
    }
    if (*tight) {
      const TightnessSummary s = RunTightness(cell_files, bins);
      std::ostringstream out;
      WriteTightnessCsv(out, s);
      Emit(g, out.str());
      std::cerr << "used k=1: " << s.used_k1 << ", k>1: " << s.used_k_more
                << ", skipped: " << s.skipped << "\n";
      return 0;
    }
    if (*exp) {
      const auto form = ParseSdpForm(exp_form);
      if (!form) throw Error(ErrorCode::kInvalidArgument, "unknown form '" + exp_form + "'");
      if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "export needs --out");
      const ProblemInstance inst = exp_src.Load(g.seed);
      std::optional<double> level;
      if (exp_level >= 0) level = exp_level;
      ExportSdpa(BuildProblem(ComputeNullspace(inst), exp_k, *form, level), g.out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << ToString(e.code()) << "): " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
