// Acceptance runs. Usage: acceptance [N ...]; with no arguments every
// criterion runs. Each criterion ends with one "criterion N: PASS|FAIL" line.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nspcert/experiments.h"
#include "nspcert/lp_core.h"
#include "nspcert/randomization.h"
#include "nspcert/report.h"
#include "nspcert/rng.h"
#include "nspcert/smooth_solver.h"
#include "oracles.h"

namespace {

using namespace nspcert;

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

DualPoint RandomDual(int n, Rng& r, double scale) {
  DualPoint u = DualPoint::Zero(n);
  auto sym = [&](Eigen::MatrixXd& m) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = scale * r.Normal();
  };
  sym(u.u1);
  sym(u.u2);
  sym(u.u3);
  for (Eigen::Index i = 0; i < u.u4.size(); ++i) u.u4.data()[i] = scale * r.Normal();
  return u;
}

Outcome OrderOneTightness() {
  double worst = 0.0;
  for (std::uint64_t seed = 1001; seed <= 1010; ++seed) {
    const auto inst = GenGaussian(14, 20, seed);
    const double ub = UpperBoundAlpha(ComputeNullspace(inst), 1).alpha_upper;
    const double ex = ExactAlpha(inst, 1).alpha;
    std::printf("  seed %llu: upper %.6f exact %.6f diff %.2e\n",
                static_cast<unsigned long long>(seed), ub, ex, ub - ex);
    worst = std::max(worst, std::abs(ub - ex));
  }
  return {worst <= 1e-2, Fmt("max |upper - exact| = %.3e (tol 1e-2)", worst)};
}

Outcome OracleSandwich() {
  const BoundOptions opts;
  double worst_low = -1.0, worst_up = -1.0;
  bool ok = true;
  for (std::uint64_t seed = 2001; seed <= 2010; ++seed) {
    const auto inst = GenGaussian(6, 10, seed);
    for (int k = 1; k <= 3; ++k) {
      const auto rep = ComputeBoundReport(inst, k, opts);
      if (!rep.alpha_exact) return {false, "exact oracle skipped"};
      const double ex = *rep.alpha_exact;
      const double low = rep.MaxLowerBound() - 1e-6 - ex;
      const double up = ex - rep.alpha_upper - opts.epsilon;
      worst_low = std::max(worst_low, low);
      worst_up = std::max(worst_up, up);
      ok = ok && low <= 0 && up <= 0;
      std::printf("  seed %llu k %d: lower %.6f exact %.6f upper %.6f\n",
                  static_cast<unsigned long long>(seed), k, rep.MaxLowerBound(), ex,
                  rep.alpha_upper);
    }
  }
  return {ok, Fmt("max(lower)-1e-6-exact <= %.2e, exact-upper-eps <= %.2e", worst_low,
                  worst_up)};
}

ExperimentConfig TableConfig(std::vector<double> rhos, std::vector<int> ks) {
  ExperimentConfig cfg;
  cfg.ensemble = Ensemble::kGaussian;
  cfg.n = 40;
  cfg.rhos = std::move(rhos);
  cfg.ks = std::move(ks);
  cfg.samples = 10;
  cfg.base_seed = 1;
  cfg.bound.exact_budget = 0;
  cfg.bound.lp_trials = 0;
  return cfg;
}

Outcome TableReproduction() {
  const auto res = RunTables(TableConfig({0.5, 0.7}, {1, 2}));
  const std::map<std::pair<double, int>, double> reference = {
      {{0.5, 1}, 0.27}, {{0.5, 2}, 0.49}, {{0.7, 1}, 0.20}, {{0.7, 2}, 0.34}};
  bool ok = true;
  std::string summary;
  for (const auto& [rho, rows] : res.tables) {
    for (const auto& row : rows) {
      const double ref = reference.at({rho, row.k});
      const bool cell_ok = row.samples_failed == 0 && std::abs(row.median_upper - ref) <= 0.05;
      ok = ok && cell_ok;
      std::printf("  rho %.1f k %d: median upper %.4f (reference %.2f) range [%.4f, %.4f] "
                  "median lower %.4f failed %d\n",
                  rho, row.k, row.median_upper, ref, row.min_upper, row.max_upper,
                  row.median_lower.value_or(NAN), row.samples_failed);
      summary += Fmt("%.1f/k%.0f=%.3f ", rho, row.k, row.median_upper);
    }
  }
  return {ok, "medians " + summary + "(tol 0.05)"};
}

Outcome CounterexampleCheck() {
  bool ok = true;
  double worst_res = 0.0, worst_obj = 0.0;
  for (int m : {8, 18}) {
    const auto inst = GenGaussian(m, 2 * m, 1);
    const auto cert = CounterexamplePoint(m, ComputeNullspace(inst));
    const auto rep = CheckPrimalFeasibility(cert, inst, SdpForm::kPrimalColumnwise);
    const double obj_err = std::abs(cert.objective() - 0.5);
    worst_res = std::max(worst_res, rep.Max());
    worst_obj = std::max(worst_obj, obj_err);
    ok = ok && rep.Max() <= 1e-10 && obj_err <= 1e-12;
    std::printf("  m %d: objective %.17g max residual %.3e\n", m, cert.objective(),
                rep.Max());
  }
  return {ok, Fmt("max residual %.2e (tol 1e-10), |obj-0.5| %.2e (tol 1e-12)", worst_res,
                  worst_obj)};
}

Outcome ProjectionCorrectness() {
  Rng r(5005);
  double worst_dist = 0.0, worst_ball = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 5;
    const int k = 1 + t % 3;
    const double a = 0.2 + r.Uniform();
    const DualPoint v = RandomDual(n, r, 0.5 + t % 4);
    const auto pr = ProjectBall(v, k, a);
    const auto ref = oracle::ProjectBallByBudgets(v, k, a);
    const double dist = std::sqrt((v - pr.point).SquaredNorm());
    worst_dist = std::max(worst_dist, std::abs(dist - ref.distance));
    worst_ball = std::max(worst_ball, DualObjective(pr.point, k) - a);
  }
  return {worst_dist <= 1e-6 && worst_ball <= 1e-8,
          Fmt("max distance gap %.2e (tol 1e-6), max ball excess %.2e (tol 1e-8)",
              worst_dist, worst_ball)};
}

Outcome SmoothingProperties() {
  double worst_sand = -1.0;
  for (unsigned s = 0; s < 100; ++s) {
    const int d = 2 + s % 15;
    const Eigen::MatrixXd m = oracle::RandomSymmetric(d, 6000 + s) * (0.5 + s % 9);
    const double mu = 1e-3 * (1 + s % 50);
    const auto r = SmoothEig(m, mu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues()(d - 1);
    worst_sand = std::max({worst_sand, lmax - r.value,
                           r.value - lmax - mu * std::log(static_cast<double>(d))});
  }
  Rng r(6006);
  double worst_fd = 0.0;
  for (int p = 0; p < 20; ++p) {
    const auto basis = ComputeNullspace(GenGaussian(3 + p % 4, 9, 6100 + p));
    const DualPoint u = RandomDual(9, r, 0.3);
    DualPoint dir = RandomDual(9, r, 1.0);
    dir = (1.0 / std::sqrt(dir.SquaredNorm())) * dir;
    const double mu = 1e-2 * (1 + p % 4);
    const double an = EvaluateObjective(u, basis, mu).gradient.Dot(dir);
    // Truncation error of the central difference grows like (h / mu)^2.
    const double h = 1e-3 * mu;
    const double fd = (EvaluateObjective(u + h * dir, basis, mu).value -
                       EvaluateObjective(u - h * dir, basis, mu).value) /
                      (2 * h);
    worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
  }
  return {worst_sand <= 1e-12 && worst_fd <= 1e-5,
          Fmt("max sandwich violation %.2e (tol 1e-12), max FD rel. error %.2e (tol 1e-5)",
              worst_sand, worst_fd)};
}

Outcome ConcentrationCaps() {
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(10, 10);
  const int n = 100000;
  bool ok = true;
  std::string summary;
  for (double delta : {10.0, 20.0, 100.0}) {
    for (NormKind which : {NormKind::kL1, NormKind::kLinf}) {
      const double q = 1.0 / delta;
      const double cap = q + 3 * std::sqrt(q * (1 - q) / n);
      const double rate = ConcentrationCheck(cov, delta, n, 7000 + delta, which);
      ok = ok && rate <= cap;
      const char* name = which == NormKind::kL1 ? "l1" : "linf";
      std::printf("  delta %g %s: rate %.5f cap %.5f\n", delta, name, rate, cap);
      summary += Fmt("%.0f:", delta) + name + Fmt("=%.4f ", rate);
    }
  }
  return {ok, "rates " + summary};
}

Outcome SecondMoment() {
  Rng r(8008);
  double worst = 0.0;
  double worst_pair = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 6;
    Eigen::MatrixXd f(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = r.Normal();
    const Eigen::MatrixXd g = f * f.transpose() / (2 * n);
    PrimalCertificate c;
    c.x = g.topLeftCorner(n, n);
    c.y = g.bottomRightCorner(n, n);
    c.z = g.bottomLeftCorner(n, n);
    const double tr = c.z.trace();
    const double expected = tr * tr + SecondMomentSigma(c);
    const double pairing = tr * tr + ProductVariance(c);
    const auto est = EmpiricalSecondMoment(c, 100000, 8100 + t);
    const double zscore = std::abs(est.mean - expected) / est.std_error;
    const double zpair = std::abs(est.mean - pairing) / est.std_error;
    worst = std::max(worst, zscore);
    worst_pair = std::max(worst_pair, zpair);
    std::printf("  n %d: empirical %.5f, with ||Z||_F^2 %.5f (%.2f SE), with Tr(Z^2) %.5f "
                "(%.2f SE)\n",
                n, est.mean, expected, zscore, pairing, zpair);
  }
  return {worst <= 5.0,
          Fmt("max deviation %.2f standard errors (tol 5); with Tr(Z^2) in place of "
              "||Z||_F^2: %.2f",
              worst, worst_pair)};
}

Outcome RecoveryExperiment() {
  RecoverConfig cfg;
  cfg.instance = GenGaussian(27, 36, 1);
  cfg.k_min = 1;
  cfg.k_max = 8;
  cfg.trials = 50;
  cfg.seed = 9009;
  const auto res = RunRecover(cfg);
  bool ok = res.strong_threshold.has_value();
  int certified = 0;
  for (const auto& row : res.rows) {
    std::printf("  k %d: recovery %.2f mean l1 error %.3e upper %s bound %s\n", row.k,
                row.recovery_prob, row.mean_l1_error,
                row.alpha_upper ? Fmt("%.4f", *row.alpha_upper).c_str() : "-",
                row.bound ? Fmt("%.3e", *row.bound).c_str() : "-");
    if (!row.certified) continue;
    ++certified;
    ok = ok && row.recovery_prob == 1.0;
    if (row.bound) ok = ok && row.mean_l1_error <= *row.bound + 1e-6;
  }
  return {ok, Fmt("%.0f certified orders, all recovered with probability 1: ", certified) +
                  (ok ? "yes" : "no")};
}

Outcome Determinism() {
  const auto cfg = TableConfig({0.5}, {1});
  std::string runs[2];
  for (auto& text : runs) {
    const auto cells = RunTables(cfg).cells;
    std::ostringstream out;
    WriteCellsCsv(out, cells);
    WriteTableCsv(out, Summarize(cells, 0.5));
    text = out.str();
  }
  const bool same = runs[0] == runs[1];
  return {same, same ? "cells and table CSV byte-identical across repeats"
                     : "CSV output differs between repeats"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria = {
      {1, OrderOneTightness},  {2, OracleSandwich},       {3, TableReproduction},
      {4, CounterexampleCheck}, {5, ProjectionCorrectness}, {6, SmoothingProperties},
      {7, ConcentrationCaps},  {8, SecondMoment},          {9, RecoveryExperiment},
      {10, Determinism}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (const auto& [id, fn] : criteria) which.push_back(id);
  }
  bool all = true;
  for (int id : which) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s [%.1fs]\n", id, out.pass ? "PASS" : "FAIL",
                out.summary.c_str(), secs);
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
