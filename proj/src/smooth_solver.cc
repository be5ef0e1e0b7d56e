#include "nspcert/smooth_solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace nspcert {

double DecisionDualValue(const Eigen::MatrixXd& g, const SdpProblem& problem) {
  const int n = problem.n();
  const int d = problem.p();
  if (g.rows() != n + d || g.cols() != n + d) {
    throw Error(ErrorCode::kInvalidArgument, "G has the wrong dimension");
  }
  if (!problem.alpha_bar) {
    throw Error(ErrorCode::kInvalidArgument, "problem has no target level");
  }
  const Eigen::MatrixXd& p = problem.basis.p;
  const double kk = problem.k;
  const Eigen::MatrixXd pg12 = p * g.topRightCorner(d, n);
  const Eigen::MatrixXd g22 = g.bottomRightCorner(n, n);
  const double norms =
      std::max({EntryL1(p * g.topLeftCorner(d, d) * p.transpose()),
                EntryL1(g22) / (kk * kk), EntryMax(g22), EntryL1(pg12) / kk});
  return *problem.alpha_bar * norms - pg12.trace();
}

double DualGap(const DualPoint& u, const Eigen::MatrixXd& g,
               const SdpProblem& problem, double mu) {
  const Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gs, Eigen::EigenvaluesOnly);
  if (std::abs(gs.trace() - 1.0) > 1e-8 || es.eigenvalues()(0) < -1e-8) {
    throw Error(ErrorCode::kInvalidArgument,
                "G must be trace-one and positive semidefinite");
  }
  const double primal = EvaluateObjective(u, problem.basis, mu).value;
  return std::max(0.0, DecisionDualValue(g, problem) - primal);
}

double PrimalValueFromG(const Eigen::MatrixXd& g, const NullspaceBasis& basis,
                        int k) {
  const int n = basis.n();
  const int d = basis.dim();
  const Eigen::MatrixXd& p = basis.p;
  const double kk = k;
  const Eigen::MatrixXd pg12 = p * g.topRightCorner(d, n);
  const Eigen::MatrixXd g22 = g.bottomRightCorner(n, n);
  const double norms =
      std::max({EntryL1(p * g.topLeftCorner(d, d) * p.transpose()),
                EntryL1(g22) / (kk * kk), EntryMax(g22), EntryL1(pg12) / kk});
  if (!(norms > 0)) return 0.0;
  return std::abs(pg12.trace()) / norms;
}

SmoothConfig SmoothConfig::For(const SdpProblem& problem, double epsilon) {
  SmoothConfig cfg;
  cfg.epsilon = epsilon;
  const double log_d = std::log(static_cast<double>(problem.assembled_dim()));
  cfg.mu = epsilon / (2.0 * log_d);
  cfg.lipschitz = 8.0 * log_d / epsilon;
  cfg.Validate();
  return cfg;
}

void SmoothConfig::Validate() const {
  if (!(epsilon > 0) || !(mu > 0) || !(lipschitz > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "smoothing config needs epsilon, mu, L > 0");
  }
  if (!(proj_tol > 0) || proj_tol > 1e-4) {
    throw Error(ErrorCode::kInvalidArgument, "proj_tol must be in (0, 1e-4]");
  }
  if (max_iters < 1 || gap_check_period < 1) {
    throw Error(ErrorCode::kInvalidArgument, "iteration counts must be >= 1");
  }
}

void SolveTrace::WriteCsv(std::ostream& out) const {
  out << "iteration,f,dual,gap,seconds\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.6f\n", r.iteration,
                  r.primal, r.dual, r.gap, r.seconds);
    out << buf;
  }
}

const char* ToString(DecisionStatus s) {
  switch (s) {
    case DecisionStatus::kCertified: return "certified";
    case DecisionStatus::kRefuted: return "refuted";
    case DecisionStatus::kGapClosed: return "gap_closed";
    case DecisionStatus::kIterationLimit: return "iteration_limit";
  }
  return "iteration_limit";
}

DecisionResult NesterovMaximize(const SdpProblem& problem,
                                const SmoothConfig& cfg) {
  if (problem.form != SdpForm::kDecision || !problem.alpha_bar) {
    throw Error(ErrorCode::kInvalidArgument,
                "NesterovMaximize needs a decision problem");
  }
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = problem.n();
  const int k = problem.k;
  const double level = *problem.alpha_bar;
  const double lip = cfg.lipschitz;
  const double sigma = 1.0;
  const NullspaceBasis& basis = problem.basis;

  DecisionResult res;
  DualPoint center = DualPoint::Zero(n, level);
  if (cfg.warm_start) {
    if (cfg.warm_start->n() != n) {
      throw Error(ErrorCode::kInvalidArgument, "warm start dimension mismatch");
    }
    center = ProjectBall(*cfg.warm_start, k, level, cfg.proj_tol).point;
    center.alpha_bar = level;
  }
  DualPoint u = center;
  DualPoint accum = DualPoint::Zero(n, level);
  Eigen::MatrixXd g_sum;
  double weight_sum = 0.0;
  res.f_best = -std::numeric_limits<double>::infinity();
  res.lambda_min_best = -std::numeric_limits<double>::infinity();
  res.dual_best = std::numeric_limits<double>::infinity();

  auto consider = [&](const DualPoint& point, const SmoothedObjective& obj) {
    res.f_best = std::max(res.f_best, obj.value);
    if (obj.lambda_min > res.lambda_min_best) {
      res.lambda_min_best = obj.lambda_min;
      res.u_best = point;
    }
  };

  for (int j = 0; j < cfg.max_iters; ++j) {
    const SmoothedObjective obj = EvaluateObjective(u, basis, cfg.mu);
    consider(u, obj);
    res.g_last = obj.g;
    res.iterations = j + 1;
    const double wj = 0.5 * (j + 1);
    if (j == 0) {
      g_sum = wj * obj.g;
    } else {
      g_sum += wj * obj.g;
    }
    weight_sum += wj;

    if (cfg.stop_on_decision && res.lambda_min_best > 0.0) {
      res.status = DecisionStatus::kCertified;
      break;
    }

    // Gradient mapping.
    DualPoint yj = ProjectBall(u + (1.0 / lip) * obj.gradient, k, level,
                               cfg.proj_tol).point;
    // Estimate sequence minimizer.
    accum += wj * obj.gradient;
    DualPoint wpt = ProjectBall(center + (sigma / lip) * accum, k, level,
                                cfg.proj_tol).point;

    if ((j + 1) % cfg.gap_check_period == 0) {
      const SmoothedObjective yobj = EvaluateObjective(yj, basis, cfg.mu);
      consider(yj, yobj);
      const double dual = std::min(DecisionDualValue(obj.g, problem),
                                   DecisionDualValue(g_sum / weight_sum, problem));
      res.dual_best = std::min(res.dual_best, dual);
      TraceRecord rec;
      rec.iteration = j + 1;
      rec.primal = res.f_best;
      rec.dual = res.dual_best;
      rec.gap = res.dual_best - res.f_best;
      rec.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      res.trace.records.push_back(rec);
      if (cfg.stop_on_decision && res.lambda_min_best > 0.0) {
        res.status = DecisionStatus::kCertified;
        break;
      }
      if (cfg.stop_on_decision && res.dual_best < 0.0) {
        res.status = DecisionStatus::kRefuted;
        break;
      }
      if (rec.gap <= cfg.epsilon) {
        res.status = res.certified() ? DecisionStatus::kCertified
                                     : DecisionStatus::kGapClosed;
        break;
      }
    }
    u = (2.0 / (j + 3)) * wpt + ((j + 1.0) / (j + 3)) * yj;
    u.alpha_bar = level;
  }
  if (res.status == DecisionStatus::kIterationLimit && res.certified()) {
    res.status = DecisionStatus::kCertified;
  }
  res.g_avg = g_sum / weight_sum;
  return res;
}

UpperBoundResult UpperBoundAlpha(const NullspaceBasis& basis, int k,
                                 const BisectionOptions& opts) {
  if (!(opts.tol > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "bisection tolerance must be > 0");
  }
  if (!(opts.hi > opts.lo) || opts.lo < 0) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 <= lo < hi");
  }
  UpperBoundResult out;
  double lo = opts.lo;
  double hi = opts.hi;
  out.alpha_upper = std::min(1.0, hi);
  if (basis.dim() == 0) {
    // Trivial nullspace: alpha_k = 0 and U = 0 certifies every level.
    out.alpha_upper = 0.0;
    out.lo = 0.0;
    return out;
  }
  double best_bound = std::numeric_limits<double>::infinity();
  double best_primal = -1.0;
  std::optional<DualPoint> last_certified;
  // With warm starts the top of the bracket is solved first: it certifies
  // quickly and seeds every later level.
  bool probe_top = opts.warm_start;
  while (hi - lo > opts.tol) {
    const double level = probe_top ? hi : 0.5 * (lo + hi);
    probe_top = false;
    const SdpProblem problem = BuildProblem(basis, k, SdpForm::kDecision, level);
    SmoothConfig cfg = SmoothConfig::For(problem, opts.epsilon);
    cfg.max_iters = opts.max_iters;
    if (opts.warm_start) cfg.warm_start = last_certified;
    const DecisionResult dr = NesterovMaximize(problem, cfg);
    out.total_iterations += dr.iterations;

    BisectionStep step;
    step.level = level;
    step.certified = dr.certified();
    step.status = dr.status;
    step.lambda_min = dr.lambda_min_best;
    step.dual = dr.dual_best;
    step.iterations = dr.iterations;
    out.trail.push_back(step);

    const double repaired = RepairedDualBound(dr.u_best, basis, k);
    if (repaired < best_bound) {
      best_bound = repaired;
      out.u_certificate = dr.u_best;
    }
    for (const Eigen::MatrixXd* g : {&dr.g_avg, &dr.g_last}) {
      const double pv = PrimalValueFromG(*g, basis, k);
      if (pv > best_primal) {
        best_primal = pv;
        out.g_final = *g;
      }
      lo = std::max(lo, pv);
    }
    if (dr.certified()) {
      last_certified = dr.u_best;
      hi = std::min(level, repaired);
    } else {
      lo = std::max(lo, level);
    }
    hi = std::min(hi, repaired);
    lo = std::min(lo, hi);
  }
  out.alpha_upper = std::min({hi, best_bound, 1.0});
  out.lo = lo;
  return out;
}

}  // namespace nspcert
