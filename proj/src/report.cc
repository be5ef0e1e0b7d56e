#include "nspcert/report.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace nspcert {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string InstanceId(const ProblemInstance& inst) {
  char buf[96];
  if (inst.ensemble == Ensemble::kFile) {
    std::snprintf(buf, sizeof(buf), "file-m%d-n%d", inst.rows(), inst.cols());
  } else {
    std::snprintf(buf, sizeof(buf), "%s-m%d-n%d-s%llu", ToString(inst.ensemble),
                  inst.rows(), inst.cols(),
                  static_cast<unsigned long long>(inst.seed));
  }
  return buf;
}

template <typename T>
nlohmann::json Opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double BoundReport::MaxLowerBound() const {
  double best = 0.0;
  for (const auto& v :
       {alpha_lower_randomized, alpha_lower_direct, alpha_lower_lp}) {
    if (v) best = std::max(best, *v);
  }
  return best;
}

BoundReport ComputeBoundReport(const ProblemInstance& inst, int k,
                               const BoundOptions& opts) {
  ValidateInstance(inst);
  if (k < 1 || k > inst.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [1, n], got " + std::to_string(k));
  }
  BoundReport r;
  r.instance_id = InstanceId(inst);
  r.m = inst.rows();
  r.n = inst.cols();
  r.k = k;
  r.ensemble = inst.ensemble;
  r.matrix_seed = inst.seed;
  r.sampling_seed = opts.seed;

  auto t = Clock::now();
  const NullspaceBasis basis = ComputeNullspace(inst);
  r.timings["nullspace"] = Seconds(t);

  t = Clock::now();
  BisectionOptions bo;
  bo.epsilon = opts.epsilon;
  bo.tol = opts.bisect_tol;
  bo.max_iters = opts.max_iters;
  const UpperBoundResult ub = UpperBoundAlpha(basis, k, bo);
  r.timings["upper"] = Seconds(t);
  r.alpha_upper = ub.alpha_upper;
  r.bisect_lo = ub.lo;
  r.trail = ub.trail;
  r.solver_iterations = ub.total_iterations;
  if (std::any_of(ub.trail.begin(), ub.trail.end(), [](const BisectionStep& s) {
        return s.status == DecisionStatus::kIterationLimit;
      })) {
    r.flags.push_back("iteration_limit_at_some_level");
  }

  if (ub.g_final && opts.randomized_samples > 0) {
    t = Clock::now();
    try {
      const PrimalCertificate cert = GammaFromDualGradient(*ub.g_final, basis, k);
      r.relaxation_lower = cert.objective();
      const RandomizedBound rb =
          RandomizedLowerBound(cert, basis, k, opts.randomized_samples,
                               opts.seed, DefaultTightnessEpsilon(cert));
      r.alpha_lower_randomized = rb.value;
      r.alpha_lower_randomized_theorem = rb.value_theorem;
      r.tightness = rb.tightness;
      r.randomized_samples = rb.samples;
      r.randomized_feasible = rb.feasible;
    } catch (const Error& e) {
      r.flags.push_back(std::string("randomization_failed: ") + e.what());
    }
    r.timings["randomized"] = Seconds(t);
  }
  if (opts.direct_samples > 0) {
    t = Clock::now();
    r.alpha_lower_direct =
        DirectNullspaceLowerBound(basis, k, opts.direct_samples, opts.seed);
    r.timings["direct"] = Seconds(t);
  }
  if (opts.lp_trials > 0) {
    t = Clock::now();
    r.alpha_lower_lp = LpLowerBound(basis, k, opts.lp_trials, opts.seed);
    r.timings["lp"] = Seconds(t);
  }
  if (opts.exact_budget > 0) {
    t = Clock::now();
    try {
      r.alpha_exact = ExactAlpha(inst, k, opts.exact_budget).alpha;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExceeded) throw;
      r.flags.push_back("exact_skipped_budget");
    }
    r.timings["exact"] = Seconds(t);
  }

  r.certificate = MakeRecoveryCertificate(r.alpha_upper);
  for (const auto& v : CheckReportInvariants(r)) {
    r.flags.push_back("invariant_violated: " + v);
  }
  return r;
}

std::vector<std::string> CheckReportInvariants(const BoundReport& r) {
  constexpr double kSlack = 1e-6;
  std::vector<std::string> out;
  const double lower = r.MaxLowerBound();
  if (lower > r.alpha_upper + kSlack) out.push_back("lower > upper");
  if (r.alpha_exact) {
    if (lower > *r.alpha_exact + kSlack) out.push_back("lower > exact");
    if (*r.alpha_exact > r.alpha_upper + kSlack) out.push_back("exact > upper");
  }
  if (r.relaxation_lower && *r.relaxation_lower > r.alpha_upper + kSlack) {
    out.push_back("relaxation value > upper");
  }
  if (r.l1_certified() && !r.nsp_holds()) {
    out.push_back("l1_certified without nsp_holds");
  }
  return out;
}

nlohmann::json ToJson(const TightnessReport& t) {
  return {{"delta", t.delta},   {"g", t.g},
          {"h", t.h},           {"mu", t.mu},
          {"sigma2", t.sigma2}, {"epsilon", t.epsilon},
          {"certified_lower", t.certified_lower}};
}

nlohmann::json ToJson(const BoundReport& r) {
  nlohmann::json trail = nlohmann::json::array();
  for (const auto& s : r.trail) {
    trail.push_back({{"level", s.level},
                     {"certified", s.certified},
                     {"status", ToString(s.status)},
                     {"lambda_min", s.lambda_min},
                     {"dual", s.dual},
                     {"iterations", s.iterations}});
  }
  nlohmann::json j = {
      {"instance_id", r.instance_id},
      {"m", r.m},
      {"n", r.n},
      {"k", r.k},
      {"ensemble", ToString(r.ensemble)},
      {"seeds", {{"matrix", r.matrix_seed}, {"sampling", r.sampling_seed}}},
      {"alpha_upper", r.alpha_upper},
      {"upper_method", "sdp-bisection"},
      {"bisect_lo", r.bisect_lo},
      {"alpha_lower_randomized", Opt(r.alpha_lower_randomized)},
      {"alpha_lower_randomized_theorem", Opt(r.alpha_lower_randomized_theorem)},
      {"alpha_lower_direct", Opt(r.alpha_lower_direct)},
      {"alpha_lower_lp", Opt(r.alpha_lower_lp)},
      {"alpha_exact", Opt(r.alpha_exact)},
      {"relaxation_lower", Opt(r.relaxation_lower)},
      {"nsp_holds", r.nsp_holds()},
      {"l1_certified", r.l1_certified()},
      {"nsp_constant", Opt(r.certificate.nsp_constant)},
      {"error_constant", Opt(r.certificate.error_constant)},
      {"tightness", r.tightness ? ToJson(*r.tightness) : nlohmann::json(nullptr)},
      {"randomized_samples", r.randomized_samples},
      {"randomized_feasible", r.randomized_feasible},
      {"solver_iterations", r.solver_iterations},
      {"trail", trail},
      {"timings", r.timings},
      {"flags", r.flags},
  };
  return j;
}

nlohmann::json ToJson(const DecodeResult& d) {
  std::vector<double> x(d.x_hat.data(), d.x_hat.data() + d.x_hat.size());
  return {{"x_hat", x},
          {"residual", d.residual},
          {"l1_norm", d.l1_norm},
          {"exact_recovery", Opt(d.exact_recovery)},
          {"sigma_k_of_ref", Opt(d.sigma_k_of_ref)},
          {"error_bound", Opt(d.error_bound)}};
}

nlohmann::json ToJson(const FeasibilityReport& f, double tol) {
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [name, value] : f.residuals) res[name] = value;
  return {{"residuals", res}, {"max_residual", f.Max()}, {"feasible", f.Feasible(tol)}, {"tolerance", tol}};
}

}  // namespace nspcert
