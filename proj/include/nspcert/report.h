#ifndef NSPCERT_REPORT_H_
#define NSPCERT_REPORT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nspcert/lp_core.h"
#include "nspcert/randomization.h"
#include "nspcert/smooth_solver.h"

namespace nspcert {

struct BoundOptions {
  double epsilon = 5e-3;
  double bisect_tol = 5e-3;
  int max_iters = 10000;
  int randomized_samples = 10000;
  int direct_samples = 10000;
  int lp_trials = 50;
  // Run the exhaustive oracle when its enumeration fits this budget; 0 skips.
  long long exact_budget = kDefaultEnumerationBudget;
  std::uint64_t seed = 1;
};

struct BoundReport {
  std::string instance_id;
  int m = 0;
  int n = 0;
  int k = 0;
  Ensemble ensemble = Ensemble::kFile;
  std::uint64_t matrix_seed = 0;
  std::uint64_t sampling_seed = 0;

  double alpha_upper = 1.0;
  double bisect_lo = 0.0;
  std::optional<double> alpha_lower_randomized;
  std::optional<double> alpha_lower_randomized_theorem;  // g/h scaling only
  std::optional<double> alpha_lower_direct;
  std::optional<double> alpha_lower_lp;
  std::optional<double> alpha_exact;
  std::optional<double> relaxation_lower;  // primal value of the recovered Gamma

  RecoveryCertificate certificate;
  std::optional<TightnessReport> tightness;
  int randomized_samples = 0;
  int randomized_feasible = 0;
  std::vector<BisectionStep> trail;
  int solver_iterations = 0;
  std::map<std::string, double> timings;
  std::vector<std::string> flags;

  bool nsp_holds() const { return certificate.strong; }
  bool l1_certified() const { return certificate.lp_decoder_certified; }
  double MaxLowerBound() const;
};

// Upper bound by bisection, lower bounds by randomization from the recovered
// Gamma, direct nullspace sampling and random-sign LPs, and the exact oracle
// when it fits the budget.
BoundReport ComputeBoundReport(const ProblemInstance& inst, int k,
                               const BoundOptions& opts);

// Ordering invariants: every lower bound <= alpha_exact <= alpha_upper
// (1e-6 slack) and l1_certified implies nsp_holds. Returns the violations.
std::vector<std::string> CheckReportInvariants(const BoundReport& report);

nlohmann::json ToJson(const BoundReport& report);
nlohmann::json ToJson(const TightnessReport& t);
nlohmann::json ToJson(const DecodeResult& d);
nlohmann::json ToJson(const FeasibilityReport& f, double tol = 1e-9);

}  // namespace nspcert

#endif  // NSPCERT_REPORT_H_
