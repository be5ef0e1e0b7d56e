#ifndef NSPCERT_SMOOTH_SOLVER_H_
#define NSPCERT_SMOOTH_SOLVER_H_

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nspcert/sdp_relaxation.h"

namespace nspcert {

struct SmoothEigResult {
  double value = 0.0;        // mu log Tr exp(M / mu)
  Eigen::MatrixXd gradient;  // exp(M / mu) / Tr exp(M / mu)
  double lambda_max = 0.0;
  double lambda_min = 0.0;
};

// Shift-stable evaluation through a symmetric eigendecomposition.
// lambda_max(M) <= value <= lambda_max(M) + mu log d.
SmoothEigResult SmoothEig(const Eigen::MatrixXd& m, double mu);

// The negated kernel LMI, -DualLmi(U): smoothing its largest eigenvalue gives
// a lower model of lambda_min(DualLmi(U)).
Eigen::MatrixXd AssembleArg(const DualPoint& u, const NullspaceBasis& basis);

// f(U) = -f_mu(AssembleArg(U)) and its gradient in the four blocks, plus the
// trace-one PSD matrix G = grad f_mu, which is feasible for the dual of the
// decision problem.
struct SmoothedObjective {
  double value = 0.0;
  double lambda_min = 0.0;  // exact lambda_min(DualLmi(U))
  DualPoint gradient;
  Eigen::MatrixXd g;
};

SmoothedObjective EvaluateObjective(const DualPoint& u,
                                    const NullspaceBasis& basis, double mu);

// ||U1||_inf + k^2 ||U2||_inf + ||U3||_1 + k ||U4||_inf, the ball norm.
inline double MixedNorm(const DualPoint& u, int k) { return DualObjective(u, k); }

struct Projection {
  DualPoint point;
  double multiplier = 0.0;  // lambda of the penalized problem, 0 if inside
};

// Euclidean projection onto {U : MixedNorm(U, k) <= alpha_bar}. Binary search
// on the multiplier of the norm constraint; each block is the prox of a
// scaled entrywise l_inf norm (clipping) or l1 norm (soft thresholding).
Projection ProjectBall(const DualPoint& v, int k, double alpha_bar,
                       double proj_tol = 1e-10);

// Value of the dual of the decision problem at a trace-one PSD G:
//   alpha_bar max{||P G11 P^T||_1, ||G22||_1 / k^2, ||G22||_inf,
//                 ||P G12||_1 / k} - Tr(P G12).
// Upper-bounds max_{U in ball} lambda_min(DualLmi(U)).
double DecisionDualValue(const Eigen::MatrixXd& g, const SdpProblem& problem);

// DecisionDualValue(G) minus the smoothed primal value f(U), clipped at 0.
double DualGap(const DualPoint& u, const Eigen::MatrixXd& g,
               const SdpProblem& problem, double mu);

// A trace-one PSD G also yields a primal lower bound on the relaxation value:
// Tr(P G12) / max{...}, the objective of GammaFromDualGradient before the
// congruence refinement. Returns 0 when the norms vanish.
double PrimalValueFromG(const Eigen::MatrixXd& g, const NullspaceBasis& basis,
                        int k);

struct SmoothConfig {
  double epsilon = 2e-3;
  double mu = 0.0;         // epsilon / (2 log d)
  double lipschitz = 0.0;  // 8 log d / epsilon
  int max_iters = 20000;
  int gap_check_period = 10;
  double proj_tol = 1e-10;
  // Stop as soon as an iterate has lambda_min(DualLmi) > 0, or as soon as the
  // dual value drops below 0 (level refuted).
  bool stop_on_decision = true;
  // Start point and prox center; projected onto the ball first. Zero if unset.
  std::optional<DualPoint> warm_start;

  static SmoothConfig For(const SdpProblem& problem, double epsilon);
  void Validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double primal = 0.0;  // best smoothed value f so far
  double dual = 0.0;    // best dual value so far
  double gap = 0.0;
  double seconds = 0.0;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  void WriteCsv(std::ostream& out) const;
};

enum class DecisionStatus { kCertified, kRefuted, kGapClosed, kIterationLimit };

const char* ToString(DecisionStatus s);

struct DecisionResult {
  DualPoint u_best;                // iterate with the largest exact lambda_min
  double f_best = 0.0;             // best smoothed objective
  double lambda_min_best = 0.0;    // lambda_min(DualLmi(u_best))
  Eigen::MatrixXd g_last;          // final gradient (trace-one PSD)
  Eigen::MatrixXd g_avg;           // weighted average of gradients
  double dual_best = 0.0;          // smallest dual value observed
  DecisionStatus status = DecisionStatus::kIterationLimit;
  int iterations = 0;
  SolveTrace trace;

  // lambda_min(DualLmi(u_best)) > 0: the level bounds the relaxation value.
  bool certified() const { return lambda_min_best > 0.0; }
};

// Nesterov's smooth maximization of f over the mixed-norm ball, from U = 0
// or from the projected warm start.
DecisionResult NesterovMaximize(const SdpProblem& problem,
                                const SmoothConfig& cfg);

struct BisectionStep {
  double level = 0.0;
  bool certified = false;
  DecisionStatus status = DecisionStatus::kIterationLimit;
  double lambda_min = 0.0;
  double dual = 0.0;
  int iterations = 0;
};

struct UpperBoundResult {
  double alpha_upper = 1.0;  // valid upper bound on alpha_k (and <= 1)
  double lo = 0.0;           // bisection floor at termination
  std::vector<BisectionStep> trail;
  // Best certifying dual point, and the G with the largest primal value.
  std::optional<DualPoint> u_certificate;
  std::optional<Eigen::MatrixXd> g_final;
  int total_iterations = 0;
};

struct BisectionOptions {
  double epsilon = 5e-3;
  double lo = 0.0;
  double hi = 1.0;
  double tol = 5e-3;
  int max_iters = 10000;
  // Solve the level hi first, then start each level from the most recent
  // certifying point.
  bool warm_start = true;
};

// Bisection on alpha_bar. Certified levels lower hi; any other outcome
// raises lo. Every dual iterate also contributes its repaired dual bound to
// hi, and every gradient G its primal value to lo.
UpperBoundResult UpperBoundAlpha(const NullspaceBasis& basis, int k,
                                 const BisectionOptions& opts = {});

}  // namespace nspcert

#endif  // NSPCERT_SMOOTH_SOLVER_H_
