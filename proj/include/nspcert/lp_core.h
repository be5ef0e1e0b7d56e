#ifndef NSPCERT_LP_CORE_H_
#define NSPCERT_LP_CORE_H_

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "nspcert/lp.h"
#include "nspcert/matrix_lab.h"

namespace nspcert {

struct DecodeResult {
  Eigen::VectorXd x_hat;
  double residual = 0.0;  // ||A x_hat - v||_inf
  double l1_norm = 0.0;
  // Filled only when a reference signal is given.
  std::optional<bool> exact_recovery;
  std::optional<double> sigma_k_of_ref;
  std::optional<double> error_bound;
};

// Relative l_inf error <= 1e-6 counts as exact recovery.
inline constexpr double kRecoveryTol = 1e-6;

bool IsRecovered(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_ref,
                 double tol = kRecoveryTol);

// Basis pursuit: argmin ||x||_1 s.t. A x = v.
DecodeResult DecodeL1(const ProblemInstance& inst, const Eigen::VectorXd& v,
                      double feas_tol = 1e-9);

// Same, plus recovery diagnostics against x_ref. When `alpha_upper` certifies
// order k (alpha < 1/2) the error bound 2C/(2-C) * sigma_k(x_ref) is attached.
DecodeResult DecodeL1(const ProblemInstance& inst, const Eigen::VectorXd& v,
                      const Eigen::VectorXd& x_ref, int k,
                      std::optional<double> alpha_upper,
                      double feas_tol = 1e-9);

// l1 norm of the n-k smallest-magnitude entries of x.
double SigmaK(const Eigen::VectorXd& x, int k);

// Sum of the k largest |x_i|.
double TopKMass(const Eigen::VectorXd& x, int k);

// max c^T x  s.t.  E x = 0, ||x||_1 <= 1, solved as an LP on x = x+ - x-.
// Returns the value and the maximizer.
std::pair<double, Eigen::VectorXd> MaxOverNullBall(const Eigen::MatrixXd& eq,
                                                   const Eigen::VectorXd& c,
                                                   double feas_tol = 1e-9);

struct ExactAlphaResult {
  double alpha = 0.0;
  Eigen::VectorXd witness;  // unit-l1 nullspace vector attaining alpha
  long long lps_solved = 0;
};

inline constexpr long long kDefaultEnumerationBudget = 100000;

// Exhaustive alpha_k over sign patterns c in {-1,0,1}^n with k nonzeros.
// Supports are visited in lexicographic order and signs in Gray-code order
// with the first sign pinned to +1 (c and -c give the same value). Stops
// early once the running maximum reaches 1.
ExactAlphaResult ExactAlpha(const ProblemInstance& inst, int k,
                            long long budget = kDefaultEnumerationBudget,
                            double feas_tol = 1e-9);

// Best LP value over `trials` random sign patterns with k nonzeros; a lower
// bound on alpha_k. Uses stream 3 of `seed`.
double LpLowerBound(const NullspaceBasis& basis, int k, int trials,
                    std::uint64_t seed, double feas_tol = 1e-9);

struct RecoveryCertificate {
  bool strong = false;                 // alpha < 1: nullspace property holds
  bool lp_decoder_certified = false;   // alpha < 1/2
  std::optional<double> nsp_constant;  // C_k = 1 / (1 - alpha)
  std::optional<double> error_constant;  // 2C / (2 - C) when C < 2
};

RecoveryCertificate MakeRecoveryCertificate(double alpha_upper);

// Orthonormal basis of range(P)^perp, as rows: E x = 0 iff x in span(P).
Eigen::MatrixXd ComplementRows(const NullspaceBasis& basis);

}  // namespace nspcert

#endif  // NSPCERT_LP_CORE_H_
