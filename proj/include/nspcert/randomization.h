#ifndef NSPCERT_RANDOMIZATION_H_
#define NSPCERT_RANDOMIZATION_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nspcert/sdp_relaxation.h"

namespace nspcert {

// Scaling constants for turning Gaussian samples of Gamma into feasible
// points, and the resulting tightness coefficient mu = g h.
struct TightnessReport {
  double delta = 0.0;
  double g = 0.0;
  double h = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double epsilon = 0.0;
  double certified_lower = 0.0;  // (Tr Z - epsilon) / mu
};

// N draws (x, y) ~ N(0, Gamma), one per column.
struct SampleBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  std::uint64_t seed = 0;
  int count() const { return static_cast<int>(x.cols()); }
};

// Draws through the eigen-factor of Gamma with negative eigenvalues clipped.
// Uses stream 1 of `seed`. Throws if lambda_min(Gamma) < -1e-4 max(1, |Gamma|).
SampleBatch SampleGamma(const PrimalCertificate& cert, int count,
                        std::uint64_t seed);

// ||Z||_F^2 + Tr(X Y).
double SecondMomentSigma(const PrimalCertificate& cert);

// Var(y^T x) = Tr(Z^2) + Tr(X Y). Never above SecondMomentSigma, with
// equality when Z is symmetric.
double ProductVariance(const PrimalCertificate& cert);

// delta = 3 + 3 sigma^2 / epsilon^2,
// g = (sqrt(2/pi) + sqrt(2 log delta)) sum_i sqrt(X_ii),
// h = max{(sqrt(2 log 2n) + sqrt(2 log delta)) max_i sqrt(Y_ii),
//         (sqrt(2/pi) + sqrt(2 log delta)) sum_i sqrt(Y_ii) / k}.
TightnessReport ScalingConstants(const PrimalCertificate& cert, int k,
                                 double epsilon);

// Default reporting precision: 0.1 Tr(Z), or 1e-3 when Tr(Z) is tiny.
double DefaultTightnessEpsilon(const PrimalCertificate& cert);

struct RandomizedBound {
  double value = 0.0;          // best of the rules below
  double value_theorem = 0.0;  // fixed (1/g, 1/h) scaling, infeasible dropped
  double value_normalized = 0.0;  // per-sample tightest feasible scaling
  double value_principal = 0.0;   // eigen-directions of Gamma, same scaling
  int feasible = 0;            // samples feasible under the fixed scaling
  int samples = 0;
  TightnessReport tightness;
  bool has_feasible() const { return feasible > 0; }
};

// Every sample x is first projected onto span(P). Two rules turn a sample
// into a feasible point of the max-max problem:
//  - fixed: scale by (1/g, 1/h) and keep the pair only if ||x||_1 <= 1,
//    ||y||_inf <= 1, ||y||_1 <= k;
//  - normalized: scale x by 1/||x||_1 and y by 1/max(||y||_inf, ||y||_1 / k),
//    which is always feasible.
// The columns of the eigen-factor of Gamma are also tried under the second
// rule. All of these are valid lower bounds on alpha_k; `value` is the best.
RandomizedBound RandomizedLowerBound(const PrimalCertificate& cert,
                                     const NullspaceBasis& basis, int k,
                                     int count, std::uint64_t seed,
                                     double epsilon);

// max over u ~ N(0, I_p), x = P u, of (sum of the k largest |x_i|) / ||x||_1.
// Uses stream 2 of `seed`.
double DirectNullspaceLowerBound(const NullspaceBasis& basis, int k, int count,
                                 std::uint64_t seed);

enum class NormKind { kL1, kLinf };

// Threshold of the Gaussian deviation bound for ||x||_1 or ||x||_inf with
// exceedance probability at most 1/delta.
double ConcentrationThreshold(const Eigen::MatrixXd& cov, double delta,
                              NormKind which);

// Fraction of N(0, cov) draws whose norm exceeds ConcentrationThreshold.
double ConcentrationCheck(const Eigen::MatrixXd& cov, double delta, int count,
                          std::uint64_t seed, NormKind which);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of E[(y^T x)^2] over SampleGamma draws.
MomentEstimate EmpiricalSecondMoment(const PrimalCertificate& cert, int count,
                                     std::uint64_t seed);

// Monte Carlo (1 - q)-quantile of y^T x; used to check the Cantelli bound.
double EmpiricalQuantile(const PrimalCertificate& cert, double level, int count,
                         std::uint64_t seed);

struct Histogram {
  std::vector<double> edges;  // size bins + 1
  std::vector<long> counts;   // size bins
  void WriteCsv(std::ostream& out, const char* series) const;
};

// Equal-width bins on [lo, hi]; values outside are clamped into the end bins.
Histogram MakeHistogram(const std::vector<double>& values, int bins, double lo,
                        double hi);

}  // namespace nspcert

#endif  // NSPCERT_RANDOMIZATION_H_
