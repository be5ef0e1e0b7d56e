#include "nspcert/lp_core.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nspcert/rng.h"

namespace nspcert {
namespace {

void CheckOrder(int k, int n) {
  if (k < 0 || k > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "order k=" + std::to_string(k) + " out of range [0, " +
                    std::to_string(n) + "]");
  }
}

// Magnitudes sorted ascending by (|x_i|, i).
std::vector<double> SortedMagnitudes(const Eigen::VectorXd& x) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(x(a)) < std::abs(x(b));
  });
  std::vector<double> mags(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) mags[i] = std::abs(x(idx[i]));
  return mags;
}

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double SigmaK(const Eigen::VectorXd& x, int k) {
  const int n = static_cast<int>(x.size());
  CheckOrder(k, n);
  const auto mags = SortedMagnitudes(x);
  double s = 0.0;
  for (int i = 0; i < n - k; ++i) s += mags[i];
  return s;
}

double TopKMass(const Eigen::VectorXd& x, int k) {
  const int n = static_cast<int>(x.size());
  CheckOrder(k, n);
  const auto mags = SortedMagnitudes(x);
  double s = 0.0;
  for (int i = n - k; i < n; ++i) s += mags[i];
  return s;
}

bool IsRecovered(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_ref,
                 double tol) {
  const double scale = std::max(x_ref.lpNorm<Eigen::Infinity>(), 1e-300);
  return (x_hat - x_ref).lpNorm<Eigen::Infinity>() <= tol * scale;
}

DecodeResult DecodeL1(const ProblemInstance& inst, const Eigen::VectorXd& v,
                      double feas_tol) {
  const int m = inst.rows();
  const int n = inst.cols();
  if (v.size() != m) {
    throw Error(ErrorCode::kInvalidArgument,
                "measurement has length " + std::to_string(v.size()) +
                    ", expected " + std::to_string(m));
  }
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Ones(2 * n);
  lp.a_eq.resize(m, 2 * n);
  lp.a_eq << inst.a, -inst.a;
  lp.b_eq = v;
  lp.a_ub.resize(0, 2 * n);
  lp.b_ub.resize(0);
  const LpSolution sol = SolveLp(lp, feas_tol);
  DecodeResult res;
  res.x_hat = sol.x.head(n) - sol.x.tail(n);
  res.residual = (inst.a * res.x_hat - v).lpNorm<Eigen::Infinity>();
  res.l1_norm = res.x_hat.lpNorm<1>();
  return res;
}

DecodeResult DecodeL1(const ProblemInstance& inst, const Eigen::VectorXd& v,
                      const Eigen::VectorXd& x_ref, int k,
                      std::optional<double> alpha_upper, double feas_tol) {
  DecodeResult res = DecodeL1(inst, v, feas_tol);
  if (x_ref.size() != inst.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "reference signal has wrong size");
  }
  res.exact_recovery = IsRecovered(res.x_hat, x_ref);
  res.sigma_k_of_ref = SigmaK(x_ref, k);
  if (alpha_upper) {
    const auto cert = MakeRecoveryCertificate(*alpha_upper);
    if (cert.error_constant) {
      res.error_bound = *cert.error_constant * *res.sigma_k_of_ref;
    }
  }
  return res;
}

std::pair<double, Eigen::VectorXd> MaxOverNullBall(const Eigen::MatrixXd& eq,
                                                   const Eigen::VectorXd& c,
                                                   double feas_tol) {
  const Eigen::Index n = c.size();
  LinearProgram lp;
  lp.sense = Sense::kMaximize;
  lp.c.resize(2 * n);
  lp.c << c, -c;
  lp.a_eq.resize(eq.rows(), 2 * n);
  if (eq.rows() > 0) lp.a_eq << eq, -eq;
  lp.b_eq = Eigen::VectorXd::Zero(eq.rows());
  lp.a_ub = Eigen::MatrixXd::Ones(1, 2 * n);
  lp.b_ub = Eigen::VectorXd::Ones(1);
  const LpSolution sol = SolveLp(lp, feas_tol);
  Eigen::VectorXd x = sol.x.head(n) - sol.x.tail(n);
  return {std::max(sol.objective, 0.0), std::move(x)};
}

ExactAlphaResult ExactAlpha(const ProblemInstance& inst, int k, long long budget,
                            double feas_tol) {
  ValidateInstance(inst);
  const int n = inst.cols();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "order k=" + std::to_string(k) + " out of range [1, " +
                    std::to_string(n) + "]");
  }
  const double work = Binomial(n, k) * std::ldexp(1.0, k);
  if (work > static_cast<double>(budget)) {
    throw Error(ErrorCode::kBudgetExceeded,
                "enumeration needs " + std::to_string(work) +
                    " sign patterns, budget is " + std::to_string(budget));
  }

  ExactAlphaResult best;
  best.witness = Eigen::VectorXd::Zero(n);
  std::vector<int> support(k);
  std::iota(support.begin(), support.end(), 0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const long long sign_patterns = 1LL << (k - 1);

  for (;;) {
    c.setZero();
    for (int i : support) c(i) = 1.0;
    for (long long g = 0; g < sign_patterns; ++g) {
      if (g > 0) {
        // Gray code: flip the bit that changes between g-1 and g.
        const int bit = std::countr_zero(static_cast<unsigned long long>(g));
        c(support[bit + 1]) *= -1.0;
      }
      auto [value, x] = MaxOverNullBall(inst.a, c, feas_tol);
      ++best.lps_solved;
      if (value > best.alpha) {
        best.alpha = value;
        best.witness = x;
      }
      if (best.alpha >= 1.0 - feas_tol) {
        best.alpha = std::min(best.alpha, 1.0);
        return best;
      }
    }
    // Next k-subset in lexicographic order.
    int i = k - 1;
    while (i >= 0 && support[i] == n - k + i) --i;
    if (i < 0) break;
    ++support[i];
    for (int j = i + 1; j < k; ++j) support[j] = support[j - 1] + 1;
  }
  return best;
}

Eigen::MatrixXd ComplementRows(const NullspaceBasis& basis) {
  const int n = basis.n();
  const int p = basis.dim();
  if (p == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.p);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - p).transpose();
}

double LpLowerBound(const NullspaceBasis& basis, int k, int trials,
                    std::uint64_t seed, double feas_tol) {
  const int n = basis.n();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument, "order k out of range");
  }
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  const Eigen::MatrixXd eq = ComplementRows(basis);
  Rng rng(seed, 3);
  std::vector<int> perm(n);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(rng.Below(n - i));
      std::swap(perm[i], perm[j]);
      c(perm[i]) = (rng.NextU64() >> 63) ? 1.0 : -1.0;
    }
    best = std::max(best, MaxOverNullBall(eq, c, feas_tol).first);
  }
  return best;
}

RecoveryCertificate MakeRecoveryCertificate(double alpha_upper) {
  RecoveryCertificate cert;
  cert.strong = alpha_upper < 1.0;
  cert.lp_decoder_certified = alpha_upper < 0.5;
  if (cert.strong) {
    const double c = 1.0 / (1.0 - alpha_upper);
    cert.nsp_constant = c;
    if (c < 2.0) cert.error_constant = 2.0 * c / (2.0 - c);
  }
  return cert;
}

}  // namespace nspcert
