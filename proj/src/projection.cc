#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nspcert/smooth_solver.h"

namespace nspcert {
namespace {

// Entry magnitudes of one block, sorted descending, with prefix sums.
class Magnitudes {
 public:
  explicit Magnitudes(const Eigen::MatrixXd& m)
      : a_(m.data(), m.data() + m.size()), prefix_(m.size() + 1, 0.0) {
    for (double& v : a_) v = std::abs(v);
    std::sort(a_.begin(), a_.end(), std::greater<>());
    for (std::size_t i = 0; i < a_.size(); ++i) prefix_[i + 1] = prefix_[i] + a_[i];
  }

  double L1() const { return prefix_.back(); }
  double Max() const { return a_.empty() ? 0.0 : a_.front(); }

  // Soft-threshold mass: sum max(a_i - lambda, 0).
  double SoftMass(double lambda) const {
    // First entry strictly below lambda.
    const auto it = std::upper_bound(a_.begin(), a_.end(), lambda,
                                     std::greater<>());
    const auto count = static_cast<std::size_t>(it - a_.begin());
    return prefix_[count] - count * lambda;
  }

  // Clipping level tau >= 0 with sum max(a_i - tau, 0) = s; 0 when the l1
  // mass is <= s (the prox of s ||.||_inf then returns 0).
  double ClipLevel(double s) const {
    if (s <= 0) return Max();
    if (s >= L1()) return 0.0;
    // Largest j with a_j > (S_j - s) / j; the predicate is monotone in j.
    std::size_t lo = 1;
    std::size_t hi = a_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (a_[mid - 1] > (prefix_[mid] - s) / mid) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return std::max((prefix_[lo] - s) / lo, 0.0);
  }

 private:
  std::vector<double> a_;
  std::vector<double> prefix_;
};

Eigen::MatrixXd Clip(const Eigen::MatrixXd& v, double tau) {
  return v.cwiseMax(-tau).cwiseMin(tau);
}

Eigen::MatrixXd Soft(const Eigen::MatrixXd& v, double lambda) {
  return v.unaryExpr([lambda](double x) {
    return x > lambda ? x - lambda : (x < -lambda ? x + lambda : 0.0);
  });
}

}  // namespace

Projection ProjectBall(const DualPoint& v, int k, double alpha_bar,
                       double proj_tol) {
  if (!(alpha_bar > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_bar must be > 0");
  }
  const double kk = static_cast<double>(k);
  const double w2 = kk * kk;
  const double w4 = kk;
  if (MixedNorm(v, k) <= alpha_bar) return {v, 0.0};

  const Magnitudes m1(v.u1), m2(v.u2), m3(v.u3), m4(v.u4);
  // Norm of the penalized minimizer as a function of the multiplier.
  auto norm_at = [&](double lambda) {
    return m1.ClipLevel(lambda) + w2 * m2.ClipLevel(lambda * w2) +
           m3.SoftMass(lambda) + w4 * m4.ClipLevel(lambda * w4);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (norm_at(hi) > alpha_bar) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > proj_tol * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(mid) > alpha_bar) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Projection out;
  out.multiplier = hi;
  out.point.u1 = Clip(v.u1, m1.ClipLevel(hi));
  out.point.u2 = Clip(v.u2, m2.ClipLevel(hi * w2));
  out.point.u3 = Soft(v.u3, hi);
  out.point.u4 = Clip(v.u4, m4.ClipLevel(hi * w4));
  out.point.alpha_bar = alpha_bar;
  return out;
}

}  // namespace nspcert
