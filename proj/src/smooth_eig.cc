#include <cmath>

#include <Eigen/Eigenvalues>

#include "nspcert/smooth_solver.h"

namespace nspcert {

SmoothEigResult SmoothEig(const Eigen::MatrixXd& m, double mu) {
  if (!(mu > 0)) throw Error(ErrorCode::kInvalidArgument, "mu must be > 0");
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "SmoothEig needs a square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "eigendecomposition failed");
  }
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::Index d = lam.size();
  const double lmax = lam(d - 1);
  // exp((lambda_i - lambda_max) / mu) <= 1, with the top term exactly 1.
  const Eigen::VectorXd w = ((lam.array() - lmax) / mu).exp().matrix();
  const double s = w.sum();
  SmoothEigResult r;
  r.lambda_max = lmax;
  r.lambda_min = lam(0);
  r.value = lmax + mu * std::log(s);
  const Eigen::MatrixXd& v = es.eigenvectors();
  r.gradient = v * (w / s).asDiagonal() * v.transpose();
  return r;
}

Eigen::MatrixXd AssembleArg(const DualPoint& u, const NullspaceBasis& basis) {
  return -DualLmi(u, basis);
}

SmoothedObjective EvaluateObjective(const DualPoint& u,
                                    const NullspaceBasis& basis, double mu) {
  const SmoothEigResult s = SmoothEig(AssembleArg(u, basis), mu);
  const Eigen::MatrixXd& p = basis.p;
  const int n = basis.n();
  const int d = basis.dim();
  const Eigen::MatrixXd& e = s.gradient;
  SmoothedObjective out;
  out.value = -s.value;
  out.lambda_min = -s.lambda_max;
  out.gradient.u1 = p * e.topLeftCorner(d, d) * p.transpose();
  out.gradient.u1 = 0.5 * (out.gradient.u1 + out.gradient.u1.transpose());
  out.gradient.u2 = 0.5 * (e.bottomRightCorner(n, n) +
                           e.bottomRightCorner(n, n).transpose());
  out.gradient.u3 = out.gradient.u2;
  out.gradient.u4 = -p * e.topRightCorner(d, n);
  out.gradient.alpha_bar = u.alpha_bar;
  out.g = e;
  return out;
}

}  // namespace nspcert
