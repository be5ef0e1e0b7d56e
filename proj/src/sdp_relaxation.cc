#include "nspcert/sdp_relaxation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace nspcert {

Eigen::MatrixXd PrimalCertificate::Gamma() const {
  const int n = this->n();
  Eigen::MatrixXd g(2 * n, 2 * n);
  g << x, z.transpose(), z, y;
  return g;
}

DualPoint DualPoint::Zero(int n, double alpha_bar) {
  DualPoint u;
  u.u1 = Eigen::MatrixXd::Zero(n, n);
  u.u2 = Eigen::MatrixXd::Zero(n, n);
  u.u3 = Eigen::MatrixXd::Zero(n, n);
  u.u4 = Eigen::MatrixXd::Zero(n, n);
  u.alpha_bar = alpha_bar;
  return u;
}

DualPoint& DualPoint::operator+=(const DualPoint& o) {
  u1 += o.u1;
  u2 += o.u2;
  u3 += o.u3;
  u4 += o.u4;
  return *this;
}

DualPoint& DualPoint::operator*=(double s) {
  u1 *= s;
  u2 *= s;
  u3 *= s;
  u4 *= s;
  return *this;
}

double DualPoint::SquaredNorm() const {
  return u1.squaredNorm() + u2.squaredNorm() + u3.squaredNorm() +
         u4.squaredNorm();
}

double DualPoint::Dot(const DualPoint& o) const {
  return u1.cwiseProduct(o.u1).sum() + u2.cwiseProduct(o.u2).sum() +
         u3.cwiseProduct(o.u3).sum() + u4.cwiseProduct(o.u4).sum();
}

DualPoint operator+(DualPoint a, const DualPoint& b) { return a += b; }
DualPoint operator-(DualPoint a, const DualPoint& b) {
  a.u1 -= b.u1;
  a.u2 -= b.u2;
  a.u3 -= b.u3;
  a.u4 -= b.u4;
  return a;
}
DualPoint operator*(double s, DualPoint a) { return a *= s; }

double EntryL1(const Eigen::MatrixXd& m) { return m.cwiseAbs().sum(); }
double EntryMax(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double DualObjective(const DualPoint& u, int k) {
  const double kk = static_cast<double>(k);
  return EntryMax(u.u1) + kk * kk * EntryMax(u.u2) + EntryL1(u.u3) +
         kk * EntryMax(u.u4);
}

Eigen::MatrixXd DualLmi(const DualPoint& u, const NullspaceBasis& basis) {
  const Eigen::MatrixXd& p = basis.p;
  const int n = basis.n();
  const int d = basis.dim();
  if (u.n() != n) {
    throw Error(ErrorCode::kInvalidArgument, "dual point dimension mismatch");
  }
  Eigen::MatrixXd m(d + n, d + n);
  m.topLeftCorner(d, d) = p.transpose() * u.u1 * p;
  const Eigen::MatrixXd off =
      -0.5 * p.transpose() * (Eigen::MatrixXd::Identity(n, n) + u.u4);
  m.topRightCorner(d, n) = off;
  m.bottomLeftCorner(n, d) = off.transpose();
  m.bottomRightCorner(n, n) = u.u2 + u.u3;
  return m;
}

namespace {

double ShiftRepair(const DualPoint& u, const NullspaceBasis& basis, int k) {
  const Eigen::MatrixXd m = DualLmi(u, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double kk = static_cast<double>(k);
  return DualObjective(u, k) + (1.0 + kk * kk) * std::max(0.0, -lmin);
}

// The congruence diag(s I, I / s) leaves the off-diagonal block alone, so
// U1 -> s^2 U1, (U2, U3) -> (U2, U3) / s^2 keeps the LMI sign pattern.
DualPoint Balance(const DualPoint& u, int k) {
  const double a = EntryMax(u.u1);
  const double b = static_cast<double>(k) * k * EntryMax(u.u2) + EntryL1(u.u3);
  if (!(a > 0) || !(b > 0)) return u;
  const double s2 = std::sqrt(b / a);
  DualPoint out = u;
  out.u1 *= s2;
  out.u2 /= s2;
  out.u3 /= s2;
  return out;
}

}  // namespace

double RepairedDualBound(const DualPoint& u, const NullspaceBasis& basis,
                         int k) {
  const Eigen::MatrixXd m = DualLmi(u, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double kk = static_cast<double>(k);
  double best = DualObjective(u, k) + (1.0 + kk * kk) * std::max(0.0, -lam(0));
  if (lam(0) >= 0) {
    return std::min(best, ShiftRepair(Balance(u, k), basis, k));
  }
  // Each negative direction v = (a, b) satisfies v v^T <= 2 diag(a a^T, b b^T),
  // so lifting those pieces into U1 and into U2 or U3 removes it.
  const int d = basis.dim();
  const int n = basis.n();
  Eigen::MatrixXd top = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd bottom = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < lam.size() && lam(i) < 0; ++i) {
    const Eigen::VectorXd pa = basis.p * es.eigenvectors().col(i).head(d);
    const Eigen::VectorXd b = es.eigenvectors().col(i).tail(n);
    top.noalias() += (-2.0 * lam(i)) * pa * pa.transpose();
    bottom.noalias() += (-2.0 * lam(i)) * b * b.transpose();
  }
  for (int target = 0; target < 2; ++target) {
    DualPoint v = u;
    v.u1 += top;
    (target == 0 ? v.u2 : v.u3) += bottom;
    best = std::min({best, ShiftRepair(v, basis, k),
                     ShiftRepair(Balance(v, k), basis, k)});
  }
  return best;
}

const char* ToString(SdpForm form) {
  switch (form) {
    case SdpForm::kPrimalBasic: return "primal_basic";
    case SdpForm::kPrimalColumnwise: return "primal_columnwise";
    case SdpForm::kDualKernel: return "dual_kernel";
    case SdpForm::kDecision: return "decision";
  }
  return "decision";
}

std::optional<SdpForm> ParseSdpForm(const std::string& name) {
  if (name == "primal_basic") return SdpForm::kPrimalBasic;
  if (name == "primal_columnwise") return SdpForm::kPrimalColumnwise;
  if (name == "dual_kernel") return SdpForm::kDualKernel;
  if (name == "decision") return SdpForm::kDecision;
  return std::nullopt;
}

std::vector<std::string> SdpProblem::ConstraintFamilies() const {
  switch (form) {
    case SdpForm::kPrimalBasic:
      return {"nullspace", "x_l1", "y_max", "y_l1", "z_l1", "psd"};
    case SdpForm::kPrimalColumnwise:
      return {"nullspace", "x_l1",      "y_colsum", "y_entry", "t_sum",
              "t_cap",     "t_nonneg",  "z_colsum", "z_entry", "r_sum",
              "r_nonneg",  "psd"};
    case SdpForm::kDualKernel:
      return {"lmi_psd"};
    case SdpForm::kDecision:
      return {"mixed_norm_ball"};
  }
  return {};
}

SdpProblem BuildProblem(const NullspaceBasis& basis, int k, SdpForm form,
                        std::optional<double> alpha_bar) {
  const int n = basis.n();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "order k=" + std::to_string(k) + " out of range [1, " +
                    std::to_string(n) + "]");
  }
  if (form == SdpForm::kDecision) {
    if (!alpha_bar || !(*alpha_bar > 0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "decision form needs a target level alpha_bar > 0");
    }
  } else if (alpha_bar) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha_bar is only meaningful for the decision form");
  }
  if (basis.p.rows() != n) {
    throw Error(ErrorCode::kInvalidArgument, "malformed nullspace basis");
  }
  return SdpProblem{form, basis, k, alpha_bar};
}

double FeasibilityReport::Max() const {
  double m = 0.0;
  for (const auto& [name, v] : residuals) m = std::max(m, v);
  return m;
}

double FeasibilityReport::Get(const std::string& family) const {
  for (const auto& [name, v] : residuals)
    if (name == family) return v;
  throw Error(ErrorCode::kInvalidArgument, "no constraint family " + family);
}

namespace {

double Pos(double v) { return std::max(v, 0.0); }

double MinEigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

FeasibilityReport CheckPrimalFeasibility(const PrimalCertificate& cert,
                                         const ProblemInstance& inst,
                                         SdpForm form) {
  const int n = inst.cols();
  if (cert.x.rows() != n || cert.x.cols() != n || cert.y.rows() != n ||
      cert.y.cols() != n || cert.z.rows() != n || cert.z.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "certificate dimension mismatch");
  }
  const double k = cert.k;
  FeasibilityReport rep;
  auto add = [&](const char* name, double v) {
    rep.residuals.emplace_back(name, Pos(v));
  };
  add("nullspace", (inst.a * cert.x * inst.a.transpose()).norm());
  add("x_l1", EntryL1(cert.x) - 1.0);
  if (form == SdpForm::kPrimalBasic) {
    add("y_max", EntryMax(cert.y) - 1.0);
    add("y_l1", EntryL1(cert.y) - k * k);
    add("z_l1", EntryL1(cert.z) - k);
  } else if (form == SdpForm::kPrimalColumnwise) {
    if (!cert.r || !cert.t || cert.r->size() != n || cert.t->size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "columnwise form needs column budgets r and t of size n");
    }
    const Eigen::VectorXd& r = *cert.r;
    const Eigen::VectorXd& t = *cert.t;
    const Eigen::MatrixXd ya = cert.y.cwiseAbs();
    const Eigen::MatrixXd za = cert.z.cwiseAbs();
    double y_col = 0, y_ent = 0, z_col = 0, z_ent = 0;
    for (int j = 0; j < n; ++j) {
      y_col = std::max(y_col, ya.col(j).sum() - k * t(j));
      y_ent = std::max(y_ent, ya.col(j).maxCoeff() - t(j));
      z_col = std::max(z_col, za.col(j).sum() - k * r(j));
      z_ent = std::max(z_ent, za.col(j).maxCoeff() - r(j));
    }
    add("y_colsum", y_col);
    add("y_entry", y_ent);
    add("t_sum", t.sum() - k);
    add("t_cap", t.maxCoeff() - 1.0);
    add("t_nonneg", -t.minCoeff());
    add("z_colsum", z_col);
    add("z_entry", z_ent);
    add("r_sum", r.sum() - 1.0);
    add("r_nonneg", -r.minCoeff());
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "feasibility check needs a primal form");
  }
  add("symmetry", std::max((cert.x - cert.x.transpose()).cwiseAbs().maxCoeff(),
                           (cert.y - cert.y.transpose()).cwiseAbs().maxCoeff()));
  const Eigen::MatrixXd gamma = cert.Gamma();
  add("psd", -MinEigenvalue(0.5 * (gamma + gamma.transpose())));
  return rep;
}

PrimalCertificate CounterexamplePoint(int m, const NullspaceBasis& basis) {
  const int n = 2 * m;
  if (m <= 0) throw Error(ErrorCode::kInvalidArgument, "m must be positive");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (k * k != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "n = 2m = " + std::to_string(n) + " is not a perfect square");
  }
  if (basis.n() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "basis has n=" + std::to_string(basis.n()) + ", expected " +
                    std::to_string(n));
  }
  if (basis.dim() < m) {
    throw Error(ErrorCode::kInvalidArgument,
                "nullspace dimension " + std::to_string(basis.dim()) +
                    " is smaller than m=" + std::to_string(m));
  }
  const Eigen::MatrixXd p0 = basis.p.leftCols(m);
  const Eigen::MatrixXd q = p0 * p0.transpose();
  const double dn = n;
  const double sn = std::sqrt(dn);
  PrimalCertificate cert;
  cert.k = k;
  cert.x = q / (dn * std::sqrt(static_cast<double>(m)));
  cert.y = q / sn;
  cert.z = q / dn;
  cert.t = Eigen::VectorXd::Constant(n, 1.0 / sn);
  cert.r = Eigen::VectorXd::Constant(n, 1.0 / dn);
  return cert;
}

PrimalCertificate GammaFromDualGradient(const Eigen::MatrixXd& g,
                                        const NullspaceBasis& basis, int k) {
  const int n = basis.n();
  const int d = basis.dim();
  if (g.rows() != n + d || g.cols() != n + d) {
    throw Error(ErrorCode::kInvalidArgument,
                "G must be (n+p)x(n+p) = " + std::to_string(n + d));
  }
  const Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gs);
  const double scale = std::max(1.0, gs.cwiseAbs().maxCoeff());
  if (std::abs(gs.trace() - 1.0) > 1e-8 ||
      es.eigenvalues()(0) < -1e-8 * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                "G must be trace-one and positive semidefinite");
  }
  // Clip tiny negative eigenvalues so the lift is exactly PSD.
  const Eigen::MatrixXd gp = es.eigenvectors() *
                             es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                             es.eigenvectors().transpose();

  const Eigen::MatrixXd& p = basis.p;
  Eigen::MatrixXd x0 = p * gp.topLeftCorner(d, d) * p.transpose();
  Eigen::MatrixXd y0 = gp.bottomRightCorner(n, n);
  Eigen::MatrixXd z0 = (p * gp.topRightCorner(d, n)).transpose();
  x0 = 0.5 * (x0 + x0.transpose());
  y0 = 0.5 * (y0 + y0.transpose());
  // Congruence with diag(I, -I) keeps Gamma PSD and flips the sign of Z.
  if (z0.trace() < 0) z0 = -z0;

  const double kk = k;
  const double x_l1 = EntryL1(x0);
  const double y_max = EntryMax(y0);
  const double y_l1 = EntryL1(y0);
  const double z_l1 = EntryL1(z0);
  double a = x_l1 > 0 ? 1.0 / x_l1 : 0.0;
  double b = y_l1 > 0 ? std::min(1.0 / y_max, kk * kk / y_l1) : 0.0;
  const double s = std::sqrt(a * b);
  if (z_l1 > 0 && s * z_l1 > kk) {
    const double c = kk / (s * z_l1);
    a *= c;
    b *= c;
  }
  PrimalCertificate cert;
  cert.k = k;
  cert.x = a * x0;
  cert.y = b * y0;
  cert.z = std::sqrt(a * b) * z0;
  return cert;
}

}  // namespace nspcert
