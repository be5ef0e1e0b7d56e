#ifndef NSPCERT_SDP_RELAXATION_H_
#define NSPCERT_SDP_RELAXATION_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nspcert/matrix_lab.h"

namespace nspcert {

// Blocks of Gamma = [[X, Z^T], [Z, Y]] for the lifted problem, optionally with
// the column budgets (r, t) of the columnwise relaxation.
struct PrimalCertificate {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::MatrixXd z;
  std::optional<Eigen::VectorXd> r;
  std::optional<Eigen::VectorXd> t;
  int k = 1;

  int n() const { return static_cast<int>(x.rows()); }
  double objective() const { return z.trace(); }
  Eigen::MatrixXd Gamma() const;
};

// Dual variables of the kernel-form dual: U1, U2, U3 symmetric, U4 square.
struct DualPoint {
  Eigen::MatrixXd u1;
  Eigen::MatrixXd u2;
  Eigen::MatrixXd u3;
  Eigen::MatrixXd u4;
  double alpha_bar = 0.0;

  static DualPoint Zero(int n, double alpha_bar = 0.0);
  int n() const { return static_cast<int>(u1.rows()); }

  DualPoint& operator+=(const DualPoint& o);
  DualPoint& operator*=(double s);
  double SquaredNorm() const;
  double Dot(const DualPoint& o) const;
};

DualPoint operator+(DualPoint a, const DualPoint& b);
DualPoint operator-(DualPoint a, const DualPoint& b);
DualPoint operator*(double s, DualPoint a);

// Componentwise matrix norms.
double EntryL1(const Eigen::MatrixXd& m);
double EntryMax(const Eigen::MatrixXd& m);

// ||U1||_inf + k^2 ||U2||_inf + ||U3||_1 + k ||U4||_inf.
double DualObjective(const DualPoint& u, int k);

// The LMI matrix of the kernel-form dual, ordered (p-block, n-block):
// [[P^T U1 P, -1/2 P^T (I + U4)], [-1/2 (I + U4^T) P, U2 + U3]].
Eigen::MatrixXd DualLmi(const DualPoint& u, const NullspaceBasis& basis);

// Any U with DualLmi(U) >= 0 bounds alpha_k by DualObjective(U, k). Adding
// s I to U1 and s I to U2 shifts every eigenvalue up by s, so
//   DualObjective(U) + (1 + k^2) max(0, -lambda_min(DualLmi(U)))
// is an upper bound on alpha_k for every U. The returned value is the best of
// that shift, a low-rank repair along the negative eigenvectors and a
// rebalancing of U1 against (U2, U3), each finished by the shift.
double RepairedDualBound(const DualPoint& u, const NullspaceBasis& basis, int k);

enum class SdpForm { kPrimalBasic, kPrimalColumnwise, kDualKernel, kDecision };

const char* ToString(SdpForm form);
std::optional<SdpForm> ParseSdpForm(const std::string& name);

struct SdpProblem {
  SdpForm form = SdpForm::kDecision;
  NullspaceBasis basis;
  int k = 1;
  std::optional<double> alpha_bar;

  int n() const { return basis.n(); }
  int p() const { return basis.dim(); }
  // Dimension of the kernel-form LMI / lifted dual variable G.
  int assembled_dim() const { return basis.n() + basis.dim(); }
  // Names of the constraint families of this form, in a fixed order.
  std::vector<std::string> ConstraintFamilies() const;
};

SdpProblem BuildProblem(const NullspaceBasis& basis, int k, SdpForm form,
                        std::optional<double> alpha_bar = std::nullopt);

// Max violation per constraint family (0 when satisfied).
struct FeasibilityReport {
  std::vector<std::pair<std::string, double>> residuals;

  double Max() const;
  double Get(const std::string& family) const;
  bool Feasible(double tol) const { return Max() <= tol; }
};

// Checks `cert` against the basic or columnwise relaxation. The PSD family is
// max(0, -lambda_min(Gamma)); the nullspace family is ||A X A^T||_F.
FeasibilityReport CheckPrimalFeasibility(const PrimalCertificate& cert,
                                         const ProblemInstance& inst,
                                         SdpForm form);

// The orthoprojector point for n = 2m, k = sqrt(n): Q = P0 P0^T with P0 the
// first m nullspace columns, X = Q/(n sqrt m), Y = Q/sqrt n, Z = Q/n,
// t = 1/sqrt n, r = 1/n. Objective Tr(Z) = 1/2.
PrimalCertificate CounterexamplePoint(int m, const NullspaceBasis& basis);

// Maps a trace-one PSD G (size n+p, ordered (p-block, n-block)) to a basic-form
// feasible point: lift through blkdiag(P, I), then rescale by the congruence
// diag(sqrt(a) I, sqrt(b) I) with the largest (a, b) meeting every norm cap.
PrimalCertificate GammaFromDualGradient(const Eigen::MatrixXd& g,
                                        const NullspaceBasis& basis, int k);

// Writes the problem in SDPA sparse format (.dat-s). Supported forms are
// kPrimalBasic (encoded through its kernel-form dual) and kDecision.
void ExportSdpa(const SdpProblem& problem, const std::filesystem::path& path);

struct SdpaHeader {
  int num_vars = 0;
  std::vector<int> block_sizes;
  long long num_entries = 0;
};

// Reads back the structural part of an SDPA sparse file and validates every
// entry line against the declared blocks.
SdpaHeader ReadSdpaHeader(const std::filesystem::path& path);

}  // namespace nspcert

#endif  // NSPCERT_SDP_RELAXATION_H_
