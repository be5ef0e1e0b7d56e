#ifndef NSPCERT_MATRIX_LAB_H_
#define NSPCERT_MATRIX_LAB_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "nspcert/error.h"

namespace nspcert {

enum class Ensemble { kGaussian, kBernoulli, kFourier, kFile };

const char* ToString(Ensemble e);
std::optional<Ensemble> ParseEnsemble(const std::string& name);

// A coding matrix A (m x n, m < n) together with where it came from.
struct ProblemInstance {
  Eigen::MatrixXd a;
  Ensemble ensemble = Ensemble::kFile;
  std::uint64_t seed = 0;

  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }
  double rho() const { return static_cast<double>(a.rows()) / a.cols(); }
};

// Orthonormal basis of null(A): A P = 0, P^T P = I.
struct NullspaceBasis {
  Eigen::MatrixXd p;
  double ortho_tol = 1e-10;

  int n() const { return static_cast<int>(p.rows()); }
  int dim() const { return static_cast<int>(p.cols()); }
};

// Throws Error(kInvalidArgument) unless 0 < m < n and all entries are finite.
void ValidateInstance(const ProblemInstance& inst);

// Entries i.i.d. N(0, 1/sqrt(m)), i.e. standard deviation m^(-1/4).
ProblemInstance GenGaussian(int m, int n, std::uint64_t seed);
// Entries i.i.d. uniform on {+1/sqrt(m), -1/sqrt(m)}.
ProblemInstance GenBernoulli(int m, int n, std::uint64_t seed);
// m/2 distinct frequencies drawn from {1, ..., ceil(n/2)-1}; each contributes
// a unit-norm cosine row and a unit-norm sine row. m must be even.
ProblemInstance GenFourier(int m, int n, std::uint64_t seed);
ProblemInstance Generate(Ensemble e, int m, int n, std::uint64_t seed);

// Nullspace from the full SVD of A; singular values <= tol * sigma_max count
// as zero.
NullspaceBasis ComputeNullspace(const ProblemInstance& inst, double tol = 1e-10);

// Text format: a JSON header line {"m","n","ensemble","seed"} followed by m
// rows of n values printed with 17 significant digits.
void SaveMatrix(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance LoadMatrix(const std::filesystem::path& path);

}  // namespace nspcert

#endif  // NSPCERT_MATRIX_LAB_H_
