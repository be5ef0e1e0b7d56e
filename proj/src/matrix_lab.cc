#include "nspcert/matrix_lab.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "nspcert/rng.h"

namespace nspcert {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedFile: return "malformed_file";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kUnbounded: return "unbounded";
    case ErrorCode::kIterationLimit: return "iteration_limit";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
    case ErrorCode::kNumerical: return "numerical";
  }
  return "unknown";
}

const char* ToString(Ensemble e) {
  switch (e) {
    case Ensemble::kGaussian: return "gaussian";
    case Ensemble::kBernoulli: return "bernoulli";
    case Ensemble::kFourier: return "fourier";
    case Ensemble::kFile: return "file";
  }
  return "file";
}

std::optional<Ensemble> ParseEnsemble(const std::string& name) {
  if (name == "gaussian") return Ensemble::kGaussian;
  if (name == "bernoulli") return Ensemble::kBernoulli;
  if (name == "fourier") return Ensemble::kFourier;
  if (name == "file") return Ensemble::kFile;
  return std::nullopt;
}

namespace {

void CheckDims(int m, int n) {
  if (m <= 0 || n <= 0 || m >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid dimensions: need 0 < m < n, got m=" +
                    std::to_string(m) + " n=" + std::to_string(n));
  }
}

}  // namespace

void ValidateInstance(const ProblemInstance& inst) {
  CheckDims(inst.rows(), inst.cols());
  if (!inst.a.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }
}

ProblemInstance GenGaussian(int m, int n, std::uint64_t seed) {
  CheckDims(m, n);
  Rng rng(seed);
  const double sd = std::pow(static_cast<double>(m), -0.25);
  ProblemInstance inst{Eigen::MatrixXd(m, n), Ensemble::kGaussian, seed};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.a(i, j) = sd * rng.Normal();
  return inst;
}

ProblemInstance GenBernoulli(int m, int n, std::uint64_t seed) {
  CheckDims(m, n);
  Rng rng(seed);
  const double v = 1.0 / std::sqrt(static_cast<double>(m));
  ProblemInstance inst{Eigen::MatrixXd(m, n), Ensemble::kBernoulli, seed};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.a(i, j) = (rng.NextU64() >> 63) ? v : -v;
  return inst;
}

ProblemInstance GenFourier(int m, int n, std::uint64_t seed) {
  CheckDims(m, n);
  if (m % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "fourier ensemble needs an even row count, got m=" +
                    std::to_string(m));
  }
  // Frequencies f and n-f give the same cosine row, and f = n/2 has a zero
  // sine row, so candidates are 1 .. ceil(n/2)-1.
  const int available = (n + 1) / 2 - 1;
  const int wanted = m / 2;
  if (wanted > available) {
    throw Error(ErrorCode::kInvalidArgument,
                "fourier ensemble: only " + std::to_string(available) +
                    " usable frequencies for n=" + std::to_string(n));
  }
  std::vector<int> freqs(available);
  std::iota(freqs.begin(), freqs.end(), 1);
  Rng rng(seed);
  for (int i = 0; i < wanted; ++i) {
    const auto j = i + static_cast<int>(rng.Below(available - i));
    std::swap(freqs[i], freqs[j]);
  }
  freqs.resize(wanted);
  std::sort(freqs.begin(), freqs.end());

  ProblemInstance inst{Eigen::MatrixXd(m, n), Ensemble::kFourier, seed};
  for (int r = 0; r < wanted; ++r) {
    for (int j = 0; j < n; ++j) {
      const double angle = 2.0 * std::numbers::pi * freqs[r] * j / n;
      inst.a(2 * r, j) = std::cos(angle);
      inst.a(2 * r + 1, j) = std::sin(angle);
    }
  }
  inst.a.rowwise().normalize();
  return inst;
}

ProblemInstance Generate(Ensemble e, int m, int n, std::uint64_t seed) {
  switch (e) {
    case Ensemble::kGaussian: return GenGaussian(m, n, seed);
    case Ensemble::kBernoulli: return GenBernoulli(m, n, seed);
    case Ensemble::kFourier: return GenFourier(m, n, seed);
    case Ensemble::kFile: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "cannot generate a file ensemble");
}

NullspaceBasis ComputeNullspace(const ProblemInstance& inst, double tol) {
  if (!(tol > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "nullspace tolerance must be > 0");
  }
  if (!inst.a.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }
  const Eigen::Index n = inst.a.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inst.a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? tol * sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  NullspaceBasis basis;
  basis.p = svd.matrixV().rightCols(n - rank);
  basis.ortho_tol = tol;
  return basis;
}

void SaveMatrix(const ProblemInstance& inst, const std::filesystem::path& path) {
  ValidateInstance(inst);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json header = {{"m", inst.rows()},
                           {"n", inst.cols()},
                           {"ensemble", ToString(inst.ensemble)},
                           {"seed", inst.seed}};
  out << header.dump() << '\n';
  char buf[32];
  for (int i = 0; i < inst.rows(); ++i) {
    for (int j = 0; j < inst.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", inst.a(i, j));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

ProblemInstance LoadMatrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedFile, "missing header in " + path.string());
  }
  ProblemInstance inst;
  int m = 0;
  int n = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    m = header.at("m").get<int>();
    n = header.at("n").get<int>();
    const auto ens = ParseEnsemble(header.value("ensemble", std::string("file")));
    if (!ens) throw Error(ErrorCode::kMalformedFile, "unknown ensemble");
    inst.ensemble = *ens;
    inst.seed = header.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile,
                "bad header in " + path.string() + ": " + e.what());
  }
  CheckDims(m, n);
  inst.a.resize(m, n);
  for (int i = 0; i < m; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kMalformedFile,
                  "expected " + std::to_string(m) + " rows, got " +
                      std::to_string(i));
    }
    std::istringstream row(line);
    std::string token;
    int j = 0;
    while (row >> token) {
      if (j >= n) throw Error(ErrorCode::kMalformedFile, "too many columns");
      char* end = nullptr;
      inst.a(i, j) = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorCode::kMalformedFile, "bad number '" + token + "'");
      }
      ++j;
    }
    if (j != n) {
      throw Error(ErrorCode::kMalformedFile,
                  "row " + std::to_string(i) + " has " + std::to_string(j) +
                      " entries, expected " + std::to_string(n));
    }
  }
  ValidateInstance(inst);
  return inst;
}

}  // namespace nspcert
