#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nspcert/matrix_lab.h"
#include "nspcert/rng.h"

namespace nspcert {
namespace {

namespace fs = std::filesystem;

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() / ("nspcert_test_" + name);
}

int RankBySvd(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > 1e-10 * s(0) ? 1 : 0;
  return r;
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(Rng, StreamsDiffer) {
  Rng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.NextU64() == b.NextU64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, UniformRangeAndMean) {
  Rng r(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, NormalMoments) {
  Rng r(9);
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.Normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Rng, BelowIsInRange) {
  Rng r(11);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.Below(7), 7u);
}

TEST(GenGaussian, DeterministicForSeed) {
  const auto a = GenGaussian(14, 20, 1);
  const auto b = GenGaussian(14, 20, 1);
  EXPECT_EQ(a.rows(), 14);
  EXPECT_EQ(a.cols(), 20);
  EXPECT_TRUE((a.a.array() == b.a.array()).all());
  EXPECT_EQ(a.ensemble, Ensemble::kGaussian);
  EXPECT_EQ(a.seed, 1u);
}

TEST(GenGaussian, DifferentSeedsDiffer) {
  EXPECT_FALSE((GenGaussian(14, 20, 1).a.array() ==
                GenGaussian(14, 20, 2).a.array()).all());
}

TEST(GenGaussian, SecondMomentMatchesVariance) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = GenGaussian(14, 20, seed);
    const Eigen::ArrayXXd sq = inst.a.array().square();
    const double var = 1.0 / std::sqrt(14.0);
    const double mean = sq.mean();
    // Var(a^2) = 2 var^2 for a centered normal.
    const double se = std::sqrt(2.0 * var * var / sq.size());
    EXPECT_NEAR(mean, var, 3.0 * se) << "seed " << seed;
  }
}

TEST(GenGaussian, RejectsBadDimensions) {
  EXPECT_THROW(GenGaussian(20, 14, 1), Error);
  EXPECT_THROW(GenGaussian(0, 14, 1), Error);
  EXPECT_THROW(GenGaussian(5, 5, 1), Error);
}

TEST(GenBernoulli, EntriesAreSignedScale) {
  const auto inst = GenBernoulli(8, 16, 3);
  const double s = 1.0 / std::sqrt(8.0);
  for (Eigen::Index i = 0; i < inst.a.size(); ++i) {
    EXPECT_DOUBLE_EQ(std::abs(inst.a.data()[i]), s);
  }
}

TEST(GenBernoulli, BalancedSigns) {
  const auto inst = GenBernoulli(8, 16, 3);
  const double frac = (inst.a.array() > 0).cast<double>().mean();
  EXPECT_NEAR(frac, 0.5, 3.0 * std::sqrt(0.25 / 128.0));
}

TEST(GenBernoulli, RejectsBadDimensions) { EXPECT_THROW(GenBernoulli(16, 8, 1), Error); }

TEST(GenFourier, UnitRowsAndFullRank) {
  const auto inst = GenFourier(8, 16, 5);
  ASSERT_EQ(inst.rows(), 8);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(inst.a.row(i).norm(), 1.0, 1e-12);
  EXPECT_EQ(RankBySvd(inst.a), 8);
}

TEST(GenFourier, RowsOrthogonalWhenNMultipleOfFour) {
  const auto inst = GenFourier(8, 16, 5);
  const Eigen::MatrixXd gram = inst.a * inst.a.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GenFourier, RejectsOddRows) { EXPECT_THROW(GenFourier(7, 16, 1), Error); }

TEST(Generate, DispatchesAndRejectsFile) {
  EXPECT_EQ(Generate(Ensemble::kBernoulli, 4, 8, 1).ensemble, Ensemble::kBernoulli);
  EXPECT_THROW(Generate(Ensemble::kFile, 4, 8, 1), Error);
}

TEST(EnsembleNames, RoundTrip) {
  for (Ensemble e : {Ensemble::kGaussian, Ensemble::kBernoulli, Ensemble::kFourier,
                     Ensemble::kFile}) {
    EXPECT_EQ(ParseEnsemble(ToString(e)), e);
  }
  EXPECT_FALSE(ParseEnsemble("cauchy").has_value());
}

TEST(Nullspace, RankOneRow) {
  ProblemInstance inst;
  inst.a = Eigen::RowVector3d(1, 1, 1);
  const auto basis = ComputeNullspace(inst);
  EXPECT_EQ(basis.dim(), 2);
  EXPECT_LE((inst.a * basis.p).norm(), 1e-10);
}

TEST(Nullspace, GaussianHasExpectedDimension) {
  const auto inst = GenGaussian(14, 20, 4);
  EXPECT_EQ(RankBySvd(inst.a), 14);
  EXPECT_EQ(ComputeNullspace(inst).dim(), 6);
}

TEST(Nullspace, ZeroMatrixGivesWholeSpace) {
  ProblemInstance inst;
  inst.a = Eigen::MatrixXd::Zero(2, 5);
  const auto basis = ComputeNullspace(inst);
  EXPECT_EQ(basis.dim(), 5);
  EXPECT_LE((basis.p.transpose() * basis.p - Eigen::MatrixXd::Identity(5, 5)).norm(),
            1e-12);
}

TEST(Nullspace, RejectsNonPositiveTolerance) {
  EXPECT_THROW(ComputeNullspace(GenGaussian(3, 6, 1), 0.0), Error);
}

TEST(Nullspace, InvariantsOnRandomInstances) {
  Rng r(123);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(r.Below(39));
    const int m = 1 + static_cast<int>(r.Below(n - 1));
    const auto inst = trial % 2 ? GenGaussian(m, n, trial) : GenBernoulli(m, n, trial);
    const auto basis = ComputeNullspace(inst);
    EXPECT_EQ(basis.dim(), n - RankBySvd(inst.a));
    EXPECT_LE((inst.a * basis.p).norm(), 1e-10 * inst.a.norm()) << trial;
    const Eigen::MatrixXd gram = basis.p.transpose() * basis.p;
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).norm(), 1e-12)
        << trial;
  }
}

TEST(MatrixFile, RoundTripIsBitExact) {
  const auto inst = GenGaussian(14, 20, 1);
  const auto path = TempPath("roundtrip.txt");
  SaveMatrix(inst, path);
  const auto back = LoadMatrix(path);
  EXPECT_TRUE((back.a.array() == inst.a.array()).all());
  EXPECT_EQ(back.ensemble, inst.ensemble);
  EXPECT_EQ(back.seed, inst.seed);
  fs::remove(path);
}

TEST(MatrixFile, TruncatedFileIsMalformed) {
  const auto inst = GenGaussian(3, 5, 1);
  const auto path = TempPath("truncated.txt");
  SaveMatrix(inst, path);
  std::string text;
  {
    std::ifstream in(path);
    std::getline(in, text);
    std::string row;
    std::getline(in, row);
    text += "\n" + row + "\n";
  }
  {
    std::ofstream out(path);
    out << text;
  }
  try {
    LoadMatrix(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedFile);
  }
  fs::remove(path);
}

TEST(MatrixFile, WideRowCountRejected) {
  const auto path = TempPath("tall.txt");
  {
    std::ofstream out(path);
    out << "{\"m\":3,\"n\":2,\"ensemble\":\"file\",\"seed\":0}\n1 2\n3 4\n5 6\n";
  }
  EXPECT_THROW(LoadMatrix(path), Error);
  fs::remove(path);
}

TEST(MatrixFile, MissingFileIsIoError) {
  try {
    LoadMatrix(TempPath("does_not_exist.txt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ProblemInstance, RhoIsExactRatio) {
  EXPECT_DOUBLE_EQ(GenGaussian(14, 20, 1).rho(), 14.0 / 20.0);
}

TEST(ValidateInstance, RejectsNonFinite) {
  ProblemInstance inst;
  inst.a = Eigen::MatrixXd::Ones(2, 3);
  inst.a(0, 1) = std::nan("");
  EXPECT_THROW(ValidateInstance(inst), Error);
}

}  // namespace
}  // namespace nspcert
