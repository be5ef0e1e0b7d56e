#include "nspcert/randomization.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nspcert/lp_core.h"
#include "nspcert/rng.h"

namespace nspcert {
namespace {

Eigen::MatrixXd Normals(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = rng.Normal();
  return w;
}

// F with F F^T = cov after clipping negative eigenvalues.
Eigen::MatrixXd PsdFactor(const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "eigendecomposition failed");
  }
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) < -1e-4 * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                "covariance is badly indefinite (min eigenvalue " +
                    std::to_string(es.eigenvalues()(0)) + ")");
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

}  // namespace

SampleBatch SampleGamma(const PrimalCertificate& cert, int count,
                        std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "need >= 1 sample");
  const int n = cert.n();
  const Eigen::MatrixXd factor = PsdFactor(cert.Gamma());
  Rng rng(seed, 1);
  const Eigen::MatrixXd draws = factor * Normals(rng, 2 * n, count);
  SampleBatch batch;
  batch.x = draws.topRows(n);
  batch.y = draws.bottomRows(n);
  batch.seed = seed;
  return batch;
}

double SecondMomentSigma(const PrimalCertificate& cert) {
  return cert.z.squaredNorm() + (cert.x * cert.y).trace();
}

double ProductVariance(const PrimalCertificate& cert) {
  return (cert.z * cert.z).trace() + (cert.x * cert.y).trace();
}

TightnessReport ScalingConstants(const PrimalCertificate& cert, int k,
                                 double epsilon) {
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  const int n = cert.n();
  TightnessReport r;
  r.epsilon = epsilon;
  r.sigma2 = SecondMomentSigma(cert);
  r.delta = 3.0 + 3.0 * r.sigma2 / (epsilon * epsilon);
  const double dev = std::sqrt(2.0 * std::log(r.delta));
  const Eigen::VectorXd sx = cert.x.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Eigen::VectorXd sy = cert.y.diagonal().cwiseMax(0.0).cwiseSqrt();
  r.g = (kSqrt2OverPi + dev) * sx.sum();
  r.h = std::max((std::sqrt(2.0 * std::log(2.0 * n)) + dev) * sy.maxCoeff(),
                 (kSqrt2OverPi + dev) * sy.sum() / k);
  r.mu = r.g * r.h;
  r.certified_lower = r.mu > 0 ? (cert.objective() - epsilon) / r.mu : 0.0;
  return r;
}

double DefaultTightnessEpsilon(const PrimalCertificate& cert) {
  const double tr = std::abs(cert.objective());
  return tr > 1e-2 ? 0.1 * tr : 1e-3;
}

RandomizedBound RandomizedLowerBound(const PrimalCertificate& cert,
                                     const NullspaceBasis& basis, int k,
                                     int count, std::uint64_t seed,
                                     double epsilon) {
  if (count < 100) {
    throw Error(ErrorCode::kInvalidArgument,
                "randomized lower bound needs at least 100 samples");
  }
  RandomizedBound out;
  out.samples = count;
  out.tightness = ScalingConstants(cert, k, epsilon);
  const double g = out.tightness.g;
  const double h = out.tightness.h;
  const SampleBatch batch = SampleGamma(cert, count, seed);
  const Eigen::MatrixXd& p = basis.p;
  const double kk = k;
  auto normalized = [kk](const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double x_l1 = x.lpNorm<1>();
    const double y_scale =
        std::max(y.lpNorm<Eigen::Infinity>(), y.lpNorm<1>() / kk);
    if (!(x_l1 > 0) || !(y_scale > 0)) return 0.0;
    return std::abs(y.dot(x)) / (x_l1 * y_scale);
  };
  const int n = cert.n();
  const Eigen::MatrixXd factor = PsdFactor(cert.Gamma());
  const Eigen::MatrixXd fx = p * (p.transpose() * factor.topRows(n));
  for (Eigen::Index j = 0; j < factor.cols(); ++j) {
    out.value_principal =
        std::max(out.value_principal, normalized(fx.col(j), factor.col(j).tail(n)));
  }
  const Eigen::MatrixXd xs = p * (p.transpose() * batch.x);
  for (int s = 0; s < count; ++s) {
    const auto x = xs.col(s);
    const auto y = batch.y.col(s);
    const double x_l1 = x.lpNorm<1>();
    const double xy = std::abs(y.dot(x));
    out.value_normalized = std::max(out.value_normalized, normalized(x, y));
    if (g > 0 && h > 0) {
      if (x_l1 / g > 1.0 || y.lpNorm<Eigen::Infinity>() / h > 1.0 ||
          y.lpNorm<1>() / h > kk) {
        continue;
      }
      out.value_theorem = std::max(out.value_theorem, xy / (g * h));
    }
    // With g or h zero the scaled sample is the zero vector, which is feasible.
    ++out.feasible;
  }
  out.value = std::min(
      1.0, std::max({out.value_theorem, out.value_normalized, out.value_principal}));
  return out;
}

double DirectNullspaceLowerBound(const NullspaceBasis& basis, int k, int count,
                                 std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "need >= 1 sample");
  const int n = basis.n();
  if (k < 1 || k > n) throw Error(ErrorCode::kInvalidArgument, "k out of range");
  if (basis.dim() == 0) return 0.0;
  Rng rng(seed, 2);
  double best = 0.0;
  constexpr int kChunk = 256;
  for (int done = 0; done < count; done += kChunk) {
    const int c = std::min(kChunk, count - done);
    const Eigen::MatrixXd xs = basis.p * Normals(rng, basis.dim(), c);
    for (int s = 0; s < c; ++s) {
      const double l1 = xs.col(s).lpNorm<1>();
      if (l1 > 0) best = std::max(best, TopKMass(xs.col(s), k) / l1);
    }
  }
  return std::min(best, 1.0);
}

double ConcentrationThreshold(const Eigen::MatrixXd& cov, double delta,
                              NormKind which) {
  if (!(delta > 1)) throw Error(ErrorCode::kInvalidArgument, "delta must be > 1");
  const Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  const double dev = std::sqrt(2.0 * std::log(delta));
  if (which == NormKind::kL1) return (kSqrt2OverPi + dev) * sd.sum();
  const double n = static_cast<double>(cov.rows());
  return (std::sqrt(2.0 * std::log(2.0 * n)) + dev) * sd.maxCoeff();
}

double ConcentrationCheck(const Eigen::MatrixXd& cov, double delta, int count,
                          std::uint64_t seed, NormKind which) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "need >= 1 sample");
  const double threshold = ConcentrationThreshold(cov, delta, which);
  const Eigen::MatrixXd factor = PsdFactor(cov);
  Rng rng(seed, 4);
  long exceed = 0;
  constexpr int kChunk = 1024;
  for (int done = 0; done < count; done += kChunk) {
    const int c = std::min(kChunk, count - done);
    const Eigen::MatrixXd xs = factor * Normals(rng, cov.rows(), c);
    for (int s = 0; s < c; ++s) {
      const double norm = which == NormKind::kL1
                              ? xs.col(s).lpNorm<1>()
                              : xs.col(s).lpNorm<Eigen::Infinity>();
      if (norm >= threshold) ++exceed;
    }
  }
  return static_cast<double>(exceed) / count;
}

MomentEstimate EmpiricalSecondMoment(const PrimalCertificate& cert, int count,
                                     std::uint64_t seed) {
  const SampleBatch batch = SampleGamma(cert, count, seed);
  const Eigen::ArrayXd prod =
      batch.x.cwiseProduct(batch.y).colwise().sum().transpose().array();
  const Eigen::ArrayXd sq = prod.square();
  MomentEstimate est;
  est.mean = sq.mean();
  const double var = (sq - est.mean).square().sum() / std::max(1, count - 1);
  est.std_error = std::sqrt(var / count);
  return est;
}

double EmpiricalQuantile(const PrimalCertificate& cert, double level, int count,
                         std::uint64_t seed) {
  if (!(level >= 0 && level <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile level must be in [0,1]");
  }
  const SampleBatch batch = SampleGamma(cert, count, seed);
  std::vector<double> vals(count);
  for (int s = 0; s < count; ++s) vals[s] = batch.x.col(s).dot(batch.y.col(s));
  const auto idx = static_cast<std::size_t>(
      std::clamp(level * (count - 1), 0.0, static_cast<double>(count - 1)));
  std::nth_element(vals.begin(), vals.begin() + idx, vals.end());
  return vals[idx];
}

Histogram MakeHistogram(const std::vector<double>& values, int bins, double lo,
                        double hi) {
  if (bins < 1 || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs bins >= 1, hi > lo");
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    h.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return h;
}

void Histogram::WriteCsv(std::ostream& out, const char* series) const {
  char buf[128];
  for (std::size_t b = 0; b < counts.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%ld\n", series, edges[b],
                  edges[b + 1], counts[b]);
    out << buf;
  }
}

}  // namespace nspcert
