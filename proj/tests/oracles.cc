#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

Eigen::VectorXd ProjectL1Ball(const Eigen::VectorXd& v, double r) {
  if (v.lpNorm<1>() <= r) return v;
  if (r <= 0) return Eigen::VectorXd::Zero(v.size());
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v(i));
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - r) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0 ? -m : m;
  }
  return out;
}

Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v, double total) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - total) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

Eigen::MatrixXd Clip(const Eigen::MatrixXd& m, double r) {
  return m.cwiseMax(-r).cwiseMin(r);
}

Eigen::MatrixXd L1Ball(const Eigen::MatrixXd& m, double r) {
  const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  const Eigen::VectorXd p = ProjectL1Ball(flat, r);
  return Eigen::Map<const Eigen::MatrixXd>(p.data(), m.rows(), m.cols());
}

}  // namespace

BallProjection ProjectBallByBudgets(const nspcert::DualPoint& v, int k, double a) {
  const double kk = k;
  const Eigen::Vector4d w(1.0, kk * kk, 1.0, kk);
  const Eigen::MatrixXd* blocks[4] = {&v.u1, &v.u2, &v.u3, &v.u4};
  BallProjection out;
  if (nspcert::DualObjective(v, k) <= a) {
    out.point = v;
    out.budgets << v.u1.cwiseAbs().maxCoeff(), kk * kk * v.u2.cwiseAbs().maxCoeff(),
        v.u3.cwiseAbs().sum(), kk * v.u4.cwiseAbs().maxCoeff();
    return out;
  }
  auto project = [&](int b, double radius) {
    return b == 2 ? L1Ball(*blocks[b], radius) : Clip(*blocks[b], radius);
  };
  // d/d(beta_b) of the half squared distance: minus the dual norm of the
  // residual, divided by the weight.
  auto gradient = [&](const Eigen::Vector4d& beta) {
    Eigen::Vector4d g;
    for (int b = 0; b < 4; ++b) {
      const Eigen::MatrixXd res = *blocks[b] - project(b, beta(b) / w(b));
      const double dual = b == 2 ? res.cwiseAbs().maxCoeff() : res.cwiseAbs().sum();
      g(b) = -dual / w(b);
    }
    return g;
  };
  auto objective = [&](const Eigen::Vector4d& beta) {
    double s = 0.0;
    for (int b = 0; b < 4; ++b) {
      s += 0.5 * (*blocks[b] - project(b, beta(b) / w(b))).squaredNorm();
    }
    return s;
  };
  double lip = 1.0;
  for (int b = 0; b < 4; ++b) {
    lip = std::max(lip, static_cast<double>(blocks[b]->size()) / (w(b) * w(b)));
  }
  Eigen::Vector4d beta = Eigen::Vector4d::Constant(a / 4.0);
  // Accelerated projected gradient with restart on objective increase.
  Eigen::Vector4d y = beta;
  double t = 1.0;
  double f_prev = objective(beta);
  for (int it = 0; it < 200000; ++it) {
    const Eigen::Vector4d next = ProjectSimplex(y - gradient(y) / lip, a);
    const double f = objective(next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (f > f_prev) {
      y = beta;
      t = 1.0;
      continue;
    }
    y = next + ((t - 1.0) / t_next) * (next - beta);
    const double step = (next - beta).norm();
    beta = next;
    t = t_next;
    f_prev = f;
    if (step < 1e-15 * (1.0 + a)) break;
  }
  out.point = v;
  out.point.u1 = project(0, beta(0) / w(0));
  out.point.u2 = project(1, beta(1) / w(1));
  out.point.u3 = project(2, beta(2) / w(2));
  out.point.u4 = project(3, beta(3) / w(3));
  out.distance = std::sqrt((v - out.point).SquaredNorm());
  out.budgets = beta;
  return out;
}

namespace {

// Calls visit(subset) for every size-r subset of {0, ..., n-1}.
void ForEachSubset(int n, int r, const std::function<void(const std::vector<int>&)>& visit) {
  if (r < 0 || r > n) return;
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::optional<double> LpByVertices(const nspcert::LinearProgram& lp, double tol) {
  const int n = static_cast<int>(lp.c.size());
  const int me = static_cast<int>(lp.a_eq.rows());
  const int mu = static_cast<int>(lp.a_ub.rows());
  // Inequalities G x <= h: the ub rows, then -x <= 0.
  Eigen::MatrixXd gm(mu + n, n);
  Eigen::VectorXd hv(mu + n);
  if (mu > 0) {
    gm.topRows(mu) = lp.a_ub;
    hv.head(mu) = lp.b_ub;
  }
  gm.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
  hv.tail(n).setZero();
  const bool maximize = lp.sense == nspcert::Sense::kMaximize;
  std::optional<double> best;
  ForEachSubset(mu + n, n - me, [&](const std::vector<int>& active) {
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    if (me > 0) {
      m.topRows(me) = lp.a_eq;
      rhs.head(me) = lp.b_eq;
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      m.row(me + i) = gm.row(active[i]);
      rhs(me + i) = hv(active[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < n) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    if ((gm * x - hv).maxCoeff() > tol) return;
    if (me > 0 && (lp.a_eq * x - lp.b_eq).cwiseAbs().maxCoeff() > tol) return;
    const double val = lp.c.dot(x);
    if (!best || (maximize ? val > *best : val < *best)) best = val;
  });
  return best;
}

double AlphaByVertices(const Eigen::MatrixXd& a, int k) {
  const int n = static_cast<int>(a.cols());
  double best = 0.0;
  for (int size = 1; size <= n; ++size) {
    ForEachSubset(n, size, [&](const std::vector<int>& s) {
      Eigen::MatrixXd as(a.rows(), size);
      for (int j = 0; j < size; ++j) as.col(j) = a.col(s[j]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double cut = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;
      if (size - rank != 1) return;
      const Eigen::VectorXd z = svd.matrixV().col(size - 1);
      std::vector<double> mags(size);
      for (int j = 0; j < size; ++j) mags[j] = std::abs(z(j));
      std::sort(mags.begin(), mags.end(), std::greater<>());
      double top = 0.0;
      for (int j = 0; j < std::min(k, size); ++j) top += mags[j];
      best = std::max(best, top / z.lpNorm<1>());
    });
  }
  return best;
}

Eigen::MatrixXd RandomSymmetric(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(gen);
  }
  return m;
}

}  // namespace oracle
