#include "nspcert/lp.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nspcert {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kPriceTol = 1e-9;
constexpr int kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
          const std::vector<int>& initial_basis, int num_art)
      : rows_(static_cast<int>(a.rows())),
        structural_(static_cast<int>(a.cols())),
        cols_(structural_ + num_art),
        t_(Eigen::MatrixXd::Zero(rows_, cols_ + 1)),
        obj_(Eigen::VectorXd::Zero(cols_ + 1)),
        basis_(initial_basis),
        active_(rows_, true) {
    t_.leftCols(structural_) = a;
    t_.col(cols_) = b;
    int art = structural_;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < 0) {
        t_(r, art) = 1.0;
        basis_[r] = art++;
      }
    }
  }

  int rows() const { return rows_; }
  int structural() const { return structural_; }
  bool IsArtificial(int col) const { return col >= structural_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<bool>& active() const { return active_; }
  double Rhs(int r) const { return t_(r, cols_); }

  void SetObjective(const Eigen::VectorXd& cost) {
    price_tol_ = kPriceTol * (1.0 + cost.lpNorm<Eigen::Infinity>());
    obj_.setZero();
    obj_.head(cost.size()) = cost;
    for (int r = 0; r < rows_; ++r) {
      if (!active_[r]) continue;
      const double cb = obj_(basis_[r]);
      if (cb != 0.0) obj_ -= cb * t_.row(r).transpose();
    }
  }

  // Phase-one objective: sum of basic artificials.
  void SetArtificialObjective() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    for (int j = structural_; j < cols_; ++j) cost(j) = 1.0;
    SetObjective(cost);
  }

  double ObjectiveValue() const { return -obj_(cols_); }

  void Pivot(int r, int c) {
    const double piv = t_(r, c);
    t_.row(r) /= piv;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double f = obj_(c);
    if (f != 0.0) obj_ -= f * t_.row(r).transpose();
    basis_[r] = c;
  }

  // Runs the simplex on the current objective; artificial columns never
  // enter. Returns the number of pivots.
  int Run(int max_iters) {
    int iters = 0;
    int degenerate_run = 0;
    bool bland = false;
    for (;;) {
      int enter = -1;
      double best = -price_tol_;
      for (int j = 0; j < structural_; ++j) {
        if (obj_(j) < best) {
          enter = j;
          if (bland) break;
          best = obj_(j);
        }
      }
      if (enter < 0) return iters;
      if (iters >= max_iters) {
        throw Error(ErrorCode::kIterationLimit,
                    "simplex iteration limit reached (" +
                        std::to_string(max_iters) + ")");
      }
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        if (!active_[r]) continue;
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(t_(r, cols_), 0.0) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12 * (1.0 + best_ratio) ||
            (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio) &&
             basis_[r] < basis_[leave])) {
          best_ratio = std::min(ratio, best_ratio);
          leave = r;
        }
      }
      if (leave < 0) {
        throw Error(ErrorCode::kUnbounded, "linear program is unbounded");
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
      }
      Pivot(leave, enter);
      ++iters;
    }
  }

  // Pivots basic artificials out; rows where that is impossible are
  // linearly dependent and get deactivated.
  void DriveOutArtificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!active_[r] || !IsArtificial(basis_[r])) continue;
      int col = -1;
      double best = 1e-9;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(t_(r, j)) > best) {
          best = std::abs(t_(r, j));
          col = j;
        }
      }
      if (col >= 0) {
        Pivot(r, col);
      } else {
        active_[r] = false;
      }
    }
  }

 private:
  int rows_;
  int structural_;
  int cols_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd obj_;
  std::vector<int> basis_;
  std::vector<bool> active_;
  double price_tol_ = kPriceTol;
};

void CheckShapes(const LinearProgram& lp) {
  const Eigen::Index nv = lp.c.size();
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "linear program: " + what);
  };
  if (nv == 0) fail("no variables");
  if (lp.a_eq.rows() > 0 && lp.a_eq.cols() != nv) fail("a_eq column count");
  if (lp.a_ub.rows() > 0 && lp.a_ub.cols() != nv) fail("a_ub column count");
  if (lp.a_eq.rows() != lp.b_eq.size()) fail("b_eq size");
  if (lp.a_ub.rows() != lp.b_ub.size()) fail("b_ub size");
  if (!lp.c.allFinite() || !lp.a_eq.allFinite() || !lp.b_eq.allFinite() ||
      !lp.a_ub.allFinite() || !lp.b_ub.allFinite()) {
    fail("non-finite data");
  }
}

}  // namespace

LpSolution SolveLp(const LinearProgram& lp, double feas_tol) {
  CheckShapes(lp);
  const int nv = static_cast<int>(lp.c.size());
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  const int m_ub = static_cast<int>(lp.a_ub.rows());
  const int rows = m_eq + m_ub;
  const int cols = nv + m_ub;

  // Standard form: [a_eq 0; a_ub I] [x; s] = b with b >= 0.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd b(rows);
  if (m_eq > 0) {
    a.topLeftCorner(m_eq, nv) = lp.a_eq;
    b.head(m_eq) = lp.b_eq;
  }
  if (m_ub > 0) {
    a.bottomLeftCorner(m_ub, nv) = lp.a_ub;
    a.bottomRightCorner(m_ub, m_ub).setIdentity();
    b.tail(m_ub) = lp.b_ub;
  }
  Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(rows);
  std::vector<int> basis(rows, -1);
  int num_art = 0;
  for (int r = 0; r < rows; ++r) {
    if (b(r) < 0) {
      row_sign(r) = -1.0;
      a.row(r) *= -1.0;
      b(r) = -b(r);
    }
    if (r >= m_eq && row_sign(r) > 0) {
      basis[r] = nv + (r - m_eq);
    } else {
      ++num_art;
    }
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(nv) = lp.sense == Sense::kMaximize ? Eigen::VectorXd(-lp.c) : lp.c;

  const int max_iters = 100 * (rows + cols) + 1000;
  Tableau tab(a, b, basis, num_art);
  int iterations = 0;
  if (num_art > 0) {
    tab.SetArtificialObjective();
    iterations += tab.Run(max_iters);
    const double infeas = tab.ObjectiveValue();
    if (infeas > feas_tol * (1.0 + b.lpNorm<Eigen::Infinity>())) {
      throw Error(ErrorCode::kInfeasible,
                  "linear program is infeasible (phase-one value " +
                      std::to_string(infeas) + ")");
    }
    tab.DriveOutArtificials();
  }
  tab.SetObjective(cost);
  iterations += tab.Run(max_iters);

  // Re-solve the final basis against the original data.
  std::vector<int> active_rows;
  std::vector<int> basic_cols;
  for (int r = 0; r < rows; ++r) {
    if (!tab.active()[r]) continue;
    active_rows.push_back(r);
    basic_cols.push_back(tab.basis()[r]);
  }
  const int nb = static_cast<int>(active_rows.size());
  Eigen::MatrixXd bmat(nb, nb);
  Eigen::VectorXd bvec(nb);
  Eigen::VectorXd cb(nb);
  for (int i = 0; i < nb; ++i) {
    bvec(i) = b(active_rows[i]);
    cb(i) = cost(basic_cols[i]);
    for (int j = 0; j < nb; ++j) bmat(i, j) = a(active_rows[i], basic_cols[j]);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd y_active = Eigen::VectorXd::Zero(nb);
  if (nb > 0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    const Eigen::VectorXd xb = lu.solve(bvec);
    y_active = lu.transpose().solve(cb);
    for (int i = 0; i < nb; ++i) z(basic_cols[i]) = std::max(xb(i), 0.0);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  for (int i = 0; i < nb; ++i) y(active_rows[i]) = y_active(i);
  const Eigen::VectorXd reduced = cost - a.transpose() * y;

  LpSolution sol;
  sol.x = z.head(nv);
  sol.objective = lp.c.dot(sol.x);
  sol.iterations = iterations;
  sol.primal_residual = (a * z - b).lpNorm<Eigen::Infinity>();
  sol.dual_residual = std::max(0.0, -reduced.minCoeff());
  sol.complementarity = z.cwiseProduct(reduced).cwiseAbs().maxCoeff();
  const Eigen::VectorXd y_orig = y.cwiseProduct(row_sign);
  sol.dual_eq = y_orig.head(m_eq);
  sol.dual_ub = y_orig.tail(m_ub);
  return sol;
}

}  // namespace nspcert
