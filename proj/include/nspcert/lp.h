#ifndef NSPCERT_LP_H_
#define NSPCERT_LP_H_

#include <Eigen/Dense>

#include "nspcert/error.h"

namespace nspcert {

enum class Sense { kMinimize, kMaximize };

// optimize c^T x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x >= 0.
// Either constraint block may be empty (zero rows) but must have c.size()
// columns.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Sense sense = Sense::kMinimize;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  // Multipliers of the equality and inequality rows, in the sign convention
  // of the minimization form (for a max problem the objective is negated).
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_ub;
  int iterations = 0;
  // KKT residuals of the returned basis, all absolute.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
};

// Two-phase dense tableau simplex. Dantzig pricing, switching to Bland's rule
// after a run of degenerate pivots. The final basis is re-solved against the
// original data and KKT residuals are reported. Throws Error with kInfeasible,
// kUnbounded, kIterationLimit, or kInvalidArgument.
LpSolution SolveLp(const LinearProgram& lp, double feas_tol = 1e-9);

}  // namespace nspcert

#endif  // NSPCERT_LP_H_
