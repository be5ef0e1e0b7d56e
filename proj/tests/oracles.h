#ifndef NSPCERT_TESTS_ORACLES_H_
#define NSPCERT_TESTS_ORACLES_H_

#include <optional>

#include <Eigen/Dense>

#include "nspcert/lp.h"
#include "nspcert/sdp_relaxation.h"

namespace oracle {

// Euclidean projection of v onto {x : ||x||_1 <= r}, by sorting.
Eigen::VectorXd ProjectL1Ball(const Eigen::VectorXd& v, double r);

// Euclidean projection onto the simplex {b >= 0, sum b = total}.
Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v, double total);

struct BallProjection {
  nspcert::DualPoint point;
  double distance = 0.0;
  Eigen::Vector4d budgets;  // weighted norm spent in each block
};

// Projection onto {||U1||_inf + k^2 ||U2||_inf + ||U3||_1 + k ||U4||_inf <= a}
// by projected gradient over the split of the budget a between the blocks;
// each block is then a plain l_inf clip or l1-ball projection.
BallProjection ProjectBallByBudgets(const nspcert::DualPoint& v, int k, double a);

// Optimum of a small bounded LP by enumerating every basic solution.
// Returns nothing when no vertex is feasible.
std::optional<double> LpByVertices(const nspcert::LinearProgram& lp,
                                   double tol = 1e-9);

// alpha_k from the vertices of {A x = 0, ||x||_1 <= 1}: every vertex is the
// normalized generator of a one-dimensional null(A_S) with |S| <= rank + 1.
double AlphaByVertices(const Eigen::MatrixXd& a, int k);

// Random symmetric matrix with N(0, 1) entries.
Eigen::MatrixXd RandomSymmetric(int n, unsigned seed);

}  // namespace oracle

#endif  // NSPCERT_TESTS_ORACLES_H_
