#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cnet {

// Dense primal active-set method for convex quadratic programs
//   minimize 0.5 x'Qx + c'x
//   subject to E x = e, G x <= h,
// started from a feasible point.  Q must be positive semidefinite on the
// feasible subspace; when it is merely semidefinite the method returns one
// optimizer (which one depends on the active-set path) and reports the flat
// direction through `unique`.
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;    // one per equality row
  Eigen::VectorXd ineq_multipliers;  // one per inequality row, >= 0
  double objective = 0.0;
  int iterations = 0;
  bool unique = true;  // false when a zero-curvature feasible direction exists
  std::vector<int> active_set;
};

struct QpOptions {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: 10 * (variables + constraints)
};

QpResult solve_qp(const QpProblem& problem, const Eigen::VectorXd& x0,
                  const QpOptions& options = {});

}  // namespace cnet
