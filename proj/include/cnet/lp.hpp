#pragma once

#include <Eigen/Dense>

namespace cnet {

// Dense two-phase simplex for the small linear programs used in polytope
// preprocessing.  Variables are free; minimize c'x subject to
// A_ub x <= b_ub and A_eq x = b_eq.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;

  bool optimal() const { return status == Status::Optimal; }
};

LpResult solve_lp(const Eigen::VectorXd& c,
                  const Eigen::MatrixXd& A_ub, const Eigen::VectorXd& b_ub,
                  const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& b_eq);

// Convenience wrappers over the inequality system A x <= b, E x = e.
LpResult lp_minimize(const Eigen::VectorXd& c,
                     const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::MatrixXd& E, const Eigen::VectorXd& e);
LpResult lp_maximize(const Eigen::VectorXd& c,
                     const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::MatrixXd& E, const Eigen::VectorXd& e);

}  // namespace cnet
