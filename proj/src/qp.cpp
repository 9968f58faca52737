#include "cnet/qp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cnet/errors.hpp"

namespace cnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd stack_active(const QpProblem& pb, const std::vector<int>& working) {
  const int p = static_cast<int>(pb.E.rows());
  const int n = static_cast<int>(pb.Q.rows());
  MatrixXd A(p + working.size(), n);
  if (p > 0) A.topRows(p) = pb.E;
  for (size_t i = 0; i < working.size(); ++i)
    A.row(p + static_cast<int>(i)) = pb.G.row(working[i]);
  return A;
}

// Step for the equality-constrained subproblem restricted to {A p = 0}.
// Returns either a finite stationary step or an unbounded descent ray.
struct SubStep {
  VectorXd direction;
  bool ray = false;
  double reduced_min_eig = std::numeric_limits<double>::infinity();
};

SubStep null_space_step(const QpProblem& pb, const MatrixXd& A, const VectorXd& x) {
  const int n = static_cast<int>(pb.Q.rows());
  SubStep step;
  VectorXd grad = pb.Q * x + pb.c;

  MatrixXd Z;
  if (A.rows() == 0) {
    Z = MatrixXd::Identity(n, n);
  } else {
    Eigen::FullPivLU<MatrixXd> lu(A);
    Z = lu.kernel();
    if (lu.dimensionOfKernel() == 0) {
      step.direction = VectorXd::Zero(n);
      return step;
    }
  }

  MatrixXd R = Z.transpose() * pb.Q * Z;
  VectorXd g = Z.transpose() * grad;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(R);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  double eig_tol = 1e-10 * scale;
  step.reduced_min_eig = es.eigenvalues().minCoeff();

  VectorXd in_eigen = es.eigenvectors().transpose() * g;
  VectorXd finite = VectorXd::Zero(g.size());
  VectorXd flat = VectorXd::Zero(g.size());
  for (int i = 0; i < g.size(); ++i) {
    if (es.eigenvalues()[i] > eig_tol)
      finite[i] = -in_eigen[i] / es.eigenvalues()[i];
    else
      flat[i] = in_eigen[i];
  }
  if (flat.norm() > 1e-9 * std::max(1.0, g.norm())) {
    step.ray = true;
    step.direction = -Z * (es.eigenvectors() * flat);
    step.direction /= std::max(step.direction.norm(), 1e-300);
  } else {
    step.direction = Z * (es.eigenvectors() * finite);
  }
  return step;
}

}  // namespace

QpResult solve_qp(const QpProblem& pb, const VectorXd& x0, const QpOptions& options) {
  const int n = static_cast<int>(pb.Q.rows());
  const int p = static_cast<int>(pb.E.rows());
  const int m = static_cast<int>(pb.G.rows());
  const double tol = options.tolerance;
  int max_iter = options.max_iterations > 0 ? options.max_iterations
                                            : 10 * (n + p + m + 1);

  VectorXd x = x0;
  if (p > 0 && (pb.E * x - pb.e).lpNorm<Eigen::Infinity>() > 1e-7)
    throw validation_error("qp: starting point violates equality constraints");
  if (m > 0 && (pb.G * x - pb.h).maxCoeff() > 1e-7)
    throw validation_error("qp: starting point violates inequality constraints");

  // Initial working set: active inequalities at x0, kept linearly
  // independent together with the equality rows.
  std::vector<int> working;
  if (m > 0) {
    VectorXd slack = pb.h - pb.G * x;
    for (int i = 0; i < m; ++i) {
      if (slack[i] <= 1e-8) {
        working.push_back(i);
        MatrixXd A = stack_active(pb, working);
        if (Eigen::FullPivLU<MatrixXd>(A).rank() <
            static_cast<Eigen::Index>(p + working.size()))
          working.pop_back();
      }
    }
  }

  QpResult result;
  for (int iter = 0; iter < max_iter; ++iter) {
    result.iterations = iter + 1;
    MatrixXd A = stack_active(pb, working);
    SubStep step = null_space_step(pb, A, x);

    if (!step.ray && step.direction.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working surface; check multiplier signs.
      VectorXd grad = pb.Q * x + pb.c;
      VectorXd lambda;
      if (A.rows() > 0)
        lambda = A.transpose().colPivHouseholderQr().solve(-grad);
      else
        lambda = VectorXd::Zero(0);

      // Working set is kept sorted by row index, so the first minimum
      // realizes the lowest-index tie-break.
      int drop = -1;
      double most_negative = -tol * std::max(1.0, grad.norm());
      for (size_t i = 0; i < working.size(); ++i) {
        double mult = lambda[p + static_cast<int>(i)];
        if (mult < most_negative) {
          most_negative = mult;
          drop = static_cast<int>(i);
        }
      }
      if (drop < 0) {
        result.x = x;
        result.eq_multipliers = lambda.head(p);
        result.ineq_multipliers = VectorXd::Zero(m);
        for (size_t i = 0; i < working.size(); ++i)
          result.ineq_multipliers[working[i]] =
              std::max(0.0, lambda[p + static_cast<int>(i)]);
        result.objective = 0.5 * x.dot(pb.Q * x) + pb.c.dot(x);
        result.active_set = working;
        result.unique = step.reduced_min_eig >
                        1e-9 * std::max(1.0, pb.Q.cwiseAbs().maxCoeff());
        return result;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    // Ratio test against inactive inequalities.
    double alpha = step.ray ? std::numeric_limits<double>::infinity() : 1.0;
    int blocker = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      double advance = pb.G.row(i).dot(step.direction);
      if (advance > tol) {
        double gap = pb.h[i] - pb.G.row(i).dot(x);
        double ratio = std::max(0.0, gap) / advance;
        if (ratio < alpha - 1e-14) {
          alpha = ratio;
          blocker = i;
        }
      }
    }
    if (step.ray && blocker < 0)
      throw unbounded_error("qp: objective unbounded below on the feasible set");

    x += alpha * step.direction;
    if (blocker >= 0 && (step.ray || alpha < 1.0 - 1e-14))
      working.insert(std::upper_bound(working.begin(), working.end(), blocker),
                     blocker);
  }
  throw max_iterations_error("qp: active-set iteration limit reached");
}

}  // namespace cnet
