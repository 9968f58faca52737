#include "cnet/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kTol = 1e-9;

// Tableau simplex in canonical form: T = [B^-1 A | B^-1 b], basis[i] is the
// variable owning row i.  Bland's rule throughout, so the method is
// deterministic and cannot cycle.
struct Tableau {
  MatrixXd T;               // m x (n_total + 1)
  std::vector<int> basis;   // m
  int n_total;

  int m() const { return static_cast<int>(T.rows()); }
  double rhs(int i) const { return T(i, n_total); }

  void pivot(int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i < m(); ++i) {
      if (i == row) continue;
      double factor = T(i, col);
      if (factor != 0.0) T.row(i) -= factor * T.row(row);
    }
    basis[row] = col;
  }

  // Minimizes cost'x over columns [0, n_active).  Returns false when the
  // problem is unbounded below.
  bool run(const VectorXd& cost, int n_active) {
    for (;;) {
      VectorXd dual = VectorXd::Zero(m());
      for (int i = 0; i < m(); ++i) dual[i] = cost[basis[i]];
      int enter = -1;
      for (int j = 0; j < n_active; ++j) {
        double reduced = cost[j] - dual.dot(T.col(j));
        if (reduced < -kTol) { enter = j; break; }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m(); ++i) {
        if (T(i, enter) > kTol) {
          double ratio = rhs(i) / T(i, enter);
          if (ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const VectorXd& c,
                  const MatrixXd& A_ub, const VectorXd& b_ub,
                  const MatrixXd& A_eq, const VectorXd& b_eq) {
  const int n = static_cast<int>(c.size());
  const int m_ub = static_cast<int>(A_ub.rows());
  const int m_eq = static_cast<int>(A_eq.rows());
  const int m = m_ub + m_eq;

  // Standard form: free x split as x+ - x-, slack per inequality, then one
  // artificial per row for phase 1.
  const int n_struct = 2 * n + m_ub;
  const int n_total = n_struct + m;

  MatrixXd T = MatrixXd::Zero(m, n_total + 1);
  for (int i = 0; i < m_ub; ++i) {
    T.block(i, 0, 1, n) = A_ub.row(i);
    T.block(i, n, 1, n) = -A_ub.row(i);
    T(i, 2 * n + i) = 1.0;
    T(i, n_total) = b_ub[i];
  }
  for (int i = 0; i < m_eq; ++i) {
    int row = m_ub + i;
    T.block(row, 0, 1, n) = A_eq.row(i);
    T.block(row, n, 1, n) = -A_eq.row(i);
    T(row, n_total) = b_eq[i];
  }
  for (int i = 0; i < m; ++i) {
    if (T(i, n_total) < 0.0) T.row(i) = -T.row(i);
    T(i, n_struct + i) = 1.0;
  }

  Tableau tab;
  tab.T = std::move(T);
  tab.n_total = n_total;
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) tab.basis[i] = n_struct + i;

  LpResult result;

  // Phase 1.
  if (m > 0) {
    VectorXd phase1 = VectorXd::Zero(n_total);
    for (int i = 0; i < m; ++i) phase1[n_struct + i] = 1.0;
    tab.run(phase1, n_total);
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= n_struct) infeasibility += tab.rhs(i);
    if (infeasibility > 1e-7) {
      result.status = LpResult::Status::Infeasible;
      return result;
    }
    // Pivot remaining artificials out; an all-zero structural row is
    // redundant and gets dropped.
    for (int i = 0; i < tab.m();) {
      if (tab.basis[i] < n_struct) { ++i; continue; }
      int col = -1;
      for (int j = 0; j < n_struct; ++j)
        if (std::abs(tab.T(i, j)) > kTol) { col = j; break; }
      if (col >= 0) {
        tab.pivot(i, col);
        ++i;
      } else {
        int last = tab.m() - 1;
        tab.T.row(i) = tab.T.row(last);
        tab.basis[i] = tab.basis[last];
        tab.T.conservativeResize(last, Eigen::NoChange);
        tab.basis.resize(last);
      }
    }
  }

  // Phase 2 over structural columns only.
  VectorXd phase2 = VectorXd::Zero(n_total);
  phase2.head(n) = c;
  phase2.segment(n, n) = -c;
  if (!tab.run(phase2, n_struct)) {
    result.status = LpResult::Status::Unbounded;
    return result;
  }

  VectorXd xs = VectorXd::Zero(n_total);
  for (int i = 0; i < tab.m(); ++i) xs[tab.basis[i]] = tab.rhs(i);
  result.x = xs.head(n) - xs.segment(n, n);
  result.objective = c.dot(result.x);
  result.status = LpResult::Status::Optimal;
  return result;
}

LpResult lp_minimize(const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                     const MatrixXd& E, const VectorXd& e) {
  return solve_lp(c, A, b, E, e);
}

LpResult lp_maximize(const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                     const MatrixXd& E, const VectorXd& e) {
  LpResult r = solve_lp(-c, A, b, E, e);
  r.objective = -r.objective;
  return r;
}

}  // namespace cnet
