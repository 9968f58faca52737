#pragma once

#include <vector>

#include "cnet/exact.hpp"
#include "cnet/model.hpp"

namespace cnet {

// Two markets with identical demand, one linear-cost firm in each, joined
// by a line of capacity b.  The reallocation reduces to a scalar
// r = r_1 = -r_2 on [-b, +b].
struct TwoNodeParams {
  double c1 = 0.5;
  double c2 = 0.25;
  double alpha = 1.0;
  double beta = 1.0;
  double b = 0.5;

  double delta_c() const { return c1 - c2; }
  void validate() const;
  GameInstance to_game() const;
};

// The set of line flows appearing in some equilibrium.
struct RSet {
  enum class Kind { Empty, Singleton, Finite, Interval };
  Kind kind = Kind::Empty;
  std::vector<double> values;  // Singleton: 1 entry; Finite: up to 3, sorted
  double lo = 0.0, hi = 0.0;   // Interval bounds

  int cardinality() const {  // -1 for a continuum
    if (kind == Kind::Interval) return -1;
    return static_cast<int>(values.size());
  }
};

// Exact regime dispatch over the sign pattern of 2tM-tC, 3tM-tC-tP and
// tM+tP-tC, with clip and endpoint cases.  Inputs within the comparison
// band of a regime boundary raise boundary_ambiguous.
RSet r_set(const TwoNodeParams& params, const DesignParams& theta);
RSet r_set(const TwoNodeParams& params, const RationalTheta& theta);

struct TwoNodeEquilibria {
  RSet rset;
  // (q1, q2, r) triples; empty when the r-set is a continuum.
  std::vector<Eigen::Vector3d> points;
  bool continuum = false;
};

TwoNodeEquilibria analytic_equilibria(const TwoNodeParams& params,
                                      const DesignParams& theta);
TwoNodeEquilibria analytic_equilibria(const TwoNodeParams& params,
                                      const RationalTheta& theta);

// Derivative of the market maker payoff along the line flow, evaluated at
// the firms' best responses to r.
double rho(double r, const DesignParams& theta, const TwoNodeParams& params);

// Grid oracle: enumerate candidate flows, set quantities to the firms'
// exact best responses, and keep profiles no player can improve by more
// than a grid-aware tolerance.  Returns the surviving flows in grid order.
std::vector<double> brute_force_equilibria(const TwoNodeParams& params,
                                           const DesignParams& theta, int grid_n);

// Comparison used by the oracle tests: do the surviving grid flows match
// the analytic equilibrium set up to the grid spacing?
bool oracle_agrees(const TwoNodeParams& params, const RSet& analytic,
                   const std::vector<double>& survivors, int grid_n);

}  // namespace cnet
