#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnet/exact.hpp"
#include "cnet/model.hpp"

namespace cnet {

// What the sufficient conditions guarantee for a design parameter:
// existence of an equilibrium, whether the game is a weighted potential
// game, whether every equilibrium is an optimizer of the potential, and
// whether that optimizer (hence the equilibrium) is unique.
struct RegionReport {
  double gamma = 0.0;                       // instance threshold, in [0,1)
  std::optional<double> gamma_plus;         // concavity/potential ratio
  bool is_potential_game = false;           // theta_M+theta_P-theta_C > 0
  bool mm_payoff_concave_in_r = false;      // 2*theta_M-theta_C >= 0
  bool existence_guaranteed = false;
  bool equilibria_equal_optimizers = false; // non-strict condition
  bool unique_via_potential = false;        // strict condition
  // Sign tests that fell inside the exact-comparison band of a boundary.
  // Flags are classified by the actual sign but recorded here rather than
  // silently trusted.
  std::vector<std::string> near_boundary;
};

// Uniqueness threshold of the instance:
//   1 - min_m (1 + sum_{f in F(m)} beta_m/(beta_m + c_f''))^{-1}.
double gamma(const GameInstance& game);
Rational gamma_exact(const GameInstance& game);

// (2*theta_M-theta_C)/(theta_M+theta_P-theta_C), defined only when the
// denominator is positive.
std::optional<double> gamma_plus(const DesignParams& theta);

RegionReport classify(const GameInstance& game, const DesignParams& theta);
RegionReport classify(const GameInstance& game, const RationalTheta& theta);

// Per-market curvature block of the potential, normalized by
// theta_M+theta_P-theta_C (which must be positive): dimension |F(m)|+1,
// last row/column for the reallocation variable.  Positive semidefinite
// over all markets exactly on the non-strict guarantee region.  With
// quadratic costs the block does not depend on the evaluation point.
MatrixXd hessian_block(const GameInstance& game, const DesignParams& theta, int m);

// Unnormalized curvature block of the potential (no sign flip, no scaling).
MatrixXd hessian_block_raw(const GameInstance& game, const DesignParams& theta, int m);

// True when the transport set is compact (Zero, or a bounded polytope).
bool transport_compact(const GameInstance& game);

}  // namespace cnet
