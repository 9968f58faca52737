#pragma once

#include "cnet/model.hpp"

namespace cnet {

// One firm per market, linear costs, identical linear demand across
// markets.  The setting where the equilibrium admits explicit formulas.
struct HomogeneousInstance {
  VectorXd marginal_costs;  // C_f, one firm per market
  double alpha = 1.0;
  double beta = 1.0;

  int num_firms() const { return static_cast<int>(marginal_costs.size()); }
  double mean_cost() const { return marginal_costs.mean(); }
  // Population convention (divide by the number of firms).
  double cost_stddev() const;

  void validate() const;

  // The equivalent GameInstance with the requested transport set.
  GameInstance to_game(TransportSet transport) const;
};

// kappa = (theta_M+theta_P-theta_C)/(3*theta_M-theta_C-theta_P).
double kappa(const DesignParams& theta);

// Unique equilibrium on the unconstrained network.  Requires
// 2*theta_M-theta_C > (theta_M+theta_P-theta_C)/2 > 0 and the intercept
// condition alpha >= (1+kappa) max C - kappa Cbar.
Allocation unconstrained_equilibrium(const HomogeneousInstance& inst,
                                     const DesignParams& theta);
double unconstrained_welfare(const HomogeneousInstance& inst, const DesignParams& theta);

// Isolated markets (no transport): per-firm monopoly outputs.
struct NonNetworkedResult {
  VectorXd q;
  double welfare = 0.0;
};
NonNetworkedResult nonnetworked_equilibrium(const HomogeneousInstance& inst);

// All markets merged into one with the aggregate demand curve.
struct AggregatedResult {
  VectorXd q;
  double welfare = 0.0;
  double total_production = 0.0;
};
AggregatedResult aggregated_equilibrium(const HomogeneousInstance& inst);

struct WelfareComparison {
  double networked = 0.0;
  double networked_sw_design = 0.0;  // same instance at the all-ones weights
  double nonnetworked = 0.0;
  double aggregated = 0.0;
  double ratio_to_sw_design = 0.0;
  double ratio_networked_to_nonnetworked = 0.0;
  double ratio_aggregated_to_networked = 0.0;
  double total_production = 0.0;  // identical across designs
};

WelfareComparison welfare_comparison(const HomogeneousInstance& inst,
                                     const DesignParams& theta);

// Multiplier witness making the closed form satisfy the optimality system:
// mu = 0 and the balance multiplier below.
double balance_multiplier_witness(const HomogeneousInstance& inst,
                                  const DesignParams& theta);

}  // namespace cnet
