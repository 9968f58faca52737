#include "cnet/closed_form.hpp"

#include <cmath>

namespace cnet {

namespace {

void require(bool ok, const std::string& inequality, double slack) {
  if (!ok) throw precondition_violated(inequality, slack);
}

}  // namespace

double HomogeneousInstance::cost_stddev() const {
  double mean = mean_cost();
  double acc = 0.0;
  for (int f = 0; f < num_firms(); ++f) {
    double d = marginal_costs[f] - mean;
    acc += d * d;
  }
  return std::sqrt(acc / num_firms());
}

void HomogeneousInstance::validate() const {
  if (num_firms() == 0) throw validation_error("instance has no firms");
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw validation_error("alpha and beta must be positive");
  if ((marginal_costs.array() < 0.0).any())
    throw validation_error("marginal costs must be nonnegative");
}

GameInstance HomogeneousInstance::to_game(TransportSet transport) const {
  GameInstance game;
  for (int f = 0; f < num_firms(); ++f) {
    game.markets.push_back({alpha, beta});
    game.firms.push_back({f, {marginal_costs[f], 0.0}});
  }
  game.transport = std::move(transport);
  return game;
}

double kappa(const DesignParams& theta) {
  double denom = theta.trade_margin();
  if (denom == 0.0)
    throw validation_error("kappa undefined: 3*theta_M-theta_C-theta_P = 0");
  return theta.potential_margin() / denom;
}

Allocation unconstrained_equilibrium(const HomogeneousInstance& inst,
                                     const DesignParams& theta) {
  inst.validate();
  theta.validate();
  double pot = theta.potential_margin();
  double conc = theta.concavity_margin();
  require(pot > 0.0, "theta_M+theta_P-theta_C > 0", pot);
  require(conc > 0.5 * pot, "2*theta_M-theta_C > (theta_M+theta_P-theta_C)/2",
          conc - 0.5 * pot);
  double k = kappa(theta);
  double cbar = inst.mean_cost();
  double cmax = inst.marginal_costs.maxCoeff();
  double alpha_floor = (1.0 + k) * cmax - k * cbar;
  require(inst.alpha >= alpha_floor, "alpha >= (1+kappa) max C - kappa Cbar",
          inst.alpha - alpha_floor);

  const int F = inst.num_firms();
  Allocation a;
  a.q = VectorXd::Zero(F);
  a.r = VectorXd::Zero(F);
  for (int f = 0; f < F; ++f) {
    double dev = inst.marginal_costs[f] - cbar;
    a.q[f] = (inst.alpha - cbar - (1.0 + k) * dev) / (2.0 * inst.beta);
    a.r[f] = k * dev / inst.beta;
  }
  Multipliers mult;
  mult.mu_firm = VectorXd::Zero(F);
  mult.lambda_balance = balance_multiplier_witness(inst, theta);
  a.multipliers = mult;
  return a;
}

double unconstrained_welfare(const HomogeneousInstance& inst, const DesignParams& theta) {
  Allocation probe = unconstrained_equilibrium(inst, theta);  // precondition check
  (void)probe;
  double k = kappa(theta);
  double cbar = inst.mean_cost();
  double sigma2 = inst.cost_stddev() * inst.cost_stddev();
  double gap = inst.alpha - cbar;
  return 3.0 * inst.num_firms() / (8.0 * inst.beta) *
         (gap * gap + sigma2 + k * (6.0 - k) * sigma2 / 3.0);
}

NonNetworkedResult nonnetworked_equilibrium(const HomogeneousInstance& inst) {
  inst.validate();
  double cmax = inst.marginal_costs.maxCoeff();
  require(inst.alpha >= cmax, "alpha >= max C", inst.alpha - cmax);
  NonNetworkedResult out;
  out.q = (inst.alpha - inst.marginal_costs.array()) / (2.0 * inst.beta);
  double gap = inst.alpha - inst.mean_cost();
  double sigma2 = inst.cost_stddev() * inst.cost_stddev();
  out.welfare = 3.0 * inst.num_firms() / (8.0 * inst.beta) * (gap * gap + sigma2);
  return out;
}

AggregatedResult aggregated_equilibrium(const HomogeneousInstance& inst) {
  inst.validate();
  const double F = inst.num_firms();
  double cbar = inst.mean_cost();
  double cmax = inst.marginal_costs.maxCoeff();
  double alpha_floor = (1.0 + F) * cmax - F * cbar;
  require(inst.alpha >= alpha_floor, "alpha >= (1+|F|) max C - |F| Cbar",
          inst.alpha - alpha_floor);
  AggregatedResult out;
  out.q = F / ((1.0 + F) * inst.beta) *
          (inst.alpha - cbar - (1.0 + F) * (inst.marginal_costs.array() - cbar));
  double gap = inst.alpha - cbar;
  double sigma2 = inst.cost_stddev() * inst.cost_stddev();
  out.welfare = F * F * (2.0 + F) / (2.0 * (1.0 + F) * (1.0 + F) * inst.beta) *
                (gap * gap + 2.0 * (1.0 + F) * (1.0 + F) / (2.0 + F) * sigma2);
  out.total_production = F * F * gap / ((1.0 + F) * inst.beta);
  return out;
}

WelfareComparison welfare_comparison(const HomogeneousInstance& inst,
                                     const DesignParams& theta) {
  WelfareComparison cmp;
  cmp.networked = unconstrained_welfare(inst, theta);
  cmp.networked_sw_design = unconstrained_welfare(inst, theta_preset(ThetaPreset::SocialWelfare));
  cmp.nonnetworked = nonnetworked_equilibrium(inst).welfare;
  cmp.aggregated = aggregated_equilibrium(inst).welfare;
  cmp.ratio_to_sw_design = cmp.networked / cmp.networked_sw_design;
  cmp.ratio_networked_to_nonnetworked = cmp.networked / cmp.nonnetworked;
  cmp.ratio_aggregated_to_networked = cmp.aggregated / cmp.networked;
  cmp.total_production =
      inst.num_firms() * (inst.alpha - inst.mean_cost()) / (2.0 * inst.beta);
  return cmp;
}

double balance_multiplier_witness(const HomogeneousInstance& inst,
                                  const DesignParams& theta) {
  return 0.5 * theta.potential_margin() * (inst.mean_cost() - inst.alpha) +
         theta.theta_m * inst.alpha;
}

}  // namespace cnet
