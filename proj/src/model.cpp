#include "cnet/model.hpp"

#include <algorithm>
#include <cmath>

namespace cnet {

std::vector<int> GameInstance::firms_in_market(int m) const {
  std::vector<int> out;
  for (int f = 0; f < num_firms(); ++f)
    if (firms[f].market_id == m) out.push_back(f);
  return out;
}

void GameInstance::validate() const {
  if (markets.empty()) throw validation_error("game has no markets");
  if (firms.empty()) throw validation_error("game has no firms");
  for (int m = 0; m < num_markets(); ++m) {
    if (!(markets[m].alpha > 0.0))
      throw validation_error("market " + std::to_string(m) + ": alpha must be > 0");
    if (!(markets[m].beta > 0.0))
      throw validation_error("market " + std::to_string(m) + ": beta must be > 0");
  }
  for (int f = 0; f < num_firms(); ++f) {
    const FirmSpec& fs = firms[f];
    if (fs.market_id < 0 || fs.market_id >= num_markets())
      throw validation_error("firm " + std::to_string(f) + ": bad market index");
    if (fs.cost.c_lin < 0.0 || fs.cost.c_quad < 0.0)
      throw validation_error("firm " + std::to_string(f) + ": negative cost coefficient");
  }
  if (const auto* poly = std::get_if<Polytope>(&transport)) {
    if (poly->A.cols() != num_markets())
      throw validation_error("transport polytope has wrong column count");
    if (poly->A.rows() != poly->b.size())
      throw validation_error("transport polytope rows/rhs mismatch");
    // r = 0 is the solver's starting point; a marketplace whose network
    // forbids the no-trade outcome is rejected at load.
    if ((poly->b.array() < 0.0).any())
      throw validation_error("transport polytope excludes r = 0");
  }
}

void DesignParams::validate() const {
  if (theta_c < 0.0 || theta_p < 0.0 || theta_m < 0.0)
    throw validation_error("design weights must be nonnegative");
  if (theta_c == 0.0 && theta_p == 0.0 && theta_m == 0.0)
    throw validation_error("design weights must not all be zero");
}

DesignParams theta_preset(ThetaPreset name) {
  switch (name) {
    case ThetaPreset::SocialWelfare: return {1.0, 1.0, 1.0};
    case ThetaPreset::ConsumerSurplus: return {1.0, 0.0, 0.0};
    case ThetaPreset::ResidualWelfare: return {1.0, 0.0, 1.0};
    case ThetaPreset::MerchandisingSurplus: return {0.0, 0.0, 1.0};
  }
  throw validation_error("unknown theta preset");
}

DesignParams theta_preset(const std::string& name) {
  if (name == "sw") return theta_preset(ThetaPreset::SocialWelfare);
  if (name == "cs") return theta_preset(ThetaPreset::ConsumerSurplus);
  if (name == "rsw") return theta_preset(ThetaPreset::ResidualWelfare);
  if (name == "ms") return theta_preset(ThetaPreset::MerchandisingSurplus);
  throw validation_error("unknown theta preset '" + name + "'");
}

DesignParams simplex_normalize(const DesignParams& theta) {
  theta.validate();
  double s = theta.theta_c + theta.theta_p + theta.theta_m;
  return {theta.theta_c / s, theta.theta_p / s, theta.theta_m / s};
}

Allocation zero_allocation(const GameInstance& game) {
  Allocation a;
  a.q = VectorXd::Zero(game.num_firms());
  a.r = VectorXd::Zero(game.num_markets());
  return a;
}

bool allocation_feasible(const GameInstance& game, const Allocation& alloc,
                         double tol) {
  if (alloc.q.size() != game.num_firms()) return false;
  if (alloc.r.size() != game.num_markets()) return false;
  if ((alloc.q.array() < -tol).any()) return false;
  if (std::abs(alloc.r.sum()) > tol) return false;
  if (const auto* poly = std::get_if<Polytope>(&game.transport)) {
    VectorXd slack = poly->b - poly->A * alloc.r;
    if ((slack.array() < -tol).any()) return false;
  } else if (std::holds_alternative<ZeroTransport>(game.transport)) {
    if (alloc.r.lpNorm<Eigen::Infinity>() > tol) return false;
  }
  return true;
}

double price(const MarketSpec& market, double demand) {
  return market.alpha - market.beta * demand;
}

VectorXd market_production(const GameInstance& game, const VectorXd& q) {
  VectorXd Q = VectorXd::Zero(game.num_markets());
  for (int f = 0; f < game.num_firms(); ++f) Q[game.firms[f].market_id] += q[f];
  return Q;
}

double firm_profit(const GameInstance& game, const Allocation& alloc, int f) {
  if (f < 0 || f >= game.num_firms())
    throw validation_error("firm index out of range");
  int m = game.firms[f].market_id;
  VectorXd Q = market_production(game, alloc.q);
  double p = price(game.markets[m], alloc.r[m] + Q[m]);
  return alloc.q[f] * p - game.firms[f].cost.cost(alloc.q[f]);
}

SurplusBreakdown surplus_breakdown(const GameInstance& game, const Allocation& alloc) {
  int M = game.num_markets();
  SurplusBreakdown s;
  s.cs = VectorXd::Zero(M);
  s.ps = VectorXd::Zero(M);
  s.ms = VectorXd::Zero(M);
  VectorXd Q = market_production(game, alloc.q);
  VectorXd cost = VectorXd::Zero(M);
  for (int f = 0; f < game.num_firms(); ++f)
    cost[game.firms[f].market_id] += game.firms[f].cost.cost(alloc.q[f]);
  for (int m = 0; m < M; ++m) {
    double d = alloc.r[m] + Q[m];
    double p = price(game.markets[m], d);
    // For a linear demand curve the consumer-surplus integral collapses to
    // the triangle area beta*d^2/2, which is exact.
    s.cs[m] = 0.5 * game.markets[m].beta * d * d;
    s.ps[m] = Q[m] * p - cost[m];
    s.ms[m] = alloc.r[m] * p;
  }
  return s;
}

double welfare(const GameInstance& game, const Allocation& alloc) {
  return surplus_breakdown(game, alloc).welfare();
}

double mm_payoff(const GameInstance& game, const Allocation& alloc,
                 const DesignParams& theta) {
  SurplusBreakdown s = surplus_breakdown(game, alloc);
  return theta.theta_c * s.total_cs() + theta.theta_p * s.total_ps() +
         theta.theta_m * s.total_ms();
}

double potential(const GameInstance& game, const Allocation& alloc,
                 const DesignParams& theta) {
  double w = theta.potential_margin();
  VectorXd Q = market_production(game, alloc.q);
  double value = 0.0;
  for (int m = 0; m < game.num_markets(); ++m) {
    const MarketSpec& mk = game.markets[m];
    double rm = alloc.r[m];
    value += w * (mk.alpha - mk.beta * rm) * Q[m];
    value -= w * 0.5 * mk.beta * Q[m] * Q[m];
    value += (theta.theta_c - 2.0 * theta.theta_m) * 0.5 * mk.beta * rm * rm;
    value += theta.theta_m * mk.alpha * rm;
  }
  for (int f = 0; f < game.num_firms(); ++f) {
    const MarketSpec& mk = game.markets[game.firms[f].market_id];
    double qf = alloc.q[f];
    value -= w * (game.firms[f].cost.cost(qf) + 0.5 * mk.beta * qf * qf);
  }
  return value;
}

double firm_profit_gradient(const GameInstance& game, const Allocation& alloc, int f) {
  int m = game.firms[f].market_id;
  const MarketSpec& mk = game.markets[m];
  VectorXd Q = market_production(game, alloc.q);
  double d = alloc.r[m] + Q[m];
  return mk.alpha - mk.beta * d - mk.beta * alloc.q[f] -
         game.firms[f].cost.marginal(alloc.q[f]);
}

PayoffGradient potential_gradient(const GameInstance& game, const Allocation& alloc,
                                  const DesignParams& theta) {
  double w = theta.potential_margin();
  VectorXd Q = market_production(game, alloc.q);
  PayoffGradient g;
  g.dq = VectorXd::Zero(game.num_firms());
  g.dr = VectorXd::Zero(game.num_markets());
  for (int f = 0; f < game.num_firms(); ++f) {
    int m = game.firms[f].market_id;
    const MarketSpec& mk = game.markets[m];
    g.dq[f] = w * (mk.alpha - mk.beta * alloc.r[m] -
                   game.firms[f].cost.marginal(alloc.q[f]) - mk.beta * Q[m] -
                   mk.beta * alloc.q[f]);
  }
  for (int m = 0; m < game.num_markets(); ++m) {
    const MarketSpec& mk = game.markets[m];
    g.dr[m] = -w * mk.beta * Q[m] +
              (theta.theta_c - 2.0 * theta.theta_m) * mk.beta * alloc.r[m] +
              theta.theta_m * mk.alpha;
  }
  return g;
}

PayoffGradient mm_payoff_gradient(const GameInstance& game, const Allocation& alloc,
                                  const DesignParams& theta) {
  VectorXd Q = market_production(game, alloc.q);
  PayoffGradient g;
  g.dq = VectorXd::Zero(game.num_firms());
  g.dr = VectorXd::Zero(game.num_markets());
  for (int m = 0; m < game.num_markets(); ++m) {
    const MarketSpec& mk = game.markets[m];
    double d = alloc.r[m] + Q[m];
    g.dr[m] = theta.theta_c * mk.beta * d - theta.theta_p * mk.beta * Q[m] +
              theta.theta_m * (mk.alpha - mk.beta * d - mk.beta * alloc.r[m]);
  }
  for (int f = 0; f < game.num_firms(); ++f) {
    int m = game.firms[f].market_id;
    const MarketSpec& mk = game.markets[m];
    double d = alloc.r[m] + Q[m];
    g.dq[f] = theta.theta_c * mk.beta * d +
              theta.theta_p * (mk.alpha - mk.beta * d - mk.beta * Q[m] -
                               game.firms[f].cost.marginal(alloc.q[f])) -
              theta.theta_m * mk.beta * alloc.r[m];
  }
  return g;
}

}  // namespace cnet
