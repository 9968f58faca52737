#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cnet/errors.hpp"

namespace cnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Linear inverse demand p(d) = alpha - beta*d.
struct MarketSpec {
  double alpha = 1.0;  // price intercept
  double beta = 1.0;   // demand slope
};

// Convex quadratic production cost c(q) = c_lin*q + 0.5*c_quad*q^2.
struct CostFn {
  double c_lin = 0.0;
  double c_quad = 0.0;

  double cost(double q) const { return c_lin * q + 0.5 * c_quad * q * q; }
  double marginal(double q) const { return c_lin + c_quad * q; }
  double curvature() const { return c_quad; }
};

struct FirmSpec {
  int market_id = 0;  // the single market this firm supplies
  CostFn cost;
};

// Feasible reallocations of the market maker.
struct Polytope {
  MatrixXd A;  // rows x |M|
  VectorXd b;
};
struct Unconstrained {};
struct ZeroTransport {};
using TransportSet = std::variant<Polytope, Unconstrained, ZeroTransport>;

struct GameInstance {
  std::vector<MarketSpec> markets;
  std::vector<FirmSpec> firms;
  TransportSet transport = Unconstrained{};

  int num_markets() const { return static_cast<int>(markets.size()); }
  int num_firms() const { return static_cast<int>(firms.size()); }
  std::vector<int> firms_in_market(int m) const;

  // Throws validation_error on structural problems (empty sets, bad
  // indices, nonpositive demand parameters, negative costs, polytope shape
  // mismatch, or a polytope that excludes r = 0).
  void validate() const;
};

// Surplus weights (theta_C, theta_P, theta_M).
struct DesignParams {
  double theta_c = 1.0;
  double theta_p = 1.0;
  double theta_m = 1.0;

  double potential_margin() const { return theta_m + theta_p - theta_c; }
  double concavity_margin() const { return 2.0 * theta_m - theta_c; }
  double trade_margin() const { return 3.0 * theta_m - theta_c - theta_p; }

  void validate() const;
};

enum class ThetaPreset { SocialWelfare, ConsumerSurplus, ResidualWelfare, MerchandisingSurplus };

DesignParams theta_preset(ThetaPreset name);
DesignParams theta_preset(const std::string& name);  // "sw","cs","rsw","ms"
DesignParams simplex_normalize(const DesignParams& theta);

struct Multipliers {
  double lambda_balance = 0.0;  // for 1'r = 0
  VectorXd mu_firm;             // for q >= 0
  VectorXd nu_transport;        // for Ar <= b (empty unless polytope)
};

struct Allocation {
  VectorXd q;  // per firm, >= 0
  VectorXd r;  // per market, signed
  std::optional<Multipliers> multipliers;
};

Allocation zero_allocation(const GameInstance& game);

// Feasibility of an allocation against the game (dimensions, q >= 0,
// balance, transport membership).  Tolerances follow the solver defaults.
bool allocation_feasible(const GameInstance& game, const Allocation& alloc,
                         double tol = 1e-9);

struct SurplusBreakdown {
  VectorXd cs;  // per market
  VectorXd ps;
  VectorXd ms;

  double total_cs() const { return cs.sum(); }
  double total_ps() const { return ps.sum(); }
  double total_ms() const { return ms.sum(); }
  double welfare() const { return cs.sum() + ps.sum() + ms.sum(); }
};

double price(const MarketSpec& market, double demand);

// Aggregate firm supply per market.
VectorXd market_production(const GameInstance& game, const VectorXd& q);

double firm_profit(const GameInstance& game, const Allocation& alloc, int f);

SurplusBreakdown surplus_breakdown(const GameInstance& game, const Allocation& alloc);

double welfare(const GameInstance& game, const Allocation& alloc);

// theta_C * CS + theta_P * PS + theta_M * MS, summed over markets.
double mm_payoff(const GameInstance& game, const Allocation& alloc,
                 const DesignParams& theta);

// Weighted potential of the game, in the expanded quadratic form.  Defined
// for every theta; it is an actual potential only when
// theta_M + theta_P - theta_C > 0.
double potential(const GameInstance& game, const Allocation& alloc,
                 const DesignParams& theta);

// Analytic gradients.
double firm_profit_gradient(const GameInstance& game, const Allocation& alloc, int f);

struct PayoffGradient {
  VectorXd dq;
  VectorXd dr;
};

PayoffGradient potential_gradient(const GameInstance& game, const Allocation& alloc,
                                  const DesignParams& theta);
PayoffGradient mm_payoff_gradient(const GameInstance& game, const Allocation& alloc,
                                  const DesignParams& theta);

}  // namespace cnet
