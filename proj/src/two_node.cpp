#include "cnet/two_node.hpp"

#include <algorithm>
#include <cmath>

namespace cnet {

namespace {

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

RSet singleton(double r) {
  RSet s;
  s.kind = RSet::Kind::Singleton;
  s.values = {r};
  return s;
}

RSet interval(double b) {
  RSet s;
  s.kind = RSet::Kind::Interval;
  s.lo = -b;
  s.hi = b;
  return s;
}

RSet finite(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               values.end());
  RSet s;
  s.kind = values.size() == 1 ? RSet::Kind::Singleton : RSet::Kind::Finite;
  s.values = std::move(values);
  return s;
}

int checked_sign(const Rational& value, const Rational& scale, const char* what) {
  SignTest t = test_sign(value, scale);
  if (t.near_boundary)
    throw boundary_ambiguous(std::string("two-node regime test '") + what +
                             "' falls inside the exact-comparison band");
  return t.sign;
}

}  // namespace

void TwoNodeParams::validate() const {
  if (c1 < 0.0 || c2 < 0.0) throw validation_error("marginal costs must be nonnegative");
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw validation_error("alpha and beta must be positive");
  if (b < 0.0) throw validation_error("line capacity must be nonnegative");
  double floor = b * beta + std::max(c1, c2);
  if (alpha < floor)
    throw validation_error("requires alpha >= b*beta + max(c1, c2)");
}

GameInstance TwoNodeParams::to_game() const {
  GameInstance game;
  game.markets = {{alpha, beta}, {alpha, beta}};
  game.firms = {{0, {c1, 0.0}}, {1, {c2, 0.0}}};
  Polytope box;
  box.A = MatrixXd(4, 2);
  box.A << 1, 0, -1, 0, 0, 1, 0, -1;
  box.b = VectorXd::Constant(4, b);
  game.transport = box;
  return game;
}

RSet r_set(const TwoNodeParams& params, const DesignParams& theta) {
  theta.validate();
  return r_set(params, rational_theta(theta.theta_c, theta.theta_p, theta.theta_m));
}

RSet r_set(const TwoNodeParams& params, const RationalTheta& theta) {
  params.validate();
  Rational conc = theta.concavity_margin();
  Rational trade = theta.trade_margin();
  Rational pot = theta.potential_margin();
  Rational scale = theta.max_abs();
  Rational dc = rat(params.c1) - rat(params.c2);
  Rational beta = rat(params.beta);
  Rational cap = rat(params.b);
  Rational flow_scale = cap < 1 ? Rational(1) : cap;
  Rational cost_scale = abs(dc) + rat(params.c1) + rat(params.c2);

  int s_conc = checked_sign(conc, scale, "2tM-tC");
  double b = params.b;

  auto sgn_dc_endpoint = [&]() {
    int s = checked_sign(dc, cost_scale, "delta C");
    return singleton(s >= 0 ? b : -b);
  };

  if (s_conc > 0) {
    int s_trade = checked_sign(trade, scale, "3tM-tC-tP");
    if (s_trade > 0) {
      Rational rstar = pot / trade * dc / (2 * beta);
      return singleton(clip(to_double(rstar), -b, b));
    }
    if (s_trade == 0) {
      int s_dc = checked_sign(dc, cost_scale, "delta C");
      if (s_dc == 0) return interval(b);
      return singleton(s_dc > 0 ? b : -b);
    }
    Rational rstar = pot / trade * dc / (2 * beta);
    int inside = checked_sign(cap - abs(rstar), flow_scale, "|kappa dC/2beta| vs b");
    if (inside >= 0) return finite({-b, b, to_double(rstar)});
    return sgn_dc_endpoint();
  }

  if (s_conc == 0) {
    int s_pot = checked_sign(pot, scale, "tM+tP-tC");
    Rational rstar = -dc / (2 * beta);
    if (s_pot < 0) return singleton(clip(to_double(rstar), -b, b));
    if (s_pot == 0) return interval(b);
    int inside = checked_sign(cap - abs(rstar), flow_scale, "|dC/2beta| vs b");
    if (inside >= 0) return finite({-b, b, to_double(rstar)});
    return sgn_dc_endpoint();
  }

  int s_pot = checked_sign(pot, scale, "tM+tP-tC");
  Rational half_spread = abs(dc) / (2 * beta);
  if (s_pot < 0) {
    int outside = checked_sign(half_spread - cap, flow_scale, "|dC/2beta| vs b");
    if (outside >= 0) {
      int s_dc = checked_sign(dc, cost_scale, "delta C");
      return singleton(s_dc >= 0 ? -b : b);
    }
    RSet empty;
    return empty;
  }
  if (s_pot == 0) return finite({-b, b});
  int inside = checked_sign(cap - half_spread, flow_scale, "|dC/2beta| vs b");
  if (inside >= 0) return finite({-b, b});
  return sgn_dc_endpoint();
}

TwoNodeEquilibria analytic_equilibria(const TwoNodeParams& params,
                                      const DesignParams& theta) {
  return analytic_equilibria(params,
                             rational_theta(theta.theta_c, theta.theta_p, theta.theta_m));
}

TwoNodeEquilibria analytic_equilibria(const TwoNodeParams& params,
                                      const RationalTheta& theta) {
  TwoNodeEquilibria eq;
  eq.rset = r_set(params, theta);
  if (eq.rset.kind == RSet::Kind::Interval) {
    eq.continuum = true;
    return eq;
  }
  for (double r : eq.rset.values) {
    double q1 = 0.5 * ((params.alpha - params.c1) / params.beta - r);
    double q2 = 0.5 * ((params.alpha - params.c2) / params.beta + r);
    eq.points.emplace_back(q1, q2, r);
  }
  return eq;
}

double rho(double r, const DesignParams& theta, const TwoNodeParams& params) {
  return 0.5 * params.delta_c() * theta.potential_margin() -
         theta.trade_margin() * params.beta * r;
}

namespace {

// Market maker payoff along the balanced line for fixed quantities.
double line_payoff(const TwoNodeParams& p, const DesignParams& theta, double q1,
                   double q2, double r) {
  double d1 = q1 + r;
  double d2 = q2 - r;
  double p1 = p.alpha - p.beta * d1;
  double p2 = p.alpha - p.beta * d2;
  double cs = 0.5 * p.beta * (d1 * d1 + d2 * d2);
  double ps = q1 * p1 - p.c1 * q1 + q2 * p2 - p.c2 * q2;
  double ms = r * p1 - r * p2;
  return theta.theta_c * cs + theta.theta_p * ps + theta.theta_m * ms;
}

}  // namespace

std::vector<double> brute_force_equilibria(const TwoNodeParams& params,
                                           const DesignParams& theta, int grid_n) {
  params.validate();
  if (grid_n < 100) throw validation_error("brute force grid needs at least 100 cells");
  const double b = params.b;
  const double spacing = 2.0 * b / grid_n;
  // Tolerance scales with the grid cell so that the cell containing a true
  // equilibrium always survives the discrete deviation scan.
  const double curvature =
      params.beta * (std::abs(theta.concavity_margin()) +
                     std::abs(theta.trade_margin()) +
                     std::abs(theta.potential_margin()) + 1.0);
  const double tol = 10.0 * curvature * spacing * spacing + 1e-12;

  std::vector<double> survivors;
  for (int s = 0; s <= grid_n; ++s) {
    double r = -b + spacing * s;
    double q1 = 0.5 * ((params.alpha - params.c1) / params.beta - r);
    double q2 = 0.5 * ((params.alpha - params.c2) / params.beta + r);
    double base = line_payoff(params, theta, q1, q2, r);
    double best = base;
    for (int s2 = 0; s2 <= grid_n; ++s2) {
      double r2 = -b + spacing * s2;
      best = std::max(best, line_payoff(params, theta, q1, q2, r2));
    }
    if (best - base <= tol) survivors.push_back(r);
  }
  return survivors;
}

bool oracle_agrees(const TwoNodeParams& params, const RSet& analytic,
                   const std::vector<double>& survivors, int grid_n) {
  const double spacing = 2.0 * params.b / grid_n;
  if (analytic.kind == RSet::Kind::Empty) return survivors.empty();
  if (analytic.kind == RSet::Kind::Interval)
    return static_cast<int>(survivors.size()) >= static_cast<int>(0.95 * grid_n);

  // Every analytic flow is realized by a survivor within one grid cell.
  for (double r : analytic.values) {
    bool hit = false;
    for (double s : survivors)
      if (std::abs(s - r) <= 1.01 * spacing) { hit = true; break; }
    if (!hit) return false;
  }
  // Survivors form contiguous runs; there must be exactly one per analytic
  // flow and each run must touch one.
  std::vector<std::pair<double, double>> runs;
  for (double s : survivors) {
    if (!runs.empty() && s - runs.back().second <= 3.0 * spacing)
      runs.back().second = s;
    else
      runs.emplace_back(s, s);
  }
  if (runs.size() != analytic.values.size()) return false;
  for (const auto& run : runs) {
    bool touched = false;
    for (double r : analytic.values)
      if (r >= run.first - 1.01 * spacing && r <= run.second + 1.01 * spacing)
        touched = true;
    if (!touched) return false;
  }
  return true;
}

}  // namespace cnet
