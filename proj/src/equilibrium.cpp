#include "cnet/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cnet/qp.hpp"

namespace cnet {

namespace {

// Quadratic data of the potential in x = (q, r):
//   potential(x) = -0.5 x'Qx + c'x   (no constant term).
void potential_quadratic(const GameInstance& game, const DesignParams& theta,
                         MatrixXd& Q, VectorXd& c) {
  const int F = game.num_firms();
  const int M = game.num_markets();
  const double w = theta.potential_margin();
  Q = MatrixXd::Zero(F + M, F + M);
  c = VectorXd::Zero(F + M);
  for (int f = 0; f < F; ++f) {
    int m = game.firms[f].market_id;
    const MarketSpec& mk = game.markets[m];
    c[f] = w * (mk.alpha - game.firms[f].cost.c_lin);
    Q(f, f) = w * (2.0 * mk.beta + game.firms[f].cost.c_quad);
    for (int g = f + 1; g < F; ++g)
      if (game.firms[g].market_id == m) Q(f, g) = Q(g, f) = w * mk.beta;
    Q(f, F + m) = Q(F + m, f) = w * mk.beta;
  }
  for (int m = 0; m < M; ++m) {
    const MarketSpec& mk = game.markets[m];
    c[F + m] = theta.theta_m * mk.alpha;
    Q(F + m, F + m) = theta.concavity_margin() * mk.beta;
  }
}

Allocation allocation_from(const GameInstance& game, const VectorXd& q,
                           const VectorXd& r) {
  Allocation a;
  a.q = q;
  a.r = r;
  return a;
}

}  // namespace

double KktResiduals::max() const {
  return std::max({stationarity, complementarity, feasibility});
}

EquilibriumResult solve_potential(const GameInstance& game, const DesignParams& theta,
                                  const SolveOptions& opts,
                                  const std::optional<Allocation>& warm_start) {
  game.validate();
  theta.validate();
  opts.validate();

  RegionReport region = classify(game, theta);
  if (!region.equilibria_equal_optimizers)
    throw region_not_covered(
        "equilibria are not characterized by the potential at this design parameter");

  const int F = game.num_firms();
  const int M = game.num_markets();
  const bool zero_transport = std::holds_alternative<ZeroTransport>(game.transport);
  const int n = zero_transport ? F : F + M;

  MatrixXd Qfull;
  VectorXd cfull;
  potential_quadratic(game, theta, Qfull, cfull);

  // Minimize the negated potential.
  QpProblem qp;
  qp.Q = Qfull.topLeftCorner(n, n);
  qp.c = -cfull.head(n);

  // q >= 0 rows.
  int poly_rows = 0;
  const Polytope* poly = std::get_if<Polytope>(&game.transport);
  if (poly != nullptr) poly_rows = static_cast<int>(poly->A.rows());
  qp.G = MatrixXd::Zero(F + poly_rows, n);
  qp.h = VectorXd::Zero(F + poly_rows);
  for (int f = 0; f < F; ++f) qp.G(f, f) = -1.0;
  if (poly != nullptr) {
    qp.G.block(F, F, poly_rows, M) = poly->A;
    qp.h.tail(poly_rows) = poly->b;
  }
  if (!zero_transport) {
    qp.E = MatrixXd::Zero(1, n);
    qp.E.block(0, F, 1, M).setOnes();
    qp.e = VectorXd::Zero(1);
  } else {
    qp.E = MatrixXd::Zero(0, n);
    qp.e = VectorXd::Zero(0);
  }

  VectorXd x0 = VectorXd::Zero(n);
  if (warm_start) {
    if (!allocation_feasible(game, *warm_start, 1e-7))
      throw validation_error("warm start allocation is infeasible");
    x0.head(F) = warm_start->q.cwiseMax(0.0);
    if (!zero_transport) x0.tail(M) = warm_start->r;
  }

  QpOptions qpo;
  qpo.max_iterations = opts.max_active_set_iterations;
  QpResult sol = solve_qp(qp, x0, qpo);

  EquilibriumResult result;
  VectorXd r = VectorXd::Zero(M);
  if (!zero_transport) r = sol.x.tail(M);
  result.allocation = allocation_from(game, sol.x.head(F).cwiseMax(0.0), r);
  Multipliers mult;
  mult.lambda_balance = zero_transport ? 0.0 : sol.eq_multipliers[0];
  mult.mu_firm = sol.ineq_multipliers.head(F);
  mult.nu_transport = sol.ineq_multipliers.tail(poly_rows);
  result.allocation.multipliers = mult;

  result.potential_value = potential(game, result.allocation, theta);
  result.breakdown = surplus_breakdown(game, result.allocation);
  result.welfare = result.breakdown.welfare();
  result.region = region;
  result.unique = sol.unique;

  NashCheck check = verify_nash(game, result.allocation, theta, opts);
  result.verified = check.is_nash;
  result.max_deviation_gain = check.max_gain;
  return result;
}

double best_response_firm(const GameInstance& game, const Allocation& alloc, int f) {
  if (f < 0 || f >= game.num_firms())
    throw validation_error("firm index out of range");
  int m = game.firms[f].market_id;
  const MarketSpec& mk = game.markets[m];
  double others = 0.0;
  for (int g : game.firms_in_market(m))
    if (g != f) others += alloc.q[g];
  double numer = mk.alpha - mk.beta * (alloc.r[m] + others) - game.firms[f].cost.c_lin;
  double denom = 2.0 * mk.beta + game.firms[f].cost.c_quad;
  return std::max(0.0, numer / denom);
}

VectorXd best_response_mm(const GameInstance& game, const Allocation& alloc,
                          const DesignParams& theta, const SolveOptions& opts) {
  if (theta.concavity_margin() < 0.0)
    throw non_concave_objective(
        "market maker payoff is not concave in r at this design parameter");
  if (std::holds_alternative<ZeroTransport>(game.transport))
    return VectorXd::Zero(game.num_markets());

  const int M = game.num_markets();
  VectorXd Q = market_production(game, alloc.q);

  QpProblem qp;
  qp.Q = MatrixXd::Zero(M, M);
  qp.c = VectorXd::Zero(M);
  for (int m = 0; m < M; ++m) {
    const MarketSpec& mk = game.markets[m];
    qp.Q(m, m) = theta.concavity_margin() * mk.beta;
    // Gradient of the payoff in r at r = 0 for fixed firm quantities.
    qp.c[m] = -(theta.theta_c * mk.beta * Q[m] - theta.theta_p * mk.beta * Q[m] +
                theta.theta_m * (mk.alpha - mk.beta * Q[m]));
  }
  qp.E = MatrixXd::Ones(1, M);
  qp.e = VectorXd::Zero(1);
  if (const auto* poly = std::get_if<Polytope>(&game.transport)) {
    qp.G = poly->A;
    qp.h = poly->b;
  } else {
    qp.G = MatrixXd::Zero(0, M);
    qp.h = VectorXd::Zero(0);
  }

  QpOptions qpo;
  qpo.max_iterations = opts.max_active_set_iterations;
  QpResult sol = solve_qp(qp, VectorXd::Zero(M), qpo);
  return sol.x;
}

NashCheck verify_nash(const GameInstance& game, const Allocation& alloc,
                      const DesignParams& theta, const SolveOptions& opts) {
  NashCheck check;
  double max_gain = 0.0;

  for (int f = 0; f < game.num_firms(); ++f) {
    Allocation deviated = alloc;
    deviated.q[f] = best_response_firm(game, alloc, f);
    double gain = firm_profit(game, deviated, f) - firm_profit(game, alloc, f);
    max_gain = std::max(max_gain, gain);
  }

  double base = mm_payoff(game, alloc, theta);
  if (theta.concavity_margin() >= 0.0) {
    Allocation deviated = alloc;
    deviated.r = best_response_mm(game, alloc, theta, opts);
    max_gain = std::max(max_gain, mm_payoff(game, deviated, theta) - base);
  } else if (game.num_markets() == 2 &&
             std::holds_alternative<Polytope>(game.transport)) {
    // Non-concave payoff on a two-market network: scan the balanced line
    // r = (t, -t) over its feasible interval.
    const auto& poly = std::get<Polytope>(game.transport);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < poly.A.rows(); ++j) {
      double coeff = poly.A(j, 0) - poly.A(j, 1);
      if (std::abs(coeff) < 1e-14) continue;
      double bound = poly.b[j] / coeff;
      if (coeff > 0) hi = std::min(hi, bound);
      else lo = std::max(lo, bound);
    }
    if (!(std::isfinite(lo) && std::isfinite(hi)))
      throw validation_error("unbounded transport line in grid fallback");
    const int steps = 4000;
    Allocation deviated = alloc;
    for (int s = 0; s <= steps; ++s) {
      double t = lo + (hi - lo) * static_cast<double>(s) / steps;
      deviated.r[0] = t;
      deviated.r[1] = -t;
      max_gain = std::max(max_gain, mm_payoff(game, deviated, theta) - base);
    }
  } else {
    throw non_concave_objective(
        "cannot verify the market maker move: payoff non-concave and no grid fallback");
  }

  check.max_gain = max_gain;
  check.is_nash = max_gain <= opts.br_deviation_tolerance;
  return check;
}

KktResiduals kkt_residuals(const GameInstance& game, const Allocation& alloc,
                           const DesignParams& theta) {
  KktResiduals res;
  if (!alloc.multipliers)
    throw validation_error("allocation carries no multipliers");
  const Multipliers& mult = *alloc.multipliers;
  PayoffGradient grad = potential_gradient(game, alloc, theta);

  VectorXd stat_q = grad.dq + mult.mu_firm;
  VectorXd stat_r = grad.dr - VectorXd::Constant(game.num_markets(), mult.lambda_balance);
  if (const auto* poly = std::get_if<Polytope>(&game.transport)) {
    stat_r -= poly->A.transpose() * mult.nu_transport;
    VectorXd slack = poly->b - poly->A * alloc.r;
    for (int j = 0; j < slack.size(); ++j)
      res.complementarity = std::max(res.complementarity,
                                     std::abs(mult.nu_transport[j] * slack[j]));
    res.feasibility = std::max(res.feasibility, std::max(0.0, -slack.minCoeff()));
  }
  if (std::holds_alternative<ZeroTransport>(game.transport))
    stat_r.setZero();  // r is fixed, not a decision variable

  res.stationarity = stat_q.lpNorm<Eigen::Infinity>();
  if (stat_r.size() > 0)
    res.stationarity = std::max(res.stationarity, stat_r.lpNorm<Eigen::Infinity>());
  for (int f = 0; f < game.num_firms(); ++f)
    res.complementarity = std::max(res.complementarity,
                                   std::abs(mult.mu_firm[f] * alloc.q[f]));
  res.feasibility = std::max(res.feasibility, std::abs(alloc.r.sum()));
  res.feasibility = std::max(res.feasibility, std::max(0.0, -alloc.q.minCoeff()));
  return res;
}

DynamicsResult best_response_dynamics(const GameInstance& game, const DesignParams& theta,
                                      const Allocation& init, int max_rounds,
                                      const SolveOptions& opts) {
  game.validate();
  theta.validate();
  if (theta.concavity_margin() < 0.0)
    throw non_concave_objective(
        "best-response dynamics need a concave market maker payoff");
  if (!allocation_feasible(game, init, 1e-7))
    throw validation_error("initial allocation is infeasible");

  DynamicsResult result;
  Allocation state = init;
  std::vector<Allocation> substates;

  auto state_key = [&](const Allocation& a) {
    std::vector<long long> key;
    key.reserve(a.q.size() + a.r.size());
    for (int i = 0; i < a.q.size(); ++i) key.push_back(llround(a.q[i] * 1e9));
    for (int i = 0; i < a.r.size(); ++i) key.push_back(llround(a.r[i] * 1e9));
    return key;
  };
  std::map<std::vector<long long>, int> seen;
  std::vector<int> substate_round_start;

  for (int round = 1; round <= max_rounds; ++round) {
    substate_round_start.push_back(static_cast<int>(substates.size()));
    double movement = 0.0;
    for (int f = 0; f < game.num_firms(); ++f) {
      double next = best_response_firm(game, state, f);
      movement = std::max(movement, std::abs(next - state.q[f]));
      state.q[f] = next;
      substates.push_back(state);
    }
    VectorXd r_next = best_response_mm(game, state, theta, opts);
    movement = std::max(movement, (r_next - state.r).lpNorm<Eigen::Infinity>());
    state.r = r_next;
    substates.push_back(state);

    DynamicsRound record;
    record.round = round;
    record.state = state;
    record.potential_value = potential(game, state, theta);
    result.trajectory.push_back(record);
    result.rounds = round;

    if (movement < opts.br_deviation_tolerance) {
      result.verdict = DynamicsVerdict::Converged;
      return result;
    }

    auto key = state_key(state);
    auto it = seen.find(key);
    if (it != seen.end()) {
      result.verdict = DynamicsVerdict::Cycle;
      // Collect the firm-consistent profiles visited during the period,
      // which starts with the round after the state's first occurrence.
      int first = substate_round_start[it->second + 1];
      std::vector<Allocation> cycle;
      for (size_t i = static_cast<size_t>(first); i < substates.size(); ++i) {
        const Allocation& a = substates[i];
        bool consistent = true;
        for (int f = 0; f < game.num_firms() && consistent; ++f)
          if (std::abs(best_response_firm(game, a, f) - a.q[f]) >
              opts.br_deviation_tolerance)
            consistent = false;
        if (!consistent) continue;
        bool duplicate = false;
        for (const Allocation& b : cycle)
          if ((b.q - a.q).lpNorm<Eigen::Infinity>() < 1e-9 &&
              (b.r - a.r).lpNorm<Eigen::Infinity>() < 1e-9)
            duplicate = true;
        if (!duplicate) cycle.push_back(a);
      }
      result.cycle_profiles = cycle;
      return result;
    }
    seen[key] = round - 1;
  }
  result.verdict = DynamicsVerdict::MaxRounds;
  return result;
}

}  // namespace cnet
