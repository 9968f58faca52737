#include "cnet/regions.hpp"

#include <Eigen/Eigenvalues>

#include "cnet/lp.hpp"

namespace cnet {

Rational gamma_exact(const GameInstance& game) {
  // gamma = max over markets of 1 - (1 + sum_f beta/(beta + D_f))^{-1}.
  // An empty market contributes 0 and never wins the max for valid games.
  Rational best = 0;
  for (int m = 0; m < game.num_markets(); ++m) {
    Rational beta = rat(game.markets[m].beta);
    Rational sum = 0;
    for (int f : game.firms_in_market(m))
      sum += beta / (beta + rat(game.firms[f].cost.c_quad));
    Rational candidate = 1 - 1 / (1 + sum);
    if (candidate > best) best = candidate;
  }
  return best;
}

double gamma(const GameInstance& game) { return to_double(gamma_exact(game)); }

std::optional<double> gamma_plus(const DesignParams& theta) {
  double denom = theta.potential_margin();
  if (!(denom > 0.0)) return std::nullopt;
  return theta.concavity_margin() / denom;
}

bool transport_compact(const GameInstance& game) {
  if (std::holds_alternative<ZeroTransport>(game.transport)) return true;
  if (std::holds_alternative<Unconstrained>(game.transport)) return false;
  const auto& poly = std::get<Polytope>(game.transport);
  const int M = game.num_markets();
  // Bounded iff the recession cone {d : A d <= 0} is trivial.  Probe each
  // coordinate direction inside a unit box.
  MatrixXd A(poly.A.rows() + 2 * M, M);
  VectorXd b(poly.A.rows() + 2 * M);
  A.topRows(poly.A.rows()) = poly.A;
  b.head(poly.A.rows()).setZero();
  A.block(poly.A.rows(), 0, M, M) = MatrixXd::Identity(M, M);
  A.block(poly.A.rows() + M, 0, M, M) = -MatrixXd::Identity(M, M);
  b.tail(2 * M).setOnes();
  MatrixXd E(0, M);
  VectorXd e(0);
  for (int i = 0; i < M; ++i) {
    VectorXd c = VectorXd::Zero(M);
    c[i] = 1.0;
    for (double sign : {1.0, -1.0}) {
      LpResult lr = lp_maximize(sign * c, A, b, E, e);
      if (!lr.optimal() || lr.objective > 1e-9) return false;
    }
  }
  return true;
}

RegionReport classify(const GameInstance& game, const DesignParams& theta) {
  theta.validate();
  return classify(game, rational_theta(theta.theta_c, theta.theta_p, theta.theta_m));
}

RegionReport classify(const GameInstance& game, const RationalTheta& theta) {
  if (theta.c < 0 || theta.p < 0 || theta.m < 0 || theta.sum() == 0)
    throw validation_error("design weights must be nonnegative and not all zero");

  RegionReport report;
  Rational g = gamma_exact(game);
  report.gamma = to_double(g);

  Rational pot = theta.potential_margin();
  Rational conc = theta.concavity_margin();
  Rational scale = theta.max_abs();

  SignTest pot_sign = test_sign(pot, scale);
  SignTest conc_sign = test_sign(conc, scale);
  // Margin of the non-strict guarantee chain 2tM-tC >= gamma*(tM+tP-tC) > 0.
  SignTest chain_sign = test_sign(conc - g * pot, scale);
  SignTest chain_pos = test_sign(g * pot, scale);

  if (pot_sign.near_boundary) report.near_boundary.push_back("potential_margin");
  if (conc_sign.near_boundary) report.near_boundary.push_back("concavity_margin");
  if (chain_sign.near_boundary) report.near_boundary.push_back("guarantee_chain");

  report.is_potential_game = pot_sign.sign > 0;
  report.mm_payoff_concave_in_r = conc_sign.sign >= 0;
  if (pot_sign.sign > 0) report.gamma_plus = to_double(conc / pot);

  bool nonstrict_chain = chain_sign.sign >= 0 && chain_pos.sign > 0;
  bool strict_chain = chain_sign.sign > 0 && chain_pos.sign > 0;

  // The strict chain guarantees a unique equilibrium for any closed
  // transport set.  The non-strict chain and the existence conditions rely
  // on compactness.
  report.unique_via_potential = strict_chain;
  if (transport_compact(game)) {
    report.existence_guaranteed =
        report.mm_payoff_concave_in_r || report.is_potential_game;
    report.equilibria_equal_optimizers = nonstrict_chain;
  } else {
    report.existence_guaranteed = strict_chain;
    report.equilibria_equal_optimizers = strict_chain;
  }
  return report;
}

MatrixXd hessian_block_raw(const GameInstance& game, const DesignParams& theta, int m) {
  if (m < 0 || m >= game.num_markets())
    throw validation_error("market index out of range");
  std::vector<int> firms = game.firms_in_market(m);
  const int k = static_cast<int>(firms.size());
  const double beta = game.markets[m].beta;
  MatrixXd H = MatrixXd::Zero(k + 1, k + 1);
  double w = theta.potential_margin();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) H(i, j) = -w * beta;
    H(i, i) -= w * (beta + game.firms[firms[i]].cost.c_quad);
    H(i, k) = H(k, i) = -w * beta;
  }
  H(k, k) = -theta.concavity_margin() * beta;
  return H;
}

MatrixXd hessian_block(const GameInstance& game, const DesignParams& theta, int m) {
  double w = theta.potential_margin();
  if (!(w > 0.0))
    throw region_not_covered(
        "normalized curvature block requires theta_M+theta_P-theta_C > 0");
  return -hessian_block_raw(game, theta, m) / w;
}

}  // namespace cnet
