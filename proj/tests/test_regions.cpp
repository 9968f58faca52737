#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "cnet/regions.hpp"
#include "test_util.hpp"

using namespace cnet;
using testutil::Rng;

namespace {

GameInstance single_firm_game(double beta, double c_quad) {
  GameInstance game;
  game.markets = {{1.0, beta}};
  game.firms = {{0, {0.1, c_quad}}};
  game.transport = ZeroTransport{};
  return game;
}

}  // namespace

TEST_SUITE("regions") {

TEST_CASE("gamma on reference configurations") {
  // One firm per market with linear costs.
  GameInstance game = testutil::case_study_game();
  CHECK(gamma(game) == doctest::Approx(0.5).epsilon(1e-15));

  // n firms in one market, linear costs.
  for (int n : {1, 2, 5, 9}) {
    GameInstance crowd;
    crowd.markets = {{1.0, 1.0}};
    for (int f = 0; f < n; ++f) crowd.firms.push_back({0, {0.0, 0.0}});
    crowd.transport = ZeroTransport{};
    CHECK(gamma(crowd) == doctest::Approx(double(n) / (n + 1)).epsilon(1e-15));
  }

  // Quadratic curvature lowers the threshold.
  CHECK(gamma(single_firm_game(1.0, 1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("gamma respects the crowding bound") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    GameInstance game = testutil::random_game(rng, 3, 4);
    int largest = 0;
    for (int m = 0; m < game.num_markets(); ++m)
      largest = std::max(largest, static_cast<int>(game.firms_in_market(m).size()));
    double g = gamma(game);
    CHECK(g >= 0.0);
    CHECK(g <= double(largest) / (1 + largest) + 1e-15);
  }
}

TEST_CASE("gamma_plus ratio") {
  CHECK(*gamma_plus({1, 1, 1}) == doctest::Approx(1.0));
  CHECK(*gamma_plus({1, 0, 1}) == doctest::Approx(1.0));
  CHECK_FALSE(gamma_plus({1, 1, 0}).has_value());
}

TEST_CASE("classification of the reference design weights") {
  GameInstance game = testutil::case_study_game();

  RegionReport sw = classify(game, testutil::sw_simplex());
  CHECK(sw.is_potential_game);
  CHECK(sw.mm_payoff_concave_in_r);
  CHECK(sw.existence_guaranteed);
  CHECK(sw.equilibria_equal_optimizers);
  CHECK(sw.unique_via_potential);

  RegionReport cs = classify(game, DesignParams{1, 0, 0});
  CHECK_FALSE(cs.is_potential_game);
  CHECK_FALSE(cs.mm_payoff_concave_in_r);
  CHECK_FALSE(cs.existence_guaranteed);
  CHECK_FALSE(cs.equilibria_equal_optimizers);
  CHECK_FALSE(cs.unique_via_potential);

  RegionReport mid = classify(game, DesignParams{0.6, 0.4, 0.0});
  CHECK_FALSE(mid.is_potential_game);
  CHECK_FALSE(mid.mm_payoff_concave_in_r);
  CHECK_FALSE(mid.existence_guaranteed);

  CHECK_THROWS_AS(classify(game, DesignParams{0, 0, 0}), validation_error);
}

TEST_CASE("classification is invariant under positive scaling") {
  Rng rng(22);
  GameInstance game = testutil::case_study_game();
  for (int trial = 0; trial < 100; ++trial) {
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    if (theta.theta_c + theta.theta_p + theta.theta_m == 0.0) continue;
    double s = rng.uniform(0.25, 8.0);
    DesignParams scaled{s * theta.theta_c, s * theta.theta_p, s * theta.theta_m};
    RegionReport a = classify(game, theta);
    RegionReport b = classify(game, scaled);
    CHECK(a.is_potential_game == b.is_potential_game);
    CHECK(a.mm_payoff_concave_in_r == b.mm_payoff_concave_in_r);
    CHECK(a.existence_guaranteed == b.existence_guaranteed);
    CHECK(a.equilibria_equal_optimizers == b.equilibria_equal_optimizers);
    CHECK(a.unique_via_potential == b.unique_via_potential);
  }
}

TEST_CASE("report flags are nested") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    GameInstance game = testutil::random_game(rng);
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    if (theta.theta_c + theta.theta_p + theta.theta_m == 0.0) continue;
    RegionReport r = classify(game, theta);
    if (r.unique_via_potential) CHECK(r.equilibria_equal_optimizers);
    if (r.equilibria_equal_optimizers) CHECK(r.existence_guaranteed);
    CHECK(r.is_potential_game == (theta.potential_margin() > 0.0));
  }
}

TEST_CASE("curvature block matches the reference single-firm case") {
  GameInstance game = single_firm_game(1.0, 0.0);
  MatrixXd block = hessian_block(game, testutil::sw_simplex(), 0);
  REQUIRE(block.rows() == 2);
  CHECK(block(0, 0) == doctest::Approx(2.0));
  CHECK(block(0, 1) == doctest::Approx(1.0));
  CHECK(block(1, 0) == doctest::Approx(1.0));
  CHECK(block(1, 1) == doctest::Approx(1.0));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(block);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  CHECK_THROWS_AS(hessian_block(game, DesignParams{1, 0, 0}, 0), region_not_covered);
}

TEST_CASE("curvature block is singular exactly on the boundary") {
  GameInstance game = testutil::case_study_game();  // gamma = 1/2
  // 2tM - tC = gamma * (tM+tP-tC) with the simplex constraint:
  // theta = (2/7, 3/7, 2/7) gives conc = 2/7, pot = 3/7, gamma*pot = 3/14 < 2/7.
  // Solve instead: conc = pot/2 -> 4tM - 2tC = tM + tP - tC -> 3tM = tC + tP.
  DesignParams boundary{0.3, 0.3, 0.2};  // 3*0.2 = 0.6 = 0.3+0.3
  double conc = boundary.concavity_margin();
  double pot = boundary.potential_margin();
  REQUIRE(conc == doctest::Approx(0.5 * pot).epsilon(1e-15));
  for (int m = 0; m < game.num_markets(); ++m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(hessian_block(game, boundary, m));
    CHECK(std::abs(es.eigenvalues().minCoeff()) <= 1e-9);
  }
}

TEST_CASE("eigenvalue test agrees with the inequality test") {
  Rng rng(24);
  int checked = 0;
  while (checked < 1000) {
    GameInstance game = testutil::random_game(rng);
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    double sum = theta.theta_c + theta.theta_p + theta.theta_m;
    if (sum == 0.0) continue;
    theta = {theta.theta_c / sum, theta.theta_p / sum, theta.theta_m / sum};

    double min_eig = std::numeric_limits<double>::infinity();
    for (int m = 0; m < game.num_markets(); ++m) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(hessian_block_raw(game, theta, m));
      min_eig = std::min(min_eig, -es.eigenvalues().maxCoeff());
    }
    // min_eig is the smallest eigenvalue of the negated raw blocks.
    RegionReport report = classify(game, theta);
    if (min_eig > 1e-9) CHECK(report.unique_via_potential);
    if (report.unique_via_potential) CHECK(min_eig > -1e-9);
    ++checked;
  }
}

TEST_CASE("near-boundary weights are flagged, exact boundaries are not") {
  GameInstance game = testutil::case_study_game();

  // Dyadic weights sitting exactly on both margins classify cleanly.
  RegionReport exact = classify(game, DesignParams{0.5, 0.25, 0.25});
  CHECK(exact.near_boundary.empty());
  CHECK_FALSE(exact.is_potential_game);     // margin is exactly zero
  CHECK(exact.mm_payoff_concave_in_r);      // non-strict test includes zero

  // A nudge off the boundary smaller than the band raises the flag.
  DesignParams nudged{0.5 + 1e-14, 0.25, 0.25};
  RegionReport r = classify(game, nudged);
  bool flagged = false;
  for (const auto& name : r.near_boundary)
    if (name == "concavity_margin" || name == "potential_margin") flagged = true;
  CHECK(flagged);
}

TEST_CASE("compactness drives the existence flag off the strict region") {
  GameInstance game = testutil::case_study_game();
  game.transport = Unconstrained{};
  // Concave but not potential: existence needs compactness.
  DesignParams concave_only{0.5, 0.0, 0.5};
  REQUIRE(concave_only.concavity_margin() > 0.0);
  REQUIRE(concave_only.potential_margin() <= 0.0);
  RegionReport r = classify(game, concave_only);
  CHECK_FALSE(r.existence_guaranteed);
  // The strict chain survives without compactness.
  RegionReport sw = classify(game, testutil::sw_simplex());
  CHECK(sw.existence_guaranteed);
  CHECK(sw.unique_via_potential);
}

}  // TEST_SUITE
