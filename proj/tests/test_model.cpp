#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>

#include "cnet/exact.hpp"
#include "cnet/model.hpp"
#include "test_util.hpp"

using namespace cnet;
using testutil::Rng;

namespace {

// Independent profit oracle in exact rational arithmetic.
Rational rational_profit(const GameInstance& game, const Allocation& alloc, int f) {
  int m = game.firms[f].market_id;
  Rational demand = rat(alloc.r[m]);
  for (int g : game.firms_in_market(m)) demand += rat(alloc.q[g]);
  Rational p = rat(game.markets[m].alpha) - rat(game.markets[m].beta) * demand;
  Rational qf = rat(alloc.q[f]);
  Rational cost = rat(game.firms[f].cost.c_lin) * qf +
                  rat(game.firms[f].cost.c_quad) * qf * qf / 2;
  return qf * p - cost;
}

double numeric_gradient(const std::function<double(double)>& fn, double x,
                        double step = 1e-6) {
  return (fn(x + step) - fn(x - step)) / (2.0 * step);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("price evaluates the demand line") {
  CHECK(price({1.0, 1.0}, 0.5625) == doctest::Approx(0.4375).epsilon(1e-12));
  CHECK(price({1.0, 1.0}, 0.0) == doctest::Approx(1.0));
  CHECK(price({2.0, 0.5}, 4.0) == doctest::Approx(0.0));
}

TEST_CASE("firm profit at the case-study equilibrium") {
  GameInstance game = testutil::case_study_game();
  Allocation eq = testutil::case_study_equilibrium();
  CHECK(firm_profit(game, eq, 0) ==
        doctest::Approx(3.0 / 16.0 * (1.0 - 3.0 / 16.0 - 1.0 / 8.0) -
                        0.5 * 3.0 / 16.0).epsilon(1e-12));
  Allocation zero = zero_allocation(game);
  CHECK(firm_profit(game, zero, 0) == 0.0);
  CHECK_THROWS_AS(firm_profit(game, eq, 7), validation_error);
}

TEST_CASE("firm profit matches the rational oracle on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    GameInstance game = testutil::random_game(rng);
    Allocation alloc = testutil::random_feasible_allocation(rng, game);
    for (int f = 0; f < game.num_firms(); ++f) {
      double expected = to_double(rational_profit(game, alloc, f));
      CHECK(firm_profit(game, alloc, f) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("surplus breakdown reproduces the case-study welfare") {
  GameInstance game = testutil::case_study_game();
  SurplusBreakdown s = surplus_breakdown(game, testutil::case_study_equilibrium());
  CHECK(s.welfare() == doctest::Approx(83.0 / 256.0).epsilon(1e-12));

  Allocation competitive;
  competitive.q = Eigen::Vector2d(0.0, 1.25);
  competitive.r = Eigen::Vector2d(0.5, -0.5);
  CHECK(welfare(game, competitive) == doctest::Approx(17.0 / 32.0).epsilon(1e-12));

  SurplusBreakdown at_zero = surplus_breakdown(game, zero_allocation(game));
  CHECK(at_zero.cs.norm() == 0.0);
  CHECK(at_zero.ps.norm() == 0.0);
  CHECK(at_zero.ms.norm() == 0.0);
}

TEST_CASE("market maker payoff weights the three surpluses") {
  GameInstance game = testutil::case_study_game();
  Allocation eq = testutil::case_study_equilibrium();
  CHECK(mm_payoff(game, eq, {1, 1, 1}) == doctest::Approx(welfare(game, eq)).epsilon(1e-14));
  // Both markets clear at the same price, so the transfers cancel and the
  // merchandising surplus vanishes at this point.
  CHECK(mm_payoff(game, eq, {0, 0, 1}) == doctest::Approx(0.0).epsilon(1e-14));
  SurplusBreakdown s = surplus_breakdown(game, eq);
  CHECK(mm_payoff(game, eq, {1, 0, 0}) == doctest::Approx(s.total_cs()).epsilon(1e-14));
}

TEST_CASE("welfare equals the equally weighted payoff on random points") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    GameInstance game = testutil::random_game(rng);
    Allocation alloc = testutil::random_feasible_allocation(rng, game);
    CHECK(mm_payoff(game, alloc, {1, 1, 1}) ==
          doctest::Approx(welfare(game, alloc)).epsilon(1e-12));
    SurplusBreakdown s = surplus_breakdown(game, alloc);
    CHECK(s.cs.minCoeff() >= 0.0);
    for (int m = 0; m < game.num_markets(); ++m) {
      double p = price(game.markets[m], alloc.r[m] + market_production(game, alloc.q)[m]);
      if (p >= 0.0 && alloc.r[m] != 0.0)
        CHECK(s.ms[m] * alloc.r[m] >= 0.0);
    }
  }
}

TEST_CASE("potential differences track firm payoff differences") {
  Rng rng(13);
  int checked = 0;
  while (checked < 500) {
    GameInstance game = testutil::random_game(rng);
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    double w = theta.potential_margin();
    if (w <= 0.01) continue;
    Allocation alloc = testutil::random_feasible_allocation(rng, game);
    int f = rng.integer(0, game.num_firms() - 1);
    Allocation deviated = alloc;
    deviated.q[f] = rng.uniform(0.0, 1.5);

    double lhs = potential(game, deviated, theta) - potential(game, alloc, theta);
    double rhs = w * (firm_profit(game, deviated, f) - firm_profit(game, alloc, f));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    ++checked;
  }
}

TEST_CASE("potential minus payoff does not depend on the reallocation") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    GameInstance game = testutil::random_game(rng);
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    Allocation a = testutil::random_feasible_allocation(rng, game);
    Allocation b = a;
    b.r = testutil::random_feasible_allocation(rng, game).r;

    double lhs = potential(game, b, theta) - potential(game, a, theta);
    double rhs = mm_payoff(game, b, theta) - mm_payoff(game, a, theta);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST_CASE("single-market potential with no transport is the classical one") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    GameInstance game = testutil::random_game(rng, 1, 3, false);
    game.transport = ZeroTransport{};
    Allocation alloc = testutil::random_feasible_allocation(rng, game);
    DesignParams sw{1, 1, 1};

    const MarketSpec& mk = game.markets[0];
    double Q = alloc.q.sum();
    double classical = 0.0;
    for (int f = 0; f < game.num_firms(); ++f)
      classical += (mk.alpha * alloc.q[f] - game.firms[f].cost.cost(alloc.q[f])) -
                   0.5 * mk.beta * alloc.q[f] * alloc.q[f];
    classical -= 0.5 * mk.beta * Q * Q;
    CHECK(potential(game, alloc, sw) == doctest::Approx(classical).epsilon(1e-12));
  }
  GameInstance game = testutil::case_study_game();
  CHECK(potential(game, zero_allocation(game), testutil::sw_simplex()) == 0.0);
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(16);
  int checked = 0;
  while (checked < 200) {
    GameInstance game = testutil::random_game(rng);
    DesignParams theta{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    Allocation alloc = testutil::random_feasible_allocation(rng, game);

    PayoffGradient pg = potential_gradient(game, alloc, theta);
    PayoffGradient mg = mm_payoff_gradient(game, alloc, theta);
    for (int f = 0; f < game.num_firms(); ++f) {
      auto pot_of_q = [&](double v) {
        Allocation probe = alloc;
        probe.q[f] = v;
        return potential(game, probe, theta);
      };
      auto pay_of_q = [&](double v) {
        Allocation probe = alloc;
        probe.q[f] = v;
        return mm_payoff(game, probe, theta);
      };
      auto prof_of_q = [&](double v) {
        Allocation probe = alloc;
        probe.q[f] = v;
        return firm_profit(game, probe, f);
      };
      double scale = std::max(1.0, std::abs(pg.dq[f]));
      CHECK(std::abs(pg.dq[f] - numeric_gradient(pot_of_q, alloc.q[f])) <= 1e-6 * scale);
      scale = std::max(1.0, std::abs(mg.dq[f]));
      CHECK(std::abs(mg.dq[f] - numeric_gradient(pay_of_q, alloc.q[f])) <= 1e-6 * scale);
      scale = std::max(1.0, std::abs(firm_profit_gradient(game, alloc, f)));
      CHECK(std::abs(firm_profit_gradient(game, alloc, f) -
                     numeric_gradient(prof_of_q, alloc.q[f])) <= 1e-6 * scale);
    }
    for (int m = 0; m < game.num_markets(); ++m) {
      auto pot_of_r = [&](double v) {
        Allocation probe = alloc;
        probe.r[m] = v;
        return potential(game, probe, theta);
      };
      auto pay_of_r = [&](double v) {
        Allocation probe = alloc;
        probe.r[m] = v;
        return mm_payoff(game, probe, theta);
      };
      double scale = std::max(1.0, std::abs(pg.dr[m]));
      CHECK(std::abs(pg.dr[m] - numeric_gradient(pot_of_r, alloc.r[m])) <= 1e-6 * scale);
      scale = std::max(1.0, std::abs(mg.dr[m]));
      CHECK(std::abs(mg.dr[m] - numeric_gradient(pay_of_r, alloc.r[m])) <= 1e-6 * scale);
    }
    ++checked;
  }
}

TEST_CASE("theta presets and normalization") {
  DesignParams sw = theta_preset(ThetaPreset::SocialWelfare);
  CHECK(sw.theta_c == 1.0);
  CHECK(sw.theta_p == 1.0);
  CHECK(sw.theta_m == 1.0);
  DesignParams rsw = theta_preset("rsw");
  CHECK(rsw.theta_p == 0.0);
  CHECK(rsw.theta_m == 1.0);
  DesignParams ms = theta_preset("ms");
  CHECK(ms.theta_c == 0.0);
  CHECK_THROWS_AS(theta_preset("bogus"), validation_error);

  DesignParams u = simplex_normalize({1, 1, 1});
  CHECK(u.theta_c == doctest::Approx(1.0 / 3.0));
  DesignParams v = simplex_normalize({2, 0, 0});
  CHECK(v.theta_c == doctest::Approx(1.0));
  DesignParams w = simplex_normalize({0.054, 1.254, 0.692});
  CHECK(w.theta_c == doctest::Approx(0.027));
  CHECK(w.theta_p == doctest::Approx(0.627));
  CHECK(w.theta_m == doctest::Approx(0.346));
  CHECK_THROWS_AS(simplex_normalize({0, 0, 0}), validation_error);
}

TEST_CASE("validation rejects malformed games") {
  GameInstance game = testutil::case_study_game();
  CHECK_NOTHROW(game.validate());
  GameInstance bad = game;
  bad.firms[0].market_id = 5;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = game;
  bad.markets[0].beta = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = game;
  std::get<Polytope>(bad.transport).b[0] = -1.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

}  // TEST_SUITE
