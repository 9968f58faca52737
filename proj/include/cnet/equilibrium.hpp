#pragma once

#include <optional>
#include <vector>

#include "cnet/model.hpp"
#include "cnet/regions.hpp"

namespace cnet {

struct SolveOptions {
  double kkt_tolerance = 1e-9;
  int max_active_set_iterations = 0;  // 0: 10 * (variables + constraints)
  double br_deviation_tolerance = 1e-7;

  void validate() const {
    if (!(kkt_tolerance > 0.0) || !(br_deviation_tolerance > 0.0))
      throw validation_error("solver tolerances must be positive");
  }
};

struct EquilibriumResult {
  Allocation allocation;
  double potential_value = 0.0;
  double welfare = 0.0;
  SurplusBreakdown breakdown;
  RegionReport region;
  bool verified = false;
  double max_deviation_gain = 0.0;
  bool unique = true;  // false when the optimizer set has a flat direction
};

// Maximizes the potential over q >= 0, r in P, 1'r = 0 and returns the
// optimizer with its multipliers.  Requires a design parameter for which
// the optimizers coincide with the equilibria; throws region_not_covered
// otherwise.  An optional feasible warm start replaces the q = 0, r = 0
// default.
EquilibriumResult solve_potential(const GameInstance& game, const DesignParams& theta,
                                  const SolveOptions& opts = {},
                                  const std::optional<Allocation>& warm_start = std::nullopt);

// Profit-maximizing quantity of firm f against the rest of the allocation.
double best_response_firm(const GameInstance& game, const Allocation& alloc, int f);

// Payoff-maximizing reallocation against fixed firm quantities.  Requires
// 2*theta_M - theta_C >= 0.
VectorXd best_response_mm(const GameInstance& game, const Allocation& alloc,
                          const DesignParams& theta, const SolveOptions& opts = {});

struct NashCheck {
  bool is_nash = false;
  double max_gain = 0.0;
};

NashCheck verify_nash(const GameInstance& game, const Allocation& alloc,
                      const DesignParams& theta, const SolveOptions& opts = {});

// Residuals of the optimality system at an allocation with multipliers.
struct KktResiduals {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double feasibility = 0.0;

  double max() const;
};

KktResiduals kkt_residuals(const GameInstance& game, const Allocation& alloc,
                           const DesignParams& theta);

enum class DynamicsVerdict { Converged, Cycle, MaxRounds };

struct DynamicsRound {
  int round = 0;
  Allocation state;  // after all players moved
  double potential_value = 0.0;
};

struct DynamicsResult {
  DynamicsVerdict verdict = DynamicsVerdict::MaxRounds;
  std::vector<DynamicsRound> trajectory;
  // For Cycle: the firm-consistent profiles visited within one period.
  std::vector<Allocation> cycle_profiles;
  int rounds = 0;
};

// Round-robin best responses, firms in index order then the market maker.
// Converges when a full round moves no coordinate by more than the
// deviation tolerance; reports a cycle when an end-of-round state recurs.
DynamicsResult best_response_dynamics(const GameInstance& game, const DesignParams& theta,
                                      const Allocation& init, int max_rounds,
                                      const SolveOptions& opts = {});

}  // namespace cnet
