#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chp/cg.hpp"
#include "chp/model.hpp"

// Post-pricing economics: per-unit lost opportunity cost, product revenue
// shortfall, dual-function evaluation, and the sub-gradient baseline.

namespace chp::analytics {

// Dual-weighted revenue minus as-offered cost of a schedule at the given
// prices. Revenue spans every system constraint the unit participates in
// (a congested unit's revenue includes the congestion dual).
double unit_profit(const UcInstance& instance, int unit_index,
                   const Schedule& schedule, const PriceVector& prices);

struct SelfScheduleResult {
  Schedule schedule;
  double profit = 0.0;
};

// Optimal self-schedule at fixed prices (the pricing subproblem).
SelfScheduleResult self_schedule(const UcInstance& instance, int unit_index,
                                 const PriceVector& prices);

// Optimal self-schedule profit minus market-schedule profit; non-negative
// up to solver tolerance.
double compute_loc(const UcInstance& instance, int unit_index,
                   const Schedule& market_schedule, const PriceVector& prices);

struct UnitUplift {
  std::string unit_id;
  double market_profit = 0.0;
  double self_profit = 0.0;
  double loc = 0.0;
};

struct UpliftReport {
  std::vector<UnitUplift> units;
  double total_loc = 0.0;
  double duality_gap = 0.0;  // f* - g*
  double prs = 0.0;          // gap - total LOC (revenue-shortfall residual)
  PriceVector prices;
};

// The market schedules and objective of the UC optimum.
struct UcSolutionView {
  std::vector<Schedule> schedules;  // one per unit, instance order
  double objective = 0.0;           // f*
};

UpliftReport uplift_report(const UcInstance& instance,
                           const UcSolutionView& uc_solution,
                           const cg::ChResult& ch_result);

// Lagrangian dual function q at the given prices: the sum of subproblem
// optima plus the dual-weighted right-hand sides. Slack penalties are not
// part of the dual function.
double evaluate_dual_function(const UcInstance& instance,
                              const PriceVector& prices);

struct SubgradientConfig {
  enum class StepRule { coeff_over_k, coeff_over_sqrt_k, constant };
  StepRule rule = StepRule::coeff_over_k;
  double coefficient = 1.0;
  int iterations = 100;
  std::vector<double> initial_prices;  // balance duals, one per hour
};

struct SubgradientResult {
  std::vector<double> best_prices;
  double best_value = -std::numeric_limits<double>::infinity();
  int best_iteration = 0;
  std::vector<double> final_prices;
  std::vector<double> values;  // q at each iterate, in order
};

// Raw (non-projected, non-averaged) sub-gradient ascent on the dual of the
// single-balance problem; iterates may move anywhere, the best iterate is
// tracked. Requires exactly one system constraint, the power balance.
SubgradientResult run_subgradient(const UcInstance& instance,
                                  const SubgradientConfig& config);

}  // namespace chp::analytics
