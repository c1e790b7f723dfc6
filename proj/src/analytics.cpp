#include "chp/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "chp/ucbuild.hpp"

namespace chp::analytics {

double unit_profit(const UcInstance& instance, int unit_index,
                   const Schedule& schedule, const PriceVector& prices) {
  if (schedule.unit_id != instance.units[unit_index].id)
    throw std::invalid_argument("unit_profit: schedule belongs to '" +
                                schedule.unit_id + "', not '" +
                                instance.units[unit_index].id + "'");
  double revenue = 0.0;
  for (std::size_t c = 0; c < instance.constraints.size(); ++c)
    for (int t = 0; t < instance.horizon; ++t)
      revenue += prices.at(static_cast<int>(c), t) *
                 ucbuild::constraint_contribution(instance.constraints[c],
                                                  schedule, t);
  return revenue - schedule.cost;
}

SelfScheduleResult self_schedule(const UcInstance& instance, int unit_index,
                                 const PriceVector& prices) {
  const auto priced = cg::price_unit(instance, unit_index, prices, 0.0);
  return {priced.schedule, priced.self_profit};
}

double compute_loc(const UcInstance& instance, int unit_index,
                   const Schedule& market_schedule,
                   const PriceVector& prices) {
  const auto self = self_schedule(instance, unit_index, prices);
  return self.profit - unit_profit(instance, unit_index, market_schedule, prices);
}

UpliftReport uplift_report(const UcInstance& instance,
                           const UcSolutionView& uc_solution,
                           const cg::ChResult& ch_result) {
  if (uc_solution.schedules.size() != instance.units.size())
    throw std::invalid_argument(
        "uplift_report: UC solution does not match the instance's units");
  if (ch_result.prices.num_constraints() !=
      static_cast<int>(instance.constraints.size()))
    throw std::invalid_argument(
        "uplift_report: price vector does not match the instance's "
        "constraints");
  for (std::size_t i = 0; i < instance.units.size(); ++i) {
    if (uc_solution.schedules[i].unit_id != instance.units[i].id)
      throw std::invalid_argument("uplift_report: schedule for '" +
                                  uc_solution.schedules[i].unit_id +
                                  "' out of order");
    if (uc_solution.schedules[i].power.size() !=
        static_cast<std::size_t>(instance.horizon))
      throw std::invalid_argument("uplift_report: horizon mismatch");
  }

  UpliftReport report;
  report.prices = ch_result.prices;
  for (std::size_t i = 0; i < instance.units.size(); ++i) {
    UnitUplift u;
    u.unit_id = instance.units[i].id;
    u.market_profit = unit_profit(instance, static_cast<int>(i),
                                  uc_solution.schedules[i], ch_result.prices);
    u.self_profit =
        self_schedule(instance, static_cast<int>(i), ch_result.prices).profit;
    u.loc = u.self_profit - u.market_profit;
    report.total_loc += u.loc;
    report.units.push_back(std::move(u));
  }
  report.duality_gap = uc_solution.objective - ch_result.rmp_objective;
  report.prs = report.duality_gap - report.total_loc;
  return report;
}

double evaluate_dual_function(const UcInstance& instance,
                              const PriceVector& prices) {
  double q = 0.0;
  for (std::size_t i = 0; i < instance.units.size(); ++i)
    q += cg::price_unit(instance, static_cast<int>(i), prices, 0.0)
             .subproblem_objective;
  for (std::size_t c = 0; c < instance.constraints.size(); ++c)
    for (int t = 0; t < instance.horizon; ++t)
      q += prices.at(static_cast<int>(c), t) * instance.constraints[c].rhs[t];
  return q;
}

SubgradientResult run_subgradient(const UcInstance& instance,
                                  const SubgradientConfig& config) {
  if (instance.constraints.size() != 1 ||
      !instance.constraints[0].power_balance)
    throw std::invalid_argument(
        "run_subgradient handles single-balance instances only");
  if (config.iterations < 1)
    throw std::invalid_argument("subgradient needs at least one iteration");
  const int T = instance.horizon;
  if (static_cast<int>(config.initial_prices.size()) != T)
    throw std::invalid_argument("initial prices must cover the horizon");

  const auto& balance = instance.constraints[0];
  std::vector<double> lambda = config.initial_prices;
  SubgradientResult out;
  out.values.reserve(config.iterations);

  for (int k = 1; k <= config.iterations; ++k) {
    PriceVector pv;
    pv.by_constraint = {lambda};
    // One subproblem sweep serves both q and the sub-gradient.
    double q = 0.0;
    std::vector<double> served(T, 0.0);
    for (std::size_t i = 0; i < instance.units.size(); ++i) {
      const auto priced = cg::price_unit(instance, static_cast<int>(i), pv, 0.0);
      q += priced.subproblem_objective;
      for (int t = 0; t < T; ++t)
        served[t] += ucbuild::constraint_contribution(balance, priced.schedule, t);
    }
    for (int t = 0; t < T; ++t) q += lambda[t] * balance.rhs[t];
    out.values.push_back(q);
    if (q > out.best_value) {
      out.best_value = q;
      out.best_prices = lambda;
      out.best_iteration = k;
    }

    double step = config.coefficient;
    switch (config.rule) {
      case SubgradientConfig::StepRule::coeff_over_k: step /= k; break;
      case SubgradientConfig::StepRule::coeff_over_sqrt_k:
        step /= std::sqrt(static_cast<double>(k));
        break;
      case SubgradientConfig::StepRule::constant: break;
    }
    for (int t = 0; t < T; ++t)
      lambda[t] += step * (balance.rhs[t] - served[t]);
  }
  out.final_prices = std::move(lambda);
  return out;
}

}  // namespace chp::analytics
