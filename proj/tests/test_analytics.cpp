#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chp/analytics.hpp"
#include "chp/milp.hpp"
#include "chp/ucbuild.hpp"
#include "support/fixtures.hpp"

using namespace chp;
using namespace chp::analytics;
namespace fx = chp::testing;

namespace {

PriceVector balance_prices(std::vector<double> lambda) {
  PriceVector pv;
  pv.by_constraint = {std::move(lambda)};
  return pv;
}

UcSolutionView solve_uc(const UcInstance& inst) {
  const auto prog = ucbuild::build_full_uc(inst);
  milp::MilpOptions opt;
  opt.gap_target = 1e-9;
  const auto sol = milp::solve_milp(prog.mip, opt);
  REQUIRE(sol.status == milp::MilpStatus::optimal);
  UcSolutionView view;
  view.objective = sol.objective;
  for (std::size_t i = 0; i < inst.units.size(); ++i)
    view.schedules.push_back(ucbuild::extract_schedule(
        inst, static_cast<int>(i), prog.layout, sol.primal));
  return view;
}

}  // namespace

TEST_CASE("profits of the one-hour example at the CH price") {
  const auto inst = fx::ex1();
  const auto market = make_schedule(inst.units[0], {35}, {}, {true});
  CHECK(unit_profit(inst, 0, market, balance_prices({10})) ==
        doctest::Approx(-1400));
  const auto self_sched = make_schedule(inst.units[0], {10}, {}, {true});
  CHECK(unit_profit(inst, 0, self_sched, balance_prices({10})) ==
        doctest::Approx(-400));
  const auto off = make_schedule(inst.units[1], {0}, {}, {false});
  CHECK(unit_profit(inst, 1, off, balance_prices({123})) == doctest::Approx(0));
}

TEST_CASE("self-schedule at the CH price backs off to minimum") {
  const auto inst = fx::ex1();
  const auto s1 = self_schedule(inst, 0, balance_prices({10}));
  CHECK(s1.schedule.power[0] == doctest::Approx(10));
  CHECK(s1.profit == doctest::Approx(-400));

  const auto s2 = self_schedule(inst, 1, balance_prices({10}));
  CHECK(s2.profit == doctest::Approx(0));

  // Prices far above cost push output to the maximum.
  const auto rich = self_schedule(inst, 0, balance_prices({1000}));
  CHECK(rich.schedule.power[0] == doctest::Approx(50));
}

TEST_CASE("lost opportunity cost on the worked examples") {
  const auto e1 = fx::ex1();
  const auto market1 = make_schedule(e1.units[0], {35}, {}, {true});
  CHECK(compute_loc(e1, 0, market1, balance_prices({10})) ==
        doctest::Approx(1000));

  const auto e4 = fx::ex4();
  const auto market2 = make_schedule(e4.units[1], {25, 30}, {}, {true, true});
  CHECK(compute_loc(e4, 1, market2, balance_prices({50, 950.0 / 7})) ==
        doctest::Approx(1250.0 / 7).epsilon(1e-6));

  // Non-linked pricing of the same dispatch: hour-one LOC only.
  const auto h1 = fx::ex5_hour(0);
  const auto m_h1 = make_schedule(h1.units[1], {25}, {}, {true});
  CHECK(compute_loc(h1, 1, m_h1, balance_prices({50})) == doctest::Approx(1250));
  const auto h2 = fx::ex5_hour(1);
  const auto m_h2 = make_schedule(h2.units[1], {30}, {}, {true});
  CHECK(compute_loc(h2, 1, m_h2, balance_prices({100})) == doctest::Approx(0));
}

TEST_CASE("uplift report splits the gap into LOC and PRS") {
  const auto e2 = fx::ex2();
  const auto uc2 = solve_uc(e2);
  const auto ch2 = cg::run_cg(e2, cg::CgConfig{});
  REQUIRE(ch2.converged);
  const auto rep2 = uplift_report(e2, uc2, ch2);
  CHECK(rep2.duality_gap == doctest::Approx(400));
  CHECK(rep2.total_loc == doctest::Approx(0).scale(1));
  CHECK(rep2.prs == doctest::Approx(400));
  for (const auto& u : rep2.units) CHECK(u.loc >= -1e-6);

  const auto e3 = fx::ex3();
  const auto uc3 = solve_uc(e3);
  const auto ch3 = cg::run_cg(e3, cg::CgConfig{});
  REQUIRE(ch3.converged);
  const auto rep3 = uplift_report(e3, uc3, ch3);
  CHECK(rep3.duality_gap == doctest::Approx(950));
  CHECK(rep3.units[0].loc == doctest::Approx(950));
  CHECK(rep3.units[1].loc == doctest::Approx(0).scale(1));
  CHECK(rep3.prs == doctest::Approx(0).scale(1));
}

TEST_CASE("a convex instance has zero gap and zero uplift") {
  UcInstance inst;
  inst.name = "convex";
  inst.horizon = 2;
  UnitSpec a;
  a.id = "A";
  a.p_min = 0;
  a.p_max = 40;
  a.blocks = {{40, 12}};
  a.ramp_up = a.ramp_down = a.startup_ramp = a.shutdown_ramp = 40;
  a.must_run = true;
  a.init_online = true;
  UnitSpec b = a;
  b.id = "B";
  b.blocks = {{40, 30}};
  inst.units = {a, b};
  inst.constraints = {
      fx::balance_constraint({30, 60}, {&inst.units[0], &inst.units[1]})};

  const auto uc = solve_uc(inst);
  const auto ch = cg::run_cg(inst, cg::CgConfig{});
  REQUIRE(ch.converged);
  const auto rep = uplift_report(inst, uc, ch);
  CHECK(rep.duality_gap == doctest::Approx(0).scale(1));
  CHECK(rep.total_loc == doctest::Approx(0).scale(1));
  CHECK(rep.prs == doctest::Approx(0).scale(1));
}

TEST_CASE("uplift report rejects mismatched inputs") {
  const auto e1 = fx::ex1();
  const auto uc = solve_uc(e1);
  const auto ch = cg::run_cg(e1, cg::CgConfig{});
  auto bad = uc;
  bad.schedules.pop_back();
  CHECK_THROWS_AS(uplift_report(e1, bad, ch), std::invalid_argument);
  auto swapped = uc;
  std::swap(swapped.schedules[0], swapped.schedules[1]);
  CHECK_THROWS_AS(uplift_report(e1, swapped, ch), std::invalid_argument);
}

TEST_CASE("dual function at and around the CH point of the ramp example") {
  const auto inst = fx::ramp_example();
  CHECK(evaluate_dual_function(inst, balance_prices({10, 10, 276})) ==
        doctest::Approx(6975));
  CHECK(evaluate_dual_function(inst, balance_prices({0, 0, 0})) ==
        doctest::Approx(0).scale(1));

  const auto ch = cg::run_cg(inst, cg::CgConfig{});
  REQUIRE(ch.converged);
  // Weak duality against g*, concavity along the third coordinate.
  double prev2 = -1e300, prev1 = -1e300;
  for (double l3 = 90; l3 <= 1200; l3 += 37) {
    const double q = evaluate_dual_function(inst, balance_prices({10, 10, l3}));
    CHECK(q <= ch.rmp_objective + 1e-6);
    if (prev2 > -1e299)
      CHECK(prev1 >= (prev2 + q) / 2 - 1e-6);  // midpoint concavity
    prev2 = prev1;
    prev1 = q;
  }
}

TEST_CASE("sub-gradient with zero step stays put") {
  const auto inst = fx::ramp_example();
  SubgradientConfig cfg;
  cfg.rule = SubgradientConfig::StepRule::constant;
  cfg.coefficient = 0.0;
  cfg.iterations = 5;
  cfg.initial_prices = {10, 10, 90};
  const auto res = run_subgradient(inst, cfg);
  CHECK(res.final_prices == std::vector<double>{10, 10, 90});
  CHECK(res.values.size() == 5);
  CHECK(res.values[0] == doctest::Approx(res.values[4]));
}

TEST_CASE("sub-gradient ascends toward the dual optimum") {
  const auto inst = fx::ramp_example();
  SubgradientConfig cfg;
  cfg.rule = SubgradientConfig::StepRule::coeff_over_k;
  cfg.coefficient = 10.0;
  cfg.iterations = 400;
  cfg.initial_prices = {10, 10, 90};
  const auto res = run_subgradient(inst, cfg);
  const auto ch = cg::run_cg(inst, cg::CgConfig{});
  REQUIRE(ch.converged);
  CHECK(res.best_value <= ch.rmp_objective + 1e-6);
  CHECK(res.best_value > 6900);  // already close after a few hundred steps
  CHECK(res.best_prices.size() == 3);
}

TEST_CASE("sub-gradient rejects unsupported instances") {
  const auto e2 = fx::ex2();  // two system constraints
  SubgradientConfig cfg;
  cfg.initial_prices = {0};
  CHECK_THROWS_AS(run_subgradient(e2, cfg), std::invalid_argument);
}
