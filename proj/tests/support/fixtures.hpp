#pragma once

#include <vector>

#include "chp/model.hpp"

// Programmatic versions of the shipped fixture cases. The JSON files under
// fixtures/ are checked against these in the io tests so the two stay in
// sync.

namespace chp::testing {

inline SystemConstraintSpec balance_constraint(
    std::vector<double> demand, const std::vector<const UnitSpec*>& units,
    double penalty = 1000.0) {
  SystemConstraintSpec c;
  c.id = "balance";
  c.sense = ConstraintSense::equality;
  c.rhs = std::move(demand);
  for (const auto* u : units)
    c.coefficients.push_back({u->id, Product::power, 1.0});
  c.slack_penalty = penalty;
  c.slack_allowed = true;
  c.power_balance = true;
  return c;
}

// Two generators, one hour, 35 MW load. G1 online-only 10-50 MW at $50,
// G2 an all-or-nothing 50 MW block at $10.
inline UcInstance ex1() {
  UcInstance inst;
  inst.name = "ex1";
  inst.horizon = 1;

  UnitSpec g1;
  g1.id = "G1";
  g1.p_min = 10;
  g1.p_max = 50;
  g1.blocks = {{50, 50}};
  g1.ramp_up = g1.ramp_down = g1.startup_ramp = g1.shutdown_ramp = 50;
  g1.must_run = true;
  g1.init_online = true;
  g1.init_power = 10;

  UnitSpec g2;
  g2.id = "G2";
  g2.p_min = 0;
  g2.p_max = 50;
  g2.blocks = {{50, 10}};
  g2.ramp_up = g2.ramp_down = g2.startup_ramp = g2.shutdown_ramp = 50;
  g2.single_block_commitment = true;

  inst.units = {g1, g2};
  inst.constraints = {balance_constraint({35}, {&inst.units[0], &inst.units[1]})};
  return inst;
}

// Example 1 on two nodes: a 10 MW line limits G2's deliverable power.
inline UcInstance ex2() {
  UcInstance inst = ex1();
  inst.name = "ex2";
  SystemConstraintSpec line;
  line.id = "line";
  line.sense = ConstraintSense::less_equal;
  line.rhs = {10};
  line.coefficients = {{"G2", Product::power, 1.0}};
  line.slack_allowed = false;
  inst.constraints.push_back(line);
  return inst;
}

// Example 1 plus a $100 startup cost on G2.
inline UcInstance ex3() {
  UcInstance inst = ex1();
  inst.name = "ex3";
  inst.units[1].startup_cost = 100;
  return inst;
}

// Two hours, loads 45/80. G1 online-only both hours; G2 25-35 MW at $100
// committed for the whole horizon or not at all. The single commitment
// decision is encoded by starting G2 online with a zero startup rate:
// shutting down is free, restarting is impossible.
inline UcInstance ex4() {
  UcInstance inst;
  inst.name = "ex4";
  inst.horizon = 2;

  UnitSpec g1;
  g1.id = "G1";
  g1.p_min = 10;
  g1.p_max = 50;
  g1.blocks = {{50, 50}};
  g1.ramp_up = g1.ramp_down = g1.startup_ramp = g1.shutdown_ramp = 50;
  g1.must_run = true;
  g1.init_online = true;
  g1.init_power = 10;

  UnitSpec g2;
  g2.id = "G2";
  g2.p_min = 25;
  g2.p_max = 35;
  g2.blocks = {{35, 100}};
  g2.ramp_up = g2.ramp_down = 35;
  g2.startup_ramp = 0;
  g2.shutdown_ramp = 35;
  g2.init_online = true;
  g2.init_power = 25;

  inst.units = {g1, g2};
  inst.constraints = {
      balance_constraint({45, 80}, {&inst.units[0], &inst.units[1]})};
  return inst;
}

// Example 5 treats the two hours of Example 4 as independent single-hour
// pricing problems; the fixture ships them as separate instances.
inline UcInstance ex5_hour(int hour) {
  UcInstance inst;
  inst.name = hour == 0 ? "ex5_hour1" : "ex5_hour2";
  inst.horizon = 1;

  UnitSpec g1;
  g1.id = "G1";
  g1.p_min = 10;
  g1.p_max = 50;
  g1.blocks = {{50, 50}};
  g1.ramp_up = g1.ramp_down = g1.startup_ramp = g1.shutdown_ramp = 50;
  g1.must_run = true;
  g1.init_online = true;
  g1.init_power = 10;

  UnitSpec g2;
  g2.id = "G2";
  g2.p_min = 25;
  g2.p_max = 35;
  g2.blocks = {{35, 100}};
  g2.ramp_up = g2.ramp_down = g2.startup_ramp = g2.shutdown_ramp = 35;

  inst.units = {g1, g2};
  inst.constraints = {balance_constraint({hour == 0 ? 45.0 : 80.0},
                                         {&inst.units[0], &inst.units[1]})};
  return inst;
}

// Ramp-constrained two-generator, three-hour example. G1 0-100 MW at $10;
// G2 20-35 MW at $50 with $1000 startup, $30 no-load, 5 MW/h ramps,
// 22.5 MW startup rate, 35 MW shutdown rate, initially offline.
inline UcInstance ramp_example() {
  UcInstance inst;
  inst.name = "ramp";
  inst.horizon = 3;

  UnitSpec g1;
  g1.id = "G1";
  g1.p_min = 0;
  g1.p_max = 100;
  g1.blocks = {{100, 10}};
  g1.ramp_up = g1.ramp_down = g1.startup_ramp = g1.shutdown_ramp = 100;
  g1.must_run = true;
  g1.init_online = true;
  g1.init_power = 0;

  UnitSpec g2;
  g2.id = "G2";
  g2.p_min = 20;
  g2.p_max = 35;
  g2.blocks = {{35, 50}};
  g2.no_load_cost = 30;
  g2.startup_cost = 1000;
  g2.ramp_up = 5;
  g2.ramp_down = 5;
  g2.startup_ramp = 22.5;
  g2.shutdown_ramp = 35;

  inst.units = {g1, g2};
  inst.constraints = {balance_constraint(
      {95, 100, 130}, {&inst.units[0], &inst.units[1]})};
  return inst;
}

}  // namespace chp::testing
