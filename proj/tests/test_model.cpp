#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chp/model.hpp"
#include "support/fixtures.hpp"

using namespace chp;
namespace fx = chp::testing;

TEST_CASE("validate_instance accepts all shipped fixtures") {
  CHECK(validate_instance(fx::ex1()).empty());
  CHECK(validate_instance(fx::ex2()).empty());
  CHECK(validate_instance(fx::ex3()).empty());
  CHECK(validate_instance(fx::ex4()).empty());
  CHECK(validate_instance(fx::ex5_hour(0)).empty());
  CHECK(validate_instance(fx::ex5_hour(1)).empty());
  CHECK(validate_instance(fx::ramp_example()).empty());
}

TEST_CASE("validate_instance flags inverted bounds") {
  auto inst = fx::ex1();
  inst.units[0].p_min = 20;
  inst.units[0].p_max = 10;
  const auto v = validate_instance(inst);
  REQUIRE(v.size() >= 1);
  CHECK(v[0].subject == "G1");
}

TEST_CASE("validate_instance flags rhs length mismatch") {
  auto inst = fx::ex4();
  inst.constraints[0].rhs = {45};  // horizon is 2
  const auto v = validate_instance(inst);
  REQUIRE(v.size() == 1);
  CHECK(v[0].subject == "balance");
}

TEST_CASE("validate_instance flags duplicate ids and missing balance flag") {
  auto inst = fx::ex1();
  inst.units[1].id = "G1";
  CHECK(!validate_instance(inst).empty());

  auto inst2 = fx::ex1();
  inst2.constraints[0].power_balance = false;
  CHECK(!validate_instance(inst2).empty());
}

TEST_CASE("evaluate_cost on the stylized examples") {
  const auto e1 = fx::ex1();
  CHECK(evaluate_cost(e1.units[0], {35}, {}, {true}) == doctest::Approx(1750));

  const auto e3 = fx::ex3();
  CHECK(evaluate_cost(e3.units[1], {50}, {}, {true}, {true}, {false}) ==
        doctest::Approx(600));

  CHECK(evaluate_cost(e1.units[1], {0}, {}, {false}) == 0.0);
}

TEST_CASE("evaluate_cost fills blocks cheapest-first") {
  UnitSpec u;
  u.id = "U";
  u.p_min = 0;
  u.p_max = 30;
  u.blocks = {{10, 5}, {10, 7}, {10, 20}};
  u.ramp_up = u.ramp_down = u.startup_ramp = u.shutdown_ramp = 30;
  // 25 MW = 10@5 + 10@7 + 5@20
  CHECK(evaluate_cost(u, {25}, {}, {true}) == doctest::Approx(220));
  CHECK_THROWS_AS(evaluate_cost(u, {31}, {}, {true}), ModelError);
}

TEST_CASE("evaluate_cost includes reserve and commitment costs") {
  UnitSpec u;
  u.id = "U";
  u.p_max = 20;
  u.blocks = {{20, 3}};
  u.no_load_cost = 11;
  u.startup_cost = 100;
  u.shutdown_cost = 7;
  u.reserve_offer_price = 2;
  u.ramp_up = u.ramp_down = u.startup_ramp = u.shutdown_ramp = 20;
  // start at hour 1, stop at hour 3
  const double c = evaluate_cost(u, {10, 10, 0}, {5, 0, 0},
                                 {true, true, false});
  CHECK(c == doctest::Approx(100 + 2 * 11 + 7 + 2 * 30 + 2 * 5));
}

TEST_CASE("check_feasible on the ramp example unit") {
  const auto inst = fx::ramp_example();
  const auto& g2 = inst.units[1];

  Schedule ok = make_schedule(g2, {22.5, 27.5, 32.5}, {}, {true, true, true});
  CHECK(check_feasible(g2, ok).feasible);
  CHECK(ok.cost == doctest::Approx(5215));

  Schedule bad;
  bad.unit_id = "G2";
  bad.power = {25, 25, 35};
  bad.on = {true, true, true};
  bad.cost = 0;
  const auto res = check_feasible(g2, bad);
  CHECK(!res.feasible);

  Schedule off = make_schedule(g2, {0, 0, 0}, {}, {false, false, false});
  CHECK(check_feasible(g2, off).feasible);
}

TEST_CASE("check_feasible rejects rule violations one by one") {
  UnitSpec u;
  u.id = "U";
  u.p_min = 5;
  u.p_max = 20;
  u.blocks = {{20, 10}};
  u.reserve_max = 4;
  u.ramp_up = u.ramp_down = 6;
  u.startup_ramp = 20;
  u.shutdown_ramp = 8;
  u.min_up_time = 2;
  u.min_down_time = 2;

  auto sched = [&](std::vector<double> p, std::vector<bool> on,
                   std::vector<double> r = {}) {
    Schedule s;
    s.unit_id = u.id;
    s.power = std::move(p);
    s.reserve = std::move(r);
    s.on = std::move(on);
    return s;
  };

  CHECK(!check_feasible(u, sched({3, 0}, {true, false})).feasible);   // below p_min
  CHECK(!check_feasible(u, sched({0, 2}, {false, false})).feasible);  // output while off
  CHECK(!check_feasible(u, sched({8, 15}, {true, true})).feasible);   // ramp up 7 > 6
  CHECK(!check_feasible(u, sched({8, 8}, {true, true}, {4, 5})).feasible);  // reserve cap
  CHECK(!check_feasible(u, sched({18}, {true}, {4})).feasible);             // headroom
  // min up: start at h1, stop at h2
  CHECK(!check_feasible(u, sched({8, 0}, {true, false})).feasible);
  CHECK(check_feasible(u, sched({8, 8}, {true, true})).feasible);
  // min down: stop at h1 then restart at h2 (would need init online)
  UnitSpec v = u;
  v.init_online = true;
  v.init_power = 8;
  CHECK(!check_feasible(v, sched({0, 8}, {false, true})).feasible);
}

TEST_CASE("check_feasible honors initial conditions and flags") {
  const auto e1 = fx::ex1();
  // must_run offline
  Schedule s;
  s.unit_id = "G1";
  s.power = {0};
  s.on = {false};
  CHECK(!check_feasible(e1.units[0], s).feasible);
  // single-block unit dispatched below p_max
  Schedule t;
  t.unit_id = "G2";
  t.power = {30};
  t.on = {true};
  CHECK(!check_feasible(e1.units[1], t).feasible);

  UnitSpec f;
  f.id = "F";
  f.p_min = 2;
  f.p_max = 10;
  f.blocks = {{10, 1}};
  f.ramp_up = f.ramp_down = f.startup_ramp = f.shutdown_ramp = 10;
  f.init_online = true;
  f.init_power = 5;
  f.forced_hours_online = 2;
  Schedule early_off;
  early_off.unit_id = "F";
  early_off.power = {5, 0, 0};
  early_off.on = {true, false, false};
  CHECK(!check_feasible(f, early_off).feasible);
}

TEST_CASE("trivial_schedule matches the worked example") {
  const auto e1 = fx::ex1();
  const auto s2 = trivial_schedule(e1.units[1], 1);
  CHECK(s2.power == std::vector<double>{0});
  CHECK(s2.cost == 0.0);

  const auto s1 = trivial_schedule(e1.units[0], 1);
  CHECK(s1.power == std::vector<double>{10});
  CHECK(s1.cost == doctest::Approx(500));

  UnitSpec free_unit;
  free_unit.id = "F";
  free_unit.p_max = 10;
  free_unit.blocks = {{10, 1}};
  free_unit.ramp_up = free_unit.ramp_down = 10;
  free_unit.startup_ramp = free_unit.shutdown_ramp = 10;
  const auto s3 = trivial_schedule(free_unit, 4);
  CHECK(s3.power == std::vector<double>(4, 0.0));
  CHECK(s3.cost == 0.0);
  CHECK(check_feasible(free_unit, s3).feasible);
}

TEST_CASE("trivial_schedule rides out forced online hours") {
  UnitSpec u;
  u.id = "U";
  u.p_min = 10;
  u.p_max = 40;
  u.blocks = {{40, 8}};
  u.no_load_cost = 2;
  u.ramp_up = u.ramp_down = 40;
  u.startup_ramp = u.shutdown_ramp = 40;
  u.init_online = true;
  u.init_power = 10;
  u.forced_hours_online = 2;
  const auto s = trivial_schedule(u, 4);
  CHECK(s.on == std::vector<bool>{true, true, false, false});
  CHECK(s.power[0] == doctest::Approx(10));
  CHECK(s.power[1] == doctest::Approx(10));
  CHECK(check_feasible(u, s).feasible);
  CHECK(s.cost == doctest::Approx(2 * (10 * 8 + 2)));
}

TEST_CASE("trivial_schedule errors when forced constraints are unsatisfiable") {
  UnitSpec u;
  u.id = "U";
  u.p_min = 30;  // cannot be started: startup rate below p_min
  u.p_max = 40;
  u.blocks = {{40, 8}};
  u.ramp_up = u.ramp_down = 5;
  u.startup_ramp = 10;
  u.shutdown_ramp = 40;
  u.must_run = true;
  CHECK_THROWS_AS(trivial_schedule(u, 3), ModelError);
}

TEST_CASE("property: cost is monotone in power under fixed commitment") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> qty(1.0, 30.0), price(0.0, 60.0);
  for (int trial = 0; trial < 200; ++trial) {
    UnitSpec u;
    u.id = "P";
    u.p_max = 0;
    double pr = 0;
    const int nb = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < nb; ++b) {
      pr += price(rng) / nb;
      const double q = qty(rng);
      u.blocks.push_back({q, pr});
      u.p_max += q;
    }
    u.ramp_up = u.ramp_down = u.startup_ramp = u.shutdown_ramp = u.p_max;
    std::uniform_real_distribution<double> lvl(0.0, u.p_max);
    double a = lvl(rng), b = lvl(rng);
    if (a > b) std::swap(a, b);
    const double ca = evaluate_cost(u, {a}, {}, {true});
    const double cb = evaluate_cost(u, {b}, {}, {true});
    CHECK(ca <= cb + 1e-9);
  }
}

TEST_CASE("property: schedules built by make_schedule satisfy the cost law") {
  const auto inst = fx::ramp_example();
  const auto& g2 = inst.units[1];
  Schedule s = make_schedule(g2, {0, 22.5, 27.5}, {}, {false, true, true});
  CHECK(s.cost == doctest::Approx(evaluate_cost(g2, s.power, s.reserve, s.on))
                      .epsilon(1e-9));
  CHECK(s.cost == doctest::Approx(1000 + 60 + 50 * 50).epsilon(1e-9));
  CHECK(check_feasible(g2, s).feasible);
}
