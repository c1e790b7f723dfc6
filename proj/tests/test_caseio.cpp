#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "chp/caseio.hpp"
#include "support/fixtures.hpp"

using namespace chp;
using namespace chp::io;
namespace fx = chp::testing;

namespace {
const std::string kFixtures = CHP_FIXTURE_DIR;
}

TEST_CASE("shipped fixture cases match the programmatic ones") {
  const std::pair<std::string, UcInstance> cases[] = {
      {"ex1.json", fx::ex1()},       {"ex2.json", fx::ex2()},
      {"ex3.json", fx::ex3()},       {"ex4.json", fx::ex4()},
      {"ex5_hour1.json", fx::ex5_hour(0)}, {"ex5_hour2.json", fx::ex5_hour(1)},
      {"ramp.json", fx::ramp_example()}};
  for (const auto& [file, programmatic] : cases) {
    INFO(file);
    const auto loaded = load_case(kFixtures + "/" + file);
    CaseFile reference;
    reference.instance = programmatic;
    // Compare through the canonical emitted form.
    CaseFile no_expect = loaded;
    no_expect.expectations.reset();
    CHECK(emit_case(no_expect) == emit_case(reference));
  }
}

TEST_CASE("expectations travel with the case") {
  const auto ex1 = load_case(kFixtures + "/ex1.json");
  REQUIRE(ex1.expectations.has_value());
  CHECK(ex1.expectations->g_star == 750.0);
  CHECK(ex1.expectations->f_star == 1750.0);
  CHECK(ex1.expectations->duality_gap == 1000.0);
  CHECK(ex1.expectations->ch_prices.at("balance") == std::vector<double>{10});
  CHECK(ex1.expectations->loc.at("G1") == 1000.0);

  const auto ramp = load_case(kFixtures + "/ramp.json");
  REQUIRE(ramp.expectations.has_value());
  CHECK(ramp.expectations->ir_objective == 6464.55);
  CHECK(ramp.expectations->ir_prices.at("balance")[2] == 182.701);
}

TEST_CASE("round trip is the identity on every fixture") {
  for (const char* file :
       {"ex1.json", "ex2.json", "ex3.json", "ex4.json", "ex5_hour1.json",
        "ex5_hour2.json", "ramp.json"}) {
    const auto once = load_case(kFixtures + "/" + std::string(file));
    const std::string emitted = emit_case(once);
    const auto twice = parse_case(emitted);
    CHECK(emit_case(twice) == emitted);
  }
}

TEST_CASE("parse, version and validation failures are distinct") {
  CHECK_THROWS_AS(parse_case("{ not json"), CaseParseError);
  CHECK_THROWS_AS(parse_case("{}"), CaseVersionError);
  CHECK_THROWS_AS(parse_case(R"({"schema_version": 99, "horizon": 1,
      "units": [], "constraints": []})"),
                  CaseVersionError);
  // Structurally fine, semantically empty.
  CHECK_THROWS_AS(parse_case(R"({"schema_version": 1, "horizon": 1,
      "units": [], "constraints": []})"),
                  CaseValidationError);
  // Field-level context in the message.
  try {
    parse_case(R"({"schema_version": 1, "horizon": 1,
      "units": [{"id": "A"}], "constraints": []})");
    FAIL("expected CaseValidationError");
  } catch (const CaseValidationError& e) {
    CHECK(std::string(e.what()).find("units[0].p_max") != std::string::npos);
  }
  // Model-level validation failure (rhs length).
  try {
    parse_case(R"({"schema_version": 1, "horizon": 2,
      "units": [{"id": "A", "p_max": 5, "blocks": [{"max_quantity": 5, "price": 1}]}],
      "constraints": [{"id": "balance", "rhs": [1], "power_balance": true,
                       "coefficients": [{"unit": "A"}]}]})");
    FAIL("expected CaseValidationError");
  } catch (const CaseValidationError& e) {
    CHECK(!e.violations.empty());
  }
}

TEST_CASE("tabular import applies the documented adjustments") {
  const std::string table =
      "name,pmin,pmax,b1mw,b1p,rr,mut,mdt,su_hot\n"
      "U1,10,100,100,25,100,2,3,500\n"
      "U2,0,40,40,18,,,,\n"
      "U3,5,60,60,30,30,4,,200\n";
  TabularOptions opt;
  opt.mapping.columns = {{"id", "name"},     {"p_min", "pmin"},
                         {"p_max", "pmax"},  {"block1_mw", "b1mw"},
                         {"block1_price", "b1p"}, {"ramp_up", "rr"},
                         {"ramp_down", "rr"},     {"min_up", "mut"},
                         {"min_down", "mdt"},     {"startup_cost", "su_hot"}};
  opt.mapping.defaults = {{"ramp_up", 20}, {"ramp_down", 20}};
  opt.demand = {120, 150};

  const auto inst = import_tabular_text(table, opt);
  CHECK(validate_instance(inst).empty());
  REQUIRE(inst.units.size() == 3);
  const auto& u1 = inst.units[0];
  CHECK(u1.ramp_up == doctest::Approx(50));      // halved
  CHECK(u1.startup_ramp == doctest::Approx(35)); // p_min + half ramp
  CHECK(u1.shutdown_ramp == doctest::Approx(100));
  CHECK(u1.reserve_max == doctest::Approx(25));  // 30-minute ramp
  CHECK(u1.min_up_time == 2);
  CHECK(u1.startup_cost == doctest::Approx(500));
  CHECK(u1.init_online);
  CHECK(u1.init_power == doctest::Approx(10));
  // Blank cells: mapping default 20, then halved; min times default to 1.
  const auto& u2 = inst.units[1];
  CHECK(u2.ramp_up == doctest::Approx(10));
  CHECK(u2.min_up_time == 1);
  CHECK(u2.min_down_time == 1);
  CHECK(u2.startup_cost == doctest::Approx(0));
  // Partially blank row.
  CHECK(inst.units[2].min_down_time == 1);
  CHECK(inst.units[2].min_up_time == 4);
  // Instance wiring.
  REQUIRE(inst.constraints.size() == 1);
  CHECK(inst.constraints[0].power_balance);
  CHECK(inst.constraints[0].rhs == std::vector<double>{120, 150});
}

TEST_CASE("adjustments are individually toggleable") {
  const std::string table = "name,pmax,b1mw,b1p,rr\nU1,100,100,25,100\n";
  TabularOptions opt;
  opt.mapping.columns = {{"id", "name"},
                         {"p_max", "pmax"},
                         {"block1_mw", "b1mw"},
                         {"block1_price", "b1p"},
                         {"ramp_up", "rr"},
                         {"ramp_down", "rr"}};
  opt.demand = {50};
  opt.adjustments.halve_ramps = false;
  opt.adjustments.start_online_at_pmin = false;
  const auto inst = import_tabular_text(table, opt);
  CHECK(inst.units[0].ramp_up == doctest::Approx(100));
  CHECK(!inst.units[0].init_online);
  CHECK(inst.units[0].startup_ramp == doctest::Approx(50));  // 0 + 100/2
}

TEST_CASE("tabular import reports bad cells and missing mappings") {
  TabularOptions opt;
  opt.mapping.columns = {{"id", "name"}, {"p_max", "pmax"}};
  opt.demand = {10};
  CHECK_THROWS_AS(import_tabular_text("name\nU1\n", opt), TabularError);
  try {
    import_tabular_text("name,pmax\nU1,abc\n", opt);
    FAIL("expected TabularError");
  } catch (const TabularError& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("pmax") != std::string::npos);
  }
  TabularOptions unmapped;
  unmapped.demand = {10};
  CHECK_THROWS_AS(import_tabular_text("a,b\n1,2\n", unmapped), TabularError);
}

TEST_CASE("mapping files parse") {
  const auto m = load_mapping(kFixtures + "/mapping.example.json");
  CHECK(m.columns.at("id") == "Unit Code");
  CHECK(m.defaults.at("no_load_cost") == 0);
  CHECK_THROWS_AS(parse_mapping("nope"), TabularError);
}

TEST_CASE("format_sig9 pins nine significant digits") {
  CHECK(format_sig9(8821.42857142857) == "8821.42857");
  CHECK(format_sig9(10.0) == "10");
  CHECK(format_sig9(-0.000123456789123) == "-0.000123456789");
}
