#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core data model for unit-commitment instances, per-unit schedules and
// price vectors. All types are plain immutable-after-construction values;
// they carry no solver state and are safe to share across threads.

namespace chp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One step of a piecewise-linear energy offer. Block prices must be
// non-decreasing within a unit, which makes greedy cheapest-first
// decomposition of a power level exact.
struct BlockOffer {
  double max_quantity = 0.0;  // MW
  double price = 0.0;         // currency per MWh
};

struct UnitSpec {
  std::string id;
  double p_min = 0.0;  // MW, minimum stable output while online
  double p_max = 0.0;  // MW
  std::vector<BlockOffer> blocks;

  double no_load_cost = 0.0;
  double startup_cost = 0.0;
  double shutdown_cost = 0.0;

  double reserve_offer_price = 0.0;  // currency per MWh of reserve
  double reserve_max = 0.0;          // MW

  // Hourly rates. "Unlimited" rates are stored as p_max by convention
  // (see caseio normalization); a rate of p_max never binds.
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double startup_ramp = 0.0;
  double shutdown_ramp = 0.0;

  int min_up_time = 1;    // hours
  int min_down_time = 1;  // hours

  bool init_online = false;
  double init_power = 0.0;
  int forced_hours_online = 0;   // initial hours pinned online
  int forced_hours_offline = 0;  // initial hours pinned offline

  bool must_run = false;                 // commitment pinned on every hour
  bool single_block_commitment = false;  // output pinned to p_max while on

  double block_capacity() const {
    double total = 0.0;
    for (const auto& b : blocks) total += b.max_quantity;
    return total;
  }
};

enum class ConstraintSense { equality, greater_equal, less_equal };
enum class Product { power, reserve };

struct ConstraintCoefficient {
  std::string unit_id;
  Product product = Product::power;
  double value = 0.0;
};

// A system-wide linear constraint applied at every hour (power balance,
// reserve requirement, transmission-style limits). The rhs varies by hour;
// the participation coefficients do not.
struct SystemConstraintSpec {
  std::string id;
  ConstraintSense sense = ConstraintSense::equality;
  std::vector<double> rhs;  // one entry per hour
  std::vector<ConstraintCoefficient> coefficients;
  double slack_penalty = 0.0;  // currency per MWh of violation
  bool slack_allowed = false;
  bool power_balance = false;  // flagged for price/uplift reporting

  const ConstraintCoefficient* find(const std::string& unit_id,
                                    Product product) const {
    for (const auto& c : coefficients)
      if (c.unit_id == unit_id && c.product == product) return &c;
    return nullptr;
  }
};

struct UcInstance {
  std::string name;
  int horizon = 0;  // hours
  std::vector<UnitSpec> units;
  std::vector<SystemConstraintSpec> constraints;

  const UnitSpec* find_unit(const std::string& id) const {
    for (const auto& u : units)
      if (u.id == id) return &u;
    return nullptr;
  }
};

// One feasible full-horizon trajectory of a single unit, the "column" of
// the decomposition. The stored cost always matches evaluate_cost.
struct Schedule {
  std::string unit_id;
  std::vector<double> power;    // MW per hour
  std::vector<double> reserve;  // MW per hour
  std::vector<bool> on;
  double cost = 0.0;
};

// Duals of the system constraints, one vector per constraint aligned with
// the instance's constraint order.
struct PriceVector {
  std::vector<std::vector<double>> by_constraint;

  int num_constraints() const { return static_cast<int>(by_constraint.size()); }
  double at(int constraint, int hour) const {
    return by_constraint[constraint][hour];
  }
};

struct Violation {
  std::string subject;  // unit or constraint id, or "instance"
  std::string rule;

  std::string to_string() const { return subject + ": " + rule; }
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks every type invariant of the instance. Violations are returned as
// data; an empty list means the instance is well formed.
std::vector<Violation> validate_instance(const UcInstance& instance);

// Derives start/stop indicator vectors from an on/off trajectory and the
// unit's initial state.
struct CommitmentEvents {
  std::vector<bool> start;
  std::vector<bool> stop;
};
CommitmentEvents commitment_events(const UnitSpec& unit,
                                   const std::vector<bool>& on);

// Total as-offered cost of a trajectory. Power is decomposed into blocks
// greedily (cheapest block first; valid because prices are non-decreasing).
// Throws ModelError if some hour's power exceeds total block capacity.
double evaluate_cost(const UnitSpec& unit, const std::vector<double>& power,
                     const std::vector<double>& reserve,
                     const std::vector<bool>& on,
                     const std::vector<bool>& start,
                     const std::vector<bool>& stop);

// Convenience overload: start/stop derived from the on-vector.
double evaluate_cost(const UnitSpec& unit, const std::vector<double>& power,
                     const std::vector<double>& reserve,
                     const std::vector<bool>& on);

struct FeasibilityResult {
  bool feasible = true;
  std::string first_violation;  // empty when feasible
};

// Verifies a schedule against capacity, commitment logic, ramp and
// startup/shutdown rates, min up/down windows, initial conditions, reserve
// headroom and the stylized-unit flags.
FeasibilityResult check_feasible(const UnitSpec& unit,
                                 const Schedule& schedule);

// Cheapest do-nothing schedule: offline everywhere when the initial state
// allows, otherwise ride the forced initial hours at minimum output and
// shut down as soon as the rates permit. Throws ModelError when no such
// schedule exists (caller should warm start instead).
Schedule trivial_schedule(const UnitSpec& unit, int horizon);

Schedule make_schedule(const UnitSpec& unit, std::vector<double> power,
                       std::vector<double> reserve, std::vector<bool> on);

}  // namespace chp
