#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chp/lp.hpp"
#include "chp/model.hpp"

// Column generation for convex-hull pricing: a restricted master problem
// over per-unit schedule columns with one convexity row per unit, priced by
// per-unit MILP subproblems until no schedule has a negative reduced cost.
// The duals of the system rows at termination are the CH prices.

namespace chp::cg {

// Append-only schedule columns per unit. Two columns of a unit are
// duplicates when their power and reserve vectors agree within 1e-9.
class ColumnPool {
 public:
  explicit ColumnPool(int num_units) : by_unit_(num_units) {}

  bool contains(int unit, const Schedule& s) const;
  // Returns false (and drops the column) on a duplicate.
  bool add(int unit, Schedule s);

  const std::vector<Schedule>& columns(int unit) const { return by_unit_[unit]; }
  int num_units() const { return static_cast<int>(by_unit_.size()); }
  int total_columns() const;

 private:
  std::vector<std::vector<Schedule>> by_unit_;
};

enum class InitMode { flat, warm, trivial };

InitMode parse_init_mode(const std::string& name);
const char* to_string(InitMode m);

struct CgConfig {
  InitMode init_mode = InitMode::trivial;
  double reduced_cost_tolerance = 1e-6;  // column admitted below -tolerance
  int max_iterations = 500;
  double subproblem_gap = 1e-9;  // intermediate iterations; final pass 1e-9
  bool parallel_subproblems = false;
  int log_level = 0;  // 0 silent, 1 iteration lines to stderr
};

struct CgIterationLog {
  int iteration = 0;           // 1-based RMP solve counter
  double rmp_objective = 0.0;  // g(k)
  PriceVector duals;
  std::vector<double> convexity_duals;   // pi per unit
  std::vector<double> reduced_costs;     // per unit, this iteration's pricing
  int columns_added = 0;
  double lp_dual_residual = 0.0;
  double wall_ms = 0.0;
};

struct ChResult {
  bool converged = false;
  PriceVector prices;          // duals of the system rows at termination
  double rmp_objective = 0.0;  // g*
  std::optional<double> uc_objective;  // f*, when a warm start supplied it
  std::optional<double> duality_gap;   // f* - g*
  std::vector<double> convexity_duals;
  // z weights aligned with the pool: weights[unit][column index].
  std::vector<std::vector<double>> weights;
  std::vector<double> final_reduced_costs;  // per unit, certification pass
  std::vector<CgIterationLog> logs;
  int iterations = 0;
  std::optional<ColumnPool> pool;
};

using LogSink = std::function<void(const CgIterationLog&)>;

// Initial columns: trivial (offline-or-forced schedules), warm (the UC
// optimum, caller supplied), flat (self-schedules at all-zero prices).
ColumnPool init_columns(const UcInstance& instance, InitMode mode,
                        const std::vector<Schedule>* warm_schedules = nullptr);

struct RmpMaps {
  std::vector<std::vector<int>> system_rows;  // constraint, hour -> row
  std::vector<int> convexity_rows;            // unit -> row
  std::vector<std::vector<int>> z_cols;       // unit, pool column -> LP col
  std::vector<std::vector<int>> slack_cols;   // constraint, hour -> col/-1
};

lp::LinearProgram build_rmp(const UcInstance& instance, const ColumnPool& pool,
                            RmpMaps* maps);

struct PriceResult {
  Schedule schedule;
  double subproblem_objective = 0.0;  // h
  double reduced_cost = 0.0;          // h - pi
  double self_profit = 0.0;           // -h
};

PriceResult price_unit(const UcInstance& instance, int unit_index,
                       const PriceVector& duals, double pi,
                       double subproblem_gap = 1e-9);

struct WarmStart {
  std::vector<Schedule> schedules;  // one per unit, the UC optimum
  double uc_objective = 0.0;
};

ChResult run_cg(const UcInstance& instance, const CgConfig& config,
                const WarmStart* warm = nullptr, const LogSink& sink = {});

}  // namespace chp::cg
