#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chp/milp.hpp"
#include "chp/model.hpp"

// Translates UcInstance data into solver matrices: the full unit-commitment
// MILP, its integer relaxation, and the per-unit pricing subproblem for a
// given set of duals. Builders are pure functions; concurrent builds are
// fine.

namespace chp::ucbuild {

// Maps (unit, hour, role) to column indices. Stable for a given instance.
// Units with a single block have no separate block columns; the power
// column carries the energy cost directly.
class VariableLayout {
 public:
  int power(int unit, int hour) const { return base_[unit] + hour; }
  int block(int unit, int hour, int b) const;
  int reserve(int unit, int hour) const;
  int on(int unit, int hour) const;
  int start(int unit, int hour) const;
  int stop(int unit, int hour) const;
  // Column of the slack of (constraint, hour), or -1 when none exists.
  int slack(int constraint, int hour) const;

  int num_units() const { return static_cast<int>(base_.size()); }
  int horizon() const { return horizon_; }
  int num_blocks(int unit) const { return blocks_[unit]; }

 private:
  friend class Builder;
  std::vector<int> base_;    // first column of each unit's group
  std::vector<int> blocks_;  // block columns per unit (0 when collapsed)
  std::vector<std::vector<int>> slack_cols_;  // per constraint, per hour
  int horizon_ = 0;
};

struct UcProgram {
  milp::MixedIntegerProgram mip;
  VariableLayout layout;
  // Row index of (system constraint, hour); empty for subproblems.
  std::vector<std::vector<int>> system_rows;
};

class BuildError : public std::runtime_error {
 public:
  BuildError(std::string what, std::vector<Violation> violations)
      : std::runtime_error(std::move(what)),
        violations(std::move(violations)) {}
  std::vector<Violation> violations;
};

// Full UC MILP with system constraints, slacks and penalties.
UcProgram build_full_uc(const UcInstance& instance);

// Same matrix with the binaries relaxed to [0,1]; duals of the balance
// rows of a solve are the integer-relaxation prices.
UcProgram build_integer_relaxation(const UcInstance& instance);

// Pricing subproblem of one unit: the unit's own rows with the objective
// cost minus the dual-weighted value of its system-constraint
// contributions. The convexity dual is deliberately not part of the
// objective; add it back when computing reduced costs.
UcProgram build_subproblem(const UcInstance& instance, int unit_index,
                           const PriceVector& duals);

class ExtractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads one unit's trajectory out of an integer-feasible primal vector.
// Cost is recomputed from the offer data, never taken from the solver
// objective. Throws ExtractError on non-integral commitments.
Schedule extract_schedule(const UcInstance& instance, int unit_index,
                          const VariableLayout& layout,
                          const std::vector<double>& primal);

// A schedule's contribution to one hour of a system constraint.
double constraint_contribution(const SystemConstraintSpec& constraint,
                               const Schedule& schedule, int hour);

}  // namespace chp::ucbuild
