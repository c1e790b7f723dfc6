#pragma once

#include <vector>

#include "chp/lp.hpp"

// Branch-and-bound over binary variables on top of the LP solver. Dives
// depth-first until the first incumbent, then switches to best-bound node
// selection. Branching variable is the most fractional binary, ties broken
// by lowest column index.

namespace chp::milp {

struct MixedIntegerProgram {
  lp::LinearProgram base;
  std::vector<int> integer_columns;  // restricted to {0,1}
};

enum class MilpStatus {
  optimal,     // incumbent proven within the gap target
  infeasible,  // no integer-feasible point exists
  gap_limit,   // node limit hit with an incumbent; gap reported as-is
  unknown,     // node limit hit with no incumbent (not proven infeasible)
  unbounded,
};

const char* to_string(MilpStatus s);

struct MilpSolution {
  MilpStatus status = MilpStatus::unknown;
  std::vector<double> primal;
  double objective = 0.0;  // incumbent value
  double bound = 0.0;      // proven lower bound
  double gap = 0.0;        // (objective - bound) / max(1, |objective|)
  long nodes = 0;
};

struct MilpOptions {
  double gap_target = 1e-9;
  long node_limit = 200000;
  double integrality_tol = 1e-6;
  lp::SimplexOptions lp_options;
};

std::vector<std::string> validate(const MixedIntegerProgram& mip);

MilpSolution solve_milp(const MixedIntegerProgram& mip,
                        const MilpOptions& opt = {});

// Drops integrality and solves the LP relaxation; the duals of the system
// rows are the integer-relaxation prices.
lp::LpSolution solve_lp_relaxation(const MixedIntegerProgram& mip,
                                   const lp::SimplexOptions& opt = {});

}  // namespace chp::milp
