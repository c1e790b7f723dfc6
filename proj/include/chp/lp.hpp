#pragma once

#include <string>
#include <vector>

// Dense revised-simplex solver for small/medium LPs. Returns optimal primal
// values together with exact duals and reduced costs of the final basis,
// which is what convex-hull pricing consumes. Two-phase (no big-M), bounded
// variables via bound flips, product-form updates with periodic LU
// refactorization, Bland's rule after a degenerate-pivot streak.

namespace chp::lp {

enum class RowSense { eq, le, ge };

struct LinearProgram {
  std::vector<double> objective;  // per column
  std::vector<double> lower;      // per column, finite unless upper is finite
  std::vector<double> upper;      // per column, may be +inf

  struct Entry {
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<RowSense> senses;  // per row
  std::vector<double> rhs;       // per row

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(senses.size()); }

  int add_col(double obj, double lo, double up);
  int add_row(RowSense sense, double rhs_value);
  void add_entry(int row, int col, double value);
};

// Structural problems in the LinearProgram itself (NaN entries, bad
// indices, inverted bounds). Empty means solvable input.
std::vector<std::string> validate(const LinearProgram& lp);

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  std::vector<double> primal;         // per column
  double objective = 0.0;
  std::vector<double> duals;          // per row; see sign convention below
  std::vector<double> reduced_costs;  // per column, 0 for basic columns
  long iterations = 0;
  // |c'x - (y'b + sum of nonbasic reduced costs at their bounds)|, the
  // strong-duality residual of the returned basis.
  double dual_residual = 0.0;
};

// Sign convention (minimization): duals of >= rows are >= 0, duals of
// <= rows are <= 0, equality rows unrestricted.
struct SimplexOptions {
  double pivot_tol = 1e-9;
  double ratio_tol = 1e-9;
  double feas_tol = 1e-7;      // phase-1 infeasibility certificate
  int refactor_interval = 100; // pivots between LU refactorizations
  int bland_after = 50;        // degenerate-pivot streak before Bland's rule
  long max_iterations = 0;     // 0 = automatic from problem size
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {});

}  // namespace chp::lp
