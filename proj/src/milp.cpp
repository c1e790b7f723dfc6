#include "chp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

namespace chp::milp {

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::optimal: return "optimal";
    case MilpStatus::infeasible: return "infeasible";
    case MilpStatus::gap_limit: return "gap_limit";
    case MilpStatus::unknown: return "unknown";
    case MilpStatus::unbounded: return "unbounded";
  }
  return "?";
}

std::vector<std::string> validate(const MixedIntegerProgram& mip) {
  auto out = lp::validate(mip.base);
  for (int j : mip.integer_columns) {
    if (j < 0 || j >= mip.base.num_cols()) {
      out.push_back("integer column " + std::to_string(j) + " out of range");
      continue;
    }
    if (mip.base.lower[j] < 0.0 || mip.base.upper[j] > 1.0)
      out.push_back("integer column " + std::to_string(j) +
                    " has bounds outside [0,1]");
  }
  return out;
}

namespace {

struct Node {
  // (column, value) fixings along the path from the root.
  std::vector<std::pair<int, int>> fixings;
  double bound;
  long seq;  // creation order, tie-breaker for determinism
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // best bound first
    return a.seq > b.seq;
  }
};

int pick_branching(const MixedIntegerProgram& mip,
                   const std::vector<double>& primal, double tol) {
  int best = -1;
  double best_frac = tol;
  for (int j : mip.integer_columns) {
    const double v = primal[j];
    const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
    if (frac > best_frac) {
      best_frac = frac;
      best = j;
    }
  }
  return best;
}

}  // namespace

MilpSolution solve_milp(const MixedIntegerProgram& mip, const MilpOptions& opt) {
  const auto problems = validate(mip);
  if (!problems.empty())
    throw std::invalid_argument("solve_milp: invalid program: " +
                                problems.front());

  lp::LinearProgram work = mip.base;
  const std::vector<double> root_lower = work.lower;
  const std::vector<double> root_upper = work.upper;

  MilpSolution sol;
  bool have_incumbent = false;
  double incumbent = 0.0;
  std::vector<double> incumbent_primal;

  auto solve_node = [&](const Node& node) {
    for (const auto& [col, val] : node.fixings) {
      work.lower[col] = val;
      work.upper[col] = val;
    }
    auto lp_sol = lp::solve_lp(work, opt.lp_options);
    for (const auto& [col, val] : node.fixings) {
      work.lower[col] = root_lower[col];
      work.upper[col] = root_upper[col];
    }
    return lp_sol;
  };

  auto rel_gap = [](double obj, double bnd) {
    return (obj - bnd) / std::max(1.0, std::abs(obj));
  };

  // Dive stack until the first incumbent, then a best-bound heap.
  std::deque<Node> dive;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
  long seq = 0;
  const double inf = std::numeric_limits<double>::infinity();
  dive.push_back({{}, -inf, seq++});

  // Weakest bound ever pruned against the incumbent; caps the final proven
  // bound so a nonzero gap_target is reported honestly.
  double pruned_floor = inf;
  bool saw_unbounded = false;

  while (!dive.empty() || !heap.empty()) {
    if (sol.nodes >= opt.node_limit) break;
    Node node;
    if (!dive.empty()) {
      node = std::move(dive.back());
      dive.pop_back();
    } else {
      node = heap.top();
      heap.pop();
    }
    // Prune against the incumbent before paying for the LP.
    if (have_incumbent && rel_gap(incumbent, node.bound) <= opt.gap_target) {
      pruned_floor = std::min(pruned_floor, node.bound);
      continue;
    }

    ++sol.nodes;
    const auto lp_sol = solve_node(node);
    if (lp_sol.status == lp::LpStatus::infeasible) continue;
    if (lp_sol.status == lp::LpStatus::unbounded) {
      saw_unbounded = true;  // node region is a subset of the root region
      break;
    }
    if (lp_sol.status == lp::LpStatus::iteration_limit) {
      if (getenv("CHP_DUMP_STALL")) {
        for (const auto& [col, val] : node.fixings) {
          work.lower[col] = val;
          work.upper[col] = val;
        }
        FILE* f = fopen(getenv("CHP_DUMP_STALL"), "w");
        fprintf(f, "%d %d %zu\n", work.num_rows(), work.num_cols(), work.entries.size());
        for (int j = 0; j < work.num_cols(); ++j)
          fprintf(f, "%.17g %.17g %.17g\n", work.objective[j], work.lower[j], work.upper[j]);
        for (int i = 0; i < work.num_rows(); ++i)
          fprintf(f, "%d %.17g\n", (int)work.senses[i], work.rhs[i]);
        for (auto& e : work.entries) fprintf(f, "%d %d %.17g\n", e.row, e.col, e.value);
        fclose(f);
      }
      throw std::runtime_error("solve_milp: LP stalled at a node");
    }

    const double node_bound = lp_sol.objective;
    if (have_incumbent && rel_gap(incumbent, node_bound) <= opt.gap_target) {
      pruned_floor = std::min(pruned_floor, node_bound);
      continue;
    }

    const int branch = pick_branching(mip, lp_sol.primal, opt.integrality_tol);
    if (branch < 0) {
      // Integer feasible.
      if (!have_incumbent || node_bound < incumbent) {
        have_incumbent = true;
        incumbent = node_bound;
        incumbent_primal = lp_sol.primal;
        // First incumbent: abandon the dive order, move everything to the heap.
        while (!dive.empty()) {
          heap.push(std::move(dive.back()));
          dive.pop_back();
        }
      }
      continue;
    }

    const double frac = lp_sol.primal[branch];
    const int near = frac >= 0.5 ? 1 : 0;
    Node a = node, b = node;
    a.fixings.emplace_back(branch, near);
    a.bound = node_bound;
    a.seq = seq++;
    b.fixings.emplace_back(branch, 1 - near);
    b.bound = node_bound;
    b.seq = seq++;
    if (!have_incumbent) {
      // Depth-first: explore the rounded child first.
      dive.push_back(std::move(b));
      dive.push_back(std::move(a));
    } else {
      heap.push(std::move(a));
      heap.push(std::move(b));
    }
  }

  if (saw_unbounded) {
    sol.status = MilpStatus::unbounded;
    return sol;
  }

  const bool exhausted = dive.empty() && heap.empty();
  if (!have_incumbent) {
    sol.status = exhausted ? MilpStatus::infeasible : MilpStatus::unknown;
    return sol;
  }

  double open_bound = pruned_floor;
  if (!heap.empty()) open_bound = std::min(open_bound, heap.top().bound);
  for (const auto& n : dive) open_bound = std::min(open_bound, n.bound);

  sol.objective = incumbent;
  sol.primal = std::move(incumbent_primal);
  sol.bound = std::min(incumbent, open_bound);
  sol.gap = std::max(0.0, rel_gap(sol.objective, sol.bound));
  // With the tree exhausted the residual gap stems only from nodes pruned
  // at gap_target, so "optimal" keeps its contract.
  sol.status = exhausted ? MilpStatus::optimal : MilpStatus::gap_limit;
  return sol;
}

lp::LpSolution solve_lp_relaxation(const MixedIntegerProgram& mip,
                                   const lp::SimplexOptions& opt) {
  return lp::solve_lp(mip.base, opt);
}

}  // namespace chp::milp
