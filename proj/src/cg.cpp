#include "chp/cg.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "chp/milp.hpp"
#include "chp/ucbuild.hpp"

namespace chp::cg {

namespace {
constexpr double kDupTol = 1e-9;
constexpr double kCertGap = 1e-9;
}  // namespace

bool ColumnPool::contains(int unit, const Schedule& s) const {
  for (const auto& c : by_unit_[unit]) {
    if (c.power.size() != s.power.size()) continue;
    bool same = true;
    for (std::size_t t = 0; t < s.power.size() && same; ++t) {
      if (std::abs(c.power[t] - s.power[t]) > kDupTol) same = false;
      const double cr = c.reserve.empty() ? 0.0 : c.reserve[t];
      const double sr = s.reserve.empty() ? 0.0 : s.reserve[t];
      if (std::abs(cr - sr) > kDupTol) same = false;
    }
    if (same) return true;
  }
  return false;
}

bool ColumnPool::add(int unit, Schedule s) {
  if (contains(unit, s)) return false;
  by_unit_[unit].push_back(std::move(s));
  return true;
}

int ColumnPool::total_columns() const {
  int n = 0;
  for (const auto& v : by_unit_) n += static_cast<int>(v.size());
  return n;
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "flat") return InitMode::flat;
  if (name == "warm") return InitMode::warm;
  if (name == "trivial") return InitMode::trivial;
  throw std::invalid_argument("unknown init mode '" + name +
                              "' (expected flat|warm|trivial)");
}

const char* to_string(InitMode m) {
  switch (m) {
    case InitMode::flat: return "flat";
    case InitMode::warm: return "warm";
    case InitMode::trivial: return "trivial";
  }
  return "?";
}

ColumnPool init_columns(const UcInstance& instance, InitMode mode,
                        const std::vector<Schedule>* warm_schedules) {
  const int n = static_cast<int>(instance.units.size());
  ColumnPool pool(n);
  switch (mode) {
    case InitMode::trivial:
      for (int i = 0; i < n; ++i)
        pool.add(i, trivial_schedule(instance.units[i], instance.horizon));
      break;
    case InitMode::warm: {
      if (!warm_schedules)
        throw std::invalid_argument(
            "warm start requires the UC solution's schedules");
      if (static_cast<int>(warm_schedules->size()) != n)
        throw std::invalid_argument("warm start needs one schedule per unit");
      for (int i = 0; i < n; ++i) {
        const auto& s = (*warm_schedules)[i];
        if (s.unit_id != instance.units[i].id)
          throw std::invalid_argument("warm schedule order mismatch at " +
                                      s.unit_id);
        pool.add(i, s);
      }
      break;
    }
    case InitMode::flat: {
      PriceVector zeros;
      zeros.by_constraint.assign(
          instance.constraints.size(),
          std::vector<double>(instance.horizon, 0.0));
      for (int i = 0; i < n; ++i)
        pool.add(i, price_unit(instance, i, zeros, 0.0).schedule);
      break;
    }
  }
  return pool;
}

lp::LinearProgram build_rmp(const UcInstance& instance, const ColumnPool& pool,
                            RmpMaps* maps) {
  const int T = instance.horizon;
  const int n_units = static_cast<int>(instance.units.size());
  for (int i = 0; i < n_units; ++i)
    if (pool.columns(i).empty())
      throw std::invalid_argument("empty column pool for unit " +
                                  instance.units[i].id);

  lp::LinearProgram rmp;
  RmpMaps local;
  RmpMaps& m = maps ? *maps : local;
  m.system_rows.assign(instance.constraints.size(), {});
  m.convexity_rows.assign(n_units, -1);
  m.z_cols.assign(n_units, {});
  m.slack_cols.assign(instance.constraints.size(), {});

  // System rows, constraint-major, then one convexity row per unit.
  for (std::size_t c = 0; c < instance.constraints.size(); ++c) {
    const auto& con = instance.constraints[c];
    lp::RowSense sense = con.sense == ConstraintSense::equality
                             ? lp::RowSense::eq
                             : con.sense == ConstraintSense::less_equal
                                   ? lp::RowSense::le
                                   : lp::RowSense::ge;
    for (int t = 0; t < T; ++t)
      m.system_rows[c].push_back(rmp.add_row(sense, con.rhs[t]));
  }
  for (int i = 0; i < n_units; ++i)
    m.convexity_rows[i] = rmp.add_row(lp::RowSense::eq, 1.0);

  // One z column per schedule; cost is the schedule cost.
  for (int i = 0; i < n_units; ++i) {
    for (const auto& s : pool.columns(i)) {
      const int col = rmp.add_col(s.cost, 0.0, chp::kInfinity);
      m.z_cols[i].push_back(col);
      for (std::size_t c = 0; c < instance.constraints.size(); ++c) {
        const auto& con = instance.constraints[c];
        for (int t = 0; t < T; ++t) {
          const double v = ucbuild::constraint_contribution(con, s, t);
          if (v != 0.0) rmp.add_entry(m.system_rows[c][t], col, v);
        }
      }
      rmp.add_entry(m.convexity_rows[i], col, 1.0);
    }
  }

  // Slack columns on the constraints that allow them.
  for (std::size_t c = 0; c < instance.constraints.size(); ++c) {
    const auto& con = instance.constraints[c];
    m.slack_cols[c].assign(T, -1);
    if (!con.slack_allowed) continue;
    for (int t = 0; t < T; ++t) {
      const int col = rmp.add_col(con.slack_penalty, 0.0, chp::kInfinity);
      m.slack_cols[c][t] = col;
      rmp.add_entry(m.system_rows[c][t], col,
                    con.sense == ConstraintSense::less_equal ? -1.0 : 1.0);
    }
  }
  return rmp;
}

PriceResult price_unit(const UcInstance& instance, int unit_index,
                       const PriceVector& duals, double pi,
                       double subproblem_gap) {
  const auto prog = ucbuild::build_subproblem(instance, unit_index, duals);
  milp::MilpOptions opt;
  opt.gap_target = subproblem_gap;
  const auto sol = milp::solve_milp(prog.mip, opt);
  if (sol.status == milp::MilpStatus::infeasible)
    throw std::runtime_error("unit " + instance.units[unit_index].id +
                             " has no feasible schedule");
  if (sol.status != milp::MilpStatus::optimal)
    throw std::runtime_error("subproblem solve failed for unit " +
                             instance.units[unit_index].id + ": " +
                             milp::to_string(sol.status));
  PriceResult out;
  out.schedule =
      ucbuild::extract_schedule(instance, unit_index, prog.layout, sol.primal);
  out.subproblem_objective = sol.objective;
  out.reduced_cost = sol.objective - pi;
  out.self_profit = -sol.objective;
  return out;
}

namespace {

std::vector<PriceResult> price_all(const UcInstance& instance,
                                   const PriceVector& duals,
                                   const std::vector<double>& pi, double gap,
                                   bool parallel) {
  const int n = static_cast<int>(instance.units.size());
  std::vector<PriceResult> results(n);
  if (!parallel || n < 2) {
    for (int i = 0; i < n; ++i)
      results[i] = price_unit(instance, i, duals, pi[i], gap);
    return results;
  }
  // Fan out over immutable inputs; each worker owns a disjoint slot range,
  // so the merged result is identical to the serial order.
  const unsigned int hw = std::thread::hardware_concurrency();
  const int workers = std::max(1, std::min<int>(n, hw ? hw : 2));
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers)
          results[i] = price_unit(instance, i, duals, pi[i], gap);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace

ChResult run_cg(const UcInstance& instance, const CgConfig& config,
                const WarmStart* warm, const LogSink& sink) {
  {
    const auto violations = validate_instance(instance);
    if (!violations.empty())
      throw std::invalid_argument("run_cg: invalid instance: " +
                                  violations.front().to_string());
  }
  if (config.reduced_cost_tolerance <= 0.0)
    throw std::invalid_argument("reduced_cost_tolerance must be > 0");
  if (config.init_mode == InitMode::warm && !warm)
    throw std::invalid_argument("init_mode warm requires a WarmStart");

  const int n_units = static_cast<int>(instance.units.size());
  ColumnPool pool = init_columns(
      instance, config.init_mode, warm ? &warm->schedules : nullptr);

  ChResult result;
  if (warm) {
    result.uc_objective = warm->uc_objective;
  }

  using clock = std::chrono::steady_clock;
  for (int k = 1; k <= config.max_iterations; ++k) {
    const auto t0 = clock::now();

    RmpMaps maps;
    const auto rmp = build_rmp(instance, pool, &maps);
    const auto sol = lp::solve_lp(rmp);
    if (sol.status == lp::LpStatus::infeasible)
      throw std::runtime_error(
          "RMP infeasible despite slack variables (internal error)");
    if (sol.status != lp::LpStatus::optimal)
      throw std::runtime_error(std::string("RMP solve failed: ") +
                               lp::to_string(sol.status));

    PriceVector duals;
    duals.by_constraint.resize(instance.constraints.size());
    for (std::size_t c = 0; c < instance.constraints.size(); ++c)
      for (int row : maps.system_rows[c])
        duals.by_constraint[c].push_back(sol.duals[row]);
    std::vector<double> pi(n_units);
    for (int i = 0; i < n_units; ++i) pi[i] = sol.duals[maps.convexity_rows[i]];

    auto results =
        price_all(instance, duals, pi, config.subproblem_gap,
                  config.parallel_subproblems);
    auto negatives = [&](const std::vector<PriceResult>& r) {
      std::vector<int> neg;
      for (int i = 0; i < n_units; ++i)
        if (r[i].reduced_cost < -config.reduced_cost_tolerance) neg.push_back(i);
      return neg;
    };
    auto neg = negatives(results);
    if (neg.empty() && config.subproblem_gap > kCertGap) {
      // Loose intermediate pricing found nothing; certify at full optimality.
      results = price_all(instance, duals, pi, kCertGap,
                          config.parallel_subproblems);
      neg = negatives(results);
    }

    CgIterationLog log;
    log.iteration = k;
    log.rmp_objective = sol.objective;
    log.duals = duals;
    log.convexity_duals = pi;
    log.lp_dual_residual = sol.dual_residual;
    for (const auto& r : results) log.reduced_costs.push_back(r.reduced_cost);

    if (neg.empty()) {
      log.columns_added = 0;
      log.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                        .count();
      result.logs.push_back(log);
      if (sink) sink(result.logs.back());
      if (config.log_level >= 1)
        std::fprintf(stderr, "cg: iter %d g=%.9g converged\n", k,
                     sol.objective);

      result.converged = true;
      result.iterations = k;
      result.rmp_objective = sol.objective;
      result.prices = duals;
      result.convexity_duals = pi;
      for (int i = 0; i < n_units; ++i) {
        result.final_reduced_costs.push_back(results[i].reduced_cost);
        std::vector<double> w;
        for (int col : maps.z_cols[i]) w.push_back(sol.primal[col]);
        result.weights.push_back(std::move(w));
      }
      if (result.uc_objective)
        result.duality_gap = *result.uc_objective - result.rmp_objective;
      result.pool = std::move(pool);
      return result;
    }

    for (int i : neg) {
      if (pool.contains(i, results[i].schedule))
        throw std::logic_error(
            "duplicate column priced negative for unit " +
            instance.units[i].id +
            "; RMP duals are inconsistent (this cannot happen with an exact "
            "LP solve)");
      pool.add(i, std::move(results[i].schedule));
      ++log.columns_added;
    }
    log.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.logs.push_back(std::move(log));
    if (sink) sink(result.logs.back());
    if (config.log_level >= 1)
      std::fprintf(stderr, "cg: iter %d g=%.9g cols+%d total=%d\n", k,
                   sol.objective, result.logs.back().columns_added,
                   pool.total_columns());
  }

  // Iteration budget exhausted: report the last RMP state, non-converged.
  result.converged = false;
  result.iterations = static_cast<int>(result.logs.size());
  if (!result.logs.empty()) {
    const auto& last = result.logs.back();
    result.rmp_objective = last.rmp_objective;
    result.prices = last.duals;
    result.convexity_duals = last.convexity_duals;
    result.final_reduced_costs = last.reduced_costs;
    if (result.uc_objective)
      result.duality_gap = *result.uc_objective - result.rmp_objective;
  }
  result.pool = std::move(pool);
  return result;
}

}  // namespace chp::cg
