#include "chp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace chp {
namespace {

constexpr double kFeasTol = 1e-6;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string hour_tag(int t) { return "hour " + std::to_string(t + 1); }

}  // namespace

std::vector<Violation> validate_instance(const UcInstance& instance) {
  std::vector<Violation> out;
  auto add = [&](const std::string& subject, const std::string& rule) {
    out.push_back({subject, rule});
  };

  if (instance.horizon <= 0) add("instance", "horizon must be positive");
  const int T = instance.horizon;

  std::set<std::string> unit_ids;
  for (const auto& u : instance.units) {
    if (u.id.empty()) add("unit", "empty id");
    if (!unit_ids.insert(u.id).second) add(u.id, "duplicate unit id");

    if (!(u.p_min >= 0.0 && u.p_min <= u.p_max))
      add(u.id, "requires 0 <= p_min <= p_max");
    if (!u.blocks.empty()) {
      double prev_price = -kInfinity;
      for (std::size_t b = 0; b < u.blocks.size(); ++b) {
        if (!finite_nonneg(u.blocks[b].max_quantity))
          add(u.id, "block " + std::to_string(b) + " max_quantity must be >= 0");
        if (u.blocks[b].price < prev_price)
          add(u.id, "block prices must be non-decreasing");
        prev_price = u.blocks[b].price;
      }
      if (u.block_capacity() + u.p_min < u.p_max - kFeasTol)
        add(u.id, "blocks too small: sum of block quantities + p_min < p_max");
    }
    if (!finite_nonneg(u.ramp_up) || !finite_nonneg(u.ramp_down) ||
        !finite_nonneg(u.startup_ramp) || !finite_nonneg(u.shutdown_ramp))
      add(u.id, "ramp rates must be finite and >= 0");
    if (!finite_nonneg(u.reserve_max)) add(u.id, "reserve_max must be >= 0");
    if (u.min_up_time < 1 || u.min_down_time < 1)
      add(u.id, "min up/down times must be >= 1 hour");
    if (u.forced_hours_online > 0 && u.forced_hours_offline > 0)
      add(u.id, "at most one of forced_hours_online/offline may be positive");
    if (u.forced_hours_online > T || u.forced_hours_offline > T)
      add(u.id, "forced hours exceed horizon");
    if (u.forced_hours_online > 0 && !u.init_online)
      add(u.id, "forced_hours_online requires init_online");
    if (u.forced_hours_offline > 0 && u.init_online)
      add(u.id, "forced_hours_offline requires initially offline");
    if (u.must_run && u.forced_hours_offline > 0)
      add(u.id, "must_run conflicts with forced_hours_offline");
    if (u.init_online && !(u.init_power >= 0.0))
      add(u.id, "init_power must be >= 0");
  }

  std::set<std::string> con_ids;
  bool has_balance = false;
  for (const auto& c : instance.constraints) {
    if (c.id.empty()) add("constraint", "empty id");
    if (!con_ids.insert(c.id).second) add(c.id, "duplicate constraint id");
    if (static_cast<int>(c.rhs.size()) != T)
      add(c.id, "rhs length " + std::to_string(c.rhs.size()) +
                    " does not match horizon " + std::to_string(T));
    if (c.slack_allowed && !(c.slack_penalty > 0.0))
      add(c.id, "slack_penalty must be > 0 when slack_allowed");
    for (const auto& coef : c.coefficients) {
      if (!instance.find_unit(coef.unit_id))
        add(c.id, "coefficient references unknown unit '" + coef.unit_id + "'");
      if (!std::isfinite(coef.value)) add(c.id, "non-finite coefficient");
    }
    if (c.power_balance) {
      has_balance = true;
      if (c.sense != ConstraintSense::equality)
        add(c.id, "power balance must be an equality constraint");
    }
  }
  if (!instance.constraints.empty() && !has_balance)
    add("instance", "no constraint is flagged as power balance");

  return out;
}

CommitmentEvents commitment_events(const UnitSpec& unit,
                                   const std::vector<bool>& on) {
  CommitmentEvents ev;
  ev.start.resize(on.size());
  ev.stop.resize(on.size());
  bool prev = unit.init_online;
  for (std::size_t t = 0; t < on.size(); ++t) {
    ev.start[t] = on[t] && !prev;
    ev.stop[t] = !on[t] && prev;
    prev = on[t];
  }
  return ev;
}

double evaluate_cost(const UnitSpec& unit, const std::vector<double>& power,
                     const std::vector<double>& reserve,
                     const std::vector<bool>& on,
                     const std::vector<bool>& start,
                     const std::vector<bool>& stop) {
  const std::size_t T = power.size();
  if (on.size() != T || start.size() != T || stop.size() != T ||
      (!reserve.empty() && reserve.size() != T))
    throw ModelError(unit.id + ": vector lengths do not match");

  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (on[t]) total += unit.no_load_cost;
    if (start[t]) total += unit.startup_cost;
    if (stop[t]) total += unit.shutdown_cost;

    double remaining = power[t];
    for (const auto& b : unit.blocks) {
      if (remaining <= 0.0) break;
      const double take = std::min(remaining, b.max_quantity);
      total += take * b.price;
      remaining -= take;
    }
    if (remaining > kFeasTol)
      throw ModelError(unit.id + ": power " + std::to_string(power[t]) +
                       " exceeds block capacity at " + hour_tag(t));
    if (!reserve.empty()) total += reserve[t] * unit.reserve_offer_price;
  }
  return total;
}

double evaluate_cost(const UnitSpec& unit, const std::vector<double>& power,
                     const std::vector<double>& reserve,
                     const std::vector<bool>& on) {
  const auto ev = commitment_events(unit, on);
  return evaluate_cost(unit, power, reserve, on, ev.start, ev.stop);
}

FeasibilityResult check_feasible(const UnitSpec& unit,
                                 const Schedule& schedule) {
  const auto& p = schedule.power;
  const auto& r = schedule.reserve;
  const auto& on = schedule.on;
  const int T = static_cast<int>(p.size());

  auto fail = [&](const std::string& why) {
    return FeasibilityResult{false, unit.id + ": " + why};
  };

  if (static_cast<int>(on.size()) != T ||
      (!r.empty() && static_cast<int>(r.size()) != T))
    return fail("vector lengths do not match");

  const auto ev = commitment_events(unit, on);
  auto res = [&](int t) { return r.empty() ? 0.0 : r[t]; };

  for (int t = 0; t < T; ++t) {
    if (t < unit.forced_hours_online && !on[t])
      return fail("offline during forced initial online hours at " + hour_tag(t));
    if (t < unit.forced_hours_offline && on[t])
      return fail("online during forced initial offline hours at " + hour_tag(t));
    if (unit.must_run && !on[t]) return fail("must_run unit offline at " + hour_tag(t));

    if (p[t] < -kFeasTol || res(t) < -kFeasTol)
      return fail("negative power or reserve at " + hour_tag(t));
    if (!on[t]) {
      if (std::abs(p[t]) > kFeasTol || std::abs(res(t)) > kFeasTol)
        return fail("nonzero output while offline at " + hour_tag(t));
    } else {
      if (p[t] < unit.p_min - kFeasTol)
        return fail("power below p_min at " + hour_tag(t));
      if (p[t] + res(t) > unit.p_max + kFeasTol)
        return fail("power + reserve above p_max at " + hour_tag(t));
      if (res(t) > unit.reserve_max + kFeasTol)
        return fail("reserve above reserve_max at " + hour_tag(t));
      if (p[t] > unit.block_capacity() + kFeasTol)
        return fail("power above block capacity at " + hour_tag(t));
      if (unit.single_block_commitment &&
          std::abs(p[t] - unit.p_max) > kFeasTol)
        return fail("single-block unit not at p_max at " + hour_tag(t));
    }

    const double prev_p = (t == 0) ? (unit.init_online ? unit.init_power : 0.0)
                                   : p[t - 1];
    const bool prev_on = (t == 0) ? unit.init_online : on[t - 1];
    const double up_limit =
        (prev_on ? unit.ramp_up : 0.0) + (ev.start[t] ? unit.startup_ramp : 0.0);
    if (p[t] - prev_p > up_limit + kFeasTol)
      return fail("ramp-up violated at " + hour_tag(t));
    const double down_limit =
        (on[t] ? unit.ramp_down : 0.0) + (ev.stop[t] ? unit.shutdown_ramp : 0.0);
    if (prev_p - p[t] > down_limit + kFeasTol)
      return fail("ramp-down violated at " + hour_tag(t));
  }

  // Rolling min up/down windows, truncated at the horizon start.
  for (int t = 0; t < T; ++t) {
    int starts = 0, stops = 0;
    for (int s = std::max(0, t - unit.min_up_time + 1); s <= t; ++s)
      starts += ev.start[s] ? 1 : 0;
    if (starts > (on[t] ? 1 : 0))
      return fail("min up time violated at " + hour_tag(t));
    for (int s = std::max(0, t - unit.min_down_time + 1); s <= t; ++s)
      stops += ev.stop[s] ? 1 : 0;
    if (stops > (on[t] ? 0 : 1))
      return fail("min down time violated at " + hour_tag(t));
  }

  return {true, ""};
}

Schedule make_schedule(const UnitSpec& unit, std::vector<double> power,
                       std::vector<double> reserve, std::vector<bool> on) {
  Schedule s;
  s.unit_id = unit.id;
  s.power = std::move(power);
  s.reserve = std::move(reserve);
  s.on = std::move(on);
  s.cost = evaluate_cost(unit, s.power, s.reserve, s.on);
  return s;
}

Schedule trivial_schedule(const UnitSpec& unit, int horizon) {
  const int T = horizon;
  std::vector<double> power(T, 0.0);
  std::vector<double> reserve;
  std::vector<bool> on(T, false);

  int hours_on = 0;
  if (unit.must_run)
    hours_on = T;
  else if (unit.init_online)
    hours_on = std::min(T, unit.forced_hours_online);

  if (hours_on > 0 || unit.init_online) {
    // Descend from the initial operating point to p_min, hold through any
    // forced hours, then shut down once the shutdown rate permits.
    double prev = unit.init_power;
    int t = 0;
    for (; t < T; ++t) {
      const bool may_stop = t >= hours_on && prev <= unit.shutdown_ramp + kFeasTol;
      if (!unit.must_run && may_stop) break;
      const double target = std::max(unit.p_min, prev - unit.ramp_down);
      power[t] = target;
      on[t] = true;
      prev = target;
    }
  }

  Schedule s = make_schedule(unit, std::move(power), std::move(reserve),
                             std::move(on));
  const auto feas = check_feasible(unit, s);
  if (!feas.feasible)
    throw ModelError("no feasible trivial schedule for unit " + unit.id +
                     " (" + feas.first_violation + "); use a warm start");
  return s;
}

}  // namespace chp
