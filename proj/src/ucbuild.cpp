#include "chp/ucbuild.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace chp::ucbuild {

namespace {
constexpr double kIntTol = 1e-6;
}

int VariableLayout::block(int unit, int hour, int b) const {
  return base_[unit] + horizon_ * (1 + b) + hour;
}
int VariableLayout::reserve(int unit, int hour) const {
  return base_[unit] + horizon_ * (1 + blocks_[unit]) + hour;
}
int VariableLayout::on(int unit, int hour) const {
  return base_[unit] + horizon_ * (2 + blocks_[unit]) + hour;
}
int VariableLayout::start(int unit, int hour) const {
  return base_[unit] + horizon_ * (3 + blocks_[unit]) + hour;
}
int VariableLayout::stop(int unit, int hour) const {
  return base_[unit] + horizon_ * (4 + blocks_[unit]) + hour;
}
int VariableLayout::slack(int constraint, int hour) const {
  if (slack_cols_.empty()) return -1;
  return slack_cols_[constraint][hour];
}

class Builder {
 public:
  Builder(const UcInstance& instance, bool with_system, bool relax,
          const PriceVector* duals, int only_unit)
      : inst_(instance),
        with_system_(with_system),
        relax_(relax),
        duals_(duals),
        only_unit_(only_unit) {}

  UcProgram build() {
    UcProgram out;
    auto& lp = out.mip.base;
    auto& layout = out.layout;
    const int T = inst_.horizon;
    layout.horizon_ = T;

    const auto units = unit_indices();
    std::unordered_map<std::string, int> local;
    for (std::size_t k = 0; k < units.size(); ++k)
      local[inst_.units[units[k]].id] = static_cast<int>(k);

    // Columns, unit by unit.
    for (const int i : units) {
      const auto& u = inst_.units[i];
      // A single block collapses onto the power column.
      const int nb = u.blocks.size() == 1 ? 0 : static_cast<int>(u.blocks.size());
      layout.base_.push_back(lp.num_cols());
      layout.blocks_.push_back(nb);

      const double p_cap = u.blocks.empty() ? 0.0 : u.p_max;
      const double energy_cost = nb == 0 && !u.blocks.empty()
                                     ? u.blocks[0].price
                                     : 0.0;
      for (int t = 0; t < T; ++t)  // power
        lp.add_col(net_cost(i, energy_cost, Product::power, t), 0.0, p_cap);
      for (int b = 0; b < nb; ++b)
        for (int t = 0; t < T; ++t)  // block power
          lp.add_col(u.blocks[b].price, 0.0, u.blocks[b].max_quantity);
      for (int t = 0; t < T; ++t)  // reserve
        lp.add_col(net_cost(i, u.reserve_offer_price, Product::reserve, t), 0.0,
                   u.reserve_max);
      add_binary_cols(lp, u, T);
    }

    // System rows first (constraint-major), when requested.
    if (with_system_) {
      out.system_rows.resize(inst_.constraints.size());
      layout.slack_cols_.resize(inst_.constraints.size());
      for (std::size_t c = 0; c < inst_.constraints.size(); ++c) {
        const auto& con = inst_.constraints[c];
        layout.slack_cols_[c].assign(T, -1);
        for (int t = 0; t < T; ++t) {
          const int row = lp.add_row(to_sense(con.sense), con.rhs[t]);
          out.system_rows[c].push_back(row);
          for (const auto& coef : con.coefficients) {
            const auto it = local.find(coef.unit_id);
            if (it == local.end()) continue;
            const int ui = it->second;
            const int col = coef.product == Product::power
                                ? layout.power(ui, t)
                                : layout.reserve(ui, t);
            lp.add_entry(row, col, coef.value);
          }
          if (con.slack_allowed) {
            const int s = lp.add_col(con.slack_penalty, 0.0, chp::kInfinity);
            layout.slack_cols_[c][t] = s;
            lp.add_entry(row, s,
                         con.sense == ConstraintSense::less_equal ? -1.0 : 1.0);
          }
        }
      }
    }

    // Per-unit rows.
    for (std::size_t k = 0; k < units.size(); ++k)
      add_unit_rows(out, static_cast<int>(k), inst_.units[units[k]]);

    return out;
  }

 private:
  const UcInstance& inst_;
  bool with_system_;
  bool relax_;
  const PriceVector* duals_;
  int only_unit_;

  std::vector<int> unit_indices() const {
    std::vector<int> v;
    if (only_unit_ >= 0) {
      v.push_back(only_unit_);
    } else {
      for (std::size_t i = 0; i < inst_.units.size(); ++i)
        v.push_back(static_cast<int>(i));
    }
    return v;
  }

  static lp::RowSense to_sense(ConstraintSense s) {
    switch (s) {
      case ConstraintSense::equality: return lp::RowSense::eq;
      case ConstraintSense::less_equal: return lp::RowSense::le;
      case ConstraintSense::greater_equal: return lp::RowSense::ge;
    }
    return lp::RowSense::eq;
  }

  // Objective coefficient of a product variable net of dualized system
  // constraints (subproblem builds only).
  double net_cost(int unit_index, double base_cost, Product product,
                  int hour) const {
    double c = base_cost;
    if (duals_) {
      for (std::size_t k = 0; k < inst_.constraints.size(); ++k) {
        const auto* coef =
            inst_.constraints[k].find(inst_.units[unit_index].id, product);
        if (coef) c -= duals_->at(static_cast<int>(k), hour) * coef->value;
      }
    }
    return c;
  }

  void add_binary_cols(lp::LinearProgram& lp, const UnitSpec& u, int T) {
    for (int t = 0; t < T; ++t) {  // on
      double lo = 0.0, hi = 1.0;
      if (u.must_run || t < u.forced_hours_online) lo = 1.0;
      if (t < u.forced_hours_offline) hi = 0.0;
      lp.add_col(u.no_load_cost, lo, hi);
    }
    for (int t = 0; t < T; ++t) lp.add_col(u.startup_cost, 0.0, 1.0);   // start
    for (int t = 0; t < T; ++t) lp.add_col(u.shutdown_cost, 0.0, 1.0);  // stop
  }

  void add_unit_rows(UcProgram& out, int ui, const UnitSpec& u) {
    auto& lp = out.mip.base;
    const auto& L = out.layout;
    const int T = inst_.horizon;
    const int nb = L.num_blocks(ui);
    const double u0 = u.init_online ? 1.0 : 0.0;
    const double p0 = u.init_online ? u.init_power : 0.0;

    for (int t = 0; t < T; ++t) {
      const int p = L.power(ui, t);
      const int r = L.reserve(ui, t);
      const int on = L.on(ui, t);
      const int vv = L.start(ui, t);
      const int ww = L.stop(ui, t);

      if (nb > 0) {
        // p = sum of blocks; each block capped by its share while online.
        const int def = lp.add_row(lp::RowSense::eq, 0.0);
        lp.add_entry(def, p, 1.0);
        for (int b = 0; b < nb; ++b) {
          lp.add_entry(def, L.block(ui, t, b), -1.0);
          const int cap = lp.add_row(lp::RowSense::le, 0.0);
          lp.add_entry(cap, L.block(ui, t, b), 1.0);
          lp.add_entry(cap, on, -u.blocks[b].max_quantity);
        }
      } else if (!u.blocks.empty() && u.blocks[0].max_quantity < u.p_max) {
        const int cap = lp.add_row(lp::RowSense::le, 0.0);
        lp.add_entry(cap, p, 1.0);
        lp.add_entry(cap, on, -u.blocks[0].max_quantity);
      }

      if (u.single_block_commitment) {
        const int pin = lp.add_row(lp::RowSense::eq, 0.0);
        lp.add_entry(pin, p, 1.0);
        lp.add_entry(pin, on, -u.p_max);
      }

      if (u.p_min > 0.0) {
        const int lo = lp.add_row(lp::RowSense::le, 0.0);
        lp.add_entry(lo, on, u.p_min);
        lp.add_entry(lo, p, -1.0);
      }
      const int hi = lp.add_row(lp::RowSense::le, 0.0);
      lp.add_entry(hi, p, 1.0);
      if (u.reserve_max > 0.0) lp.add_entry(hi, r, 1.0);
      lp.add_entry(hi, on, -u.p_max);

      // Ramps, anchored at the initial state for the first hour.
      const int up = lp.add_row(lp::RowSense::le, t == 0 ? u.ramp_up * u0 + p0 : 0.0);
      lp.add_entry(up, p, 1.0);
      lp.add_entry(up, vv, -u.startup_ramp);
      if (t > 0) {
        lp.add_entry(up, L.power(ui, t - 1), -1.0);
        lp.add_entry(up, L.on(ui, t - 1), -u.ramp_up);
      }
      const int dn = lp.add_row(lp::RowSense::le, t == 0 ? -p0 : 0.0);
      lp.add_entry(dn, p, -1.0);
      lp.add_entry(dn, on, -u.ramp_down);
      lp.add_entry(dn, ww, -u.shutdown_ramp);
      if (t > 0) lp.add_entry(dn, L.power(ui, t - 1), 1.0);

      // Commitment logic u_t - u_{t-1} = v_t - w_t.
      const int logic = lp.add_row(lp::RowSense::eq, t == 0 ? u0 : 0.0);
      lp.add_entry(logic, on, 1.0);
      lp.add_entry(logic, vv, -1.0);
      lp.add_entry(logic, ww, 1.0);
      if (t > 0) lp.add_entry(logic, L.on(ui, t - 1), -1.0);

      // Rolling min up/down windows, truncated at the horizon start.
      const int mu = lp.add_row(lp::RowSense::le, 0.0);
      for (int s = std::max(0, t - u.min_up_time + 1); s <= t; ++s)
        lp.add_entry(mu, L.start(ui, s), 1.0);
      lp.add_entry(mu, on, -1.0);
      const int md = lp.add_row(lp::RowSense::le, 1.0);
      for (int s = std::max(0, t - u.min_down_time + 1); s <= t; ++s)
        lp.add_entry(md, L.stop(ui, s), 1.0);
      lp.add_entry(md, on, 1.0);
    }

    if (!relax_) {
      for (int t = 0; t < T; ++t) {
        out.mip.integer_columns.push_back(L.on(ui, t));
        out.mip.integer_columns.push_back(L.start(ui, t));
        out.mip.integer_columns.push_back(L.stop(ui, t));
      }
    }
  }
};

UcProgram build_full_uc(const UcInstance& instance) {
  auto violations = validate_instance(instance);
  if (!violations.empty()) {
    const std::string what =
        "instance failed validation (" + violations.front().to_string() + ")";
    throw BuildError(what, std::move(violations));
  }
  Builder b(instance, /*with_system=*/true, /*relax=*/false, nullptr, -1);
  return b.build();
}

UcProgram build_integer_relaxation(const UcInstance& instance) {
  auto violations = validate_instance(instance);
  if (!violations.empty()) {
    const std::string what =
        "instance failed validation (" + violations.front().to_string() + ")";
    throw BuildError(what, std::move(violations));
  }
  Builder b(instance, /*with_system=*/true, /*relax=*/true, nullptr, -1);
  return b.build();
}

UcProgram build_subproblem(const UcInstance& instance, int unit_index,
                           const PriceVector& duals) {
  if (unit_index < 0 ||
      unit_index >= static_cast<int>(instance.units.size()))
    throw BuildError("unit index out of range", {});
  if (duals.num_constraints() != static_cast<int>(instance.constraints.size()))
    throw BuildError("duals do not cover the system constraints", {});
  for (int c = 0; c < duals.num_constraints(); ++c)
    if (static_cast<int>(duals.by_constraint[c].size()) != instance.horizon)
      throw BuildError("dual vector length does not match the horizon", {});
  Builder b(instance, /*with_system=*/false, /*relax=*/false, &duals,
            unit_index);
  return b.build();
}

Schedule extract_schedule(const UcInstance& instance, int unit_index,
                          const VariableLayout& layout,
                          const std::vector<double>& primal) {
  const int T = layout.horizon();
  // Single-unit layouts (subproblems) address the unit as 0.
  const int li = layout.num_units() == 1 ? 0 : unit_index;
  const auto& unit = instance.units[unit_index];

  std::vector<double> power(T), reserve(T);
  std::vector<bool> on(T);
  for (int t = 0; t < T; ++t) {
    const double uv = primal[layout.on(li, t)];
    if (std::min(std::abs(uv), std::abs(1.0 - uv)) > kIntTol)
      throw ExtractError(unit.id + ": non-integral commitment " +
                         std::to_string(uv) + " at hour " +
                         std::to_string(t + 1));
    on[t] = uv > 0.5;
    double p = primal[layout.power(li, t)];
    double r = primal[layout.reserve(li, t)];
    power[t] = std::abs(p) < 1e-9 ? 0.0 : p;
    reserve[t] = std::abs(r) < 1e-9 ? 0.0 : r;
  }
  Schedule s = make_schedule(unit, std::move(power), std::move(reserve),
                             std::move(on));
  const auto feas = check_feasible(unit, s);
  if (!feas.feasible)
    throw ExtractError("extracted schedule infeasible: " +
                       feas.first_violation);
  return s;
}

double constraint_contribution(const SystemConstraintSpec& constraint,
                               const Schedule& schedule, int hour) {
  double v = 0.0;
  for (const auto& coef : constraint.coefficients) {
    if (coef.unit_id != schedule.unit_id) continue;
    if (coef.product == Product::power)
      v += coef.value * schedule.power[hour];
    else if (!schedule.reserve.empty())
      v += coef.value * schedule.reserve[hour];
  }
  return v;
}

}  // namespace chp::ucbuild
