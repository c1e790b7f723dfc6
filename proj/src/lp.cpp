#include "chp/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chp::lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int LinearProgram::add_col(double obj, double lo, double up) {
  objective.push_back(obj);
  lower.push_back(lo);
  upper.push_back(up);
  return num_cols() - 1;
}

int LinearProgram::add_row(RowSense sense, double rhs_value) {
  senses.push_back(sense);
  rhs.push_back(rhs_value);
  return num_rows() - 1;
}

void LinearProgram::add_entry(int row, int col, double value) {
  if (value != 0.0) entries.push_back({row, col, value});
}

std::vector<std::string> validate(const LinearProgram& lp) {
  std::vector<std::string> out;
  const int n = lp.num_cols(), m = lp.num_rows();
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lp.objective[j]) || std::isinf(lp.objective[j]))
      out.push_back("objective of column " + std::to_string(j) + " not finite");
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]))
      out.push_back("NaN bound on column " + std::to_string(j));
    else if (lp.lower[j] > lp.upper[j])
      out.push_back("inverted bounds on column " + std::to_string(j));
    else if (lp.lower[j] == -kInf && lp.upper[j] == kInf)
      out.push_back("column " + std::to_string(j) + " is free (unsupported)");
  }
  for (int i = 0; i < m; ++i)
    if (!std::isfinite(lp.rhs[i]))
      out.push_back("rhs of row " + std::to_string(i) + " not finite");
  for (const auto& e : lp.entries) {
    if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n)
      out.push_back("entry index out of range");
    else if (!std::isfinite(e.value))
      out.push_back("non-finite entry at row " + std::to_string(e.row));
  }
  return out;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

namespace {

// Dense LU with partial pivoting; rows are physically permuted and the
// permutation recorded, so ftran/btran are plain triangular solves.
class DenseLu {
 public:
  // cols[j] is the dense j-th column of the basis matrix.
  bool factorize(const std::vector<std::vector<double>>& cols, double tiny) {
    m_ = static_cast<int>(cols.size());
    a_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    perm_.resize(m_);
    for (int i = 0; i < m_; ++i) perm_[i] = i;
    for (int j = 0; j < m_; ++j)
      for (int i = 0; i < m_; ++i) a_[std::size_t(i) * m_ + j] = cols[j][i];

    for (int k = 0; k < m_; ++k) {
      int piv = k;
      double best = std::abs(a_[std::size_t(k) * m_ + k]);
      for (int i = k + 1; i < m_; ++i) {
        const double v = std::abs(a_[std::size_t(i) * m_ + k]);
        if (v > best) { best = v; piv = i; }
      }
      if (best < tiny) return false;
      if (piv != k) {
        for (int j = 0; j < m_; ++j)
          std::swap(a_[std::size_t(k) * m_ + j], a_[std::size_t(piv) * m_ + j]);
        std::swap(perm_[k], perm_[piv]);
      }
      const double pivot = a_[std::size_t(k) * m_ + k];
      for (int i = k + 1; i < m_; ++i) {
        const double l = a_[std::size_t(i) * m_ + k] / pivot;
        a_[std::size_t(i) * m_ + k] = l;
        if (l != 0.0)
          for (int j = k + 1; j < m_; ++j)
            a_[std::size_t(i) * m_ + j] -= l * a_[std::size_t(k) * m_ + j];
      }
    }
    return true;
  }

  // Solves B x = b, overwriting x (input b in original row order).
  void ftran(std::vector<double>& x, std::vector<double>& work) const {
    work.resize(m_);
    for (int i = 0; i < m_; ++i) work[i] = x[perm_[i]];
    for (int i = 1; i < m_; ++i) {
      double s = work[i];
      const double* row = &a_[std::size_t(i) * m_];
      for (int j = 0; j < i; ++j) s -= row[j] * work[j];
      work[i] = s;
    }
    for (int i = m_ - 1; i >= 0; --i) {
      double s = work[i];
      const double* row = &a_[std::size_t(i) * m_];
      for (int j = i + 1; j < m_; ++j) s -= row[j] * work[j];
      work[i] = s / row[i];
    }
    x = work;
  }

  // Solves B' y = c, overwriting y (result in original row order).
  void btran(std::vector<double>& y, std::vector<double>& work) const {
    work.resize(m_);
    // U' v = c (forward), then L' w = v (backward), then y = P' w.
    for (int i = 0; i < m_; ++i) {
      double s = y[i];
      for (int j = 0; j < i; ++j) s -= a_[std::size_t(j) * m_ + i] * work[j];
      work[i] = s / a_[std::size_t(i) * m_ + i];
    }
    for (int i = m_ - 1; i >= 0; --i) {
      double s = work[i];
      for (int j = i + 1; j < m_; ++j) s -= a_[std::size_t(j) * m_ + i] * work[j];
      work[i] = s;
    }
    for (int i = 0; i < m_; ++i) y[perm_[i]] = work[i];
  }

 private:
  int m_ = 0;
  std::vector<double> a_;  // packed L\U, row-major, rows pre-permuted
  std::vector<int> perm_;
};

enum class VarState : unsigned char { basic, at_lower, at_upper };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.num_rows()), n_(lp.num_cols()) {
    build_columns();
  }

  LpSolution run() {
    if (opt_.max_iterations <= 0)
      max_iters_ = 10000 + 200L * (m_ + n_);
    else
      max_iters_ = opt_.max_iterations;

    try {
      return attempt();
    } catch (const SingularBasis&) {
      // Eta-file error let a dependent column into the basis. Restart in a
      // conservative mode: Bland's rule throughout, short eta files.
      reset();
      conservative_ = true;
      bland_ = true;
      opt_.refactor_interval = std::min(opt_.refactor_interval, 20);
      try {
        return attempt();
      } catch (const SingularBasis&) {
        throw std::runtime_error("lp: singular basis during refactorization");
      }
    }
  }

 private:
  static constexpr int kOptimal = 0;
  static constexpr int kUnbounded = 1;
  static constexpr int kIterLimit = 2;

  LpSolution attempt() {
    LpSolution sol;
    init_basis();

    if (artificial_in_use_) {
      const int p1 = iterate(/*phase1=*/true);
      if (p1 == kIterLimit) return finish(sol, LpStatus::iteration_limit);
      const double infeas = phase1_objective();
      if (infeas > opt_.feas_tol) return finish(sol, LpStatus::infeasible);
      seal_artificials();
    }

    const int p2 = iterate(/*phase1=*/false);
    if (p2 == kIterLimit) return finish(sol, LpStatus::iteration_limit);
    if (p2 == kUnbounded) return finish(sol, LpStatus::unbounded);
    return finish(sol, LpStatus::optimal);
  }

  void reset() {
    col_start_.clear();
    col_row_.clear();
    col_val_.clear();
    cost_.clear();
    lo_.clear();
    up_.clear();
    state_.clear();
    total_cols_ = 0;
    art_row_.clear();
    art_sign_.clear();
    artificial_in_use_ = false;
    basic_.clear();
    basis_pos_.clear();
    xb_.clear();
    etas_.clear();
    degenerate_streak_ = 0;
    bland_ = false;
    build_columns();
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_, n_;
  long max_iters_ = 0;
  long iters_ = 0;

  // Augmented columns: [0,n) structural, [n, n+m) row slacks, then
  // artificials. Sparse column storage.
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_, lo_, up_;
  int total_cols_ = 0;
  int first_artificial_ = 0;
  bool artificial_in_use_ = false;

  std::vector<int> basic_;        // basis position -> column
  std::vector<int> basis_pos_;    // column -> basis position or -1
  std::vector<VarState> state_;   // per column
  std::vector<double> xb_;        // value of basic variable per position

  DenseLu lu_;
  struct Eta {
    int pos;
    std::vector<double> w;
  };
  std::vector<Eta> etas_;
  std::vector<double> work1_, work2_;
  int degenerate_streak_ = 0;
  bool bland_ = false;
  bool conservative_ = false;

  void push_col(double cost, double lo, double up) {
    cost_.push_back(cost);
    lo_.push_back(lo);
    up_.push_back(up);
    state_.push_back(VarState::at_lower);
    ++total_cols_;
  }

  void build_columns() {
    // Triplets -> CSC for structural columns.
    std::vector<int> count(n_, 0);
    for (const auto& e : lp_.entries) ++count[e.col];
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
    col_row_.resize(lp_.entries.size());
    col_val_.resize(lp_.entries.size());
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (const auto& e : lp_.entries) {
      const int k = fill[e.col]++;
      col_row_[k] = e.row;
      col_val_[k] = e.value;
    }
    for (int j = 0; j < n_; ++j)
      push_col(lp_.objective[j], lp_.lower[j], lp_.upper[j]);
    // One slack per row: Ax + s = b. Equality slacks are fixed at zero.
    for (int i = 0; i < m_; ++i) {
      switch (lp_.senses[i]) {
        case RowSense::le: push_col(0.0, 0.0, kInf); break;
        case RowSense::ge: push_col(0.0, -kInf, 0.0); break;
        case RowSense::eq: push_col(0.0, 0.0, 0.0); break;
      }
    }
  }

  int slack_col(int row) const { return n_ + row; }

  // Column access covering structural, slack and artificial columns.
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        f(col_row_[k], col_val_[k]);
    } else if (j < n_ + m_) {
      f(j - n_, 1.0);
    } else {
      f(art_row_[j - n_ - m_], art_sign_[j - n_ - m_]);
    }
  }
  std::vector<int> art_row_;
  std::vector<double> art_sign_;

  double nonbasic_value(int j) const {
    return state_[j] == VarState::at_upper ? up_[j] : lo_[j];
  }

  void init_basis() {
    for (int j = 0; j < n_; ++j)
      state_[j] = std::isfinite(lo_[j]) ? VarState::at_lower : VarState::at_upper;

    // Row activity of the nonbasic point.
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      const double v = nonbasic_value(j);
      if (v != 0.0)
        for_col(j, [&](int r, double a) { act[r] += a * v; });
    }

    basic_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    first_artificial_ = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      const double res = lp_.rhs[i] - act[i];
      const int s = slack_col(i);
      bool use_slack = false;
      if (lp_.senses[i] == RowSense::le && res >= 0.0) use_slack = true;
      if (lp_.senses[i] == RowSense::ge && res <= 0.0) use_slack = true;
      if (use_slack) {
        basic_[i] = s;
        xb_[i] = res;
        state_[s] = VarState::basic;
      } else {
        if (lp_.senses[i] == RowSense::ge) state_[s] = VarState::at_upper;
        const double sign = res >= 0.0 ? 1.0 : -1.0;
        art_row_.push_back(i);
        art_sign_.push_back(sign);
        push_col(0.0, 0.0, kInf);
        const int a = total_cols_ - 1;
        basic_[i] = a;
        xb_[i] = std::abs(res);
        state_[a] = VarState::basic;
        artificial_in_use_ = true;
      }
    }
    basis_pos_.assign(total_cols_, -1);
    for (int i = 0; i < m_; ++i) basis_pos_[basic_[i]] = i;
    refactorize();
  }

  double phase_cost(int j, bool phase1) const {
    if (phase1) return j >= first_artificial_ ? 1.0 : 0.0;
    return j >= first_artificial_ ? 0.0 : cost_[j];
  }

  double phase1_objective() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basic_[i] >= first_artificial_) s += xb_[i];
    return s;
  }

  void seal_artificials() {
    // Artificials may not re-enter; pin them to zero.
    for (int a = first_artificial_; a < total_cols_; ++a) {
      up_[a] = 0.0;
      if (state_[a] != VarState::basic) state_[a] = VarState::at_lower;
    }
  }

  // Thrown when accumulated eta error has let a dependent column into the
  // basis; the driver restarts the solve in a conservative mode.
  struct SingularBasis {};

  void refactorize() {
    std::vector<std::vector<double>> cols(m_, std::vector<double>(m_, 0.0));
    for (int i = 0; i < m_; ++i)
      for_col(basic_[i], [&](int r, double a) { cols[i][r] = a; });
    if (!lu_.factorize(cols, 1e-13)) throw SingularBasis{};
    etas_.clear();
    recompute_basics();
  }

  void recompute_basics() {
    std::vector<double> rhs = lp_.rhs;
    for (int j = 0; j < total_cols_; ++j) {
      if (state_[j] == VarState::basic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0)
        for_col(j, [&](int r, double a) { rhs[r] -= a * v; });
    }
    ftran(rhs);
    xb_ = rhs;
    // Snap numerical dust onto the bounds so degenerate ratio tests see
    // clean zeros instead of 1e-2x residue.
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      for (double bound : {lo_[j], up_[j]}) {
        if (std::isfinite(bound) &&
            std::abs(xb_[i] - bound) <= 1e-10 * (1.0 + std::abs(bound)))
          xb_[i] = bound;
      }
    }
  }

  void ftran(std::vector<double>& x) {
    if (m_ == 0) return;
    lu_.ftran(x, work1_);
    for (const auto& e : etas_) {
      const double xr = x[e.pos] / e.w[e.pos];
      if (xr != 0.0)
        for (int i = 0; i < m_; ++i) x[i] -= e.w[i] * xr;
      x[e.pos] = xr;
    }
  }

  void btran(std::vector<double>& y) {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = y[it->pos];
      for (int i = 0; i < m_; ++i)
        if (i != it->pos) s -= it->w[i] * y[i];
      y[it->pos] = s / it->w[it->pos];
    }
    lu_.btran(y, work2_);
  }

  // Main simplex loop for one phase; returns kOptimal/kUnbounded/kIterLimit.
  int iterate(bool phase1) {
    std::vector<double> y(m_), w(m_);
    while (true) {
      if (iters_ >= max_iters_) return kIterLimit;

      // Duals of the current basis.
      for (int i = 0; i < m_; ++i) y[i] = phase_cost(basic_[i], phase1);
      btran(y);

      // Pricing.
      int q = -1, q_dir = 0;
      double best = 0.0;
      const int scan_end = phase1 ? total_cols_ : n_ + m_;
      for (int j = 0; j < scan_end; ++j) {
        if (state_[j] == VarState::basic) continue;
        if (lo_[j] == up_[j]) continue;  // fixed
        double d = phase_cost(j, phase1);
        for_col(j, [&](int r, double a) { d -= y[r] * a; });
        int dir = 0;
        if (state_[j] == VarState::at_lower && d < -opt_.pivot_tol)
          dir = +1;
        else if (state_[j] == VarState::at_upper && d > opt_.pivot_tol)
          dir = -1;
        if (dir == 0) continue;
        if (bland_) { q = j; q_dir = dir; break; }
        if (std::abs(d) > best) { best = std::abs(d); q = j; q_dir = dir; }
      }
      if (q < 0) return kOptimal;

      // Direction of basics as the entering variable moves by +t*dir.
      std::fill(w.begin(), w.end(), 0.0);
      for_col(q, [&](int r, double a) { w[r] = a; });
      ftran(w);

      double w_max = 0.0;
      for (int i = 0; i < m_; ++i) w_max = std::max(w_max, std::abs(w[i]));
      if (w_max > 1e8 && !etas_.empty()) {
        // The eta file has degraded; redo this iteration on a fresh basis.
        refactorize();
        continue;
      }

      // Ratio test with bound flip. Ties favor the larger pivot magnitude
      // (or the smallest leaving column under Bland's rule).
      double t_max = kInf;
      int leave = -1;      // basis position
      int leave_to = 0;    // -1 lower, +1 upper
      double leave_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double delta = q_dir * w[i];
        double t;
        int to;
        if (delta > opt_.pivot_tol) {
          const double lb = lo_[basic_[i]];
          if (lb == -kInf) continue;
          t = (xb_[i] - lb) / delta;
          to = -1;
        } else if (delta < -opt_.pivot_tol) {
          const double ub = up_[basic_[i]];
          if (ub == kInf) continue;
          t = (ub - xb_[i]) / (-delta);
          to = +1;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        bool take;
        if (t < t_max - opt_.ratio_tol) {
          take = true;
        } else if (t > t_max + opt_.ratio_tol || leave < 0) {
          take = leave < 0 && t < t_max;
        } else if (bland_) {
          take = basic_[i] < basic_[leave];
        } else {
          take = std::abs(delta) > std::abs(leave_piv);
        }
        if (take) {
          t_max = t; leave = i; leave_to = to; leave_piv = delta;
        }
      }
      // A winning pivot near the tolerance floor is usually eta debris,
      // whose reciprocal would poison all later updates. Verify it against
      // a fresh factorization before trusting it.
      if (leave >= 0 && std::abs(leave_piv) < 1e-7 * std::max(1.0, w_max) &&
          !etas_.empty()) {
        refactorize();
        continue;
      }

      const double span = up_[q] - lo_[q];
      bool flip = false;
      if (std::isfinite(span) && span < t_max) {
        t_max = span;
        flip = true;
        leave = -1;
      }
      if (t_max == kInf) {
        if (!etas_.empty()) {  // rule out stale factorization first
          refactorize();
          continue;
        }
        if (phase1)
          throw std::runtime_error("lp: phase-1 ray (internal error)");
        return kUnbounded;
      }

      // Apply the step.
      if (t_max != 0.0)
        for (int i = 0; i < m_; ++i) xb_[i] -= t_max * q_dir * w[i];

      if (flip) {
        state_[q] = q_dir > 0 ? VarState::at_upper : VarState::at_lower;
      } else {
        const int p = basic_[leave];
        state_[p] = leave_to < 0 ? VarState::at_lower : VarState::at_upper;
        if (p >= first_artificial_) up_[p] = 0.0;  // never re-enters
        basis_pos_[p] = -1;
        basic_[leave] = q;
        basis_pos_[q] = leave;
        state_[q] = VarState::basic;
        xb_[leave] = nonbasic_value_before_enter(q, q_dir) + q_dir * t_max;

        etas_.push_back({leave, w});
        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval)
          refactorize();
      }

      ++iters_;
      if (t_max <= opt_.ratio_tol) {
        if (++degenerate_streak_ >= opt_.bland_after && !bland_) {
          bland_ = true;
          if (!etas_.empty()) refactorize();  // degenerate runs erode the etas
        }
      } else {
        degenerate_streak_ = 0;
        if (!conservative_) bland_ = false;
      }
    }
  }

  double nonbasic_value_before_enter(int j, int dir) const {
    return dir > 0 ? lo_[j] : up_[j];
  }

  LpSolution finish(LpSolution& sol, LpStatus status) {
    sol.status = status;
    sol.iterations = iters_;
    if (status != LpStatus::optimal) return sol;

    recompute_basics();  // tighten values against accumulated drift
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      const double scale = 1.0 + std::abs(xb_[i]);
      if (xb_[i] < lo_[j] - 1e-6 * scale || xb_[i] > up_[j] + 1e-6 * scale)
        throw SingularBasis{};  // feasibility was lost; retry conservatively
    }
    sol.primal.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      sol.primal[j] = state_[j] == VarState::basic ? xb_[basis_pos_[j]]
                                                   : nonbasic_value(j);
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.objective[j] * sol.primal[j];

    std::vector<double> y(m_);
    for (int i = 0; i < m_; ++i) y[i] = phase_cost(basic_[i], false);
    btran(y);
    sol.duals = y;

    sol.reduced_costs.assign(n_, 0.0);
    double bound_terms = 0.0;
    for (int j = 0; j < total_cols_; ++j) {
      if (state_[j] == VarState::basic) continue;
      double d = phase_cost(j, false);
      for_col(j, [&](int r, double a) { d -= y[r] * a; });
      if (j < n_) sol.reduced_costs[j] = d;
      const double v = nonbasic_value(j);
      if (v != 0.0) bound_terms += d * v;
    }
    double yb = 0.0;
    for (int i = 0; i < m_; ++i) yb += y[i] * lp_.rhs[i];
    sol.dual_residual = std::abs(sol.objective - (yb + bound_terms));
    return sol;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  const auto problems = validate(lp);
  if (!problems.empty())
    throw std::invalid_argument("solve_lp: invalid program: " + problems.front());
  Simplex s(lp, opt);
  return s.run();
}

}  // namespace chp::lp
