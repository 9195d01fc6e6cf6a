#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ess::detail {

namespace {

constexpr double kRcTol = 1e-9;      // reduced-cost threshold
constexpr double kPivotTol = 1e-10;  // minimum pivot magnitude
constexpr double kPhase1Tol = 1e-9;  // residual infeasibility threshold

class Tableau {
 public:
  Tableau(const LpProblem& p) : p_(p) { build(); }

  LpResult run() {
    LpResult res;
    if (bad_bounds_) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Phase 1: minimize the sum of artificials.
    if (num_art_ > 0) {
      set_phase1_costs();
      if (!iterate(/*phase1=*/true)) {
        res.status = LpStatus::Stall;
        return res;
      }
      if (objective_value() > kPhase1Tol * rhs_scale_) {
        res.status = LpStatus::Infeasible;
        return res;
      }
      pivot_out_artificials();
    }
    set_phase2_costs();
    if (!iterate(/*phase1=*/false)) {
      res.status = LpStatus::Stall;
      return res;
    }
    // A basic artificial drifting away from zero would mean the reported
    // point violates a constraint; treat as no-information.
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<size_t>(i)] >= art_col0_ &&
          std::fabs(rhs(i)) > kPhase1Tol * rhs_scale_) {
        res.status = LpStatus::Stall;
        return res;
      }
    }
    res.status = LpStatus::Optimal;
    res.x.assign(static_cast<size_t>(p_.num_vars), 0.0);
    for (int i = 0; i < m_; ++i) {
      int b = basis_[static_cast<size_t>(i)];
      if (b < p_.num_vars)
        res.x[static_cast<size_t>(b)] = rhs(i);
    }
    for (int j = 0; j < p_.num_vars; ++j)
      res.x[static_cast<size_t>(j)] += p_.lower[static_cast<size_t>(j)];
    res.value = 0.0;
    if (!p_.objective.empty())
      for (int j = 0; j < p_.num_vars; ++j)
        res.value += p_.objective[static_cast<size_t>(j)] * res.x[static_cast<size_t>(j)];
    return res;
  }

 private:
  // Column blocks: [structural (nv)] [ineq slacks (mi)] [ub slacks (nub)]
  // [artificials (na)].
  void build() {
    nv_ = p_.num_vars;
    const int mi = static_cast<int>(p_.ineqs.size());
    const int me = static_cast<int>(p_.eqs.size());

    // One upper-bound row per variable; a pinned variable (range ~0)
    // gets rhs 0, forcing its shifted value to stay at the bound.
    ub_var_.clear();
    for (int j = 0; j < nv_; ++j) {
      double u = p_.upper[static_cast<size_t>(j)] - p_.lower[static_cast<size_t>(j)];
      if (u < -1e-11) {
        bad_bounds_ = true;
        return;
      }
      range_.push_back(std::max(u, 0.0));
      ub_var_.push_back(j);
    }
    const int nub = static_cast<int>(ub_var_.size());

    m_ = me + mi + nub;
    slack_col0_ = nv_;
    ubslack_col0_ = nv_ + mi;
    art_col0_ = nv_ + mi + nub;

    // First pass: assemble raw rows (shifted by lower bounds), count
    // artificials.
    struct RawRow {
      std::vector<double> a;  // structural part
      double b = 0.0;
      int slack = -1;         // ineq slack column, +1 coeff
      int ubslack = -1;       // ub slack column, +1 coeff
      bool negated = false;
    };
    std::vector<RawRow> rows;
    rows.reserve(static_cast<size_t>(m_));

    auto shift_rhs = [&](const LpRow& r) {
      double b = r.rhs;
      for (int j = 0; j < nv_; ++j)
        b -= r.coeffs[static_cast<size_t>(j)] * p_.lower[static_cast<size_t>(j)];
      return b;
    };

    for (const auto& r : p_.eqs) {
      RawRow row;
      row.a = r.coeffs;
      row.b = shift_rhs(r);
      rows.push_back(std::move(row));
    }
    for (int i = 0; i < mi; ++i) {
      RawRow row;
      row.a = p_.ineqs[static_cast<size_t>(i)].coeffs;
      row.b = shift_rhs(p_.ineqs[static_cast<size_t>(i)]);
      row.slack = slack_col0_ + i;
      rows.push_back(std::move(row));
    }
    for (int k = 0; k < nub; ++k) {
      RawRow row;
      row.a.assign(static_cast<size_t>(nv_), 0.0);
      row.a[static_cast<size_t>(ub_var_[static_cast<size_t>(k)])] = 1.0;
      row.b = range_[static_cast<size_t>(ub_var_[static_cast<size_t>(k)])];
      row.ubslack = ubslack_col0_ + k;
      rows.push_back(std::move(row));
    }

    // Normalize to rhs >= 0 and decide basis per row.
    num_art_ = 0;
    rhs_scale_ = 1.0;
    std::vector<int> art_of_row(static_cast<size_t>(m_), -1);
    for (int i = 0; i < m_; ++i) {
      auto& row = rows[static_cast<size_t>(i)];
      if (row.b < 0.0) {
        for (auto& v : row.a) v = -v;
        row.b = -row.b;
        row.negated = true;
      }
      rhs_scale_ = std::max(rhs_scale_, row.b);
      bool has_unit_slack =
          (row.slack >= 0 && !row.negated) || (row.ubslack >= 0 && !row.negated);
      if (!has_unit_slack) art_of_row[static_cast<size_t>(i)] = num_art_++;
    }

    ncols_ = art_col0_ + num_art_;
    t_.assign(static_cast<size_t>(m_) * static_cast<size_t>(ncols_ + 1), 0.0);
    basis_.assign(static_cast<size_t>(m_), -1);

    for (int i = 0; i < m_; ++i) {
      auto& row = rows[static_cast<size_t>(i)];
      for (int j = 0; j < nv_; ++j) at(i, j) = row.a[static_cast<size_t>(j)];
      double sgn = row.negated ? -1.0 : 1.0;
      if (row.slack >= 0) at(i, row.slack) = sgn;
      if (row.ubslack >= 0) at(i, row.ubslack) = sgn;
      rhs(i) = row.b;
      int art = art_of_row[static_cast<size_t>(i)];
      if (art >= 0) {
        at(i, art_col0_ + art) = 1.0;
        basis_[static_cast<size_t>(i)] = art_col0_ + art;
      } else if (row.slack >= 0) {
        basis_[static_cast<size_t>(i)] = row.slack;
      } else {
        basis_[static_cast<size_t>(i)] = row.ubslack;
      }
    }
  }

  double& at(int i, int j) {
    return t_[static_cast<size_t>(i) * static_cast<size_t>(ncols_ + 1) +
              static_cast<size_t>(j)];
  }
  double& rhs(int i) { return at(i, ncols_); }

  void set_phase1_costs() {
    cost_.assign(static_cast<size_t>(ncols_), 0.0);
    for (int j = art_col0_; j < ncols_; ++j) cost_[static_cast<size_t>(j)] = 1.0;
    allow_artificials_ = true;
    rebuild_reduced_costs();
  }

  void set_phase2_costs() {
    cost_.assign(static_cast<size_t>(ncols_), 0.0);
    if (!p_.objective.empty())
      for (int j = 0; j < nv_; ++j)
        cost_[static_cast<size_t>(j)] = p_.objective[static_cast<size_t>(j)];
    allow_artificials_ = false;
    rebuild_reduced_costs();
  }

  void rebuild_reduced_costs() {
    rc_.assign(static_cast<size_t>(ncols_), 0.0);
    obj_ = 0.0;
    for (int j = 0; j < ncols_; ++j) rc_[static_cast<size_t>(j)] = cost_[static_cast<size_t>(j)];
    for (int i = 0; i < m_; ++i) {
      double cb = cost_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
      if (cb == 0.0) continue;
      for (int j = 0; j < ncols_; ++j) rc_[static_cast<size_t>(j)] -= cb * at(i, j);
      obj_ += cb * rhs(i);
    }
  }

  double objective_value() const { return obj_; }

  // Returns false only on iteration-cap stall.
  bool iterate(bool phase1) {
    const long cap = 2000 + 50L * (m_ + ncols_);
    long degenerate_streak = 0;
    bool bland = false;
    for (long iter = 0; iter < cap; ++iter) {
      int enter = -1;
      if (!bland) {
        double best = -kRcTol;
        for (int j = 0; j < ncols_; ++j) {
          if (!allow_artificials_ && j >= art_col0_) break;
          double r = rc_[static_cast<size_t>(j)];
          if (r < best) {
            best = r;
            enter = j;
          }
        }
      } else {
        for (int j = 0; j < ncols_; ++j) {
          if (!allow_artificials_ && j >= art_col0_) break;
          if (rc_[static_cast<size_t>(j)] < -kRcTol) {
            enter = j;
            break;
          }
        }
      }
      if (enter < 0) return true;  // optimal

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        double a = at(i, enter);
        if (a <= kPivotTol) continue;
        double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) {
        // Unbounded direction; cannot happen with full bounds, so treat
        // as numerical failure.
        (void)phase1;
        return false;
      }

      if (best_ratio < 1e-12) {
        if (++degenerate_streak > 60) bland = true;
      } else {
        degenerate_streak = 0;
      }
      pivot(leave, enter);
    }
    return false;
  }

  void pivot(int leave, int enter) {
    double piv = at(leave, enter);
    double inv = 1.0 / piv;
    for (int j = 0; j <= ncols_; ++j) at(leave, j) *= inv;
    at(leave, enter) = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      double f = at(i, enter);
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols_; ++j) at(i, j) -= f * at(leave, j);
      at(i, enter) = 0.0;
    }
    double f = rc_[static_cast<size_t>(enter)];
    if (f != 0.0) {
      for (int j = 0; j < ncols_; ++j)
        rc_[static_cast<size_t>(j)] -= f * at(leave, j);
      rc_[static_cast<size_t>(enter)] = 0.0;
      obj_ -= f * rhs(leave);
    }
    basis_[static_cast<size_t>(leave)] = enter;
  }

  // After phase 1, replace basic artificials by structural columns where
  // possible; rows that stay artificial-basic at level ~0 are redundant.
  void pivot_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<size_t>(i)] < art_col0_) continue;
      int enter = -1;
      double best = kPivotTol;
      for (int j = 0; j < art_col0_; ++j) {
        double a = std::fabs(at(i, j));
        if (a > best) {
          best = a;
          enter = j;
        }
      }
      if (enter >= 0) pivot(i, enter);
    }
  }

  const LpProblem& p_;
  std::vector<double> t_;
  std::vector<double> cost_, rc_;
  std::vector<int> basis_;
  std::vector<int> ub_var_;
  std::vector<double> range_;
  int nv_ = 0, m_ = 0, ncols_ = 0;
  int slack_col0_ = 0, ubslack_col0_ = 0, art_col0_ = 0, num_art_ = 0;
  double obj_ = 0.0;
  double rhs_scale_ = 1.0;
  bool allow_artificials_ = true;
  bool bad_bounds_ = false;
};

}  // namespace

LpResult solve_lp(const LpProblem& p) {
  if (p.num_vars == 0) {
    LpResult r;
    r.status = LpStatus::Optimal;
    return r;
  }
  Tableau t(p);
  return t.run();
}

}  // namespace ess::detail
