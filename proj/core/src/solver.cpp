#include "ess/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "ess/error.hpp"
#include "simplex.hpp"

namespace ess {

namespace {

using detail::LpProblem;
using detail::LpResult;
using detail::LpRow;
using detail::LpStatus;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPruneSlack = 1e-11;   // safety margin on certificates
constexpr double kBoundSlack = 1e-11;   // safety margin on FBBT updates
constexpr double kDustRel = 1e-13;      // relative coefficient dust cutoff

struct Interval {
  double lo = 0.0, hi = 0.0;
};

Interval imul(const Interval& a, const Interval& b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min(std::min(p1, p2), std::min(p3, p4)),
          std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval poly_range(const Polynomial& poly, std::span<const double> lo,
                    std::span<const double> hi) {
  Interval total{poly.constant(), poly.constant()};
  for (const auto& t : poly.terms()) {
    Interval prod{t.coeff, t.coeff};
    for (int v : t.vars)
      prod = imul(prod, Interval{lo[static_cast<size_t>(v)], hi[static_cast<size_t>(v)]});
    total.lo += prod.lo;
    total.hi += prod.hi;
  }
  return total;
}

struct ReducedConstraint {
  Polynomial poly;
  double kappa = kPruneSlack;  // pruning slack (float safety + dropped dust)
};

// Program after linear-equality elimination. Reduced variables are a
// subset of the original ones; everything else is an affine function of
// them.
struct ReducedProgram {
  int num_vars = 0;
  std::vector<double> lo, hi;
  std::vector<LpRow> lin_ineqs;  // a.z <= rhs
  std::vector<ReducedConstraint> eqs, ineqs;
  Polynomial objective;  // always minimize-form
  double obj_drop = 0.0;
  std::vector<Polynomial> lift;  // original var -> affine polynomial in z
  std::vector<int> free_vars;    // reduced index -> original index
  bool proven_infeasible = false;
};

// Chain-decomposed monomials for the McCormick relaxation. Aux variable k
// stands for the product of monos[k]; its prefix (all but the last
// factor) is either a single variable or an earlier aux.
struct MonomialTable {
  std::vector<std::vector<int>> monos;
  std::vector<int> prefix_aux;  // -1 when the prefix is a single variable
  std::vector<int> prefix_var;  // valid when prefix_aux == -1
  std::vector<int> last_var;
  std::map<std::vector<int>, int> index;

  int require(const std::vector<int>& sorted_vars) {
    auto it = index.find(sorted_vars);
    if (it != index.end()) return it->second;
    int pa = -1, pv = -1;
    if (sorted_vars.size() == 2) {
      pv = sorted_vars[0];
    } else {
      std::vector<int> prefix(sorted_vars.begin(), sorted_vars.end() - 1);
      pa = require(prefix);
    }
    int id = static_cast<int>(monos.size());
    monos.push_back(sorted_vars);
    prefix_aux.push_back(pa);
    prefix_var.push_back(pv);
    last_var.push_back(sorted_vars.back());
    index.emplace(sorted_vars, id);
    return id;
  }

  int count() const { return static_cast<int>(monos.size()); }
};

// Linear image of a polynomial over the LP variable block [z | w].
struct LinearizedPoly {
  std::vector<std::pair<int, double>> cols;  // (lp column, coefficient)
  double constant = 0.0;
};

LinearizedPoly linearize(const Polynomial& poly, MonomialTable& table) {
  LinearizedPoly out;
  out.constant = poly.constant();
  std::map<int, double> acc;  // keyed by LP column: var j or num_vars + aux
  for (const auto& t : poly.terms()) {
    if (t.vars.size() == 1) {
      acc[t.vars[0]] += t.coeff;
    } else {
      int aux = table.require(t.vars);
      acc[std::numeric_limits<int>::max() / 2 + aux] += t.coeff;
    }
  }
  for (auto& [k, c] : acc) out.cols.emplace_back(k, c);
  return out;
}

struct Node {
  std::vector<double> lo, hi;
  double lb = -kInf;
  long id = 0;
};

bool lexicographic_less(std::span<const double> a, std::span<const double> b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

// ---------------------------------------------------------------------
// Presolve: eliminate linear equalities by Gauss-Jordan, substitute the
// affine expressions into every polynomial, and translate eliminated
// bounds into linear inequalities over the remaining variables.
// ---------------------------------------------------------------------
ReducedProgram presolve(const PolynomialProgram& program) {
  ReducedProgram red;
  const int d = program.num_vars;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& eq : program.linear_eqs) {
    rows.push_back(eq.coeffs);
    rhs.push_back(eq.rhs);
  }

  std::vector<int> pivot_col;  // per reduced row
  std::vector<int> is_pivot(static_cast<size_t>(d), 0);
  for (size_t r = 0; r < rows.size(); ++r) {
    // eliminate previously chosen pivots
    for (size_t pr = 0; pr < pivot_col.size(); ++pr) {
      double f = rows[r][static_cast<size_t>(pivot_col[pr])];
      if (f == 0.0) continue;
      for (int j = 0; j < d; ++j) rows[r][static_cast<size_t>(j)] -= f * rows[pr][static_cast<size_t>(j)];
      rhs[r] -= f * rhs[pr];
    }
    // choose pivot: largest |coef|, tie -> largest index
    int pc = -1;
    double best = 1e-12;
    for (int j = 0; j < d; ++j) {
      double a = std::fabs(rows[r][static_cast<size_t>(j)]);
      if (a > best || (pc >= 0 && a == best && j > pc)) {
        best = a;
        pc = j;
      }
    }
    if (pc < 0) {
      if (std::fabs(rhs[r]) > 1e-9) red.proven_infeasible = true;
      rows[r].assign(static_cast<size_t>(d), 0.0);
      rhs[r] = 0.0;
      continue;
    }
    double inv = 1.0 / rows[r][static_cast<size_t>(pc)];
    for (int j = 0; j < d; ++j) rows[r][static_cast<size_t>(j)] *= inv;
    rhs[r] *= inv;
    rows[r][static_cast<size_t>(pc)] = 1.0;
    // eliminate from earlier pivot rows
    for (size_t pr = 0; pr < pivot_col.size(); ++pr) {
      double f = rows[pr][static_cast<size_t>(pc)];
      if (f == 0.0) continue;
      for (int j = 0; j < d; ++j) rows[pr][static_cast<size_t>(j)] -= f * rows[r][static_cast<size_t>(j)];
      rhs[pr] -= f * rhs[r];
    }
    // compact: move this row into pivot order
    rows[pivot_col.size()] = rows[r];
    rhs[pivot_col.size()] = rhs[r];
    pivot_col.push_back(pc);
    is_pivot[static_cast<size_t>(pc)] = 1;
  }
  rows.resize(pivot_col.size());
  rhs.resize(pivot_col.size());

  // reduced variables = free original variables, ascending
  std::vector<int> red_of_orig(static_cast<size_t>(d), -1);
  for (int j = 0; j < d; ++j) {
    if (!is_pivot[static_cast<size_t>(j)]) {
      red_of_orig[static_cast<size_t>(j)] = red.num_vars++;
      red.free_vars.push_back(j);
      red.lo.push_back(program.lower[static_cast<size_t>(j)]);
      red.hi.push_back(program.upper[static_cast<size_t>(j)]);
    }
  }

  // lift expressions
  red.lift.resize(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    if (!is_pivot[static_cast<size_t>(j)]) {
      Polynomial p;
      p.add_term(1.0, {red_of_orig[static_cast<size_t>(j)]});
      red.lift[static_cast<size_t>(j)] = p;
    }
  }
  for (size_t r = 0; r < pivot_col.size(); ++r) {
    int pv = pivot_col[r];
    Polynomial p(rhs[r]);
    for (int j = 0; j < d; ++j) {
      if (j == pv) continue;
      double a = rows[r][static_cast<size_t>(j)];
      if (std::fabs(a) > 1e-14)
        p.add_term(-a, {red_of_orig[static_cast<size_t>(j)]});
    }
    red.lift[static_cast<size_t>(pv)] = p;

    // bounds of the eliminated variable become linear inequalities
    double lo_b = program.lower[static_cast<size_t>(pv)];
    double hi_b = program.upper[static_cast<size_t>(pv)];
    if (p.terms().empty()) {
      if (p.constant() < lo_b - 1e-9 || p.constant() > hi_b + 1e-9)
        red.proven_infeasible = true;
      continue;
    }
    LpRow up;  // expr <= hi_b  ->  sum coef z <= hi_b - const
    up.coeffs.assign(static_cast<size_t>(red.num_vars), 0.0);
    for (const auto& t : p.terms()) up.coeffs[static_cast<size_t>(t.vars[0])] = t.coeff;
    up.rhs = hi_b - p.constant();
    LpRow down;  // expr >= lo_b  ->  -sum coef z <= const - lo_b
    down.coeffs.assign(static_cast<size_t>(red.num_vars), 0.0);
    for (const auto& t : p.terms()) down.coeffs[static_cast<size_t>(t.vars[0])] = -t.coeff;
    down.rhs = p.constant() - lo_b;
    red.lin_ineqs.push_back(std::move(up));
    red.lin_ineqs.push_back(std::move(down));
  }

  // substitute into polynomials
  auto reduce_poly = [&](const Polynomial& poly, double* dropped) {
    Polynomial q = poly.substitute(red.lift);
    double scale = std::max(1.0, q.max_abs_coeff());
    double drop = q.canonicalize(kDustRel);
    if (dropped) *dropped = drop;
    (void)scale;
    return q;
  };

  for (const auto& eq : program.poly_eqs) {
    double drop = 0.0;
    Polynomial q = reduce_poly(eq, &drop);
    if (q.is_constant()) {
      if (std::fabs(q.constant()) > kPruneSlack + drop) red.proven_infeasible = true;
      continue;
    }
    red.eqs.push_back({std::move(q), kPruneSlack + drop});
  }
  for (const auto& ineq : program.poly_ineqs) {
    double drop = 0.0;
    Polynomial q = reduce_poly(ineq, &drop);
    if (q.is_constant()) {
      if (q.constant() > kPruneSlack + drop) red.proven_infeasible = true;
      continue;
    }
    red.ineqs.push_back({std::move(q), kPruneSlack + drop});
  }

  if (program.sense != Sense::Feasibility) {
    double drop = 0.0;
    red.objective = reduce_poly(program.objective, &drop);
    if (program.sense == Sense::Maximize) red.objective *= -1.0;
    red.obj_drop = drop;
  }
  return red;
}

// ---------------------------------------------------------------------
// Gauss-Newton / Levenberg-Marquardt refinement in the original space.
// ---------------------------------------------------------------------
class Refiner {
 public:
  Refiner(const PolynomialProgram& program, double accept_tol)
      : p_(program), accept_tol_(accept_tol), d_(program.num_vars) {}

  // Pushes x toward the feasible set; returns true when the original
  // constraints hold within accept_tol.
  bool restore(std::vector<double>& x) const {
    clamp(x);
    double lambda = 1e-10;
    for (int iter = 0; iter < 60; ++iter) {
      if (max_constraint_violation(p_, x) <= accept_tol_) return true;
      std::vector<double> r;
      std::vector<std::vector<double>> J;
      residuals(x, r, J);
      if (r.empty()) return true;

      double phi = 0.0;
      for (double v : r) phi += v * v;

      // normal equations with Levenberg damping
      const int m = static_cast<int>(r.size());
      std::vector<double> JtJ(static_cast<size_t>(d_ * d_), 0.0);
      std::vector<double> Jtr(static_cast<size_t>(d_), 0.0);
      for (int i = 0; i < m; ++i) {
        for (int a = 0; a < d_; ++a) {
          double ja = J[static_cast<size_t>(i)][static_cast<size_t>(a)];
          if (ja == 0.0) continue;
          Jtr[static_cast<size_t>(a)] += ja * r[static_cast<size_t>(i)];
          for (int b = a; b < d_; ++b)
            JtJ[static_cast<size_t>(a * d_ + b)] += ja * J[static_cast<size_t>(i)][static_cast<size_t>(b)];
        }
      }
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < a; ++b)
          JtJ[static_cast<size_t>(a * d_ + b)] = JtJ[static_cast<size_t>(b * d_ + a)];

      bool improved = false;
      for (int attempt = 0; attempt < 6 && !improved; ++attempt) {
        std::vector<double> A = JtJ;
        for (int a = 0; a < d_; ++a)
          A[static_cast<size_t>(a * d_ + a)] += lambda + 1e-14;
        std::vector<double> step = Jtr;
        if (!cholesky_solve(A, step)) {
          lambda *= 10.0;
          continue;
        }
        std::vector<double> trial = x;
        for (int a = 0; a < d_; ++a) trial[static_cast<size_t>(a)] -= step[static_cast<size_t>(a)];
        clamp(trial);
        double phi_trial = 0.0;
        {
          std::vector<double> rt;
          residuals_only(trial, rt);
          for (double v : rt) phi_trial += v * v;
        }
        if (phi_trial < phi * (1.0 - 1e-12) || phi_trial < 1e-30) {
          x = trial;
          lambda = std::max(lambda / 3.0, 1e-12);
          improved = true;
        } else {
          lambda *= 10.0;
        }
      }
      if (!improved) return max_constraint_violation(p_, x) <= accept_tol_;
    }
    return max_constraint_violation(p_, x) <= accept_tol_;
  }

  // Feasible descent for the minimize-form objective: project the
  // negative gradient onto the active-constraint null space, backtrack,
  // re-restore. Only improves incumbents; correctness never depends on it.
  void polish(std::vector<double>& x, const Polynomial& objective) const {
    for (int iter = 0; iter < 25; ++iter) {
      if (!restore(x)) return;
      double f0 = objective.eval(x);

      std::vector<std::vector<double>> J;
      active_jacobian(x, J);
      std::vector<double> g(static_cast<size_t>(d_), 0.0);
      objective.add_gradient(x, 1.0, g);

      std::vector<double> dir = project_null(J, g);
      for (int a = 0; a < d_; ++a) {
        double xa = x[static_cast<size_t>(a)];
        if (xa <= p_.lower[static_cast<size_t>(a)] + 1e-12 && dir[static_cast<size_t>(a)] < 0.0)
          dir[static_cast<size_t>(a)] = 0.0;
        if (xa >= p_.upper[static_cast<size_t>(a)] - 1e-12 && dir[static_cast<size_t>(a)] > 0.0)
          dir[static_cast<size_t>(a)] = 0.0;
      }
      double norm = 0.0;
      for (double v : dir) norm += v * v;
      if (norm <= 1e-20) return;

      bool accepted = false;
      double t = 0.5;
      for (int bt = 0; bt < 10 && !accepted; ++bt, t *= 0.5) {
        std::vector<double> trial = x;
        for (int a = 0; a < d_; ++a) trial[static_cast<size_t>(a)] += t * dir[static_cast<size_t>(a)];
        if (!restore(trial)) continue;
        if (objective.eval(trial) < f0 - 1e-15) {
          x = trial;
          accepted = true;
        }
      }
      if (!accepted) return;
    }
  }

 private:
  void clamp(std::vector<double>& x) const {
    for (int a = 0; a < d_; ++a)
      x[static_cast<size_t>(a)] = std::min(std::max(x[static_cast<size_t>(a)], p_.lower[static_cast<size_t>(a)]),
                                           p_.upper[static_cast<size_t>(a)]);
  }

  void residuals_only(const std::vector<double>& x, std::vector<double>& r) const {
    r.clear();
    for (const auto& eq : p_.linear_eqs) {
      double v = -eq.rhs;
      for (int a = 0; a < d_; ++a) v += eq.coeffs[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
      r.push_back(v);
    }
    for (const auto& eq : p_.poly_eqs) r.push_back(eq.eval(x));
    for (const auto& q : p_.poly_ineqs) {
      double v = q.eval(x);
      if (v > 0.0) r.push_back(v);
    }
  }

  void residuals(const std::vector<double>& x, std::vector<double>& r,
                 std::vector<std::vector<double>>& J) const {
    r.clear();
    J.clear();
    for (const auto& eq : p_.linear_eqs) {
      double v = -eq.rhs;
      for (int a = 0; a < d_; ++a) v += eq.coeffs[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
      r.push_back(v);
      J.push_back(eq.coeffs);
    }
    for (const auto& eq : p_.poly_eqs) {
      r.push_back(eq.eval(x));
      std::vector<double> row(static_cast<size_t>(d_), 0.0);
      eq.add_gradient(x, 1.0, row);
      J.push_back(std::move(row));
    }
    for (const auto& q : p_.poly_ineqs) {
      double v = q.eval(x);
      if (v > 0.0) {
        r.push_back(v);
        std::vector<double> row(static_cast<size_t>(d_), 0.0);
        q.add_gradient(x, 1.0, row);
        J.push_back(std::move(row));
      }
    }
  }

  void active_jacobian(const std::vector<double>& x,
                       std::vector<std::vector<double>>& J) const {
    J.clear();
    for (const auto& eq : p_.linear_eqs) J.push_back(eq.coeffs);
    for (const auto& eq : p_.poly_eqs) {
      std::vector<double> row(static_cast<size_t>(d_), 0.0);
      eq.add_gradient(x, 1.0, row);
      J.push_back(std::move(row));
    }
    for (const auto& q : p_.poly_ineqs) {
      if (q.eval(x) >= -1e-9) {
        std::vector<double> row(static_cast<size_t>(d_), 0.0);
        q.add_gradient(x, 1.0, row);
        J.push_back(std::move(row));
      }
    }
  }

  // d = -(I - J^T (J J^T)^-1 J) g
  std::vector<double> project_null(const std::vector<std::vector<double>>& J,
                                   const std::vector<double>& g) const {
    const int m = static_cast<int>(J.size());
    std::vector<double> dir(static_cast<size_t>(d_));
    for (int a = 0; a < d_; ++a) dir[static_cast<size_t>(a)] = -g[static_cast<size_t>(a)];
    if (m == 0) return dir;

    std::vector<double> JJt(static_cast<size_t>(m * m), 0.0);
    std::vector<double> Jg(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < d_; ++k)
        Jg[static_cast<size_t>(i)] += J[static_cast<size_t>(i)][static_cast<size_t>(k)] * dir[static_cast<size_t>(k)];
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < d_; ++k)
          s += J[static_cast<size_t>(i)][static_cast<size_t>(k)] * J[static_cast<size_t>(j)][static_cast<size_t>(k)];
        JJt[static_cast<size_t>(i * m + j)] = s;
        JJt[static_cast<size_t>(j * m + i)] = s;
      }
      JJt[static_cast<size_t>(i * m + i)] += 1e-12;
    }
    std::vector<double> mu = Jg;
    if (!cholesky_solve(JJt, mu)) return dir;
    for (int a = 0; a < d_; ++a)
      for (int i = 0; i < m; ++i)
        dir[static_cast<size_t>(a)] -= J[static_cast<size_t>(i)][static_cast<size_t>(a)] * mu[static_cast<size_t>(i)];
    return dir;
  }

  // In-place LDL^T solve; returns false if the matrix is not positive
  // definite enough.
  static bool cholesky_solve(std::vector<double>& A, std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
      double piv = A[static_cast<size_t>(k * n + k)];
      if (!(piv > 1e-300)) return false;
      for (int i = k + 1; i < n; ++i) {
        double f = A[static_cast<size_t>(i * n + k)] / piv;
        if (f == 0.0) continue;
        for (int j = k; j < n; ++j)
          A[static_cast<size_t>(i * n + j)] -= f * A[static_cast<size_t>(k * n + j)];
        b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[static_cast<size_t>(i)];
      for (int j = i + 1; j < n; ++j)
        s -= A[static_cast<size_t>(i * n + j)] * b[static_cast<size_t>(j)];
      b[static_cast<size_t>(i)] = s / A[static_cast<size_t>(i * n + i)];
    }
    return true;
  }

  const PolynomialProgram& p_;
  double accept_tol_;
  int d_;
};

// ---------------------------------------------------------------------
// Branch-and-bound engine.
// ---------------------------------------------------------------------
class BranchAndBound {
 public:
  BranchAndBound(const PolynomialProgram& program, const SolverOptions& opts,
                 std::span<const std::vector<double>> hints, double gap_target)
      : program_(program),
        opts_(opts),
        hints_(hints),
        gap_target_(gap_target),
        accept_tol_(std::max(opts.feas_tol * 1e-3, 1e-12)),
        refiner_(program, std::max(opts.feas_tol * 1e-3, 1e-12)) {}

  SolveOutcome run() {
    program_.validate();
    red_ = presolve(program_);
    minimize_ = (program_.sense != Sense::Feasibility);

    SolveOutcome out;
    if (red_.proven_infeasible) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    if (red_.num_vars == 0) return solve_trivial();

    build_static_rows();
    return minimize_ ? run_optimize() : run_feasibility();
  }

 private:
  // All variables pinned by the linear equalities: a single candidate
  // point decides everything.
  SolveOutcome solve_trivial() {
    SolveOutcome out;
    out.nodes = 1;
    std::vector<double> z;  // empty reduced point
    std::vector<double> x = lift_point(z);
    refiner_.restore(x);
    if (max_constraint_violation(program_, x) <= accept_tol_) {
      out.point = x;
      if (minimize_) {
        out.status = SolveStatus::GlobalOpt;
        out.value = program_.objective.eval(x);
        out.gap = 0.0;
      } else {
        out.status = SolveStatus::Feasible;
      }
    } else {
      out.status = SolveStatus::Infeasible;
    }
    return out;
  }

  void build_static_rows() {
    for (const auto& c : red_.eqs) eq_rows_.push_back(linearize(c.poly, table_));
    for (const auto& c : red_.ineqs) ineq_rows_.push_back(linearize(c.poly, table_));
    if (minimize_) obj_row_ = linearize(red_.objective, table_);
    num_aux_ = table_.count();
    lp_cols_ = red_.num_vars + num_aux_;
  }

  int lp_col(int key) const {
    constexpr int kAuxBase = std::numeric_limits<int>::max() / 2;
    return key >= kAuxBase ? red_.num_vars + (key - kAuxBase) : key;
  }

  std::vector<double> lift_point(std::span<const double> z) const {
    std::vector<double> x(static_cast<size_t>(program_.num_vars));
    for (int j = 0; j < program_.num_vars; ++j)
      x[static_cast<size_t>(j)] = red_.lift[static_cast<size_t>(j)].eval(z);
    return x;
  }

  // --- per-node helpers -----------------------------------------------

  bool fbbt(Node& node) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& row : red_.lin_ineqs) {
        // min of the row over the box, excluding one variable at a time
        double minsum = 0.0;
        for (int j = 0; j < red_.num_vars; ++j) {
          double a = row.coeffs[static_cast<size_t>(j)];
          minsum += a * (a >= 0.0 ? node.lo[static_cast<size_t>(j)] : node.hi[static_cast<size_t>(j)]);
        }
        for (int j = 0; j < red_.num_vars; ++j) {
          double a = row.coeffs[static_cast<size_t>(j)];
          if (a == 0.0) continue;
          double without =
              minsum - a * (a >= 0.0 ? node.lo[static_cast<size_t>(j)] : node.hi[static_cast<size_t>(j)]);
          double bound = (row.rhs - without) / a;
          if (a > 0.0) {
            double nb = bound + kBoundSlack;
            if (nb < node.hi[static_cast<size_t>(j)]) node.hi[static_cast<size_t>(j)] = nb;
          } else {
            double nb = bound - kBoundSlack;
            if (nb > node.lo[static_cast<size_t>(j)]) node.lo[static_cast<size_t>(j)] = nb;
          }
          if (node.lo[static_cast<size_t>(j)] > node.hi[static_cast<size_t>(j)] + kBoundSlack)
            return false;
          node.hi[static_cast<size_t>(j)] = std::max(node.hi[static_cast<size_t>(j)], node.lo[static_cast<size_t>(j)]);
        }
      }
    }
    return true;
  }

  bool interval_prune(const Node& node) const {
    for (const auto& c : red_.eqs) {
      Interval r = poly_range(c.poly, node.lo, node.hi);
      if (r.lo > c.kappa || r.hi < -c.kappa) return true;
    }
    for (const auto& c : red_.ineqs) {
      Interval r = poly_range(c.poly, node.lo, node.hi);
      if (r.lo > c.kappa) return true;
    }
    return false;
  }

  // Aux bounds along the chain decomposition.
  void aux_bounds(const Node& node, std::vector<double>& alo,
                  std::vector<double>& ahi) const {
    alo.resize(static_cast<size_t>(num_aux_));
    ahi.resize(static_cast<size_t>(num_aux_));
    for (int k = 0; k < num_aux_; ++k) {
      Interval pre = table_.prefix_aux[static_cast<size_t>(k)] >= 0
                         ? Interval{alo[static_cast<size_t>(table_.prefix_aux[static_cast<size_t>(k)])],
                                    ahi[static_cast<size_t>(table_.prefix_aux[static_cast<size_t>(k)])]}
                         : Interval{node.lo[static_cast<size_t>(table_.prefix_var[static_cast<size_t>(k)])],
                                    node.hi[static_cast<size_t>(table_.prefix_var[static_cast<size_t>(k)])]};
      int lv = table_.last_var[static_cast<size_t>(k)];
      Interval prod = imul(pre, Interval{node.lo[static_cast<size_t>(lv)], node.hi[static_cast<size_t>(lv)]});
      alo[static_cast<size_t>(k)] = prod.lo;
      ahi[static_cast<size_t>(k)] = prod.hi;
    }
  }

  LpProblem build_lp(const Node& node, bool with_objective) const {
    LpProblem lp;
    lp.num_vars = lp_cols_;
    lp.lower.assign(static_cast<size_t>(lp_cols_), 0.0);
    lp.upper.assign(static_cast<size_t>(lp_cols_), 0.0);
    for (int j = 0; j < red_.num_vars; ++j) {
      lp.lower[static_cast<size_t>(j)] = node.lo[static_cast<size_t>(j)];
      lp.upper[static_cast<size_t>(j)] = node.hi[static_cast<size_t>(j)];
    }
    std::vector<double> alo, ahi;
    aux_bounds(node, alo, ahi);
    for (int k = 0; k < num_aux_; ++k) {
      lp.lower[static_cast<size_t>(red_.num_vars + k)] = alo[static_cast<size_t>(k)];
      lp.upper[static_cast<size_t>(red_.num_vars + k)] = ahi[static_cast<size_t>(k)];
    }

    auto expand = [&](const LinearizedPoly& lin, double sign) {
      LpRow row;
      row.coeffs.assign(static_cast<size_t>(lp_cols_), 0.0);
      for (const auto& [key, c] : lin.cols) row.coeffs[static_cast<size_t>(lp_col(key))] = sign * c;
      row.rhs = -sign * lin.constant;
      return row;
    };

    for (const auto& lin : eq_rows_) lp.eqs.push_back(expand(lin, 1.0));
    for (const auto& lin : ineq_rows_) lp.ineqs.push_back(expand(lin, 1.0));
    for (const auto& row : red_.lin_ineqs) {
      LpRow r;
      r.coeffs.assign(static_cast<size_t>(lp_cols_), 0.0);
      for (int j = 0; j < red_.num_vars; ++j) r.coeffs[static_cast<size_t>(j)] = row.coeffs[static_cast<size_t>(j)];
      r.rhs = row.rhs;
      lp.ineqs.push_back(std::move(r));
    }

    // McCormick envelopes per aux variable
    for (int k = 0; k < num_aux_; ++k) {
      int wcol = red_.num_vars + k;
      bool square = table_.prefix_aux[static_cast<size_t>(k)] < 0 &&
                    table_.prefix_var[static_cast<size_t>(k)] == table_.last_var[static_cast<size_t>(k)];
      if (square) {
        int xcol = table_.last_var[static_cast<size_t>(k)];
        double a = node.lo[static_cast<size_t>(xcol)], A = node.hi[static_cast<size_t>(xcol)];
        for (double t : {a, A, 0.5 * (a + A)}) {
          LpRow r;  // -w + 2 t x <= t^2
          r.coeffs.assign(static_cast<size_t>(lp_cols_), 0.0);
          r.coeffs[static_cast<size_t>(wcol)] = -1.0;
          r.coeffs[static_cast<size_t>(xcol)] += 2.0 * t;
          r.rhs = t * t;
          lp.ineqs.push_back(std::move(r));
        }
        LpRow r;  // w - (a+A) x <= -aA
        r.coeffs.assign(static_cast<size_t>(lp_cols_), 0.0);
        r.coeffs[static_cast<size_t>(wcol)] = 1.0;
        r.coeffs[static_cast<size_t>(xcol)] = -(a + A);
        r.rhs = -a * A;
        lp.ineqs.push_back(std::move(r));
      } else {
        int ucol = table_.prefix_aux[static_cast<size_t>(k)] >= 0
                       ? red_.num_vars + table_.prefix_aux[static_cast<size_t>(k)]
                       : table_.prefix_var[static_cast<size_t>(k)];
        int vcol = table_.last_var[static_cast<size_t>(k)];
        double a = lp.lower[static_cast<size_t>(ucol)], A = lp.upper[static_cast<size_t>(ucol)];
        double b = lp.lower[static_cast<size_t>(vcol)], B = lp.upper[static_cast<size_t>(vcol)];
        auto add = [&](double wc, double uc, double vc, double rhs) {
          LpRow r;
          r.coeffs.assign(static_cast<size_t>(lp_cols_), 0.0);
          r.coeffs[static_cast<size_t>(wcol)] = wc;
          r.coeffs[static_cast<size_t>(ucol)] += uc;
          r.coeffs[static_cast<size_t>(vcol)] += vc;
          r.rhs = rhs;
          lp.ineqs.push_back(std::move(r));
        };
        add(-1.0, b, a, a * b);    // w >= a v + b u - ab
        add(-1.0, B, A, A * B);    // w >= A v + B u - AB
        add(1.0, -B, -a, -a * B);  // w <= a v + B u - aB
        add(1.0, -b, -A, -A * b);  // w <= A v + b u - Ab
      }
    }

    if (with_objective) {
      lp.objective.assign(static_cast<size_t>(lp_cols_), 0.0);
      for (const auto& [key, c] : obj_row_.cols) lp.objective[static_cast<size_t>(lp_col(key))] = c;
    }
    return lp;
  }

  int pick_branch_var(const Node& node, std::span<const double> lp_point) const {
    std::vector<double> score(static_cast<size_t>(red_.num_vars), 0.0);
    bool have_point = !lp_point.empty();
    if (have_point) {
      for (int k = 0; k < num_aux_; ++k) {
        double prod = 1.0;
        for (int v : table_.monos[static_cast<size_t>(k)]) prod *= lp_point[static_cast<size_t>(v)];
        double err = std::fabs(lp_point[static_cast<size_t>(red_.num_vars + k)] - prod);
        int prev = -1;
        for (int v : table_.monos[static_cast<size_t>(k)]) {
          if (v == prev) continue;
          score[static_cast<size_t>(v)] += err;
          prev = v;
        }
      }
      int best = -1;
      double best_score = 1e-12;
      for (int j = 0; j < red_.num_vars; ++j) {
        if (node.hi[static_cast<size_t>(j)] - node.lo[static_cast<size_t>(j)] <= 1e-12) continue;
        if (score[static_cast<size_t>(j)] > best_score) {
          best_score = score[static_cast<size_t>(j)];
          best = j;
        }
      }
      if (best >= 0) return best;
    }
    // fallback: widest interval
    int best = -1;
    double widest = 1e-12;
    for (int j = 0; j < red_.num_vars; ++j) {
      double w = node.hi[static_cast<size_t>(j)] - node.lo[static_cast<size_t>(j)];
      if (w > widest) {
        widest = w;
        best = j;
      }
    }
    return best;
  }

  std::vector<double> node_center(const Node& node) const {
    std::vector<double> z(static_cast<size_t>(red_.num_vars));
    for (int j = 0; j < red_.num_vars; ++j)
      z[static_cast<size_t>(j)] = 0.5 * (node.lo[static_cast<size_t>(j)] + node.hi[static_cast<size_t>(j)]);
    return z;
  }

  // --- feasibility loop -------------------------------------------------

  SolveOutcome run_feasibility() {
    SolveOutcome out;
    std::vector<Node> stack;
    Node root{red_.lo, red_.hi, -kInf, 0};
    stack.push_back(std::move(root));
    long next_id = 1;

    while (!stack.empty()) {
      if (++out.nodes > opts_.node_budget) {
        out.status = SolveStatus::BudgetExceeded;
        out.point.clear();
        return out;
      }
      Node node = std::move(stack.back());
      stack.pop_back();

      if (!fbbt(node)) continue;
      if (interval_prune(node)) continue;

      LpProblem lp = build_lp(node, false);
      LpResult lpres = detail::solve_lp(lp);
      if (lpres.status == LpStatus::Infeasible) continue;

      std::vector<double> lp_z;
      if (lpres.status == LpStatus::Optimal) lp_z = lpres.x;

      // candidate points: box center first (keeps representative points
      // deterministic and central), then the relaxation point
      std::vector<std::vector<double>> starts;
      starts.push_back(node_center(node));
      if (!lp_z.empty())
        starts.emplace_back(lp_z.begin(), lp_z.begin() + red_.num_vars);
      if (node.id == 0)
        for (const auto& h : hints_)
          if (static_cast<int>(h.size()) == program_.num_vars) starts.push_back(reduce_hint(h));

      for (const auto& s : starts) {
        std::vector<double> x = lift_point(s);
        if (refiner_.restore(x) &&
            max_constraint_violation(program_, x) <= accept_tol_) {
          out.status = SolveStatus::Feasible;
          out.point = x;
          return out;
        }
      }

      int bv = pick_branch_var(node, lp_z);
      if (bv < 0) continue;  // box is a point; interval checks were exact
      double mid = 0.5 * (node.lo[static_cast<size_t>(bv)] + node.hi[static_cast<size_t>(bv)]);
      Node left{node.lo, node.hi, node.lb, next_id++};
      left.hi[static_cast<size_t>(bv)] = mid;
      Node right{node.lo, node.hi, node.lb, next_id++};
      right.lo[static_cast<size_t>(bv)] = mid;
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
    out.status = SolveStatus::Infeasible;
    return out;
  }

  // --- optimization loop ------------------------------------------------

  SolveOutcome run_optimize() {
    SolveOutcome out;
    double target = std::max(gap_target_ - red_.obj_drop, gap_target_ * 0.5);

    auto cmp = [](const Node& a, const Node& b) {
      if (a.lb != b.lb) return a.lb > b.lb;
      return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);
    queue.push(Node{red_.lo, red_.hi, -kInf, 0});
    long next_id = 1;

    double ub = kInf;
    std::vector<double> best;
    double fathom_lb = kInf;

    auto consider = [&](std::vector<double> x) {
      if (!refiner_.restore(x)) return;
      refiner_.polish(x, internal_objective());
      if (max_constraint_violation(program_, x) > accept_tol_) return;
      double value = internal_objective().eval(x);
      if (value < ub - 1e-15 ||
          (value < ub + 1e-15 && (best.empty() || lexicographic_less(x, best)))) {
        ub = std::min(value, ub);
        best = std::move(x);
      }
    };

    while (!queue.empty()) {
      if (++out.nodes > opts_.node_budget) {
        out.status = SolveStatus::BudgetExceeded;
        out.point.clear();
        return out;
      }
      Node node = queue.top();
      queue.pop();

      if (node.lb >= ub - target) {
        fathom_lb = std::min(fathom_lb, node.lb);
        continue;
      }
      if (!fbbt(node)) continue;
      if (interval_prune(node)) continue;

      LpProblem lp = build_lp(node, true);
      LpResult lpres = detail::solve_lp(lp);
      if (lpres.status == LpStatus::Infeasible) continue;

      std::vector<double> lp_z;
      if (lpres.status == LpStatus::Optimal) {
        lp_z = lpres.x;
        double lb = lpres.value - 1e-9 * (1.0 + std::fabs(lpres.value));
        node.lb = std::max(node.lb, lb);
        if (node.lb >= ub - target) {
          fathom_lb = std::min(fathom_lb, node.lb);
          continue;
        }
      }

      consider(lift_point(node_center(node)));
      if (!lp_z.empty())
        consider(lift_point(std::span<const double>(lp_z.data(), static_cast<size_t>(red_.num_vars))));
      if (node.id == 0) {
        for (const auto& h : hints_)
          if (static_cast<int>(h.size()) == program_.num_vars) {
            std::vector<double> x = h;
            consider(std::move(x));
          }
        corner_candidates(node, consider);
      }

      int bv = pick_branch_var(node, lp_z);
      if (bv < 0) {
        fathom_lb = std::min(fathom_lb, node.lb);
        continue;
      }
      double mid = 0.5 * (node.lo[static_cast<size_t>(bv)] + node.hi[static_cast<size_t>(bv)]);
      Node left{node.lo, node.hi, node.lb, next_id++};
      left.hi[static_cast<size_t>(bv)] = mid;
      Node right{node.lo, node.hi, node.lb, next_id++};
      right.lo[static_cast<size_t>(bv)] = mid;
      queue.push(std::move(left));
      queue.push(std::move(right));
    }

    if (best.empty()) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    out.status = SolveStatus::GlobalOpt;
    out.point = best;
    double internal_value = internal_objective().eval(best);
    out.gap = std::max(0.0, internal_value - std::min(fathom_lb, internal_value)) +
              red_.obj_drop;
    out.value = program_.sense == Sense::Maximize ? -internal_value : internal_value;
    return out;
  }

  // Original-space objective in minimize form.
  const Polynomial& internal_objective() const {
    if (!internal_obj_ready_) {
      internal_obj_ = program_.objective;
      if (program_.sense == Sense::Maximize) internal_obj_ *= -1.0;
      internal_obj_ready_ = true;
    }
    return internal_obj_;
  }

  void corner_candidates(const Node& node, auto&& consider) const {
    int bits = std::min(red_.num_vars, 4);
    for (int mask = 0; mask < (1 << bits); ++mask) {
      std::vector<double> z = node_center(node);
      for (int j = 0; j < bits; ++j)
        z[static_cast<size_t>(j)] =
            (mask >> j) & 1 ? node.hi[static_cast<size_t>(j)] : node.lo[static_cast<size_t>(j)];
      consider(lift_point(z));
    }
  }

  // Project an original-space hint into reduced coordinates (reduced
  // variables are a subset of the original ones).
  std::vector<double> reduce_hint(const std::vector<double>& x) const {
    std::vector<double> z(static_cast<size_t>(red_.num_vars), 0.0);
    for (int r = 0; r < red_.num_vars; ++r)
      z[static_cast<size_t>(r)] = x[static_cast<size_t>(red_.free_vars[static_cast<size_t>(r)])];
    return z;
  }

  const PolynomialProgram& program_;
  SolverOptions opts_;
  std::span<const std::vector<double>> hints_;
  double gap_target_;
  double accept_tol_;
  Refiner refiner_;

  ReducedProgram red_;
  MonomialTable table_;
  std::vector<LinearizedPoly> eq_rows_, ineq_rows_;
  LinearizedPoly obj_row_;
  int num_aux_ = 0;
  int lp_cols_ = 0;
  bool minimize_ = false;
  mutable Polynomial internal_obj_;
  mutable bool internal_obj_ready_ = false;
};

}  // namespace

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Feasible: return "FEASIBLE";
    case SolveStatus::GlobalOpt: return "GLOBAL_OPT";
    case SolveStatus::BudgetExceeded: return "BUDGET_EXCEEDED";
  }
  return "UNKNOWN";
}

void PolynomialProgram::validate() const {
  if (num_vars < 0) throw Error(ErrorCode::InvalidConfig, "negative num_vars");
  if (static_cast<int>(lower.size()) != num_vars ||
      static_cast<int>(upper.size()) != num_vars)
    throw Error(ErrorCode::InvalidConfig, "bounds size mismatch");
  for (int j = 0; j < num_vars; ++j) {
    if (!(lower[static_cast<size_t>(j)] <= upper[static_cast<size_t>(j)] + 1e-12))
      throw Error(ErrorCode::InvalidConfig, "lower > upper");
    if (lower[static_cast<size_t>(j)] < -1e-9 || upper[static_cast<size_t>(j)] > 1.0 + 1e-9)
      throw Error(ErrorCode::InvalidConfig, "bounds must lie in [0,1]");
  }
  for (const auto& eq : linear_eqs)
    if (static_cast<int>(eq.coeffs.size()) != num_vars)
      throw Error(ErrorCode::InvalidConfig, "linear row size mismatch");
  if (sense != Sense::Feasibility && objective.degree() > 2)
    throw Error(ErrorCode::InvalidConfig, "objective degree > 2");
}

double max_constraint_violation(const PolynomialProgram& program,
                                std::span<const double> point) {
  double worst = 0.0;
  for (int j = 0; j < program.num_vars; ++j) {
    worst = std::max(worst, program.lower[static_cast<size_t>(j)] - point[j]);
    worst = std::max(worst, point[j] - program.upper[static_cast<size_t>(j)]);
  }
  for (const auto& eq : program.linear_eqs) {
    double v = -eq.rhs;
    for (int j = 0; j < program.num_vars; ++j) v += eq.coeffs[static_cast<size_t>(j)] * point[j];
    worst = std::max(worst, std::fabs(v));
  }
  for (const auto& eq : program.poly_eqs)
    worst = std::max(worst, std::fabs(eq.eval(point)));
  for (const auto& q : program.poly_ineqs)
    worst = std::max(worst, q.eval(point));
  return worst;
}

SolveOutcome GlobalSolver::solve_feasibility(const PolynomialProgram& program) const {
  if (program.sense != Sense::Feasibility)
    throw Error(ErrorCode::InvalidConfig, "feasibility program has an objective");
  BranchAndBound bb(program, options_, {}, options_.opt_gap);
  return bb.run();
}

SolveOutcome GlobalSolver::optimize_global(
    const PolynomialProgram& program,
    std::span<const std::vector<double>> hints) const {
  return optimize_global_gap(program, options_.opt_gap, hints);
}

SolveOutcome GlobalSolver::optimize_global_gap(
    const PolynomialProgram& program, double gap_target,
    std::span<const std::vector<double>> hints) const {
  if (program.sense == Sense::Feasibility)
    throw Error(ErrorCode::InvalidConfig, "optimization program lacks a sense");
  BranchAndBound bb(program, options_, hints, gap_target);
  return bb.run();
}

}  // namespace ess
