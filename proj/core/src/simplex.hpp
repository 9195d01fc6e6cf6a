#ifndef ESS_SRC_SIMPLEX_HPP
#define ESS_SRC_SIMPLEX_HPP

#include <vector>

namespace ess::detail {

struct LpRow {
  std::vector<double> coeffs;  // dense over LP variables
  double rhs = 0.0;
};

/// min objective . v  s.t.  eqs: a.v == rhs, ineqs: a.v <= rhs,
/// lower <= v <= upper (all bounds finite).
struct LpProblem {
  int num_vars = 0;
  std::vector<double> lower, upper;
  std::vector<LpRow> eqs;
  std::vector<LpRow> ineqs;
  std::vector<double> objective;  // empty = feasibility only
};

enum class LpStatus { Optimal, Infeasible, Stall };

struct LpResult {
  LpStatus status = LpStatus::Stall;
  std::vector<double> x;
  double value = 0.0;
};

/// Dense two-phase primal simplex. Deterministic: Dantzig pricing with
/// fixed tie-breaks, switching to Bland's rule after a stall to
/// guarantee termination. Stall is a "no information" outcome; callers
/// must not prune on it.
LpResult solve_lp(const LpProblem& p);

}  // namespace ess::detail

#endif  // ESS_SRC_SIMPLEX_HPP
