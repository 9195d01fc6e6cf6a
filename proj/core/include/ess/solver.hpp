#ifndef ESS_SOLVER_HPP
#define ESS_SOLVER_HPP

#include <span>
#include <vector>

#include "ess/program.hpp"

namespace ess {

/// Certified global solver for small nonconvex polynomial programs over
/// box-bounded simplex-like variable sets.
///
/// Method: linear equalities are eliminated by affine substitution, then
/// spatial branch-and-bound on the remaining box. Lower bounds come from
/// an LP relaxation built from termwise McCormick envelopes of the
/// monomials (degree >= 3 monomials are relaxed recursively through
/// auxiliary chain variables); feasible points and incumbents come from
/// damped Gauss-Newton refinement plus projected descent, always
/// verified against the original constraints by direct re-evaluation.
///
/// Branching bisects the variable with the largest relaxation error at
/// the relaxation optimum (ties -> lowest index), which makes every
/// solve deterministic.
class GlobalSolver {
 public:
  explicit GlobalSolver(SolverOptions options = SolverOptions{})
      : options_(options) {}

  const SolverOptions& options() const { return options_; }

  /// Decides feasibility of a program without objective. FEASIBLE points
  /// satisfy every constraint within feas_tol; INFEASIBLE certifies that
  /// no point satisfies all constraints exactly (equalities) with
  /// inequality slack, hence none with margin >= feas_tol.
  SolveOutcome solve_feasibility(const PolynomialProgram& program) const;

  /// Globally minimizes/maximizes a degree <= 2 objective. On success the
  /// certified bound satisfies |value - true optimum| <= gap <= opt_gap.
  /// `hints` are optional starting points (original variable space) for
  /// the incumbent search.
  SolveOutcome optimize_global(
      const PolynomialProgram& program,
      std::span<const std::vector<double>> hints = {}) const;

  /// optimize_global with a custom gap target (used by the degeneracy
  /// test, whose decision threshold sits below the default opt_gap).
  SolveOutcome optimize_global_gap(
      const PolynomialProgram& program, double gap_target,
      std::span<const std::vector<double>> hints = {}) const;

 private:
  SolverOptions options_;
};

/// Largest violation of the program's constraints at a point: |residual|
/// for equalities, positive part for inequalities, box excess for bounds.
double max_constraint_violation(const PolynomialProgram& program,
                                std::span<const double> point);

}  // namespace ess

#endif  // ESS_SOLVER_HPP
