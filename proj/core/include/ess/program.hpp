#ifndef ESS_PROGRAM_HPP
#define ESS_PROGRAM_HPP

#include <vector>

#include "ess/polynomial.hpp"

namespace ess {

/// coeffs . x = rhs
struct LinearConstraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

enum class Sense { Feasibility, Minimize, Maximize };

/// Nonconvex polynomial program over box-bounded variables in [0,1]:
/// linear equalities (including any simplex normalization), polynomial
/// equalities (== 0) and inequalities (<= 0), and an optional polynomial
/// objective of degree <= 2.
struct PolynomialProgram {
  int num_vars = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearConstraint> linear_eqs;
  std::vector<Polynomial> poly_eqs;
  std::vector<Polynomial> poly_ineqs;
  Polynomial objective;
  Sense sense = Sense::Feasibility;

  void validate() const;  // throws Error(InvalidConfig) on malformed input
};

enum class SolveStatus { Infeasible, Feasible, GlobalOpt, BudgetExceeded };

const char* solve_status_name(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> point;  // empty iff Infeasible/BudgetExceeded
  double value = 0.0;         // objective at point (optimization mode)
  double gap = 0.0;           // certified |value - true optimum| bound
  long nodes = 0;
};

struct SolverOptions {
  double feas_tol = 1e-6;
  double opt_gap = 1e-7;
  long node_budget = 1'000'000;
};

}  // namespace ess

#endif  // ESS_PROGRAM_HPP
