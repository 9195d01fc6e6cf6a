#include <doctest.h>

#include <cmath>
#include <random>

#include "ess/solver.hpp"

using namespace ess;

namespace {

PolynomialProgram simplex_program(int n) {
  PolynomialProgram p;
  p.num_vars = n;
  p.lower.assign(static_cast<size_t>(n), 0.0);
  p.upper.assign(static_cast<size_t>(n), 1.0);
  LinearConstraint sum;
  sum.coeffs.assign(static_cast<size_t>(n), 1.0);
  sum.rhs = 1.0;
  p.linear_eqs.push_back(sum);
  return p;
}

Polynomial random_quadratic(int n, std::mt19937_64& rng) {
  auto coef = [&rng] {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  Polynomial q(coef());
  for (int i = 0; i < n; ++i) q.add_term(coef(), {i});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) q.add_term(coef(), {i, j});
  return q;
}

// exhaustive simplex-grid minimum with step 1/r
double grid_min(const Polynomial& objective, int n, int r) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  auto recurse = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      y[static_cast<size_t>(pos)] = static_cast<double>(remaining) / r;
      best = std::min(best, objective.eval(y));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      y[static_cast<size_t>(pos)] = static_cast<double>(v) / r;
      self(self, pos + 1, remaining - v);
    }
  };
  recurse(recurse, 0, r);
  return best;
}

}  // namespace

TEST_CASE("feasibility: simplex interior with eps_s floors") {
  PolynomialProgram p = simplex_program(2);
  p.lower.assign(2, 1e-4);
  GlobalSolver solver;
  SolveOutcome out = solver.solve_feasibility(p);
  CHECK(out.status == SolveStatus::Feasible);
  CHECK(max_constraint_violation(p, out.point) <= 1e-6);
}

TEST_CASE("feasibility: floors exceeding unit mass are infeasible") {
  PolynomialProgram p = simplex_program(2);
  p.lower.assign(2, 0.6);
  GlobalSolver solver;
  CHECK(solver.solve_feasibility(p).status == SolveStatus::Infeasible);
}

TEST_CASE("feasibility: quadratic equality root is found") {
  PolynomialProgram p;
  p.num_vars = 1;
  p.lower = {0.0};
  p.upper = {1.0};
  Polynomial eq(-0.25);  // x^2 - 0.25 = 0
  eq.add_term(1.0, {0, 0});
  p.poly_eqs.push_back(eq);
  GlobalSolver solver;
  SolveOutcome out = solver.solve_feasibility(p);
  REQUIRE(out.status == SolveStatus::Feasible);
  CHECK(out.point[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("feasibility: unsatisfiable quadratic equality is certified") {
  PolynomialProgram p;
  p.num_vars = 1;
  p.lower = {0.0};
  p.upper = {1.0};
  Polynomial eq(0.5);  // x^2 + 0.5 = 0
  eq.add_term(1.0, {0, 0});
  p.poly_eqs.push_back(eq);
  GlobalSolver solver;
  CHECK(solver.solve_feasibility(p).status == SolveStatus::Infeasible);
}

TEST_CASE("feasibility: near-miss equalities below the acceptance floor stay infeasible") {
  // x^2 = 0 with x >= 1e-4: residual at the bound is 2e-8, well under
  // feas_tol, but no exact root exists in the box
  PolynomialProgram p;
  p.num_vars = 1;
  p.lower = {1e-4};
  p.upper = {1.0};
  Polynomial eq;
  eq.add_term(2.0, {0, 0});
  p.poly_eqs.push_back(eq);
  GlobalSolver solver;
  CHECK(solver.solve_feasibility(p).status == SolveStatus::Infeasible);
}

TEST_CASE("optimize: linear objective over the simplex") {
  PolynomialProgram p = simplex_program(3);
  p.objective.add_term(1.0, {0});
  p.sense = Sense::Minimize;
  GlobalSolver solver;
  SolveOutcome out = solver.optimize_global(p);
  REQUIRE(out.status == SolveStatus::GlobalOpt);
  CHECK(out.value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out.gap <= 1e-7);
}

TEST_CASE("optimize: concave quadratic attains its minimum at a vertex") {
  PolynomialProgram p = simplex_program(2);
  p.objective.add_term(-1.0, {0, 0});
  p.objective.add_term(-1.0, {1, 1});
  p.sense = Sense::Minimize;
  GlobalSolver solver;
  SolveOutcome out = solver.optimize_global(p);
  REQUIRE(out.status == SolveStatus::GlobalOpt);
  CHECK(out.value == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(out.gap <= 1e-7);
  CHECK(max_constraint_violation(p, out.point) <= 1e-6);
}

TEST_CASE("optimize: maximization reports values in problem sense") {
  PolynomialProgram p = simplex_program(2);
  p.objective.add_term(1.0, {0});
  p.sense = Sense::Maximize;
  GlobalSolver solver;
  SolveOutcome out = solver.optimize_global(p);
  REQUIRE(out.status == SolveStatus::GlobalOpt);
  CHECK(out.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimize: degree-3 monomial relaxation") {
  PolynomialProgram p;
  p.num_vars = 3;
  p.lower.assign(3, 0.0);
  p.upper.assign(3, 1.0);
  p.objective.add_term(1.0, {0, 1, 2});
  p.sense = Sense::Maximize;
  GlobalSolver solver;
  SolveOutcome out = solver.optimize_global(p);
  REQUIRE(out.status == SolveStatus::GlobalOpt);
  CHECK(out.value == doctest::Approx(1.0).epsilon(1e-7));

  p.sense = Sense::Minimize;
  out = solver.optimize_global(p);
  REQUIRE(out.status == SolveStatus::GlobalOpt);
  CHECK(out.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("feasibility: cubic equality is reachable") {
  PolynomialProgram p;
  p.num_vars = 3;
  p.lower.assign(3, 0.0);
  p.upper.assign(3, 1.0);
  Polynomial eq(-0.125);
  eq.add_term(1.0, {0, 1, 2});
  p.poly_eqs.push_back(eq);
  GlobalSolver solver;
  SolveOutcome out = solver.solve_feasibility(p);
  REQUIRE(out.status == SolveStatus::Feasible);
  CHECK(std::fabs(out.point[0] * out.point[1] * out.point[2] - 0.125) <= 1e-7);
}

TEST_CASE("optimize agrees with exhaustive grid search on random quadratics") {
  std::mt19937_64 rng(2024);
  GlobalSolver solver;
  for (int trial = 0; trial < 20; ++trial) {
    PolynomialProgram p = simplex_program(3);
    p.objective = random_quadratic(3, rng);
    p.sense = Sense::Minimize;
    SolveOutcome out = solver.optimize_global(p);
    REQUIRE(out.status == SolveStatus::GlobalOpt);
    double gmin = grid_min(p.objective, 3, 200);
    CHECK(out.value <= gmin + 1e-6);
    CHECK(out.value >= gmin - 1e-3);
  }
}

TEST_CASE("adding a constraint never decreases the certified minimum") {
  std::mt19937_64 rng(77);
  GlobalSolver solver;
  for (int trial = 0; trial < 10; ++trial) {
    PolynomialProgram p = simplex_program(3);
    p.objective = random_quadratic(3, rng);
    p.sense = Sense::Minimize;
    SolveOutcome base = solver.optimize_global(p);
    REQUIRE(base.status == SolveStatus::GlobalOpt);

    PolynomialProgram q = p;
    Polynomial cut(-0.8);  // y0 + 2 y1 <= 0.8
    cut.add_term(1.0, {0});
    cut.add_term(2.0, {1});
    q.poly_ineqs.push_back(cut);
    SolveOutcome constrained = solver.optimize_global(q);
    if (constrained.status == SolveStatus::GlobalOpt)
      CHECK(constrained.value >= base.value - 2e-7);
  }
}

TEST_CASE("identical programs give identical outcomes") {
  std::mt19937_64 rng(5);
  PolynomialProgram p = simplex_program(3);
  p.objective = random_quadratic(3, rng);
  p.sense = Sense::Minimize;
  GlobalSolver solver;
  SolveOutcome a = solver.optimize_global(p);
  SolveOutcome b = solver.optimize_global(p);
  CHECK(a.status == b.status);
  CHECK(a.value == b.value);
  CHECK(a.gap == b.gap);
  CHECK(a.nodes == b.nodes);
  CHECK(a.point == b.point);
}

TEST_CASE("exhausted node budget is reported, never INFEASIBLE") {
  SolverOptions opts;
  opts.node_budget = 1;
  GlobalSolver solver(opts);
  PolynomialProgram p = simplex_program(3);
  // an equality the first node cannot resolve
  Polynomial eq(-0.09);
  eq.add_term(1.0, {0, 0});
  eq.add_term(-1.0, {1, 2});
  p.poly_eqs.push_back(eq);
  SolveOutcome out = solver.solve_feasibility(p);
  // either the first node already finds a feasible point, or the budget
  // trips; an INFEASIBLE claim would be wrong
  CHECK(out.status != SolveStatus::Infeasible);
}

TEST_CASE("returned points are re-validated against the original program") {
  PolynomialProgram p = simplex_program(4);
  p.lower.assign(4, 1e-4);
  Polynomial eq;  // y0^2 = y1 y2
  eq.add_term(1.0, {0, 0});
  eq.add_term(-1.0, {1, 2});
  p.poly_eqs.push_back(eq);
  GlobalSolver solver;
  SolveOutcome out = solver.solve_feasibility(p);
  REQUIRE(out.status == SolveStatus::Feasible);
  CHECK(max_constraint_violation(p, out.point) <= 1e-9);
}
