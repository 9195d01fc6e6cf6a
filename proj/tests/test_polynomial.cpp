#include <doctest.h>

#include <vector>

#include "ess/polynomial.hpp"

using namespace ess;

TEST_CASE("polynomial evaluation and degree") {
  Polynomial p(2.0);
  p.add_term(3.0, {0});
  p.add_term(-1.0, {0, 1});
  p.add_term(0.5, {1, 1, 0});
  CHECK(p.degree() == 3);
  std::vector<double> x{2.0, 3.0};
  // 2 + 3*2 - 2*3 + 0.5*2*9 = 2 + 6 - 6 + 9 = 11
  CHECK(p.eval(x) == doctest::Approx(11.0));
}

TEST_CASE("gradient accumulation") {
  Polynomial p;
  p.add_term(1.0, {0, 0});
  p.add_term(2.0, {0, 1});
  std::vector<double> x{3.0, 4.0};
  std::vector<double> grad(2, 0.0);
  p.add_gradient(x, 1.0, grad);
  CHECK(grad[0] == doctest::Approx(2.0 * 3.0 + 2.0 * 4.0));
  CHECK(grad[1] == doctest::Approx(2.0 * 3.0));
}

TEST_CASE("canonicalize merges duplicates and drops dust") {
  Polynomial p;
  p.add_term(1.0, {1, 0});
  p.add_term(2.0, {0, 1});
  p.add_term(1e-20, {0});
  double dropped = p.canonicalize(1e-13);
  CHECK(p.terms().size() == 1);
  CHECK(p.terms()[0].coeff == doctest::Approx(3.0));
  CHECK(dropped == doctest::Approx(1e-20));
}

TEST_CASE("affine substitution preserves values") {
  // q(x0, x1) = x0^2 + x0 x1; substitute x1 = 1 - x0 (target space: z0)
  Polynomial q;
  q.add_term(1.0, {0, 0});
  q.add_term(1.0, {0, 1});

  std::vector<Polynomial> subs(2);
  subs[0].add_term(1.0, {0});
  subs[1] = Polynomial(1.0);
  subs[1].add_term(-1.0, {0});

  Polynomial r = q.substitute(subs);
  for (double z : {0.0, 0.3, 0.7, 1.0}) {
    std::vector<double> zs{z};
    std::vector<double> xs{z, 1.0 - z};
    CHECK(r.eval(zs) == doctest::Approx(q.eval(xs)).epsilon(1e-14));
  }
  // x0^2 + x0(1-x0) = x0: result should be exactly linear
  CHECK(r.degree() == 1);
}

TEST_CASE("substitution cancels simplex-flat expressions to zero") {
  // f = y0 - y0^2 - y0 y1 vanishes on y0 + y1 = 1
  Polynomial f;
  f.add_term(1.0, {0});
  f.add_term(-1.0, {0, 0});
  f.add_term(-1.0, {0, 1});
  std::vector<Polynomial> subs(2);
  subs[0].add_term(1.0, {0});
  subs[1] = Polynomial(1.0);
  subs[1].add_term(-1.0, {0});
  Polynomial r = f.substitute(subs);
  CHECK(r.is_constant());
  CHECK(r.constant() == 0.0);
}
