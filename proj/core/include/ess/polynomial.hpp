#ifndef ESS_POLYNOMIAL_HPP
#define ESS_POLYNOMIAL_HPP

#include <span>
#include <string>
#include <vector>

namespace ess {

/// coeff * product of variables (indices sorted, repetition = power).
struct Term {
  double coeff = 0.0;
  std::vector<int> vars;
};

/// Sparse multivariate polynomial: constant + sum of monomial terms.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(double constant) : constant_(constant) {}

  void add_constant(double c) { constant_ += c; }
  void add_term(double coeff, std::vector<int> vars);

  double constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  int degree() const;
  double max_abs_coeff() const;

  double eval(std::span<const double> x) const;
  void add_gradient(std::span<const double> x, double weight,
                    std::span<double> grad) const;

  /// Merges duplicate monomials and drops terms with |coeff| below
  /// rel_tol * (largest |coeff|). Returns the total absolute mass
  /// dropped, which bounds the induced error on [0,1]-boxed variables.
  double canonicalize(double rel_tol = 0.0);

  /// Composes with an affine substitution x_i -> subs[i] (an affine
  /// polynomial); used to eliminate variables pinned by linear
  /// equalities. Variable indices in the result refer to the
  /// substitution's target space.
  Polynomial substitute(const std::vector<Polynomial>& subs) const;

  Polynomial operator*(const Polynomial& other) const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double s);

  std::string to_string() const;

 private:
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace ess

#endif  // ESS_POLYNOMIAL_HPP
