#include "ess/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ess {

void Polynomial::add_term(double coeff, std::vector<int> vars) {
  if (vars.empty()) {
    constant_ += coeff;
    return;
  }
  std::sort(vars.begin(), vars.end());
  terms_.push_back(Term{coeff, std::move(vars)});
}

int Polynomial::degree() const {
  size_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.vars.size());
  return static_cast<int>(d);
}

double Polynomial::max_abs_coeff() const {
  double m = std::fabs(constant_);
  for (const auto& t : terms_) m = std::max(m, std::fabs(t.coeff));
  return m;
}

double Polynomial::eval(std::span<const double> x) const {
  double total = constant_;
  for (const auto& t : terms_) {
    double prod = t.coeff;
    for (int v : t.vars) prod *= x[static_cast<size_t>(v)];
    total += prod;
  }
  return total;
}

void Polynomial::add_gradient(std::span<const double> x, double weight,
                              std::span<double> grad) const {
  for (const auto& t : terms_) {
    for (size_t pos = 0; pos < t.vars.size(); ++pos) {
      double prod = t.coeff;
      for (size_t q = 0; q < t.vars.size(); ++q) {
        if (q == pos) continue;
        prod *= x[static_cast<size_t>(t.vars[q])];
      }
      grad[static_cast<size_t>(t.vars[pos])] += weight * prod;
    }
  }
}

double Polynomial::canonicalize(double rel_tol) {
  std::map<std::vector<int>, double> merged;
  for (auto& t : terms_) merged[t.vars] += t.coeff;

  double scale = std::fabs(constant_);
  for (const auto& [vars, c] : merged) scale = std::max(scale, std::fabs(c));
  double cutoff = rel_tol * scale;

  double dropped = 0.0;
  terms_.clear();
  for (auto& [vars, c] : merged) {
    if (c == 0.0) continue;
    if (std::fabs(c) <= cutoff) {
      dropped += std::fabs(c);
      continue;
    }
    terms_.push_back(Term{c, vars});
  }
  return dropped;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& subs) const {
  Polynomial result(constant_);
  for (const auto& t : terms_) {
    Polynomial prod(t.coeff);
    for (int v : t.vars) prod = prod * subs[static_cast<size_t>(v)];
    result += prod;
  }
  result.canonicalize(0.0);
  return result;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out;
  out.constant_ = constant_ * other.constant_;
  for (const auto& t : other.terms_)
    if (constant_ != 0.0) out.terms_.push_back(Term{constant_ * t.coeff, t.vars});
  for (const auto& t : terms_) {
    if (other.constant_ != 0.0)
      out.terms_.push_back(Term{t.coeff * other.constant_, t.vars});
    for (const auto& u : other.terms_) {
      std::vector<int> vars = t.vars;
      vars.insert(vars.end(), u.vars.begin(), u.vars.end());
      std::sort(vars.begin(), vars.end());
      out.terms_.push_back(Term{t.coeff * u.coeff, std::move(vars)});
    }
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  constant_ *= s;
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  os << constant_;
  for (const auto& t : terms_) {
    os << (t.coeff >= 0 ? " + " : " - ") << std::fabs(t.coeff);
    for (int v : t.vars) os << "*x" << v;
  }
  return os.str();
}

}  // namespace ess
