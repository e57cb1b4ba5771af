#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace ppl {

using cplx = std::complex<double>;

struct Monomial {
  cplx coeff;
  std::vector<int> exponents;
};

// Polynomial in a fixed number of complex variables.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int nvars, std::vector<Monomial> terms);

  static Polynomial constant(int nvars, cplx c);
  static Polynomial variable(int nvars, int j, cplx coeff = 1.0);
  // Univariate polynomial from coefficients c[0] + c[1] z + ...
  static Polynomial univariate(const std::vector<cplx>& coeffs);

  int nvars() const { return nvars_; }
  int degree() const;
  const std::vector<Monomial>& terms() const { return terms_; }

  cplx operator()(std::span<const cplx> z) const;
  cplx derivative(std::span<const cplx> z, int j) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx c) const;

 private:
  int nvars_ = 0;
  std::vector<Monomial> terms_;
};

// scale * g(inner(z)) with g one of identity, exp, sin: the catalog of entire
// functions accepted by scenarios.
class EntireFunction {
 public:
  enum class Kind { Polynomial, Exp, Sin };

  EntireFunction() = default;
  EntireFunction(Kind kind, Polynomial inner, cplx scale = 1.0);
  static EntireFunction polynomial(Polynomial p) { return {Kind::Polynomial, std::move(p)}; }
  static EntireFunction exp_of(Polynomial p, cplx scale = 1.0) { return {Kind::Exp, std::move(p), scale}; }
  static EntireFunction sin_of(Polynomial p, cplx scale = 1.0) { return {Kind::Sin, std::move(p), scale}; }

  Kind kind() const { return kind_; }
  const Polynomial& inner() const { return inner_; }
  cplx scale() const { return scale_; }
  int nvars() const { return inner_.nvars(); }
  bool is_constant() const { return inner_.degree() <= 0; }

  cplx operator()(std::span<const cplx> z) const;
  cplx derivative(std::span<const cplx> z, int j) const;

 private:
  Kind kind_ = Kind::Polynomial;
  Polynomial inner_;
  cplx scale_ = 1.0;
};

std::string kind_name(EntireFunction::Kind k);

// All roots of a monic-normalizable univariate polynomial c[0] + ... + c[d] z^d
// (companion matrix eigenvalues polished by Newton's method).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs, double tol = 1e-10);

}  // namespace ppl
