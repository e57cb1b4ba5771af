#include "ppl/holomorphic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "ppl/error.hpp"

namespace ppl {

namespace {

cplx ipow(cplx z, int e) {
  cplx r = 1.0;
  for (int k = 0; k < e; ++k) r *= z;
  return r;
}

std::vector<Monomial> normalize(int nvars, std::vector<Monomial> terms) {
  std::map<std::vector<int>, cplx> acc;
  for (auto& t : terms) {
    if (static_cast<int>(t.exponents.size()) != nvars)
      fail(ErrorCode::DimensionMismatch, "monomial exponent count does not match variable count");
    for (int e : t.exponents)
      if (e < 0) fail(ErrorCode::InvalidArgument, "negative exponent");
    acc[t.exponents] += t.coeff;
  }
  std::vector<Monomial> out;
  for (auto& [e, c] : acc)
    if (c != cplx(0, 0)) out.push_back({c, e});
  return out;
}

}  // namespace

Polynomial::Polynomial(int nvars, std::vector<Monomial> terms) : nvars_(nvars), terms_(normalize(nvars, std::move(terms))) {}

Polynomial Polynomial::constant(int nvars, cplx c) { return Polynomial(nvars, {{c, std::vector<int>(nvars, 0)}}); }

Polynomial Polynomial::variable(int nvars, int j, cplx coeff) {
  std::vector<int> e(nvars, 0);
  e[j] = 1;
  return Polynomial(nvars, {{coeff, e}});
}

Polynomial Polynomial::univariate(const std::vector<cplx>& coeffs) {
  std::vector<Monomial> t;
  for (std::size_t k = 0; k < coeffs.size(); ++k) t.push_back({coeffs[k], {static_cast<int>(k)}});
  return Polynomial(1, t);
}

int Polynomial::degree() const {
  int d = -1;
  for (auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

cplx Polynomial::operator()(std::span<const cplx> z) const {
  cplx acc = 0;
  for (auto& t : terms_) {
    cplx m = t.coeff;
    for (int j = 0; j < nvars_; ++j) m *= ipow(z[j], t.exponents[j]);
    acc += m;
  }
  return acc;
}

cplx Polynomial::derivative(std::span<const cplx> z, int j) const {
  cplx acc = 0;
  for (auto& t : terms_) {
    if (t.exponents[j] == 0) continue;
    cplx m = t.coeff * static_cast<double>(t.exponents[j]);
    for (int i = 0; i < nvars_; ++i) m *= ipow(z[i], i == j ? t.exponents[i] - 1 : t.exponents[i]);
    acc += m;
  }
  return acc;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.nvars_ != nvars_) fail(ErrorCode::DimensionMismatch, "adding polynomials in different variables");
  auto t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return Polynomial(nvars_, t);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.nvars_ != nvars_) fail(ErrorCode::DimensionMismatch, "multiplying polynomials in different variables");
  std::vector<Monomial> t;
  for (auto& a : terms_)
    for (auto& b : o.terms_) {
      std::vector<int> e(nvars_);
      for (int j = 0; j < nvars_; ++j) e[j] = a.exponents[j] + b.exponents[j];
      t.push_back({a.coeff * b.coeff, e});
    }
  return Polynomial(nvars_, t);
}

Polynomial Polynomial::operator*(cplx c) const {
  auto t = terms_;
  for (auto& m : t) m.coeff *= c;
  return Polynomial(nvars_, t);
}

EntireFunction::EntireFunction(Kind kind, Polynomial inner, cplx scale)
    : kind_(kind), inner_(std::move(inner)), scale_(scale) {}

cplx EntireFunction::operator()(std::span<const cplx> z) const {
  cplx w = inner_(z);
  switch (kind_) {
    case Kind::Polynomial: return scale_ * w;
    case Kind::Exp: return scale_ * std::exp(w);
    case Kind::Sin: return scale_ * std::sin(w);
  }
  return 0;
}

cplx EntireFunction::derivative(std::span<const cplx> z, int j) const {
  cplx dw = inner_.derivative(z, j);
  switch (kind_) {
    case Kind::Polynomial: return scale_ * dw;
    case Kind::Exp: return scale_ * std::exp(inner_(z)) * dw;
    case Kind::Sin: return scale_ * std::cos(inner_(z)) * dw;
  }
  return 0;
}

std::string kind_name(EntireFunction::Kind k) {
  switch (k) {
    case EntireFunction::Kind::Polynomial: return "polynomial";
    case EntireFunction::Kind::Exp: return "exp";
    case EntireFunction::Kind::Sin: return "sin";
  }
  return "polynomial";
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs, double tol) {
  int d = static_cast<int>(coeffs.size()) - 1;
  while (d > 0 && coeffs[d] == cplx(0, 0)) --d;
  if (d <= 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -coeffs[i] / coeffs[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> roots;
  for (int i = 0; i < d; ++i) {
    cplx z = es.eigenvalues()[i];
    for (int it = 0; it < 50; ++it) {
      cplx p = 0, dp = 0;
      for (int k = d; k >= 0; --k) {
        dp = dp * z + p;
        p = p * z + coeffs[k];
      }
      if (std::abs(dp) == 0) break;
      cplx step = p / dp;
      z -= step;
      if (std::abs(step) < tol * std::max(1.0, std::abs(z))) break;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace ppl
