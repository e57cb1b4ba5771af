#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "ppl/grid.hpp"

namespace ppl {

// Lambda_infinity(alpha): sequences with sum |x_m| e^{k alpha_m} < inf.
struct PowerSeriesSpace {
  std::function<double(std::size_t)> alpha;
};

double ps_norm(const std::vector<cplx>& x, double k, const PowerSeriesSpace& space);
// e^{(l - k) alpha_m}; throws BadOrder unless k > l.
double diam_power_series(const PowerSeriesSpace& space, double k, double l, std::size_t m);

// Multidegrees of total degree <= degree in graded-lexicographic order.
std::vector<std::vector<int>> monomial_basis(int n, int degree);
std::size_t monomial_count(int n, int degree);
// alpha_m = total degree of the m-th monomial of C^n in graded order.
std::vector<double> graded_degrees(int n, std::size_t count);

using GramMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

// D_t = {phi < level}, a bounded sublevel set of C^n containing the origin.
struct SublevelSet {
  PointFunction phi;
  int n = 1;
  double level = 0;
};

enum class Symmetry { Auto, Circular, None };

struct GramQuadrature {
  int angular = 0;  // trapezoid nodes per angle; 0: doubled from max(8, 2 degree + 8) until entries settle to 1e-11
  int radial = 0;   // Gauss-Legendre nodes per radius; 0: degree + 4
  Symmetry symmetry = Symmetry::Auto;  // Auto spot-checks invariance under z_j -> e^{i a_j} z_j
  double reach = 1e6;
};

// Entries int_{D_t} z^beta conj(z)^gamma dV over the monomial basis, in
// extended precision. Circular domains use the exact angular integrals, so
// off-diagonal entries vanish; otherwise iterated polar quadrature about the
// origin (rays must cross the boundary once). Throws IllConditioned when the
// matrix is not positive definite at working precision, QuadratureUnstable
// when the default angular refinement does not settle.
GramMatrix gram_matrix(const SublevelSet& domain, int degree, const GramQuadrature& q = {});

struct GramPair {
  GramMatrix small;  // Gram of D_l
  GramMatrix large;  // Gram of D_k
  int degree = 0;
  int n = 1;
  double l = 0, k = 0;
};

GramPair gram_pair(const PointFunction& phi, int n, double l, double k, int degree, const GramQuadrature& q = {});

struct DiameterReport {
  std::vector<double> d;  // d_m(U_k, U_l), m = 0..m_max
  int degree = 0;
  std::size_t m_valid = 0;  // d_0..d_{m_valid} drift <= 1% against degree - 2
  int n = 1;
  double l = 0, k = 0;
};

// d_m = sqrt(mu_{m+1}) for the pencil G_small v = mu G_large v, from the
// singular values of L_large^{-1} L_small (Cholesky factors).
DiameterReport kolmogorov_diameters(const GramPair& p, std::size_t m_max);

struct Window {
  std::size_t lo = 0, hi = 0;  // inclusive
};

struct NpzResult {
  double slope = 0;
  double target = 0;  // 2 pi (n!)^{1/n} / C^{1/n}
  double relative_gap = 0;
  double rms = 0;
  std::size_t points = 0;
  bool low_confidence = false;  // fewer than three points
};

// Least squares of -ln d_m against m^{1/n} over the window. Throws
// WindowOutsideValidity.
NpzResult npz_check(const DiameterReport& r, double capacity, int n, Window w);

struct AlphaOptions {
  double h = 0.1;
  double cut = 0;      // smoothed representative softmax(phi, cut, eta)
  double eta = 0.5;
  std::vector<double> test_levels;  // balls {phi < level}; empty: cut + eta + {0.25, 0.5}
  int order = 4;
};

struct AlphaReport {
  double limit = 0;
  double mass = 0;                  // on the largest test ball
  std::vector<double> ball_masses;  // per test level
};

// 2 pi (n!)^{1/n} (total Monge-Ampere mass)^{-1/n}. Throws
// MassNotConcentrated when the two largest balls differ by more than 1%.
AlphaReport alpha_limit(const PointFunction& phi, int n, const AlphaOptions& opt = {});

struct LeveledGram {
  double level = 0;
  GramMatrix gram;
};

struct OmegaResult {
  double max_ratio = 0;
  std::vector<double> ratios;
};

// sqrt(xi^H G^{-1} xi) at s2 over the interpolated dual norms at s0 and s,
// with exponents (s - s1)/(s - s0) and (s1 - s0)/(s - s0). Throws BadOrder
// unless s0 < s1 < s2 < s. Only the level of the s1 Gram enters.
OmegaResult omega_dual_check(const std::array<LeveledGram, 4>& grams,
                             const std::vector<std::vector<cplx>>& functionals);

double dual_norm(const GramMatrix& g, const std::vector<cplx>& xi);

struct TransferResult {
  double forward = 0;               // min C: d_{m+shift}(V_{k+A}, V_{l-A}) <= C d_m(U_k, U_l)
  std::optional<double> reverse;    // min C: d_m(U_{k+A}, U_{l-A}) <= C d_{m+shift}(V_k, V_l)
  std::size_t points = 0;
};

// The levels k, l come from U; shifted_U, when given, must sit at k + A, l - A.
// Throws WindowMismatch for an empty window or one past either spectrum.
TransferResult diameter_transfer_check(const DiameterReport& U, const PowerSeriesSpace& V, double A, Window w,
                                       int index_shift = 0, const DiameterReport* shifted_U = nullptr);

}  // namespace ppl
