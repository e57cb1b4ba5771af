#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gen.hpp"
#include "ppl/error.hpp"
#include "ppl/spectra.hpp"

using namespace ppl;

namespace {
constexpr double kPi = std::numbers::pi;

double log_abs(std::span<const cplx> z) { return std::log(std::abs(z[0])); }
double log_norm(std::span<const cplx> z) { return 0.5 * std::log(std::norm(z[0]) + std::norm(z[1])); }
double log_max(std::span<const cplx> z) { return std::log(std::max(std::abs(z[0]), std::abs(z[1]))); }
// ellipse x^2/4 + y^2 < e^{2t}
double log_ellipse(std::span<const cplx> z) {
  return 0.5 * std::log(z[0].real() * z[0].real() / 4 + z[0].imag() * z[0].imag());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

// Gauss-Legendre nodes on [-1, 1] by Newton on the Legendre recurrence.
void legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = t;
    w[i] = 2 / ((1 - t * t) * dp * dp);
  }
}

// int over {x^2/4 + y^2 < 1} of z^a conj(z)^b with x = 2 sin(th), y = cos(th) s.
cplx ellipse_moment(int a, int b) {
  std::vector<double> xs, ws;
  legendre(64, xs, ws);
  cplx sum = 0;
  for (int i = 0; i < 64; ++i) {
    double th = 0.5 * kPi * xs[i];
    double x = 2 * std::sin(th), c = std::cos(th);
    for (int j = 0; j < 64; ++j) {
      cplx z(x, c * xs[j]);
      sum += 0.5 * kPi * ws[i] * ws[j] * 2 * c * c * std::pow(z, a) * std::pow(std::conj(z), b);
    }
  }
  return sum;
}

// sqrt(pi) e^{t(j+1)} / sqrt(j+1): the L2 norm of z^j on |z| < e^t.
double disk_norm(double t, int j) { return std::sqrt(kPi / (j + 1)) * std::exp(t * (j + 1)); }

}  // namespace

TEST_CASE("power series norms and diameters") {
  PowerSeriesSpace lin{[](std::size_t m) { return static_cast<double>(m); }};
  PowerSeriesSpace root{[](std::size_t m) { return std::sqrt(static_cast<double>(m)); }};
  CHECK(ps_norm({0, 0, 0, 1}, 2, lin) == doctest::Approx(std::exp(6.0)).epsilon(1e-12));
  CHECK(ps_norm({}, 2, lin) == 0);
  CHECK(ps_norm({1, 1}, 1, root) == doctest::Approx(1 + std::exp(1.0)).epsilon(1e-12));
  CHECK(diam_power_series(lin, 2, 0, 3) == doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
  CHECK(diam_power_series(lin, 5, -3, 0) == 1);
  CHECK(diam_power_series(root, 1, 0, 4) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(code_of([&] { diam_power_series(lin, 1, 1, 2); }) == ErrorCode::BadOrder);
}

TEST_CASE("graded monomial basis") {
  auto b = monomial_basis(2, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == std::vector<int>{0, 0});
  CHECK(b[1] == std::vector<int>{1, 0});
  CHECK(b[2] == std::vector<int>{0, 1});
  CHECK(b[3] == std::vector<int>{2, 0});
  CHECK(monomial_count(2, 10) == 66);
  CHECK(monomial_count(1, 10) == 11);
  auto a = graded_degrees(2, 2001);
  // (d+1)(d+2)/2 monomials of degree <= d
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= 2000) ++d;
  CHECK(a[2000] == d);
  double r = a[2000] / std::sqrt(2000.0);
  CHECK(r >= 1.37);
  CHECK(r <= 1.46);
}

TEST_CASE("disk Gram matrices") {
  auto g = gram_matrix({log_abs, 1, 0}, 1);
  REQUIRE(g.rows() == 2);
  CHECK(std::abs(static_cast<double>(g(0, 0).real()) - kPi) < 1e-6);
  CHECK(std::abs(static_cast<double>(g(1, 1).real()) - kPi / 2) < 1e-6);
  CHECK(std::abs(g(0, 1)) < 1e-6);

  const double t = 0.7;
  auto gt = gram_matrix({log_abs, 1, t}, 6);
  for (int j = 0; j <= 6; ++j) {
    double want = kPi * std::exp(2 * t * (j + 1)) / (j + 1);
    CHECK(static_cast<double>(gt(j, j).real()) == doctest::Approx(want).epsilon(1e-9));
  }

  // general path on the same disk
  GramQuadrature none;
  none.symmetry = Symmetry::None;
  auto gn = gram_matrix({log_abs, 1, t}, 6, none);
  for (int r = 0; r <= 6; ++r)
    for (int c = 0; c <= 6; ++c) {
      double scale = std::sqrt(std::abs(gt(r, r)) * std::abs(gt(c, c)));
      CHECK(std::abs(gn(r, c) - gt(r, c)) / scale < 1e-8);
    }

  auto vol = gram_matrix({log_ellipse, 1, 0}, 0);
  CHECK(static_cast<double>(vol(0, 0).real()) == doctest::Approx(2 * kPi).epsilon(1e-8));
}

TEST_CASE("non-circular Gram against a tensor oracle") {
  auto g = gram_matrix({log_ellipse, 1, 0}, 5);
  auto basis = monomial_basis(1, 5);
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c) {
      cplx want = ellipse_moment(basis[r][0], basis[c][0]);
      cplx got(static_cast<double>(g(r, c).real()), static_cast<double>(g(r, c).imag()));
      // entry z^beta conj(z)^gamma pairs row and column in some orientation
      cplx alt = std::conj(want);
      double err = std::min(std::abs(got - want), std::abs(got - alt));
      CHECK(err < 1e-8 * (1 + std::abs(want)));
    }
}

TEST_CASE("concentric disk diameters") {
  auto rep = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 1, 40), 38);
  for (int m = 0; m <= 30; ++m) CHECK(std::abs(rep.d[m] - std::exp(-(m + 1.0))) <= 1e-8 * std::exp(-(m + 1.0)));
  CHECK(rep.m_valid >= 30);

  auto npz = npz_check(rep, 2 * kPi, 1, {0, 30});
  CHECK(npz.target == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(npz.relative_gap < 0.01);
  CHECK_FALSE(npz.low_confidence);

  auto rep2 = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 2, 30), 25);
  auto npz2 = npz_check(rep2, kPi, 1, {0, 20});
  CHECK(npz2.target == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(npz2.slope == doctest::Approx(2.0).epsilon(0.01));

  auto two = npz_check(rep, 2 * kPi, 1, {3, 4});
  CHECK(two.low_confidence);
  CHECK(code_of([&] { npz_check(rep, 2 * kPi, 1, {5, 5}); }) == ErrorCode::WindowOutsideValidity);
  CHECK(code_of([&] { npz_check(rep, 2 * kPi, 1, {0, 39}); }) == ErrorCode::WindowOutsideValidity);
  CHECK(code_of([&] { kolmogorov_diameters(gram_pair(log_abs, 1, 0, 1, 5), 6); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("identical domains have unit diameters") {
  auto g = gram_matrix({log_ellipse, 1, 0.2}, 6);
  GramPair p{g, g, 6, 1, 0.2, 0.2};
  auto rep = kolmogorov_diameters(p, 6);
  for (double d : rep.d) CHECK(d == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("polydisc spectrum grows like sqrt(2m)") {
  auto rep = kolmogorov_diameters(gram_pair(log_max, 2, 0, 1, 20), 180);
  // z^a on the bidisc: d = e^{-(|a| + 2)}
  auto deg = graded_degrees(2, 181);
  for (std::size_t m = 0; m <= 180; ++m) CHECK(rep.d[m] == doctest::Approx(std::exp(-(deg[m] + 2))).epsilon(1e-8));
  std::vector<double> x, y;
  for (std::size_t m = 50; m <= 150; ++m) {
    x.push_back(std::sqrt(static_cast<double>(m)));
    y.push_back(-std::log(rep.d[m]));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  CHECK(sxy / sxx == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("alpha limit of the log norm") {
  auto one = alpha_limit(log_abs, 1, {});
  CHECK(one.limit == doctest::Approx(1.0).epsilon(0.02));
  AlphaOptions ao;
  ao.h = 0.15;
  auto two = alpha_limit(log_norm, 2, ao);
  CHECK(two.limit == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));

  auto scaled = alpha_limit([](std::span<const cplx> z) { return 2 * std::log(std::abs(z[0])); }, 1, {});
  CHECK(scaled.limit == doctest::Approx(one.limit / 2).epsilon(0.02));

  // alpha-limit consistency: npz slope per unit level gap
  auto rep = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 1.5, 30), 25);
  auto npz = npz_check(rep, 2 * kPi / 1.5, 1, {0, 20});
  CHECK(npz.slope / 1.5 == doctest::Approx(one.limit).epsilon(0.05));

  // |z|^2 is nowhere maximal: the mass keeps growing with the ball
  CHECK(code_of([] { alpha_limit([](std::span<const cplx> z) { return std::norm(z[0]); }, 1, {}); }) ==
        ErrorCode::MassNotConcentrated);
}

TEST_CASE("omega dual-norm interpolation on disks") {
  auto at = [](double s, int D) { return LeveledGram{s, gram_matrix({log_abs, 1, s}, D)}; };
  for (int D : {10, 20, 40}) {
    std::array<LeveledGram, 4> g{at(0, D), at(1, D), at(2, D), at(4, D)};
    std::vector<std::vector<cplx>> mono;
    for (int j = 0; j <= D; ++j) {
      std::vector<cplx> xi(D + 1, 0.0);
      xi[j] = 1;
      mono.push_back(xi);
      CHECK(dual_norm(g[0].gram, xi) == doctest::Approx(1 / disk_norm(0, j)).epsilon(1e-9));
    }
    auto res = omega_dual_check(g, mono);
    CHECK(res.max_ratio <= 1.05);
    for (int j = 0; j <= D; ++j) CHECK(res.ratios[j] == doctest::Approx(std::exp(-(j + 1.0))).epsilon(1e-8));
  }

  auto random_run = [](int D) {
    oracle::Rng rng(42);
    std::array<LeveledGram, 4> g;
    double lv[4] = {0, 1, 2, 4};
    for (int i = 0; i < 4; ++i) g[i] = {lv[i], gram_matrix({log_abs, 1, lv[i]}, D)};
    std::vector<std::vector<cplx>> f;
    for (int i = 0; i < 500; ++i) {
      std::vector<cplx> xi(D + 1);
      // decaying coefficients so the leading functionals agree across D
      for (int j = 0; j <= D; ++j) xi[j] = cplx(rng.normal(), rng.normal()) * std::exp(-0.5 * j);
      f.push_back(xi);
    }
    return omega_dual_check(g, f).max_ratio;
  };
  double r20 = random_run(20), r40 = random_run(40);
  CHECK(r40 == doctest::Approx(r20).epsilon(0.1));

  std::array<LeveledGram, 4> bad{LeveledGram{0, gram_matrix({log_abs, 1, 0}, 3)},
                                 LeveledGram{1, gram_matrix({log_abs, 1, 1}, 3)},
                                 LeveledGram{1, gram_matrix({log_abs, 1, 1}, 3)},
                                 LeveledGram{4, gram_matrix({log_abs, 1, 4}, 3)}};
  CHECK(code_of([&] { omega_dual_check(bad, {{1, 0, 0, 0}}); }) == ErrorCode::BadOrder);
}

TEST_CASE("diameter transfer between disks and power series") {
  PowerSeriesSpace lin{[](std::size_t m) { return static_cast<double>(m); }};
  auto U = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 1, 40), 35);
  auto same = diameter_transfer_check(U, lin, 0, {0, 30}, 1);
  CHECK(same.forward >= 1 - 1e-9);
  CHECK(same.forward <= 1.01);

  auto U3 = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 3, 40), 35);
  auto shifted = diameter_transfer_check(U3, lin, 1, {0, 30}, 1);
  CHECK(shifted.forward <= std::exp(2.0));
  CHECK(std::isfinite(shifted.forward));

  CHECK(code_of([&] { diameter_transfer_check(U, lin, 0, {5, 4}); }) == ErrorCode::WindowMismatch);
  CHECK(code_of([&] { diameter_transfer_check(U, lin, 0, {0, 36}); }) == ErrorCode::WindowMismatch);
}

TEST_CASE("diameters lie in (0, 1] and do not increase") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    double l = rng.uniform(-0.5, 0.5), k = l + rng.uniform(0.2, 1.5);
    double a = rng.uniform(1.0, 2.0);
    auto phi = [a](std::span<const cplx> z) {
      return 0.5 * std::log(z[0].real() * z[0].real() / (a * a) + z[0].imag() * z[0].imag());
    };
    auto rep = kolmogorov_diameters(gram_pair(phi, 1, l, k, 12), 10);
    for (std::size_t m = 0; m < rep.d.size(); ++m) {
      CHECK(rep.d[m] > 0);
      CHECK(rep.d[m] <= 1 + 1e-12);
      if (m > 0) CHECK(rep.d[m] <= rep.d[m - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("pencil invariance under congruence") {
  oracle::Rng rng(11);
  auto p = gram_pair(log_ellipse, 1, 0, 0.5, 10);
  auto base = kolmogorov_diameters(p, 10);
  for (int trial = 0; trial < 5; ++trial) {
    const auto M = p.small.rows();
    GramMatrix T = GramMatrix::Identity(M, M);
    for (Eigen::Index r = 0; r < M; ++r)
      for (Eigen::Index c = r + 1; c < M; ++c) T(r, c) = {0.3L * rng.normal(), 0.3L * rng.normal()};
    for (Eigen::Index r = 0; r < M; ++r) T(r, r) *= static_cast<long double>(rng.uniform(0.5, 2.0));
    GramPair q{T.adjoint() * p.small * T, T.adjoint() * p.large * T, p.degree, 1, p.l, p.k};
    auto moved = kolmogorov_diameters(q, 10);
    for (std::size_t m = 0; m <= 10; ++m) CHECK(std::abs(moved.d[m] - base.d[m]) < 1e-10);
  }
}

TEST_CASE("bidisc spectrum is the sorted tensor product of disk spectra") {
  auto disk = kolmogorov_diameters(gram_pair(log_abs, 1, 0, 1, 16), 16);
  std::vector<double> tensor;
  for (int a = 0; a <= 16; ++a)
    for (int b = 0; a + b <= 16; ++b) tensor.push_back(disk.d[a] * disk.d[b]);
  std::sort(tensor.begin(), tensor.end(), std::greater<>());
  auto bi = kolmogorov_diameters(gram_pair(log_max, 2, 0, 1, 16), tensor.size() - 1);
  for (std::size_t m = 0; m < tensor.size(); ++m) CHECK(bi.d[m] == doctest::Approx(tensor[m]).epsilon(1e-8));
}

TEST_CASE("Gram preconditions") {
  CHECK_THROWS_AS(gram_matrix({[](std::span<const cplx> z) { return std::log(std::abs(z[0] - 3.0)); }, 1, 0}, 2), Error);
  auto g = gram_matrix({log_norm, 2, 0}, 0);
  CHECK(static_cast<double>(g(0, 0).real()) == doctest::Approx(kPi * kPi / 2).epsilon(1e-8));
}
