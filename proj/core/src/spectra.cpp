#include "ppl/spectra.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ppl/calculus.hpp"
#include "ppl/error.hpp"
#include "ppl/numeric.hpp"

namespace ppl {

namespace {

using ld = long double;
using lcplx = std::complex<ld>;
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr ld kTwoPiL = 2 * std::numbers::pi_v<ld>;

}  // namespace

double ps_norm(const std::vector<cplx>& x, double k, const PowerSeriesSpace& space) {
  double s = 0;
  for (std::size_t m = 0; m < x.size(); ++m)
    if (x[m] != 0.0) s += std::abs(x[m]) * std::exp(k * space.alpha(m));
  return s;
}

double diam_power_series(const PowerSeriesSpace& space, double k, double l, std::size_t m) {
  if (!(k > l)) fail(ErrorCode::BadOrder, "diameters need k > l");
  return std::exp((l - k) * space.alpha(m));
}

std::vector<std::vector<int>> monomial_basis(int n, int degree) {
  if (n < 1 || n > 2) fail(ErrorCode::DimensionMismatch, "monomial bases support n = 1 or 2");
  if (degree < 0) fail(ErrorCode::InvalidArgument, "degree must be nonnegative");
  std::vector<std::vector<int>> out;
  for (int d = 0; d <= degree; ++d) {
    if (n == 1)
      out.push_back({d});
    else
      for (int a = d; a >= 0; --a) out.push_back({a, d - a});
  }
  return out;
}

std::size_t monomial_count(int n, int degree) {
  if (degree < 0) return 0;
  return n == 1 ? degree + 1 : static_cast<std::size_t>(degree + 1) * (degree + 2) / 2;
}

std::vector<double> graded_degrees(int n, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (int d = 0; out.size() < count; ++d) {
    std::size_t here = n == 1 ? 1 : static_cast<std::size_t>(d) + 1;
    for (std::size_t j = 0; j < here && out.size() < count; ++j) out.push_back(d);
  }
  return out;
}

namespace {

bool looks_circular(const SublevelSet& s, double scale) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<cplx> z(s.n), w(s.n);
  for (int k = 0; k < 64; ++k) {
    for (int j = 0; j < s.n; ++j) {
      double r = 1.5 * scale * U(rng);
      z[j] = std::polar(r, kTwoPi * U(rng));
      w[j] = z[j] * std::polar(1.0, kTwoPi * U(rng));
    }
    double a = s.phi(z), b = s.phi(w);
    if (a == b) continue;
    if (!(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)))) return false;
  }
  return true;
}

double crossing(const std::function<double(double)>& f, double level, double reach) {
  auto hit = first_crossing(f, level, reach);
  if (!hit) fail(ErrorCode::InvalidArgument, "sublevel set is not bounded within reach");
  return *hit;
}

void check_positive(const GramMatrix& g) {
  Eigen::LLT<GramMatrix> llt(g);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::IllConditioned, "Gram matrix is not positive definite at working precision; lower the degree");
}

}  // namespace

GramMatrix gram_matrix(const SublevelSet& s, int degree, const GramQuadrature& q) {
  const int n = s.n;
  auto basis = monomial_basis(n, degree);
  const std::size_t M = basis.size();
  std::vector<cplx> z(n, 0.0);
  if (!(s.phi(z) < s.level)) fail(ErrorCode::InvalidArgument, "the origin must lie in the sublevel set");
  auto along_first = [&](double t) {
    std::fill(z.begin(), z.end(), 0.0);
    z[0] = t;
    return s.phi(z);
  };
  const double scale = crossing(along_first, s.level, q.reach);

  bool circular = q.symmetry == Symmetry::Circular || (q.symmetry == Symmetry::Auto && looks_circular(s, scale));
  const int radial = q.radial > 0 ? q.radial : degree + 4;
  GramMatrix G = GramMatrix::Zero(M, M);

  if (circular) {
    if (n == 1) {
      for (std::size_t i = 0; i < M; ++i) {
        int e = 2 * basis[i][0] + 2;
        G(i, i) = kTwoPiL * std::pow(static_cast<ld>(scale), e) / e;
      }
    } else {
      // (2 pi)^2 int rho1^{2a+1} rho2*(rho1)^{2b+2} / (2b+2) d rho1
      std::vector<std::pair<double, double>> nodes = composite_gauss_legendre(8, radial, 0, scale);
      std::vector<ld> r1(nodes.size()), r2(nodes.size());
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double rho1 = nodes[j].first;
        r1[j] = rho1;
        r2[j] = crossing(
            [&](double t) {
              z[0] = rho1;
              z[1] = t;
              return s.phi(z);
            },
            s.level, q.reach);
      }
      for (std::size_t i = 0; i < M; ++i) {
        const int a = basis[i][0], b = basis[i][1];
        ld sum = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j)
          sum += static_cast<ld>(nodes[j].second) * std::pow(r1[j], 2 * a + 1) * std::pow(r2[j], 2 * b + 2) /
                 (2 * b + 2);
        G(i, i) = kTwoPiL * kTwoPiL * sum;
      }
    }
    check_positive(G);
    return G;
  }

  // Trapezoid in the angles converges geometrically for a smooth boundary
  // but is exact only for circles, so the default count doubles to a fixed point.
  auto assemble = [&](int ang) {
    GramMatrix A = GramMatrix::Zero(M, M);
    std::vector<lcplx> v(M);
    auto accumulate = [&](const std::vector<cplx>& p, ld w) {
      for (std::size_t i = 0; i < M; ++i) {
        lcplx m = 1;
        for (int j = 0; j < n; ++j)
          for (int e = 0; e < basis[i][j]; ++e) m *= lcplx(p[j].real(), p[j].imag());
        v[i] = m;
      }
      for (std::size_t c = 0; c < M; ++c) {
        lcplx vc = std::conj(v[c]) * w;
        for (std::size_t r = c; r < M; ++r) A(r, c) += v[r] * vc;
      }
    };
    if (n == 1) {
      for (int j = 0; j < ang; ++j) {
        cplx d = std::polar(1.0, kTwoPi * j / ang);
        double top = crossing(
            [&](double t) {
              z[0] = t * d;
              return s.phi(z);
            },
            s.level, q.reach);
        for (auto [r, w] : gauss_legendre(radial, 0, top)) accumulate({r * d}, static_cast<ld>(w) * r * kTwoPiL / ang);
      }
    } else {
      for (int a = 0; a < ang; ++a) {
        cplx d1 = std::polar(1.0, kTwoPi * a / ang);
        double top1 = crossing(
            [&](double t) {
              z[0] = t * d1;
              z[1] = 0;
              return s.phi(z);
            },
            s.level, q.reach);
        for (auto [r1, w1] : gauss_legendre(radial, 0, top1)) {
          for (int b = 0; b < ang; ++b) {
            cplx d2 = std::polar(1.0, kTwoPi * b / ang);
            double top2 = crossing(
                [&](double t) {
                  z[0] = r1 * d1;
                  z[1] = t * d2;
                  return s.phi(z);
                },
                s.level, q.reach);
            for (auto [r2, w2] : gauss_legendre(radial, 0, top2))
              accumulate({r1 * d1, r2 * d2}, static_cast<ld>(w1) * w2 * r1 * r2 * (kTwoPiL / ang) * (kTwoPiL / ang));
          }
        }
      }
    }
    for (std::size_t c = 0; c < M; ++c)
      for (std::size_t r = 0; r < c; ++r) A(r, c) = std::conj(A(c, r));
    return A;
  };
  auto drift = [&](const GramMatrix& a, const GramMatrix& b) {
    ld worst = 0;
    for (std::size_t c = 0; c < M; ++c)
      for (std::size_t r = 0; r < M; ++r)
        worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / std::sqrt(std::abs(b(r, r)) * std::abs(b(c, c))));
    return static_cast<double>(worst);
  };

  if (q.angular > 0) {
    G = assemble(q.angular);
  } else {
    int ang = std::max(8, 2 * degree + 8);
    const int cap = n == 1 ? 1 << 14 : 512;
    G = assemble(ang);
    for (;;) {
      if (2 * ang > cap)
        fail(ErrorCode::QuadratureUnstable, "angular quadrature did not settle; pass an explicit count");
      ang *= 2;
      GramMatrix finer = assemble(ang);
      double d = drift(G, finer);
      G = std::move(finer);
      if (d <= 1e-11) break;
    }
  }
  check_positive(G);
  return G;
}

GramPair gram_pair(const PointFunction& phi, int n, double l, double k, int degree, const GramQuadrature& q) {
  if (!(k > l)) fail(ErrorCode::BadOrder, "Gram pairs need k > l");
  return {gram_matrix({phi, n, l}, degree, q), gram_matrix({phi, n, k}, degree, q), degree, n, l, k};
}

namespace {

bool is_diagonal(const GramMatrix& g) {
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      if (r != c && g(r, c) != lcplx(0)) return false;
  return true;
}

// Singular values of L_large^{-1} L_small on the leading M x M blocks,
// decreasing.
std::vector<double> pencil_roots(const GramMatrix& small, const GramMatrix& large, Eigen::Index M) {
  GramMatrix S = small.topLeftCorner(M, M), L = large.topLeftCorner(M, M);
  std::vector<double> out(M);
  if (is_diagonal(S) && is_diagonal(L)) {
    for (Eigen::Index i = 0; i < M; ++i) out[i] = static_cast<double>(std::sqrt(S(i, i).real() / L(i, i).real()));
  } else {
    Eigen::Matrix<ld, Eigen::Dynamic, 1> scale(M);
    for (Eigen::Index i = 0; i < M; ++i) scale(i) = 1 / std::sqrt(L(i, i).real());
    for (Eigen::Index c = 0; c < M; ++c)
      for (Eigen::Index r = 0; r < M; ++r) {
        S(r, c) *= scale(r) * scale(c);
        L(r, c) *= scale(r) * scale(c);
      }
    Eigen::LLT<GramMatrix> ll(L), ls(S);
    if (ll.info() != Eigen::Success || ls.info() != Eigen::Success)
      fail(ErrorCode::IllConditioned, "Cholesky factorization failed; lower the degree");
    GramMatrix B = ll.matrixL().solve(GramMatrix(ls.matrixL()));
    Eigen::JacobiSVD<GramMatrix> svd(B);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < M; ++i) out[i] = static_cast<double>(sv(i));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

DiameterReport kolmogorov_diameters(const GramPair& p, std::size_t m_max) {
  const Eigen::Index M = p.small.rows();
  if (p.small.cols() != M || p.large.rows() != M || p.large.cols() != M)
    fail(ErrorCode::DimensionMismatch, "Gram pair matrices differ in size");
  if (static_cast<Eigen::Index>(m_max) >= M) fail(ErrorCode::InvalidArgument, "m_max must be below the basis size");
  DiameterReport r;
  r.degree = p.degree;
  r.n = p.n;
  r.l = p.l;
  r.k = p.k;
  auto full = pencil_roots(p.small, p.large, M);
  r.d.assign(full.begin(), full.begin() + m_max + 1);
  const auto M2 = static_cast<Eigen::Index>(monomial_count(p.n, p.degree - 2));
  if (M2 >= 1 && M2 <= M) {
    auto cut = pencil_roots(p.small, p.large, M2);
    std::size_t m = 0;
    while (m <= m_max && static_cast<Eigen::Index>(m) < M2 && std::abs(cut[m] - full[m]) <= 0.01 * full[m]) ++m;
    r.m_valid = m > 0 ? m - 1 : 0;
  }
  return r;
}

NpzResult npz_check(const DiameterReport& r, double capacity, int n, Window w) {
  if (w.lo > w.hi || w.hi >= r.d.size() || w.hi > r.m_valid || w.hi == w.lo)
    fail(ErrorCode::WindowOutsideValidity, "fit window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                                               "] needs two or more points up to m_valid = " +
                                               std::to_string(r.m_valid));
  if (!(capacity > 0)) fail(ErrorCode::InvalidArgument, "capacity must be positive");
  std::vector<double> x, y;
  for (std::size_t m = w.lo; m <= w.hi; ++m) {
    x.push_back(std::pow(static_cast<double>(m), 1.0 / n));
    y.push_back(-std::log(r.d[m]));
  }
  auto fit = fit_line(x, y);
  NpzResult out;
  out.slope = fit.slope;
  out.rms = fit.rms;
  out.points = x.size();
  out.low_confidence = x.size() < 3;
  out.target = kTwoPi * std::pow(std::tgamma(n + 1.0), 1.0 / n) / std::pow(capacity, 1.0 / n);
  out.relative_gap = std::abs(out.slope - out.target) / out.target;
  return out;
}

AlphaReport alpha_limit(const PointFunction& phi, int n, const AlphaOptions& opt) {
  if (n < 1 || n > 2) fail(ErrorCode::DimensionMismatch, "alpha_limit supports n = 1 or 2");
  std::vector<double> levels = opt.test_levels;
  if (levels.empty()) levels = {opt.cut + opt.eta + 0.25, opt.cut + opt.eta + 0.5};
  std::sort(levels.begin(), levels.end());
  if (levels.size() < 2) fail(ErrorCode::InvalidArgument, "alpha_limit needs two test balls");

  // reach of the largest ball over a fan of rays
  std::vector<cplx> z(n);
  double reach = 0;
  const int fan = 32;
  for (int i = 0; i < fan; ++i)
    for (int k = 0; k < (n == 1 ? 1 : fan); ++k) {
      double eta = 0.5 * std::numbers::pi * (k + 0.5) / fan;
      std::vector<cplx> d = n == 1 ? std::vector<cplx>{std::polar(1.0, kTwoPi * i / fan)}
                                   : std::vector<cplx>{std::polar(std::cos(eta), kTwoPi * i / fan),
                                                       std::polar(std::sin(eta), kTwoPi * ((i * 5 + k) % fan) / fan)};
      reach = std::max(reach, crossing(
                                  [&](double t) {
                                    for (int j = 0; j < n; ++j) z[j] = t * d[j];
                                    return phi(z);
                                  },
                                  levels.back(), 1e6));
    }
  const double half = 1.05 * reach + 4 * opt.h;
  if (std::pow(2 * half / opt.h, 2 * n) > 6e7) fail(ErrorCode::TooCoarse, "alpha_limit grid too large; raise h");
  auto dom = build_box_domain(Box::centered(n, half), opt.h);
  auto u = field_from_evaluator(dom, [&](std::span<const cplx> p) { return soft_max(phi(p), opt.cut, opt.eta); });
  DensityOptions dopt;
  dopt.order = opt.order;
  DensityField dens = ma_density(u, dopt);

  const GridDomain& g = *dom;
  const double cell = std::pow(opt.h, 2 * n);
  AlphaReport out;
  out.ball_masses.assign(levels.size(), 0.0);
  std::vector<cplx> p(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Interior || !dens.valid[i]) continue;
    g.point(i, p);
    double v = phi(p);
    for (std::size_t b = 0; b < levels.size(); ++b)
      if (v < levels[b]) out.ball_masses[b] += dens.density[i] * cell;
  }
  out.mass = out.ball_masses.back();
  const double prev = out.ball_masses[levels.size() - 2];
  if (!(out.mass > 0)) fail(ErrorCode::MassNotConcentrated, "no Monge-Ampere mass found");
  if (std::abs(out.mass - prev) > 0.01 * out.mass)
    fail(ErrorCode::MassNotConcentrated, "mass grows from " + std::to_string(prev) + " to " + std::to_string(out.mass) +
                                             " between the two largest balls");
  out.limit = kTwoPi * std::pow(std::tgamma(n + 1.0), 1.0 / n) * std::pow(out.mass, -1.0 / n);
  return out;
}

double dual_norm(const GramMatrix& g, const std::vector<cplx>& xi) {
  if (static_cast<Eigen::Index>(xi.size()) != g.rows()) fail(ErrorCode::DimensionMismatch, "functional length differs");
  Eigen::LLT<GramMatrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorCode::IllConditioned, "Gram matrix is not positive definite");
  Eigen::Matrix<lcplx, Eigen::Dynamic, 1> x(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) x(i) = lcplx(xi[i].real(), xi[i].imag());
  Eigen::Matrix<lcplx, Eigen::Dynamic, 1> y = llt.matrixL().solve(x);
  return static_cast<double>(std::sqrt(y.squaredNorm()));
}

OmegaResult omega_dual_check(const std::array<LeveledGram, 4>& grams,
                             const std::vector<std::vector<cplx>>& functionals) {
  const double s0 = grams[0].level, s1 = grams[1].level, s2 = grams[2].level, s = grams[3].level;
  if (!(s0 < s1 && s1 < s2 && s2 < s)) fail(ErrorCode::BadOrder, "levels must satisfy s0 < s1 < s2 < s");
  const double a = (s - s1) / (s - s0), b = (s1 - s0) / (s - s0);
  OmegaResult out;
  for (const auto& xi : functionals) {
    double lhs = dual_norm(grams[2].gram, xi);
    double rhs = std::pow(dual_norm(grams[0].gram, xi), a) * std::pow(dual_norm(grams[3].gram, xi), b);
    double ratio = lhs == 0 ? 0 : lhs / rhs;
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

TransferResult diameter_transfer_check(const DiameterReport& U, const PowerSeriesSpace& V, double A, Window w,
                                       int index_shift, const DiameterReport* shifted_U) {
  if (w.lo > w.hi || w.hi >= U.d.size() || (shifted_U && w.hi >= shifted_U->d.size()) ||
      static_cast<long>(w.lo) + index_shift < 0)
    fail(ErrorCode::WindowMismatch, "window is empty or runs past a spectrum");
  TransferResult out;
  for (std::size_t m = w.lo; m <= w.hi; ++m) {
    const std::size_t mv = static_cast<std::size_t>(static_cast<long>(m) + index_shift);
    double dv = diam_power_series(V, U.k + A, U.l - A, mv);
    out.forward = std::max(out.forward, dv / U.d[m]);
    if (shifted_U) {
      double r = shifted_U->d[m] / diam_power_series(V, U.k, U.l, mv);
      out.reverse = std::max(out.reverse.value_or(0.0), r);
    }
    ++out.points;
  }
  return out;
}

}  // namespace ppl
