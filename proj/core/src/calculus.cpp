#include "ppl/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppl/error.hpp"
#include "ppl/parallel.hpp"

namespace ppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int n) { return n == 1 ? 1.0 : 2.0; }

struct Stencil {
  const ScalarField& u;
  const GridDomain& g;
  std::size_t center;
  GridDomain::Index mi;
  bool fast;

  Stencil(const ScalarField& f, std::size_t idx, int reach = 1)
      : u(f), g(f.domain()), center(idx), mi(g.multi_index(idx)) {
    fast = true;
    for (int a = 0; a < g.real_dim(); ++a)
      if (g.periodic(a) || mi[a] < reach || mi[a] > g.count(a) - 1 - reach) fast = false;
  }

  // Value at center + (sa along a) + (sb along b); nullopt when unusable.
  std::optional<double> at(int a, int sa, int b = 0, int sb = 0) const {
    std::size_t j;
    if (fast) {
      std::ptrdiff_t off = sa * static_cast<std::ptrdiff_t>(g.stride(a));
      if (sb) off += sb * static_cast<std::ptrdiff_t>(g.stride(b));
      j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(center) + off);
    } else {
      GridDomain::Index d{};
      d[a] += sa;
      if (sb) d[b] += sb;
      auto s = g.shifted(center, d);
      if (!s) return std::nullopt;
      j = *s;
    }
    if (g.cls(j) != NodeClass::Interior) return std::nullopt;
    double v = u[j];
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
};

bool second(const Stencil& s, int a, double c, double h2, double& out) {
  auto p = s.at(a, 1), m = s.at(a, -1);
  if (!p || !m) return false;
  out = (*p - 2 * c + *m) / h2;
  return true;
}

bool mixed(const Stencil& s, int a, int b, double h2, double& out) {
  auto pp = s.at(a, 1, b, 1), pm = s.at(a, 1, b, -1), mp = s.at(a, -1, b, 1), mm = s.at(a, -1, b, -1);
  if (!pp || !pm || !mp || !mm) return false;
  out = (*pp - *pm - *mp + *mm) / (4 * h2);
  return true;
}

bool second4(const Stencil& s, int a, double c, double h2, double& out) {
  auto p1 = s.at(a, 1), m1 = s.at(a, -1), p2 = s.at(a, 2), m2 = s.at(a, -2);
  if (!p1 || !m1 || !p2 || !m2) return false;
  out = (-*p2 + 16 * *p1 - 30 * c + 16 * *m1 - *m2) / (12 * h2);
  return true;
}

// Tensor product of the five-point first-derivative stencil.
bool mixed4(const Stencil& s, int a, int b, double h2, double& out) {
  static constexpr int off[4] = {-2, -1, 1, 2};
  static constexpr double w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  double acc = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto v = s.at(a, off[i], b, off[j]);
      if (!v) return false;
      acc += w[i] * w[j] * *v;
    }
  out = acc / h2;
  return true;
}

struct Derivatives {
  bool (*second)(const Stencil&, int, double, double, double&);
  bool (*mixed)(const Stencil&, int, int, double, double&);
  int reach;
};

Derivatives derivatives(int order) {
  if (order == 2) return {second, mixed, 1};
  if (order == 4) return {second4, mixed4, 2};
  fail(ErrorCode::BadOrder, "difference order must be 2 or 4");
}

// Spectral norm of the real 2x2 Hessian of a one-variable field.
bool real_curvature_at(const ScalarField& u, std::size_t idx, int order, double& sigma) {
  auto D = derivatives(order);
  Stencil s(u, idx, D.reach);
  const double h2 = u.domain().spacing() * u.domain().spacing();
  double xx, yy, xy;
  if (!D.second(s, 0, u[idx], h2, xx) || !D.second(s, 1, u[idx], h2, yy) || !D.mixed(s, 0, 1, h2, xy)) return false;
  sigma = std::abs(0.5 * (xx + yy)) + std::hypot(0.5 * (xx - yy), xy);
  return true;
}

}  // namespace

std::size_t HessianField::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

bool hessian_at(const ScalarField& u, std::size_t idx, std::span<cplx> out, int order) {
  const GridDomain& g = u.domain();
  auto D = derivatives(order);
  if (g.cls(idx) != NodeClass::Interior || !std::isfinite(u[idx])) return false;
  Stencil s(u, idx, D.reach);
  const double c = u[idx], h2 = g.spacing() * g.spacing();
  const int n = g.dim();
  double d[4];
  for (int a = 0; a < 2 * n; ++a)
    if (!D.second(s, a, c, h2, d[a])) return false;
  out[0] = cplx(0.25 * (d[0] + d[1]), 0.0);
  if (n == 2) {
    double x1x2, y1y2, x1y2, y1x2;
    if (!D.mixed(s, 0, 2, h2, x1x2) || !D.mixed(s, 1, 3, h2, y1y2) || !D.mixed(s, 0, 3, h2, x1y2) ||
        !D.mixed(s, 1, 2, h2, y1x2))
      return false;
    cplx off(0.25 * (x1x2 + y1y2), 0.25 * (x1y2 - y1x2));
    out[1] = off;
    out[2] = std::conj(off);
    out[3] = cplx(0.25 * (d[2] + d[3]), 0.0);
  }
  return true;
}

HessianField complex_hessian(const ScalarField& u) {
  const GridDomain& g = u.domain();
  HessianField H;
  H.domain = u.domain_ptr();
  H.n = g.dim();
  const int nn = H.n * H.n;
  H.entries.assign(g.size() * nn, cplx(0, 0));
  H.valid.assign(g.size(), 0);
  parallel_for(g.size(), [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) {
      std::span<cplx> out(H.entries.data() + i * nn, nn);
      if (hessian_at(u, i, out))
        H.valid[i] = 1;
      else
        std::fill(out.begin(), out.end(), cplx(0, 0));
    }
  });
  if (H.valid_count() == 0) fail(ErrorCode::TooCoarse, "no node admits a full Hessian stencil");
  return H;
}

double hermitian_det(std::span<const cplx> H, int n) {
  if (n == 1) return H[0].real();
  return H[0].real() * H[3].real() - std::norm(H[1]);
}

double hermitian_min_eigenvalue(std::span<const cplx> H, int n) {
  if (n == 1) return H[0].real();
  double a = H[0].real(), d = H[3].real();
  double m = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), std::abs(H[1]));
  return m - r;
}

double hermitian_max_abs_eigenvalue(std::span<const cplx> H, int n) {
  if (n == 1) return std::abs(H[0].real());
  double a = H[0].real(), d = H[3].real();
  double m = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), std::abs(H[1]));
  return std::max(std::abs(m - r), std::abs(m + r));
}

double ma_density_from_hessian(std::span<const cplx> H, int n) {
  return std::pow(4.0, n) * factorial(n) * hermitian_det(H, n);
}

DensityField ma_density(const ScalarField& u, const DensityOptions& opt) {
  const GridDomain& g = u.domain();
  const int n = g.dim();
  const double tol = opt.eig_tol >= 0 ? opt.eig_tol : opt.eig_tol_per_h * g.spacing();
  std::vector<double> dens(g.size(), 0.0);
  std::vector<std::uint8_t> valid(g.size(), 0);
  std::vector<std::uint8_t> flags(g.size(), 0);  // bit0 indefinite, bit1 non-psh
  parallel_for(g.size(), [&](std::size_t b, std::size_t e, unsigned) {
    cplx H[4];
    for (std::size_t i = b; i < e; ++i) {
      if (g.cls(i) == NodeClass::Excluded) {
        dens[i] = kInf;
        continue;
      }
      if (!hessian_at(u, i, std::span<cplx>(H, n * n), opt.order)) continue;
      valid[i] = 1;
      double det = hermitian_det(std::span<const cplx>(H, n * n), n);
      double lmin = hermitian_min_eigenvalue(std::span<const cplx>(H, n * n), n);
      if (lmin < -tol) flags[i] |= 2;
      if (det < 0) {
        flags[i] |= 1;
        continue;
      }
      if (lmin < -tol) continue;
      dens[i] = ma_density_from_hessian(std::span<const cplx>(H, n * n), n);
    }
  });
  DensityField out{ScalarField(u.domain_ptr(), std::move(dens)), std::move(valid)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.valid_count += out.valid[i];
    out.indefinite_count += flags[i] & 1;
    out.non_psh_count += (flags[i] >> 1) & 1;
  }
  if (out.valid_count == 0) fail(ErrorCode::TooCoarse, "no node admits a full Hessian stencil");
  return out;
}

MassResult ma_mass(const ScalarField& u, const PointPredicate& region, const DensityOptions& opt) {
  const GridDomain& g = u.domain();
  DensityField d = ma_density(u, opt);
  const double cell = std::pow(g.spacing(), g.real_dim());
  MassResult r;
  std::vector<cplx> p(g.dim());
  double sum = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Interior) continue;
    if (region) {
      g.point(i, p);
      if (!region(p)) continue;
    }
    ++r.region_nodes;
    if (!d.valid[i]) continue;
    ++r.used_nodes;
    sum += d.density[i];
  }
  if (r.region_nodes == 0) fail(ErrorCode::RegionEmpty, "mass region contains no interior node");
  r.indefinite_nodes = d.indefinite_count;
  r.mass = sum * cell;
  r.skipped_fraction = 1.0 - static_cast<double>(r.used_nodes) / r.region_nodes;
  return r;
}

PshVerdict is_psh(const ScalarField& u, double tol, const PointPredicate& region) {
  const GridDomain& g = u.domain();
  const int n = g.dim();
  PshVerdict v;
  v.min_eigenvalue = kInf;
  std::vector<cplx> p(n);
  cplx H[4];
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Interior) continue;
    if (region) {
      g.point(i, p);
      if (!region(p)) continue;
    }
    if (!hessian_at(u, i, std::span<cplx>(H, n * n))) continue;
    ++v.checked_nodes;
    double l = hermitian_min_eigenvalue(std::span<const cplx>(H, n * n), n);
    if (l < v.min_eigenvalue) {
      v.min_eigenvalue = l;
      v.worst_node = i;
    }
  }
  if (v.checked_nodes == 0) fail(ErrorCode::TooCoarse, "no node admits a full Hessian stencil");
  v.psh = v.min_eigenvalue >= -tol;
  v.worst_point = g.point(*v.worst_node);
  return v;
}

MaximalVerdict is_maximal(const ScalarField& u, const PointPredicate& region, double tol, int order) {
  const GridDomain& g = u.domain();
  const int n = g.dim();
  const double norm = std::pow(4.0, n) * factorial(n);
  MaximalVerdict v;
  std::vector<cplx> p(n);
  cplx H[4];
  double worst = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Interior) continue;
    if (region) {
      g.point(i, p);
      if (!region(p)) continue;
    }
    std::span<cplx> Hs(H, n * n);
    if (!hessian_at(u, i, Hs, order)) continue;
    ++v.checked_nodes;
    double dens = std::abs(ma_density_from_hessian(Hs, n));
    if (dens > worst) {
      worst = dens;
      v.worst_node = i;
    }
    double lam = hermitian_max_abs_eigenvalue(Hs, n);
    // A harmonic function of one variable has zero complex Hessian; its
    // curvature shows up only in the real Hessian.
    double sigma;
    if (n == 1 && real_curvature_at(u, i, order, sigma)) lam = std::max(lam, 0.5 * sigma);
    v.curvature_scale = std::max(v.curvature_scale, norm * std::pow(lam, n));
  }
  if (v.checked_nodes == 0) fail(ErrorCode::TooCoarse, "no node admits a full Hessian stencil");
  v.sup_density = worst;
  v.maximal = worst <= tol;
  v.worst_point = g.point(*v.worst_node);
  return v;
}

double soft_max(double a, double b, double eta) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  double t = (a - b) / eta;
  double g;
  if (std::abs(t) >= 1) {
    g = 0.5 * std::abs(t);
  } else {
    double t2 = t * t;
    g = (-t2 * t2 + 6 * t2 + 3) / 16;
  }
  return 0.5 * (a + b) + eta * g;
}

}  // namespace ppl
