#include "ppl/criteria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "ppl/calculus.hpp"
#include "ppl/error.hpp"
#include "ppl/numeric.hpp"

namespace ppl {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double interp_ratio(double num, double a, double b) {
  if (num == 0) return 0;
  double den = std::sqrt(a) * std::sqrt(b);
  return den > 0 ? num / den : kInf;
}

}  // namespace

DnResult dn_check(const Compact& K0, const Compact& K, const std::vector<Compact>& candidates,
                  const std::vector<Holomorphic>& samples, double slack, const SupOptions& sup) {
  if (candidates.empty()) fail(ErrorCode::EmptyCandidates, "dn_check needs at least one candidate L");
  std::vector<double> n0(samples.size()), nk(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    n0[s] = sup_norm(samples[s], K0, sup).value;
    nk[s] = sup_norm(samples[s], K, sup).value;
  }
  DnResult out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    DnPair worst{0, c, 0};
    for (std::size_t s = 0; s < samples.size(); ++s) {
      double r = interp_ratio(nk[s], n0[s], sup_norm(samples[s], candidates[c], sup).value);
      if (r > worst.ratio) worst = {s, c, r};
    }
    out.worst_per_candidate.push_back(worst);
    if (worst.ratio <= 1 + slack) {
      out.found = c;
      return out;
    }
    if (!out.violation || worst.ratio > out.violation->ratio) out.violation = worst;
  }
  return out;
}

DnStandardReport dn_standard_form(const ExhaustionSpec& phi, const std::vector<double>& levels,
                                  const std::vector<Holomorphic>& samples, const DnStandardOptions& opt) {
  const int n = phi.dim();
  std::vector<cplx> center = opt.center;
  if (center.empty()) center = phi.pole_points().empty() ? std::vector<cplx>(n, 0.0) : phi.pole_points().front();
  if (static_cast<int>(center.size()) != n) fail(ErrorCode::DimensionMismatch, "center has the wrong dimension");
  PointFunction f = [&phi](std::span<const cplx> z) { return phi(z); };

  double top = -kInf;
  for (double k : levels) top = std::max(top, k + 1);
  double reach = opt.reach;
  if (reach <= 0) {
    // grow until a coarse fan of rays has left {phi < top}
    std::vector<cplx> z(n);
    auto escaped = [&](double rad) {
      const int fan = n == 1 ? 64 : 16;
      for (int i = 0; i < fan; ++i)
        for (int k = 0; k < (n == 1 ? 1 : fan * fan); ++k) {
          if (n == 1) {
            z[0] = center[0] + std::polar(rad, kTwoPi * i / fan);
          } else {
            double eta = 0.5 * std::numbers::pi * (i + 0.5) / fan;
            z[0] = center[0] + std::polar(rad * std::cos(eta), kTwoPi * (k % fan) / fan);
            z[1] = center[1] + std::polar(rad * std::sin(eta), kTwoPi * (k / fan) / fan);
          }
          if (phi(z) < top) return false;
        }
      return true;
    };
    double R = 1;
    while (!escaped(R)) {
      R *= 2;
      if (R > 1e12) fail(ErrorCode::InvalidArgument, "sublevel sets of phi look unbounded");
    }
    reach = 2 * R;
  }

  std::map<double, std::vector<double>> norms;
  auto norm_at = [&](double level) -> const std::vector<double>& {
    auto it = norms.find(level);
    if (it != norms.end()) return it->second;
    Compact K = sublevel(f, n, level, center, reach, opt.steps);
    std::vector<double> v(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) v[s] = sup_norm(samples[s], K, opt.sup).value;
    return norms.emplace(level, std::move(v)).first->second;
  };

  DnStandardReport out;
  for (double k : levels) {
    const auto& lo = norm_at(k - 1);
    const auto& mid = norm_at(k);
    const auto& hi = norm_at(k + 1);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      DnStandardRow row{k, s, lo[s], mid[s], hi[s], 0};
      row.ratio = mid[s] == 0 ? 0 : (lo[s] > 0 && hi[s] > 0 ? mid[s] * mid[s] / (lo[s] * hi[s]) : kInf);
      out.max_ratio = std::max(out.max_ratio, row.ratio);
      out.rows.push_back(row);
    }
  }
  return out;
}

namespace {

// Flux of grad phi through the level curve {phi = level} (n = 1), found by
// bisection along rays from c. On the curve, with rho(theta) the crossing,
// the outward flux element is rho |grad phi|^2 / (d phi / d rho) d theta.
double level_flux(const PointFunction& phi, cplx c, double level, int angles, double unbounded, bool& bounded) {
  std::vector<double> rho(angles);
  bounded = true;
  cplx z;
  std::span<const cplx> zs(&z, 1);
  for (int j = 0; j < angles; ++j) {
    cplx d = std::polar(1.0, kTwoPi * j / angles);
    auto ray = [&](double t) { z = c + t * d; return phi(zs); };
    auto hit = first_crossing(ray, level, unbounded);
    // each window starts where the previous one ended below the level
    for (double hi = unbounded; !hit && hi < 1e280; hi *= 1e12) hit = first_crossing(ray, level, hi * 1e12);
    if (hit && *hit == 0) fail(ErrorCode::InvalidArgument, "the center is not inside B_r");
    if (!hit) bounded = false;
    rho[j] = hit ? *hit : unbounded;
  }
  if (!bounded) std::fill(rho.begin(), rho.end(), unbounded);
  double sum = 0;
  for (int j = 0; j < angles; ++j) {
    cplx d = std::polar(1.0, kTwoPi * j / angles);
    const double r = rho[j];
    const double delta = 1e-5 * r;
    auto at = [&](cplx p) { z = p; return phi(zs); };
    cplx p = c + r * d;
    double gx = (at(p + delta) - at(p - delta)) / (2 * delta);
    double gy = (at(p + cplx(0, delta)) - at(p - cplx(0, delta))) / (2 * delta);
    double dr = gx * d.real() + gy * d.imag();
    if (!bounded) {
      sum += r * dr;  // a circle: the normal is radial
    } else if (dr > 0) {
      sum += r * (gx * gx + gy * gy) / dr;
    }
  }
  return sum * kTwoPi / angles;
}

double grid_mass(const PointFunction& phi, int n, std::span<const cplx> c, double level, const DemaillyOptions& opt,
                 bool& bounded) {
  // reach of B_r along a fan of rays
  double reach = 0;
  bounded = true;
  std::vector<cplx> z(n);
  const int fan = 64;
  for (int i = 0; i < fan; ++i) {
    for (int k = 0; k < (n == 1 ? 1 : 8); ++k) {
      double eta = 0.5 * std::numbers::pi * (k + 0.5) / 8;
      std::vector<cplx> d = n == 1 ? std::vector<cplx>{std::polar(1.0, kTwoPi * i / fan)}
                                   : std::vector<cplx>{std::polar(std::cos(eta), kTwoPi * i / fan),
                                                       std::polar(std::sin(eta), kTwoPi * (i * 7 % fan) / fan)};
      auto hit = first_crossing(
          [&](double t) {
            for (int j = 0; j < n; ++j) z[j] = c[j] + t * d[j];
            return phi(z);
          },
          level, opt.unbounded_radius);
      if (!hit) {
        bounded = false;
        return 0;
      }
      reach = std::max(reach, *hit);
    }
  }
  const double h = opt.h;
  const double half = 1.05 * reach + 4 * h;
  Box box;
  for (int j = 0; j < n; ++j) {
    box.lo.insert(box.lo.end(), {c[j].real() - half, c[j].imag() - half});
    box.hi.insert(box.hi.end(), {c[j].real() + half, c[j].imag() + half});
  }
  double nodes = std::pow(2 * half / h, 2 * n);
  if (nodes > 6e7) fail(ErrorCode::TooCoarse, "grid route needs too many nodes; raise h");
  auto dom = build_box_domain(box, h);
  const bool mollify = std::isfinite(opt.floor);
  auto u = field_from_evaluator(dom, [&](std::span<const cplx> p) {
    double v = phi(p);
    return mollify ? soft_max(v, opt.floor, opt.eta) : v;
  });
  for (double v : u.values())
    if (!std::isfinite(v)) fail(ErrorCode::NaNValue, "phi is not finite on the grid; give a mollification floor");
  DensityOptions dopt;
  dopt.order = opt.order;
  return ma_mass(u, [&](std::span<const cplx> p) { return phi(p) < level; }, dopt).mass;
}

TrendVerdict trend(const std::vector<DemaillyRow>& rows, double DemaillyRow::*col) {
  TrendVerdict v;
  bool all_zero = true;
  std::vector<double> x, y;
  double minimum = kInf;
  for (const auto& r : rows) {
    if (r.log_r <= 0) continue;
    double val = r.*col;
    minimum = std::min(minimum, val);
    if (std::abs(r.mass) > 1e-12) all_zero = false;
    if (val > 0) {
      x.push_back(std::log(r.log_r));
      y.push_back(std::log(val));
    }
  }
  v.minimum = std::isfinite(minimum) ? minimum : 0;
  if (all_zero && !rows.empty()) {
    v.degenerate = true;
    v.holds = true;
    return v;
  }
  v.points = x.size();
  if (x.size() < 2) return v;
  auto fit = fit_line(x, y);
  v.exponent = fit.slope;
  v.rms = fit.rms;
  const double last = rows.back().*col;
  v.holds = fit.slope <= -0.5 && last <= v.minimum * (1 + 1e-12);
  return v;
}

}  // namespace

DemaillyReport demailly_ratio(const PointFunction& phi, int n, const std::vector<double>& radii,
                              const DemaillyOptions& opt) {
  if (n < 1 || n > 2) fail(ErrorCode::DimensionMismatch, "demailly_ratio supports n = 1 or 2");
  std::vector<cplx> c = opt.center.empty() ? std::vector<cplx>(n, 0.0) : opt.center;
  if (static_cast<int>(c.size()) != n) fail(ErrorCode::DimensionMismatch, "center has the wrong dimension");
  MassRoute route = opt.route == MassRoute::Auto ? (n == 1 ? MassRoute::Flux : MassRoute::Grid) : opt.route;
  if (route == MassRoute::Flux && n != 1) fail(ErrorCode::DimensionMismatch, "the flux route needs n = 1");

  DemaillyReport out;
  for (double r : radii) {
    if (!(r > 0)) fail(ErrorCode::InvalidArgument, "radii must be positive");
    DemaillyRow row;
    row.r = r;
    row.log_r = std::log(r);
    row.mass = route == MassRoute::Flux ? level_flux(phi, c[0], row.log_r, opt.angles, opt.unbounded_radius, row.bounded)
                                        : grid_mass(phi, n, c, row.log_r, opt, row.bounded);
    if (std::abs(row.mass) < 1e-12) row.mass = 0;
    row.ratio = row.log_r > 0 ? row.mass / row.log_r : kInf;
    row.ratio_n = row.log_r > 0 ? row.mass / std::pow(row.log_r, n) : kInf;
    out.rows.push_back(row);
  }
  out.vanishing = trend(out.rows, &DemaillyRow::ratio);
  out.liminf = trend(out.rows, &DemaillyRow::ratio_n);
  return out;
}

namespace {

void patch_jacobian(const VarietyPatch& v, std::span<const double> t, std::span<double> J) {
  const int m = 2 * v.n;
  if (v.jacobian) {
    v.jacobian(t, J);
    return;
  }
  std::vector<double> tp(t.begin(), t.end());
  std::vector<cplx> wp(v.N), wm(v.N);
  for (int i = 0; i < m; ++i) {
    const double d = 1e-6 * (1 + std::abs(t[i]));
    tp[i] = t[i] + d;
    v.map(tp, wp);
    tp[i] = t[i] - d;
    v.map(tp, wm);
    tp[i] = t[i];
    for (int j = 0; j < v.N; ++j) {
      cplx g = (wp[j] - wm[j]) / (2 * d);
      J[(2 * j) * m + i] = g.real();
      J[(2 * j + 1) * m + i] = g.imag();
    }
  }
}

double area_density(const VarietyPatch& v, std::span<const double> t, std::vector<double>& J) {
  const int m = 2 * v.n, rows = 2 * v.N;
  patch_jacobian(v, t, J);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(J.data(), rows, m);
  double det = (M.transpose() * M).determinant();
  return std::sqrt(std::max(det, 0.0));
}

// Unit vector of R^{2n} in polar/Hopf coordinates and its measure factor.
struct Ray {
  std::vector<double> d;
  double weight;
};

std::vector<Ray> ray_fan(int n, int angles) {
  std::vector<Ray> out;
  if (n == 1) {
    for (int j = 0; j < angles; ++j) {
      double th = kTwoPi * j / angles;
      out.push_back({{std::cos(th), std::sin(th)}, kTwoPi / angles});
    }
    return out;
  }
  const int nx = std::max(4, angles / 4);
  const int ne = std::max(2, angles / 8);
  for (auto [eta, we] : gauss_legendre(ne, 0, 0.5 * std::numbers::pi)) {
    for (int a = 0; a < nx; ++a)
      for (int b = 0; b < nx; ++b) {
        double x1 = kTwoPi * a / nx, x2 = kTwoPi * b / nx;
        out.push_back({{std::cos(eta) * std::cos(x1), std::cos(eta) * std::sin(x1), std::sin(eta) * std::cos(x2),
                        std::sin(eta) * std::sin(x2)},
                       we * std::cos(eta) * std::sin(eta) * (kTwoPi / nx) * (kTwoPi / nx)});
      }
  }
  return out;
}

double patch_area(const VarietyPatch& v, double r, int angles, int radial, bool& truncated) {
  const int m = 2 * v.n;
  std::vector<double> c = v.center;
  if (c.empty())
    for (int i = 0; i < m; ++i) c.push_back(0.5 * (v.lo[i] + v.hi[i]));
  std::vector<double> t(m), J(2 * v.N * m);
  std::vector<cplx> w(v.N);
  auto norm_at = [&](const std::vector<double>& d, double s) {
    for (int i = 0; i < m; ++i) t[i] = c[i] + s * d[i];
    v.map(t, w);
    double q = 0;
    for (cplx x : w) q += std::norm(x);
    return std::sqrt(q);
  };
  double total = 0;
  for (const Ray& ray : ray_fan(v.n, angles)) {
    double exit = kInf;
    for (int i = 0; i < m; ++i) {
      if (ray.d[i] > 1e-15) exit = std::min(exit, (v.hi[i] - c[i]) / ray.d[i]);
      if (ray.d[i] < -1e-15) exit = std::min(exit, (v.lo[i] - c[i]) / ray.d[i]);
    }
    auto hit = first_crossing([&](double s) { return norm_at(ray.d, s); }, r, exit);
    if (hit && *hit == 0) fail(ErrorCode::InvalidArgument, "the patch center maps outside the ball");
    if (!hit) truncated = true;
    const double top = hit ? *hit : exit;
    double inner = 0;
    for (auto [s, ws] : gauss_legendre(radial, 0, top)) {
      for (int i = 0; i < m; ++i) t[i] = c[i] + s * ray.d[i];
      inner += ws * std::pow(s, m - 1) * area_density(v, t, J);
    }
    total += ray.weight * inner;
  }
  return total;
}

}  // namespace

bool spot_check_injective(const VarietyPatch& v, int pairs, std::uint64_t seed) {
  const int m = 2 * v.n;
  std::mt19937_64 rng(seed);
  std::vector<double> a(m), b(m);
  std::vector<cplx> wa(v.N), wb(v.N);
  double diam = 0;
  for (int i = 0; i < m; ++i) diam = std::max(diam, v.hi[i] - v.lo[i]);
  for (int k = 0; k < pairs; ++k) {
    double sep = 0;
    for (int i = 0; i < m; ++i) {
      std::uniform_real_distribution<double> U(v.lo[i], v.hi[i]);
      a[i] = U(rng);
      b[i] = U(rng);
      sep = std::max(sep, std::abs(a[i] - b[i]));
    }
    if (sep < 1e-6 * diam) continue;
    v.map(a, wa);
    v.map(b, wb);
    double dist = 0, scale = 1;
    for (int j = 0; j < v.N; ++j) {
      dist = std::max(dist, std::abs(wa[j] - wb[j]));
      scale = std::max(scale, std::abs(wa[j]));
    }
    if (dist < 1e-12 * scale) return false;
  }
  return true;
}

VolumeReport projective_volume(const VarietyPatch& v, const std::vector<double>& radii, const VolumeQuadrature& q) {
  if (v.n < 1 || v.n > 2) fail(ErrorCode::DimensionMismatch, "variety patches support n = 1 or 2");
  if (static_cast<int>(v.lo.size()) != 2 * v.n || v.hi.size() != v.lo.size() || !v.map)
    fail(ErrorCode::InvalidArgument, "variety patch needs a 2n-dimensional box and a map");
  VolumeReport out;
  for (double r : radii) {
    VolumeRow row;
    row.r = r;
    bool t1 = false, t2 = false;
    row.area = patch_area(v, r, q.angles, q.radial, t1);
    row.coarse = patch_area(v, r, std::max(4, q.angles / 2), std::max(2, q.radial / 2), t2);
    row.truncated = t1 || t2;
    double drift = std::abs(row.area - row.coarse) / std::max(std::abs(row.area), 1e-300);
    if (drift > 0.05)
      fail(ErrorCode::QuadratureUnstable,
           "area at r = " + std::to_string(r) + " moved by " + std::to_string(100 * drift) + "% under refinement");
    out.max_drift = std::max(out.max_drift, drift);
    row.vol = row.area / std::pow(r, 2 * v.n);
    row.vol_over_log = r > 1 ? row.vol / std::log(r) : kInf;
    out.rows.push_back(row);
  }
  std::size_t counted = 0;
  bool decreasing = true;
  double prev = kInf;
  for (const auto& row : out.rows) {
    if (row.r <= 1) continue;
    ++counted;
    if (!std::isfinite(row.vol_over_log) || row.vol_over_log > prev * (1 + 1e-3)) decreasing = false;
    prev = row.vol_over_log;
  }
  out.sibony_wong = counted >= 2 && decreasing;
  return out;
}

TakegoshiReport takegoshi_check(const std::vector<VolumeRow>& table, const std::function<double(double)>& g,
                                const std::vector<double>& r_max) {
  TakegoshiReport out;
  if (table.empty()) return out;
  double r0 = kInf;
  out.sup_finite = true;
  std::vector<double> probe;
  for (const auto& row : table) {
    r0 = std::min(r0, row.r);
    double gr = g(row.r);
    probe.push_back(row.r);
    if (!(gr > 0)) {
      out.admissible = false;
      continue;
    }
    double ratio = row.vol / gr;
    if (!std::isfinite(ratio)) out.sup_finite = false;
    out.sup_ratio = std::max(out.sup_ratio, ratio);
  }
  std::vector<double> rm = r_max;
  std::sort(rm.begin(), rm.end());
  for (double R : rm) {
    if (!(R > r0)) fail(ErrorCode::InvalidArgument, "r_max must exceed the smallest table radius");
    const double s0 = std::log(r0), s1 = std::log(R);
    const int panels = std::max(4, static_cast<int>(std::ceil((s1 - s0) / 0.25)));
    double sum = 0;
    for (auto [s, w] : composite_gauss_legendre(panels, 8, s0, s1)) {
      double r = std::exp(s), gr = g(r);
      probe.push_back(r);
      if (!(gr > 0)) {
        out.admissible = false;
        continue;
      }
      sum += w * r / gr;
    }
    out.partial.push_back({R, sum});
  }
  std::sort(probe.begin(), probe.end());
  for (std::size_t i = 1; i < probe.size(); ++i)
    if (g(probe[i]) < g(probe[i - 1]) * (1 - 1e-12)) out.admissible = false;
  out.divergent = out.partial.size() >= 2 && out.partial.back().value > 2 * out.partial.front().value;
  out.pass = out.admissible && out.sup_finite && out.divergent;
  return out;
}

}  // namespace ppl
