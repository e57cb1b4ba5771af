#include "ppl/exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "ppl/error.hpp"
#include "ppl/numeric.hpp"

#include <nlohmann/json.hpp>

namespace ppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_abs(cplx w) { return 0.5 * std::log(std::norm(w)); }

double norm2(std::span<const cplx> z) {
  double s = 0;
  for (auto c : z) s += std::norm(c);
  return s;
}

}  // namespace

double pole_series_point(int j) { return j <= 1 ? 0.0 : 1.0 / (j - 1); }

ExhaustionSpec::ExhaustionSpec(int n, ExhaustionVariant v, double scale) : n_(n), v_(std::move(v)), scale_(scale) {
  if (n_ != 1 && n_ != 2) fail(ErrorCode::DimensionMismatch, "exhaustion functions live on C or C^2");
  if (!(scale_ > 0)) fail(ErrorCode::InvalidArgument, "scale must be positive");
  std::visit(overloaded{
                 [&](const EmbeddedLogNorm& e) {
                   if (e.coordinates.empty()) fail(ErrorCode::InvalidArgument, "embedding needs coordinates");
                   for (auto& f : e.coordinates)
                     if (f.nvars() != n_) fail(ErrorCode::DimensionMismatch, "coordinate function arity");
                 },
                 [&](const AlgebraicComplement& a) {
                   if (a.p.nvars() != n_) fail(ErrorCode::DimensionMismatch, "polynomial arity");
                   if (a.p.degree() < 1) fail(ErrorCode::InvalidArgument, "polynomial must be nonconstant");
                 },
                 [&](const WeierstrassComplement& w) {
                   if (w.coefficients.empty()) fail(ErrorCode::InvalidArgument, "Weierstrass order k must be >= 1");
                   for (auto& f : w.coefficients)
                     if (f.nvars() != n_ - 1 && !(n_ == 1 && f.is_constant()))
                       fail(ErrorCode::DimensionMismatch, "Weierstrass coefficients take n-1 variables");
                 },
                 [&](const GraphComplement& g) {
                   if (g.f.nvars() != n_ - 1 && !(n_ == 1 && g.f.is_constant()))
                     fail(ErrorCode::DimensionMismatch, "graph function takes n-1 variables");
                 },
                 [&](const EvansPuncture& e) {
                   if (n_ != 1) fail(ErrorCode::DimensionMismatch, "Evans construction is for n = 1");
                   if (e.punctures.size() != e.weights.size() || e.punctures.empty())
                     fail(ErrorCode::InvalidArgument, "one positive weight per puncture");
                   for (std::size_t j = 0; j < e.punctures.size(); ++j) {
                     if (!(e.weights[j] > 0)) fail(ErrorCode::InvalidArgument, "weights must be positive");
                     if (e.punctures[j] == e.pole) fail(ErrorCode::InvalidArgument, "pole coincides with a puncture");
                   }
                 },
                 [&](const PoleSeries& p) {
                   if (n_ != 2) fail(ErrorCode::DimensionMismatch, "pole series lives on C^2");
                   if (p.terms < 2) fail(ErrorCode::InvalidArgument, "pole series needs at least 2 terms");
                 },
             },
             v_);
  poles_ = locate_poles();
}

std::string ExhaustionSpec::tag() const {
  return std::visit(overloaded{
                        [](const EmbeddedLogNorm&) { return std::string("embedded-log-norm"); },
                        [](const AlgebraicComplement&) { return std::string("algebraic-complement"); },
                        [](const WeierstrassComplement&) { return std::string("weierstrass-complement"); },
                        [](const GraphComplement&) { return std::string("graph-complement"); },
                        [](const EvansPuncture&) { return std::string("evans-puncture"); },
                        [](const PoleSeries&) { return std::string("pole-series"); },
                    },
                    v_);
}

std::vector<EntireFunction> ExhaustionSpec::weierstrass_coefficients() const {
  if (auto* w = std::get_if<WeierstrassComplement>(&v_)) return w->coefficients;
  if (auto* g = std::get_if<GraphComplement>(&v_)) {
    EntireFunction neg(g->f.kind(), g->f.inner(), -g->f.scale());
    return {neg};
  }
  return {};
}

cplx ExhaustionSpec::weierstrass_F(std::span<const cplx> z) const {
  auto coeffs = weierstrass_coefficients();
  const int k = static_cast<int>(coeffs.size());
  std::span<const cplx> head = z.first(n_ - 1);
  cplx zn = z[n_ - 1];
  // Horner in z_n: F = (((1) zn + f1) zn + f2) ... + fk
  cplx F = 1.0;
  for (int j = 0; j < k; ++j) F = F * zn + coeffs[j](head);
  return F;
}

double ExhaustionSpec::operator()(std::span<const cplx> z) const {
  if (static_cast<int>(z.size()) != n_) fail(ErrorCode::DimensionMismatch, "point has the wrong dimension");
  double v = std::visit(
      overloaded{
          [&](const EmbeddedLogNorm& e) {
            double s = 0;
            for (auto& f : e.coordinates) s += std::norm(f(z));
            return 0.5 * std::log(s);
          },
          [&](const AlgebraicComplement& a) {
            cplx P = a.p(z);
            if (P == cplx(0, 0)) return kInf;
            return -log_abs(P) / a.p.degree() + std::log(norm2(z));
          },
          [&](const WeierstrassComplement&) {
            cplx F = weierstrass_F(z);
            if (F == cplx(0, 0)) return kInf;
            return -log_abs(F) + std::log(norm2(z.first(n_ - 1)) + std::norm(F - 1.0));
          },
          [&](const GraphComplement&) {
            cplx F = weierstrass_F(z);
            if (F == cplx(0, 0)) return kInf;
            return -log_abs(F) + std::log(norm2(z.first(n_ - 1)) + std::norm(F - 1.0));
          },
          [&](const EvansPuncture& e) {
            double total = 1, acc = 0;
            for (std::size_t j = 0; j < e.punctures.size(); ++j) {
              if (z[0] == e.punctures[j]) return kInf;
              total += e.weights[j];
              acc -= e.weights[j] * log_abs(z[0] - e.punctures[j]);
            }
            return total * log_abs(z[0] - e.pole) + acc;
          },
          [&](const PoleSeries& p) {
            double acc = log_abs(z[1]);
            for (int j = 1; j <= p.terms; ++j) acc += std::ldexp(1.0, -j) * log_abs(z[0] - pole_series_point(j));
            return acc;
          },
      },
      v_);
  return scale_ * v;
}

std::optional<cplx> ExhaustionSpec::defining(std::span<const cplx> z) const {
  if (auto* a = std::get_if<AlgebraicComplement>(&v_)) return a->p(z);
  if (std::holds_alternative<WeierstrassComplement>(v_) || std::holds_alternative<GraphComplement>(v_))
    return weierstrass_F(z);
  if (auto* e = std::get_if<EvansPuncture>(&v_)) {
    cplx P = 1.0;
    for (auto a : e->punctures) P *= z[0] - a;
    return P;
  }
  return std::nullopt;
}

double ExhaustionSpec::distance_to_removed(std::span<const cplx> z) const {
  if (auto* e = std::get_if<EvansPuncture>(&v_)) {
    double d = kInf;
    for (auto a : e->punctures) d = std::min(d, std::abs(z[0] - a));
    return d;
  }
  if (auto* a = std::get_if<AlgebraicComplement>(&v_)) {
    double g = 0;
    for (int j = 0; j < n_; ++j) g += std::norm(a->p.derivative(z, j));
    double P = std::abs(a->p(z));
    return g > 0 ? P / std::sqrt(g) : (P == 0 ? 0.0 : kInf);
  }
  if (std::holds_alternative<WeierstrassComplement>(v_) || std::holds_alternative<GraphComplement>(v_)) {
    auto coeffs = weierstrass_coefficients();
    const int k = static_cast<int>(coeffs.size());
    std::span<const cplx> head = z.first(n_ - 1);
    cplx zn = z[n_ - 1];
    cplx dn = static_cast<double>(k) * std::pow(zn, k - 1);
    for (int j = 1; j < k; ++j) dn += static_cast<double>(k - j) * coeffs[j - 1](head) * std::pow(zn, k - j - 1);
    double g = std::norm(dn);
    for (int i = 0; i < n_ - 1; ++i) {
      cplx di = 0;
      for (int j = 1; j <= k; ++j) di += coeffs[j - 1].derivative(head, i) * std::pow(zn, k - j);
      g += std::norm(di);
    }
    double F = std::abs(weierstrass_F(z));
    return g > 0 ? F / std::sqrt(g) : (F == 0 ? 0.0 : kInf);
  }
  return kInf;
}

std::vector<std::vector<cplx>> ExhaustionSpec::locate_poles() const {
  std::vector<std::vector<cplx>> out;
  std::vector<cplx> origin(n_, 0.0);
  if (auto* e = std::get_if<EvansPuncture>(&v_)) {
    out.push_back({e->pole});
  } else if (auto* a = std::get_if<AlgebraicComplement>(&v_)) {
    if (a->p(origin) != cplx(0, 0)) out.push_back(origin);
  } else if (auto* em = std::get_if<EmbeddedLogNorm>(&v_)) {
    bool all = true;
    for (auto& f : em->coordinates) all = all && std::abs(f(origin)) == 0;
    if (all) out.push_back(origin);
  } else if (std::holds_alternative<WeierstrassComplement>(v_) || std::holds_alternative<GraphComplement>(v_)) {
    auto coeffs = weierstrass_coefficients();
    const int k = static_cast<int>(coeffs.size());
    std::vector<cplx> head(n_ - 1, 0.0);
    // F(0', t) - 1 as c[0] + c[1] t + ... + c[k] t^k
    std::vector<cplx> c(k + 1, 0.0);
    c[k] = 1.0;
    for (int j = 1; j <= k; ++j) c[k - j] += coeffs[j - 1](head);
    c[0] -= 1.0;
    for (cplx t : polynomial_roots(c)) {
      std::vector<cplx> q(head);
      q.push_back(t);
      out.push_back(q);
    }
  }
  return out;
}

double ExhaustionSpec::distance_to_poles(std::span<const cplx> z) const {
  if (auto* p = std::get_if<PoleSeries>(&v_)) {
    double d = std::abs(z[1]);
    for (int j = 1; j <= p->terms; ++j) d = std::min(d, std::abs(z[0] - pole_series_point(j)));
    return d;
  }
  double d = kInf;
  for (auto& q : pole_points()) {
    double s = 0;
    for (int j = 0; j < n_; ++j) s += std::norm(z[j] - q[j]);
    d = std::min(d, std::sqrt(s));
  }
  return d;
}

PointPredicate ExhaustionSpec::exclusion(double radius) const {
  ExhaustionSpec self = *this;
  return [self, radius](std::span<const cplx> z) {
    if (self.distance_to_removed(z) < radius || self.distance_to_poles(z) < radius) return true;
    return !std::isfinite(self(z));
  };
}

SentinelFunction ExhaustionSpec::sentinel() const {
  ExhaustionSpec self = *this;
  return [self](std::span<const cplx> z) {
    double v = self(z);
    if (std::isinf(v)) return v;
    return self.distance_to_removed(z) <= self.distance_to_poles(z) ? kInf : -kInf;
  };
}

bool ExhaustionSpec::uses_box_faces() const {
  if (n_ < 2) return false;
  for (auto& f : weierstrass_coefficients())
    if (!f.is_constant()) return true;
  return false;
}

MaxModulus m_r(const ExhaustionSpec& spec, double R, int radii, int angles) {
  if (!std::holds_alternative<WeierstrassComplement>(spec.variant()) &&
      !std::holds_alternative<GraphComplement>(spec.variant()))
    fail(ErrorCode::InvalidArgument, "M_R is defined for Weierstrass and graph complements");
  if (!(R > 0)) fail(ErrorCode::InvalidArgument, "R must be positive");
  std::vector<EntireFunction> coeffs;
  if (auto* w = std::get_if<WeierstrassComplement>(&spec.variant()))
    coeffs = w->coefficients;
  else
    coeffs = {std::get<GraphComplement>(spec.variant()).f};
  MaxModulus m;
  std::vector<cplx> p(std::max(1, spec.dim() - 1), 0.0);
  auto visit = [&](cplx zp) {
    if (!p.empty()) p[0] = zp;
    std::span<const cplx> head(p.data(), spec.dim() - 1);
    for (auto& f : coeffs) m.value = std::max(m.value, std::abs(f(head)));
    ++m.samples;
  };
  visit(0.0);
  if (spec.dim() == 1) return m;
  for (int i = 1; i <= radii; ++i)
    for (int a = 0; a < angles; ++a) visit(std::polar(R * i / radii, 2 * kPi * a / angles));
  return m;
}

namespace {

struct Sample {
  double value = kInf;
  std::vector<cplx> point;
  std::vector<double> params;
  int face = 0;
};

// Boundary of U_R as parametrized faces; each face maps a parameter vector to
// a point (or nullopt outside the face).
struct BoundaryModel {
  const ExhaustionSpec& spec;
  double R, Z;  // Z = M_R^2 for box faces
  bool box;

  std::optional<std::vector<cplx>> point(int face, const std::vector<double>& t) const {
    const int n = spec.dim();
    if (!box) {
      if (n == 1) return std::vector<cplx>{std::polar(R, t[0])};
      double eta = std::clamp(t[0], 0.0, kPi / 2);
      return std::vector<cplx>{std::polar(R * std::cos(eta), t[1]), std::polar(R * std::sin(eta), t[2])};
    }
    if (face == 0) {
      cplx zn(t[1], t[2]);
      if (std::abs(zn) > Z) return std::nullopt;
      return std::vector<cplx>{std::polar(R, t[0]), zn};
    }
    cplx zp(t[1], t[2]);
    if (std::abs(zp) > R) return std::nullopt;
    return std::vector<cplx>{zp, std::polar(Z, t[0])};
  }

  double value(int face, const std::vector<double>& t) const {
    auto p = point(face, t);
    if (!p) return kInf;
    double v = spec(*p);
    return std::isnan(v) ? kInf : v;
  }

  void consider(Sample& best, int face, std::vector<double> t) const {
    double v = value(face, t);
    if (v < best.value) {
      best.value = v;
      best.point = *point(face, t);
      best.params = std::move(t);
      best.face = face;
    }
  }

  // Dense sampling with about N points per face.
  Sample sample(std::size_t N) const {
    Sample best;
    const int n = spec.dim();
    if (!box) {
      if (n == 1) {
        for (std::size_t i = 0; i < N; ++i) consider(best, 0, {2 * kPi * i / N});
      } else {
        int c = std::max(4, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(N)))));
        for (int a = 0; a <= c; ++a)
          for (int b = 0; b < c; ++b)
            for (int d = 0; d < c; ++d) consider(best, 0, {kPi / 2 * a / c, 2 * kPi * b / c, 2 * kPi * d / c});
      }
      return best;
    }
    auto coeffs_roots = [&](cplx zp) {
      // roots of F(z', .) = 0 in z_n: rings around them resolve the A-side of the face
      std::vector<cplx> c;
      if (auto* w = std::get_if<WeierstrassComplement>(&spec.variant())) {
        int k = static_cast<int>(w->coefficients.size());
        c.assign(k + 1, 0.0);
        c[k] = 1.0;
        std::vector<cplx> head{zp};
        for (int j = 1; j <= k; ++j) c[k - j] += w->coefficients[j - 1](head);
      } else {
        auto& g = std::get<GraphComplement>(spec.variant());
        std::vector<cplx> head{zp};
        c = {-g.f(head), 1.0};
      }
      return polynomial_roots(c);
    };
    int k = static_cast<int>(coeffs_roots(0.0).size());
    int c = std::max(4, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(N) / (1 + k)))));
    const double rmin = 1e-6, rmax = 2 * Z;
    for (int a = 0; a < c; ++a) {
      double phi = 2 * kPi * a / c;
      cplx zp = std::polar(R, phi);
      std::vector<cplx> centers{0.0};
      for (cplx r : coeffs_roots(zp)) centers.push_back(r);
      for (cplx ctr : centers)
        for (int b = 0; b < c; ++b) {
          double rad = rmin * std::pow(rmax / rmin, static_cast<double>(b) / (c - 1));
          for (int d = 0; d < c; ++d) {
            cplx zn = ctr + std::polar(rad, 2 * kPi * (d + 0.5 * (b % 2)) / c);
            if (std::abs(zn) <= Z) consider(best, 0, {phi, zn.real(), zn.imag()});
          }
        }
    }
    int c2 = std::max(4, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(N)))));
    for (int a = 0; a < c2; ++a)
      for (int b = 0; b <= c2; ++b)
        for (int d = 0; d < c2; ++d) {
          cplx zp = std::polar(R * b / c2, 2 * kPi * d / c2);
          consider(best, 1, {2 * kPi * a / c2, zp.real(), zp.imag()});
        }
    return best;
  }

  void polish(Sample& s) const {
    if (!std::isfinite(s.value) || s.params.empty()) return;
    std::vector<double> step;
    if (!box) {
      step.assign(s.params.size(), 0.05);
    } else if (s.face == 0) {
      cplx zn(s.params[1], s.params[2]);
      double scale = std::max(1e-3, 0.1 * std::abs(zn));
      step = {0.05, scale, scale};
    } else {
      step = {0.05, 0.05 * R, 0.05 * R};
    }
    const int face = s.face;
    auto [x, v] = nelder_mead_max([&](const std::vector<double>& t) { return -value(face, t); }, s.params, step,
                                  SimplexOptions{4000, 1e-14, 1e-14});
    if (-v < s.value) {
      s.value = -v;
      s.params = x;
      s.point = *point(face, x);
    }
  }
};

}  // namespace

void ExhaustiveReport::require_success() const {
  if (!success)
    fail(ErrorCode::ScheduleExhausted,
         "no radius in the schedule clears the level; best boundary minimum " + std::to_string(best_min));
}

ExhaustiveReport verify_exhaustive(const ExhaustionSpec& spec, double level, const std::vector<double>& schedule,
                                   const ExhaustiveOptions& opt) {
  ExhaustiveReport rep;
  const bool box = spec.uses_box_faces();
  const auto& poles = spec.pole_points();
  for (double R : schedule) {
    if (!(R > 0)) fail(ErrorCode::InvalidArgument, "radii must be positive");
    BoundaryRow row;
    row.R = R;
    double Z = 0;
    if (box) {
      row.M = m_r(spec, R).value;
      Z = row.M * row.M;
    } else {
      row.M = R;
    }
    BoundaryModel model{spec, R, Z, box};
    std::size_t N = opt.samples_per_face;
    Sample best = model.sample(N);
    for (int d = 0; d < opt.max_doublings; ++d) {
      N *= 2;
      Sample next = model.sample(N);
      bool stable = std::abs(next.value - best.value) <= opt.stabilize * std::max(1.0, std::abs(best.value));
      if (next.value < best.value) best = next;
      if (stable) break;
    }
    model.polish(best);
    row.min_value = best.value;
    row.argmin = best.point;
    row.samples = N;
    for (auto& q : poles) {
      if (box) {
        double head = 0;
        for (int j = 0; j < spec.dim() - 1; ++j) head += std::norm(q[j]);
        if (std::sqrt(head) > R || std::abs(q.back()) > Z) row.poles_inside = false;
      } else {
        double s = 0;
        for (auto c : q) s += std::norm(c);
        if (std::sqrt(s) >= R) row.poles_inside = false;
      }
    }
    row.passed = row.min_value > level && row.poles_inside;
    rep.best_min = std::max(rep.best_min, row.min_value);
    rep.rows.push_back(row);
    if (row.passed && !rep.R_found) {
      rep.R_found = R;
      rep.success = true;
      if (opt.stop_at_first) break;
    }
  }
  return rep;
}

MaximalReport verify_maximal(const ExhaustionSpec& spec, const Box& box, double h, double collar,
                             double relative_tol, int order) {
  if (!(collar > 0)) fail(ErrorCode::InvalidArgument, "collar must be positive");
  auto dom = build_box_domain(box, h, spec.exclusion(h));
  auto field = field_from_evaluator(dom, [&](std::span<const cplx> z) { return spec(z); }, spec.sentinel());
  auto region = [&](std::span<const cplx> z) {
    return spec.distance_to_removed(z) > collar && spec.distance_to_poles(z) > collar;
  };
  auto v = is_maximal(field, region, kInf, order);
  MaximalReport r;
  r.sup_density = v.sup_density;
  r.curvature_scale = v.curvature_scale;
  r.ratio = v.curvature_scale > 0 ? v.sup_density / v.curvature_scale : 0.0;
  r.checked_nodes = v.checked_nodes;
  r.worst_point = v.worst_point;
  r.maximal = v.sup_density <= relative_tol * v.curvature_scale;
  return r;
}

PoleSeriesDomain pole_series_domain(int terms, const Box& box, double h) {
  ExhaustionSpec spec(2, PoleSeries{terms});
  auto scaffold = build_box_domain(box, h);
  const GridDomain& g = *scaffold;
  std::vector<double> w(g.size());
  std::vector<cplx> p(2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    // lattice coordinates carry rounding noise; a node on a pole is a pole
    w[i] = spec.distance_to_poles(p) < 1e-9 * h ? -kInf : spec(p);
  }
  std::vector<cplx> origin{0.0, 0.0};
  auto start = g.nearest(origin);
  if (!start || std::abs(g.point(*start)[0]) > 1e-9 * h || std::abs(g.point(*start)[1]) > 1e-9 * h)
    fail(ErrorCode::OriginNotInDomain, "the origin of C^2 is not a lattice node");
  std::vector<NodeClass> mask(g.size(), NodeClass::Outside);
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::size_t> queue{*start};
  seen[*start] = 1;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    if (w[i] == -kInf)
      mask[i] = NodeClass::Excluded;
    else
      mask[i] = g.on_array_edge(i) ? NodeClass::Boundary : NodeClass::Interior;
    for (int a = 0; a < 4; ++a)
      for (int s : {-1, 1}) {
        auto j = g.neighbor(i, a, s);
        if (j && !seen[*j] && w[*j] < 0) {
          seen[*j] = 1;
          queue.push_back(*j);
        }
      }
  }
  if (std::find(mask.begin(), mask.end(), NodeClass::Interior) == mask.end())
    fail(ErrorCode::OriginNotInDomain, "the component of the origin has no interior node at this resolution");
  std::vector<std::size_t> promote;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask[i] != NodeClass::Interior) continue;
    for (int a = 0; a < 4; ++a)
      for (int s : {-1, 1}) {
        auto j = g.neighbor(i, a, s);
        if (j && mask[*j] == NodeClass::Outside) promote.push_back(*j);
      }
  }
  for (auto j : promote) mask[j] = NodeClass::Boundary;
  auto dom = std::make_shared<const GridDomain>(g.with_mask(std::move(mask)));
  double reach = 0;
  for (int a = 0; a < 2; ++a) reach = std::max({reach, std::abs(box.lo[a]), std::abs(box.hi[a])});
  PoleSeriesDomain out{dom, ScalarField(dom, std::move(w)), std::ldexp(1.0, -terms) * std::log(1 + std::sqrt(2.0) * reach)};
  return out;
}

namespace {

using nlohmann::json;

json cplx_json(cplx c) {
  if (c.imag() == 0) return c.real();
  return json::array({c.real(), c.imag()});
}

cplx json_cplx(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::SchemaError, "complex number must be a number or [re, im]");
}

json poly_json(const Polynomial& p) {
  json terms = json::array();
  for (auto& m : p.terms()) terms.push_back({{"c", cplx_json(m.coeff)}, {"e", m.exponents}});
  return {{"vars", p.nvars()}, {"terms", terms}};
}

Polynomial json_poly(const json& j) {
  if (!j.is_object() || !j.contains("vars") || !j.contains("terms"))
    fail(ErrorCode::SchemaError, "polynomial needs 'vars' and 'terms'");
  int vars = j.at("vars").get<int>();
  std::vector<Monomial> terms;
  for (auto& t : j.at("terms")) {
    auto e = t.at("e").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != vars) fail(ErrorCode::SchemaError, "exponent vector length differs from 'vars'");
    terms.push_back({json_cplx(t.at("c")), std::move(e)});
  }
  return Polynomial(vars, std::move(terms));
}

json entire_json(const EntireFunction& f) {
  return {{"kind", kind_name(f.kind())}, {"scale", cplx_json(f.scale())}, {"inner", poly_json(f.inner())}};
}

EntireFunction json_entire(const json& j) {
  if (j.contains("vars")) return EntireFunction::polynomial(json_poly(j));
  std::string kind = j.value("kind", "polynomial");
  cplx scale = j.contains("scale") ? json_cplx(j.at("scale")) : cplx(1.0);
  Polynomial inner = json_poly(j.at("inner"));
  if (kind == "polynomial") return {EntireFunction::Kind::Polynomial, inner, scale};
  if (kind == "exp") return {EntireFunction::Kind::Exp, inner, scale};
  if (kind == "sin") return {EntireFunction::Kind::Sin, inner, scale};
  fail(ErrorCode::SchemaError, "unknown entire function kind '" + kind + "'");
}

}  // namespace

std::string to_json(const ExhaustionSpec& spec) {
  json j{{"variant", spec.tag()}, {"dim", spec.dim()}, {"scale", spec.scale()}};
  std::visit(overloaded{
                 [&](const EmbeddedLogNorm& e) {
                   json c = json::array();
                   for (auto& f : e.coordinates) c.push_back(entire_json(f));
                   j["coordinates"] = c;
                 },
                 [&](const AlgebraicComplement& a) { j["polynomial"] = poly_json(a.p); },
                 [&](const WeierstrassComplement& w) {
                   json c = json::array();
                   for (auto& f : w.coefficients) c.push_back(entire_json(f));
                   j["coefficients"] = c;
                 },
                 [&](const GraphComplement& g) { j["function"] = entire_json(g.f); },
                 [&](const EvansPuncture& e) {
                   json p = json::array();
                   for (auto a : e.punctures) p.push_back(cplx_json(a));
                   j["punctures"] = p;
                   j["weights"] = e.weights;
                   j["pole"] = cplx_json(e.pole);
                 },
                 [&](const PoleSeries& p) { j["terms"] = p.terms; },
             },
             spec.variant());
  return j.dump();
}

ExhaustionSpec exhaustion_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, e.what());
  }
  try {
    std::string tag = j.at("variant").get<std::string>();
    int n = j.at("dim").get<int>();
    double scale = j.value("scale", 1.0);
    if (tag == "embedded-log-norm") {
      EmbeddedLogNorm e;
      for (auto& f : j.at("coordinates")) e.coordinates.push_back(json_entire(f));
      return {n, e, scale};
    }
    if (tag == "algebraic-complement") return {n, AlgebraicComplement{json_poly(j.at("polynomial"))}, scale};
    if (tag == "weierstrass-complement") {
      WeierstrassComplement w;
      for (auto& f : j.at("coefficients")) w.coefficients.push_back(json_entire(f));
      return {n, w, scale};
    }
    if (tag == "graph-complement") return {n, GraphComplement{json_entire(j.at("function"))}, scale};
    if (tag == "evans-puncture") {
      EvansPuncture e;
      for (auto& a : j.at("punctures")) e.punctures.push_back(json_cplx(a));
      e.weights = j.at("weights").get<std::vector<double>>();
      e.pole = json_cplx(j.at("pole"));
      return {n, e, scale};
    }
    if (tag == "pole-series") return {n, PoleSeries{j.at("terms").get<int>()}, scale};
    fail(ErrorCode::SchemaError, "unknown exhaustion variant '" + tag + "'");
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, e.what());
  }
}

}  // namespace ppl
