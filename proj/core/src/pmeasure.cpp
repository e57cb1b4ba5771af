#include "ppl/pmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ppl/calculus.hpp"
#include "ppl/error.hpp"
#include "ppl/numeric.hpp"

namespace ppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2 * std::numbers::pi;

bool usable(NodeClass c) { return c != NodeClass::Excluded && c != NodeClass::Outside; }

// Lattice offsets within Euclidean radius 2 (in units of h).
std::vector<GridDomain::Index> ball_offsets(int real_dim) {
  std::vector<GridDomain::Index> out;
  GridDomain::Index d{};
  auto rec = [&](auto&& self, int a, int r2) -> void {
    if (a == real_dim) {
      out.push_back(d);
      return;
    }
    for (int s = -2; s <= 2; ++s) {
      if (r2 + s * s > 4) continue;
      d[a] = s;
      self(self, a + 1, r2 + s * s);
    }
    d[a] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace

std::vector<cplx> Chart::to_manifold(std::span<const cplx> grid) const {
  std::vector<cplx> out(grid.begin(), grid.end());
  if (forward) forward(grid, out);
  return out;
}

std::vector<cplx> Chart::to_grid(std::span<const cplx> point) const {
  std::vector<cplx> out(point.begin(), point.end());
  if (inverse) inverse(point, out);
  return out;
}

Chart log_chart() {
  Chart c;
  c.forward = [](std::span<const cplx> g, std::span<cplx> z) { z[0] = std::exp(g[0]); };
  c.inverse = [](std::span<const cplx> z, std::span<cplx> g) {
    double t = std::arg(z[0]);
    if (t < 0) t += kTwoPi;
    g[0] = cplx(0.5 * std::log(std::norm(z[0])), t);
  };
  return c;
}

ChartedDomain log_polar_domain(double inner_radius, double outer_radius, int angles) {
  if (!(inner_radius > 0) || !(outer_radius > inner_radius))
    fail(ErrorCode::InvalidArgument, "log-polar domain needs 0 < inner < outer radius");
  if (angles < 8) fail(ErrorCode::TooCoarse, "log-polar domain needs at least 8 angles");
  const double s_in = std::log(inner_radius), s_out = std::log(outer_radius);
  // Both circles should sit on lattice lines. The inner one does by choice of
  // origin; pick the angle count that brings the outer one closest.
  int best_n = angles;
  double best_off = kInf;
  for (int n = angles; n < 2 * angles; ++n) {
    double h = kTwoPi / n, k = (s_out - s_in) / h;
    double off = std::abs(k - std::round(k)) * h;
    if (off < best_off - 1e-12) {
      best_off = off;
      best_n = n;
    }
  }
  const double h = kTwoPi / best_n;
  Box box;
  // five layers inside the compact side so it holds a grid ball of radius 2h
  box.lo = {s_in - 5 * h, 0.0};
  box.hi = {s_out + 2 * h, kTwoPi};
  box.periodic = {false, true};
  // the node nearest the outer circle is the pinned layer
  auto dom =
      build_sublevel_domain([=](std::span<const cplx> g) { return g[0].real(); }, s_out - 0.5 * h, box, h);
  return {dom, log_chart()};
}

std::size_t Condenser::compact_nodes() const {
  return static_cast<std::size_t>(std::count(compact.begin(), compact.end(), std::uint8_t{1}));
}

Condenser make_condenser(ChartedDomain D, const PointPredicate& K) {
  const GridDomain& g = *D.domain;
  Condenser c;
  c.domain = D.domain;
  c.chart = std::move(D.chart);
  c.compact.assign(g.size(), 0);
  std::vector<cplx> p(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!usable(g.cls(i))) continue;
    g.point(i, p);
    if (K(c.chart.to_manifold(p))) c.compact[i] = 1;
  }
  if (c.compact_nodes() == 0) fail(ErrorCode::RegionEmpty, "the compact contains no node of the domain");
  auto ball = ball_offsets(g.real_dim());
  bool fat = false;
  for (std::size_t i = 0; i < g.size() && !fat; ++i) {
    if (!c.compact[i]) continue;
    fat = std::all_of(ball.begin(), ball.end(), [&](const GridDomain::Index& d) {
      auto j = g.shifted(i, d);
      return j && c.compact[*j];
    });
  }
  if (!fat) fail(ErrorCode::TooCoarse, "the compact holds no grid ball of radius 2h");
  return c;
}

Condenser sublevel_condenser(const PointFunction& phi, double s, double r, const Box& box, double h) {
  if (!(s < r)) fail(ErrorCode::InvalidArgument, "condenser levels need s < r");
  auto dom = build_sublevel_domain(phi, r, box, h);
  Condenser c = make_condenser({dom, {}}, [&](std::span<const cplx> z) { return phi(z) <= s; });
  c.levels = std::make_pair(s, r);
  c.generator = phi;
  return c;
}

ExtremalField relative_extremal(const Condenser& c, const EnvelopeScheme& scheme) {
  const GridDomain& g = *c.domain;
  std::vector<double> target(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    target[i] = g.cls(i) == NodeClass::Excluded ? kInf : (c.compact[i] ? -1.0 : 0.0);
  ScalarField f(c.domain, target);
  EnvelopeProblem prob{f, f, scheme};
  auto res = solve(prob);
  res.require_converged();
  double resid = residual(res.solution, prob);
  return {res.solution, res.iterations, resid};
}

double value_at(const Condenser& c, const ScalarField& omega, std::span<const cplx> point) {
  return omega.interpolate(c.chart.to_grid(point));
}

const char* triviality_name(Triviality t) {
  switch (t) {
    case Triviality::Trivial: return "trivial";
    case Triviality::Nontrivial: return "nontrivial";
    case Triviality::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Nodes of K are skipped: a chart may truncate the domain inside K.
void check_nested(const ChartedDomain& inner, const ChartedDomain& outer, const PointPredicate& K) {
  const GridDomain& a = *inner.domain;
  const GridDomain& b = *outer.domain;
  std::vector<cplx> p(a.dim());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.cls(i) != NodeClass::Interior) continue;
    a.point(i, p);
    auto z = inner.chart.to_manifold(p);
    if (K(z)) continue;
    auto q = outer.chart.to_grid(z);
    auto j = b.nearest(q);
    if (!j || !usable(b.cls(*j)))
      fail(ErrorCode::NonNestedDomains, "a domain in the sequence is not contained in the next one");
  }
}

}  // namespace

LimitReport pmeasure_limit(const PointPredicate& K, const std::vector<double>& levels, const DomainBuilder& builder,
                           const std::vector<std::vector<cplx>>& probes, const LimitOptions& opt) {
  if (levels.empty() || probes.empty()) fail(ErrorCode::InvalidArgument, "need at least one level and one probe");
  for (std::size_t j = 1; j < levels.size(); ++j)
    if (!(levels[j] > levels[j - 1])) fail(ErrorCode::NonNestedDomains, "levels must increase");
  LimitReport rep;
  std::vector<std::vector<double>> values(probes.size());
  std::optional<ChartedDomain> prev;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    ChartedDomain D = builder(levels[j]);
    if (prev) check_nested(*prev, D, K);
    Condenser c = make_condenser(D, K);
    if (j == 0) {
      std::size_t free = 0;
      for (std::size_t i = 0; i < c.domain->size(); ++i)
        if (c.domain->cls(i) == NodeClass::Interior && !c.compact[i]) ++free;
      rep.degenerate = free == 0;
    }
    for (auto& q : probes) {
      auto j = c.domain->nearest(c.chart.to_grid(q));
      if (!j || !usable(c.domain->cls(*j))) fail(ErrorCode::InvalidArgument, "probe lies outside a domain of the sequence");
    }
    auto ext = relative_extremal(c, opt.scheme);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      double v = value_at(c, ext.omega, probes[k]);
      values[k].push_back(v);
      rep.rows.push_back({levels[j], k, v, ext.residual});
    }
    prev = std::move(D);
  }

  bool all_trivial = true, any_nontrivial = false;
  for (auto& vals : values) {
    ProbeFit fit;
    for (std::size_t j = 1; j < vals.size(); ++j)
      if (vals[j] > vals[j - 1] + opt.monotone_tol) fit.monotone = false;
    std::vector<double> x, y;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      x.push_back(1.0 / levels[j]);
      y.push_back(vals[j] + 1.0);
    }
    if (vals.size() >= 2) {
      auto lf = fit_line(x, y);
      fit.gap_limit = lf.intercept;
      fit.slope = lf.slope;
      fit.rms = lf.rms;
    } else {
      fit.gap_limit = y[0];
    }
    double last_gap = y.back();
    if (rep.degenerate && std::all_of(y.begin(), y.end(), [](double v) { return std::abs(v) < 1e-12; }))
      fit.verdict = Triviality::Trivial;
    else if (vals.size() < 2)
      fit.verdict = Triviality::Inconclusive;
    else if (fit.monotone && std::abs(fit.gap_limit) < opt.margin)
      fit.verdict = Triviality::Trivial;
    else if (fit.gap_limit >= opt.margin && last_gap >= opt.margin)
      fit.verdict = Triviality::Nontrivial;
    all_trivial = all_trivial && fit.verdict == Triviality::Trivial;
    any_nontrivial = any_nontrivial || fit.verdict == Triviality::Nontrivial;
    rep.fits.push_back(fit);
  }
  rep.verdict = any_nontrivial ? Triviality::Nontrivial : all_trivial ? Triviality::Trivial : Triviality::Inconclusive;
  return rep;
}

double flux_mass(const ScalarField& omega, double cut) {
  const GridDomain& g = omega.domain();
  if (g.dim() != 1) fail(ErrorCode::DimensionMismatch, "flux mass is defined for n = 1");
  auto inside = [&](std::size_t i) { return usable(g.cls(i)) && std::isfinite(omega[i]) && omega[i] <= cut; };
  auto outside = [&](std::size_t i) { return usable(g.cls(i)) && std::isfinite(omega[i]) && omega[i] > cut; };
  static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  double sum = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!inside(i)) continue;
    for (int k = 0; k < 8; ++k) {
      auto j = g.shifted(i, GridDomain::Index{dx[k], dy[k], 0, 0});
      if (!j || !outside(*j)) continue;
      sum += (k < 4 ? 4.0 / 6 : 1.0 / 6) * (omega[*j] - omega[i]);
    }
  }
  return sum;
}

CapacityReport capacity(const Condenser& c, const CapacityOptions& opt) {
  CapacityReport rep;
  const GridDomain& g = *c.domain;
  const bool have_gen = c.levels && c.generator;
  bool want_gen = opt.route == CapacityRoute::Generator || (opt.route == CapacityRoute::Auto && have_gen);
  bool want_flux = opt.route == CapacityRoute::Flux || (opt.route == CapacityRoute::Auto && g.dim() == 1);
  if (want_gen && !have_gen) fail(ErrorCode::MissingLevels, "the generator route needs levels (s, r) and a generator");
  if (want_flux && g.dim() != 1) fail(ErrorCode::DimensionMismatch, "the flux route is defined for n = 1");

  if (want_gen) {
    auto [s, r] = *c.levels;
    double eta = opt.smoothing > 0 ? opt.smoothing : (r - s) / 4;
    if (!(eta < (r - s) / 2)) fail(ErrorCode::InvalidArgument, "smoothing must stay below half the level gap");
    const Chart& chart = c.chart;
    const PointFunction& phi = c.generator;
    auto field = field_from_evaluator(
        c.domain, [&](std::span<const cplx> p) { return soft_max(phi(chart.to_manifold(p)), s, eta); });
    double mid = 0.5 * (s + r);
    auto m = ma_mass(field, [&](std::span<const cplx> p) { return phi(chart.to_manifold(p)) < mid; });
    rep.generator = m.mass / std::pow(r - s, g.dim());
    rep.mass_nodes = m.used_nodes;
  }
  if (want_flux) {
    auto ext = relative_extremal(c, opt.scheme);
    rep.flux = flux_mass(ext.omega, opt.flux_cut);
  }
  if (rep.generator && rep.flux) rep.discrepancy = std::abs(*rep.generator - *rep.flux) / std::abs(*rep.flux);
  return rep;
}

BoundCheck check_extremal_bound(const ScalarField& u, const ScalarField& omega, double u1, double uR) {
  const GridDomain& g = u.domain();
  if (!g.same_lattice(omega.domain())) fail(ErrorCode::DimensionMismatch, "fields live on different lattices");
  BoundCheck b;
  // rounding floor so that constant fields compare equal to themselves
  b.slack = std::max(1e-6 * (u.max_finite() - u.min_finite()), 1e-12 * (std::abs(u1) + std::abs(uR) + 1));
  b.worst_violation = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!usable(g.cls(i)) || !usable(omega.domain().cls(i))) continue;
    if (!std::isfinite(u[i]) || !std::isfinite(omega[i])) continue;
    ++b.checked_nodes;
    double v = u[i] - (-u1 * omega[i] + uR * (1 + omega[i]));
    if (v > b.worst_violation) {
      b.worst_violation = v;
      b.worst_node = i;
    }
  }
  b.holds = b.checked_nodes == 0 || b.worst_violation <= b.slack;
  return b;
}

}  // namespace ppl
