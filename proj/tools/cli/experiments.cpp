#include "experiments.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "catalog.hpp"
#include "ppl/calculus.hpp"
#include "ppl/criteria.hpp"
#include "ppl/envelope.hpp"
#include "ppl/error.hpp"
#include "ppl/exhaustion.hpp"
#include "ppl/parallel.hpp"
#include "ppl/pmeasure.hpp"
#include "ppl/spectra.hpp"
#include "ppl/supnorm.hpp"

#ifndef PPL_VERSION
#define PPL_VERSION "unknown"
#endif

namespace ppl::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// libstdc++ engines and distributions are fixed algorithms, so a seed gives
// the same stream on every run of the same build.
using Rng = std::mt19937_64;

double uniform(Rng& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
double gauss(Rng& g) { return std::normal_distribution<double>()(g); }
cplx cgauss(Rng& g) {
  double re = gauss(g);
  return {re, gauss(g)};
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double norm2(std::span<const cplx> z) {
  double s = 0;
  for (auto x : z) s += std::norm(x);
  return s;
}

// (2 pi)^n / (r - s)^n for the log norm; the caller must supply it otherwise.
double default_capacity(Params& p, const Field& f, const std::string& key, double width) {
  if (p.has(key) || f.label != "log-norm") return p.number(key);
  p.number(key, 0);
  return std::pow(2 * kPi / width, f.n);
}

// ---- pmeasure

Outcome pmeasure_extremal(const Scenario&, Params& p, Artifacts& out) {
  Field f = field_from(p);
  const double s0 = p.number("s", 0.0), r = p.number("r", 1.0), h = p.number("h", 0.02);
  const double half = p.number("half_width", std::exp(r) + 2 * h);
  const double tol = p.number("tolerance", 0.03);
  const bool closed = p.boolean("closed_form", true);
  const bool cache = p.boolean("save_field", false);
  const int profile = p.integer("profile_points", 200);
  p.finish();

  auto c = sublevel_condenser(f.phi, s0, r, Box::centered(f.n, half), h);
  auto ext = relative_extremal(c);
  auto exact = [&](std::span<const cplx> z) { return std::clamp((f.phi(z) - r) / (r - s0), -1.0, 0.0); };

  const GridDomain& g = *c.domain;
  std::vector<cplx> z(f.n);
  double err = 0;
  std::size_t nodes = 0;
  {
    std::optional<Csv> grid;
    if (f.n == 1) grid.emplace(out.csv("omega.csv", {"x", "y", "omega", "closed_form"}));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cls(i) != NodeClass::Interior) continue;
      g.point(i, z);
      double e = exact(z);
      err = std::max(err, std::abs(ext.omega[i] - e));
      ++nodes;
      if (grid) {
        *grid << z[0].real() << z[0].imag() << ext.omega[i] << e;
        grid->end_row();
      }
    }
  }
  {
    Csv prof = out.csv("profile.csv", {"radius", "omega", "closed_form"});
    for (int k = 0; k <= profile; ++k) {
      std::fill(z.begin(), z.end(), cplx(0));
      z[0] = half * k / profile;
      if (!(f.phi(z) < r)) break;
      prof << z[0].real() << value_at(c, ext.omega, z) << exact(z);
      prof.end_row();
    }
  }
  if (cache) save_field(out.path("omega.bin"), ext.omega);

  json s{{"phi", f.label}, {"dim", f.n},          {"h", h},
         {"nodes", nodes}, {"iterations", ext.iterations}, {"residual", ext.residual}};
  if (closed) {
    s["sup_error"] = err;
    s["tolerance"] = tol;
  }
  return {!closed || err <= tol, s};
}

Outcome pmeasure_triviality(const Scenario&, Params& p, Artifacts& out) {
  const std::string manifold = p.string("manifold", "plane");
  if (manifold != "plane" && manifold != "disk") p.error("manifold", "expected plane or disk");
  const bool plane = manifold == "plane";
  const double a = p.number("compact_radius", plane ? 1.0 : 0.25);
  const auto levels = p.numbers("levels", {2, 4, 8, 16});
  const auto radii = p.numbers("probe_radii", {plane ? std::exp(1.0) : 0.6});
  const int angles = p.integer("angles", 32);
  const double h = p.number("h", 0.02);
  LimitOptions opt;
  opt.margin = p.number("margin", opt.margin);
  const double tol = p.number("tolerance", 0.05);
  const std::string expect = p.string("expect", plane ? "trivial" : "nontrivial");
  p.finish();

  auto K = [a](std::span<const cplx> z) { return std::abs(z[0]) <= a; };
  auto outer = [&](double t) { return plane ? std::exp(t) : 1 - std::pow(2.0, -t); };
  DomainBuilder build;
  if (plane) {
    build = [=](double t) { return log_polar_domain(a, std::exp(t), angles); };
  } else {
    build = [=](double t) {
      double rho = 1 - std::pow(2.0, -t);
      return ChartedDomain{
          build_sublevel_domain([](std::span<const cplx> z) { return std::abs(z[0]); }, rho, Box::centered(1, 1 + 2 * h), h),
          {}};
    };
  }
  std::vector<std::vector<cplx>> probes;
  for (double rho : radii) probes.push_back({cplx(rho, 0)});
  auto rep = pmeasure_limit(K, levels, build, probes, opt);

  // harmonic measure of the annulus a < |z| < outer
  double err = 0;
  Csv csv = out.csv("limit.csv", {"level", "probe_radius", "value", "closed_form", "residual"});
  for (const auto& row : rep.rows) {
    double rho = radii[row.probe];
    double exact = -1 + std::log(rho / a) / std::log(outer(row.level) / a);
    err = std::max(err, std::abs(row.value - exact));
    csv << row.level << rho << row.value << exact << row.residual;
    csv.end_row();
  }
  json fits = json::array();
  for (const auto& fit : rep.fits)
    fits.push_back({{"gap_limit", fit.gap_limit}, {"slope", fit.slope}, {"rms", fit.rms},
                    {"monotone", fit.monotone}, {"verdict", triviality_name(fit.verdict)}});
  const std::string verdict = triviality_name(rep.verdict);
  json s{{"manifold", manifold}, {"verdict", verdict},  {"expect", expect},     {"fits", fits},
         {"max_error", err},     {"tolerance", tol},    {"degenerate", rep.degenerate}};
  return {verdict == expect && err <= tol && !rep.degenerate, s};
}

Outcome pmeasure_capacity(const Scenario&, Params& p, Artifacts& out) {
  Field f = field_from(p);
  const double s0 = p.number("s", 0.0), r = p.number("r", 1.0), h = p.number("h", 0.04);
  const double half = p.number("half_width", std::exp(r) + 2 * h);
  const std::string route = p.string("route", "auto");
  const double expected = default_capacity(p, f, "expected", r - s0);
  const double tol = p.number("tolerance", 0.05);
  const double agreement = p.number("agreement", 0.10);
  CapacityOptions opt;
  if (route == "generator") opt.route = CapacityRoute::Generator;
  else if (route == "flux") opt.route = CapacityRoute::Flux;
  else if (route != "auto") p.error("route", "expected auto, generator or flux");
  p.finish();

  auto c = sublevel_condenser(f.phi, s0, r, Box::centered(f.n, half), h);
  auto cap = capacity(c, opt);

  bool pass = cap.generator || cap.flux;
  json s{{"phi", f.label}, {"dim", f.n}, {"h", h}, {"expected", expected}, {"tolerance", tol}};
  Csv csv = out.csv("capacity.csv", {"route", "value", "expected", "relative_error"});
  auto row = [&](const char* name, const std::optional<double>& v) {
    if (!v) return;
    double e = rel_err(*v, expected);
    pass = pass && e <= tol;
    s[name] = *v;
    csv << std::string(name) << *v << expected << e;
    csv.end_row();
  };
  row("generator", cap.generator);
  row("flux", cap.flux);
  if (cap.discrepancy) {
    s["discrepancy"] = *cap.discrepancy;
    s["agreement"] = agreement;
    pass = pass && *cap.discrepancy <= agreement;
  }
  return {pass, s};
}

// u <= -u1 omega + uR (1 + omega) for random psh u on the condenser.
Outcome pmeasure_bound(const Scenario& sc, Params& p, Artifacts& out) {
  const int count = p.integer("functions", 20);
  const double h = p.number("h", 0.05);
  p.finish();

  auto c = sublevel_condenser([](std::span<const cplx> z) { return std::log(std::abs(z[0])); }, 0, 1,
                              Box::centered(1, std::exp(1.0) + 2 * h), h);
  auto ext = relative_extremal(c);
  const GridDomain& g = *c.domain;
  Rng rng(sc.seed);
  Csv csv = out.csv("bound.csv", {"function", "u1", "uR", "worst_violation", "slack", "holds"});
  bool pass = true;
  double worst = -kInf;
  for (int t = 0; t < count; ++t) {
    // Re(cubic) + alpha |z|^2 + sum w_k ln|z - a_k|
    cplx c1 = cgauss(rng), c2 = cgauss(rng), c3 = 0.2 * cgauss(rng);
    std::vector<cplx> a(3);
    std::vector<double> w(3);
    for (int k = 0; k < 3; ++k) {
      double rad = uniform(rng, 0, 5);
      a[k] = std::polar(rad, uniform(rng, 0, 2 * kPi));
      w[k] = uniform(rng, 0.1, 1);
    }
    const double alpha = uniform(rng, 0, 0.5);
    auto u = field_from_evaluator(c.domain, [&](std::span<const cplx> zz) {
      cplx z = zz[0];
      double v = (c1 * z + c2 * z * z + c3 * z * z * z).real() + alpha * std::norm(z);
      for (int k = 0; k < 3; ++k) v += w[k] * std::log(std::abs(z - a[k]));
      return v;
    });
    double u1 = -kInf, uR = -kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cls(i) == NodeClass::Outside || !std::isfinite(u[i])) continue;
      uR = std::max(uR, u[i]);
      if (c.compact[i]) u1 = std::max(u1, u[i]);
    }
    auto b = check_extremal_bound(u, ext.omega, u1, uR);
    pass = pass && b.holds;
    worst = std::max(worst, b.worst_violation);
    csv << static_cast<double>(t) << u1 << uR << b.worst_violation << b.slack << std::string(b.holds ? "1" : "0");
    csv.end_row();
  }
  return {pass, {{"functions", count}, {"h", h}, {"worst_violation", worst}}};
}

// ---- envelope

struct Problem {
  std::vector<double> obstacle, boundary;
};

Problem random_problem(Rng& rng, const GridDomain& g, double half) {
  struct Bump {
    cplx c;
    double a, w;
  };
  std::vector<Bump> bumps(std::uniform_int_distribution<int>(2, 5)(rng));
  for (auto& b : bumps) {
    double x = uniform(rng, -half, half), y = uniform(rng, -half, half);
    double amp = uniform(rng, -1.5, 1.0);
    b = {cplx(x, y), amp, uniform(rng, 0.1, 0.6)};
  }
  const double base = uniform(rng, -0.2, 0.5);
  double hx = uniform(rng, -half, half), hy = uniform(rng, -half, half);
  const cplx hole(hx, hy);
  const double hole_r = uniform(rng, 0, 0.3 * half);
  const double gx = uniform(rng, -1, 1), gy = uniform(rng, -1, 1), gc = uniform(rng, -0.5, 0.5);
  Problem p;
  p.obstacle.resize(g.size());
  p.boundary.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx z = g.point(i)[0];
    double v = base;
    for (auto& b : bumps) v += b.a * std::exp(-std::norm(z - b.c) / (b.w * b.w));
    if (std::abs(z - hole) < hole_r) v = kInf;
    p.obstacle[i] = v;
    double gv = gc + 0.3 * (gx * z.real() + gy * z.imag()) + 0.2 * std::sin(2 * z.real());
    p.boundary[i] = std::isfinite(v) ? std::min(gv, v) : gv;
  }
  return p;
}

// Raising the data never lowers the envelope, and every harmonic function
// below the data stays below it.
Outcome envelope_random(const Scenario& sc, Params& p, Artifacts& out) {
  const int count = p.integer("problems", 50);
  const int nodes = p.integer("nodes", 17);
  const double h = p.number("h", 0.1);
  const double tol = p.number("tolerance", 1e-9);
  const double stop = p.number("stop_tol", 1e-11);
  p.finish();
  if (nodes < 5) p.error("nodes", "need at least 5 nodes per axis");

  const double half = 0.5 * (nodes - 1) * h;
  auto dom = build_box_domain(Box::cube(1, -half, half), h);
  const GridDomain& g = *dom;
  Rng rng(sc.seed);
  Csv csv = out.csv("problems.csv",
                    {"problem", "iterations", "obstacle_excess", "boundary_error", "monotone_gap", "comparison_gap"});
  bool pass = true;
  double worst_mono = kInf, worst_cmp = kInf, worst_excess = -kInf;
  for (int t = 0; t < count; ++t) {
    Problem a = random_problem(rng, g, half);
    Problem b = a;
    for (std::size_t i = 0; i < g.size(); ++i) {
      b.obstacle[i] += uniform(rng, 0, 0.3);
      // stays >= a.boundary because a.boundary <= a.obstacle
      b.boundary[i] = std::min(b.boundary[i] + uniform(rng, 0, 0.3), b.obstacle[i]);
    }
    const double lx = uniform(rng, -1, 1), ly = uniform(rng, -1, 1);
    auto solve_one = [&](const Problem& q) {
      EnvelopeProblem ep{ScalarField(dom, q.obstacle), ScalarField(dom, q.boundary)};
      ep.scheme.stop_tol = stop;
      auto res = solve(ep);
      res.require_converged();
      return res;
    };
    auto ra = solve_one(a), rb = solve_one(b);

    // l = lx x + ly y + shift, shifted down until it sits below the data of a
    double shift = kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx z = g.point(i)[0];
      double lin = lx * z.real() + ly * z.imag();
      double cap = g.cls(i) == NodeClass::Interior ? a.obstacle[i] : a.boundary[i];
      if (g.cls(i) == NodeClass::Interior && !std::isfinite(cap)) continue;
      shift = std::min(shift, cap - lin);
    }
    double excess = -kInf, bnd = 0, mono = kInf, cmp = kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double u = ra.solution[i];
      cplx z = g.point(i)[0];
      if (g.cls(i) == NodeClass::Interior) {
        if (std::isfinite(a.obstacle[i])) excess = std::max(excess, u - a.obstacle[i]);
      } else {
        bnd = std::max(bnd, std::abs(u - a.boundary[i]));
      }
      mono = std::min(mono, rb.solution[i] - u);
      cmp = std::min(cmp, u - (lx * z.real() + ly * z.imag() + shift));
    }
    pass = pass && excess <= tol && bnd <= tol && mono >= -tol && cmp >= -tol;
    worst_mono = std::min(worst_mono, mono);
    worst_cmp = std::min(worst_cmp, cmp);
    worst_excess = std::max(worst_excess, excess);
    csv << static_cast<double>(t) << static_cast<double>(ra.iterations) << excess << bnd << mono << cmp;
    csv.end_row();
  }
  return {pass,
          {{"problems", count},
           {"nodes_per_axis", nodes},
           {"min_monotone_gap", worst_mono},
           {"min_comparison_gap", worst_cmp},
           {"max_obstacle_excess", worst_excess},
           {"tolerance", tol}}};
}

// ---- exhaustion

Outcome exhaustion_verify(const Scenario&, Params& p, Artifacts& out) {
  ExhaustionSpec spec = exhaustion_from(p);
  const double level = p.number("level", 2.0);
  const auto schedule = p.numbers("schedule", {2, 4, 8});
  ExhaustiveOptions eo;
  eo.samples_per_face = static_cast<std::size_t>(p.integer("samples_per_face", 10000));
  const bool increasing = p.boolean("require_increasing", true);
  struct MaxSettings {
    double lo = -2, hi = 2, h = 0.1, collar = 0.3, tol = 0.05;
    int order = 4;
  };
  std::optional<MaxSettings> mx;
  if (p.has("maximal")) {
    Params m = p.object("maximal");
    MaxSettings v;
    auto box = m.numbers("box", {v.lo, v.hi});
    if (box.size() != 2 || !(box[0] < box[1])) m.error("box", "expected [lo, hi] with lo < hi");
    v.lo = box[0];
    v.hi = box[1];
    v.h = m.number("h", v.h);
    v.collar = m.number("collar", v.collar);
    v.tol = m.number("tolerance", v.tol);
    v.order = m.integer("order", v.order);
    m.finish();
    mx = v;
  } else {
    p.boolean("maximal", false);
  }
  p.finish();

  auto rep = verify_exhaustive(spec, level, schedule, eo);
  bool grows = true;
  Csv csv = out.csv("boundary.csv", {"R", "M", "min_value", "samples", "poles_inside", "passed"});
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (i > 0 && !(r.min_value > rep.rows[i - 1].min_value)) grows = false;
    csv << r.R << r.M << r.min_value << static_cast<double>(r.samples) << std::string(r.poles_inside ? "1" : "0")
        << std::string(r.passed ? "1" : "0");
    csv.end_row();
  }
  json s{{"variant", spec.tag()}, {"level", level}, {"success", rep.success}, {"increasing", grows}};
  if (rep.R_found) s["R_found"] = *rep.R_found;
  bool pass = rep.success && (grows || !increasing);
  if (mx) {
    auto m = verify_maximal(spec, Box::cube(spec.dim(), mx->lo, mx->hi), mx->h, mx->collar, mx->tol, mx->order);
    s["maximal"] = {{"maximal", m.maximal},          {"sup_density", m.sup_density},
                    {"curvature_scale", m.curvature_scale}, {"ratio", m.ratio},
                    {"checked_nodes", m.checked_nodes}, {"tolerance", mx->tol}};
    pass = pass && m.maximal;
  }
  return {pass, s};
}

// ---- criteria

Compact compact_from(const json& j, const std::string& where, const std::string* text) {
  Params c(j, where, text);
  const std::string type = c.string("type", "");
  Compact K;
  auto one = [&](const char* key) {
    auto z = c.point(key, {cplx(0)});
    if (z.size() != 1) c.error(key, "expected one coordinate");
    return z[0];
  };
  if (type == "disk") {
    cplx z = one("center");
    K = disk(z, c.number("radius"));
  } else if (type == "segment") {
    cplx a = one("a");
    K = segment(a, one("b"));
  } else if (type == "ball") {
    int n = c.integer("dim", 1);
    K = ball(n, c.number("radius"));
  } else if (type == "polydisc") {
    K = polydisc(c.numbers("radii", {1.0}));
  } else {
    c.error("type", "expected disk, segment, ball or polydisc");
  }
  c.finish();
  return K;
}

Holomorphic from_terms(int n, std::vector<Monomial> terms) {
  return as_holomorphic(EntireFunction::polynomial(Polynomial(n, std::move(terms))));
}

// Random polynomials with complex normal coefficients: one variable, random
// degree in [1, max]; two variables, every monomial of total degree <= max.
// Then the monomials z1^d, d = 1..monomial_degree.
std::vector<Holomorphic> sample_polynomials(Params& p, int n, std::uint64_t seed) {
  const int count = p.integer("random_polynomials", 0);
  const int max_degree = p.integer("max_degree", 15);
  const int mono = p.integer("monomial_degree", 0);
  if (count < 0 || max_degree < 1 || mono < 0) p.error("random_polynomials", "counts and degrees must be positive");
  Rng rng(seed);
  std::vector<Holomorphic> out;
  for (int t = 0; t < count; ++t) {
    std::vector<Monomial> terms;
    if (n == 1) {
      int d = std::uniform_int_distribution<int>(1, max_degree)(rng);
      for (int k = 0; k <= d; ++k) terms.push_back({cgauss(rng), {k}});
    } else {
      for (const auto& e : monomial_basis(n, max_degree)) terms.push_back({cgauss(rng), e});
    }
    out.push_back(from_terms(n, std::move(terms)));
  }
  for (int d = 1; d <= mono; ++d) {
    std::vector<int> e(n, 0);
    e[0] = d;
    out.push_back(from_terms(n, {{1.0, e}}));
  }
  if (out.empty()) p.error("random_polynomials", "no samples requested");
  return out;
}

Outcome criteria_dn_check(const Scenario& sc, Params& p, Artifacts& out) {
  const std::string* text = &sc.text;
  Compact K0 = compact_from(p.raw("K0"), "params.K0", text);
  Compact K = compact_from(p.raw("K"), "params.K", text);
  const json& cj = p.raw("candidates");
  if (!cj.is_array() || cj.empty()) p.error("candidates", "expected a nonempty array of compacts");
  std::vector<Compact> cands;
  for (std::size_t i = 0; i < cj.size(); ++i)
    cands.push_back(compact_from(cj[i], "params.candidates[" + std::to_string(i) + "]", text));
  auto samples = sample_polynomials(p, K.n, sc.seed);
  const double slack = p.number("slack", 1e-9);
  const std::string expect = p.string("expect", "found");
  if (expect != "found" && expect != "violation") p.error("expect", "expected found or violation");
  const int expect_index = p.integer("expect_index", -1);
  p.finish();

  auto res = dn_check(K0, K, cands, samples, slack);
  Csv csv = out.csv("candidates.csv", {"candidate", "name", "worst_sample", "worst_ratio", "passes"});
  for (const auto& w : res.worst_per_candidate) {
    csv << static_cast<double>(w.candidate) << cands[w.candidate].name << static_cast<double>(w.sample) << w.ratio
        << std::string(w.ratio <= 1 + slack ? "1" : "0");
    csv.end_row();
  }
  json s{{"samples", samples.size()}, {"slack", slack}, {"expect", expect}};
  if (res.found) s["found"] = *res.found;
  if (res.violation) s["violation"] = {{"candidate", res.violation->candidate}, {"sample", res.violation->sample},
                                       {"ratio", res.violation->ratio}};
  bool pass = expect == "found" ? res.found.has_value() : !res.found.has_value();
  if (expect_index >= 0) pass = pass && res.found && static_cast<int>(*res.found) == expect_index;
  return {pass, s};
}

Outcome criteria_dn_standard(const Scenario& sc, Params& p, Artifacts& out) {
  ExhaustionSpec spec = exhaustion_from(p);
  const auto levels = p.numbers("levels", {1, 2});
  auto samples = sample_polynomials(p, spec.dim(), sc.seed);
  const double tol = p.number("tolerance", 1e-3);
  DnStandardOptions opt;
  opt.reach = p.number("reach", opt.reach);
  opt.steps = p.integer("steps", opt.steps);
  opt.sup.initial_samples = static_cast<std::size_t>(p.integer("initial_samples", 1024));
  p.finish();

  auto rep = dn_standard_form(spec, levels, samples, opt);
  Csv csv = out.csv("log_convexity.csv", {"k", "sample", "below", "at", "above", "ratio"});
  for (const auto& r : rep.rows) {
    csv << r.k << static_cast<double>(r.sample) << r.below << r.at << r.above << r.ratio;
    csv.end_row();
  }
  return {rep.max_ratio <= 1 + tol,
          {{"variant", spec.tag()}, {"samples", samples.size()}, {"max_ratio", rep.max_ratio}, {"tolerance", tol}}};
}

json trend_json(const TrendVerdict& t) {
  return {{"holds", t.holds},     {"degenerate", t.degenerate}, {"exponent", t.exponent},
          {"minimum", t.minimum}, {"rms", t.rms},               {"points", t.points}};
}

Outcome criteria_demailly(const Scenario&, Params& p, Artifacts& out) {
  Field f = field_from(p);
  const auto logs = p.numbers("log_radii", {4, 16, 64});
  DemaillyOptions opt;
  const std::string route = p.string("route", "auto");
  if (route == "flux") opt.route = MassRoute::Flux;
  else if (route == "grid") opt.route = MassRoute::Grid;
  else if (route != "auto") p.error("route", "expected auto, flux or grid");
  opt.h = p.number("h", opt.h);
  opt.floor = p.number("floor", opt.floor);
  opt.eta = p.number("eta", opt.eta);
  opt.order = p.integer("order", opt.order);
  opt.angles = p.integer("angles", opt.angles);
  const auto want_ratio = p.numbers("expected_ratios", {});
  const double ratio_tol = p.number("ratio_tolerance", 0.03);
  const double want_mass = p.number("expected_mass", -1);
  const double mass_tol = p.number("mass_tolerance", 0.01);
  const std::string expect = p.string("expect", "any");
  if (expect != "any" && expect != "holds" && expect != "fails") p.error("expect", "expected any, holds or fails");
  p.finish();
  if (!want_ratio.empty() && want_ratio.size() != logs.size())
    p.error("expected_ratios", "needs one entry per log radius");

  std::vector<double> radii;
  for (double t : logs) radii.push_back(std::exp(t));
  auto rep = demailly_ratio(f.phi, f.n, radii, opt);

  bool pass = true;
  double worst_ratio = 0, worst_mass = 0;
  Csv csv = out.csv("ratios.csv", {"r", "log_r", "mass", "ratio", "ratio_n", "bounded"});
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    csv << r.r << r.log_r << r.mass << r.ratio << r.ratio_n << std::string(r.bounded ? "1" : "0");
    csv.end_row();
    if (!want_ratio.empty()) worst_ratio = std::max(worst_ratio, rel_err(r.ratio, want_ratio[i]));
    if (want_mass > 0) worst_mass = std::max(worst_mass, rel_err(r.mass, want_mass));
  }
  json s{{"phi", f.label}, {"dim", f.n}, {"vanishing", trend_json(rep.vanishing)}, {"liminf", trend_json(rep.liminf)}};
  if (!want_ratio.empty()) {
    s["max_ratio_error"] = worst_ratio;
    pass = pass && worst_ratio <= ratio_tol;
  }
  if (want_mass > 0) {
    s["max_mass_error"] = worst_mass;
    pass = pass && worst_mass <= mass_tol;
  }
  if (expect != "any") pass = pass && rep.vanishing.holds == (expect == "holds");
  return {pass, s};
}

VarietyPatch patch_from(Params& p, const std::string& name) {
  VarietyPatch v;
  if (name == "plane") {
    v.lo = {-1e3, -1e3};
    v.hi = {1e3, 1e3};
    v.map = [](std::span<const double> t, std::span<cplx> w) { w[0] = {t[0], t[1]}; };
  } else if (name == "parabola") {
    v.N = 2;
    v.lo = {-40, -40};
    v.hi = {40, 40};
    v.map = [](std::span<const double> t, std::span<cplx> w) {
      cplx z(t[0], t[1]);
      w[0] = z;
      w[1] = z * z;
    };
  } else {
    p.error("patch", "expected plane or parabola");
  }
  return v;
}

// Closed-form projective volume: pi for the plane; for w2 = w1^2 the ball
// |w| < r meets the curve in |z|^2 < s with s + s^2 = r^2.
double reference_volume(const std::string& patch, double r) {
  if (patch == "plane") return kPi;
  double s = 0.5 * (-1 + std::sqrt(1 + 4 * r * r));
  return kPi * (s + 2 * s * s) / (r * r);
}

Outcome criteria_volume(const Scenario& sc, Params& p, Artifacts& out) {
  const std::string patch = p.string("patch", "plane");
  VarietyPatch v = patch_from(p, patch);
  const auto radii = p.numbers("radii", {std::exp(1.0), std::exp(2.0), 10, 100});
  VolumeQuadrature q;
  q.angles = p.integer("angles", q.angles);
  q.radial = p.integer("radial", q.radial);
  const double tol = p.number("tolerance", 0.01);
  const double drift_tol = p.number("drift_tolerance", 0.05);
  const bool expect_sw = p.boolean("expect_sibony_wong", true);
  const int pairs = p.integer("injectivity_pairs", 100);
  struct Tg {
    std::string g;
    std::vector<double> r_max;
    bool expect;
  };
  std::optional<Tg> tg;
  if (p.has("takegoshi")) {
    Params t = p.object("takegoshi");
    Tg x{t.string("g", "log"), t.numbers("r_max", {1e3, 1e6}), t.boolean("expect_pass", true)};
    if (x.g != "log" && x.g != "square" && x.g != "one" && x.g != "inverse")
      t.error("g", "expected log, square, one or inverse");
    t.finish();
    tg = x;
  } else {
    p.boolean("takegoshi", false);
  }
  p.finish();

  auto rep = projective_volume(v, radii, q);
  const bool injective = spot_check_injective(v, pairs, sc.seed);
  double err = 0;
  Csv csv = out.csv("volume.csv", {"r", "area", "coarse", "vol", "closed_form", "vol_over_log", "truncated"});
  for (const auto& r : rep.rows) {
    double ref = reference_volume(patch, r.r);
    err = std::max(err, rel_err(r.vol, ref));
    csv << r.r << r.area << r.coarse << r.vol << ref << r.vol_over_log << std::string(r.truncated ? "1" : "0");
    csv.end_row();
  }
  json s{{"patch", patch},          {"sibony_wong", rep.sibony_wong}, {"max_drift", rep.max_drift},
         {"max_error", err},        {"injective", injective}};
  bool pass = err <= tol && rep.max_drift <= drift_tol && rep.sibony_wong == expect_sw && injective;
  if (tg) {
    std::function<double(double)> g;
    if (tg->g == "log") g = [](double r) { return std::log(r); };
    else if (tg->g == "square") g = [](double r) { return r * r; };
    else if (tg->g == "one") g = [](double) { return 1.0; };
    else g = [](double r) { return 1 / r; };
    auto t = takegoshi_check(rep.rows, g, tg->r_max);
    Csv pc = out.csv("takegoshi.csv", {"r_max", "integral"});
    for (const auto& pi : t.partial) {
      pc << pi.r_max << pi.value;
      pc.end_row();
    }
    s["takegoshi"] = {{"g", tg->g},           {"sup_ratio", t.sup_ratio},   {"sup_finite", t.sup_finite},
                      {"divergent", t.divergent}, {"admissible", t.admissible}, {"pass", t.pass}};
    pass = pass && t.pass == tg->expect;
  }
  return {pass, s};
}

// Mass of softmax(ln|z|, cut, eta) on a refining grid against (2 pi)^n.
Outcome criteria_mass_convergence(const Scenario&, Params& p, Artifacts& out) {
  const int n = p.integer("dim", 1);
  if (n < 1 || n > 2) p.error("dim", "expected 1 or 2");
  const auto steps = p.numbers("steps", {0.08, 0.04, 0.02});
  const double cut = p.number("cut", -0.5), eta = p.number("eta", 0.5);
  const double half = p.number("half_width", 2.2), region = p.number("region_radius", 2.0);
  const double min_order = p.number("min_order", 1.5);
  p.finish();
  if (steps.size() < 2) p.error("steps", "need at least two grid steps");

  const double total = std::pow(2 * kPi, n);
  std::vector<double> err;
  Csv csv = out.csv("convergence.csv", {"h", "mass", "error", "order"});
  double worst = kInf;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    auto u = field_from_evaluator(build_box_domain(Box::cube(n, -half, half), steps[k]), [&](std::span<const cplx> z) {
      return soft_max(0.5 * std::log(norm2(z)), cut, eta);
    });
    auto m = ma_mass(u, [&](std::span<const cplx> z) { return norm2(z) < region * region; });
    err.push_back(std::abs(m.mass - total));
    csv << steps[k] << m.mass << err.back();
    if (k > 0) {
      double order = std::log(err[k - 1] / err[k]) / std::log(steps[k - 1] / steps[k]);
      worst = std::min(worst, order);
      csv << order;
    } else {
      csv << std::string("");
    }
    csv.end_row();
  }
  return {worst >= min_order, {{"dim", n}, {"min_observed_order", worst}, {"min_order", min_order}, {"final_error", err.back()}}};
}

// ---- spectra

Outcome spectra_diameters(const Scenario&, Params& p, Artifacts& out) {
  Field f = field_from(p);
  const double l = p.number("l", 0.0), k = p.number("k", 1.0);
  const int degree = p.integer("degree", 40);
  const int m_max = p.integer("m_max", 30);
  auto win = p.numbers("window", {0, static_cast<double>(m_max)});
  if (win.size() != 2 || win[0] < 0 || win[1] < win[0]) p.error("window", "expected [lo, hi] with 0 <= lo <= hi");
  const double cap = default_capacity(p, f, "capacity", k - l);
  const double slope_tol = p.number("slope_tolerance", 0.01);
  const bool closed = p.boolean("closed_form", f.label == "log-norm" && f.n == 1);
  const double closed_tol = p.number("closed_tolerance", 1e-8);
  p.finish();

  auto rep = kolmogorov_diameters(gram_pair(f.phi, f.n, l, k, degree), static_cast<std::size_t>(m_max));
  auto npz = npz_check(rep, cap, f.n, {static_cast<std::size_t>(win[0]), static_cast<std::size_t>(win[1])});

  // concentric disks: d_m = e^{-(k - l)(m + 1)}
  double closed_err = 0;
  Csv csv = out.csv("diameters.csv", {"m", "d", "closed_form", "neg_log_over_root"});
  for (std::size_t m = 0; m < rep.d.size(); ++m) {
    csv << static_cast<double>(m) << rep.d[m];
    if (closed) {
      double e = std::exp(-(k - l) * (m + 1.0));
      if (m <= win[1]) closed_err = std::max(closed_err, rel_err(rep.d[m], e));
      csv << e;
    } else {
      csv << std::string("");
    }
    if (m > 0) csv << -std::log(rep.d[m]) / std::pow(double(m), 1.0 / f.n);
    else csv << std::string("");
    csv.end_row();
  }
  json s{{"phi", f.label},     {"dim", f.n},           {"degree", degree},
         {"m_valid", rep.m_valid}, {"slope", npz.slope},  {"target", npz.target},
         {"relative_gap", npz.relative_gap}, {"rms", npz.rms}, {"points", npz.points},
         {"low_confidence", npz.low_confidence}, {"slope_tolerance", slope_tol}};
  bool pass = npz.relative_gap <= slope_tol && !npz.low_confidence;
  if (closed) {
    s["max_closed_form_error"] = closed_err;
    pass = pass && closed_err <= closed_tol;
  }
  return {pass, s};
}

Outcome spectra_alpha(const Scenario&, Params& p, Artifacts& out) {
  Field f = field_from(p);
  AlphaOptions opt;
  opt.h = p.number("h", 0.15);
  opt.cut = p.number("cut", opt.cut);
  opt.eta = p.number("eta", opt.eta);
  opt.order = p.integer("order", opt.order);
  opt.test_levels = p.numbers("test_levels", {});
  double expected = 0;
  if (f.label == "log-norm" && !p.has("expected")) {
    p.number("expected", 0);
    expected = std::pow(std::tgamma(f.n + 1.0), 1.0 / f.n);
  } else {
    expected = p.number("expected");
  }
  const double tol = p.number("tolerance", 0.02);
  std::optional<std::pair<int, std::vector<double>>> comb;
  if (p.has("combinatorial")) {
    Params c = p.object("combinatorial");
    int m = c.integer("m", 2000);
    auto range = c.numbers("range", {1.37, 1.46});
    if (m < 1) c.error("m", "expected a positive index");
    if (range.size() != 2) c.error("range", "expected [lo, hi]");
    c.finish();
    comb.emplace(m, range);
  } else {
    p.boolean("combinatorial", false);
  }
  p.finish();

  auto rep = alpha_limit(f.phi, f.n, opt);
  auto levels = opt.test_levels;
  if (levels.empty()) levels = {opt.cut + opt.eta + 0.25, opt.cut + opt.eta + 0.5};
  Csv csv = out.csv("ball_masses.csv", {"level", "mass"});
  for (std::size_t i = 0; i < rep.ball_masses.size() && i < levels.size(); ++i) {
    csv << levels[i] << rep.ball_masses[i];
    csv.end_row();
  }
  const double err = rel_err(rep.limit, expected);
  json s{{"phi", f.label}, {"dim", f.n}, {"limit", rep.limit}, {"mass", rep.mass},
         {"expected", expected}, {"relative_error", err}, {"tolerance", tol}};
  bool pass = err <= tol;
  if (comb) {
    const int m = comb->first;
    double a = graded_degrees(f.n, static_cast<std::size_t>(m) + 1)[m];
    double ratio = a / std::pow(double(m), 1.0 / f.n);
    s["combinatorial"] = {{"m", m}, {"alpha_m", a}, {"ratio", ratio}, {"range", comb->second}};
    pass = pass && ratio >= comb->second[0] && ratio <= comb->second[1];
  }
  return {pass, s};
}

Outcome spectra_omega(const Scenario& sc, Params& p, Artifacts& out) {
  Field f = field_from(p);
  const auto lv = p.numbers("levels", {0, 1, 2, 4});
  if (lv.size() != 4) p.error("levels", "expected four levels s0 < s1 < s2 < s");
  const int degree = p.integer("degree", 20);
  const int count = p.integer("functionals", 500);
  const double decay = p.number("decay", 0.5);
  const double bound = p.number("bound", kInf);
  p.finish();

  std::array<LeveledGram, 4> g;
  for (int i = 0; i < 4; ++i) g[i] = {lv[i], gram_matrix({f.phi, f.n, lv[i]}, degree)};
  const auto basis = monomial_basis(f.n, degree);
  Rng rng(sc.seed);
  std::vector<std::vector<cplx>> fs;
  for (int t = 0; t < count; ++t) {
    std::vector<cplx> xi(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      int deg = 0;
      for (int e : basis[j]) deg += e;
      xi[j] = cgauss(rng) * std::exp(-decay * deg);
    }
    fs.push_back(std::move(xi));
  }
  auto res = omega_dual_check(g, fs);
  Csv csv = out.csv("ratios.csv", {"functional", "ratio"});
  bool finite = true;
  for (std::size_t i = 0; i < res.ratios.size(); ++i) {
    finite = finite && std::isfinite(res.ratios[i]);
    csv << static_cast<double>(i) << res.ratios[i];
    csv.end_row();
  }
  json s{{"phi", f.label}, {"dim", f.n}, {"degree", degree}, {"functionals", count}, {"max_ratio", res.max_ratio}};
  if (std::isfinite(bound)) s["bound"] = bound;
  return {finite && res.max_ratio <= bound, s};
}

using Op = Outcome (*)(const Scenario&, Params&, Artifacts&);

const std::map<std::string, std::map<std::string, Op>>& operations() {
  static const std::map<std::string, std::map<std::string, Op>> ops{
      {"pmeasure",
       {{"extremal", pmeasure_extremal},
        {"triviality", pmeasure_triviality},
        {"capacity", pmeasure_capacity},
        {"bound", pmeasure_bound}}},
      {"envelope", {{"random-obstacles", envelope_random}}},
      {"exhaustion-verify", {{"verify", exhaustion_verify}}},
      {"criteria",
       {{"dn-check", criteria_dn_check},
        {"dn-standard", criteria_dn_standard},
        {"demailly", criteria_demailly},
        {"projective-volume", criteria_volume},
        {"mass-convergence", criteria_mass_convergence}}},
      {"spectra", {{"diameters", spectra_diameters}, {"alpha-limit", spectra_alpha}, {"omega", spectra_omega}}},
  };
  return ops;
}

}  // namespace

Outcome run_experiment(const Scenario& s, Artifacts& out) {
  const auto& ops = operations().at(s.command);
  auto it = ops.find(s.operation);
  if (it == ops.end()) {
    std::string known;
    for (const auto& [name, op] : ops) known += (known.empty() ? "" : ", ") + name;
    int line = line_of_key(s.text, "operation");
    fail(ErrorCode::SchemaError, "scenario.operation" + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) +
                                     ": unknown operation '" + s.operation + "' for " + s.command + "; expected " + known);
  }
  Params p(s.params, "params", &s.text);
  Outcome o = it->second(s, p, out);
  out.write_json("verdict.json", {{"pass", o.pass}, {"summary", o.summary}});
  return o;
}

RunResult run_scenario(const std::string& arg, const RunOptions& opt) {
  RunResult res;
  res.verdict = "error";
  Scenario s;
  try {
    s = load_scenario(resolve_scenario(arg));
  } catch (const Error& e) {
    res.message = e.what();
    return res;
  }
  if (opt.seed) s.seed = *opt.seed;
  if (opt.threads) set_thread_count(*opt.threads);
  res.out_dir = !opt.out_dir.empty() ? opt.out_dir : !s.output.empty() ? s.output : "out/" + s.name;

  json manifest{{"scenario", s.name},
                {"path", s.path},
                {"command", s.command},
                {"operation", s.operation},
                {"input_sha256", sha256_hex(s.text)},
                {"seed", s.seed},
                {"threads", thread_count()},
                {"versions",
                 {{"ppl", PPL_VERSION},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"compiler", __VERSION__}}},
                {"start", iso_timestamp()}};
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Artifacts> out;
  try {
    out.emplace(res.out_dir);
    Outcome o = run_experiment(s, *out);
    res.verdict = o.pass ? "pass" : "fail";
    res.exit_code = o.pass ? 0 : 2;
    manifest["summary"] = o.summary;
  } catch (const Error& e) {
    res.exit_code = 1;
    res.message = s.name + ": " + e.what();
    manifest["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  }
  manifest["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["verdict"] = res.verdict;
  if (out) {
    manifest["artifacts"] = out->files();
    out->write_json("manifest.json", manifest);
  }
  return res;
}

}  // namespace ppl::cli
