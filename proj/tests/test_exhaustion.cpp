#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "gen.hpp"
#include "ppl/error.hpp"
#include "ppl/exhaustion.hpp"

using namespace ppl;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

Polynomial z(int n, int j) { return Polynomial::variable(n, j); }
EntireFunction exp1() { return EntireFunction::exp_of(z(1, 0)); }

ExhaustionSpec graph_exp() { return ExhaustionSpec(2, GraphComplement{exp1()}); }
ExhaustionSpec weierstrass_zero() {
  return ExhaustionSpec(2, WeierstrassComplement{{EntireFunction::polynomial(Polynomial::constant(1, 0.0))}});
}

double val(const ExhaustionSpec& s, std::vector<cplx> p) { return s(p); }

cplx rand_c(oracle::Rng& rng, double r) { return {rng.uniform(-r, r), rng.uniform(-r, r)}; }

bool close(double a, double b, double tol = 1e-12) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * (1 + std::abs(b));
}
}  // namespace

TEST_CASE("pointwise values at hand-checked points") {
  auto w = weierstrass_zero();
  CHECK(val(w, {0.0, 1.0}) == -kInf);
  CHECK(val(w, {1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(val(w, {1.0, 0.0}) == kInf);

  ExhaustionSpec alg(2, AlgebraicComplement{z(2, 0) * z(2, 1) + Polynomial::constant(2, -1.0)});
  CHECK(val(alg, {2.0, 1.0}) == doctest::Approx(std::log(5.0)).epsilon(1e-14));

  ExhaustionSpec ev(1, EvansPuncture{{0.0}, {1.0}, 2.0});
  CHECK(std::abs(val(ev, {4.0})) < 1e-15);
  CHECK(val(ev, {0.0}) == kInf);
  CHECK(val(ev, {2.0}) == -kInf);

  CHECK_THROWS_AS(val(ev, {1.0, 2.0}), Error);
}

TEST_CASE("constructor rejects malformed descriptors") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([] { ExhaustionSpec(1, EvansPuncture{{0.0}, {-1.0}, 2.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { ExhaustionSpec(1, EvansPuncture{{0.0}, {1.0}, 0.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { ExhaustionSpec(2, WeierstrassComplement{}); }) == ErrorCode::InvalidArgument);
  CHECK(code([] { ExhaustionSpec(1, PoleSeries{4}); }) == ErrorCode::DimensionMismatch);
  CHECK(code([] { ExhaustionSpec(2, GraphComplement{EntireFunction::exp_of(z(2, 0))}); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("every variant matches an independent formula at 1e5 random points") {
  oracle::Rng rng(0x5eed01);
  const int N = 100000;

  ExhaustionSpec emb(2, EmbeddedLogNorm{{EntireFunction::polynomial(z(2, 0)), EntireFunction::polynomial(z(2, 1)),
                                         EntireFunction::exp_of(z(2, 0) * z(2, 1))}});
  ExhaustionSpec alg(2, AlgebraicComplement{z(2, 0) * z(2, 0) * z(2, 1) + z(2, 1) * 3.0 + Polynomial::constant(2, 1.0)});
  ExhaustionSpec wei(2, WeierstrassComplement{{EntireFunction::sin_of(z(1, 0)), EntireFunction::polynomial(z(1, 0) * z(1, 0))}});
  ExhaustionSpec ev(1, EvansPuncture{{0.0, cplx(1, 1)}, {0.5, 2.0}, cplx(-1, 0.5)});
  ExhaustionSpec ps(2, PoleSeries{5});
  auto gr = graph_exp();

  int bad = 0;
  for (int t = 0; t < N; ++t) {
    cplx a = rand_c(rng, 3), b = rand_c(rng, 3);
    std::vector<cplx> p2{a, b}, p1{a};

    double e = 0.5 * std::log(std::norm(a) + std::norm(b) + std::norm(std::exp(a * b)));
    bad += !close(emb(p2), e);

    cplx P = a * a * b + 3.0 * b + 1.0;
    bad += !close(alg(p2), -std::log(std::abs(P)) / 3 + std::log(std::norm(a) + std::norm(b)));

    cplx F = b * b + std::sin(a) * b + a * a;
    bad += !close(wei(p2), -std::log(std::abs(F)) + std::log(std::norm(a) + std::norm(F - 1.0)), 1e-11);

    cplx G = b - std::exp(a);
    bad += !close(gr(p2), -std::log(std::abs(G)) + std::log(std::norm(a) + std::norm(G - 1.0)), 1e-11);

    double r = 3.5 * std::log(std::abs(a - cplx(-1, 0.5))) - 0.5 * std::log(std::abs(a)) -
               2.0 * std::log(std::abs(a - cplx(1, 1)));
    bad += !close(ev(p1), r);

    double s = std::log(std::abs(b));
    double q[] = {0, 1, 0.5, 1.0 / 3, 0.25};
    for (int j = 0; j < 5; ++j) s += std::pow(0.5, j + 1) * std::log(std::abs(a - q[j]));
    bad += !close(ps(p2), s);
  }
  CHECK(bad == 0);
}

TEST_CASE("graph complement equals the order-one Weierstrass form with f1 = -f") {
  auto gr = graph_exp();
  ExhaustionSpec w(2, WeierstrassComplement{{EntireFunction::exp_of(z(1, 0), -1.0)}});
  oracle::Rng rng(7);
  for (int t = 0; t < 20000; ++t) {
    std::vector<cplx> p{rand_c(rng, 4), rand_c(rng, 60)};
    CHECK(gr(p) == w(p));
  }
}

TEST_CASE("algebraic complement of a coordinate is ln|z|") {
  ExhaustionSpec alg(1, AlgebraicComplement{z(1, 0)});
  oracle::Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    std::vector<cplx> p{rand_c(rng, 50)};
    CHECK(std::abs(alg(p) - std::log(std::abs(p[0]))) < 1e-13 * (1 + std::abs(std::log(std::abs(p[0])))));
  }
}

TEST_CASE("Evans exhaustion is asymptotic to ln|z|") {
  ExhaustionSpec ev(1, EvansPuncture{{0.0, cplx(0, 0.5)}, {1.0, 0.5}, 1.0});
  for (double R : {1e3, 1e4})
    for (int a = 0; a < 16; ++a) {
      std::vector<cplx> p{std::polar(R, 2 * kPi * a / 16)};
      CHECK(std::abs(ev(p) - std::log(R)) < 1e-2);
    }
}

TEST_CASE("pole set of the Weierstrass form is where F(0, z_n) = 1") {
  auto gr = graph_exp();
  auto Q = gr.pole_points();
  REQUIRE(Q.size() == 1);
  CHECK(std::abs(Q[0][0]) < 1e-14);
  CHECK(std::abs(Q[0][1] - 2.0) < 1e-10);
  CHECK(gr(Q[0]) == -kInf);

  // z^3 - 2z + 1 - 1 = z (z^2 - 2): three poles
  ExhaustionSpec w(2, WeierstrassComplement{{EntireFunction::polynomial(Polynomial::constant(1, 0.0)),
                                             EntireFunction::polynomial(Polynomial::constant(1, -2.0)),
                                             EntireFunction::polynomial(Polynomial::constant(1, 1.0))}});
  CHECK(w.pole_points().size() == 3);
  for (auto& q : w.pole_points()) CHECK(std::abs(q[1] * (q[1] * q[1] - 2.0)) < 1e-10);
}

TEST_CASE("distance to the removed set is first-order accurate") {
  auto gr = graph_exp();
  std::vector<cplx> p{0.3, std::exp(cplx(0.3)) + 0.01};
  double d = gr.distance_to_removed(p);
  // the graph has slope |e^0.3| so the true distance is 0.01 / sqrt(1 + e^0.6)
  CHECK(d == doctest::Approx(0.01 / std::sqrt(1 + std::exp(0.6))).epsilon(0.02));
}

TEST_CASE("maximum modulus over the disk") {
  auto gr = graph_exp();
  for (double R : {1.0, 2.0, 4.0, 8.0}) CHECK(std::abs(m_r(gr, R).value / std::exp(R) - 1) < 0.01);
  double last = 0;
  for (double R = 0.5; R < 6; R += 0.5) {
    double m = m_r(gr, R).value;
    CHECK(m >= last);
    last = m;
  }
  ExhaustionSpec c(2, WeierstrassComplement{{EntireFunction::polynomial(Polynomial::constant(1, 2.0)),
                                             EntireFunction::polynomial(Polynomial::constant(1, cplx(0, -3)))}});
  CHECK(m_r(c, 5.0).value == doctest::Approx(3.0));
  ExhaustionSpec id(2, WeierstrassComplement{{EntireFunction::polynomial(z(1, 0))}});
  CHECK(m_r(id, 3.0).value == doctest::Approx(3.0));
  CHECK(m_r(gr, 2.0).samples > 10000);
}

TEST_CASE("graph of exp: boundary minimum clears level 2 and grows with R") {
  auto gr = graph_exp();
  auto rep = verify_exhaustive(gr, 2.0, {2, 4, 8});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.success);
  REQUIRE(rep.R_found);
  CHECK(*rep.R_found <= 8);
  CHECK(rep.rows[0].min_value < rep.rows[1].min_value);
  CHECK(rep.rows[1].min_value < rep.rows[2].min_value);
  CHECK(rep.rows[2].min_value > 2);
  CHECK_NOTHROW(rep.require_success());

  // Random boundary points never undercut the reported minimum.
  oracle::Rng rng(11);
  for (auto& row : rep.rows) {
    double Z = row.M * row.M;
    double lo = kInf;
    for (int t = 0; t < 10000; ++t) {
      std::vector<cplx> p1{std::polar(row.R, rng.uniform(0, 2 * kPi)), std::polar(Z * std::sqrt(rng.uniform()), rng.uniform(0, 2 * kPi))};
      std::vector<cplx> p2{std::polar(row.R * std::sqrt(rng.uniform()), rng.uniform(0, 2 * kPi)), std::polar(Z, rng.uniform(0, 2 * kPi))};
      lo = std::min({lo, gr(p1), gr(p2)});
    }
    CHECK(row.min_value <= lo + 1e-9);
    CHECK(row.poles_inside);
  }
}

TEST_CASE("success at a level implies success at every lower level") {
  auto gr = graph_exp();
  ExhaustiveOptions opt;
  opt.samples_per_face = 2000;
  auto hi = verify_exhaustive(gr, 1.5, {2, 4}, opt);
  for (double C : {1.0, 0.0, -3.0}) {
    auto lo = verify_exhaustive(gr, C, {2, 4}, opt);
    for (std::size_t i = 0; i < hi.rows.size(); ++i)
      if (hi.rows[i].passed) CHECK(lo.rows[i].passed);
  }
}

TEST_CASE("round boxes for the radial and constant-coefficient cases") {
  ExhaustionSpec alg(1, AlgebraicComplement{z(1, 0)});
  auto rep = verify_exhaustive(alg, 3.0, {2, 10, 30});
  CHECK(rep.success);
  CHECK(*rep.R_found == 30);
  CHECK(rep.rows[1].min_value == doctest::Approx(std::log(10.0)).epsilon(1e-9));

  ExhaustionSpec w(2, WeierstrassComplement{{EntireFunction::polynomial(Polynomial::constant(1, -1.0))}});
  CHECK_FALSE(w.uses_box_faces());
  auto r2 = verify_exhaustive(w, 5.0, {4, 16, 64, 256});
  CHECK(r2.success);

  auto fail_rep = verify_exhaustive(alg, 100.0, {2, 4});
  CHECK_FALSE(fail_rep.success);
  CHECK(fail_rep.best_min == doctest::Approx(std::log(4.0)).epsilon(1e-9));
  try {
    fail_rep.require_success();
    FAIL("expected ScheduleExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScheduleExhausted);
  }
}

TEST_CASE("harmonic exhaustions in one variable are maximal") {
  const double h = 0.05;
  ExhaustionSpec ev(1, EvansPuncture{{0.0}, {1.0}, 2.0});
  auto r = verify_maximal(ev, Box::cube(1, -3, 3), h, 0.3);
  CHECK(r.sup_density <= 10 * h);
  CHECK(r.maximal);
  CHECK(r.checked_nodes > 1000);

  ExhaustionSpec alg(1, AlgebraicComplement{z(1, 0)});
  auto r2 = verify_maximal(alg, Box::cube(1, -2, 2), h, 0.3);
  CHECK(r2.maximal);
}

TEST_CASE("log-norm complement of z2 = 0 is maximal off its singular sets") {
  auto r = verify_maximal(weierstrass_zero(), Box::cube(2, -2, 2), 0.1, 0.3);
  CHECK(r.maximal);
  CHECK(r.ratio < 0.05);
}

TEST_CASE("pole series domain") {
  auto d = pole_series_domain(4, Box::cube(2, -1.2, 1.2), 0.1);
  const GridDomain& g = *d.domain;
  CHECK(g.count_class(NodeClass::Interior) > 0);
  CHECK(d.tail_bound > 0);
  CHECK(d.tail_bound < std::log(1 + std::sqrt(2.0) * 1.2) / 16 + 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) == NodeClass::Interior) CHECK(d.w[i] < 0);
    if (g.cls(i) == NodeClass::Excluded) CHECK(d.w[i] == -kInf);
  }
  auto o = g.nearest(std::vector<cplx>{0.0, 0.0});
  REQUIRE(o);
  CHECK(g.cls(*o) == NodeClass::Excluded);

  ExhaustionSpec ps(2, PoleSeries{4});
  CHECK(std::abs(val(ps, {0.9, 0.1}) - val(ps, {0.4, 0.1})) > 0.1);
  CHECK(val(ps, {0.0, 0.3}) == -kInf);

  // A log at distance r has five-point Laplacian error about h^2 / (4 r^4);
  // the tolerance allows twice that at the collar.
  for (double collar : {0.3, 0.4}) {
    auto region = [&](std::span<const cplx> p) { return ps.distance_to_poles(p) > collar; };
    auto v = is_psh(d.w, 0.01 / (2 * std::pow(collar, 4)), region);
    CHECK(v.psh);
  }

  CHECK_THROWS_AS(pole_series_domain(4, Box{{0.5, 0.5, 0.5, 0.5}, {1.5, 1.5, 1.5, 1.5}, {}}, 0.1), Error);
}

TEST_CASE("descriptors survive a JSON round trip") {
  std::vector<ExhaustionSpec> specs{
      graph_exp(),
      weierstrass_zero(),
      ExhaustionSpec(2, AlgebraicComplement{z(2, 0) * z(2, 1) + Polynomial::constant(2, cplx(-1, 2))}, 2.0),
      ExhaustionSpec(1, EvansPuncture{{0.0, cplx(1, 1)}, {0.5, 2.0}, cplx(-1, 0.5)}),
      ExhaustionSpec(2, PoleSeries{6}),
      ExhaustionSpec(2, EmbeddedLogNorm{{EntireFunction::sin_of(z(2, 0), 2.0), EntireFunction::polynomial(z(2, 1))}}),
  };
  oracle::Rng rng(21);
  for (auto& s : specs) {
    auto back = exhaustion_from_json(to_json(s));
    CHECK(back.tag() == s.tag());
    CHECK(back.dim() == s.dim());
    for (int t = 0; t < 100; ++t) {
      std::vector<cplx> p(s.dim());
      for (auto& c : p) c = rand_c(rng, 2);
      CHECK(back(p) == s(p));
    }
  }
  CHECK_THROWS_AS(exhaustion_from_json("{\"variant\": \"nope\", \"dim\": 2}"), Error);
  CHECK_THROWS_AS(exhaustion_from_json("{\"variant\": "), Error);
}
