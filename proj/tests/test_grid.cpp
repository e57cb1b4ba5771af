#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "gen.hpp"
#include "ppl/error.hpp"
#include "ppl/grid.hpp"

using namespace ppl;

namespace {
double log_abs(std::span<const cplx> z) { return std::log(std::abs(z[0])); }
double log_norm2(std::span<const cplx> z) { return 0.5 * std::log(std::norm(z[0]) + std::norm(z[1])); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}
}  // namespace

TEST_CASE("disk of radius e has the expected interior count") {
  auto dom = build_sublevel_domain(log_abs, 1.0, Box::cube(1, -3, 3), 0.05);
  double expected = std::numbers::pi * std::exp(2.0) / (0.05 * 0.05);
  double got = static_cast<double>(dom->count_class(NodeClass::Interior));
  CHECK(std::abs(got - expected) / expected < 0.03);
  CHECK(dom->count(0) == 121);
}

TEST_CASE("sublevel set below resolution is empty") {
  CHECK(code_of([] { build_sublevel_domain(log_abs, -10, Box::cube(1, -1, 1), 0.1); }) == ErrorCode::EmptyDomain);
}

TEST_CASE("axes with fewer than three nodes are rejected") {
  CHECK(code_of([] { build_sublevel_domain(log_abs, 1, Box::cube(1, 0, 0.15), 0.1); }) == ErrorCode::DegenerateBox);
}

TEST_CASE("interior nodes never touch the array edge and boundary separates them") {
  // level set larger than the box: the edge must become Boundary
  auto dom = build_sublevel_domain(log_abs, 5.0, Box::cube(1, -1, 1), 0.1);
  for (std::size_t i = 0; i < dom->size(); ++i) {
    if (dom->cls(i) != NodeClass::Interior) continue;
    CHECK_FALSE(dom->on_array_edge(i));
    for (int a = 0; a < 2; ++a)
      for (int s : {-1, 1}) {
        auto j = dom->neighbor(i, a, s);
        REQUIRE(j.has_value());
        CHECK(dom->cls(*j) != NodeClass::Outside);
      }
  }
}

TEST_CASE("node coordinates are exact multiples of h") {
  auto dom = build_box_domain(Box::cube(2, -1, 1), 0.1);
  CHECK(dom->count(3) == 21);
  std::size_t last = dom->size() - 1;
  CHECK(dom->coord(last, 3) == -1 + 20 * 0.1);
  auto p = dom->point(dom->flat({20, 0, 10, 5}));
  CHECK(p[0].real() == -1 + 20 * 0.1);
  CHECK(p[1].imag() == -1 + 5 * 0.1);
}

TEST_CASE("exclusion predicate marks nodes excluded") {
  auto dom = build_sublevel_domain(log_abs, 1.0, Box::cube(1, -3, 3), 0.05,
                                   [](std::span<const cplx> z) { return std::abs(z[0]) < 0.08; });
  auto zero = dom->nearest(std::vector<cplx>{0.0});
  REQUIRE(zero);
  CHECK(dom->cls(*zero) == NodeClass::Excluded);
}

TEST_CASE("sublevel domains grow with the level") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    double l1 = rng.uniform(-0.5, 0.9), l2 = l1 + rng.uniform(0, 0.5);
    auto a = build_sublevel_domain(log_norm2, l1, Box::cube(2, -3, 3), 0.25);
    auto b = build_sublevel_domain(log_norm2, l2, Box::cube(2, -3, 3), 0.25);
    for (std::size_t i = 0; i < a->size(); ++i)
      if (a->cls(i) == NodeClass::Interior) REQUIRE(b->cls(i) == NodeClass::Interior);
  }
}

TEST_CASE("refinement keeps interior nodes far from the level set") {
  const double h = 0.1, R = std::exp(0.7);
  auto coarse = build_sublevel_domain(log_abs, 0.7, Box::cube(1, -2.5, 2.5), h);
  auto fine = build_sublevel_domain(log_abs, 0.7, Box::cube(1, -2.5, 2.5), h / 2);
  for (std::size_t i = 0; i < coarse->size(); ++i) {
    if (coarse->cls(i) != NodeClass::Interior) continue;
    auto z = coarse->point(i);
    if (R - std::abs(z[0]) <= 2 * h) continue;
    auto j = fine->nearest(z);
    REQUIRE(j);
    CHECK(fine->cls(*j) == NodeClass::Interior);
  }
}

TEST_CASE("field sampling") {
  SUBCASE("zero field") {
    auto dom = build_box_domain(Box::cube(1, -1, 1), 0.1);
    auto f = field_from_evaluator(dom, [](std::span<const cplx>) { return 0.0; });
    for (double v : f.values()) CHECK(v == 0.0);
  }
  SUBCASE("log on an annulus") {
    auto annulus = [](std::span<const cplx> z) {
      double r = std::abs(z[0]);
      return r > 1 ? std::log(r) : 2.0;
    };
    auto dom = build_sublevel_domain(annulus, 1.0, Box::cube(1, -3, 3), 0.05);
    std::vector<double> interior;
    auto f = field_from_evaluator(dom, log_abs);
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < dom->size(); ++i)
      if (dom->cls(i) == NodeClass::Interior) {
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
      }
    CHECK(lo == doctest::Approx(0).epsilon(0.05).scale(1));
    CHECK(lo < 0.05);
    CHECK(hi > 0.97);
    CHECK(hi < 1.0);
  }
  SUBCASE("pole of -log|z| carries +inf") {
    auto dom = build_box_domain(Box::cube(1, -1, 1), 0.1, [](std::span<const cplx> z) { return std::abs(z[0]) < 1e-9; });
    auto f = field_from_evaluator(dom, [](std::span<const cplx> z) { return -std::log(std::abs(z[0])); });
    auto zero = dom->nearest(std::vector<cplx>{0.0});
    CHECK(dom->cls(*zero) == NodeClass::Excluded);
    CHECK(f[*zero] == std::numeric_limits<double>::infinity());
  }
  SUBCASE("NaN is rejected") {
    auto dom = build_box_domain(Box::cube(1, -1, 1), 0.1);
    CHECK(code_of([&] { field_from_evaluator(dom, [](std::span<const cplx>) { return std::nan(""); }); }) ==
          ErrorCode::NaNValue);
  }
}

TEST_CASE("sampling round-trips at node coordinates") {
  oracle::Rng rng(3);
  auto dom = build_box_domain(Box::cube(2, -1, 1), 0.2);
  auto f = [](std::span<const cplx> z) { return std::sin(z[0].real()) * std::exp(z[1].imag()) + std::norm(z[1]); };
  auto field = field_from_evaluator(dom, f);
  for (int k = 0; k < 200; ++k) {
    std::size_t i = rng.next() % dom->size();
    CHECK(field[i] == f(dom->point(i)));
    CHECK(field.interpolate(dom->point(i)) == doctest::Approx(f(dom->point(i))).epsilon(1e-12));
  }
}

TEST_CASE("interpolation is exact for multilinear functions") {
  auto dom = build_box_domain(Box::cube(1, -1, 1), 0.1);
  auto f = [](std::span<const cplx> z) { return 1 + 2 * z[0].real() - z[0].imag() + 0.5 * z[0].real() * z[0].imag(); };
  auto field = field_from_evaluator(dom, f);
  std::vector<cplx> p{cplx(0.123, -0.456)};
  CHECK(field.interpolate(p) == doctest::Approx(f(p)).epsilon(1e-12));
}

TEST_CASE("field cache round-trip") {
  auto dom = build_sublevel_domain(log_abs, 0.5, Box::cube(1, -2, 2), 0.1,
                                   [](std::span<const cplx> z) { return std::abs(z[0]) < 0.05; });
  auto f = field_from_evaluator(dom, [](std::span<const cplx> z) { return -std::log(std::abs(z[0])); });
  std::stringstream buf;
  save_field(buf, f);
  std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "PPL1");
  CHECK(static_cast<int>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[5]) == 41);  // little-endian node count
  CHECK(bytes.size() == 5 + 2 * 4 + 8 + 4 * 8 + dom->size() * 9);
  auto g = load_field(buf);
  REQUIRE(g.size() == f.size());
  CHECK(g.domain().same_lattice(f.domain()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g[i] == f[i]);
    CHECK(g.domain().cls(i) == f.domain().cls(i));
  }
}

TEST_CASE("corrupt cache is rejected") {
  std::stringstream buf("PPL2 garbage");
  CHECK(code_of([&] { load_field(buf); }) == ErrorCode::Io);
}
