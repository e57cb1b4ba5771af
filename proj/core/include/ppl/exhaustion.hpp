#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ppl/calculus.hpp"
#include "ppl/grid.hpp"
#include "ppl/holomorphic.hpp"

namespace ppl {

// sigma = ln|w(z)| for a proper holomorphic embedding w (A empty).
struct EmbeddedLogNorm {
  std::vector<EntireFunction> coordinates;
};

// rho = -(1/deg p) ln|p| + 2 ln|z| on C^n minus {p = 0}.
struct AlgebraicComplement {
  Polynomial p;
};

// F(z', z_n) = z_n^k + sum_j f_j(z') z_n^{k-j};
// rho = -ln|F| + ln(|z'|^2 + |F - 1|^2) on C^n minus {F = 0}.
struct WeierstrassComplement {
  std::vector<EntireFunction> coefficients;  // f_1..f_k in n-1 variables
};

// Complement of the graph z_n = f(z'): the Weierstrass case k = 1, f_1 = -f.
struct GraphComplement {
  EntireFunction f;
};

// n = 1: rho = (1 + sum w_j) ln|z - z0| - sum w_j ln|z - a_j| on C minus {a_j}.
struct EvansPuncture {
  std::vector<cplx> punctures;
  std::vector<double> weights;
  cplx pole;
};

// n = 2: w = sum_{j<J} 2^{-(j+1)} ln|z1 - q_j| + ln|z2| with q = 0, 1, 1/2, 1/3, ...
// A bounded-above, nonconstant psh function on a component of {w < 0}.
struct PoleSeries {
  int terms = 2;
};

using ExhaustionVariant =
    std::variant<EmbeddedLogNorm, AlgebraicComplement, WeierstrassComplement, GraphComplement, EvansPuncture, PoleSeries>;

class ExhaustionSpec {
 public:
  ExhaustionSpec(int n, ExhaustionVariant v, double scale = 1.0);

  int dim() const { return n_; }
  const ExhaustionVariant& variant() const { return v_; }
  double scale() const { return scale_; }
  std::string tag() const;

  // Exact formula; +inf on the removed set A, -inf on the pole set Q.
  double operator()(std::span<const cplx> z) const;

  // The holomorphic function whose zero set is A (Weierstrass/graph: F,
  // algebraic: p, Evans: product of (z - a_j)); nullopt when A is empty.
  std::optional<cplx> defining(std::span<const cplx> z) const;

  // First-order distance estimate to A (|F| / |grad F|); +inf when A is empty.
  double distance_to_removed(std::span<const cplx> z) const;
  // Distance to the pole set Q.
  double distance_to_poles(std::span<const cplx> z) const;
  // Finite pole set as points; empty when Q is not a finite set.
  const std::vector<std::vector<cplx>>& pole_points() const { return poles_; }

  PointPredicate exclusion(double radius) const;
  SentinelFunction sentinel() const;

  bool uses_box_faces() const;  // Weierstrass/graph with nonconstant coefficients

 private:
  std::vector<EntireFunction> weierstrass_coefficients() const;
  cplx weierstrass_F(std::span<const cplx> z) const;
  std::vector<std::vector<cplx>> locate_poles() const;

  int n_;
  ExhaustionVariant v_;
  double scale_;
  std::vector<std::vector<cplx>> poles_;
};

inline double evaluate(const ExhaustionSpec& s, std::span<const cplx> z) { return s(z); }

// q_j of the pole series.
double pole_series_point(int j);

struct MaxModulus {
  double value = 0;
  std::size_t samples = 0;
};

// max over |z'| <= R of |f_j(z')| for the Weierstrass/graph coefficients,
// sampled on a polar grid (radii x angles) that includes the rim.
MaxModulus m_r(const ExhaustionSpec& spec, double R, int radii = 64, int angles = 256);

struct BoundaryRow {
  double R = 0;
  double M = 0;               // M_R (box variants) or R (round boxes)
  double min_value = 0;       // minimum of rho over the sampled boundary
  std::vector<cplx> argmin;
  std::size_t samples = 0;    // per face, at the last refinement
  bool poles_inside = true;
  bool passed = false;
};

struct ExhaustiveReport {
  bool success = false;
  std::optional<double> R_found;
  double best_min = -std::numeric_limits<double>::infinity();
  std::vector<BoundaryRow> rows;

  // Throws ScheduleExhausted (with the best boundary minimum) unless success.
  void require_success() const;
};

struct ExhaustiveOptions {
  std::size_t samples_per_face = 10000;
  double stabilize = 0.01;
  int max_doublings = 4;
  bool stop_at_first = false;
};

// For each R: minimum of rho over the boundary of U_R (box faces
// |z'| = R, |z_n| <= M_R^2 and |z'| <= R, |z_n| = M_R^2 for the
// Weierstrass/graph variants, the sphere |z| = R otherwise).
ExhaustiveReport verify_exhaustive(const ExhaustionSpec& spec, double level, const std::vector<double>& schedule,
                                   const ExhaustiveOptions& opt = {});

struct MaximalReport {
  bool maximal = false;
  double sup_density = 0;
  double curvature_scale = 0;
  double ratio = 0;
  std::size_t checked_nodes = 0;
  std::vector<cplx> worst_point;
};

// Samples rho on a box lattice, drops collar-neighbourhoods of A and Q, and
// compares the sup Monge-Ampere density with the curvature scale.
MaximalReport verify_maximal(const ExhaustionSpec& spec, const Box& box, double h, double collar,
                             double relative_tol = 0.05, int order = 4);

struct PoleSeriesDomain {
  DomainPtr domain;
  ScalarField w;
  double tail_bound;  // 2^{-J} times the log scale of the box
};

// Component of {w < 0} containing the origin of C^2 (flood fill over axis
// neighbours); nodes where w = -inf are Excluded.
PoleSeriesDomain pole_series_domain(int terms, const Box& box, double h);

std::string to_json(const ExhaustionSpec& spec);
ExhaustionSpec exhaustion_from_json(const std::string& text);

}  // namespace ppl
