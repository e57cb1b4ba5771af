#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ppl/envelope.hpp"
#include "ppl/grid.hpp"

namespace ppl {

// Holomorphic coordinates for the lattice. forward maps lattice coordinates
// to points of the manifold, inverse goes back. Both empty means identity.
struct Chart {
  std::function<void(std::span<const cplx>, std::span<cplx>)> forward;
  std::function<void(std::span<const cplx>, std::span<cplx>)> inverse;

  bool identity() const { return !forward; }
  std::vector<cplx> to_manifold(std::span<const cplx> grid) const;
  std::vector<cplx> to_grid(std::span<const cplx> point) const;
};

// zeta = log z on an annulus of C: lattice axes are (ln|z|, arg z).
Chart log_chart();

struct ChartedDomain {
  DomainPtr domain;
  Chart chart;
};

// {a < |z| < b} in the log chart, spacing 2 pi / N with N in [angles,
// 2 angles) chosen so that ln b is nearest to a lattice line; ln a is on one.
// The lattice starts five layers inside |z| < a, and those edge nodes are
// pinned.
ChartedDomain log_polar_domain(double inner_radius, double outer_radius, int angles);

// Compact K inside an outer domain D, on the nodes of D.
struct Condenser {
  DomainPtr domain;
  Chart chart;
  std::vector<std::uint8_t> compact;  // 1 on nodes of K
  // Present when K = {phi <= s} and D = {phi < r} for one exhaustion phi.
  std::optional<std::pair<double, double>> levels;
  PointFunction generator;

  std::size_t compact_nodes() const;
};

// K is evaluated at manifold points of the non-Excluded nodes. Throws
// RegionEmpty if K misses every node and TooCoarse if K holds no grid ball of
// radius 2h (the stand-in for a nonpluripolar compact).
Condenser make_condenser(ChartedDomain D, const PointPredicate& K);

// K = {phi <= s}, D = {phi < r} sampled on a box lattice.
Condenser sublevel_condenser(const PointFunction& phi, double s, double r, const Box& box, double h);

struct ExtremalField {
  ScalarField omega;
  std::size_t iterations = 0;
  double residual = 0;
};

// Envelope of discretely psh u <= 0 on D with u <= -1 on K; pinned nodes of
// D carry 0 (or -1 when they lie in K). Throws MaxIterations if not converged.
ExtremalField relative_extremal(const Condenser& c, const EnvelopeScheme& scheme = {});

// omega at a manifold point (interpolated in lattice coordinates).
double value_at(const Condenser& c, const ScalarField& omega, std::span<const cplx> point);

enum class Triviality { Trivial, Nontrivial, Inconclusive };
const char* triviality_name(Triviality t);

struct LimitOptions {
  double margin = 0.05;
  double monotone_tol = 1e-6;
  EnvelopeScheme scheme{};
};

struct LimitRow {
  double level;
  std::size_t probe;
  double value;
  double residual;
};

// value + 1 = gap_limit + slope / level, fitted by least squares.
struct ProbeFit {
  double gap_limit = 0;
  double slope = 0;
  double rms = 0;
  bool monotone = true;
  Triviality verdict = Triviality::Inconclusive;
};

struct LimitReport {
  std::vector<LimitRow> rows;
  std::vector<ProbeFit> fits;
  Triviality verdict = Triviality::Inconclusive;
  bool degenerate = false;  // K covered the first domain
};

using DomainBuilder = std::function<ChartedDomain(double level)>;

// Relative extremal functions of K in D(level) for increasing levels. The
// verdict is Trivial when every probe tends to -1, Nontrivial when some probe
// stays above -1 + margin. Throws NonNestedDomains.
LimitReport pmeasure_limit(const PointPredicate& K, const std::vector<double>& levels, const DomainBuilder& builder,
                           const std::vector<std::vector<cplx>>& probes, const LimitOptions& opt = {});

enum class CapacityRoute { Auto, Generator, Flux };

struct CapacityOptions {
  CapacityRoute route = CapacityRoute::Auto;
  double smoothing = -1;  // soft-max width for the generator; negative: (r - s) / 4
  double flux_cut = -0.5;
  EnvelopeScheme scheme{};
};

struct CapacityReport {
  std::optional<double> generator;  // MA mass of the smoothed generator / (r - s)^n
  std::optional<double> flux;       // Laplacian mass of omega through a level curve (n = 1)
  std::optional<double> discrepancy;  // |generator - flux| / flux
  std::size_t mass_nodes = 0;
};

// Generator route needs levels and a generator (MissingLevels otherwise when
// requested explicitly); the flux route needs n = 1.
CapacityReport capacity(const Condenser& c, const CapacityOptions& opt = {});

// Discrete Laplacian mass of omega inside {omega <= cut}, summed as the flux
// of the nine-point operator across the cut (n = 1).
double flux_mass(const ScalarField& omega, double cut = -0.5);

struct BoundCheck {
  bool holds = true;
  double worst_violation = 0;  // max of u - bound over checked nodes
  std::optional<std::size_t> worst_node;
  std::size_t checked_nodes = 0;
  double slack = 0;
};

// u <= -u1 * omega + uR * (1 + omega) at every node where both fields are
// finite, with slack 1e-6 * range(u) (never below rounding of u1, uR). u1 and uR are the sups of u on K and D.
BoundCheck check_extremal_bound(const ScalarField& u, const ScalarField& omega, double u1, double uR);

}  // namespace ppl
