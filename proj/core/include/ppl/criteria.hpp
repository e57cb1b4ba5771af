#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ppl/exhaustion.hpp"
#include "ppl/supnorm.hpp"

namespace ppl {

// ---- Hadamard-type interpolation of sup norms

struct DnPair {
  std::size_t sample = 0;
  std::size_t candidate = 0;
  double ratio = 0;  // ||f||_K / sqrt(||f||_K0 ||f||_L)
};

struct DnResult {
  std::optional<std::size_t> found;  // first candidate that passes every sample
  std::vector<DnPair> worst_per_candidate;
  std::optional<DnPair> violation;   // largest ratio over all pairs, when none passes
};

// ||f||_K <= (1 + slack) ||f||_K0^{1/2} ||f||_L^{1/2} for every sample, tried
// on each candidate L in order. Throws EmptyCandidates.
DnResult dn_check(const Compact& K0, const Compact& K, const std::vector<Compact>& candidates,
                  const std::vector<Holomorphic>& samples, double slack = 1e-9, const SupOptions& sup = {});

struct DnStandardRow {
  double k = 0;
  std::size_t sample = 0;
  double below = 0, at = 0, above = 0;  // sup norms on {phi < k - 1}, {phi < k}, {phi < k + 1}
  double ratio = 0;                     // at^2 / (below * above)
};

struct DnStandardReport {
  std::vector<DnStandardRow> rows;
  double max_ratio = 0;
};

struct DnStandardOptions {
  std::vector<cplx> center;  // empty: the first pole point, else the origin
  double reach = -1;         // negative: grown until every sampled ray leaves {phi < k + 1}
  int steps = 256;
  SupOptions sup{};
};

// Log-convexity ||f||_k^2 <= ||f||_{k-1} ||f||_{k+1} of sup norms over
// sublevel sets of phi.
DnStandardReport dn_standard_form(const ExhaustionSpec& phi, const std::vector<double>& levels,
                                  const std::vector<Holomorphic>& samples, const DnStandardOptions& opt = {});

// ---- Monge-Ampere mass of an exhaustion

enum class MassRoute { Auto, Flux, Grid };

struct DemaillyOptions {
  MassRoute route = MassRoute::Auto;  // Auto: flux for n = 1, grid otherwise
  std::vector<cplx> center;           // star center of the sublevel sets; empty: origin
  int angles = 1024;                  // flux: trapezoid nodes on the level curve
  double unbounded_radius = 1e6;      // flux: search start; the circle used when a ray never leaves B_r
  double h = 0.05;                    // grid
  double floor = -std::numeric_limits<double>::infinity();  // grid: mollify as softmax(phi, floor, eta)
  double eta = 0.25;
  int order = 4;
};

struct DemaillyRow {
  double r = 0;
  double log_r = 0;
  double mass = 0;
  double ratio = 0;    // mass / ln r
  double ratio_n = 0;  // mass / (ln r)^n
  bool bounded = true;  // the level curve was found on every ray
};

// Fitted power-law exponent of a ratio column against ln r, plus the minimum
// reached. A liminf of zero is never claimed outright: holds means a fitted
// decay exponent <= -1/2 with the minimum at the end of the schedule.
struct TrendVerdict {
  bool holds = false;
  bool degenerate = false;  // every mass vanished: phi is not an exhaustion
  double exponent = 0;
  double minimum = 0;
  double rms = 0;
  std::size_t points = 0;
};

struct DemaillyReport {
  std::vector<DemaillyRow> rows;
  TrendVerdict vanishing;  // mass / ln r -> 0
  TrendVerdict liminf;     // liminf mass / (ln r)^n = 0
};

// B_r = {phi < ln r}. The flux route integrates the normal derivative of phi
// over the level curve (n = 1, exact for any distributional Laplacian inside);
// the grid route sums the Monge-Ampere density of the mollified phi.
DemaillyReport demailly_ratio(const PointFunction& phi, int n, const std::vector<double>& radii,
                              const DemaillyOptions& opt = {});

// ---- projective volume of a parametrized variety

struct VarietyPatch {
  int n = 1;  // complex dimension
  int N = 1;  // ambient C^N
  std::vector<double> lo, hi;  // real 2n-dimensional parameter box
  std::function<void(std::span<const double>, std::span<cplx>)> map;
  // Optional real 2N x 2n Jacobian, row-major; central differences otherwise.
  std::function<void(std::span<const double>, std::span<double>)> jacobian;
  std::vector<double> center;  // the preimage of each ball is star-shaped about it; empty: box center
};

// Random pairs of distinct parameters must map to distinct points.
bool spot_check_injective(const VarietyPatch& v, int pairs, std::uint64_t seed);

struct VolumeRow {
  double r = 0;
  double area = 0;    // H_2n(B_r), at the finer quadrature
  double coarse = 0;  // same at half the nodes per axis
  double vol = 0;     // area / r^{2n}
  double vol_over_log = 0;
  bool truncated = false;  // some ray left the parameter box first
};

struct VolumeReport {
  std::vector<VolumeRow> rows;
  bool sibony_wong = false;  // vol / ln r nonincreasing over the schedule
  double max_drift = 0;
};

struct VolumeQuadrature {
  int angles = 128;
  int radial = 24;
};

// Polar quadrature of the Gram-determinant square root over the preimage of
// {|w| < r}. Throws QuadratureUnstable when halving the nodes moves H by > 5%.
VolumeReport projective_volume(const VarietyPatch& v, const std::vector<double>& radii,
                               const VolumeQuadrature& q = {});

struct PartialIntegral {
  double r_max = 0;
  double value = 0;
};

struct TakegoshiReport {
  double sup_ratio = 0;  // max vol / g over the table
  bool sup_finite = false;
  std::vector<PartialIntegral> partial;  // int_{r0}^{r_max} dr / g, r0 the smallest table radius
  bool divergent = false;                // the last partial integral exceeds twice the first
  bool admissible = true;                // g > 0 and nondecreasing where sampled
  bool pass = false;
};

TakegoshiReport takegoshi_check(const std::vector<VolumeRow>& table, const std::function<double(double)>& g,
                                const std::vector<double>& r_max);

}  // namespace ppl
