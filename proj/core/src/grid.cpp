#include "ppl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppl/error.hpp"

namespace ppl {

Box Box::cube(int n, double lo, double hi) {
  Box b;
  b.lo.assign(2 * n, lo);
  b.hi.assign(2 * n, hi);
  b.periodic.assign(2 * n, false);
  return b;
}

Box Box::centered(int n, double half_width) { return cube(n, -half_width, half_width); }

GridDomain::GridDomain(int n, std::vector<double> lo, std::vector<int> counts, double h,
                       std::vector<NodeClass> mask, std::vector<bool> periodic)
    : n_(n), h_(h), lo_(std::move(lo)), counts_(std::move(counts)), periodic_(std::move(periodic)),
      mask_(std::move(mask)) {
  if (n_ != 1 && n_ != 2) fail(ErrorCode::DimensionMismatch, "complex dimension must be 1 or 2");
  if (!(h_ > 0) || !std::isfinite(h_)) fail(ErrorCode::InvalidArgument, "spacing must be positive");
  const int d = 2 * n_;
  if (static_cast<int>(lo_.size()) != d || static_cast<int>(counts_.size()) != d)
    fail(ErrorCode::DimensionMismatch, "box and node counts must have 2n entries");
  if (periodic_.empty()) periodic_.assign(d, false);
  if (static_cast<int>(periodic_.size()) != d) fail(ErrorCode::DimensionMismatch, "periodic flags must have 2n entries");
  strides_.assign(d, 1);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    if (counts_[a] < 3) fail(ErrorCode::DegenerateBox, "axis " + std::to_string(a) + " has fewer than 3 nodes");
    strides_[a] = total;
    total *= static_cast<std::size_t>(counts_[a]);
  }
  if (mask_.size() != total) fail(ErrorCode::DimensionMismatch, "mask size does not match lattice");
}

double GridDomain::hi(int axis) const {
  return lo_[axis] + (periodic_[axis] ? counts_[axis] : counts_[axis] - 1) * h_;
}

bool GridDomain::any_periodic() const {
  return std::any_of(periodic_.begin(), periodic_.end(), [](bool b) { return b; });
}

std::size_t GridDomain::count_class(NodeClass c) const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), c));
}

GridDomain::Index GridDomain::multi_index(std::size_t idx) const {
  Index mi{};
  for (int a = 0; a < real_dim(); ++a) {
    mi[a] = static_cast<int>(idx % counts_[a]);
    idx /= counts_[a];
  }
  return mi;
}

std::size_t GridDomain::flat(const Index& mi) const {
  std::size_t idx = 0;
  for (int a = 0; a < real_dim(); ++a) idx += static_cast<std::size_t>(mi[a]) * strides_[a];
  return idx;
}

std::optional<std::size_t> GridDomain::shifted(std::size_t idx, const Index& delta) const {
  Index mi = multi_index(idx);
  for (int a = 0; a < real_dim(); ++a) {
    int v = mi[a] + delta[a];
    if (periodic_[a]) {
      v %= counts_[a];
      if (v < 0) v += counts_[a];
    } else if (v < 0 || v >= counts_[a]) {
      return std::nullopt;
    }
    mi[a] = v;
  }
  return flat(mi);
}

std::optional<std::size_t> GridDomain::neighbor(std::size_t idx, int axis, int step) const {
  Index d{};
  d[axis] = step;
  return shifted(idx, d);
}

bool GridDomain::on_array_edge(std::size_t idx) const {
  Index mi = multi_index(idx);
  for (int a = 0; a < real_dim(); ++a)
    if (!periodic_[a] && (mi[a] == 0 || mi[a] == counts_[a] - 1)) return true;
  return false;
}

double GridDomain::coord(std::size_t idx, int axis) const {
  std::size_t i = (idx / strides_[axis]) % counts_[axis];
  return lo_[axis] + static_cast<double>(i) * h_;
}

void GridDomain::point(std::size_t idx, std::span<cplx> out) const {
  Index mi = multi_index(idx);
  for (int j = 0; j < n_; ++j)
    out[j] = cplx(lo_[2 * j] + mi[2 * j] * h_, lo_[2 * j + 1] + mi[2 * j + 1] * h_);
}

std::vector<cplx> GridDomain::point(std::size_t idx) const {
  std::vector<cplx> p(n_);
  point(idx, p);
  return p;
}

std::optional<std::array<double, GridDomain::kMaxRealDim>> GridDomain::lattice_position(
    std::span<const cplx> p) const {
  std::array<double, kMaxRealDim> t{};
  for (int a = 0; a < real_dim(); ++a) {
    double x = (a % 2 == 0) ? p[a / 2].real() : p[a / 2].imag();
    double v = (x - lo_[a]) / h_;
    if (periodic_[a]) {
      v = std::fmod(v, static_cast<double>(counts_[a]));
      if (v < 0) v += counts_[a];
    } else {
      const double eps = 1e-9;
      if (v < -eps || v > counts_[a] - 1 + eps) return std::nullopt;
      v = std::clamp(v, 0.0, static_cast<double>(counts_[a] - 1));
    }
    t[a] = v;
  }
  return t;
}

std::optional<std::size_t> GridDomain::nearest(std::span<const cplx> p) const {
  auto t = lattice_position(p);
  if (!t) return std::nullopt;
  Index mi{};
  for (int a = 0; a < real_dim(); ++a) {
    int v = static_cast<int>(std::lround((*t)[a]));
    if (periodic_[a]) v %= counts_[a];
    mi[a] = std::clamp(v, 0, counts_[a] - 1);
  }
  return flat(mi);
}

GridDomain GridDomain::with_mask(std::vector<NodeClass> mask) const {
  return GridDomain(n_, lo_, counts_, h_, std::move(mask), periodic_);
}

bool GridDomain::same_lattice(const GridDomain& o) const {
  return n_ == o.n_ && h_ == o.h_ && lo_ == o.lo_ && counts_ == o.counts_ && periodic_ == o.periodic_;
}

std::vector<int> lattice_counts(const Box& box, double h) {
  if (!(h > 0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "spacing must be positive");
  const int d = box.real_dim();
  if (d != 2 && d != 4) fail(ErrorCode::DimensionMismatch, "box must have 2 or 4 real axes");
  if (static_cast<int>(box.hi.size()) != d) fail(ErrorCode::DimensionMismatch, "box bounds mismatch");
  std::vector<int> counts(d);
  for (int a = 0; a < d; ++a) {
    double len = box.hi[a] - box.lo[a];
    if (!(len > 0)) fail(ErrorCode::DegenerateBox, "empty box along axis " + std::to_string(a));
    bool per = a < static_cast<int>(box.periodic.size()) && box.periodic[a];
    double c = per ? std::round(len / h) : std::floor(len / h + 1e-9) + 1;
    if (c > 1e7) fail(ErrorCode::InvalidArgument, "lattice too large");
    counts[a] = static_cast<int>(c);
    if (counts[a] < 3) fail(ErrorCode::DegenerateBox, "axis " + std::to_string(a) + " has fewer than 3 nodes");
  }
  return counts;
}

namespace {

std::vector<bool> periodic_flags(const Box& box) {
  std::vector<bool> p = box.periodic;
  p.resize(box.lo.size(), false);
  return p;
}

// Geometry-only domain used to enumerate node coordinates before classification.
GridDomain scaffold(const Box& box, double h) {
  auto counts = lattice_counts(box, h);
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  return GridDomain(box.real_dim() / 2, box.lo, counts, h, std::vector<NodeClass>(total, NodeClass::Outside),
                    periodic_flags(box));
}

void promote_boundary(const GridDomain& g, std::vector<NodeClass>& mask) {
  std::vector<std::size_t> promote;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != NodeClass::Interior) continue;
    for (int a = 0; a < g.real_dim(); ++a)
      for (int s : {-1, 1}) {
        auto j = g.neighbor(i, a, s);
        if (j && mask[*j] == NodeClass::Outside) promote.push_back(*j);
      }
  }
  for (auto j : promote) mask[j] = NodeClass::Boundary;
}

}  // namespace

DomainPtr build_sublevel_domain(const PointFunction& f, double level, const Box& box, double h,
                                const PointPredicate& exclusion) {
  GridDomain g = scaffold(box, h);
  std::vector<NodeClass> mask(g.size(), NodeClass::Outside);
  std::vector<cplx> p(g.dim());
  std::size_t below = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (exclusion && exclusion(p)) {
      mask[i] = NodeClass::Excluded;
      continue;
    }
    double v = f(p);
    if (std::isnan(v)) fail(ErrorCode::NaNValue, "evaluator returned NaN while building domain");
    if (v < level) {
      ++below;
      mask[i] = g.on_array_edge(i) ? NodeClass::Boundary : NodeClass::Interior;
    }
  }
  if (below == 0) fail(ErrorCode::EmptyDomain, "no lattice node satisfies f < level");
  // A set that does not contain even one node together with its axis
  // neighbours is below grid resolution (e.g. a lone node at a pole).
  bool resolved = false;
  for (std::size_t i = 0; i < mask.size() && !resolved; ++i) {
    if (mask[i] != NodeClass::Interior) continue;
    bool all = true;
    for (int a = 0; a < g.real_dim() && all; ++a)
      for (int s : {-1, 1}) {
        auto j = g.neighbor(i, a, s);
        if (!j || mask[*j] != NodeClass::Interior) all = false;
      }
    resolved = all;
  }
  if (!resolved) fail(ErrorCode::EmptyDomain, "sublevel set is below grid resolution");
  promote_boundary(g, mask);
  return std::make_shared<const GridDomain>(g.with_mask(std::move(mask)));
}

DomainPtr build_box_domain(const Box& box, double h, const PointPredicate& exclusion) {
  GridDomain g = scaffold(box, h);
  std::vector<NodeClass> mask(g.size());
  std::vector<cplx> p(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (exclusion && exclusion(p))
      mask[i] = NodeClass::Excluded;
    else
      mask[i] = g.on_array_edge(i) ? NodeClass::Boundary : NodeClass::Interior;
  }
  return std::make_shared<const GridDomain>(g.with_mask(std::move(mask)));
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) fail(ErrorCode::InvalidArgument, "field needs a domain");
  if (values_.size() != domain_->size()) fail(ErrorCode::DimensionMismatch, "field size does not match domain");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isnan(values_[i])) fail(ErrorCode::NaNValue, "field value is NaN at node " + std::to_string(i));
    if (domain_->cls(i) == NodeClass::Excluded && std::isfinite(values_[i]))
      fail(ErrorCode::InvalidArgument, "excluded node carries a finite value");
  }
}

double ScalarField::interpolate(std::span<const cplx> p) const {
  const GridDomain& g = *domain_;
  auto t = g.lattice_position(p);
  if (!t) fail(ErrorCode::InvalidArgument, "interpolation point outside the lattice");
  const int d = g.real_dim();
  GridDomain::Index base{};
  std::array<double, GridDomain::kMaxRealDim> frac{};
  for (int a = 0; a < d; ++a) {
    int i0 = static_cast<int>(std::floor((*t)[a]));
    if (!g.periodic(a)) i0 = std::clamp(i0, 0, g.count(a) - 2);
    base[a] = i0;
    frac[a] = (*t)[a] - i0;
  }
  std::size_t origin = g.flat([&] {
    GridDomain::Index b = base;
    for (int a = 0; a < d; ++a)
      if (g.periodic(a)) b[a] = ((b[a] % g.count(a)) + g.count(a)) % g.count(a);
    return b;
  }());
  double acc = 0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1;
    GridDomain::Index delta{};
    for (int a = 0; a < d; ++a) {
      int bit = (corner >> a) & 1;
      delta[a] = bit;
      w *= bit ? frac[a] : 1 - frac[a];
    }
    if (w <= 1e-14) continue;
    auto j = g.shifted(origin, delta);
    if (!j || g.cls(*j) == NodeClass::Excluded || !std::isfinite(values_[*j])) {
      return values_[*g.nearest(p)];
    }
    acc += w * values_[*j];
  }
  return acc;
}

double ScalarField::min_finite() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_)
    if (std::isfinite(v)) m = std::min(m, v);
  return m;
}

double ScalarField::max_finite() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_)
    if (std::isfinite(v)) m = std::max(m, v);
  return m;
}

ScalarField field_from_evaluator(DomainPtr dom, const PointFunction& f, const SentinelFunction& sentinel) {
  const GridDomain& g = *dom;
  std::vector<double> values(g.size());
  std::vector<cplx> p(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (g.cls(i) == NodeClass::Excluded) {
      double v = f(p);
      if (std::isinf(v))
        values[i] = v;
      else if (sentinel)
        values[i] = sentinel(p) < 0 ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
      else
        values[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    double v = f(p);
    if (std::isnan(v)) fail(ErrorCode::NaNValue, "evaluator returned NaN at node " + std::to_string(i));
    values[i] = v;
  }
  return ScalarField(std::move(dom), std::move(values));
}

}  // namespace ppl
