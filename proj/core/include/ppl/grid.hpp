#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppl {

using cplx = std::complex<double>;

// Real-valued function on C^n. Infinite results are allowed, NaN is not.
using PointFunction = std::function<double(std::span<const cplx>)>;
using PointPredicate = std::function<bool(std::span<const cplx>)>;

// Outside marks lattice nodes that belong to the box but not to the domain
// (beyond the boundary layer). They are never read by any stencil.
enum class NodeClass : std::uint8_t { Interior = 0, Boundary = 1, Excluded = 2, Outside = 3 };

// Axis-aligned box in R^{2n}. Real axes are ordered (x1, y1, x2, y2).
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  // A periodic axis identifies lo with hi; nodes sit at lo + i*h for i < count.
  std::vector<bool> periodic;

  static Box cube(int n, double lo, double hi);
  static Box centered(int n, double half_width);
  int real_dim() const { return static_cast<int>(lo.size()); }
};

class GridDomain {
 public:
  static constexpr int kMaxRealDim = 4;
  using Index = std::array<int, kMaxRealDim>;

  GridDomain(int n, std::vector<double> lo, std::vector<int> counts, double h,
             std::vector<NodeClass> mask, std::vector<bool> periodic = {});

  int dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  double spacing() const { return h_; }
  int count(int axis) const { return counts_[axis]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const;
  bool periodic(int axis) const { return periodic_[axis]; }
  bool any_periodic() const;
  std::size_t size() const { return mask_.size(); }
  std::size_t stride(int axis) const { return strides_[axis]; }

  NodeClass cls(std::size_t idx) const { return mask_[idx]; }
  std::span<const NodeClass> mask() const { return mask_; }
  std::size_t count_class(NodeClass c) const;

  Index multi_index(std::size_t idx) const;
  std::size_t flat(const Index& mi) const;
  // Shifted node, wrapping periodic axes; nullopt when it leaves the array.
  std::optional<std::size_t> shifted(std::size_t idx, const Index& delta) const;
  std::optional<std::size_t> neighbor(std::size_t idx, int axis, int step) const;
  bool on_array_edge(std::size_t idx) const;

  double coord(std::size_t idx, int axis) const;
  void point(std::size_t idx, std::span<cplx> out) const;
  std::vector<cplx> point(std::size_t idx) const;

  // Fractional lattice position of a point; nullopt outside the array.
  std::optional<std::array<double, kMaxRealDim>> lattice_position(std::span<const cplx> p) const;
  std::optional<std::size_t> nearest(std::span<const cplx> p) const;

  // Same lattice geometry, different classification.
  GridDomain with_mask(std::vector<NodeClass> mask) const;
  bool same_lattice(const GridDomain& other) const;

 private:
  int n_;
  double h_;
  std::vector<double> lo_;
  std::vector<int> counts_;
  std::vector<bool> periodic_;
  std::vector<std::size_t> strides_;
  std::vector<NodeClass> mask_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

// Lattice geometry for a box: node counts per axis.
std::vector<int> lattice_counts(const Box& box, double h);

// Nodes with f < level (and not excluded) are Interior, unless they sit on the
// array edge; Interior-adjacent remaining nodes are Boundary; exclusion hits are
// Excluded; everything else is Outside.
DomainPtr build_sublevel_domain(const PointFunction& f, double level, const Box& box, double h,
                                const PointPredicate& exclusion = nullptr);

// Whole box: non-edge nodes Interior, edge nodes Boundary.
DomainPtr build_box_domain(const Box& box, double h, const PointPredicate& exclusion = nullptr);

class ScalarField {
 public:
  ScalarField(DomainPtr domain, std::vector<double> values);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Multilinear interpolation; falls back to the nearest node when the cell
  // touches an Excluded node or a sentinel.
  double interpolate(std::span<const cplx> p) const;
  double min_finite() const;
  double max_finite() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

// Sign of divergence at an Excluded node: +inf or -inf.
using SentinelFunction = std::function<double(std::span<const cplx>)>;

// Samples f at every non-Excluded node. Excluded nodes take f's own value when
// it is infinite, otherwise the sentinel callback (default +inf).
ScalarField field_from_evaluator(DomainPtr dom, const PointFunction& f,
                                 const SentinelFunction& sentinel = nullptr);

// Binary field cache (see README for layout). Periodic domains cannot be cached.
void save_field(std::ostream& out, const ScalarField& field);
void save_field(const std::string& path, const ScalarField& field);
ScalarField load_field(std::istream& in);
ScalarField load_field(const std::string& path);

}  // namespace ppl
