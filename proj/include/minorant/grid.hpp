#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "minorant/ext_real.hpp"
#include "minorant/kernels.hpp"

namespace minorant {

enum class NodeRole : std::uint8_t { Outside = 0, Interior = 1, Boundary = 2 };

/// Node (ix, iy) sits at origin + spacing * (ix, iy) and has flat index
/// iy * nx + ix. Every Interior node has its four axis neighbors inside
/// (Interior or Boundary), the Interior set is edge-connected and the
/// Boundary set is nonempty.
class GridDomain {
 public:
  GridDomain() = default;

  /// Full nx-by-ny rectangle; the outer ring is Boundary.
  static GridDomain rectangle(int nx, int ny, double spacing, double origin_x = 0.0, double origin_y = 0.0);
  /// Inside nodes are those with a nonzero mask entry. An inside node whose
  /// four neighbors are all inside is Interior, otherwise Boundary.
  static GridDomain from_mask(int nx, int ny, double spacing, const std::vector<std::uint8_t>& inside,
                              double origin_x = 0.0, double origin_y = 0.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return role_.size(); }
  double spacing() const { return h_; }
  double origin_x() const { return ox_; }
  double origin_y() const { return oy_; }

  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }
  int ix(std::size_t p) const { return static_cast<int>(p % nx_); }
  int iy(std::size_t p) const { return static_cast<int>(p / nx_); }
  double x(std::size_t p) const { return ox_ + h_ * ix(p); }
  double y(std::size_t p) const { return oy_ + h_ * iy(p); }
  bool contains(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_; }

  NodeRole role(std::size_t p) const { return role_[p]; }
  bool is_interior(std::size_t p) const { return role_[p] == NodeRole::Interior; }
  bool is_boundary(std::size_t p) const { return role_[p] == NodeRole::Boundary; }
  bool is_inside(std::size_t p) const { return role_[p] != NodeRole::Outside; }

  /// Left, right, down, up. Only meaningful for nodes with all four in range.
  std::array<std::size_t, 4> neighbors(std::size_t p) const {
    return {p - 1, p + 1, p - static_cast<std::size_t>(nx_), p + static_cast<std::size_t>(nx_)};
  }

  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
  /// Interior and Boundary nodes in index order.
  const std::vector<std::size_t>& inside_nodes() const { return inside_; }

  /// Euclidean distance from node p to the nearest Boundary node.
  double distance_to_boundary(std::size_t p) const;
  /// V - E + F of the cubical complex spanned by the inside nodes; 1 for a
  /// connected domain without holes.
  int euler_characteristic() const;

  kernels::GridView view(const std::vector<std::uint8_t>& mask) const { return {nx_, ny_, mask}; }
  bool same_shape(const GridDomain& o) const;

 private:
  void finish();

  int nx_ = 0;
  int ny_ = 0;
  double h_ = 1.0;
  double ox_ = 0.0;
  double oy_ = 0.0;
  std::vector<NodeRole> role_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> inside_;
};

/// Node-indexed extended reals; values at Outside nodes are ignored and kept
/// at 0. Infinities are stored as IEEE infinities, NaN is never stored.
struct GridFunction {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const GridDomain& d, double fill = 0.0);

  double& operator[](std::size_t p) { return values[p]; }
  double operator[](std::size_t p) const { return values[p]; }
  ExtReal at(std::size_t p) const { return ExtReal(values[p]); }
  std::size_t size() const { return values.size(); }
};

/// Nonnegative finite node weights supported on inside nodes.
struct DiscreteMeasure {
  int nx = 0;
  int ny = 0;
  std::vector<double> weights;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(const GridDomain& d) : nx(d.nx()), ny(d.ny()), weights(d.size(), 0.0) {}

  double& operator[](std::size_t p) { return weights[p]; }
  double operator[](std::size_t p) const { return weights[p]; }
  double mass() const;
  std::vector<std::size_t> support() const;
};

/// DomainMismatch unless f/mu was built for a domain of the same shape.
void check_shape(const GridDomain& d, const GridFunction& f);
void check_shape(const GridDomain& d, const DiscreteMeasure& mu);
/// InvalidArgument on negative, non-finite or outside weights.
void check_measure(const GridDomain& d, const DiscreteMeasure& mu);

/// sum_p f(p) mu(p) over the support; f must be finite there.
double integrate(const GridFunction& f, const DiscreteMeasure& mu);

/// An open subset U of the Interior of D. Its boundary is the set of
/// non-member axis neighbors of members, and clos U = U + boundary.
class SubDomain {
 public:
  SubDomain() = default;
  SubDomain(const GridDomain& d, std::vector<std::uint8_t> member);

  /// Members are the nodes strictly inside the closed index rectangle
  /// [ix0, ix1] x [iy0, iy1]; the rectangle's rim becomes the boundary.
  static SubDomain from_rect(const GridDomain& d, int ix0, int iy0, int ix1, int iy1);

  bool member(std::size_t p) const { return member_[p] != 0; }
  bool on_boundary(std::size_t p) const { return bd_[p] != 0; }
  bool in_closure(std::size_t p) const { return member(p) || on_boundary(p); }
  const std::vector<std::uint8_t>& mask() const { return member_; }
  const std::vector<std::size_t>& members() const { return members_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  std::size_t grid_size() const { return member_.size(); }

 private:
  std::vector<std::uint8_t> member_;
  std::vector<std::uint8_t> bd_;
  std::vector<std::size_t> members_;
  std::vector<std::size_t> boundary_;
};

}  // namespace minorant
