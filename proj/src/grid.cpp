#include "minorant/grid.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "minorant/error.hpp"

namespace minorant {

GridDomain GridDomain::rectangle(int nx, int ny, double spacing, double origin_x, double origin_y) {
  if (nx < 3 || ny < 3) throw Error(ErrorCode::InvalidArgument, "a rectangle needs at least 3x3 nodes");
  return from_mask(nx, ny, spacing, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 1), origin_x,
                   origin_y);
}

GridDomain GridDomain::from_mask(int nx, int ny, double spacing, const std::vector<std::uint8_t>& inside,
                                 double origin_x, double origin_y) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) throw Error(ErrorCode::InvalidArgument, "origin must be finite");
  if (inside.size() != static_cast<std::size_t>(nx) * ny) throw Error(ErrorCode::DimensionMismatch, "mask size");
  GridDomain d;
  d.nx_ = nx;
  d.ny_ = ny;
  d.h_ = spacing;
  d.ox_ = origin_x;
  d.oy_ = origin_y;
  d.role_.assign(inside.size(), NodeRole::Outside);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t p = d.index(ix, iy);
      if (!inside[p]) continue;
      bool all = true;
      const int off[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      for (const auto& o : off) {
        const int jx = ix + o[0], jy = iy + o[1];
        if (!d.contains(jx, jy) || !inside[d.index(jx, jy)]) all = false;
      }
      d.role_[p] = all ? NodeRole::Interior : NodeRole::Boundary;
    }
  d.finish();
  return d;
}

void GridDomain::finish() {
  interior_.clear();
  boundary_.clear();
  inside_.clear();
  for (std::size_t p = 0; p < role_.size(); ++p) {
    if (role_[p] == NodeRole::Interior) interior_.push_back(p);
    if (role_[p] == NodeRole::Boundary) boundary_.push_back(p);
    if (role_[p] != NodeRole::Outside) inside_.push_back(p);
  }
  if (interior_.empty()) throw Error(ErrorCode::InvalidArgument, "domain has no interior node");
  if (boundary_.empty()) throw Error(ErrorCode::InvalidArgument, "domain has no boundary node");

  std::vector<std::uint8_t> seen(role_.size(), 0);
  std::queue<std::size_t> q;
  q.push(interior_.front());
  seen[interior_.front()] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const std::size_t p = q.front();
    q.pop();
    ++reached;
    for (std::size_t n : neighbors(p))
      if (is_interior(n) && !seen[n]) {
        seen[n] = 1;
        q.push(n);
      }
  }
  if (reached != interior_.size()) throw Error(ErrorCode::InvalidArgument, "interior nodes are not edge-connected");
}

double GridDomain::distance_to_boundary(std::size_t p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t b : boundary_) best = std::min(best, std::hypot(x(p) - x(b), y(p) - y(b)));
  return best;
}

int GridDomain::euler_characteristic() const {
  long v = 0, e = 0, f = 0;
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix) {
      if (!is_inside(index(ix, iy))) continue;
      ++v;
      const bool right = ix + 1 < nx_ && is_inside(index(ix + 1, iy));
      const bool up = iy + 1 < ny_ && is_inside(index(ix, iy + 1));
      e += right + up;
      if (right && up && is_inside(index(ix + 1, iy + 1))) ++f;
    }
  return static_cast<int>(v - e + f);
}

bool GridDomain::same_shape(const GridDomain& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && role_ == o.role_; }

GridFunction::GridFunction(const GridDomain& d, double fill) : nx(d.nx()), ny(d.ny()), values(d.size(), 0.0) {
  for (std::size_t p : d.inside_nodes()) values[p] = fill;
}

double DiscreteMeasure::mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

std::vector<std::size_t> DiscreteMeasure::support() const {
  std::vector<std::size_t> s;
  for (std::size_t p = 0; p < weights.size(); ++p)
    if (weights[p] > 0.0) s.push_back(p);
  return s;
}

void check_shape(const GridDomain& d, const GridFunction& f) {
  if (f.nx != d.nx() || f.ny != d.ny() || f.values.size() != d.size())
    throw Error(ErrorCode::DomainMismatch, "grid function does not match the domain");
  for (double v : f.values)
    if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "grid function contains NaN");
}

void check_shape(const GridDomain& d, const DiscreteMeasure& mu) {
  if (mu.nx != d.nx() || mu.ny != d.ny() || mu.weights.size() != d.size())
    throw Error(ErrorCode::DomainMismatch, "measure does not match the domain");
}

void check_measure(const GridDomain& d, const DiscreteMeasure& mu) {
  check_shape(d, mu);
  for (std::size_t p = 0; p < mu.weights.size(); ++p) {
    const double w = mu.weights[p];
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidArgument, "measure weight negative or not finite");
    if (w > 0.0 && !d.is_inside(p)) throw Error(ErrorCode::InvalidArgument, "measure charges an outside node");
  }
}

double integrate(const GridFunction& f, const DiscreteMeasure& mu) {
  if (f.values.size() != mu.weights.size()) throw Error(ErrorCode::DomainMismatch, "integrand and measure differ in size");
  double s = 0.0;
  for (std::size_t p = 0; p < mu.weights.size(); ++p) {
    if (mu.weights[p] == 0.0) continue;
    if (!std::isfinite(f.values[p])) throw Error(ErrorCode::InfiniteValue, "integrand infinite on the support");
    s += f.values[p] * mu.weights[p];
  }
  return s;
}

SubDomain::SubDomain(const GridDomain& d, std::vector<std::uint8_t> member)
    : member_(std::move(member)), bd_(d.size(), 0) {
  if (member_.size() != d.size()) throw Error(ErrorCode::DomainMismatch, "subdomain mask size");
  for (std::size_t p = 0; p < member_.size(); ++p) {
    if (!member_[p]) continue;
    if (!d.is_interior(p)) throw Error(ErrorCode::NotInterior, "subdomain member is not an interior node");
    members_.push_back(p);
    for (std::size_t n : d.neighbors(p))
      if (!member_[n]) bd_[n] = 1;
  }
  if (members_.empty()) throw Error(ErrorCode::InvalidArgument, "empty subdomain");
  for (std::size_t p = 0; p < bd_.size(); ++p)
    if (bd_[p]) boundary_.push_back(p);
}

SubDomain SubDomain::from_rect(const GridDomain& d, int ix0, int iy0, int ix1, int iy1) {
  if (ix1 - ix0 < 2 || iy1 - iy0 < 2 || !d.contains(ix0, iy0) || !d.contains(ix1, iy1))
    throw Error(ErrorCode::InvalidArgument, "subdomain rectangle must enclose at least one node inside the grid");
  std::vector<std::uint8_t> m(d.size(), 0);
  for (int iy = iy0 + 1; iy < iy1; ++iy)
    for (int ix = ix0 + 1; ix < ix1; ++ix) m[d.index(ix, iy)] = 1;
  return SubDomain(d, std::move(m));
}

}  // namespace minorant
