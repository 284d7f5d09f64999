#include "minorant/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "minorant/error.hpp"
#include "minorant/kernels.hpp"
#include "minorant/potential.hpp"

namespace minorant {

namespace {

// Harmonic measure seen from 0 of the lattice disc {|y|^2 <= n}, as taps.
const std::vector<KernelTap>& disc_measure(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<KernelTap>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))) + 2;
  const int side = 2 * m + 1;
  const auto dom = GridDomain::rectangle(side, side, 1.0);
  std::vector<std::uint8_t> member(dom.size(), 0);
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix)
      if ((ix - m) * (ix - m) + (iy - m) * (iy - m) <= n) member[dom.index(ix, iy)] = 1;
  const SubDomain disc(dom, member);
  const DiscreteMeasure w = harmonic_measure(dom, disc, dom.index(m, m));
  std::vector<KernelTap> taps;
  for (std::size_t p = 0; p < dom.size(); ++p)
    if (w[p] > 0.0) taps.push_back({dom.ix(p) - m, dom.iy(p) - m, w[p]});
  return cache.emplace(n, std::move(taps)).first->second;
}

std::vector<int> sums_of_two_squares(int limit) {
  std::set<int> s;
  for (int a = 0; a * a <= limit; ++a)
    for (int b = a; a * a + b * b <= limit; ++b) s.insert(a * a + b * b);
  return {s.begin(), s.end()};
}

}  // namespace

RadialKernel RadialKernel::make(double r, double h) {
  if (!(r > 0.0) || !std::isfinite(r) || !(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel radius must be positive");
  RadialKernel k;
  k.r_ = r;
  k.h_ = h;
  const double big_r = r / h;
  // Mixing mass of the radial profile on [a, b], relative to its total.
  auto mass = [big_r](double a, double b) {
    const double ta = 1.0 - a * a / (big_r * big_r), tb = 1.0 - b * b / (big_r * big_r);
    return ta * ta * ta - tb * tb * tb;
  };
  const int span = static_cast<int>(std::ceil(big_r)) + 1;
  const int side = 2 * span + 1;
  std::vector<double> grid(static_cast<std::size_t>(side) * side, 0.0);
  auto cell = [&](int dx, int dy) -> double& { return grid[static_cast<std::size_t>(dy + span) * side + (dx + span)]; };

  cell(0, 0) += mass(0.0, std::min(1.0, big_r));
  const int limit = static_cast<int>(std::ceil(big_r * big_r)) + 1;
  const auto ns = sums_of_two_squares(limit);
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    const double a = 1.0 + std::sqrt(static_cast<double>(ns[i]));
    if (a >= big_r) break;
    const double b = std::min(big_r, 1.0 + std::sqrt(static_cast<double>(ns[i + 1])));
    const double w = mass(a, b);
    for (const auto& t : disc_measure(ns[i])) cell(t.dx, t.dy) += w * t.weight;
  }

  // Average over the dihedral group of the square to remove solver asymmetry.
  std::vector<double> sym(grid.size(), 0.0);
  double total = 0.0;
  for (int dy = -span; dy <= span; ++dy)
    for (int dx = -span; dx <= span; ++dx) {
      // Evaluate the orbit from its canonical member so images agree bitwise.
      const int a = std::max(std::abs(dx), std::abs(dy)), b = std::min(std::abs(dx), std::abs(dy));
      const int img[8][2] = {{a, b}, {-a, b}, {a, -b}, {-a, -b}, {b, a}, {-b, a}, {b, -a}, {-b, -a}};
      double s = 0.0;
      for (const auto& q : img) s += cell(q[0], q[1]);
      sym[static_cast<std::size_t>(dy + span) * side + (dx + span)] = s / 8.0;
      total += s / 8.0;
    }
  for (int dy = -span; dy <= span; ++dy)
    for (int dx = -span; dx <= span; ++dx) {
      const double w = sym[static_cast<std::size_t>(dy + span) * side + (dx + span)];
      if (w <= 0.0) continue;
      k.taps_.push_back({dx, dy, w / total});
      k.reach_ = std::max(k.reach_, std::max(std::abs(dx), std::abs(dy)));
    }
  return k;
}

std::string RadialKernel::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "dx,dy,weight\n";
  for (const auto& t : taps_) os << t.dx << ',' << t.dy << ',' << t.weight << '\n';
  return os.str();
}

namespace {

void check_radius(const GridDomain& d, const RadiusField& r) {
  check_shape(d, r);
  for (std::size_t p : d.inside_nodes())
    if (!(r[p] > 0.0) || !std::isfinite(r[p])) throw Error(ErrorCode::InvalidArgument, "radius must be positive and finite");
}

// Distance from p to the nearest lattice point that is not an inside node,
// counting the points just beyond the array as outside.
double inside_reach(const GridDomain& d, std::size_t p) {
  const int ix = d.ix(p), iy = d.iy(p);
  double best = d.spacing() * std::min({ix + 1, d.nx() - ix, iy + 1, d.ny() - iy});
  for (std::size_t q = 0; q < d.size(); ++q)
    if (!d.is_inside(q)) best = std::min(best, std::hypot(d.x(p) - d.x(q), d.y(p) - d.y(q)));
  return best;
}

void lipschitz_in_place(const GridDomain& d, RadiusField& r) {
  const auto& nodes = d.inside_nodes();
  std::vector<double> v(nodes.size()), px(nodes.size()), py(nodes.size()), out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    v[i] = r[nodes[i]];
    px[i] = d.x(nodes[i]);
    py[i] = d.y(nodes[i]);
  }
  kernels::parallel::lipschitz_envelope(v, px, py, out);
  for (std::size_t i = 0; i < nodes.size(); ++i) r[nodes[i]] = out[i];
}

// Row-per-node smoothing operator: row x holds alpha_x^{(r(x))}.
struct SmoothingOperator {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> weight;
};

SmoothingOperator build_operator(const RadiusField& r, const GridDomain& d) {
  check_radius(d, r);
  std::map<double, RadialKernel> kernels_by_radius;
  SmoothingOperator op;
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (d.is_inside(p)) {
      auto it = kernels_by_radius.find(r[p]);
      if (it == kernels_by_radius.end()) it = kernels_by_radius.emplace(r[p], RadialKernel::make(r[p], d.spacing())).first;
      for (const auto& t : it->second.taps()) {
        const int jx = d.ix(p) + t.dx, jy = d.iy(p) + t.dy;
        if (!d.contains(jx, jy) || !d.is_inside(d.index(jx, jy)))
          throw Error(ErrorCode::BallLeavesDomain, "smoothing ball leaves the domain");
        op.col.push_back(d.index(jx, jy));
        op.weight.push_back(t.weight);
      }
    }
    op.row_ptr.push_back(op.col.size());
  }
  return op;
}

}  // namespace

RadiusField refine_radius(const RadiusField& r, const GridDomain& d, const SubDomain& u0, const SubDomain& u1) {
  check_radius(d, r);
  if (u0.grid_size() != d.size() || u1.grid_size() != d.size())
    throw Error(ErrorCode::DomainMismatch, "subdomain does not match the domain");
  for (std::size_t b : u1.boundary())
    if (d.is_boundary(b)) throw Error(ErrorCode::EmptyMargin, "U1 touches the boundary of D");
  for (std::size_t p : u0.members())
    if (!u1.member(p)) throw Error(ErrorCode::InvalidArgument, "U0 is not contained in U1");
  for (std::size_t p : u0.boundary())
    if (!u1.member(p)) throw Error(ErrorCode::InvalidArgument, "closure of U0 is not contained in U1");

  const double h = d.spacing();
  RadiusField out(d);
  for (std::size_t p : d.inside_nodes()) {
    double cap = r[p];
    if (d.is_interior(p)) cap = std::min({cap, d.distance_to_boundary(p) - 0.5 * h, inside_reach(d, p) - 0.5 * h});
    else cap = std::min(cap, 0.5 * h);
    if (!u1.member(p)) {
      double to_u0 = std::numeric_limits<double>::infinity();
      for (std::size_t q : u0.members()) to_u0 = std::min(to_u0, std::hypot(d.x(p) - d.x(q), d.y(p) - d.y(q)));
      cap = std::min(cap, to_u0 - 0.5 * h);
    }
    out[p] = cap;
  }
  lipschitz_in_place(d, out);
  RadiusField mean = out;
  for (std::size_t p : d.interior_nodes()) {
    double s = 0.0;
    for (std::size_t n : d.neighbors(p)) s += out[n];
    mean[p] = std::min(out[p], 0.25 * s);
  }
  lipschitz_in_place(d, mean);
  return mean;
}

GridFunction variable_smooth(const GridFunction& f, const RadiusField& r, const GridDomain& d) {
  check_shape(d, f);
  const SmoothingOperator op = build_operator(r, d);
  for (std::size_t c : op.col)
    if (!std::isfinite(f[c])) throw Error(ErrorCode::InfiniteValue, "function infinite inside a smoothing ball");
  GridFunction out(d);
  kernels::parallel::csr_apply({op.row_ptr, op.col, op.weight}, f.values, out.values);
  return out;
}

DiscreteMeasure mollified_measure(const DiscreteMeasure& mu, const RadiusField& r, const GridDomain& d,
                                  const SubDomain* u1) {
  check_measure(d, mu);
  if (u1 != nullptr) {
    if (u1->grid_size() != d.size()) throw Error(ErrorCode::DomainMismatch, "subdomain does not match the domain");
    for (std::size_t p : u1->members())
      if (mu[p] > 0.0) throw Error(ErrorCode::SupportViolation, "measure charges U1");
  }
  const SmoothingOperator op = build_operator(r, d);
  DiscreteMeasure out(d);
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (mu[p] == 0.0) continue;
    for (std::size_t k = op.row_ptr[p]; k < op.row_ptr[p + 1]; ++k) out[op.col[k]] += mu[p] * op.weight[k];
  }
  return out;
}

namespace {

ExtReal node_mean(const GridFunction& m, const std::vector<std::size_t>& nodes) {
  ExtReal s = 0.0;
  for (std::size_t q : nodes) s = s + ExtReal(m[q]);
  return scale(1.0 / static_cast<double>(nodes.size()), s);
}

template <class Select>
std::vector<std::size_t> collect(const GridDomain& d, std::size_t z, double radius, Select select) {
  const double h = d.spacing();
  const int span = static_cast<int>(std::ceil(radius / h)) + 1;
  std::vector<std::size_t> nodes;
  for (int dy = -span; dy <= span; ++dy)
    for (int dx = -span; dx <= span; ++dx) {
      if (!select(h * std::hypot(dx, dy))) continue;
      const int jx = d.ix(z) + dx, jy = d.iy(z) + dy;
      if (!d.contains(jx, jy) || !d.is_inside(d.index(jx, jy)))
        throw Error(ErrorCode::BallLeavesDomain, "averaging region leaves the domain");
      nodes.push_back(d.index(jx, jy));
    }
  return nodes;
}

}  // namespace

ExtReal ball_average(const GridFunction& m, const GridDomain& d, std::size_t z, double radius) {
  check_shape(d, m);
  if (z >= d.size() || !d.is_inside(z)) throw Error(ErrorCode::InvalidArgument, "ball center must be an inside node");
  if (!(radius >= d.spacing())) throw Error(ErrorCode::RadiusTooSmall, "ball radius below one lattice step");
  return node_mean(m, collect(d, z, radius, [radius](double dist) { return dist < radius; }));
}

ExtReal sphere_average(const GridFunction& m, const GridDomain& d, std::size_t z, double radius) {
  check_shape(d, m);
  if (z >= d.size() || !d.is_inside(z)) throw Error(ErrorCode::InvalidArgument, "sphere center must be an inside node");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  const double half = 0.5 * d.spacing();
  const double h = d.spacing();
  // Count the ring before checking containment so sparse rings report first.
  const int span = static_cast<int>(std::ceil(radius / h)) + 1;
  int count = 0;
  for (int dy = -span; dy <= span; ++dy)
    for (int dx = -span; dx <= span; ++dx)
      if (std::abs(h * std::hypot(dx, dy) - radius) <= half) ++count;
  if (count < 8) throw Error(ErrorCode::RingTooSparse, "fewer than 8 nodes on the ring");
  return node_mean(m, collect(d, z, radius, [radius, half](double dist) { return std::abs(dist - radius) <= half; }));
}

}  // namespace minorant
