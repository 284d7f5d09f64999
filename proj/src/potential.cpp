#include "minorant/potential.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <queue>

#include "minorant/error.hpp"
#include "minorant/kernels.hpp"

namespace minorant {

namespace {

constexpr int kDirectLimit = 64;
constexpr double kResidualTol = 1e-10;

// Solves mean(neighbors) - u = defect at every node with mask set, holding u
// fixed elsewhere. Masked nodes must be Interior nodes of d.
void solve_region(const GridDomain& d, const std::vector<std::uint8_t>& mask, const std::vector<std::size_t>& nodes,
                  std::vector<double>& u, const std::vector<double>& defect) {
  if (nodes.empty()) return;
  if (d.nx() <= kDirectLimit && d.ny() <= kDirectLimit) {
    std::vector<int> slot(d.size(), -1);
    for (std::size_t k = 0; k < nodes.size(); ++k) slot[nodes[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nodes.size() * 5);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::size_t p = nodes[k];
      const auto row = static_cast<int>(k);
      trip.emplace_back(row, row, 4.0);
      double b = -4.0 * defect[p];
      for (std::size_t n : d.neighbors(p)) {
        if (slot[n] >= 0) trip.emplace_back(row, slot[n], -1.0);
        else b += u[n];
      }
      rhs[row] = b;
    }
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::Singular, "stencil matrix factorization failed");
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    for (std::size_t i = 0; i < nodes.size(); ++i) u[nodes[i]] = sol[static_cast<Eigen::Index>(i)];
    return;
  }
  const kernels::GridView view = d.view(mask);
  std::vector<double> res(u.size());
  for (int sweep = 1;; ++sweep) {
    kernels::parallel::relax_sweep(view, u, defect);
    if (sweep % 16 != 0) continue;
    kernels::parallel::stencil_defect(view, u, res);
    double worst = 0.0;
    for (std::size_t p : nodes) worst = std::max(worst, std::abs(res[p] - defect[p]));
    if (worst <= kResidualTol) return;
    if (sweep > 50'000'000 / static_cast<int>(nodes.size()) + 100000)
      throw Error(ErrorCode::NumericalBreakdown, "Gauss-Seidel did not reach the residual target");
  }
}

std::vector<std::uint8_t> interior_mask(const GridDomain& d) {
  std::vector<std::uint8_t> m(d.size(), 0);
  for (std::size_t p : d.interior_nodes()) m[p] = 1;
  return m;
}

}  // namespace

ExtReal laplacian_defect(const GridDomain& d, const GridFunction& u, std::size_t p) {
  check_shape(d, u);
  if (p >= d.size() || !d.is_interior(p)) throw Error(ErrorCode::NotInterior, "defect requested at a non-interior node");
  double s = 0.0;
  if (!std::isfinite(u[p])) throw Error(ErrorCode::InfiniteValue, "infinite value at the center node");
  for (std::size_t n : d.neighbors(p)) {
    if (!std::isfinite(u[n])) throw Error(ErrorCode::InfiniteValue, "infinite value at a neighbor");
    s += u[n];
  }
  return 0.25 * s - u[p];
}

GridFunction stencil_defect(const GridDomain& d, const GridFunction& u) {
  check_shape(d, u);
  for (std::size_t p : d.inside_nodes())
    if (!std::isfinite(u[p])) throw Error(ErrorCode::InfiniteValue, "defect of a function with infinite values");
  GridFunction out(d);
  const auto mask = interior_mask(d);
  kernels::parallel::stencil_defect(d.view(mask), u.values, out.values);
  return out;
}

bool is_subharmonic(const GridDomain& d, const GridFunction& u, double tol) {
  const GridFunction def = stencil_defect(d, u);
  for (std::size_t p : d.interior_nodes())
    if (def[p] < -tol) return false;
  return true;
}

GridFunction solve_poisson(const GridDomain& d, const GridFunction& g, const GridFunction& defect) {
  check_shape(d, g);
  check_shape(d, defect);
  GridFunction u(d);
  for (std::size_t p : d.boundary_nodes()) {
    if (!std::isfinite(g[p])) throw Error(ErrorCode::InfiniteBoundaryValue, "Dirichlet data must be finite");
    u[p] = g[p];
  }
  for (std::size_t p : d.interior_nodes())
    if (!std::isfinite(defect[p])) throw Error(ErrorCode::InfiniteValue, "defect must be finite");
  solve_region(d, interior_mask(d), d.interior_nodes(), u.values, defect.values);
  return u;
}

GridFunction solve_dirichlet(const GridDomain& d, const GridFunction& g) { return solve_poisson(d, g, GridFunction(d)); }

DiscreteMeasure harmonic_measure(const GridDomain& d, const SubDomain& u, std::size_t p) {
  if (u.grid_size() != d.size()) throw Error(ErrorCode::DomainMismatch, "subdomain does not match the domain");
  if (p >= d.size() || !u.in_closure(p)) throw Error(ErrorCode::NodeOutsideSubdomain, "node outside the closed subdomain");
  DiscreteMeasure delta(d);
  delta[p] = 1.0;
  return balayage(delta, d, u);
}

DiscreteMeasure balayage(const DiscreteMeasure& mu, const GridDomain& d, const SubDomain& u) {
  check_measure(d, mu);
  if (u.grid_size() != d.size()) throw Error(ErrorCode::DomainMismatch, "subdomain does not match the domain");
  DiscreteMeasure out = mu;
  bool charged = false;
  for (std::size_t p : u.members()) charged = charged || mu[p] > 0.0;
  if (!charged) return out;
  // Adjoint solve: K w = mu|U with K = 4I - adjacency on U; the boundary node
  // b then receives the sum of w over its member neighbors.
  std::vector<double> w(d.size(), 0.0), defect(d.size(), 0.0);
  for (std::size_t p : u.members()) defect[p] = -0.25 * mu[p];
  solve_region(d, u.mask(), u.members(), w, defect);
  for (std::size_t p : u.members()) out[p] = 0.0;
  for (std::size_t p : u.members())
    for (std::size_t n : d.neighbors(p))
      if (!u.member(n)) out[n] += w[p];
  return out;
}

GridFunction harmonic_extension(const GridFunction& f, const GridDomain& d, const SubDomain& u) {
  check_shape(d, f);
  if (u.grid_size() != d.size()) throw Error(ErrorCode::DomainMismatch, "subdomain does not match the domain");
  for (std::size_t b : u.boundary())
    if (!std::isfinite(f[b])) throw Error(ErrorCode::InfiniteBoundaryValue, "extension data infinite on the boundary");
  GridFunction out = f;
  for (std::size_t p : u.members()) out[p] = 0.0;
  solve_region(d, u.mask(), u.members(), out.values, std::vector<double>(d.size(), 0.0));
  return out;
}

namespace {

// Second-order derivative estimate of h along one axis at p; `step` is the
// flat-index offset of the axis, `pos`/`len` locate p along it.
double axis_derivative(const GridDomain& d, const GridFunction& h, std::size_t p, std::size_t step, int pos, int len) {
  const double s = d.spacing();
  auto in = [&](int k) { return pos + k >= 0 && pos + k < len && d.is_inside(p + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(step)); };
  auto at = [&](int k) { return h[p + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(step)]; };
  if (in(-1) && in(1)) return (at(1) - at(-1)) / (2 * s);
  if (in(1) && in(2)) return (-3 * at(0) + 4 * at(1) - at(2)) / (2 * s);
  if (in(-1) && in(-2)) return (3 * at(0) - 4 * at(-1) + at(-2)) / (2 * s);
  if (in(1)) return (at(1) - at(0)) / s;
  if (in(-1)) return (at(0) - at(-1)) / s;
  return 0.0;
}

}  // namespace

ConjugateResult harmonic_conjugate(const GridFunction& h, const GridDomain& d, std::size_t anchor, double tol) {
  check_shape(d, h);
  if (anchor >= d.size() || !d.is_inside(anchor)) throw Error(ErrorCode::InvalidArgument, "anchor must be an inside node");
  double scale = 0.0;
  for (std::size_t p : d.inside_nodes()) {
    if (!std::isfinite(h[p])) throw Error(ErrorCode::InfiniteValue, "conjugate of a function with infinite values");
    scale = std::max(scale, std::abs(h[p]));
  }
  const GridFunction def = stencil_defect(d, h);
  for (std::size_t p : d.interior_nodes())
    if (std::abs(def[p]) > tol * (1.0 + scale)) throw Error(ErrorCode::NotHarmonic, "function is not discretely harmonic");
  if (d.euler_characteristic() != 1) throw Error(ErrorCode::MultiplyConnected, "domain is not simply connected");

  const std::size_t nx = static_cast<std::size_t>(d.nx());
  GridFunction hx(d), hy(d);
  for (std::size_t p : d.inside_nodes()) {
    hx[p] = axis_derivative(d, h, p, 1, d.ix(p), d.nx());
    hy[p] = axis_derivative(d, h, p, nx, d.iy(p), d.ny());
  }
  const double half = 0.5 * d.spacing();
  // v_x = -h_y, v_y = h_x, trapezoid rule along each edge.
  auto dx_step = [&](std::size_t p) { return -half * (hy[p] + hy[p + 1]); };
  auto dy_step = [&](std::size_t p) { return half * (hx[p] + hx[p + nx]); };

  ConjugateResult res{GridFunction(d), GridFunction(d), 0.0};
  std::vector<std::uint8_t> seen(d.size(), 0);
  std::queue<std::size_t> q;
  q.push(anchor);
  seen[anchor] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const std::size_t p = q.front();
    q.pop();
    ++reached;
    const int ix = d.ix(p), iy = d.iy(p);
    auto visit = [&](bool ok, std::size_t n, double inc) {
      if (!ok || seen[n] || !d.is_inside(n)) return;
      seen[n] = 1;
      res.v[n] = res.v[p] + inc;
      q.push(n);
    };
    visit(ix > 0, p - 1, ix > 0 ? -dx_step(p - 1) : 0.0);
    visit(ix + 1 < d.nx(), p + 1, ix + 1 < d.nx() ? dx_step(p) : 0.0);
    visit(iy > 0, p - nx, iy > 0 ? -dy_step(p - nx) : 0.0);
    visit(iy + 1 < d.ny(), p + nx, iy + 1 < d.ny() ? dy_step(p) : 0.0);
  }
  if (reached != d.inside_nodes().size())
    throw Error(ErrorCode::MultiplyConnected, "inside nodes are not connected");

  for (std::size_t p : d.inside_nodes()) {
    const int ix = d.ix(p), iy = d.iy(p);
    if (ix + 1 >= d.nx() || iy + 1 >= d.ny()) continue;
    if (!d.is_inside(p + 1) || !d.is_inside(p + nx) || !d.is_inside(p + nx + 1)) continue;
    const double loop = dx_step(p) + dy_step(p + 1) - dx_step(p + nx) - dy_step(p);
    res.residue[p] = loop;
    res.max_residue = std::max(res.max_residue, std::abs(loop));
  }
  return res;
}

}  // namespace minorant
