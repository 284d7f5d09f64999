#include "test_main.hpp"

#include <cmath>
#include <random>

#include "minorant/error.hpp"
#include "minorant/potential.hpp"

using namespace minorant;

namespace {

GridFunction sample(const GridDomain& d, auto fn) {
  GridFunction f(d);
  for (std::size_t p : d.inside_nodes()) f[p] = fn(d.x(p), d.y(p));
  return f;
}

GridFunction random_subharmonic(const GridDomain& d, std::mt19937_64& rng, bool harmonic = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction g(d), defect(d);
  for (std::size_t p : d.boundary_nodes()) g[p] = u(rng);
  if (!harmonic)
    for (std::size_t p : d.interior_nodes()) defect[p] = 0.5 * (u(rng) + 1.0) * (u(rng) > 0.3 ? 1.0 : 0.0);
  return solve_poisson(d, g, defect);
}

DiscreteMeasure random_measure(const GridDomain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure mu(d);
  for (std::size_t p : d.inside_nodes())
    if (u(rng) < 0.3) mu[p] = u(rng);
  return mu;
}

}  // namespace

TEST_CASE("domain roles and topology") {
  const auto d = GridDomain::rectangle(4, 3, 0.5, -1.0, 2.0);
  CHECK(d.interior_nodes().size() == 2);
  CHECK(d.boundary_nodes().size() == 10);
  CHECK(d.x(d.index(3, 1)) == doctest::Approx(0.5));
  CHECK(d.y(d.index(3, 1)) == doctest::Approx(2.5));
  CHECK(d.euler_characteristic() == 1);

  std::vector<std::uint8_t> ring(49, 1);
  ring[24] = 0;
  const auto annulus = GridDomain::from_mask(7, 7, 1.0, ring);
  CHECK(annulus.euler_characteristic() == 0);
  CHECK(annulus.is_boundary(23));

  std::vector<std::uint8_t> split(5 * 7, 1);
  for (int iy = 0; iy < 5; ++iy) split[static_cast<std::size_t>(iy) * 7 + 3] = 0;
  CHECK_THROWS_AS(GridDomain::from_mask(7, 5, 1.0, split), Error);
  CHECK_THROWS_AS(GridDomain::rectangle(2, 5, 1.0), Error);
}

TEST_CASE("stencil defect") {
  const auto d = GridDomain::rectangle(5, 5, 0.1);
  const auto c = GridFunction(d, 3.0);
  for (std::size_t p : d.interior_nodes()) CHECK(laplacian_defect(d, c, p).value() == doctest::Approx(0.0));

  const auto small = GridDomain::rectangle(3, 3, 1.0);
  GridFunction u(small);
  u[small.index(0, 1)] = 1;
  u[small.index(2, 1)] = 2;
  u[small.index(1, 0)] = 3;
  u[small.index(1, 2)] = 4;
  CHECK(laplacian_defect(small, u, 4).value() == doctest::Approx(2.5));

  const double h = 0.1;
  const auto sq = sample(d, [](double x, double y) { return (x - 0.2) * (x - 0.2) + (y - 0.2) * (y - 0.2); });
  for (std::size_t p : d.interior_nodes()) CHECK(laplacian_defect(d, sq, p).value() == doctest::Approx(h * h));
  CHECK(is_subharmonic(d, sq));

  CHECK_THROWS_AS(laplacian_defect(d, c, 0), Error);
  GridFunction inf = c;
  inf[d.index(2, 1)] = -std::numeric_limits<double>::infinity();
  try {
    laplacian_defect(d, inf, d.index(2, 2));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfiniteValue);
  }
}

TEST_CASE("Dirichlet problem") {
  const auto small = GridDomain::rectangle(3, 3, 1.0);
  GridFunction g(small);
  g[small.index(0, 1)] = 1;
  g[small.index(2, 1)] = 2;
  g[small.index(1, 0)] = 3;
  g[small.index(1, 2)] = 4;
  CHECK(solve_dirichlet(small, g)[4] == doctest::Approx(2.5));

  const auto d = GridDomain::rectangle(9, 7, 0.25, 1.0, -1.0);
  const auto c = solve_dirichlet(d, GridFunction(d, -2.0));
  for (std::size_t p : d.inside_nodes()) CHECK(c[p] == doctest::Approx(-2.0));
  const auto xs = sample(d, [](double x, double) { return x; });
  const auto sol = solve_dirichlet(d, xs);
  for (std::size_t p : d.inside_nodes()) CHECK(sol[p] == doctest::Approx(xs[p]).epsilon(1e-12));

  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto u = random_subharmonic(d, rng, true);
    double lo = 1e9, hi = -1e9;
    for (std::size_t b : d.boundary_nodes()) {
      lo = std::min(lo, u[b]);
      hi = std::max(hi, u[b]);
    }
    for (std::size_t p : d.inside_nodes()) {
      CHECK(u[p] >= lo - 1e-12);
      CHECK(u[p] <= hi + 1e-12);
    }
    const auto def = stencil_defect(d, u);
    for (std::size_t p : d.interior_nodes()) CHECK(std::abs(def[p]) <= 1e-10);
  }
}

TEST_CASE("iterative path beyond the direct-solve size") {
  std::vector<std::uint8_t> mask(70 * 66, 1);
  const auto d = GridDomain::from_mask(70, 66, 0.1, mask);
  const auto data = sample(d, [](double x, double y) { return 1.0 + x - 2.0 * y + x * y; });
  const auto sol = solve_dirichlet(d, data);
  double worst = 0.0;
  for (std::size_t p : d.inside_nodes()) worst = std::max(worst, std::abs(sol[p] - data[p]));
  CHECK(worst < 1e-7);
  const auto def = stencil_defect(d, sol);
  for (std::size_t p : d.interior_nodes()) CHECK(std::abs(def[p]) <= 1e-10);
}

TEST_CASE("harmonic measure") {
  const auto d3 = GridDomain::rectangle(3, 3, 1.0);
  const auto u3 = SubDomain::from_rect(d3, 0, 0, 2, 2);
  const auto w = harmonic_measure(d3, u3, 4);
  for (std::size_t b : {1u, 3u, 5u, 7u}) CHECK(w[b] == doctest::Approx(0.25));
  CHECK(w.mass() == doctest::Approx(1.0));

  const auto d = GridDomain::rectangle(7, 7, 1.0);
  const auto u = SubDomain::from_rect(d, 1, 1, 5, 5);
  const auto at_bd = harmonic_measure(d, u, d.index(1, 3));
  CHECK(at_bd[d.index(1, 3)] == 1.0);
  CHECK(at_bd.mass() == 1.0);
  try {
    harmonic_measure(d, u, d.index(0, 0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NodeOutsideSubdomain);
  }

  const std::size_t center = d.index(3, 3);
  const auto wc = harmonic_measure(d, u, center);
  CHECK(wc.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wc[d.index(2, 1)] < wc[d.index(3, 1)]);
  CHECK(wc[d.index(1, 2)] < wc[d.index(1, 3)]);

  // Random-walk oracle.
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dir(0, 3);
  const int walks = 200000;
  std::vector<double> hits(d.size(), 0.0);
  for (int k = 0; k < walks; ++k) {
    std::size_t p = center;
    while (u.member(p)) p = d.neighbors(p)[static_cast<std::size_t>(dir(rng))];
    hits[p] += 1.0;
  }
  for (std::size_t b : u.boundary()) {
    const double est = hits[b] / walks;
    const double sigma = std::sqrt(wc[b] * (1 - wc[b]) / walks);
    CHECK(std::abs(est - wc[b]) <= 5 * sigma + 1e-12);
  }

  // Reproduces harmonic functions.
  const auto hfun = sample(d, [](double x, double y) { return x * y - 0.5 * x + 2.0; });
  double s = 0.0;
  for (std::size_t b : u.boundary()) s += wc[b] * hfun[b];
  CHECK(s == doctest::Approx(hfun[center]).epsilon(1e-12));
}

TEST_CASE("balayage") {
  const auto d3 = GridDomain::rectangle(3, 3, 1.0);
  const auto u3 = SubDomain::from_rect(d3, 0, 0, 2, 2);
  DiscreteMeasure delta(d3);
  delta[4] = 1.0;
  const auto bal = balayage(delta, d3, u3);
  CHECK(bal[4] == 0.0);
  for (std::size_t b : {1u, 3u, 5u, 7u}) CHECK(bal[b] == doctest::Approx(0.25));
  CHECK(balayage(DiscreteMeasure(d3), d3, u3).mass() == 0.0);

  const auto d = GridDomain::rectangle(12, 10, 0.2);
  const auto u = SubDomain::from_rect(d, 2, 2, 8, 7);
  DiscreteMeasure off(d);
  off[d.index(10, 8)] = 0.7;
  off[d.index(0, 0)] = 0.2;
  CHECK(balayage(off, d, u).weights == off.weights);

  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto mu = random_measure(d, rng);
    const auto mb = balayage(mu, d, u);
    CHECK(std::abs(mb.mass() - mu.mass()) <= 1e-12);
    for (std::size_t p : u.members()) CHECK(mb[p] == 0.0);
    for (int k = 0; k < 5; ++k) {
      const auto h = random_subharmonic(d, rng);
      CHECK(integrate(h, mu) <= integrate(h, mb) + 1e-9);
      const auto hh = random_subharmonic(d, rng, true);
      CHECK(integrate(hh, mu) == doctest::Approx(integrate(hh, mb)).epsilon(1e-9));
      GridFunction f(d);
      std::uniform_real_distribution<double> r(-3.0, 3.0);
      for (std::size_t p : d.inside_nodes()) f[p] = r(rng);
      CHECK(integrate(harmonic_extension(f, d, u), mu) == doctest::Approx(integrate(f, mb)).epsilon(1e-9));
    }
  }
}

TEST_CASE("harmonic extension") {
  const auto d = GridDomain::rectangle(9, 9, 0.5);
  const auto u = SubDomain::from_rect(d, 1, 2, 7, 6);
  const GridFunction c(d, 4.0);
  const auto ec = harmonic_extension(c, d, u);
  for (std::size_t p : d.inside_nodes()) CHECK(ec[p] == doctest::Approx(4.0).epsilon(1e-13));
  const auto xs = sample(d, [](double x, double) { return x; });
  const auto ex = harmonic_extension(xs, d, u);
  for (std::size_t p : d.inside_nodes()) CHECK(ex[p] == doctest::Approx(xs[p]).epsilon(1e-12));

  GridFunction spike = c;
  spike[d.index(4, 4)] = 100.0;
  spike[d.index(3, 3)] = std::numeric_limits<double>::infinity();
  const auto fixed = harmonic_extension(spike, d, u);
  CHECK(fixed[d.index(4, 4)] == doctest::Approx(4.0));
  CHECK(fixed[d.index(3, 3)] == doctest::Approx(4.0));

  GridFunction bad = c;
  bad[d.index(1, 4)] = -std::numeric_limits<double>::infinity();
  try {
    harmonic_extension(bad, d, u);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfiniteBoundaryValue);
  }
}

TEST_CASE("harmonic conjugate") {
  const auto d = GridDomain::rectangle(9, 8, 0.25, -1.0, -1.0);
  const std::size_t anchor = d.index(2, 3);
  const auto x = sample(d, [](double x, double) { return x; });
  const auto vx = harmonic_conjugate(x, d, anchor);
  for (std::size_t p : d.inside_nodes()) CHECK(vx.v[p] == doctest::Approx(d.y(p) - d.y(anchor)));
  CHECK(vx.max_residue < 1e-14);

  const auto xy = sample(d, [](double x, double y) { return x * y; });
  const auto vxy = harmonic_conjugate(xy, d, anchor);
  const double ax = d.x(anchor), ay = d.y(anchor);
  for (std::size_t p : d.inside_nodes()) {
    const double exact = 0.5 * (d.y(p) * d.y(p) - d.x(p) * d.x(p)) - 0.5 * (ay * ay - ax * ax);
    CHECK(vxy.v[p] == doctest::Approx(exact).epsilon(1e-12));
  }

  const auto vc = harmonic_conjugate(GridFunction(d, 7.0), d, anchor);
  for (std::size_t p : d.inside_nodes()) CHECK(vc.v[p] == 0.0);

  const auto sq = sample(d, [](double x, double y) { return x * x + y; });
  try {
    harmonic_conjugate(sq, d, anchor);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHarmonic);
  }
  std::vector<std::uint8_t> ring(81, 1);
  ring[40] = 0;
  const auto annulus = GridDomain::from_mask(9, 9, 1.0, ring);
  try {
    harmonic_conjugate(GridFunction(annulus, 1.0), annulus, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MultiplyConnected);
  }
}

TEST_CASE("conjugate residues of a smooth harmonic function shrink quadratically") {
  std::vector<double> res;
  for (int n : {9, 17, 33}) {
    const double h = 2.0 / (n - 1);
    const auto d = GridDomain::rectangle(n, n, h, -1.0, -1.0);
    // Dirichlet data from Re(exp z): discretely harmonic field close to it.
    const auto g = sample(d, [](double x, double y) { return std::exp(x) * std::cos(y); });
    const auto u = solve_dirichlet(d, g);
    res.push_back(harmonic_conjugate(u, d, d.index(0, 0)).max_residue);
  }
  const double order = std::log2(res[1] / res[2]);
  MESSAGE("residues " << res[0] << " " << res[1] << " " << res[2] << " order " << order);
  CHECK(order >= 1.8);
}
