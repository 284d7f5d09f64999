#include "test_main.hpp"

#include <cmath>
#include <random>

#include "minorant/duality.hpp"
#include "minorant/error.hpp"
#include "minorant/potential.hpp"
#include "minorant/smoothing.hpp"

using namespace minorant;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DiscreteMeasure delta(const GridDomain& d, std::size_t p, double w = 1.0) {
  DiscreteMeasure m(d);
  m[p] = w;
  return m;
}

GridFunction random_field(const GridDomain& d, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  GridFunction f(d);
  for (std::size_t p : d.inside_nodes()) f[p] = u(rng);
  return f;
}

DiscreteMeasure random_nu(const GridDomain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure nu(d);
  for (std::size_t p : d.inside_nodes())
    if (u(rng) < 0.15) nu[p] = u(rng);
  nu[d.interior_nodes()[d.interior_nodes().size() / 2]] += 0.5;
  return nu;
}

double gap_tol(double v) { return 1e-7 * (1.0 + std::abs(v)); }

}  // namespace

TEST_CASE("supremal value examples") {
  const auto d = GridDomain::rectangle(3, 3, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  const auto nu = delta(d, 4);
  const auto five = supremal_value(d, cone, nu, GridFunction(d, 5.0));
  CHECK(five.value.value() == doctest::Approx(5.0));
  REQUIRE(five.argmax);
  for (std::size_t p : d.inside_nodes()) CHECK((*five.argmax)[p] == doctest::Approx(5.0));

  GridFunction dip(d, 5.0);
  dip[4] = 0.0;
  CHECK(supremal_value(d, cone, nu, dip).value.value() == doctest::Approx(0.0));
  GridFunction hole(d, 5.0);
  hole[4] = -kInf;
  CHECK(supremal_value(d, cone, nu, hole).value.is_minus_infinity());
  GridFunction open(d, 5.0);
  open[4] = kInf;
  CHECK(supremal_value(d, cone, nu, open).value.value() == doctest::Approx(5.0));
  CHECK_THROWS_AS(supremal_value(d, cone, DiscreteMeasure(d), open), Error);
}

TEST_CASE("sweep dual examples") {
  const auto d = GridDomain::rectangle(3, 3, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  const auto nu = delta(d, 4);
  GridFunction dip(d, 5.0);
  dip[4] = 0.0;
  const auto r = sweep_dual_value(d, cone, nu, dip);
  CHECK(r.value.value() == doctest::Approx(0.0));
  REQUIRE(r.certificate);
  CHECK(r.certificate->lambda[0] == doctest::Approx(0.0));
  CHECK(r.certificate->mu[4] == doctest::Approx(1.0));
  CHECK(r.certificate->c == 0.0);

  const auto five = sweep_dual_value(d, cone, nu, GridFunction(d, 5.0));
  CHECK(five.value.value() == doctest::Approx(5.0));
  CHECK(five.certificate->mu.mass() == doctest::Approx(1.0));

  // One unit of lambda on the center row sweeps delta_center to its neighbors.
  GridFunction lowered(d, 1.0);
  lowered[4] = 9.0;
  const auto swept = sweep_dual_value(d, cone, nu, lowered);
  CHECK(swept.value.value() == doctest::Approx(1.0));
  CHECK(swept.certificate->lambda[0] == doctest::Approx(1.0));
  for (std::size_t b : {1u, 3u, 5u, 7u}) CHECK(swept.certificate->mu[b] == doctest::Approx(0.25));
  CHECK(swept.certificate->mu[4] == doctest::Approx(0.0));

  GridFunction hole(d, 5.0);
  hole[4] = -kInf;
  CHECK(sweep_dual_value(d, cone, nu, hole).value.is_minus_infinity());
  // -inf far from the support of every certificate is harmless.
  const auto big = GridDomain::rectangle(5, 5, 1.0);
  GridFunction corner(big, 2.0);
  corner[0] = -kInf;
  const auto far = sweep_dual_value(big, ConeSpec::subharmonic(big), delta(big, 12), corner);
  CHECK(far.value.value() == doctest::Approx(2.0));
  CHECK(supremal_value(big, ConeSpec::subharmonic(big), delta(big, 12), corner).value.is_minus_infinity());

  CHECK_THROWS_AS(sweep_dual_value(d, ConeSpec::truncated_subharmonic(d, -1.0), nu, dip), Error);
}

TEST_CASE("affine sweeping") {
  const auto d = GridDomain::rectangle(5, 5, 1.0);
  const auto nu = delta(d, 12);
  std::mt19937_64 rng(6);
  const auto f = random_field(d, rng, -2.0, 2.0);
  const auto cone = sweep_dual_value(d, ConeSpec::subharmonic(d), nu, f);
  const auto same = affine_sweep_dual(d, ConeSpec::subharmonic(d), nu, f);
  CHECK(same.value.value() == doctest::Approx(cone.value.value()));
  CHECK(same.certificate->c == 0.0);

  const auto trunc = ConeSpec::truncated_subharmonic(d, -1.0);
  const auto zero = affine_sweep_dual(d, trunc, nu, GridFunction(d, 0.0));
  const auto pz = supremal_value(d, trunc, nu, GridFunction(d, 0.0));
  CHECK(zero.value.value() == doctest::Approx(pz.value.value()));
  double lambda_mass = 0.0;
  for (double l : zero.certificate->lambda) lambda_mass += l;
  CHECK(zero.value.value() >= -lambda_mass - 1e-9);
  CHECK(zero.certificate->c >= 0.0);
  CHECK(jensen_verify(d, trunc, nu, zero.certificate->mu, zero.certificate->c));

  const auto five = affine_sweep_dual(d, trunc, nu, GridFunction(d, 5.0));
  const auto p5 = supremal_value(d, trunc, nu, GridFunction(d, 5.0));
  CHECK(five.value.value() <= 5.0 + 1e-9);
  CHECK(five.value.value() >= p5.value.value() - 1e-9);
}

TEST_CASE("Jensen verification") {
  const auto d = GridDomain::rectangle(5, 5, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  const std::size_t c = 12;
  const auto nu = delta(d, c);
  DiscreteMeasure quarter(d);
  for (std::size_t n : d.neighbors(c)) quarter[n] = 0.25;
  CHECK(jensen_verify(d, cone, nu, quarter));
  CHECK(jensen_verify(d, cone, nu, nu));
  CHECK_FALSE(jensen_verify(d, cone, nu, delta(d, d.index(0, 2))));
  CHECK_FALSE(jensen_verify(d, cone, quarter, nu));

  const auto u = SubDomain::from_rect(d, 0, 0, 4, 4);
  CHECK(jensen_verify(d, cone, nu, harmonic_measure(d, u, c)));
  CHECK(jensen_verify(d, ConeSpec::harmonic(d), nu, harmonic_measure(d, u, c)));
  CHECK(jensen_verify(d, ConeSpec::harmonic(d), harmonic_measure(d, u, c), nu));
}

TEST_CASE("minorant existence") {
  const auto d = GridDomain::rectangle(4, 4, 1.0);
  std::mt19937_64 rng(2);
  const auto f = random_field(d, rng, -3.0, 3.0);
  const auto sub = minorant_exists(d, ConeSpec::subharmonic(d), f);
  CHECK(sub.exists);
  REQUIRE(sub.h);
  for (std::size_t p : d.inside_nodes()) CHECK((*sub.h)[p] <= f[p] + 1e-9);
  CHECK(is_subharmonic(d, *sub.h, 1e-9));

  GridFunction hole = f;
  hole[5] = -kInf;
  const auto none = minorant_exists(d, ConeSpec::subharmonic(d), hole);
  CHECK_FALSE(none.exists);
  REQUIRE(none.farkas);
  CHECK(none.farkas->infinite_node == std::size_t{5});

  ConeSpec positive = ConeSpec::subharmonic(d);
  positive.kind = ConeKind::Custom;
  const std::size_t first_node_row = positive.rows.size();
  for (std::size_t p : d.inside_nodes()) positive.rows.push_back({{{p, 1.0}}, ConeRelation::GreaterEqual, 0.0});
  GridFunction neg(d, 1.0);
  neg[d.index(3, 1)] = -0.5;
  const auto r = minorant_exists(d, positive, neg);
  CHECK_FALSE(r.exists);
  REQUIRE(r.farkas);
  const auto& w = r.farkas->row_weights;
  REQUIRE(w.size() == positive.rows.size());
  std::size_t target = 0;
  for (std::size_t k = first_node_row; k < w.size(); ++k)
    if (positive.rows[k].terms[0].first == d.index(3, 1)) target = k;
  CHECK(w[target] > 0.0);
}

TEST_CASE("zero gap, oracle argmax and weak duality on random instances") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 12; ++t) {
    const int n = 4 + t % 6;
    const auto d = GridDomain::rectangle(n, n + 1, 0.5);
    const auto cone = ConeSpec::subharmonic(d);
    const auto f = random_field(d, rng, -5.0, 5.0);
    const auto nu = random_nu(d, rng);

    std::vector<double> primal_path, dual_path;
    DualityOptions po, dop;
    po.observer = [&](const lp::IterationInfo& i) { primal_path.push_back(i.objective); };
    dop.observer = [&](const lp::IterationInfo& i) { dual_path.push_back(i.objective); };
    const auto p = supremal_value(d, cone, nu, f, po);
    const auto q = sweep_dual_value(d, cone, nu, f, dop);
    REQUIRE(p.value.is_finite());
    REQUIRE(q.value.is_finite());
    CHECK(std::abs(p.value.value() - q.value.value()) <= gap_tol(p.value.value()));
    for (double v : primal_path) CHECK(v <= q.value.value() + 1e-9);
    for (double v : dual_path) CHECK(v >= p.value.value() - 1e-9);

    const auto oracle = obstacle_minorant(d, f);
    const auto serial = obstacle_minorant(d, f, 1e-13, false);
    for (std::size_t x : d.inside_nodes()) {
      CHECK((*p.argmax)[x] == doctest::Approx(oracle[x]).epsilon(1e-7));
      CHECK(serial[x] == doctest::Approx(oracle[x]).epsilon(1e-9));
    }
    REQUIRE(q.certificate);
    CHECK(jensen_verify(d, cone, nu, q.certificate->mu));
    CHECK(integrate(f, q.certificate->mu) == doctest::Approx(q.value.value()).epsilon(1e-9));

    // Necessary direction of the germ characterization.
    for (int k = 0; k < 5; ++k) {
      auto g = f;
      std::uniform_real_distribution<double> up(0.0, 2.0);
      for (std::size_t x : d.inside_nodes()) g[x] += up(rng);
      CHECK(integrate(g, q.certificate->mu) + q.certificate->c >= supremal_value(d, cone, nu, g).value.value() - 1e-9);
    }

    // Smaller class, smaller value; raising F raises the value.
    const auto harm = supremal_value(d, ConeSpec::harmonic(d), nu, f);
    CHECK(harm.value.value() <= p.value.value() + 1e-9);
    auto raised = f;
    raised[d.inside_nodes()[3]] += 1.0;
    CHECK(supremal_value(d, cone, nu, raised).value.value() >= p.value.value() - 1e-9);
  }
}

TEST_CASE("homogeneity and superadditivity of the supremal map") {
  std::mt19937_64 rng(13);
  const auto d = GridDomain::rectangle(6, 6, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  for (int t = 0; t < 5; ++t) {
    const auto f1 = random_field(d, rng, -3.0, 3.0);
    const auto f2 = random_field(d, rng, -3.0, 3.0);
    const auto nu = random_nu(d, rng);
    const double v1 = supremal_value(d, cone, nu, f1).value.value();
    for (double s : {0.5, 2.0, 7.0}) {
      auto fs = f1;
      for (auto& v : fs.values) v *= s;
      CHECK(supremal_value(d, cone, nu, fs).value.value() == doctest::Approx(s * v1).epsilon(1e-9));
    }
    auto sum = f1;
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += f2[p];
    const double v2 = supremal_value(d, cone, nu, f2).value.value();
    CHECK(supremal_value(d, cone, nu, sum).value.value() >= v1 + v2 - 1e-9);
  }
}

TEST_CASE("positivity of dual functionals") {
  std::mt19937_64 rng(4);
  const auto d = GridDomain::rectangle(6, 5, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 6; ++t) {
    GridFunction g(d), defect(d);
    for (std::size_t p : d.boundary_nodes()) g[p] = u(rng);
    for (std::size_t p : d.interior_nodes()) defect[p] = t % 2 ? 0.1 * (u(rng) + 1.0) : 0.0;
    const auto f = solve_poisson(d, g, defect);
    const auto chk = dual_positivity_check(d, cone, random_nu(d, rng), f);
    CHECK(chk.applicable);
    CHECK(chk.min_mu >= -1e-9);
  }
  const auto rough = random_field(d, rng, -1.0, 1.0);
  CHECK_FALSE(dual_positivity_check(d, cone, random_nu(d, rng), rough).applicable);
}

TEST_CASE("mollifying a Jensen measure keeps it Jensen") {
  const auto d = GridDomain::rectangle(13, 13, 1.0);
  const auto cone = ConeSpec::subharmonic(d);
  const std::size_t a = d.index(6, 6);
  const auto u0 = SubDomain::from_rect(d, 5, 5, 7, 7);
  const auto u1 = SubDomain::from_rect(d, 3, 3, 9, 9);
  const auto mu = harmonic_measure(d, u1, a);
  RadiusField r(d, 1.0);
  for (std::size_t p : d.inside_nodes()) r[p] = d.is_interior(p) ? std::min(2.5, d.distance_to_boundary(p)) : 0.5;
  const auto rh = refine_radius(r, d, u0, u1);
  const auto nu = delta(d, a);
  REQUIRE(jensen_verify(d, cone, nu, mu));
  CHECK(jensen_verify(d, cone, nu, mollified_measure(mu, rh, d, &u1)));
}

// Harmonic sweeps have an all-zero right-hand side except at the pole, the
// most degenerate shape the solver meets.
TEST_CASE("harmonic sweep dual on larger grids") {
  std::mt19937_64 rng(31);
  for (int n : {9, 13, 15}) {
    const auto d = GridDomain::rectangle(n, n, 1.0 / (n - 1));
    const auto cone = ConeSpec::harmonic(d);
    const auto nu = delta(d, d.index(n / 2, n / 2));
    for (int k = 0; k < 4; ++k) {
      const auto f = random_field(d, rng, -0.5, 0.5);
      const auto p = supremal_value(d, cone, nu, f);
      const auto q = affine_sweep_dual(d, cone, nu, f);
      REQUIRE(p.value.is_finite());
      REQUIRE(q.value.is_finite());
      CHECK(std::abs(p.value.value() - q.value.value()) <= gap_tol(p.value.value()));
      CHECK(q.certificate->mu.mass() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(jensen_verify(d, cone, nu, q.certificate->mu, q.certificate->c));
    }
  }
}
