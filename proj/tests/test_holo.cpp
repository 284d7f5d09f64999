#include "test_main.hpp"

#include <cmath>
#include <random>

#include "minorant/error.hpp"
#include "minorant/holo.hpp"
#include "minorant/potential.hpp"

using namespace minorant;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DiscreteMeasure delta(const GridDomain& d, std::size_t p) {
  DiscreteMeasure m(d);
  m[p] = 1.0;
  return m;
}

Divisor one_zero(const GridDomain& d, std::size_t p, int mult = 1) { return Divisor{{{d.x(p), d.y(p), mult}}}; }

}  // namespace

TEST_CASE("divisor log potential") {
  const auto d = GridDomain::rectangle(9, 9, 1.0);
  const std::size_t c = d.index(4, 4);
  const auto u = divisor_log_potential(one_zero(d, c), d);
  CHECK(u[d.index(5, 4)] == doctest::Approx(0.0));
  CHECK(u[d.index(4, 6)] == doctest::Approx(std::log(2.0)));
  CHECK(u[c] == doctest::Approx(std::log(0.5)));

  const Divisor twice{{{0.0, 0.0, 2}}};
  const auto e = GridDomain::rectangle(5, 5, 1.0, -2.0, -2.0);
  const auto far = GridDomain::rectangle(3, 3, std::exp(1.0), -std::exp(1.0), -std::exp(1.0));
  CHECK(divisor_log_potential(twice, far)[far.index(2, 1)] == doctest::Approx(2.0));
  CHECK(divisor_log_potential(twice, e)[e.index(2, 2)] == doctest::Approx(2.0 * std::log(0.5)));

  const auto fine = GridDomain::rectangle(11, 11, 0.1);
  const auto uf = divisor_log_potential(Divisor{{{0.5, 0.5, 3}}}, fine);
  CHECK(uf[fine.index(5, 5)] == doctest::Approx(3.0 * std::log(0.05)));

  CHECK_THROWS_AS(divisor_log_potential(Divisor{{{20.0, 0.0, 1}}}, d), Error);
  CHECK_THROWS_AS(divisor_log_potential(Divisor{{{1.0, 1.0, 0}}}, d), Error);
}

TEST_CASE("uq potential modes") {
  const auto d = GridDomain::rectangle(6, 5, 1.0);
  const GridFunction e(d, 1.0);
  const GridFunction zero(d, 0.0);
  const auto m = uq_potential(e, zero, d, UqMode::Max);
  const auto s = uq_potential(zero, zero, d, UqMode::SqrtSum);
  for (std::size_t p : d.inside_nodes()) {
    CHECK(m[p] == doctest::Approx(1.0));
    CHECK(s[p] == doctest::Approx(0.5 * std::log(2.0)));
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-30.0, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    GridFunction a(d), b(d);
    for (std::size_t p : d.inside_nodes()) {
      a[p] = val(rng);
      b[p] = val(rng);
    }
    if (trial == 0) a[d.index(2, 2)] = -kInf;
    const auto mx = uq_potential(a, b, d, UqMode::Max);
    const auto sq = uq_potential(a, b, d, UqMode::SqrtSum);
    const auto swapped = uq_potential(b, a, d, UqMode::SqrtSum);
    for (std::size_t p : d.inside_nodes()) {
      CHECK(mx[p] <= sq[p] + 1e-12);
      CHECK(sq[p] <= mx[p] + 0.5 * std::log(2.0) + 1e-12);
      CHECK(swapped[p] == sq[p]);
    }
  }

  const auto other = GridDomain::rectangle(4, 4, 1.0);
  CHECK_THROWS_AS(uq_potential(GridFunction(other), zero, d, UqMode::Max), Error);
}

TEST_CASE("minorant criterion examples") {
  const auto d = GridDomain::rectangle(9, 9, 1.0);
  const std::size_t c = d.index(4, 4);
  const GridFunction zero(d, 0.0);

  const auto trivial = minorant_criterion(zero, zero, ConeSpec::subharmonic(d), delta(d, c), d);
  REQUIRE(trivial.feasible);
  for (std::size_t p : d.inside_nodes()) CHECK((*trivial.h)[p] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(*trivial.C == doctest::Approx(0.0));

  const auto u = divisor_log_potential(one_zero(d, c), d);
  const auto rep = minorant_criterion(u, zero, ConeSpec::harmonic(d), delta(d, c), d);
  REQUIRE(rep.feasible);
  CHECK(rep.dual_value.is_finite());
  CHECK(rep.primal_value.value() == doctest::Approx(rep.dual_value.value()).epsilon(1e-7));
  CHECK(*rep.C <= 1e-9);
  for (std::size_t p : d.inside_nodes()) CHECK(u[p] + (*rep.h)[p] <= zero[p] + *rep.C + 1e-9);
  CHECK(is_subharmonic(d, *rep.h));

  GridFunction hole(d, 0.0);
  hole[d.index(2, 6)] = -kInf;
  const auto bad = minorant_criterion(u, hole, ConeSpec::subharmonic(d), delta(d, c), d);
  CHECK_FALSE(bad.feasible);
  REQUIRE(bad.farkas);
  CHECK(bad.farkas->infinite_node == d.index(2, 6));
  CHECK(bad.dual_value.is_minus_infinity());

  // A zero of the weight canceled by a zero of the potential is harmless.
  GridFunction cancel = u;
  GridFunction uz = u;
  cancel[d.index(2, 6)] = -kInf;
  uz[d.index(2, 6)] = -kInf;
  CHECK(minorant_criterion(uz, cancel, ConeSpec::subharmonic(d), delta(d, c), d).feasible);

  CHECK_THROWS_AS(minorant_criterion(zero, zero, ConeSpec::subharmonic(d), DiscreteMeasure(d), d), Error);
}

TEST_CASE("criterion necessity against sweepings") {
  const auto d = GridDomain::rectangle(11, 11, 1.0);
  const std::size_t c = d.index(5, 5);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> lo(1, 4), hi(6, 9);
  const Divisor z{{{5.0, 5.0, 1}, {3.0, 6.0, 2}}};
  const auto u = divisor_log_potential(z, d);
  GridFunction m(d);
  for (std::size_t p : d.inside_nodes()) m[p] = 0.3 * (d.x(p) - 5.0) + 2.0;
  const auto cone = ConeSpec::subharmonic(d);
  const auto rep = minorant_criterion(u, m, cone, delta(d, c), d);
  REQUIRE(rep.feasible);
  REQUIRE(rep.certificate);

  auto holds = [&](const DiscreteMeasure& mu, double cc) {
    return integrate(u, mu) <= integrate(m, mu) + *rep.integral_constant + cc + 1e-9;
  };
  CHECK(holds(rep.certificate->mu, rep.certificate->c));
  for (int k = 0; k < 20; ++k) {
    const auto sub = SubDomain::from_rect(d, lo(rng), lo(rng), hi(rng), hi(rng));
    const auto mu = harmonic_measure(d, sub, c);
    REQUIRE(jensen_verify(d, cone, delta(d, c), mu));
    CHECK(holds(mu, 0.0));
  }
}

TEST_CASE("criterion is monotone in the divisor and symmetric in q") {
  const auto d = GridDomain::rectangle(9, 9, 1.0);
  const std::size_t c = d.index(4, 4);
  const Divisor big{{{4.0, 4.0, 2}, {2.0, 5.0, 1}, {6.0, 3.0, 1}}};
  const Divisor small{{{4.0, 4.0, 1}, {6.0, 3.0, 1}}};
  GridFunction m(d);
  for (std::size_t p : d.inside_nodes()) m[p] = 0.1 * (d.x(p) * d.x(p) + d.y(p) * d.y(p));
  const auto cone = ConeSpec::subharmonic(d);
  const auto base = minorant_criterion(divisor_log_potential(big, d), m, cone, delta(d, c), d);
  REQUIRE(base.feasible);
  CHECK(minorant_criterion(divisor_log_potential(small, d), m, cone, delta(d, c), d).feasible);

  const auto q1 = divisor_log_potential(small, d);
  const auto q2 = divisor_log_potential(Divisor{{{2.0, 2.0, 1}}}, d);
  const auto uq = uq_potential(q1, q2, d, UqMode::Max);
  const auto qu = uq_potential(q2, q1, d, UqMode::Max);
  CHECK(uq.values == qu.values);
  const auto a = minorant_criterion(uq, m, cone, delta(d, c), d);
  const auto b = minorant_criterion(qu, m, cone, delta(d, c), d);
  CHECK(a.feasible == b.feasible);
  CHECK(a.primal_value.value() == doctest::Approx(b.primal_value.value()));
}

TEST_CASE("smooth, sweep and solve pipeline") {
  const auto d = GridDomain::rectangle(11, 11, 1.0);
  const std::size_t c = d.index(5, 5);
  const auto u0 = SubDomain::from_rect(d, 3, 3, 7, 7);
  const auto u1 = SubDomain::from_rect(d, 2, 2, 8, 8);
  const auto cone = ConeSpec::subharmonic(d);

  const auto flat = theorem71_pipeline(GridFunction(d, 0.0), delta(d, c), u0, u1, GridFunction(d, 0.4), cone, d);
  REQUIRE(flat.feasible);
  for (std::size_t p : d.inside_nodes()) CHECK((*flat.h)[p] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(*flat.C == doctest::Approx(0.0));

  const auto u = divisor_log_potential(one_zero(d, c), d);
  const GridFunction m(d, 0.0);
  const auto f = criterion_deficit(u, m, d);
  const auto direct = minorant_criterion(u, m, cone, delta(d, c), d);
  const auto pipe = theorem71_pipeline(f, delta(d, c), u0, u1, GridFunction(d, 0.4), cone, d);
  REQUIRE(direct.feasible);
  REQUIRE(pipe.feasible);
  for (std::size_t p : d.inside_nodes())
    if (!u1.in_closure(p)) CHECK((*pipe.h)[p] == doctest::Approx((*direct.h)[p]).epsilon(1e-6));
  REQUIRE(pipe.ifbal_discrepancy);
  CHECK(*pipe.ifbal_discrepancy <= 1e-9);

  // A genuine radius: h <= F^{*r} + C must still hold.
  const auto wide = theorem71_pipeline(f, delta(d, c), u0, u1, GridFunction(d, 2.5), cone, d);
  REQUIRE(wide.feasible);
  REQUIRE(wide.ifbal_discrepancy);
  CHECK(*wide.ifbal_discrepancy <= 1e-9);

  DiscreteMeasure off(d);
  off[d.index(2, 2)] = 1.0;
  CHECK_THROWS_AS(theorem71_pipeline(f, off, u0, u1, GridFunction(d, 0.4), cone, d), Error);
}

TEST_CASE("weight transform") {
  const auto d = GridDomain::rectangle(41, 41, 0.1, -2.0, -2.0);
  const std::size_t o = d.index(20, 20);
  TransformParams tp;
  tp.a = 1.0;
  tp.depth = 30;
  const auto zero = weight_transform(GridFunction(d, 0.0), d, tp);
  CHECK(zero[o] == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  const std::size_t z = d.index(25, 20);
  CHECK(zero[z] == doctest::Approx(std::log(2.0) + 2.0 * std::log(2.5)).epsilon(1e-12));
  for (std::size_t p : d.boundary_nodes()) CHECK(zero[p] == kInf);

  const auto shifted = weight_transform(GridFunction(d, 3.5), d, tp);
  for (std::size_t p : d.inside_nodes())
    if (std::isfinite(zero[p])) CHECK(shifted[p] == doctest::Approx(zero[p] + 3.5));

  GridFunction sq(d);
  for (std::size_t p : d.inside_nodes()) sq[p] = d.x(p) * d.x(p) + d.y(p) * d.y(p);
  TransformParams fixed;
  fixed.mode = TransformMode::FixedD;
  RadiusField rad(d, 0.0);
  for (std::size_t p : d.inside_nodes())
    if (d.distance_to_boundary(p) > 0.35) rad[p] = 0.3;
  fixed.radius = rad;
  const auto mt = weight_transform(sq, d, fixed);
  std::size_t checked = 0;
  for (std::size_t p : d.inside_nodes()) {
    if (rad[p] == 0.0) {
      CHECK(mt[p] == kInf);
      continue;
    }
    const double tail = std::log(1.0 / 0.3) + 2.0 * std::log(2.0 + std::hypot(d.x(p), d.y(p)));
    CHECK(sq[p] <= mt[p] - tail + 1e-12);
    ++checked;
  }
  CHECK(checked > 100);

  RadiusField tiny(d, 0.0);
  tiny[o] = 0.05;
  fixed.radius = tiny;
  CHECK_THROWS_AS(weight_transform(sq, d, fixed), Error);
  RadiusField wide(d, 0.0);
  wide[o] = 1.5;
  fixed.radius = wide;
  CHECK_THROWS_AS(weight_transform(sq, d, fixed), Error);
}

TEST_CASE("zero set construction") {
  const auto d = GridDomain::rectangle(9, 9, 1.0);
  const std::size_t c = d.index(4, 4);
  const GridFunction zero(d, 0.0);

  const auto empty = zero_set_construct(Divisor{}, zero, c, d);
  for (std::size_t p : d.inside_nodes()) {
    CHECK(empty.h[p] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(empty.log_f[p] == doctest::Approx(0.0).epsilon(1e-9));
  }

  const auto z = one_zero(d, c);
  const auto u = divisor_log_potential(z, d);
  const auto self = zero_set_construct(z, u, c, d);
  CHECK(self.C <= 1e-12);
  for (std::size_t p : d.inside_nodes()) CHECK(self.h[p] == doctest::Approx(0.0).epsilon(1e-9));

  const auto res = zero_set_construct(z, zero, c, d);
  for (std::size_t p : d.inside_nodes()) CHECK(res.log_f[p] <= zero[p] + res.C + 1e-9);
  CHECK(res.max_residue < 0.05);

  std::vector<std::uint8_t> ring(81, 1);
  ring[d.index(4, 4)] = 0;
  const auto holed = GridDomain::from_mask(9, 9, 1.0, ring);
  CHECK_THROWS_AS(zero_set_construct(Divisor{}, GridFunction(holed, 0.0), holed.index(2, 2), holed), Error);

  GridFunction hole(d, 0.0);
  hole[d.index(2, 6)] = -kInf;
  try {
    zero_set_construct(z, hole, c, d);
    FAIL("expected NotFeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFeasible);
  }
}

TEST_CASE("conjugate residues shrink with the spacing") {
  std::vector<double> res;
  for (int n : {9, 17, 33}) {
    const double h = 1.0 / (n - 1);
    const auto d = GridDomain::rectangle(n, n, h);
    GridFunction g(d);
    for (std::size_t p : d.inside_nodes()) g[p] = std::exp(d.x(p)) * std::cos(d.y(p));
    const auto harm = solve_dirichlet(d, g);
    const Divisor z{{{0.5, 0.5, 1}}};
    const auto u = divisor_log_potential(z, d);
    GridFunction m(d);
    for (std::size_t p : d.inside_nodes()) m[p] = u[p] + harm[p];
    const std::size_t c = d.index(n / 2, n / 2);
    const auto out = zero_set_construct(z, m, c, d);
    CHECK(out.C <= 1e-9);
    res.push_back(out.max_residue);
  }
  const double order = std::log2(res[1] / res[2]);
  MESSAGE("residues " << res[0] << " " << res[1] << " " << res[2] << " order " << order);
  CHECK(order >= 1.8);
}
