#include "test_main.hpp"

#include <random>
#include <set>

#include "minorant/error.hpp"
#include "minorant/projlattice.hpp"

using namespace minorant;
using namespace minorant::projlattice;

namespace {

// Sup of spf over every extension drawn from a coordinate grid that brackets H.
ExtReal brute_sup_projection(const FiniteSupremalSpec& spec, std::size_t n, const ChainElement& x_n) {
  std::vector<std::vector<double>> axes;
  for (std::size_t i = n; i < spec.depth; ++i) {
    std::set<double> vals{-100.0, 100.0};
    for (const auto& h : spec.H) {
      vals.insert(h[i]);
      vals.insert(h[i] - 0.5);
    }
    axes.emplace_back(vals.begin(), vals.end());
  }
  ExtReal best = ExtReal::minus_infinity();
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    ChainElement x = x_n;
    for (std::size_t a = 0; a < axes.size(); ++a) x.push_back(axes[a][idx[a]]);
    best = std::max(best, supremal(spec, x));
    std::size_t a = 0;
    while (a < axes.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
    if (a == axes.size()) break;
  }
  return best;
}

}  // namespace

TEST_CASE("sup-projection examples") {
  const FiniteSupremalSpec one{3, {{1, -2, -9}}, 1.0};
  CHECK(sup_projection(one, 1, {3.0}) == ExtReal(1.0));
  CHECK(brute_sup_projection(one, 1, {3.0}) == ExtReal(1.0));
  CHECK(sup_projection(one, 1, {0.5}).is_minus_infinity());

  const FiniteSupremalSpec empty{2, {}, 1.0};
  CHECK(sup_projection(empty, 1, {3.0}).is_minus_infinity());
  CHECK(level_supremal(empty, 2, {3.0, 3.0}).is_minus_infinity());

  const FiniteSupremalSpec two{2, {{1, 4}, {2, -1}}, 2.0};
  CHECK(sup_projection(two, 2, {2, -1}) >= ExtReal(two.q({2, -1})));
  CHECK_THROWS_AS(sup_projection(two, 3, {1, 1, 1}), Error);
  try {
    sup_projection(two, 0, {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelOutOfRange);
  }
}

TEST_CASE("projection identity on random fixtures with a brute-force oracle") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> c(-6, 6);
  for (int trial = 0; trial < 50; ++trial) {
    FiniteSupremalSpec spec;
    spec.depth = 1 + static_cast<std::size_t>(trial % 4);
    spec.q1_weight = 0.5 + trial % 3;
    const std::size_t count = static_cast<std::size_t>(trial % 5);
    for (std::size_t k = 0; k < count; ++k) {
      ChainElement h(spec.depth);
      for (auto& v : h) v = c(rng) / 2.0;
      spec.H.push_back(h);
    }
    for (std::size_t n = 1; n <= spec.depth; ++n) {
      std::vector<ChainElement> grid;
      for (int g = 0; g < 12; ++g) {
        ChainElement x(n);
        for (auto& v : x) v = c(rng) / 2.0;
        grid.push_back(x);
      }
      const auto rep = verify_supremal_projection(spec, n, grid);
      CHECK(rep.max_discrepancy == 0.0);
      for (std::size_t g = 0; g < grid.size(); ++g) CHECK(rep.lhs[g] == brute_sup_projection(spec, n, grid[g]));
    }
  }
}

TEST_CASE("level functions decrease along the chain") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    FiniteSupremalSpec spec{4, {}, 1.0};
    for (int k = 0; k < 3; ++k) spec.H.push_back({double(c(rng)), double(c(rng)), double(c(rng)), double(c(rng))});
    const ChainElement x{double(c(rng)), double(c(rng)), double(c(rng)), double(c(rng))};
    ExtReal prev = ExtReal::plus_infinity();
    for (std::size_t n = 1; n <= 4; ++n) {
      const ExtReal v = level_supremal(spec, n, project(x, n));
      CHECK(v <= prev);
      prev = v;
    }
    CHECK(supremal(spec, x) <= prev);

    const ChainElement v = lattice_sup(spec.H);
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<ChainElement> projected;
      for (const auto& h : spec.H) projected.push_back(project(h, n));
      CHECK(project(v, n) == lattice_sup(projected));
    }
  }
}

TEST_CASE("supremal function is increasing and homogeneous under scaled families") {
  const FiniteSupremalSpec spec{2, {{1, 2}, {3, -1}, {-2, 0}}, 1.0};
  FiniteSupremalSpec scaled = spec;
  for (auto& h : scaled.H)
    for (auto& v : h) v *= 3.0;
  const std::vector<ChainElement> xs{{1, 2}, {3, 3}, {-2, 0}, {0, 0}};
  for (const auto& x : xs) {
    CHECK(supremal(spec, x) <= supremal(spec, {x[0] + 1, x[1] + 0.5}));
    const ExtReal a = supremal(spec, x);
    const ExtReal b = supremal(scaled, {3 * x[0], 3 * x[1]});
    CHECK(b == scale(3.0, a));
  }
}

TEST_CASE("stabilizing sequences") {
  const ChainElement x{1, 2, 3};
  SUBCASE("constant") {
    const auto r = stabilized_limsup({x, x, x, x}, x);
    CHECK(r.is_stabilizing);
    CHECK(*r.limsup == x);
  }
  SUBCASE("late coordinates perturbed") {
    std::vector<ChainElement> seq;
    for (std::size_t k = 1; k <= 5; ++k) {
      ChainElement e = x;
      if (k < x.size()) e[k] += 7.0;
      seq.push_back(e);
    }
    const auto r = stabilized_limsup(seq, x);
    CHECK(r.is_stabilizing);
    CHECK(*r.limsup == x);
  }
  SUBCASE("first coordinate alternates") {
    std::vector<ChainElement> seq;
    for (int k = 0; k < 6; ++k) seq.push_back({k % 2 ? 1.0 : 0.0, 2, 3});
    const auto r = stabilized_limsup(seq, x);
    CHECK_FALSE(r.is_stabilizing);
    CHECK_FALSE(r.limsup.has_value());
  }
  CHECK_THROWS_AS(stabilized_limsup({x}, x), Error);
}
