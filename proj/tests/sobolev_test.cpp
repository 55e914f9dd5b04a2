#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hypfill/filling.hpp"
#include "hypfill/metric_space.hpp"
#include "hypfill/sobolev.hpp"
#include "hajlasz_oracles.hpp"

using namespace hypfill;
using oracle::quadratic_oracle;
using oracle::three_point_oracle;

namespace {

MetricSpace cloud(std::vector<double> coords, std::size_t dim, std::vector<double> weights = {}) {
  return MetricSpace::from_points(std::move(coords), dim, std::move(weights), 1.0, "test");
}

void check_feasible(const MetricSpace& s, const PointFunction& f, const HajlaszSolution& sol) {
  double worst = 0.0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    CHECK(sol.g[x] >= 0.0);
    for (std::size_t y = x + 1; y < s.size(); ++y) {
      const double need = std::abs(f[x] - f[y]) / std::pow(s.distance(Index(x), Index(y)), sol.alpha);
      worst = std::max(worst, need - sol.g[x] - sol.g[y]);
    }
  }
  CHECK(worst <= 1e-9);
}

}  // namespace

TEST_CASE("two points at unit distance") {
  const MetricSpace s = cloud({0.0, 1.0}, 1);
  for (double p : {1.0, 2.0, 4.0}) {
    const auto sol = hajlasz_seminorm(s, {0.0, 1.0}, 1.0, p);
    CHECK(sol.seminorm == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(sol.lower_bound <= sol.seminorm);
  }
}

TEST_CASE("linear function on an even grid") {
  const MetricSpace s = make_space("interval_grid:20");
  PointFunction f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.point(Index(i))[0];
  for (double p : {1.0, 3.0}) {
    const auto sol = hajlasz_seminorm(s, f, 1.0, p);
    CHECK(sol.seminorm == doctest::Approx(0.5).epsilon(2e-3));
    check_feasible(s, f, sol);
  }
}

TEST_CASE("p = 2 agrees with active-set enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> coords(8), w(4);
    for (auto& c : coords) c = u(rng);
    for (auto& x : w) x = 0.2 + u(rng);
    const MetricSpace s = cloud(coords, 2, w);
    PointFunction f(4);
    for (auto& x : f) x = u(rng);
    const double alpha = trial % 2 ? 0.5 : 1.0;
    const double exact = quadratic_oracle(s, f, alpha);
    HajlaszOptions opt;
    opt.tol = 1e-6;
    const auto sol = hajlasz_seminorm(s, f, alpha, 2.0, opt);
    CHECK(sol.seminorm == doctest::Approx(exact).epsilon(1e-4));
    CHECK(sol.lower_bound <= exact * (1 + 1e-9));
    check_feasible(s, f, sol);
  }
}

TEST_CASE("general p agrees with a grid search") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double p : {1.0, 1.5, 3.0}) {
    std::vector<double> coords(6);
    for (auto& c : coords) c = u(rng);
    const MetricSpace s = cloud(coords, 2, {1.0, 2.0, 3.0});
    const PointFunction f = {u(rng), u(rng), u(rng)};
    const double approx = three_point_oracle(s, f, 1.0, p);
    HajlaszOptions opt;
    opt.tol = 1e-6;
    const auto sol = hajlasz_seminorm(s, f, 1.0, p, opt);
    CHECK(sol.seminorm == doctest::Approx(approx).epsilon(1e-3));
    CHECK(sol.lower_bound <= approx * (1 + 1e-9));
  }
}

TEST_CASE("certificate brackets the value on a grid") {
  const MetricSpace s = make_space("square_grid:12");
  PointFunction f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = s.point(Index(i));
    f[i] = std::sin(5.0 * x[0]) * x[1];
  }
  const auto sol = hajlasz_seminorm(s, f, 1.0, 2.0);
  check_feasible(s, f, sol);
  CHECK(sol.converged);
  CHECK(sol.lower_bound <= sol.seminorm);
  CHECK(sol.gap <= 1e-3);
  PointFunction neg(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) neg[i] = -3.0 * f[i] + 7.0;
  CHECK(hajlasz_seminorm(s, neg, 1.0, 2.0).seminorm == doctest::Approx(3.0 * sol.seminorm).epsilon(3e-3));
}

TEST_CASE("maximal function against a scan over closed balls") {
  const MetricSpace s = make_space("square_grid:9");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  PointFunction g(s.size());
  for (auto& x : g) x = n(rng);
  const PointFunction fast = hl_maximal(s, g);
  for (std::size_t x = 0; x < s.size(); ++x) {
    double best = std::abs(g[x]);
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double dx = s.distance(Index(c), Index(x));
      for (std::size_t r = 0; r < s.size(); ++r) {
        const double rad = s.distance(Index(c), Index(r));
        if (rad < dx) continue;
        double acc = 0.0, mass = 0.0;
        for (std::size_t y = 0; y < s.size(); ++y) {
          if (s.distance(Index(c), Index(y)) <= rad) acc += s.weight(Index(y)) * std::abs(g[y]), mass += s.weight(Index(y));
        }
        best = std::max(best, acc / mass);
      }
    }
    CHECK(fast[x] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("pointwise lipschitz constant of a coordinate") {
  const MetricSpace s = make_space("interval_grid:50");
  PointFunction f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.point(Index(i))[0];
  for (double x : pointwise_lip(s, f, s.resolution())) CHECK(x == doctest::Approx(1.0));
  for (double x : pointwise_lip(s, f, 0.2)) CHECK(x == doctest::Approx(1.0));
  CHECK_THROWS_AS(pointwise_lip(s, f, 0.5 * s.resolution()), std::invalid_argument);
}

TEST_CASE("filling seminorm is a seminorm") {
  const MetricSpace s = make_space("square_grid:20");
  const HyperbolicFilling fl = build_filling(s, 4, 0);
  const FillingOperators ops(s, fl);
  PointFunction f(s.size()), g(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = s.point(Index(i));
    f[i] = x[0] * x[0] - x[1];
    g[i] = std::cos(4.0 * x[1]);
  }
  const double a = ap_seminorm(ops, f, 2.0);
  CHECK(a > 0.0);
  PointFunction h(f.size()), c(f.size(), 4.0), sum(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) h[i] = -2.5 * f[i] + 1.0, sum[i] = f[i] + g[i];
  CHECK(ap_seminorm(ops, h, 2.0) == doctest::Approx(2.5 * a));
  CHECK(ap_seminorm(ops, c, 2.0) == doctest::Approx(0.0));
  // the weak norm is a quasi-norm with constant at most 2 for p = 2 on sequences
  CHECK(ap_seminorm(ops, sum, 2.0) <= 2.0 * (a + ap_seminorm(ops, g, 2.0)));
}

TEST_CASE("poincare inequality for smooth functions on the square") {
  const MetricSpace s = make_space("square_grid:24");
  std::vector<PointFunction> fam(2, PointFunction(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.point(Index(i));
    fam[0][i] = x[0];
    fam[1][i] = std::sin(6.0 * x[0] + 2.0 * x[1]);
  }
  const PoincareReport rep = check_poincare(s, 2.0, 2.0, fam);
  CHECK(rep.violations == 0);
  CHECK(rep.balls_tested == 2 * 24 * 6);
  CHECK(rep.empirical_constant > 0.1);
  CHECK(rep.empirical_constant < 1.0);
  CHECK_THROWS_AS(check_poincare(s, 0.5, 2.0, fam), std::invalid_argument);
}

TEST_CASE("zero seminorm only for constants") {
  const MetricSpace s = make_space("square_grid:8");
  const auto zero = hajlasz_seminorm(s, PointFunction(s.size(), -1.5), 1.0, 2.0);
  CHECK(zero.seminorm == 0.0);
  for (double g : zero.g) CHECK(g == 0.0);
  PointFunction bump(s.size(), 0.0);
  bump[10] = 1e-3;
  CHECK(hajlasz_seminorm(s, bump, 1.0, 2.0).seminorm > 0.0);
  CHECK_THROWS_AS(hajlasz_seminorm(s, bump, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(hajlasz_seminorm(s, bump, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("golden seminorm of the identity on the interval") {
  const MetricSpace s = make_space("interval_grid:1024");
  PointFunction f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.point(Index(i))[0];
  std::vector<double> values;
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const HyperbolicFilling fl = build_filling(s, 6, seed);
    const FillingOperators ops(s, fl);
    values.push_back(ap_seminorm(ops, f, 2.0));
  }
  CHECK(values[0] == doctest::Approx(2.32372).epsilon(1e-5));
  // coarse nets differ in size between seeds (3 or 4 balls at level 2), so
  // the spread is a few tens of percent rather than a few percent
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  CHECK(*hi / *lo <= 1.3);
}
