#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hypfill/euclidean.hpp"
#include "oracles.hpp"

using namespace hypfill::euclid;
using std::numbers::pi;

namespace {

GridFunction mode_1d(int m, double L, int k) {
  return sample_grid(1, m, L, [&](std::span<const double> x) { return std::cos(pi * k * x[0] / L); });
}

// e^{-x^2} int_0^x e^{t^2} dt by composite Simpson.
double dawson(double x) {
  const int n = 2000;
  const double h = x / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double t = i * h;
    acc += w * std::exp(t * t - x * x);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("poisson kernel values and scaling") {
  CHECK(poisson_kernel(0.0, 1.0) == doctest::Approx(1.0 / pi));
  const double x2[2] = {0.0, 0.0};
  CHECK(poisson_kernel(std::span<const double>(x2, 2), 1.0) == doctest::Approx(1.0 / (2.0 * pi)));
  const double y[2] = {0.3, -0.4}, ly[2] = {0.6, -0.8};
  CHECK(poisson_kernel(std::span<const double>(ly, 2), 2.0) ==
        doctest::Approx(poisson_kernel(std::span<const double>(y, 2), 1.0) / 4.0));
  CHECK(poisson_kernel(1.4, 0.6) == doctest::Approx(poisson_kernel(0.7, 0.3) / 2.0));
  // unit mass up to the tail
  double mass = 0.0;
  const int n = 400000;
  const double L = 200.0, h = 2.0 * L / n;
  for (int i = 0; i < n; ++i) mass += h * poisson_kernel(-L + (i + 0.5) * h, 1.0);
  CHECK(mass == doctest::Approx(1.0 - poisson_tail_mass(1, L, 1.0)).epsilon(1e-6));
}

TEST_CASE("poisson extension preserves constants and damps modes") {
  const auto c = sample_grid(2, 32, 2.0, [](std::span<const double>) { return 3.0; });
  const auto U = poisson_extend_halfspace(c, geometric_levels(0.5, 3), 2.0);
  for (double v : U.values) CHECK(v == doctest::Approx(3.0));

  const double L = 8.0;
  const int m = 2048, k = 4;
  const auto f = mode_1d(m, L, k);
  const std::vector<double> ts = {0.05, 0.1, 0.2};
  std::vector<std::string> warnings;
  const auto P = poisson_extend_halfspace(f, ts, 1.0, &warnings);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double damp = std::exp(-ts[j] * pi * k / L);
    const auto lvl = P.level(j);
    for (int i = 0; i < m; i += 37) CHECK(lvl[i] == doctest::Approx(damp * f.values[i]).epsilon(1e-2).scale(1.0));
  }
}

TEST_CASE("riesz transforms") {
  const double L = 1.0;
  const int m = 64;
  const auto f = sample_grid(2, m, L, [L](std::span<const double> x) { return std::cos(pi * 3 * x[0] / L); });
  const auto r0 = riesz_transform(f, 0), r1 = riesz_transform(f, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.coord(int(i / m));
    CHECK(r0.values[i] == doctest::Approx(std::sin(pi * 3 * x / L)).scale(1.0));
    CHECK(r1.values[i] == doctest::Approx(0.0).scale(1.0));
  }

  const auto g = sample_grid(2, m, L, [](std::span<const double> x) {
    return std::exp(-20.0 * (x[0] * x[0] + 2.0 * x[1] * x[1])) - 0.0;
  });
  const auto a = riesz_transform(riesz_transform(g, 0), 0), b = riesz_transform(riesz_transform(g, 1), 1);
  double mean = 0.0;
  for (double v : g.values) mean += v / double(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(a.values[i] + b.values[i] == doctest::Approx(-(g.values[i] - mean)).epsilon(1e-6).scale(1.0));
  }
  CHECK_THROWS(riesz_transform(g, 2));
}

TEST_CASE("hilbert transform of a gaussian") {
  const double L = 40.0;
  const int m = 8192;
  const auto g = sample_grid(1, m, L, [](std::span<const double> x) { return std::exp(-x[0] * x[0]); });
  const auto h = riesz_transform(g, 0);
  for (int i = 0; i < m; ++i) {
    const double x = g.coord(i);
    if (std::abs(x) > 5.0) continue;
    CHECK(h.values[i] == doctest::Approx(2.0 / std::sqrt(pi) * dawson(x)).epsilon(1e-2).scale(0.1));
  }
}

TEST_CASE("spectral derivatives") {
  const double L = 3.0;
  const int m = 256;
  const auto f = mode_1d(m, L, 5);
  const auto d = spectral_derivative(f, 0);
  for (int i = 0; i < m; ++i) {
    CHECK(d.values[i] == doctest::Approx(-pi * 5 / L * std::sin(pi * 5 * f.coord(i) / L)).scale(1.0).epsilon(1e-10));
  }
  const auto g = sample_grid(2, m, L, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
  const auto gx = spectral_derivative(g, 0), gy = spectral_derivative(g, 1);
  const double h = g.step();
  for (int r = 1; r < m - 1; r += 17) {
    for (int c = 1; c < m - 1; c += 13) {
      const auto at = [&](int rr, int cc) { return g.values[std::size_t(rr) * m + cc]; };
      const double fd_x = (at(r + 1, c) - at(r - 1, c)) / (2 * h);
      const double fd_y = (at(r, c + 1) - at(r, c - 1)) / (2 * h);
      CHECK(gx.values[std::size_t(r) * m + c] == doctest::Approx(fd_x).scale(1.0).epsilon(1e-3));
      CHECK(gy.values[std::size_t(r) * m + c] == doctest::Approx(fd_y).scale(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("hyperbolic gradient of the height function") {
  HalfSpaceField U;
  U.dim = 2;
  U.m = 16;
  U.L = 1.0;
  U.t = geometric_levels(0.5, 5);
  for (double t : U.t) {
    for (std::size_t i = 0; i < U.cells(); ++i) U.values.push_back(t), U.weights.push_back(1.0);
  }
  const auto G = hyperbolic_gradient(U);
  for (std::size_t j = 0; j < U.t.size(); ++j) {
    for (double v : G.level(j)) CHECK(v == doctest::Approx(U.t[j]));
  }
}

TEST_CASE("ball kernel is a moving average") {
  const int m = 64;
  const double L = 1.0, t = 0.2;
  const auto f = sample_grid(1, m, L, [](std::span<const double> x) { return std::sin(7.0 * x[0]) + x[0] * x[0]; });
  const auto U = kernel_extend(f, ball_kernel(), {t});
  const int reach = int(std::floor(t / f.step()));
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int k = -reach; k <= reach; ++k) acc += f.values[std::size_t(((i + k) % m + m) % m)];
    CHECK(U.level(0)[i] == doctest::Approx(acc / (2 * reach + 1)).epsilon(1e-9));
  }
  CHECK(kernel_first_moment(tent_kernel(), 2) == doctest::Approx(pi / 3.0 + pi / 6.0).epsilon(1e-4));
  const Kernel heavy{"heavy", [](double r) { return 1.0 / (1.0 + r * r); }};
  CHECK_THROWS(kernel_extend(f, heavy, {t}));
  const Kernel negative{"negative", [](double r) { return r < 1.0 ? -1.0 : 0.0; }};
  CHECK_THROWS(kernel_extend(f, negative, {t}));
}

TEST_CASE("weak norm of a field against the superlevel scan") {
  HalfSpaceField F;
  F.dim = 1;
  F.m = 5;
  F.t = {1.0, 0.5};
  F.values = {3.0, -1.0, 0.5, 3.0, 0.0, -2.0, 0.25, 1.0, 0.0, 4.0};
  F.weights = {0.1, 0.2, 0.3, 0.1, 0.5, 0.7, 0.2, 0.2, 0.1, 0.05};
  for (double p : {1.0, 2.0, 3.0}) {
    CHECK(halfspace_weak_norm(F, p) == doctest::Approx(oracle::weighted_weak_star_scan(F.values, F.weights, p)));
  }
  CHECK(band_mass(0.5, 2.0, 1.0) == doctest::Approx(0.5 * (std::sqrt(2.0) / 2.0 - 1.0 / (2.0 * std::sqrt(2.0)))));
  CHECK(band_mass(1.0, 1.0, 2.0) == doctest::Approx(0.5 * (2.0 - 0.5)));
  const auto S = scale_by_t_power(F, 1.0);
  CHECK(S.values[5] == doctest::Approx(-1.0));
  CHECK(S.values[0] == doctest::Approx(3.0));
}

TEST_CASE("grid csv round trip") {
  const auto f = sample_grid(2, 8, 1.5, [](std::span<const double> x) { return std::exp(x[0]) / 3.0 - x[1]; });
  const auto path = (std::filesystem::temp_directory_path() / "hypfill_grid_test.csv").string();
  write_grid_csv(f, path);
  const auto g = read_grid_csv(path);
  CHECK(g.dim == 2);
  CHECK(g.m == 8);
  CHECK(g.L == 1.5);
  CHECK(g.values == f.values);
  std::filesystem::remove(path);
  CHECK(l2_norm(f) == doctest::Approx(lp_norm(f, 2.0)));
}
