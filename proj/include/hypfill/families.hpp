#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hypfill/euclidean.hpp"
#include "hypfill/metric_space.hpp"

namespace hypfill {

/// A named real function of Euclidean coordinates.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> eval;
};

/// Seeded family of functions on a space. `kinds` cycles through
/// "bump", "coord", "dist" and "trig"; parameters are drawn inside the
/// bounding box of the space's coordinates.
struct FamilySpec {
  int count = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> kinds = {"bump", "coord", "dist", "trig"};
  double min_width = 0.15;  // bump radii, relative to diameter 1
  double max_width = 0.35;
};

std::vector<TestFunction> point_family(const MetricSpace& space, const FamilySpec& spec);

std::vector<double> evaluate(const MetricSpace& space, const TestFunction& fn);

/// Smooth compactly supported bump exp(1 - 1 / (1 - |x - c|^2 / w^2)), peak 1.
TestFunction smooth_bump(std::vector<double> center, double width);

/// Seeded Euclidean test functions on R^dim, supported (or concentrated)
/// well inside [-L/2, L/2]^dim: gaussians, bumps, oscillatory bumps.
std::vector<TestFunction> grid_family(int dim, double L, int count, std::uint64_t seed);

/// max(0, |x|^{-1/4} - 1): compactly supported, not in W^{1,2}(R^2).
TestFunction cusp_function();

euclid::GridFunction sample(const TestFunction& fn, int dim, int m, double L);

}  // namespace hypfill
