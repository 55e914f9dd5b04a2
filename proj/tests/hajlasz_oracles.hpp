#pragma once
// Brute-force Hajlasz seminorms for spaces with a handful of points.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hypfill/metric_space.hpp"

namespace oracle {

using hypfill::MetricSpace;
using PointFunction = std::vector<double>;

struct PairBound {
  int x, y;
  double c;  // g(x) + g(y) >= c
};

inline std::vector<PairBound> pair_bounds(const MetricSpace& s, const PointFunction& f, double alpha) {
  std::vector<PairBound> out;
  for (int x = 0; x < int(s.size()); ++x) {
    for (int y = x + 1; y < int(s.size()); ++y) {
      out.push_back({x, y, std::abs(f[x] - f[y]) / std::pow(s.distance(x, y), alpha)});
    }
  }
  return out;
}

// p = 2: the minimizer is the equality-constrained minimizer on its active
// set, so enumerate every set of tight pair and zero constraints.
inline double quadratic_oracle(const MetricSpace& s, const PointFunction& f, double alpha) {
  const int m = int(s.size());
  const auto pairs = pair_bounds(s, f, alpha);
  const int nc = int(pairs.size()) + m;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << nc); ++mask) {
    std::vector<int> rows;
    for (int k = 0; k < nc; ++k) {
      if (mask >> k & 1u) rows.push_back(k);
    }
    if (int(rows.size()) > m) continue;
    const int n = m + int(rows.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) K(i, i) = 2.0 * s.weight(i);
    for (int r = 0; r < int(rows.size()); ++r) {
      const int k = rows[r];
      if (k < int(pairs.size())) {
        K(m + r, pairs[k].x) = K(pairs[k].x, m + r) = 1.0;
        K(m + r, pairs[k].y) = K(pairs[k].y, m + r) = 1.0;
        rhs(m + r) = pairs[k].c;
      } else {
        K(m + r, k - int(pairs.size())) = K(k - int(pairs.size()), m + r) = 1.0;
      }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    bool feasible = true;
    for (int i = 0; i < m; ++i) feasible = feasible && sol(i) >= -1e-12;
    for (const auto& pb : pairs) feasible = feasible && sol(pb.x) + sol(pb.y) >= pb.c - 1e-12;
    if (!feasible) continue;
    double obj = 0.0;
    for (int i = 0; i < m; ++i) obj += s.weight(i) * sol(i) * sol(i);
    best = std::min(best, std::sqrt(obj));
  }
  return best;
}

// Three points, any p: scan (g0, g1) on a refining grid and take the least
// feasible g2.
inline double three_point_oracle(const MetricSpace& s, const PointFunction& f, double alpha, double p) {
  const auto pairs = pair_bounds(s, f, alpha);  // (0,1), (0,2), (1,2)
  double hi = 0.0;
  for (const auto& pb : pairs) hi = std::max(hi, pb.c);
  auto objective = [&](double g0, double g1) {
    if (g0 + g1 < pairs[0].c) return std::numeric_limits<double>::infinity();
    const double g2 = std::max({0.0, pairs[1].c - g0, pairs[2].c - g1});
    return s.weight(0) * std::pow(g0, p) + s.weight(1) * std::pow(g1, p) + s.weight(2) * std::pow(g2, p);
  };
  double c0 = hi / 2, c1 = hi / 2, half = hi / 2, best = objective(hi, hi);
  for (int round = 0; round < 12; ++round) {
    const int steps = 80;
    double b0 = c0, b1 = c1;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const double g0 = std::max(0.0, c0 - half + 2 * half * i / steps);
        const double g1 = std::max(0.0, c1 - half + 2 * half * j / steps);
        const double v = objective(g0, g1);
        if (v < best) best = v, b0 = g0, b1 = g1;
      }
    }
    c0 = b0, c1 = b1, half *= 0.25;
  }
  return std::pow(best, 1.0 / p);
}

}  // namespace oracle
