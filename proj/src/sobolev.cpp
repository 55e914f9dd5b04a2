#include "hypfill/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hypfill/seq_norms.hpp"

namespace hypfill {

double ap_seminorm(const FillingOperators& ops, const PointFunction& f, double p) {
  return seq::weak_norm(ops.edge_gradient(ops.poisson_extend(f)), p);
}

PointFunction hl_maximal(const MetricSpace& space, const PointFunction& g) {
  const std::size_t m = space.size();
  if (g.size() != m) throw std::invalid_argument("hl_maximal: size mismatch");
  PointFunction out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = std::abs(g[i]);

  std::vector<std::pair<double, Index>> order(m);
  std::vector<double> avg(m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t j = 0; j < m; ++j) order[j] = {space.distance(Index(c), Index(j)), Index(j)};
    std::sort(order.begin(), order.end());
    // avg[k]: mean of |g| over the ball holding the first k+1 points, valid at
    // the end of each run of equal distances
    double mass = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Index j = order[k].second;
      mass += space.weight(j);
      acc += space.weight(j) * std::abs(g[j]);
      avg[k] = acc / mass;
    }
    double suffix = 0.0;
    std::size_t k = m;
    while (k > 0) {
      std::size_t start = k - 1;
      while (start > 0 && order[start - 1].first == order[k - 1].first) --start;
      suffix = std::max(suffix, avg[k - 1]);
      for (std::size_t t = start; t < k; ++t) {
        const Index j = order[t].second;
        out[j] = std::max(out[j], suffix);
      }
      k = start;
    }
  }
  return out;
}

PointFunction pointwise_lip(const MetricSpace& space, const PointFunction& f, double h) {
  if (f.size() != space.size()) throw std::invalid_argument("pointwise_lip: size mismatch");
  if (h < space.resolution() * (1.0 - 1e-12)) {
    throw std::invalid_argument("pointwise_lip: scale below the space resolution");
  }
  PointFunction out(space.size(), 0.0);
  const double reach = h * (1.0 + 1e-9);  // closed ball of radius h, up to rounding
  for (std::size_t x = 0; x < space.size(); ++x) {
    double best = 0.0;
    space.for_each_in_ball(Index(x), reach, [&](Index y, double d) {
      if (d > 0.0) best = std::max(best, std::abs(f[y] - f[x]) / d);
    });
    out[x] = best;
  }
  return out;
}

PoincareReport check_poincare(const MetricSpace& space, double p, double dilation,
                              const std::vector<PointFunction>& family,
                              const PoincareOptions& options) {
  if (!(p >= 1.0)) throw std::invalid_argument("check_poincare: p < 1");
  if (!(dilation >= 1.0)) throw std::invalid_argument("check_poincare: dilation < 1");
  PoincareReport rep;
  rep.p = p;
  rep.dilation = dilation;

  const std::size_t m = space.size();
  std::vector<Index> centers(m);
  std::iota(centers.begin(), centers.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::shuffle(centers.begin(), centers.end(), rng);
  centers.resize(std::min<std::size_t>(m, std::size_t(options.centers)));

  const double h = options.lip_scale > 0.0 ? options.lip_scale : space.resolution();
  const double r_min = std::min(options.r_max, options.r_min_factor * space.resolution());
  std::vector<double> radii;
  for (int k = 0; k < options.radii; ++k) {
    const double t = options.radii == 1 ? 0.0 : double(k) / (options.radii - 1);
    radii.push_back(r_min * std::pow(options.r_max / r_min, t));
  }

  for (const auto& f : family) {
    const PointFunction lip = pointwise_lip(space, f, h);
    for (Index c : centers) {
      for (double r : radii) {
        const auto ball = space.ball(c, r);
        double mean = 0.0;
        for (Index i : ball.members) mean += space.weight(i) * f[i];
        mean /= ball.measure;
        double osc = 0.0;
        for (Index i : ball.members) osc += space.weight(i) * std::abs(f[i] - mean);
        osc /= ball.measure;

        const auto big = space.ball(c, dilation * r);
        double acc = 0.0;
        for (Index i : big.members) acc += space.weight(i) * std::pow(lip[i], p);
        const double rhs = r * std::pow(acc / big.measure, 1.0 / p);
        ++rep.balls_tested;
        if (rhs <= 0.0) {
          if (osc > options.tolerance) ++rep.violations;
          continue;
        }
        rep.empirical_constant = std::max(rep.empirical_constant, osc / rhs);
      }
    }
  }
  return rep;
}

}  // namespace hypfill
