#include "hypfill/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hypfill {

double PartitionOfUnity::value(std::size_t row, Index point) const {
  const auto& r = rows[row];
  const auto it = std::lower_bound(r.begin(), r.end(), point,
                                   [](const std::pair<Index, double>& e, Index p) { return e.first < p; });
  return (it != r.end() && it->first == point) ? it->second : 0.0;
}

PartitionOfUnity partition_of_unity(const MetricSpace& space, const HyperbolicFilling& filling,
                                    int level) {
  if (level < 0 || level > filling.max_level) {
    throw std::invalid_argument("partition_of_unity: level out of range");
  }
  PartitionOfUnity pou;
  pou.level = level;
  pou.first = filling.level_begin[level];
  const std::size_t m = space.size();
  if (level == 0) {
    pou.rows.resize(1);
    for (std::size_t i = 0; i < m; ++i) pou.rows[0].emplace_back(Index(i), 1.0);
    return pou;
  }

  const VertexId first = filling.level_begin[level];
  const VertexId last = filling.level_begin[level + 1];
  pou.rows.resize(std::size_t(last - first));
  std::vector<double> denom(m, 0.0);
  for (VertexId v = first; v < last; ++v) {
    const auto& b = filling.vertices[v];
    const double reach = (1.0 - FillingOperators::kBumpDelta) * b.radius;
    auto& row = pou.rows[std::size_t(v - first)];
    space.for_each_in_ball(b.center, reach, [&](Index i, double d) {
      const double phi = 1.0 - d / reach;
      if (phi > 0.0) row.emplace_back(i, phi);
    });
    std::sort(row.begin(), row.end());
    for (const auto& [i, phi] : row) denom[i] += phi;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(denom[i] > 0.0)) {
      throw std::runtime_error("partition_of_unity: point " + std::to_string(i) +
                               " not covered at level " + std::to_string(level));
    }
  }
  for (auto& row : pou.rows) {
    for (auto& [i, phi] : row) phi /= denom[i];
  }
  return pou;
}

void compute_lipschitz_bounds(const MetricSpace& space, const HyperbolicFilling& filling,
                              PartitionOfUnity& pou) {
  pou.lip_bounds.assign(pou.rows.size(), 0.0);
  if (pou.level == 0) return;  // constant
  std::vector<double> dense(space.size(), 0.0);
  for (std::size_t r = 0; r < pou.rows.size(); ++r) {
    const auto& b = filling.vertices[pou.first + VertexId(r)];
    for (const auto& [i, psi] : pou.rows[r]) dense[i] = psi;
    const auto near = space.ball(b.center, 2.0 * b.radius).members;
    double best = 1.0 / (1.25 * b.radius);
    for (const auto& [x, psi] : pou.rows[r]) {
      for (Index y : near) {
        if (y == x) continue;
        const double d = space.distance(x, y);
        if (d > 0.0) best = std::max(best, std::abs(psi - dense[y]) / d);
      }
    }
    pou.lip_bounds[r] = best;
    for (const auto& [i, psi] : pou.rows[r]) dense[i] = 0.0;
  }
}

FillingOperators::FillingOperators(const MetricSpace& space, const HyperbolicFilling& filling)
    : space_(space), filling_(filling), centers_(space, filling) {
  const std::size_t nv = filling.vertex_count();
  members_.resize(nv);
  measures_.resize(nv);
  const std::size_t m = space.size();
  members_[0].resize(m);
  for (std::size_t i = 0; i < m; ++i) members_[0][i] = Index(i);
  for (VertexId v = 1; v < VertexId(nv); ++v) {
    const auto& b = filling.vertices[v];
    space.for_each_in_ball(b.center, b.radius, [&](Index i, double) { members_[v].push_back(i); });
    std::sort(members_[v].begin(), members_[v].end());
  }
  for (VertexId v = 0; v < VertexId(nv); ++v) {
    double acc = 0.0;
    for (Index i : members_[v]) acc += space.weight(i);
    measures_[v] = acc;
  }
  for (int n = 0; n <= filling.max_level; ++n) pous_.push_back(hypfill::partition_of_unity(space, filling, n));
}

VertexFunction FillingOperators::poisson_extend(const PointFunction& f) const {
  if (f.size() != space_.size()) throw std::invalid_argument("poisson_extend: size mismatch");
  for (double x : f) {
    if (!std::isfinite(x)) throw std::invalid_argument("poisson_extend: non-finite value");
  }
  VertexFunction u(filling_.vertex_count());
  for (std::size_t v = 0; v < u.size(); ++v) {
    double acc = 0.0;
    for (Index i : members_[v]) acc += space_.weight(i) * f[i];
    u[v] = acc / measures_[v];
  }
  return u;
}

EdgeFunction FillingOperators::edge_gradient(const VertexFunction& u) const {
  EdgeFunction du(filling_.edge_count());
  for (std::size_t k = 0; k < du.size(); ++k) {
    const auto& e = filling_.edges[k];
    du[k] = u[e.plus] - u[e.minus];
  }
  return du;
}

VertexFunction FillingOperators::vertex_gradient(const VertexFunction& u) const {
  VertexFunction out(filling_.vertex_count(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    double acc = 0.0;
    for (VertexId w : filling_.adjacency[v]) acc += std::abs(u[w] - u[v]);
    out[v] = acc;
  }
  return out;
}

PointFunction FillingOperators::smooth(const VertexFunction& u, int level) const {
  const PartitionOfUnity& pou = pous_.at(level);
  PointFunction out(space_.size(), 0.0);
  for (std::size_t r = 0; r < pou.rows.size(); ++r) {
    const double uv = u[pou.first + VertexId(r)];
    for (const auto& [i, psi] : pou.rows[r]) out[i] += uv * psi;
  }
  return out;
}

TraceResult FillingOperators::trace(const VertexFunction& u) const {
  TraceResult res;
  PointFunction prev = smooth(u, 0);
  for (int n = 1; n <= filling_.max_level; ++n) {
    PointFunction next = smooth(u, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) acc += space_.weight(Index(i)) * std::abs(next[i] - prev[i]);
    res.tail_sum += acc;
    prev = std::move(next);
  }
  res.values = std::move(prev);
  return res;
}

VertexFunction FillingOperators::filling_maximal(const VertexFunction& u) const {
  const std::size_t nv = filling_.vertex_count();
  VertexFunction out(nv, 0.0);
  // root: every vertex qualifies
  {
    double acc = 0.0;
    for (std::size_t w = 0; w < nv; ++w) acc += measures_[w] * std::abs(u[w]);
    out[0] = acc / measures_[0];
  }
  for (VertexId v = 1; v < VertexId(nv); ++v) {
    const auto& b = filling_.vertices[v];
    double acc = 0.0;
    for (int k = b.level; k <= filling_.max_level; ++k) {
      const double reach = kDilation * b.radius + kDilation * std::ldexp(1.0, 1 - k);
      centers_.for_each_center_within(k, b.center, reach,
                                      [&](VertexId w) { acc += measures_[w] * std::abs(u[w]); });
    }
    out[v] = acc / measures_[v];
  }
  return out;
}

VertexFunction FillingOperators::mean_oscillation(const PointFunction& f) const {
  if (f.size() != space_.size()) throw std::invalid_argument("mean_oscillation: size mismatch");
  const VertexFunction fb = poisson_extend(f);
  VertexFunction out(filling_.vertex_count(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    const auto& b = filling_.vertices[v];
    double acc = 0.0;
    double mass = 0.0;
    if (v == 0 || kDilation * b.radius > 1.0) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        acc += space_.weight(Index(i)) * std::abs(f[i] - fb[v]);
        mass += space_.weight(Index(i));
      }
    } else {
      space_.for_each_in_ball(b.center, kDilation * b.radius, [&](Index i, double) {
        acc += space_.weight(i) * std::abs(f[i] - fb[v]);
        mass += space_.weight(i);
      });
    }
    out[v] = acc / mass;
  }
  return out;
}

double FillingOperators::lp_norm(const PointFunction& g, double p) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += space_.weight(Index(i)) * std::pow(std::abs(g[i]), p);
  return std::pow(acc, 1.0 / p);
}

double FillingOperators::mean(const PointFunction& g) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += space_.weight(Index(i)) * g[i];
  return acc;
}

}  // namespace hypfill
