#include "hypfill/filling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace hypfill {
namespace {

/// Uniform hash grid over Euclidean coordinates with a fixed cell size.
/// Hash collisions only add candidates; callers always test distances.
class CellGrid {
 public:
  CellGrid(const MetricSpace& space, double cell) : space_(space), cell_(cell) {}

  void insert(Index i) { buckets_[key(cell_of(space_.point(i)))].push_back(i); }

  template <typename Visit>
  bool any_near(std::span<const double> q, Visit&& pred) const {
    const auto base = cell_of(q);
    std::vector<std::int64_t> c(base.size());
    const std::size_t dim = base.size();
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t d = 0; d < dim; ++d) {
        c[d] = base[d] + std::int64_t(rest % 3) - 1;
        rest /= 3;
      }
      const auto it = buckets_.find(key(c));
      if (it == buckets_.end()) continue;
      for (Index i : it->second) {
        if (pred(i)) return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::int64_t> cell_of(std::span<const double> x) const {
    std::vector<std::int64_t> c(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) c[d] = std::int64_t(std::floor(x[d] / cell_));
    return c;
  }
  static std::uint64_t key(const std::vector<std::int64_t>& c) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t v : c) {
      h ^= std::uint64_t(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  const MetricSpace& space_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<Index>> buckets_;
};

std::vector<Index> greedy_net(const MetricSpace& space, const std::vector<Index>& order,
                              double separation) {
  CellGrid grid(space, space.euclidean_radius(separation));
  std::vector<Index> net;
  for (Index i : order) {
    const bool blocked = grid.any_near(space.point(i), [&](Index j) {
      return space.distance(i, j) < separation;
    });
    if (!blocked) {
      net.push_back(i);
      grid.insert(i);
    }
  }
  return net;
}

double level_radius(int n) { return n == 0 ? 1.0 : std::ldexp(1.0, 1 - n); }

}  // namespace

std::size_t HyperbolicFilling::max_degree() const {
  std::size_t best = 0;
  for (const auto& nb : adjacency) best = std::max(best, nb.size());
  return best;
}

bool HyperbolicFilling::connected() const {
  if (vertices.empty()) return false;
  std::vector<char> seen(vertices.size(), 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (VertexId w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
    }
  }
  return count == vertices.size();
}

void HyperbolicFilling::index() {
  adjacency.assign(vertices.size(), {});
  for (const auto& e : edges) {
    adjacency[e.minus].push_back(e.plus);
    adjacency[e.plus].push_back(e.minus);
  }
  for (auto& nb : adjacency) std::sort(nb.begin(), nb.end());
  level_begin.assign(max_level + 2, 0);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (v > 0 && vertices[v].level < vertices[v - 1].level) {
      throw std::runtime_error("filling: vertices must be ordered by level");
    }
    ++level_begin[vertices[v].level + 1];
  }
  for (int n = 1; n <= max_level + 1; ++n) level_begin[n] += level_begin[n - 1];
}

int max_usable_level(const MetricSpace& space) {
  const double h = space.resolution();
  if (!std::isfinite(h) || h <= 0.0) return 0;
  int n = 0;
  while (std::ldexp(1.0, -(n + 1)) >= h) ++n;
  return n;
}

double center_distance(const MetricSpace& space, const HyperbolicFilling& f, VertexId a, VertexId b) {
  const Index ca = f.vertices[a].center;
  const Index cb = f.vertices[b].center;
  if (ca == kWholeSpace || cb == kWholeSpace) return 0.0;
  return space.distance(ca, cb);
}

CenterIndex::CenterIndex(const MetricSpace& space, const HyperbolicFilling& filling)
    : space_(space), levels_(filling.max_level + 1) {
  for (int n = 1; n <= filling.max_level; ++n) {
    Level& lvl = levels_[n];
    lvl.first = filling.level_begin[n];
    for (VertexId v = filling.level_begin[n]; v < filling.level_begin[n + 1]; ++v) {
      const auto x = space.point(filling.vertices[v].center);
      lvl.coords.insert(lvl.coords.end(), x.begin(), x.end());
    }
    lvl.tree = KdTree(lvl.coords, space.dim());
  }
}

HyperbolicFilling build_filling(const MetricSpace& space, int max_level, std::uint64_t seed) {
  if (space.size() == 0) throw std::invalid_argument("build_filling: empty space");
  if (max_level < 0) throw std::invalid_argument("build_filling: negative depth");
  if (max_level > max_usable_level(space)) {
    throw std::invalid_argument("build_filling: depth " + std::to_string(max_level) +
                                " exceeds the resolution bound " +
                                std::to_string(max_usable_level(space)));
  }

  HyperbolicFilling f;
  f.max_level = max_level;
  f.seed = seed;
  f.space_label = space.label();
  f.nets.resize(max_level + 1);
  f.vertices.push_back(BallVertex{0, kWholeSpace, 1.0});

  std::vector<Index> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  for (int n = 1; n <= max_level; ++n) {
    f.nets[n] = greedy_net(space, order, std::ldexp(1.0, -n));
    for (Index z : f.nets[n]) f.vertices.push_back(BallVertex{n, z, level_radius(n)});
  }
  f.level_begin.assign(max_level + 2, 0);
  f.level_begin[1] = 1;
  for (int n = 1; n <= max_level; ++n) {
    f.level_begin[n + 1] = f.level_begin[n] + VertexId(f.nets[n].size());
  }

  const CenterIndex centers(space, f);
  if (max_level >= 1) {
    for (VertexId v = f.level_begin[1]; v < f.level_begin[2]; ++v) f.edges.push_back({0, v});
  }
  for (int n = 1; n <= max_level; ++n) {
    const double r = level_radius(n);
    for (VertexId v = f.level_begin[n]; v < f.level_begin[n + 1]; ++v) {
      const Index c = f.vertices[v].center;
      // same level: keep each unordered pair once, smaller id as e_-
      centers.for_each_center_within(n, c, 2.0 * r, [&](VertexId w) {
        if (w > v) f.edges.push_back({v, w});
      });
      if (n < max_level) {
        centers.for_each_center_within(n + 1, c, r + level_radius(n + 1),
                                       [&](VertexId w) { f.edges.push_back({v, w}); });
      }
    }
  }
  std::sort(f.edges.begin(), f.edges.end(), [](const OrientedEdge& a, const OrientedEdge& b) {
    return a.minus != b.minus ? a.minus < b.minus : a.plus < b.plus;
  });
  f.index();
  return f;
}

std::vector<VertexId> nearest_ball_map(const MetricSpace& space, const HyperbolicFilling& src,
                                       const HyperbolicFilling& dst) {
  if (dst.max_level < src.max_level) {
    throw std::invalid_argument("nearest_ball_map: destination has fewer levels than source");
  }
  const CenterIndex centers(space, dst);
  std::vector<VertexId> map(src.vertex_count(), 0);
  for (VertexId v = 1; v < VertexId(src.vertex_count()); ++v) {
    const auto& b = src.vertices[v];
    VertexId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    centers.for_each_center_within(b.level, b.center, 2.0 * b.radius, [&](VertexId w) {
      const double d = space.distance(b.center, dst.vertices[w].center);
      if (d < best_d || (d == best_d && w < best)) {
        best_d = d;
        best = w;
      }
    });
    if (best < 0) throw std::runtime_error("nearest_ball_map: no intersecting ball (net not maximal)");
    map[v] = best;
  }
  return map;
}

std::string filling_to_json(const HyperbolicFilling& f, int indent) {
  using nlohmann::json;
  json j;
  j["levels"] = f.max_level;
  j["seed"] = f.seed;
  j["space_label"] = f.space_label;
  json verts = json::array();
  for (std::size_t v = 0; v < f.vertices.size(); ++v) {
    const auto& b = f.vertices[v];
    verts.push_back({{"id", v},
                     {"level", b.level},
                     {"center", b.center == kWholeSpace ? json(nullptr) : json(b.center)},
                     {"radius", b.radius}});
  }
  j["vertices"] = std::move(verts);
  json edges = json::array();
  for (const auto& e : f.edges) edges.push_back({{"minus", e.minus}, {"plus", e.plus}});
  j["edges"] = std::move(edges);
  return j.dump(indent);
}

HyperbolicFilling filling_from_json(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  HyperbolicFilling f;
  f.max_level = j.at("levels").get<int>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.space_label = j.at("space_label").get<std::string>();
  f.nets.assign(f.max_level + 1, {});
  for (const auto& v : j.at("vertices")) {
    BallVertex b;
    b.level = v.at("level").get<int>();
    b.center = v.at("center").is_null() ? kWholeSpace : v.at("center").get<Index>();
    b.radius = v.at("radius").get<double>();
    if (v.at("id").get<std::size_t>() != f.vertices.size()) {
      throw std::runtime_error("filling_from_json: vertex ids must be consecutive");
    }
    if (b.level < 0 || b.level > f.max_level) throw std::runtime_error("filling_from_json: bad level");
    if (b.level > 0) f.nets[b.level].push_back(b.center);
    f.vertices.push_back(b);
  }
  for (const auto& e : j.at("edges")) {
    OrientedEdge oe{e.at("minus").get<VertexId>(), e.at("plus").get<VertexId>()};
    const auto n = VertexId(f.vertices.size());
    if (oe.minus < 0 || oe.plus < 0 || oe.minus >= n || oe.plus >= n || oe.minus == oe.plus) {
      throw std::runtime_error("filling_from_json: bad edge");
    }
    f.edges.push_back(oe);
  }
  f.index();
  return f;
}

}  // namespace hypfill
