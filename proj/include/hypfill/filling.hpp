#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypfill/kd_tree.hpp"
#include "hypfill/metric_space.hpp"

namespace hypfill {

using VertexId = std::int32_t;

inline constexpr Index kWholeSpace = -1;

/// A ball B(center, 2^{1-level}); the unique level-0 vertex is the whole space.
struct BallVertex {
  int level = 0;
  Index center = kWholeSpace;
  double radius = 1.0;
};

struct OrientedEdge {
  VertexId minus = 0;
  VertexId plus = 0;
};

/// Leveled ball graph built from maximal 2^{-n}-separated nets. Vertices are
/// stored level by level; vertex 0 is the root.
struct HyperbolicFilling {
  std::vector<BallVertex> vertices;
  std::vector<OrientedEdge> edges;
  std::vector<std::vector<Index>> nets;  // nets[n] = Z_n, nets[0] empty
  std::vector<std::vector<VertexId>> adjacency;
  std::vector<VertexId> level_begin;     // size max_level + 2
  int max_level = 0;
  std::uint64_t seed = 0;
  std::string space_label;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t level_size(int n) const { return std::size_t(level_begin[n + 1] - level_begin[n]); }
  int level(VertexId v) const { return vertices[v].level; }
  std::size_t max_degree() const;
  bool connected() const;

  /// Rebuilds adjacency and level offsets from vertices and edges.
  void index();
};

/// Largest depth N with 2^{-N} >= resolution(space).
int max_usable_level(const MetricSpace& space);

HyperbolicFilling build_filling(const MetricSpace& space, int max_level, std::uint64_t seed);

/// Metric distance between centers; zero when either vertex is the root.
double center_distance(const MetricSpace& space, const HyperbolicFilling& f, VertexId a, VertexId b);

/// Per-level k-d trees over ball centers.
class CenterIndex {
 public:
  CenterIndex(const MetricSpace& space, const HyperbolicFilling& filling);
  CenterIndex(const CenterIndex&) = delete;
  CenterIndex& operator=(const CenterIndex&) = delete;

  /// Calls visit(v) for every vertex v at `level` with d(point, center(v)) < r.
  template <typename Visit>
  void for_each_center_within(int level, Index point, double r, Visit&& visit) const {
    if (level == 0) {
      visit(VertexId(0));
      return;
    }
    const auto& lvl = levels_[level];
    lvl.tree.for_each_within(space_.point(point), space_.euclidean_radius(r),
                             [&](Index local, double d2) {
                               if (space_.from_squared_euclidean(d2) < r) visit(lvl.first + local);
                             });
  }

 private:
  struct Level {
    VertexId first = 0;
    std::vector<double> coords;
    KdTree tree;
  };
  MetricSpace space_;
  std::vector<Level> levels_;
};

/// For each vertex of `src`, a vertex of `dst` on the same level whose ball
/// meets it, choosing the nearest center (ties by id).
std::vector<VertexId> nearest_ball_map(const MetricSpace& space, const HyperbolicFilling& src,
                                       const HyperbolicFilling& dst);

std::string filling_to_json(const HyperbolicFilling& f, int indent = -1);
HyperbolicFilling filling_from_json(const std::string& text);

}  // namespace hypfill
