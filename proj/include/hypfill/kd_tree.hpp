#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hypfill {

using Index = std::int32_t;

/// Static k-d tree over a row-major coordinate array (Euclidean metric).
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::span<const double> coords, std::size_t dim);

  /// Calls visit(i, squared_distance) for every point with |x_i - q| <= radius.
  template <typename Visit>
  void for_each_within(std::span<const double> q, double radius, Visit&& visit) const {
    if (nodes_.empty()) return;
    within(0, q, radius * radius, visit);
  }

  std::vector<Index> within(std::span<const double> q, double radius) const;

  /// Nearest point other than `exclude` (pass -1 to allow any). With
  /// skip_coincident, points at distance zero from q are ignored as well.
  Index nearest(std::span<const double> q, Index exclude, bool skip_coincident = false,
                double* sq_dist = nullptr) const;

 private:
  struct Node {
    std::int32_t begin, end;     // range into perm_
    std::int32_t left, right;    // child node ids or -1
    std::vector<double> lo, hi;  // bounding box
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);
  double box_sq_dist(const Node& n, std::span<const double> q) const;
  double sq_dist(Index i, std::span<const double> q) const;

  template <typename Visit>
  void within(std::int32_t node, std::span<const double> q, double r2, Visit& visit) const {
    const Node& n = nodes_[node];
    if (box_sq_dist(n, q) > r2) return;
    if (n.left < 0) {
      for (std::int32_t k = n.begin; k < n.end; ++k) {
        const Index i = perm_[k];
        const double d2 = sq_dist(i, q);
        if (d2 <= r2) visit(i, d2);
      }
      return;
    }
    within(n.left, q, r2, visit);
    within(n.right, q, r2, visit);
  }

  void nearest(std::int32_t node, std::span<const double> q, Index exclude,
               bool skip_coincident, Index& best, double& best_d2) const;

  std::span<const double> coords_;
  std::size_t dim_ = 0;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
};

}  // namespace hypfill
