#include "hypfill/kd_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace hypfill {

namespace {
constexpr std::int32_t kLeafSize = 16;
}

KdTree::KdTree(std::span<const double> coords, std::size_t dim)
    : coords_(coords), dim_(dim) {
  const auto n = static_cast<std::int32_t>(coords.size() / dim);
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  if (n > 0) {
    nodes_.reserve(2 * (n / kLeafSize + 1));
    build(0, n);
  }
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end) {
  Node node{begin, end, -1, -1, std::vector<double>(dim_), std::vector<double>(dim_)};
  for (std::size_t d = 0; d < dim_; ++d) {
    node.lo[d] = std::numeric_limits<double>::infinity();
    node.hi[d] = -std::numeric_limits<double>::infinity();
  }
  for (std::int32_t k = begin; k < end; ++k) {
    const double* x = &coords_[perm_[k] * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
      node.lo[d] = std::min(node.lo[d], x[d]);
      node.hi[d] = std::max(node.hi[d], x[d]);
    }
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  double spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    if (node.hi[d] - node.lo[d] > spread) {
      spread = node.hi[d] - node.lo[d];
      axis = d;
    }
  }
  if (spread <= 0.0) return id;  // all points coincide
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](Index a, Index b) {
                     return coords_[a * dim_ + axis] < coords_[b * dim_ + axis];
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::box_sq_dist(const Node& n, std::span<const double> q) const {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double gap = 0.0;
    if (q[d] < n.lo[d]) gap = n.lo[d] - q[d];
    else if (q[d] > n.hi[d]) gap = q[d] - n.hi[d];
    acc += gap * gap;
  }
  return acc;
}

double KdTree::sq_dist(Index i, std::span<const double> q) const {
  const double* x = &coords_[i * dim_];
  double acc = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = x[d] - q[d];
    acc += diff * diff;
  }
  return acc;
}

std::vector<Index> KdTree::within(std::span<const double> q, double radius) const {
  std::vector<Index> out;
  for_each_within(q, radius, [&](Index i, double) { out.push_back(i); });
  return out;
}

Index KdTree::nearest(std::span<const double> q, Index exclude, bool skip_coincident,
                      double* sq_dist_out) const {
  Index best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) nearest(0, q, exclude, skip_coincident, best, best_d2);
  if (sq_dist_out) *sq_dist_out = best_d2;
  return best;
}

void KdTree::nearest(std::int32_t node, std::span<const double> q, Index exclude,
                     bool skip_coincident, Index& best, double& best_d2) const {
  const Node& n = nodes_[node];
  if (box_sq_dist(n, q) > best_d2) return;
  if (n.left < 0) {
    for (std::int32_t k = n.begin; k < n.end; ++k) {
      const Index i = perm_[k];
      if (i == exclude) continue;
      const double d2 = sq_dist(i, q);
      if (skip_coincident && d2 == 0.0) continue;
      if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
        best_d2 = d2;
        best = i;
      }
    }
    return;
  }
  const bool left_first = box_sq_dist(nodes_[n.left], q) <= box_sq_dist(nodes_[n.right], q);
  nearest(left_first ? n.left : n.right, q, exclude, skip_coincident, best, best_d2);
  nearest(left_first ? n.right : n.left, q, exclude, skip_coincident, best, best_d2);
}

}  // namespace hypfill
