#pragma once

#include <utility>
#include <vector>

#include "hypfill/filling.hpp"
#include "hypfill/metric_space.hpp"

namespace hypfill {

using PointFunction = std::vector<double>;   // indexed by point id
using VertexFunction = std::vector<double>;  // indexed by vertex id
using EdgeFunction = std::vector<double>;    // indexed like HyperbolicFilling::edges

/// Lipschitz partition of unity {psi_B : B in V_n} on the points of the space.
struct PartitionOfUnity {
  int level = 0;
  VertexId first = 0;  // vertex id of rows[0]
  std::vector<std::vector<std::pair<Index, double>>> rows;
  std::vector<double> lip_bounds;  // filled by compute_lipschitz_bounds

  double value(std::size_t row, Index point) const;
};

struct TraceResult {
  PointFunction values;  // T_N u
  double tail_sum = 0.0; // sum over n < N of ||T_{n+1} u - T_n u||_{L^1}
};

/// Operators between functions on a space and functions on one of its
/// fillings. Holds references: space and filling must outlive this object.
class FillingOperators {
 public:
  /// Bump shrink factor: psi_B is supported in B(center, (1 - delta) radius).
  static constexpr double kBumpDelta = 0.25;
  /// Dilation used by the filling maximal operator and by Df.
  static constexpr double kDilation = 8.0;

  FillingOperators(const MetricSpace& space, const HyperbolicFilling& filling);
  FillingOperators(const MetricSpace&, HyperbolicFilling&&) = delete;
  FillingOperators(const FillingOperators&) = delete;
  FillingOperators& operator=(const FillingOperators&) = delete;

  const MetricSpace& space() const { return space_; }
  const HyperbolicFilling& filling() const { return filling_; }

  const std::vector<Index>& members(VertexId v) const { return members_[v]; }
  double measure(VertexId v) const { return measures_[v]; }

  /// u(B) = weighted mean of f over the open ball B.
  VertexFunction poisson_extend(const PointFunction& f) const;

  /// du(e) = u(e+) - u(e-).
  EdgeFunction edge_gradient(const VertexFunction& u) const;

  /// d~u(B) = sum over neighbours B' of |u(B') - u(B)|.
  VertexFunction vertex_gradient(const VertexFunction& u) const;

  const PartitionOfUnity& partition_of_unity(int level) const { return pous_.at(level); }

  /// T_n u = sum over B in V_n of u(B) psi_B.
  PointFunction smooth(const VertexFunction& u, int level) const;

  TraceResult trace(const VertexFunction& u) const;

  /// (Mu)(B) = sum over B' with level(B') >= level(B) and 8B' meeting 8B of
  /// (|B'| / |B|) |u(B')|.
  VertexFunction filling_maximal(const VertexFunction& u) const;

  /// (Df)(B) = mean of |f - f_B| over 8B, with 8B taken as the whole space
  /// once 8 radius(B) > 1.
  VertexFunction mean_oscillation(const PointFunction& f) const;

  double lp_norm(const PointFunction& g, double p) const;
  double l1_norm(const PointFunction& g) const { return lp_norm(g, 1.0); }
  double mean(const PointFunction& g) const;

 private:
  const MetricSpace& space_;
  const HyperbolicFilling& filling_;
  CenterIndex centers_;
  std::vector<std::vector<Index>> members_;
  std::vector<double> measures_;
  std::vector<PartitionOfUnity> pous_;
};

/// Builds the level-n partition of unity from bumps
/// phi_B(x) = max(0, 1 - d(x, center) / ((1 - delta) radius)); throws if some
/// point is not covered.
PartitionOfUnity partition_of_unity(const MetricSpace& space, const HyperbolicFilling& filling,
                                    int level);

/// Fills pou.lip_bounds with an upper bound on Lip(psi_B): the exact
/// difference-quotient maximum over pairs within 2 radius(B) of the center,
/// combined with 1 / (1.25 radius) for farther pairs.
void compute_lipschitz_bounds(const MetricSpace& space, const HyperbolicFilling& filling,
                              PartitionOfUnity& pou);

}  // namespace hypfill
