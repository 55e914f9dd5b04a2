#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypfill/kd_tree.hpp"

namespace hypfill {

/// Generator descriptor. Text form: `interval_grid:<m>`, `square_grid:<m>`
/// (or `<m>x<m>`), `circle_grid:<m>`, `snowflake_interval:<m>:<eps>`,
/// `sierpinski_carpet:<level>`, `file:<path>`.
struct SpaceSpec {
  enum class Kind { IntervalGrid, SquareGrid, CircleGrid, SnowflakeInterval, SierpinskiCarpet, File };
  Kind kind = Kind::IntervalGrid;
  int size = 0;  // m, or carpet level
  double epsilon = 1.0;
  std::string path;

  static SpaceSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Finite metric measure space. Points carry Euclidean coordinates; the
/// metric is d(x, y) = |x - y|^eps after rescaling the coordinates to unit
/// Euclidean diameter, so diam = 1 for every eps in (0, 1]. Weights sum to 1.
/// Copies share the underlying immutable data.
class MetricSpace {
 public:
  struct Ball {
    std::vector<Index> members;
    double measure = 0.0;
  };

  MetricSpace() = default;

  /// Rescales coordinates to unit diameter and renormalizes weights. An
  /// empty weight vector means uniform weights.
  static MetricSpace from_points(std::vector<double> coords, std::size_t dim,
                                 std::vector<double> weights, double exponent,
                                 std::string label);

  std::size_t size() const { return data_ ? data_->weights.size() : 0; }
  std::size_t dim() const { return data_->dim; }
  double exponent() const { return data_->exponent; }
  const std::string& label() const { return data_->label; }

  std::span<const double> point(Index i) const {
    return {data_->coords.data() + std::size_t(i) * data_->dim, data_->dim};
  }
  std::span<const double> coords() const { return data_->coords; }
  double weight(Index i) const { return data_->weights[i]; }
  std::span<const double> weights() const { return data_->weights; }

  double distance(Index i, Index j) const {
    const std::size_t dim = data_->dim;
    const double* a = data_->coords.data() + std::size_t(i) * dim;
    const double* b = data_->coords.data() + std::size_t(j) * dim;
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = a[d] - b[d];
      acc += diff * diff;
    }
    return from_squared_euclidean(acc);
  }

  double from_squared_euclidean(double d2) const {
    const double e = std::sqrt(d2);
    return data_->exponent == 1.0 ? e : std::pow(e, data_->exponent);
  }

  /// Euclidean radius covering the metric ball of radius r (slightly padded).
  double euclidean_radius(double r) const;

  /// Minimal positive pairwise distance.
  double resolution() const { return data_->resolution; }

  /// Calls visit(i, d(center, i)) for every i with d(center, i) < r.
  template <typename Visit>
  void for_each_in_ball(Index center, double r, Visit&& visit) const {
    data_->tree.for_each_within(point(center), euclidean_radius(r), [&](Index i, double d2) {
      const double d = from_squared_euclidean(d2);
      if (d < r) visit(i, d);
    });
  }

  /// Open ball {y : d(center, y) < r} and its measure.
  Ball ball(Index center, double r) const;

  const KdTree& tree() const { return data_->tree; }

 private:
  struct Data {
    std::vector<double> coords;
    std::size_t dim = 0;
    std::vector<double> weights;
    double exponent = 1.0;
    double resolution = 0.0;
    std::string label;
    KdTree tree;
  };
  std::shared_ptr<const Data> data_;
};

MetricSpace make_space(const SpaceSpec& spec);
inline MetricSpace make_space(std::string_view text) { return make_space(SpaceSpec::parse(text)); }

/// Reads a point-cloud file: one point per line, whitespace-separated
/// coordinates, optional trailing `w=<weight>`, `#` comments. A comment of
/// the form `#!exponent=<eps>` selects a snowflaked metric. Throws
/// std::runtime_error with the offending line number on parse errors.
/// Coincident points are reported through `warnings`.
MetricSpace load_space(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Writes the point-cloud format read by load_space.
void save_space(const MetricSpace& space, const std::string& path);

struct RegularityEstimate {
  double q = 0.0;
  double lower_const = 0.0;
  double upper_const = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Least-squares fit of log |B(x, r)| against log r over sampled centers and a
/// geometric radius grid.
RegularityEstimate estimate_regularity(const MetricSpace& space, std::uint64_t seed = 0);

}  // namespace hypfill
