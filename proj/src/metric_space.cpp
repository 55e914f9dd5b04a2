#include "hypfill/metric_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hypfill {
namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("space spec: bad " + std::string(what) + " '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + s + "'");
  }
}

double max_squared_extent(const std::vector<double>& coords, std::size_t dim) {
  const std::size_t n = coords.size() / dim;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = &coords[i * dim];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* b = &coords[j * dim];
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
      }
      best = std::max(best, acc);
    }
  }
  return best;
}

void carpet_points(int level, double x0, double y0, double side, std::vector<double>& out) {
  if (level == 0) {
    out.push_back(x0 + side / 2);
    out.push_back(y0 + side / 2);
    return;
  }
  const double third = side / 3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == 1 && j == 1) continue;
      carpet_points(level - 1, x0 + i * third, y0 + j * third, third, out);
    }
  }
}

}  // namespace

SpaceSpec SpaceSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  SpaceSpec spec;
  const std::string& kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n) {
      throw std::invalid_argument("space spec '" + std::string(text) + "': expected " +
                                  std::to_string(n - 1) + " argument(s)");
    }
  };
  if (kind == "interval_grid") {
    need(2);
    spec.kind = Kind::IntervalGrid;
    spec.size = parse_int(parts[1], "size");
  } else if (kind == "square_grid") {
    need(2);
    spec.kind = Kind::SquareGrid;
    const auto dims = split(parts[1], 'x');
    spec.size = parse_int(dims[0], "size");
    if (dims.size() > 2 || (dims.size() == 2 && parse_int(dims[1], "size") != spec.size)) {
      throw std::invalid_argument("square_grid: only m x m grids are supported");
    }
  } else if (kind == "circle_grid") {
    need(2);
    spec.kind = Kind::CircleGrid;
    spec.size = parse_int(parts[1], "size");
  } else if (kind == "snowflake_interval") {
    need(3);
    spec.kind = Kind::SnowflakeInterval;
    spec.size = parse_int(parts[1], "size");
    spec.epsilon = parse_double(parts[2], "exponent");
  } else if (kind == "sierpinski_carpet") {
    need(2);
    spec.kind = Kind::SierpinskiCarpet;
    spec.size = parse_int(parts[1], "level");
  } else if (kind == "file") {
    spec.kind = Kind::File;
    spec.path = std::string(text.substr(5));
    if (spec.path.empty()) throw std::invalid_argument("file: missing path");
  } else {
    throw std::invalid_argument("unknown space kind '" + kind + "'");
  }
  return spec;
}

std::string SpaceSpec::to_string() const {
  switch (kind) {
    case Kind::IntervalGrid: return "interval_grid:" + std::to_string(size);
    case Kind::SquareGrid: return "square_grid:" + std::to_string(size);
    case Kind::CircleGrid: return "circle_grid:" + std::to_string(size);
    case Kind::SnowflakeInterval: {
      std::ostringstream os;
      os << "snowflake_interval:" << size << ':' << epsilon;
      return os.str();
    }
    case Kind::SierpinskiCarpet: return "sierpinski_carpet:" + std::to_string(size);
    case Kind::File: return "file:" + path;
  }
  return {};
}

MetricSpace MetricSpace::from_points(std::vector<double> coords, std::size_t dim,
                                     std::vector<double> weights, double exponent,
                                     std::string label) {
  if (dim == 0 || coords.size() % dim != 0) {
    throw std::invalid_argument("from_points: coordinate array does not match dimension");
  }
  const std::size_t n = coords.size() / dim;
  if (n < 2) throw std::invalid_argument("from_points: need at least 2 points");
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw std::invalid_argument("from_points: metric exponent outside (0, 1]");
  }
  for (double x : coords) {
    if (!std::isfinite(x)) throw std::invalid_argument("from_points: non-finite coordinate");
  }
  if (weights.empty()) weights.assign(n, 1.0);
  if (weights.size() != n) throw std::invalid_argument("from_points: weight count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("from_points: weights must be positive");
    }
    total += w;
  }
  for (double& w : weights) w /= total;

  const double extent = std::sqrt(max_squared_extent(coords, dim));
  if (extent == 0.0) throw std::invalid_argument("from_points: all points coincide");
  for (double& x : coords) x /= extent;

  auto data = std::make_shared<Data>();
  data->coords = std::move(coords);
  data->dim = dim;
  data->weights = std::move(weights);
  data->exponent = exponent;
  data->label = std::move(label);
  data->tree = KdTree(data->coords, dim);

  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    const std::span<const double> q(data->coords.data() + i * dim, dim);
    if (data->tree.nearest(q, Index(i), true, &d2) >= 0) min_d2 = std::min(min_d2, d2);
  }
  const double e = std::sqrt(min_d2);
  data->resolution = exponent == 1.0 ? e : std::pow(e, exponent);
  MetricSpace space;
  space.data_ = std::move(data);
  return space;
}

double MetricSpace::euclidean_radius(double r) const {
  if (r <= 0.0) return 0.0;
  const double e = data_->exponent == 1.0 ? r : std::pow(r, 1.0 / data_->exponent);
  return e * (1.0 + 1e-9) + 1e-15;
}

MetricSpace::Ball MetricSpace::ball(Index center, double r) const {
  Ball b;
  for_each_in_ball(center, r, [&](Index i, double) { b.members.push_back(i); });
  std::sort(b.members.begin(), b.members.end());
  for (Index i : b.members) b.measure += weight(i);
  return b;
}

MetricSpace make_space(const SpaceSpec& spec) {
  using Kind = SpaceSpec::Kind;
  if (spec.kind == Kind::File) return load_space(spec.path);
  if (spec.kind == Kind::SierpinskiCarpet) {
    if (spec.size < 1) throw std::invalid_argument("sierpinski_carpet: level must be >= 1");
    if (spec.size > 6) throw std::invalid_argument("sierpinski_carpet: level above 6 is too large");
  } else if (spec.size < 2) {
    throw std::invalid_argument("space generator: m must be >= 2");
  }
  const int m = spec.size;
  std::vector<double> coords;
  std::size_t dim = 1;
  double exponent = 1.0;
  switch (spec.kind) {
    case Kind::IntervalGrid:
      for (int i = 0; i < m; ++i) coords.push_back(double(i) / (m - 1));
      break;
    case Kind::SnowflakeInterval:
      if (!(spec.epsilon > 0.0 && spec.epsilon <= 1.0)) {
        throw std::invalid_argument("snowflake_interval: exponent outside (0, 1]");
      }
      exponent = spec.epsilon;
      for (int i = 0; i < m; ++i) coords.push_back(double(i) / (m - 1));
      break;
    case Kind::SquareGrid:
      dim = 2;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          coords.push_back(double(i) / (m - 1));
          coords.push_back(double(j) / (m - 1));
        }
      }
      break;
    case Kind::CircleGrid:
      dim = 2;
      for (int i = 0; i < m; ++i) {
        const double a = 2.0 * std::numbers::pi * i / m;
        coords.push_back(std::cos(a));
        coords.push_back(std::sin(a));
      }
      break;
    case Kind::SierpinskiCarpet:
      dim = 2;
      carpet_points(spec.size, 0.0, 0.0, 1.0, coords);
      break;
    case Kind::File:
      break;
  }
  return MetricSpace::from_points(std::move(coords), dim, {}, exponent, spec.to_string());
}

MetricSpace load_space(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_space: cannot open " + path);
  std::vector<double> coords;
  std::vector<double> weights;
  std::size_t dim = 0;
  double exponent = 1.0;
  int weighted_lines = 0;
  int point_lines = 0;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("#!exponent=", 0) == 0) {
      try {
        exponent = parse_double(line.substr(11), "exponent");
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<double> row;
    std::string tok;
    bool has_weight = false;
    double w = 0.0;
    while (tokens >> tok) {
      if (has_weight) fail("token after weight");
      try {
        if (tok.rfind("w=", 0) == 0) {
          w = parse_double(tok.substr(2), "weight");
          has_weight = true;
        } else {
          row.push_back(parse_double(tok, "coordinate"));
        }
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
    if (row.empty()) {
      if (has_weight) fail("weight without coordinates");
      continue;
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim) fail("expected " + std::to_string(dim) + " coordinates");
    if (has_weight && !(w > 0.0)) fail("weight must be positive");
    coords.insert(coords.end(), row.begin(), row.end());
    weights.push_back(has_weight ? w : 0.0);
    weighted_lines += has_weight;
    ++point_lines;
  }
  if (point_lines < 2) throw std::runtime_error(path + ": need at least 2 points");
  if (weighted_lines != 0 && weighted_lines != point_lines) {
    throw std::runtime_error(path + ": weights given for some points but not all");
  }
  if (weighted_lines == 0) weights.clear();

  auto space = MetricSpace::from_points(std::move(coords), dim, std::move(weights), exponent,
                                        "file:" + path);
  if (warnings && space.resolution() == std::numeric_limits<double>::infinity()) {
    warnings->push_back("all points coincide");
  }
  if (warnings) {
    for (std::size_t i = 0; i < space.size(); ++i) {
      double d2 = 0.0;
      space.tree().nearest(space.point(Index(i)), Index(i), false, &d2);
      if (d2 == 0.0) {
        warnings->push_back("duplicate point at entry " + std::to_string(i + 1));
      }
    }
  }
  return space;
}

void save_space(const MetricSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_space: cannot write " + path);
  out << "# " << space.label() << '\n';
  if (space.exponent() != 1.0) {
    out << "#!exponent=" << std::setprecision(17) << space.exponent() << '\n';
  }
  out << std::setprecision(17);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (double x : space.point(Index(i))) out << x << ' ';
    out << "w=" << space.weight(Index(i)) << '\n';
  }
}

RegularityEstimate estimate_regularity(const MetricSpace& space, std::uint64_t seed) {
  const std::size_t n = space.size();
  if (n < 16) throw std::invalid_argument("estimate_regularity: need at least 16 points");

  std::vector<Index> centers(n);
  std::iota(centers.begin(), centers.end(), 0);
  constexpr std::size_t kCenters = 96;
  if (n > kCenters) {
    std::mt19937_64 rng(seed);
    std::shuffle(centers.begin(), centers.end(), rng);
    centers.resize(kCenters);
  }

  // For each center, distances sorted with cumulative weight.
  std::vector<std::vector<std::pair<double, double>>> profiles;
  std::vector<double> kth;
  for (Index c : centers) {
    std::vector<std::pair<double, double>> prof(n);
    for (std::size_t j = 0; j < n; ++j) prof[j] = {space.distance(c, Index(j)), space.weight(Index(j))};
    std::sort(prof.begin(), prof.end());
    double acc = 0.0;
    for (auto& [d, w] : prof) {
      acc += w;
      w = acc;
    }
    kth.push_back(prof[std::min<std::size_t>(8, n - 1)].first);
    profiles.push_back(std::move(prof));
  }
  std::nth_element(kth.begin(), kth.begin() + kth.size() / 2, kth.end());
  RegularityEstimate est;
  est.r_min = kth[kth.size() / 2];
  est.r_max = 0.125;
  if (est.r_min >= est.r_max) est.r_max = std::min(1.0, 4.0 * est.r_min);

  auto measure = [](const std::vector<std::pair<double, double>>& prof, double r) {
    // open ball: count entries with distance < r
    auto it = std::lower_bound(prof.begin(), prof.end(), r,
                               [](const std::pair<double, double>& e, double v) { return e.first < v; });
    return it == prof.begin() ? 0.0 : std::prev(it)->second;
  };

  constexpr int kRadii = 16;
  std::vector<double> xs, ys;
  for (int k = 0; k < kRadii; ++k) {
    const double r = est.r_min * std::pow(est.r_max / est.r_min, double(k) / (kRadii - 1));
    double mean = 0.0;
    for (const auto& prof : profiles) mean += measure(prof, r);
    mean /= double(profiles.size());
    xs.push_back(std::log(r));
    ys.push_back(std::log(mean));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / kRadii;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / kRadii;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < kRadii; ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  if (sxy <= 0.0) throw std::runtime_error("estimate_regularity: ball measures do not grow");
  est.q = sxy / sxx;

  est.lower_const = std::numeric_limits<double>::infinity();
  est.upper_const = 0.0;
  for (int k = 0; k < kRadii; ++k) {
    const double r = std::exp(xs[k]);
    for (const auto& prof : profiles) {
      const double ratio = measure(prof, r) / std::pow(r, est.q);
      est.lower_const = std::min(est.lower_const, ratio);
      est.upper_const = std::max(est.upper_const, ratio);
    }
  }
  return est;
}

}  // namespace hypfill
