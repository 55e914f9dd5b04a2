#include "hypfill/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hypfill {
namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

std::string fmt_point(const std::vector<double>& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + fmt(c[i]);
  return s + ")";
}

double sq_dist(std::span<const double> x, const std::vector<double>& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) acc += (x[i] - c[i]) * (x[i] - c[i]);
  return acc;
}

double bump_profile(double r2) {
  return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

}  // namespace

TestFunction smooth_bump(std::vector<double> center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("smooth_bump: width must be positive");
  std::string name = "bump" + fmt_point(center) + "w" + fmt(width);
  return {std::move(name), [c = std::move(center), w2 = width * width](std::span<const double> x) {
            return bump_profile(sq_dist(x, c) / w2);
          }};
}

std::vector<TestFunction> point_family(const MetricSpace& space, const FamilySpec& spec) {
  if (spec.count < 0) throw std::invalid_argument("point_family: negative count");
  if (spec.kinds.empty()) throw std::invalid_argument("point_family: no kinds");
  const std::size_t dim = space.dim();
  std::vector<double> lo(dim, INFINITY), hi(dim, -INFINITY);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto x = space.point(Index(i));
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], x[d]);
      hi[d] = std::max(hi[d], x[d]);
    }
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto inside = [&] {
    std::vector<double> c(dim);
    for (std::size_t d = 0; d < dim; ++d) c[d] = lo[d] + (0.2 + 0.6 * unit(rng)) * (hi[d] - lo[d]);
    return c;
  };

  std::vector<TestFunction> out;
  for (int k = 0; k < spec.count; ++k) {
    const std::string& kind = spec.kinds[std::size_t(k) % spec.kinds.size()];
    if (kind == "bump") {
      const double w = spec.min_width + (spec.max_width - spec.min_width) * unit(rng);
      out.push_back(smooth_bump(inside(), w));
    } else if (kind == "coord") {
      // a random unit direction
      std::vector<double> dir(dim);
      double norm = 0.0;
      for (auto& v : dir) {
        v = unit(rng) - 0.5;
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) dir[0] = norm = 1.0;
      for (auto& v : dir) v /= norm;
      out.push_back({"coord" + fmt_point(dir), [dir](std::span<const double> x) {
                       double acc = 0.0;
                       for (std::size_t d = 0; d < dir.size(); ++d) acc += dir[d] * x[d];
                       return acc;
                     }});
    } else if (kind == "dist") {
      auto c = inside();
      out.push_back({"dist" + fmt_point(c), [c](std::span<const double> x) { return std::sqrt(sq_dist(x, c)); }});
    } else if (kind == "trig") {
      // sum of three low-frequency cosines with decaying amplitudes
      struct Mode {
        std::vector<double> k;
        double amp, phase;
      };
      std::vector<Mode> modes;
      std::string name = "trig";
      for (int q = 0; q < 3; ++q) {
        Mode md;
        md.k.resize(dim);
        for (auto& v : md.k) v = 2.0 * std::numbers::pi * std::floor(1.0 + 3.0 * unit(rng)) * (unit(rng) < 0.5 ? -1 : 1);
        md.amp = 1.0 / (q + 1);
        md.phase = 2.0 * std::numbers::pi * unit(rng);
        name += fmt_point(md.k);
        modes.push_back(std::move(md));
      }
      out.push_back({name, [modes](std::span<const double> x) {
                       double acc = 0.0;
                       for (const auto& md : modes) {
                         double arg = md.phase;
                         for (std::size_t d = 0; d < md.k.size(); ++d) arg += md.k[d] * x[d];
                         acc += md.amp * std::cos(arg);
                       }
                       return acc;
                     }});
    } else {
      throw std::invalid_argument("point_family: unknown kind '" + kind + "'");
    }
  }
  return out;
}

std::vector<double> evaluate(const MetricSpace& space, const TestFunction& fn) {
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn.eval(space.point(Index(i)));
  return out;
}

std::vector<TestFunction> grid_family(int dim, double L, int count, std::uint64_t seed) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid_family: dim must be 1 or 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double reach = 0.25 * L;  // centers and supports stay in [-L/2, L/2]
  std::vector<TestFunction> out;
  for (int k = 0; k < count; ++k) {
    std::vector<double> c(dim);
    for (auto& v : c) v = (unit(rng) - 0.5) * reach;
    const double w = (0.3 + 0.5 * unit(rng)) * 0.25 * L;
    switch (k % 3) {
      case 0:
        out.push_back({"gauss" + fmt_point(c) + "w" + fmt(w / 3), [c, s2 = w * w / 9](std::span<const double> x) {
                         return std::exp(-0.5 * sq_dist(x, c) / s2);
                       }});
        break;
      case 1:
        out.push_back(smooth_bump(c, w));
        break;
      default: {
        const double freq = 2.0 * std::numbers::pi * (1.0 + 2.0 * unit(rng)) / w;
        out.push_back({"oscbump" + fmt_point(c) + "w" + fmt(w) + "k" + fmt(freq),
                       [c, w2 = w * w, freq](std::span<const double> x) {
                         return bump_profile(sq_dist(x, c) / w2) * std::cos(freq * (x[0] - c[0]));
                       }});
      }
    }
  }
  return out;
}

TestFunction cusp_function() {
  return {"cusp", [](std::span<const double> x) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::max(0.0, std::pow(r2, -0.125) - 1.0);
          }};
}

euclid::GridFunction sample(const TestFunction& fn, int dim, int m, double L) {
  return euclid::sample_grid(dim, m, L, fn.eval);
}

}  // namespace hypfill
