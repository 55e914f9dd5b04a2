#include "hypfill/seq_norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypfill::seq {
namespace {

void require_finite(std::span<const double> s, const char* who) {
  for (double x : s) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(who) + ": non-finite entry");
    }
  }
}

std::vector<double> sorted_magnitudes(std::span<const double> s) {
  std::vector<double> a(s.size());
  std::transform(s.begin(), s.end(), a.begin(),
                 [](double x) { return std::abs(x); });
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

}  // namespace

double weak_star_norm(std::span<const double> s, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("weak_star_norm: p < 1");
  require_finite(s, "weak_star_norm");
  const auto a = sorted_magnitudes(s);
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) break;
    best = std::max(best, std::pow(double(k + 1), 1.0 / p) * a[k]);
  }
  return best;
}

double weak_norm(std::span<const double> s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("weak_norm: p <= 1");
  require_finite(s, "weak_norm");
  const auto a = sorted_magnitudes(s);
  const double expo = -1.0 + 1.0 / p;
  double best = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) break;  // further terms only shrink the normalized sum
    prefix += a[k];
    best = std::max(best, std::pow(double(k + 1), expo) * prefix);
  }
  return best;
}

double lp_norm(std::span<const double> s, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p < 1");
  require_finite(s, "lp_norm");
  double peak = 0.0;
  for (double x : s) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return 0.0;
  // scaled to avoid overflow for large p
  double acc = 0.0;
  for (double x : s) acc += std::pow(std::abs(x) / peak, p);
  return peak * std::pow(acc, 1.0 / p);
}

double weighted_weak_star(std::span<const double> values,
                          std::span<const double> masses, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_weak_star: p < 1");
  if (values.size() != masses.size()) {
    throw std::invalid_argument("weighted_weak_star: size mismatch");
  }
  require_finite(values, "weighted_weak_star");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  double best = 0.0;
  double mass = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = std::abs(values[order[k]]);
    if (v == 0.0) break;
    mass += masses[order[k]];
    // only evaluate at the end of a run of equal magnitudes
    if (k + 1 < order.size() && std::abs(values[order[k + 1]]) == v) continue;
    best = std::max(best, std::pow(mass, 1.0 / p) * v);
  }
  return best;
}

}  // namespace hypfill::seq
