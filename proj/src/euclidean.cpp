#include "hypfill/euclidean.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "hypfill/seq_norms.hpp"

namespace hypfill::euclid {
namespace {

using detail::signed_bin;
using detail::Spectrum;

void check_grid(const GridFunction& f) {
  if (f.dim != 1 && f.dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (f.m < 2 || !(f.L > 0.0)) throw std::invalid_argument("grid: need m >= 2 and L > 0");
  const std::size_t want = f.dim == 1 ? std::size_t(f.m) : std::size_t(f.m) * f.m;
  if (f.values.size() != want) throw std::invalid_argument("grid: value count does not match m^dim");
  for (double v : f.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid: non-finite value");
  }
}

void check_levels(const std::vector<double>& t) {
  if (t.empty()) throw std::invalid_argument("half-space: no t levels");
  for (double x : t) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("half-space: t levels must be positive");
  }
}

// Minimal-image offset of bin k from the origin, in grid steps.
int offset_bin(int k, int m) { return k < m / 2 ? k : k - m; }

// Samples a radial function of the periodic offset at every cell.
template <typename Radial>
std::vector<double> sample_offsets(int dim, int m, double h, Radial&& fn) {
  std::vector<double> out;
  if (dim == 1) {
    out.resize(m);
    for (int k = 0; k < m; ++k) out[k] = fn(std::abs(offset_bin(k, m) * h));
  } else {
    out.resize(std::size_t(m) * m);
    for (int a = 0; a < m; ++a) {
      const double ya = offset_bin(a, m) * h;
      for (int b = 0; b < m; ++b) {
        const double yb = offset_bin(b, m) * h;
        out[std::size_t(a) * m + b] = fn(std::hypot(ya, yb));
      }
    }
  }
  return out;
}

std::vector<double> convolve(const Spectrum& f_hat, std::vector<double> kernel, int dim, int m) {
  double mass = 0.0;
  for (double k : kernel) mass += k;
  for (double& k : kernel) k /= mass;
  Spectrum k_hat = detail::fft_forward(kernel, dim, m);
  for (std::size_t i = 0; i < k_hat.size(); ++i) k_hat[i] *= f_hat[i];
  return detail::fft_inverse_real(std::move(k_hat), dim, m);
}

// Angular frequency of signed bin k on a box of period 2L.
double freq(int k, int m, double L) { return std::numbers::pi * signed_bin(k, m) / L; }

bool nyquist(int k, int m) { return m % 2 == 0 && k == m / 2; }

template <typename Multiplier>
GridFunction apply_multiplier(const GridFunction& f, Multiplier&& mult) {
  check_grid(f);
  Spectrum spec = detail::fft_forward(f.values, f.dim, f.m);
  const int m = f.m;
  if (f.dim == 1) {
    for (int k = 0; k < m; ++k) {
      spec[k] *= nyquist(k, m) ? 0.0 : mult(freq(k, m, f.L), 0.0);
    }
  } else {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        auto& c = spec[std::size_t(a) * m + b];
        c *= (nyquist(a, m) || nyquist(b, m)) ? 0.0 : mult(freq(a, m, f.L), freq(b, m, f.L));
      }
    }
  }
  GridFunction out = f;
  out.values = detail::fft_inverse_real(std::move(spec), f.dim, f.m);
  return out;
}

HalfSpaceField empty_field(const GridFunction& f, const std::vector<double>& t, double s) {
  HalfSpaceField F;
  F.dim = f.dim;
  F.m = f.m;
  F.L = f.L;
  F.s = s;
  F.t = t;
  F.values.resize(t.size() * f.size());
  F.weights.resize(t.size() * f.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    std::fill_n(F.weights.begin() + j * f.size(), f.size(), band_mass(f.cell_volume(), t[j], s));
  }
  return F;
}

}  // namespace

GridFunction sample_grid(int dim, int m, double L, const std::function<double(std::span<const double>)>& fn) {
  GridFunction f{dim, m, L, {}};
  if (dim != 1 && dim != 2) throw std::invalid_argument("sample_grid: dim must be 1 or 2");
  if (m < 2 || !(L > 0.0)) throw std::invalid_argument("sample_grid: need m >= 2 and L > 0");
  if (dim == 1) {
    f.values.resize(m);
    for (int i = 0; i < m; ++i) {
      const double x = f.coord(i);
      f.values[i] = fn({&x, 1});
    }
  } else {
    f.values.resize(std::size_t(m) * m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const double x[2] = {f.coord(a), f.coord(b)};
        f.values[std::size_t(a) * m + b] = fn(x);
      }
    }
  }
  return f;
}

GridFunction HalfSpaceField::level_grid(std::size_t j) const {
  const auto lv = level(j);
  return GridFunction{dim, m, L, std::vector<double>(lv.begin(), lv.end())};
}

std::vector<double> geometric_levels(double t0, int J) {
  if (!(t0 > 0.0) || J < 0) throw std::invalid_argument("geometric_levels: need t0 > 0 and J >= 0");
  std::vector<double> t(std::size_t(J) + 1);
  for (int j = 0; j <= J; ++j) t[j] = std::ldexp(t0, -j);
  return t;
}

double band_mass(double cell_volume, double t, double s) {
  const double lo = t / std::numbers::sqrt2;
  const double hi = t * std::numbers::sqrt2;
  if (s == 0.0) return cell_volume * std::log(hi / lo);
  return cell_volume * (std::pow(lo, -s) - std::pow(hi, -s)) / s;
}

double poisson_kernel(std::span<const double> x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_kernel: t must be positive");
  const std::size_t n = x.size();
  if (n != 1 && n != 2) throw std::invalid_argument("poisson_kernel: dimension must be 1 or 2");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double h = 0.5 * double(n + 1);
  const double cn = std::tgamma(h) / std::pow(std::numbers::pi, h);
  return cn * t / std::pow(t * t + r2, h);
}

double poisson_tail_mass(int dim, double L, double t) {
  // 1D: 1 - (2/pi) atan(L/t). 2D, outside a disc: t / sqrt(t^2 + L^2).
  if (dim == 1) return 1.0 - 2.0 / std::numbers::pi * std::atan(L / t);
  return t / std::hypot(t, L);
}

HalfSpaceField poisson_extend_halfspace(const GridFunction& f, const std::vector<double>& t_levels,
                                        double s, std::vector<std::string>* warnings) {
  check_grid(f);
  check_levels(t_levels);
  HalfSpaceField F = empty_field(f, t_levels, s);
  const Spectrum f_hat = detail::fft_forward(f.values, f.dim, f.m);
  const double h = f.step();
  for (std::size_t j = 0; j < t_levels.size(); ++j) {
    const double t = t_levels[j];
    const double tail = poisson_tail_mass(f.dim, f.L, t);
    if (tail > 1e-3 && warnings) {
      std::ostringstream msg;
      msg << "poisson kernel at t=" << t << " has tail mass " << tail << " outside the box";
      warnings->push_back(msg.str());
    }
    auto kernel = sample_offsets(f.dim, f.m, h, [&](double r) {
      const double y[2] = {r, 0.0};
      return poisson_kernel(std::span<const double>(y, std::size_t(f.dim)), t);
    });
    const auto u = convolve(f_hat, std::move(kernel), f.dim, f.m);
    std::copy(u.begin(), u.end(), F.values.begin() + j * f.size());
  }
  return F;
}

HalfSpaceField scale_by_t_power(const HalfSpaceField& F, double a) {
  HalfSpaceField out = F;
  const std::size_t n = F.cells();
  for (std::size_t j = 0; j < F.t.size(); ++j) {
    const double c = std::pow(F.t[j], a);
    for (std::size_t k = 0; k < n; ++k) out.values[j * n + k] *= c;
  }
  return out;
}

double halfspace_weak_norm(const HalfSpaceField& F, double p) {
  return seq::weighted_weak_star(F.values, F.weights, p);
}

GridFunction riesz_transform(const GridFunction& f, int axis) {
  if (axis < 0 || axis >= f.dim) throw std::invalid_argument("riesz_transform: axis out of range");
  return apply_multiplier(f, [axis](double xa, double xb) -> std::complex<double> {
    const double norm = std::hypot(xa, xb);
    if (norm == 0.0) return 0.0;
    return {0.0, -(axis == 0 ? xa : xb) / norm};
  });
}

GridFunction spectral_derivative(const GridFunction& f, int axis) {
  if (axis < 0 || axis >= f.dim) throw std::invalid_argument("spectral_derivative: axis out of range");
  return apply_multiplier(f, [axis](double xa, double xb) -> std::complex<double> {
    return {0.0, axis == 0 ? xa : xb};
  });
}

HalfSpaceField hyperbolic_gradient(const HalfSpaceField& U) {
  const std::size_t J = U.t.size();
  if (J < 2) throw std::invalid_argument("hyperbolic_gradient: need at least two t levels");
  const std::size_t n = U.cells();
  HalfSpaceField out = U;
  std::vector<double> sq(U.values.size(), 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    const GridFunction g = U.level_grid(j);
    for (int axis = 0; axis < U.dim; ++axis) {
      const GridFunction d = spectral_derivative(g, axis);
      for (std::size_t k = 0; k < n; ++k) sq[j * n + k] += d.values[k] * d.values[k];
    }
  }
  // du/dt from the three nearest levels, exact for quadratics in t
  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t a = J == 2 ? 0 : std::min(j == 0 ? 0 : j - 1, J - 3);
    const std::size_t c_end = std::min(J, a + 3);
    std::vector<std::size_t> idx;
    for (std::size_t i = a; i < c_end; ++i) idx.push_back(i);
    const double t = U.t[j];
    // Lagrange derivative weights at t over the stencil nodes
    std::vector<double> w(idx.size(), 0.0);
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double tq = U.t[idx[q]];
      double acc = 0.0;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (r == q) continue;
        double term = 1.0 / (tq - U.t[idx[r]]);
        for (std::size_t s2 = 0; s2 < idx.size(); ++s2) {
          if (s2 == q || s2 == r) continue;
          term *= (t - U.t[idx[s2]]) / (tq - U.t[idx[s2]]);
        }
        acc += term;
      }
      w[q] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) {
      double dt = 0.0;
      for (std::size_t q = 0; q < idx.size(); ++q) dt += w[q] * U.values[idx[q] * n + k];
      out.values[j * n + k] = t * std::sqrt(sq[j * n + k] + dt * dt);
    }
  }
  return out;
}

Kernel ball_kernel() {
  return {"ball", [](double r) { return r < 1.0 ? 1.0 : 0.0; }};
}

Kernel tent_kernel() {
  return {"tent", [](double r) { return std::max(0.0, 1.0 - r); }};
}

double kernel_first_moment(const Kernel& k, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("kernel_first_moment: dim must be 1 or 2");
  // sphere measure: 2 points in 1D, circumference 2 pi r in 2D
  auto shell = [dim](double r) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi * r; };
  auto integrand = [&](double r) { return (1.0 + r) * k.profile(r) * shell(r); };
  // midpoint rule on [0, 1], then log-spaced midpoints per decade
  double inner = 0.0;
  const int n0 = 4000;
  for (int i = 0; i < n0; ++i) {
    const double r = (i + 0.5) / n0;
    inner += integrand(r) / n0;
  }
  auto decades = [&](int count) {
    double acc = 0.0;
    const int per = 400;
    for (int i = 0; i < count * per; ++i) {
      const double u0 = double(i) / per, u1 = double(i + 1) / per;
      const double r = std::pow(10.0, 0.5 * (u0 + u1));
      acc += integrand(r) * (std::pow(10.0, u1) - std::pow(10.0, u0));
    }
    return acc;
  };
  const double near = inner + decades(3);
  const double far = inner + decades(4);
  if (!std::isfinite(far) || !(near > 0.0)) return std::numeric_limits<double>::infinity();
  if (far - near > 1e-2 * near) return std::numeric_limits<double>::infinity();
  return far;
}

HalfSpaceField kernel_extend(const GridFunction& f, const Kernel& k, const std::vector<double>& t_levels,
                             double s) {
  check_grid(f);
  check_levels(t_levels);
  if (!k.profile) throw std::invalid_argument("kernel_extend: empty kernel");
  double peak = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = k.profile(i * 1e-3 * 4.0);
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("kernel_extend: kernel must be finite and non-negative");
    peak = std::max(peak, v);
  }
  const double moment = kernel_first_moment(k, f.dim);
  if (!std::isfinite(moment) || !(moment > 0.0)) {
    throw std::invalid_argument("kernel_extend: kernel '" + k.name + "' fails the first-moment check");
  }
  HalfSpaceField F = empty_field(f, t_levels, s);
  const Spectrum f_hat = detail::fft_forward(f.values, f.dim, f.m);
  const double h = f.step();
  for (std::size_t j = 0; j < t_levels.size(); ++j) {
    const double t = t_levels[j];
    auto kernel = sample_offsets(f.dim, f.m, h, [&](double r) { return k.profile(r / t); });
    double mass = 0.0;
    for (double v : kernel) mass += v;
    if (!(mass > 0.0)) throw std::invalid_argument("kernel_extend: kernel vanishes on the grid");
    const auto u = convolve(f_hat, std::move(kernel), f.dim, f.m);
    std::copy(u.begin(), u.end(), F.values.begin() + j * f.size());
  }
  return F;
}

double lp_norm(const GridFunction& f, double p) {
  double acc = 0.0;
  for (double v : f.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.cell_volume(), 1.0 / p);
}

double l2_norm(const GridFunction& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v * v;
  return std::sqrt(acc * f.cell_volume());
}

double gradient_l2_norm(const GridFunction& f) {
  double acc = 0.0;
  for (int axis = 0; axis < f.dim; ++axis) {
    const GridFunction d = spectral_derivative(f, axis);
    for (double v : d.values) acc += v * v;
  }
  return std::sqrt(acc * f.cell_volume());
}

void write_grid_csv(const GridFunction& f, const std::string& path) {
  check_grid(f);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "n,m,L\n" << f.dim << ',' << f.m << ',' << f.L << '\n';
  const int cols = f.dim == 1 ? 1 : f.m;
  for (int r = 0; r < f.m; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << f.values[std::size_t(r) * cols + c];
    }
    out << '\n';
  }
}

GridFunction read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
  };
  auto fields = [](const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail("bad number '" + text + "'");
    }
    if (used != text.size() && text.find_first_not_of(" \t\r", used) != std::string::npos) {
      fail("bad number '" + text + "'");
    }
    return v;
  };
  ++lineno;
  if (!std::getline(in, line)) fail("missing header");
  ++lineno;
  if (!std::getline(in, line)) fail("missing dimensions");
  const auto head = fields(line);
  if (head.size() != 3) fail("expected n,m,L");
  GridFunction f;
  f.dim = int(number(head[0]));
  f.m = int(number(head[1]));
  f.L = number(head[2]);
  if ((f.dim != 1 && f.dim != 2) || f.m < 2 || !(f.L > 0.0)) fail("invalid n, m or L");
  const std::size_t cols = f.dim == 1 ? 1 : std::size_t(f.m);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto row = fields(line);
    if (row.size() != cols) fail("expected " + std::to_string(cols) + " values");
    for (const auto& item : row) f.values.push_back(number(item));
  }
  const std::size_t want = f.dim == 1 ? std::size_t(f.m) : std::size_t(f.m) * f.m;
  if (f.values.size() != want) fail("expected " + std::to_string(want) + " values in total");
  check_grid(f);
  return f;
}

void write_field_csv(const HalfSpaceField& F, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "x_index,level,value,weight\n";
  const std::size_t n = F.cells();
  for (std::size_t j = 0; j < F.t.size(); ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      out << k << ',' << j << ',' << F.values[j * n + k] << ',' << F.weights[j * n + k] << '\n';
    }
  }
}

}  // namespace hypfill::euclid
