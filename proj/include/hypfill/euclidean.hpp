#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hypfill::euclid {

/// Samples of a function on the periodic box [-L, L)^dim, m cells per axis,
/// taken at cell centers -L + (i + 1/2) 2L/m. Row-major for dim 2, with
/// the row index along axis 0.
struct GridFunction {
  int dim = 1;
  int m = 0;
  double L = 1.0;
  std::vector<double> values;

  double step() const { return 2.0 * L / m; }
  double cell_volume() const { return dim == 1 ? step() : step() * step(); }
  std::size_t size() const { return values.size(); }
  double coord(int i) const { return -L + (i + 0.5) * step(); }
};

GridFunction sample_grid(int dim, int m, double L, const std::function<double(std::span<const double>)>& fn);

/// A function on grid x {t_j}, with mu_s cell masses. values[j * N + k] is
/// the value at grid cell k and level j, N = m^dim.
struct HalfSpaceField {
  int dim = 1;
  int m = 0;
  double L = 1.0;
  double s = 1.0;
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> weights;

  std::size_t cells() const { return dim == 1 ? std::size_t(m) : std::size_t(m) * std::size_t(m); }
  std::span<const double> level(std::size_t j) const { return {values.data() + j * cells(), cells()}; }
  GridFunction level_grid(std::size_t j) const;
};

/// t_j = t0 2^{-j}, j = 0..J.
std::vector<double> geometric_levels(double t0, int J);

/// mu_s mass of one cell at level t: cell volume times the integral of
/// tau^{-(s+1)} over (t / sqrt 2, t sqrt 2].
double band_mass(double cell_volume, double t, double s);

/// c_n t / (t^2 + |x|^2)^{(n+1)/2} with c_n = Gamma((n+1)/2) / pi^{(n+1)/2}.
double poisson_kernel(std::span<const double> x, double t);
inline double poisson_kernel(double x, double t) { return poisson_kernel(std::span<const double>(&x, 1), t); }

/// Mass of P_t outside the ball of radius L (an upper bound for the box).
double poisson_tail_mass(int dim, double L, double t);

/// u(., t_j) = P_{t_j} * f by periodic convolution with the sampled kernel,
/// normalized to unit mass per level. Levels whose kernel loses more than
/// 1e-3 of its mass outside the box are reported through `warnings`.
HalfSpaceField poisson_extend_halfspace(const GridFunction& f, const std::vector<double>& t_levels,
                                        double s, std::vector<std::string>* warnings = nullptr);

/// Copy of F with values multiplied by t^a.
HalfSpaceField scale_by_t_power(const HalfSpaceField& F, double a);

/// Infimal C with mu_s{|F| > lambda} <= (C / lambda)^p, for the discrete measure.
double halfspace_weak_norm(const HalfSpaceField& F, double p);

/// Fourier multiplier -i xi_j / |xi| (axis j = 0 or 1). The zero mode and
/// the Nyquist modes are set to zero.
GridFunction riesz_transform(const GridFunction& f, int axis);

/// Spectral partial derivative along `axis`; Nyquist modes are dropped.
GridFunction spectral_derivative(const GridFunction& f, int axis);

/// t |grad u| per cell: spectral in x, three-point differences on the
/// nonuniform t grid (one-sided at the two end levels).
HalfSpaceField hyperbolic_gradient(const HalfSpaceField& U);

/// Radial kernel profile k(|y|) at unit scale.
struct Kernel {
  std::string name;
  std::function<double(double)> profile;
};

Kernel ball_kernel();  // indicator of |y| < 1
Kernel tent_kernel();  // max(0, 1 - |y|)

/// Integral of (1 + |y|) k(|y|) over R^dim, or +inf if it does not settle.
double kernel_first_moment(const Kernel& k, int dim);

/// u(x, t) = sum_y f(x - y) k(y / t), with the sampled kernel normalized to
/// unit discrete mass per level. Rejects kernels that are negative,
/// unbounded, massless, or fail the first-moment check.
HalfSpaceField kernel_extend(const GridFunction& f, const Kernel& k, const std::vector<double>& t_levels,
                             double s = 1.0);

double l2_norm(const GridFunction& f);
double lp_norm(const GridFunction& f, double p);
/// ||grad f||_{L^2}, spectral.
double gradient_l2_norm(const GridFunction& f);

/// CSV with a `n,m,L` header row, then values row-major (one grid row per line).
void write_grid_csv(const GridFunction& f, const std::string& path);
GridFunction read_grid_csv(const std::string& path);
/// Rows of `x_index,level,value,weight`.
void write_field_csv(const HalfSpaceField& F, const std::string& path);

}  // namespace hypfill::euclid
