#pragma once

#include <cstdint>
#include <vector>

#include "hypfill/metric_space.hpp"
#include "hypfill/transfer.hpp"

namespace hypfill {

/// ||d(Pf)||_{l^{p,inf}(E)}.
double ap_seminorm(const FillingOperators& ops, const PointFunction& f, double p);

struct HajlaszOptions {
  double tol = 1e-3;           // relative gap target on the seminorm
  int max_outer = 60;          // full O(m^2) feasibility scans
  int max_local_rounds = 30;   // local refreshes per neighbourhood radius
  double local_radius = 0.0625;   // largest neighbourhood searched locally
  int local_neighbours = 512;  // cap on the precomputed neighbours per point
  int pairs_per_point = 4;     // violated pairs added per point and scan
  int max_sweeps = 50;         // coordinate sweeps per refresh
  double neighbour_factor = 1.5;  // initial active pairs: d <= factor * resolution
  double relaxation = 1.5;     // over-relaxation of multiplier steps, in [1, 2)
  double sweep_tol = 1e-6;     // relative multiplier change that ends a refresh
};

struct HajlaszSolution {
  PointFunction g;            // feasible: |f(x)-f(y)| <= d^alpha (g(x)+g(y))
  double seminorm = 0.0;      // (sum w g^p)^{1/p}
  double lower_bound = 0.0;   // certified lower bound on the infimum
  double alpha = 1.0;
  double p = 1.0;
  double gap = 0.0;           // (seminorm - lower_bound) / seminorm
  bool converged = false;
  int outer_iterations = 0;
  std::size_t active_pairs = 0;
};

/// Minimizes sum_x w_x g(x)^p subject to g(x) + g(y) >= |f(x)-f(y)| / d(x,y)^alpha
/// over all pairs, g >= 0.
HajlaszSolution hajlasz_seminorm(const MetricSpace& space, const PointFunction& f, double alpha,
                                 double p, const HajlaszOptions& options = {});

/// Discrete Hardy-Littlewood maximal function over balls centred at data points.
PointFunction hl_maximal(const MetricSpace& space, const PointFunction& g);

/// max over y with 0 < d(x,y) <= h of |f(y) - f(x)| / d(x,y).
PointFunction pointwise_lip(const MetricSpace& space, const PointFunction& f, double h);

struct PoincareOptions {
  int centers = 24;
  int radii = 6;
  double r_min_factor = 4.0;   // smallest radius, in units of the resolution
  double r_max = 0.5;
  double lip_scale = 0.0;      // 0: the space resolution
  double tolerance = 1e-12;
  std::uint64_t seed = 0;
};

struct PoincareReport {
  double p = 1.0;
  double dilation = 1.0;
  double empirical_constant = 0.0;
  int balls_tested = 0;
  int violations = 0;          // balls with vanishing right side but oscillating f
};

/// Largest ratio of mean oscillation over B to R (mean over lambda*B of (Lip f)^p)^{1/p}.
PoincareReport check_poincare(const MetricSpace& space, double p, double dilation,
                              const std::vector<PointFunction>& family,
                              const PoincareOptions& options = {});

}  // namespace hypfill
