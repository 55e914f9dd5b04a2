// Hajlasz seminorm by dual coordinate ascent over an active set of pair
// constraints, with full pair scans for violated constraints and a
// Lagrangian lower bound for the gap certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hypfill/sobolev.hpp"

namespace hypfill {
namespace {

/// phi(g) = g^p for p > 1; g + rho g^2 / 2 for p = 1 (proximal smoothing
/// with rho driven to zero across refreshes).
struct Penalty {
  double p = 2.0;
  double rho = 0.0;

  bool linear() const { return p == 1.0; }

  /// argmin_{g >= 0} w phi(g) - lam g
  double primal(double lam, double w) const {
    if (lam <= 0.0) return 0.0;
    if (linear()) return std::max(0.0, (lam / w - 1.0) / rho);
    if (p == 2.0) return lam / (2.0 * w);
    return std::pow(lam / (p * w), 1.0 / (p - 1.0));
  }

  /// w phi*(lam / w) for p > 1
  double conjugate(double lam, double w) const {
    if (lam <= 0.0) return 0.0;
    return w * (p - 1.0) * std::pow(lam / (p * w), p / (p - 1.0));
  }

  double cost(double g, double w) const { return linear() ? w * g : w * std::pow(g, p); }
};

struct Pair {
  Index x, y;
  double c;
  double lambda = 0.0;
};

class Solver {
 public:
  Solver(const MetricSpace& space, const PointFunction& f, double alpha, double p,
         const HajlaszOptions& opt)
      : space_(space), f_(f), alpha_(alpha), opt_(opt), m_(space.size()) {
    pen_.p = p;
    w_.assign(space.weights().begin(), space.weights().end());
    a_.resize(m_);
    half_inv_w_.resize(m_);
    for (std::size_t x = 0; x < m_; ++x) half_inv_w_[x] = 0.5 / w_[x];
    for (std::size_t x = 0; x < m_; ++x) a_[x] = p == 1.0 ? 0.0 : std::pow(w_[x], -1.0 / (p - 1.0));
    lam_.assign(m_, 0.0);
    g_.assign(m_, 0.0);
  }

  HajlaszSolution run() {
    HajlaszSolution sol;
    sol.alpha = alpha_;
    sol.p = pen_.p;
    seed_active_set();
    double c_max = 0.0;
    for (const auto& pr : active_) c_max = std::max(c_max, pr.c);
    c_scale_ = c_max;
    if (pen_.linear()) pen_.rho = 1.0 / std::max(c_max, 1e-300);

    double best_upper = std::numeric_limits<double>::infinity();
    double best_lower = 0.0;
    PointFunction best_g;
    // Local rounds grow the active set from neighbourhoods of doubling
    // radius; full O(m^2) scans certify and pick up far pairs.
    build_neighbourhoods();
    const std::size_t last_stage = radii_.size() - 1;
    const double local_tol = 0.25 * opt_.tol * c_scale_;
    bool local = true;
    std::size_t stage = 0;
    int local_rounds = 0;
    while (sol.outer_iterations < opt_.max_outer) {
      if (local) {
        sweep_active(std::max(1, opt_.max_sweeps / 5));
        const Scan scan = local_scan(stage, local_tol);
        const bool added = ++local_rounds <= opt_.max_local_rounds && add_violated(scan);
        if (!added) {
          local_rounds = 0;
          if (stage < last_stage) {
            ++stage;
          } else {
            local = false;
          }
        }
        continue;
      }
      sweep_active(opt_.max_sweeps);
      ++sol.outer_iterations;
      const Scan scan = full_scan();
      best_lower = std::max({best_lower, scan.single_pair_bound, dual_bound()});
      if (scan.upper < best_upper) {
        best_upper = scan.upper;
        best_g = scan.repaired;
      }
      const double up = seminorm_of(best_upper);
      const double lo = seminorm_of(best_lower);
      if (up <= 0.0 || (up - lo) <= opt_.tol * up) {
        sol.converged = true;
        break;
      }
      if (pen_.linear()) pen_.rho *= 0.25;
      if (add_violated(scan)) local = true;
    }
    sol.g = best_g.empty() ? PointFunction(m_, 0.0) : std::move(best_g);
    sol.seminorm = seminorm_of(best_upper);
    sol.lower_bound = std::min(seminorm_of(best_lower), sol.seminorm);
    sol.gap = sol.seminorm > 0.0 ? (sol.seminorm - sol.lower_bound) / sol.seminorm : 0.0;
    sol.active_pairs = active_.size();
    return sol;
  }

 private:
  struct Scan {
    double upper = 0.0;             // objective of the repaired primal
    double single_pair_bound = 0.0; // best single-constraint optimum
    PointFunction repaired;
    std::vector<std::pair<Index, Index>> violated;  // up to k worst partners per point
  };

  // Keeps the k largest violations seen for one point.
  struct TopK {
    std::size_t k;
    std::vector<std::pair<double, Index>> items;
    void offer(double v, Index y) {
      if (items.size() == k && v <= items.back().first) return;
      auto it = std::upper_bound(items.begin(), items.end(), v,
                                 [](double a, const std::pair<double, Index>& b) { return a > b.first; });
      items.insert(it, {v, y});
      if (items.size() > k) items.pop_back();
    }
    void flush(Index x, std::vector<std::pair<Index, Index>>& out) {
      for (const auto& [v, y] : items) out.emplace_back(std::min(x, y), std::max(x, y));
      items.clear();
    }
  };

  double seminorm_of(double objective) const {
    if (!(objective > 0.0)) return 0.0;
    return pen_.linear() ? objective : std::pow(objective, 1.0 / pen_.p);
  }

  double pair_cost(Index x, Index y) const {
    const double d = space_.distance(x, y);
    const double df = std::abs(f_[x] - f_[y]);
    if (d == 0.0) {
      if (df > 0.0) throw std::invalid_argument("hajlasz_seminorm: coincident points with different values");
      return 0.0;
    }
    return df / (alpha_ == 1.0 ? d : std::pow(d, alpha_));
  }

  void seed_active_set() {
    const double reach = opt_.neighbour_factor * space_.resolution();
    for (std::size_t x = 0; x < m_; ++x) {
      space_.for_each_in_ball(Index(x), std::nextafter(reach, 2.0 * reach), [&](Index y, double) {
        if (y > Index(x)) {
          const double c = pair_cost(Index(x), y);
          if (c > 0.0) active_.push_back(Pair{Index(x), y, c});
        }
      });
    }
    std::sort(active_.begin(), active_.end(), [](const Pair& a, const Pair& b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
  }

  // Solves g_x(Lx + t) + g_y(Ly + t) = c for the new multiplier value.
  double solve_multiplier(const Pair& pr) const {
    const double lx = lam_[pr.x] - pr.lambda;
    const double ly = lam_[pr.y] - pr.lambda;
    const double wx = w_[pr.x], wy = w_[pr.y];
    auto resid = [&](double t) { return pen_.primal(lx + t, wx) + pen_.primal(ly + t, wy) - pr.c; };
    if (resid(0.0) >= 0.0) return 0.0;
    if (pen_.p == 2.0) {
      // both primal maps are linear on [0, inf) since lx, ly >= 0
      return (pr.c - lx / (2 * wx) - ly / (2 * wy)) / (1 / (2 * wx) + 1 / (2 * wy));
    }
    double lo = 0.0;
    double hi = 1.0;
    while (resid(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (resid(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
  }

  void sweep_active(int sweeps) {
    const double relax = opt_.relaxation;
    // the smoothed linear penalty is badly conditioned once rho is small
    if (pen_.linear()) sweeps *= 10;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      double change = 0.0;
      double scale = 0.0;
      if (pen_.p == 2.0) {
        // g = lam / (2w): the exact step is a single division
        for (auto& pr : active_) {
          const double gap = pr.c - g_[pr.x] - g_[pr.y];
          const double target = pr.lambda + gap / (half_inv_w_[pr.x] + half_inv_w_[pr.y]);
          const double t = std::max(0.0, pr.lambda + relax * (target - pr.lambda));
          const double delta = t - pr.lambda;
          if (delta == 0.0) continue;
          pr.lambda = t;
          lam_[pr.x] += delta;
          lam_[pr.y] += delta;
          g_[pr.x] = std::max(0.0, lam_[pr.x]) * half_inv_w_[pr.x];
          g_[pr.y] = std::max(0.0, lam_[pr.y]) * half_inv_w_[pr.y];
          change = std::max(change, std::abs(delta));
          scale = std::max(scale, t);
        }
        if (change <= opt_.sweep_tol * scale) break;
        continue;
      }
      for (auto& pr : active_) {
        const double target = solve_multiplier(pr);
        const double t = std::max(0.0, pr.lambda + relax * (target - pr.lambda));
        const double delta = t - pr.lambda;
        if (delta == 0.0) continue;
        pr.lambda = t;
        lam_[pr.x] += delta;
        lam_[pr.y] += delta;
        g_[pr.x] = pen_.primal(lam_[pr.x], w_[pr.x]);
        g_[pr.y] = pen_.primal(lam_[pr.y], w_[pr.y]);
        change = std::max(change, std::abs(delta));
        scale = std::max(scale, t);
      }
      if (change <= opt_.sweep_tol * scale) break;
    }
  }

  double dual_bound() const {
    if (pen_.linear()) {
      // scale multipliers into the feasible region sum_y lambda_xy <= w_x
      double acc = 0.0;
      for (const auto& pr : active_) {
        const double s = std::max({1.0, lam_[pr.x] / w_[pr.x], lam_[pr.y] / w_[pr.y]});
        acc += pr.lambda * pr.c / s;
      }
      return acc;
    }
    double acc = 0.0;
    for (const auto& pr : active_) acc += pr.lambda * pr.c;
    for (std::size_t x = 0; x < m_; ++x) acc -= pen_.conjugate(lam_[x], w_[x]);
    return acc;
  }

  // c_xy for every y into row[]; the diagonal gives 0. Coincident points with
  // different values were rejected while seeding the active set.
  // Costs c(x, y) for y >= begin.
  void cost_row(std::size_t x, std::vector<double>& row, std::size_t begin = 0) const {
    const std::size_t dim = space_.dim();
    const double* pts = space_.coords().data();
    const double fx = f_[x];
    const double* px = pts + x * dim;
    // c = |df| / |x - y|^{alpha eps} = |df| * (|x - y|^2)^{-alpha eps / 2}
    const double power = alpha_ * space_.exponent();
    constexpr double kTiny = 1e-300;
    if (power == 1.0 && dim <= 2) {
      const double a = px[0], b = dim == 2 ? px[1] : 0.0;
      if (dim == 1) {
        for (std::size_t y = begin; y < m_; ++y) {
          const double da = pts[y] - a;
          row[y] = std::abs(f_[y] - fx) / std::sqrt(std::max(da * da, kTiny));
        }
        return;
      }
      for (std::size_t y = begin; y < m_; ++y) {
        const double da = pts[2 * y] - a, db = pts[2 * y + 1] - b;
        const double d2 = da * da + db * db;
        row[y] = std::abs(f_[y] - fx) / std::sqrt(std::max(d2, kTiny));
      }
    } else {
      for (std::size_t y = begin; y < m_; ++y) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = pts[y * dim + k] - px[k];
          d2 += diff * diff;
        }
        const double df = std::abs(f_[y] - fx);
        row[y] = d2 > 0.0 ? df * std::pow(d2, -0.5 * power) : 0.0;
      }
    }
  }

  // Violations among pairs closer than `radius`; no bounds.
  // Nearest neighbours of every point up to opt_.local_radius (at most
  // opt_.local_neighbours of them), sorted by distance, with their pair
  // costs; stage_end_ marks the prefix inside each doubling radius.
  void build_neighbourhoods() {
    radii_.clear();
    const double start = opt_.neighbour_factor * space_.resolution();
    const double cap = std::max(start, opt_.local_radius);
    for (double r = start; ; r = std::min(2.0 * r, cap)) {
      radii_.push_back(r);
      if (r >= cap) break;
    }
    const std::size_t stages = radii_.size();
    nb_begin_.assign(m_ + 1, 0);
    stage_end_.assign(m_ * stages, 0);
    nb_index_.clear();
    nb_cost_.clear();
    std::vector<std::pair<double, Index>> near;
    for (std::size_t x = 0; x < m_; ++x) {
      near.clear();
      space_.for_each_in_ball(Index(x), cap, [&](Index y, double d) {
        if (d > 0.0) near.emplace_back(d, y);
      });
      const std::size_t keep = std::min(near.size(), std::size_t(opt_.local_neighbours));
      std::partial_sort(near.begin(), near.begin() + keep, near.end());
      near.resize(keep);
      std::size_t stage = 0;
      for (std::size_t k = 0; k < keep; ++k) {
        while (near[k].first >= radii_[stage]) stage_end_[x * stages + stage++] = nb_index_.size();
        const Index y = near[k].second;
        nb_index_.push_back(y);
        nb_cost_.push_back(float(std::abs(f_[y] - f_[x]) /
                                 (alpha_ == 1.0 ? near[k].first : std::pow(near[k].first, alpha_))));
      }
      while (stage < stages) stage_end_[x * stages + stage++] = nb_index_.size();
      nb_begin_[x + 1] = nb_index_.size();
    }
  }

  // Violations above `tol` among the neighbours of the given stage; no bounds.
  Scan local_scan(std::size_t stage, double tol) const {
    Scan s;
    const std::size_t stages = radii_.size();
    TopK top{std::size_t(opt_.pairs_per_point), {}};
    for (std::size_t x = 0; x < m_; ++x) {
      const double gx = g_[x];
      const std::size_t end = stage_end_[x * stages + stage];
      for (std::size_t k = nb_begin_[x]; k < end; ++k) {
        const double v = double(nb_cost_[k]) - gx - g_[nb_index_[k]];
        if (v > tol) top.offer(v, nb_index_[k]);
      }
      top.flush(Index(x), s.violated);
    }
    return s;
  }

  Scan full_scan() const {
    Scan s;
    s.repaired.resize(m_);
    const double p = pen_.p;
    std::vector<double> row(m_);
    std::vector<double> need(m_, 0.0);
    // Upper triangle only: c is symmetric, so each pair updates both rows.
    for (std::size_t x = 0; x + 1 < m_; ++x) {
      cost_row(x, row, x + 1);
      const double gx = g_[x];
      double nx = need[x];
      double c_max = 0.0;
      for (std::size_t y = x + 1; y < m_; ++y) {
        nx = std::max(nx, row[y] - g_[y]);
        need[y] = std::max(need[y], row[y] - gx);
        c_max = std::max(c_max, row[y]);
      }
      need[x] = nx;
      if (c_max > 0.0) {
        // one-constraint optimum at the costliest pair in this row
        std::size_t y = x + 1;
        while (row[y] != c_max) ++y;
        double single;
        if (pen_.linear()) {
          single = c_max * std::min(w_[x], w_[y]);
        } else {
          single = p == 2.0 ? c_max * c_max / (a_[x] + a_[y])
                            : std::pow(c_max, p) * std::pow(a_[x] + a_[y], 1.0 - p);
        }
        s.single_pair_bound = std::max(s.single_pair_bound, single);
      }
    }
    double worst = 0.0;
    for (std::size_t x = 0; x < m_; ++x) {
      s.repaired[x] = std::max(g_[x], need[x]);
      s.upper += pen_.cost(s.repaired[x], w_[x]);
      worst = std::max(worst, need[x] - g_[x]);
    }
    // Only rows with a violation that matters for the gap are rescanned for
    // candidates; tiny ones are picked up once nothing larger is left.
    const double floor = 1e-9 * c_scale_;
    const double coarse = 0.1 * opt_.tol * c_scale_;
    const double tol = worst > coarse ? coarse : floor;
    TopK top{std::size_t(opt_.pairs_per_point), {}};
    for (std::size_t x = 0; x < m_; ++x) {
      const double viol = need[x] - g_[x];
      if (viol <= tol) continue;
      cost_row(x, row);
      // candidates within a factor 2 of the worst violation
      const double cut = g_[x] + 0.5 * viol;
      for (std::size_t y = 0; y < m_; ++y) {
        if (y != x && row[y] - g_[y] > cut) top.offer(row[y] - g_[y] - g_[x], Index(y));
      }
      top.flush(Index(x), s.violated);
    }
    return s;
  }

  bool add_violated(const Scan& scan) {
    std::vector<Pair> fresh;
    fresh.reserve(scan.violated.size());
    for (const auto& [a, b] : scan.violated) fresh.push_back(Pair{a, b, pair_cost(a, b)});
    std::sort(fresh.begin(), fresh.end(), [](const Pair& a, const Pair& b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    bool added = false;
    std::vector<Pair> merged;
    merged.reserve(active_.size() + fresh.size());
    std::size_t i = 0, j = 0;
    while (i < active_.size() || j < fresh.size()) {
      if (j == fresh.size() ||
          (i < active_.size() && (active_[i].x < fresh[j].x ||
                                  (active_[i].x == fresh[j].x && active_[i].y <= fresh[j].y)))) {
        if (j < fresh.size() && active_[i].x == fresh[j].x && active_[i].y == fresh[j].y) ++j;
        merged.push_back(active_[i++]);
      } else {
        if (merged.empty() || merged.back().x != fresh[j].x || merged.back().y != fresh[j].y) {
          merged.push_back(fresh[j]);
          added = true;
        }
        ++j;
      }
    }
    active_ = std::move(merged);
    return added;
  }

  const MetricSpace& space_;
  const PointFunction& f_;
  double alpha_;
  HajlaszOptions opt_;
  std::size_t m_;
  Penalty pen_;
  std::vector<double> w_;
  std::vector<double> a_;    // w^{-1/(p-1)}, for the single-pair bound
  std::vector<double> half_inv_w_;
  std::vector<double> lam_;  // sum of multipliers touching each point
  std::vector<double> g_;
  std::vector<Pair> active_;
  double c_scale_ = 0.0;  // largest seeded pair cost
  std::vector<double> radii_;
  std::vector<std::size_t> nb_begin_;
  std::vector<std::size_t> stage_end_;
  std::vector<Index> nb_index_;
  std::vector<float> nb_cost_;
};

}  // namespace

HajlaszSolution hajlasz_seminorm(const MetricSpace& space, const PointFunction& f, double alpha,
                                 double p, const HajlaszOptions& options) {
  if (!(alpha > 0.0)) throw std::invalid_argument("hajlasz_seminorm: alpha must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("hajlasz_seminorm: p < 1");
  if (f.size() != space.size()) throw std::invalid_argument("hajlasz_seminorm: size mismatch");
  for (double v : f) {
    if (!std::isfinite(v)) throw std::invalid_argument("hajlasz_seminorm: non-finite value");
  }
  Solver solver(space, f, alpha, p, options);
  return solver.run();
}

}  // namespace hypfill
