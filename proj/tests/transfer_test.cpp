#include <doctest.h>

#include <cmath>
#include <random>

#include "hypfill/filling.hpp"
#include "hypfill/metric_space.hpp"
#include "hypfill/seq_norms.hpp"
#include "hypfill/transfer.hpp"

using namespace hypfill;

namespace {

struct Fixture {
  MetricSpace space = make_space("square_grid:24");
  HyperbolicFilling filling = build_filling(space, 4, 2);
  FillingOperators ops{space, filling};

  PointFunction coordinate(int axis) const {
    PointFunction f(space.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = space.point(Index(i))[axis];
    return f;
  }

  VertexFunction random_vertex_function(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    VertexFunction u(filling.vertex_count());
    for (auto& x : u) x = n(rng);
    return u;
  }
};

// (Mu)(B) by the definition: every B' at a level >= level(B) whose 8-fold
// dilate meets 8B, weighted by |B'| / |B|.
VertexFunction naive_maximal(const Fixture& fx, const VertexFunction& u) {
  const auto& f = fx.filling;
  VertexFunction out(f.vertex_count(), 0.0);
  for (VertexId v = 0; v < VertexId(f.vertex_count()); ++v) {
    double acc = 0.0;
    for (VertexId w = 0; w < VertexId(f.vertex_count()); ++w) {
      if (f.level(w) < f.level(v)) continue;
      const bool meets = v == 0 || w == 0 ||
                         center_distance(fx.space, f, v, w) < 8.0 * (f.vertices[v].radius + f.vertices[w].radius);
      if (meets) acc += fx.ops.measure(w) * std::abs(u[w]);
    }
    out[v] = acc / fx.ops.measure(v);
  }
  return out;
}

}  // namespace

TEST_CASE("constants are preserved") {
  const Fixture fx;
  const PointFunction c(fx.space.size(), 2.5);
  const VertexFunction u = fx.ops.poisson_extend(c);
  for (double x : u) CHECK(x == doctest::Approx(2.5));
  for (double x : fx.ops.edge_gradient(u)) CHECK(std::abs(x) < 1e-10);
  for (double x : fx.ops.vertex_gradient(u)) CHECK(std::abs(x) < 1e-10);
  for (int n = 0; n <= fx.filling.max_level; ++n) {
    for (double x : fx.ops.smooth(u, n)) CHECK(x == doctest::Approx(2.5));
  }
  const TraceResult tr = fx.ops.trace(u);
  for (double x : tr.values) CHECK(x == doctest::Approx(2.5));
  CHECK(tr.tail_sum == doctest::Approx(0.0).epsilon(1e-12));
  for (double x : fx.ops.mean_oscillation(c)) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("partitions of unity sum to one and respect the bump support") {
  const Fixture fx;
  for (int n = 0; n <= fx.filling.max_level; ++n) {
    const auto& pou = fx.ops.partition_of_unity(n);
    std::vector<double> total(fx.space.size(), 0.0);
    for (std::size_t r = 0; r < pou.rows.size(); ++r) {
      const auto& b = fx.filling.vertices[pou.first + VertexId(r)];
      for (const auto& [i, psi] : pou.rows[r]) {
        total[i] += psi;
        CHECK(psi > 0.0);
        if (n > 0) CHECK(fx.space.distance(i, b.center) < 0.75 * b.radius);
      }
    }
    for (double t : total) CHECK(t == doctest::Approx(1.0));
  }
}

TEST_CASE("lipschitz bounds dominate the observed difference quotients") {
  const Fixture fx;
  PartitionOfUnity pou = partition_of_unity(fx.space, fx.filling, 3);
  compute_lipschitz_bounds(fx.space, fx.filling, pou);
  for (std::size_t r = 0; r < pou.rows.size(); r += 3) {
    double worst = 0.0;
    for (std::size_t x = 0; x < fx.space.size(); ++x) {
      for (std::size_t y = x + 1; y < fx.space.size(); ++y) {
        worst = std::max(worst, std::abs(pou.value(r, Index(x)) - pou.value(r, Index(y))) /
                                    fx.space.distance(Index(x), Index(y)));
      }
    }
    CHECK(worst <= pou.lip_bounds[r] * (1.0 + 1e-12));
  }
}

TEST_CASE("ball averages and gradients by definition") {
  const Fixture fx;
  const PointFunction f = fx.coordinate(0);
  const VertexFunction u = fx.ops.poisson_extend(f);
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mean += fx.space.weight(Index(i)) * f[i];
  CHECK(u[0] == doctest::Approx(mean));
  const VertexId v = fx.filling.level_begin[3] + 2;
  const auto ball = fx.space.ball(fx.filling.vertices[v].center, fx.filling.vertices[v].radius);
  double avg = 0.0;
  for (Index i : ball.members) avg += f[i];
  CHECK(u[v] == doctest::Approx(avg / double(ball.members.size())));
  const EdgeFunction du = fx.ops.edge_gradient(u);
  for (std::size_t k = 0; k < du.size(); k += 97) {
    CHECK(du[k] == doctest::Approx(u[fx.filling.edges[k].plus] - u[fx.filling.edges[k].minus]));
  }
}

TEST_CASE("linear operators are linear and sublinear ones are sublinear") {
  const Fixture fx;
  const VertexFunction u = fx.random_vertex_function(1), w = fx.random_vertex_function(2);
  VertexFunction sum(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sum[i] = 2.0 * u[i] - 3.0 * w[i];

  const auto du = fx.ops.edge_gradient(u), dw = fx.ops.edge_gradient(w), ds = fx.ops.edge_gradient(sum);
  for (std::size_t k = 0; k < ds.size(); ++k) CHECK(ds[k] == doctest::Approx(2.0 * du[k] - 3.0 * dw[k]));
  const auto tu = fx.ops.trace(u).values, tw = fx.ops.trace(w).values, ts = fx.ops.trace(sum).values;
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ts[i] == doctest::Approx(2.0 * tu[i] - 3.0 * tw[i]));

  VertexFunction plain(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) plain[i] = u[i] + w[i];
  const auto gu = fx.ops.vertex_gradient(u), gw = fx.ops.vertex_gradient(w), gs = fx.ops.vertex_gradient(plain);
  const auto mu = fx.ops.filling_maximal(u), mw = fx.ops.filling_maximal(w), ms = fx.ops.filling_maximal(plain);
  for (std::size_t v = 0; v < u.size(); ++v) {
    CHECK(gs[v] <= gu[v] + gw[v] + 1e-12);
    CHECK(ms[v] <= mu[v] + mw[v] + 1e-12);
  }
}

TEST_CASE("filling maximal operator matches the double loop") {
  const Fixture fx;
  const VertexFunction u = fx.random_vertex_function(4);
  const VertexFunction fast = fx.ops.filling_maximal(u);
  const VertexFunction slow = naive_maximal(fx, u);
  for (std::size_t v = 0; v < u.size(); ++v) CHECK(fast[v] == doctest::Approx(slow[v]).epsilon(1e-12));

  // indicator of one deepest vertex
  VertexFunction e(u.size(), 0.0);
  const VertexId b0 = fx.filling.level_begin[fx.filling.max_level] + 5;
  e[b0] = 1.0;
  const VertexFunction me = fx.ops.filling_maximal(e);
  for (VertexId v = 0; v < VertexId(u.size()); ++v) {
    const bool qualifies = v == 0 || center_distance(fx.space, fx.filling, v, b0) <
                                         8.0 * (fx.filling.vertices[v].radius + fx.filling.vertices[b0].radius);
    CHECK(me[v] == doctest::Approx(qualifies ? fx.ops.measure(b0) / fx.ops.measure(v) : 0.0));
  }
}

TEST_CASE("mean oscillation") {
  const Fixture fx;
  const PointFunction f = fx.coordinate(1);
  const VertexFunction df = fx.ops.mean_oscillation(f);
  const double mean = fx.ops.mean(f);
  double mad = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mad += fx.space.weight(Index(i)) * std::abs(f[i] - mean);
  CHECK(df[0] == doctest::Approx(mad));

  // step function on an interval: the largest values sit on balls straddling the jump
  const MetricSpace line = make_space("interval_grid:256");
  const HyperbolicFilling fl = build_filling(line, 6, 0);
  const FillingOperators ops(line, fl);
  PointFunction step(line.size());
  for (std::size_t i = 0; i < step.size(); ++i) step[i] = line.point(Index(i))[0] < 0.5 ? 0.0 : 1.0;
  const VertexFunction ds = ops.mean_oscillation(step);
  const VertexId first = fl.level_begin[6], last = fl.level_begin[7];
  VertexId best = first;
  for (VertexId v = first; v < last; ++v) best = ds[v] > ds[best] ? v : best;
  const double c = line.point(fl.vertices[best].center)[0];
  CHECK(std::abs(c - 0.5) < 8.0 * fl.vertices[best].radius);
  for (VertexId v = first; v < last; ++v) {
    if (std::abs(line.point(fl.vertices[v].center)[0] - 0.5) >= 8.0 * fl.vertices[v].radius) CHECK(ds[v] == 0.0);
  }
}

TEST_CASE("trace of a smooth extension converges with depth") {
  const MetricSpace s = make_space("square_grid:32");
  PointFunction f(s.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = s.point(Index(i));
    f[i] = std::sin(3.0 * p[0]) + p[1] * p[1];
  }
  double prev = 1e300;
  for (int n = 2; n <= 5; ++n) {
    const HyperbolicFilling fl = build_filling(s, n, 0);
    const FillingOperators ops(s, fl);
    const PointFunction t = ops.trace(ops.poisson_extend(f)).values;
    PointFunction diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = t[i] - f[i];
    const double err = ops.l1_norm(diff);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("deep small vertex functions have small traces") {
  const Fixture fx;
  const int N = fx.filling.max_level;
  for (double eps : {1e-1, 1e-3}) {
    VertexFunction u(fx.filling.vertex_count(), 0.0);
    for (VertexId v = fx.filling.level_begin[N]; v < fx.filling.level_begin[N + 1]; ++v) u[v] = eps;
    const double size = seq::weak_norm(u, 2.0);
    CHECK(fx.ops.l1_norm(fx.ops.trace(u).values) <= size);
    CHECK(fx.ops.l1_norm(fx.ops.trace(u).values) == doctest::Approx(eps));
  }
}
