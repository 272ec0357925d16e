#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaylab/neighbor.hpp"
#include "delaylab/rng.hpp"
#include "delaylab/systems.hpp"

using namespace delaylab;

namespace {

PointCloud mixed_cloud(std::size_t n, int dim, bool angular, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud c;
  c.dim = dim;
  c.metric = Metric{angular};
  PhasePoint p;
  p.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d)
      p[d] = (d == 0 && angular) ? rng.uniform(0.0, kTwoPi) : rng.uniform(-1.0, 1.0);
    c.push(p, rng.uniform(0.2, 1.8));
  }
  normalize_weights(c);
  return c;
}

}  // namespace

TEST_CASE("fixed-radius queries match brute force exactly on small clouds") {
  for (int dim : {1, 2, 3}) {
    for (bool angular : {false, true}) {
      PointCloud cloud = mixed_cloud(2000, dim, angular, 11 + static_cast<std::uint64_t>(dim));
      NeighborIndex index(cloud.view());
      const Metric m{angular};
      Rng rng(5);
      std::vector<double> radii = {0.05, 0.13, 0.31, 0.72, 1.5};
      for (int t = 0; t < 25; ++t) {
        std::size_t qi = rng.below(cloud.size());
        PhasePoint q = cloud.point(qi);
        double r = radii[static_cast<std::size_t>(t) % radii.size()];
        auto got = index.query(q.c.data(), r);
        std::vector<std::uint32_t> want;
        for (std::size_t j = 0; j < cloud.size(); ++j)
          if (dist2(q, cloud.point(j), m) <= r * r) want.push_back(static_cast<std::uint32_t>(j));
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == want[j]);
      }
    }
  }
}

TEST_CASE("cumulative pair counts match brute force") {
  PointCloud cloud = mixed_cloud(700, 2, false, 29);
  NeighborIndex index(cloud.view());
  std::vector<double> radii = {0.1, 0.25, 0.6, 1.4};
  std::vector<double> mass, count;
  index.pair_counts(radii, mass, count);
  for (std::size_t b = 0; b < radii.size(); ++b) {
    double want_mass = 0.0, want_count = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t j = i + 1; j < cloud.size(); ++j)
        if (dist2(cloud.point(i), cloud.point(j), Metric{}) <= radii[b] * radii[b]) {
          want_mass += cloud.weight[i] * cloud.weight[j];
          want_count += 1.0;
        }
    CHECK(count[b] == want_count);
    CHECK(mass[b] == doctest::Approx(want_mass).epsilon(1e-12));
  }
}

TEST_CASE("ball masses are cumulative and closed") {
  // two equal-weight points at distance 1: the closed ball at exactly r = 1
  // includes the boundary point
  PointCloud c;
  c.dim = 1;
  c.push(make_point(0.0), 0.5);
  c.push(make_point(1.0), 0.5);
  NeighborIndex index(c.view());
  std::vector<double> mass, count;
  double q[1] = {0.0};
  index.ball_masses(q, {0.5, 1.0}, mass, count);
  CHECK(mass[0] == doctest::Approx(0.5));
  CHECK(mass[1] == doctest::Approx(1.0));
  CHECK(count[1] == 2.0);
}

TEST_CASE("nearest distance excludes the requested index") {
  PointCloud cloud = mixed_cloud(50, 2, false, 3);
  NeighborIndex index(cloud.view());
  PhasePoint q = cloud.point(7);
  CHECK(index.nearest_distance(q.c.data()) == 0.0);
  double r = index.nearest_distance(q.c.data(), 7);
  CHECK(r > 0.0);
  double best = 1e9;
  for (std::size_t j = 0; j < cloud.size(); ++j)
    if (j != 7) best = std::min(best, std::sqrt(dist2(q, cloud.point(j), Metric{})));
  CHECK(r == doctest::Approx(best));
}

TEST_CASE("angular metric joins points across the cut") {
  PointCloud c;
  c.dim = 3;
  c.metric = Metric{true};
  c.push(make_point(0.05, 0.0, 0.0), 0.5);
  c.push(make_point(kTwoPi - 0.05, 0.0, 0.0), 0.5);
  NeighborIndex index(c.view());
  double q[3] = {0.0, 0.0, 0.0};
  auto hits = index.query(q, 0.2);
  CHECK(hits.size() == 2);
}
