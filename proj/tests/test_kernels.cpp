#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaylab/core.hpp"
#include "delaylab/kernels.hpp"
#include "delaylab/rng.hpp"

using namespace delaylab;

namespace {

PointCloud random_cloud(std::size_t n, int dim, bool angular, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud c;
  c.dim = dim;
  c.metric = Metric{angular};
  PhasePoint p;
  p.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d)
      p[d] = (d == 0 && angular) ? rng.uniform(0.0, kTwoPi) : rng.uniform(-1.0, 1.0);
    c.push(p, rng.uniform(0.5, 1.5));
  }
  normalize_weights(c);
  return c;
}

std::vector<double> ladder_for(const PointCloud& c) {
  double diam = sample_diameter(c.view());
  std::vector<double> r;
  for (int i = 0; i < 8; ++i) r.push_back(diam * 0.02 * std::pow(1.6, i));
  return r;
}

}  // namespace

TEST_CASE("scalar and simd kernels agree") {
  const auto& scalar = kernels::scalar_ops();
  const auto* simd = kernels::avx2_ops();
  if (simd == nullptr) {
    MESSAGE("no simd variant on this host; scalar-only");
    return;
  }

  for (int dim = 1; dim <= 3; ++dim) {
    for (bool angular : {false, true}) {
      PointCloud cloud = random_cloud(1537, dim, angular, 42 + static_cast<std::uint64_t>(dim));
      SoAView v = cloud.view();
      auto radii = ladder_for(cloud);
      std::vector<double> r2(radii.size());
      for (std::size_t i = 0; i < radii.size(); ++i) r2[i] = radii[i] * radii[i];

      // gather: identical membership, indices and squared distances
      Rng rng(7);
      for (int rep = 0; rep < 20; ++rep) {
        double q[3] = {0, 0, 0};
        for (int d = 0; d < dim; ++d)
          q[d] = (d == 0 && angular) ? rng.uniform(0.0, kTwoPi) : rng.uniform(-1.0, 1.0);
        double rr = radii[static_cast<std::size_t>(rep) % radii.size()];
        std::vector<std::uint32_t> ia(v.n), ib(v.n);
        std::vector<double> da(v.n), db(v.n);
        std::size_t na = scalar.gather_within(v, q, rr * rr, ia.data(), da.data());
        std::size_t nb = simd->gather_within(v, q, rr * rr, ib.data(), db.data());
        REQUIRE(na == nb);
        for (std::size_t t = 0; t < na; ++t) {
          CHECK(ia[t] == ib[t]);
          CHECK(da[t] == db[t]);  // bitwise: same mul/add sequence
        }
      }

      // pair histogram: identical raw counts, weights to 1e-12
      std::vector<double> acc_a(r2.size(), 0.0), cnt_a(r2.size(), 0.0);
      std::vector<double> acc_b(r2.size(), 0.0), cnt_b(r2.size(), 0.0);
      scalar.pair_hist(v, 0, v.n, r2.data(), static_cast<int>(r2.size()), acc_a.data(), cnt_a.data());
      simd->pair_hist(v, 0, v.n, r2.data(), static_cast<int>(r2.size()), acc_b.data(), cnt_b.data());
      for (std::size_t b = 0; b < r2.size(); ++b) {
        CHECK(cnt_a[b] == cnt_b[b]);  // exact: sums of 1.0
        CHECK(acc_a[b] == doctest::Approx(acc_b[b]).epsilon(1e-12));
      }

      // ball masses
      double q[3] = {0, 0, 0};
      if (angular) q[0] = 3.0;
      std::vector<double> ma(r2.size(), 0.0), ca(r2.size(), 0.0);
      std::vector<double> mb(r2.size(), 0.0), cb(r2.size(), 0.0);
      scalar.ball_mass(v, q, r2.data(), static_cast<int>(r2.size()), ma.data(), ca.data());
      simd->ball_mass(v, q, r2.data(), static_cast<int>(r2.size()), mb.data(), cb.data());
      for (std::size_t b = 0; b < r2.size(); ++b) {
        CHECK(ca[b] == cb[b]);
        CHECK(ma[b] == doctest::Approx(mb[b]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("angular distance wraps the cut") {
  CHECK(angular_dist(0.1, kTwoPi - 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(angular_dist(1.0, 2.0) == doctest::Approx(1.0));
  // wrap distance never exceeds pi
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.uniform(0.0, kTwoPi), b = rng.uniform(0.0, kTwoPi);
    CHECK(angular_dist(a, b) <= kTwoPi / 2 + 1e-15);
  }
}

TEST_CASE("active kernel honors the environment override") {
  // build-time smoke check only; the dispatch is cached per process
  const auto& ops = kernels::active_ops();
  CHECK((std::string(ops.name) == "scalar" || std::string(ops.name) == "avx2"));
}
