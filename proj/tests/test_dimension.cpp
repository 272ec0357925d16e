#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaylab/dimension.hpp"
#include "delaylab/rng.hpp"
#include "delaylab/systems.hpp"

using namespace delaylab;

namespace {

PointCloud two_points(double gap) {
  PointCloud c;
  c.dim = 1;
  c.push(make_point(0.0), 0.5);
  c.push(make_point(gap), 0.5);
  return c;
}

PointCloud rotate_xy(const PointCloud& cloud, double angle, double tx, double ty) {
  PointCloud out = cloud;
  double ca = std::cos(angle), sa = std::sin(angle);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double x = cloud.axis[0][i], y = cloud.axis[1][i];
    out.axis[0][i] = ca * x - sa * y + tx;
    out.axis[1][i] = sa * x + ca * y + ty;
  }
  return out;
}

}  // namespace

TEST_CASE("correlation sum: trivial configurations") {
  PointCloud c = two_points(1.0);
  CHECK(correlation_sum(c, 2.0) == doctest::Approx(1.0));
  CHECK(correlation_sum(c, 0.5) == 0.0);

  PointCloud seg = sample_uniform_box(500, 1, 4);
  CHECK(correlation_sum(seg, 10.0) == doctest::Approx(1.0));
  CHECK(correlation_sum(seg, 1e-9) == 0.0);

  // monotone in r
  std::vector<double> radii = {0.01, 0.05, 0.2, 0.5, 1.0};
  auto sums = correlation_sums(seg, radii);
  for (std::size_t i = 1; i < sums.size(); ++i) CHECK(sums[i] >= sums[i - 1]);
}

TEST_CASE("known scaling exponents: segment, square, four-corner") {
  PointCloud seg = sample_uniform_box(100000, 1, 5);
  DimensionEstimate d1 = correlation_dimension(seg);
  CHECK(std::fabs(d1.value - 1.0) <= 0.05);

  PointCloud sq = sample_uniform_box(60000, 2, 6);
  DimensionEstimate d2 = correlation_dimension(sq);
  CHECK(std::fabs(d2.value - 2.0) <= 0.1);
  DimensionEstimate b2 = box_counting_dimension(sq);
  CHECK(std::fabs(b2.value - 2.0) <= 0.1);

  PointCloud fc = sample_self_similar(60000, 1.0 / 3.0, 7);
  const double want = std::log(4.0) / std::log(3.0);
  DimensionEstimate dc = correlation_dimension(fc);
  CHECK(std::fabs(dc.value - want) <= 0.08);
  DimensionEstimate db = box_counting_dimension(fc);
  CHECK(std::fabs(db.value - want) <= 0.1);
}

TEST_CASE("box counting: single point cloud degenerates to zero") {
  PointCloud c;
  c.dim = 2;
  for (int i = 0; i < 50; ++i) c.push(make_point(0.25, 0.75), 1.0 / 50);
  ScaleLadder ladder = geometric_ladder(1e-3, 0.5, 12);
  DimensionEstimate est = box_counting_dimension(c, ladder);
  // every scale holds exactly one occupied cell; the fit window collapses
  CHECK((est.degraded || est.value == doctest::Approx(0.0).epsilon(1e-9)));
}

TEST_CASE("local dimension: segment interior, atom cloud, solenoid point") {
  PointCloud seg = sample_uniform_box(60000, 1, 8);
  ScaleLadder ladder = make_ladder(seg.view());
  DimensionEstimate est = local_dimension(seg, make_point(0.5), ladder);
  CHECK(std::fabs(est.value - 1.0) <= 0.1);

  PointCloud atoms;
  atoms.dim = 2;
  for (int i = 0; i < 1000; ++i) atoms.push(make_point(0.3, 0.4), 1e-3);
  ScaleLadder flat = geometric_ladder(0.01, 1.0, 12);
  DimensionEstimate zero = local_dimension(atoms, make_point(0.3, 0.4), flat);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-12));

  // empty balls at all scales
  CHECK_THROWS_AS(local_dimension(atoms, make_point(100.0, 100.0), flat), EstimateError);
}

TEST_CASE("quantile proxies: exact-dimensional and mixture clouds") {
  PointCloud sq = sample_uniform_box(50000, 2, 9);
  HausdorffProxies p = hausdorff_proxies(sq, 80, 0.05, 0.95, 10);
  CHECK(std::fabs(p.lower - 2.0) <= 0.15);
  CHECK(std::fabs(p.upper - 2.0) <= 0.15);

  // mixture of a segment and a square separates the quantiles
  PointCloud mix;
  mix.dim = 2;
  Rng rng(11);
  for (int i = 0; i < 30000; ++i) mix.push(make_point(rng.uniform(), 2.5), 1.0);
  for (int i = 0; i < 30000; ++i) mix.push(make_point(rng.uniform(), rng.uniform()), 1.0);
  normalize_weights(mix);
  HausdorffProxies pm = hausdorff_proxies(mix, 120, 0.05, 0.95, 12);
  CHECK(std::fabs(pm.lower - 1.0) <= 0.2);
  CHECK(std::fabs(pm.upper - 2.0) <= 0.2);
}

TEST_CASE("pair potential energy: hand value, atoms, stability") {
  PointCloud c = two_points(1.0);
  EnergyResult e = energy(c, 0.5);
  CHECK(e.value == doctest::Approx(0.5));
  CHECK_FALSE(e.diverged);

  // duplicated point is an atom: flagged divergent
  PointCloud dup = two_points(0.0);
  CHECK(energy(dup, 0.5).diverged);

  // uniform segment at s = 1/2: finite, stable under halving
  PointCloud seg = sample_uniform_box(4000, 1, 13);
  EnergyResult es = energy(seg, 0.5);
  CHECK_FALSE(es.diverged);
  // analytic value of the double integral: 2 / ((1-s)(2-s)) = 8/3
  CHECK(es.value == doctest::Approx(8.0 / 3.0).epsilon(0.05));
}

TEST_CASE("local potential stabilizes below the local dimension, grows above") {
  PointCloud seg = sample_uniform_box(40000, 1, 14);
  PointCloud half;
  half.dim = 1;
  for (std::size_t i = 0; i < seg.size(); i += 2) half.push(seg.point(i), 1.0);
  normalize_weights(half);
  PhasePoint x = make_point(0.5);
  // s well below dim 1: halving barely moves the potential
  double full_lo = local_potential(seg, x, 0.6);
  double half_lo = local_potential(half, x, 0.6);
  CHECK(std::fabs(full_lo - half_lo) / full_lo < 0.10);
  // s above dim 1: the potential keeps growing with sample size
  double full_hi = local_potential(seg, x, 1.4);
  double half_hi = local_potential(half, x, 1.4);
  CHECK(full_hi > 1.5 * half_hi);
}

TEST_CASE("correlation dimension never exceeds the lower quantile proxy by much") {
  // lower Hausdorff proxy dominates the correlation exponent
  for (std::uint64_t seed : {21ULL, 22ULL}) {
    PointCloud fc = sample_self_similar(40000, 1.0 / 3.0, seed);
    DimensionEstimate corr = correlation_dimension(fc);
    HausdorffProxies prox = hausdorff_proxies(fc, 80, 0.05, 0.95, seed);
    CHECK(corr.value <= prox.lower + 0.2);
  }
  PointCloud sol = sample_srb(40000, 1000, 23);
  DimensionEstimate corr = correlation_dimension(sol);
  HausdorffProxies prox = hausdorff_proxies(sol, 80, 0.05, 0.95, 24);
  CHECK(corr.value <= prox.lower + 0.2);
}

TEST_CASE("estimates are invariant under rigid motions") {
  PointCloud fc = sample_self_similar(20000, 1.0 / 3.0, 25);
  PointCloud moved = rotate_xy(fc, 0.73, 5.0, -2.0);
  DimensionEstimate a = correlation_dimension(fc);
  DimensionEstimate b = correlation_dimension(moved);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-6));
  HausdorffProxies pa = hausdorff_proxies(fc, 60, 0.05, 0.95, 26);
  HausdorffProxies pb = hausdorff_proxies(moved, 60, 0.05, 0.95, 26);
  CHECK(pa.lower == doctest::Approx(pb.lower).epsilon(1e-6));
  CHECK(pa.upper == doctest::Approx(pb.upper).epsilon(1e-6));
}

TEST_CASE("ladder construction flags degenerate inputs") {
  PointCloud dup = two_points(0.0);
  CHECK_THROWS_AS(make_ladder(dup.view()), EstimateError);
  CHECK_THROWS_AS(geometric_ladder(0.5, 0.1, 12), std::invalid_argument);
}
