#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaylab/systems.hpp"

using namespace delaylab;

TEST_CASE("solenoid step: fixed points and hand values") {
  // angle 0 is fixed under doubling; z contracts toward e^{i0}/2 * 4/3
  PhasePoint p = solenoid_step(make_point(0.0, 0.0, 0.0), false);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(0.0).epsilon(1e-15));

  // (pi, 1): z/4 + e^{i pi}/2 = 1/4 - 1/2
  p = solenoid_step(make_point(3.14159265358979323846, 1.0, 0.0), false);
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(-0.25).epsilon(1e-12));

  // squared map doubles the angle twice: pi/3 -> 4 pi/3
  p = solenoid_step(make_point(kTwoPi / 6.0, 0.0, 0.0), true);
  CHECK(p[0] == doctest::Approx(2.0 * kTwoPi / 3.0));

  CHECK_THROWS_AS(solenoid_step(make_point(0.0, 2.0, 0.0), false), std::domain_error);
}

TEST_CASE("solenoid fiber contraction is exactly 1/4 at equal angles") {
  PhasePoint a = make_point(1.25, 0.3, -0.2);
  PhasePoint b = make_point(1.25, -0.5, 0.4);
  PhasePoint fa = solenoid_step(a, false);
  PhasePoint fb = solenoid_step(b, false);
  double before = std::hypot(a[1] - b[1], a[2] - b[2]);
  double after = std::hypot(fa[1] - fb[1], fa[2] - fb[2]);
  CHECK(after == doctest::Approx(before / 4.0).epsilon(1e-14));
}

TEST_CASE("srb sampler: determinism, weights, containment") {
  PointCloud a = sample_srb(3000, 50, 99);
  PointCloud b = sample_srb(3000, 50, 99);
  REQUIRE(a.size() == 3000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.axis[0][i] == b.axis[0][i]);
    CHECK(a.axis[1][i] == b.axis[1][i]);
    CHECK(a.axis[2][i] == b.axis[2][i]);
  }
  CHECK(std::fabs(kahan_sum(a.weight) - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.axis[0][i] >= 0.0);
    CHECK(a.axis[0][i] < kTwoPi);
    CHECK(a.axis[1][i] * a.axis[1][i] + a.axis[2][i] * a.axis[2][i] <= 1.0 + 1e-9);
  }
  PointCloud c = sample_srb(3000, 50, 100);
  bool differs = false;
  for (std::size_t i = 0; i < c.size() && !differs; ++i) differs = a.axis[0][i] != c.axis[0][i];
  CHECK(differs);

  // n=3, burn_in=0: three consecutive orbit points of the initial point
  PointCloud tiny = sample_srb(3, 0, 5);
  PhasePoint p0 = tiny.point(0);
  PhasePoint p1 = solenoid_step(p0, true);
  CHECK(tiny.axis[0][1] == doctest::Approx(p1[0]).epsilon(1e-15));
  CHECK(tiny.axis[1][1] == doctest::Approx(p1[1]).epsilon(1e-15));
}

TEST_CASE("four-corner natural projection: fixed points and periodic words") {
  const double lambda = 1.0 / 3.0;
  // all-zeros word sits at the origin
  PhasePoint p = ifs_natural_projection(std::vector<int>(30, 0), lambda);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.0));
  // all-threes word converges to (1,1)
  p = ifs_natural_projection(std::vector<int>(40, 3), lambda);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
  // constant word 1: solve y = y/3 + 2/3 -> (0, 1)
  p = ifs_natural_projection(std::vector<int>(40, 1), lambda);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(ifs_natural_projection({0, 4}, lambda), std::invalid_argument);
  CHECK_THROWS_AS(ifs_natural_projection({}, lambda), std::invalid_argument);
  // truncation error bound lambda^L * diam
  std::vector<int> w(12, 2);
  PhasePoint q12 = ifs_natural_projection(w, lambda);
  w.push_back(1);
  PhasePoint q13 = ifs_natural_projection(w, lambda);
  CHECK(std::sqrt(dist2(q12, q13, Metric{})) <= std::pow(lambda, 12) * std::sqrt(2.0));
}

TEST_CASE("cantor shift inverts the first-level maps") {
  const double lambda = 1.0 / 3.0;
  // fixed point of the all-zeros coding
  PhasePoint z = cantor_shift_step(make_point(0.0, 0.0), lambda);
  CHECK(z[0] == doctest::Approx(0.0));
  CHECK(z[1] == doctest::Approx(0.0));

  // shift of the periodic coding 2323... is 3232...
  std::vector<int> w23, w32;
  for (int i = 0; i < 40; ++i) {
    w23.push_back(i % 2 == 0 ? 2 : 3);
    w32.push_back(i % 2 == 0 ? 3 : 2);
  }
  PhasePoint p23 = ifs_natural_projection(w23, lambda);
  PhasePoint p32 = ifs_natural_projection(w32, lambda);
  PhasePoint shifted = cantor_shift_step(p23, lambda);
  CHECK(shifted[0] == doctest::Approx(p32[0]).epsilon(1e-10));
  CHECK(shifted[1] == doctest::Approx(p32[1]).epsilon(1e-10));

  // T o f_i = identity on every sampled attractor point
  PointCloud cloud = sample_self_similar(200, lambda, 17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    PhasePoint q = cloud.point(i);
    for (int s = 0; s < 4; ++s) {
      double tx = (s & 2) ? 1.0 - lambda : 0.0;
      double ty = (s & 1) ? 1.0 - lambda : 0.0;
      PhasePoint fq = make_point(lambda * q[0] + tx, lambda * q[1] + ty);
      PhasePoint back = cantor_shift_step(fq, lambda);
      CHECK(std::sqrt(dist2(back, q, Metric{})) <= 1e-9);
    }
  }

  // off-attractor point: no first-level cell contains it
  CHECK_THROWS_AS(cantor_shift_step(make_point(0.5, 0.5), lambda), CodingError);
}

TEST_CASE("self-similar sampler: containment, cell masses, determinism") {
  const double lambda = 1.0 / 3.0;
  PointCloud cloud = sample_self_similar(20000, lambda, 3);
  CHECK(std::fabs(kahan_sum(cloud.weight) - 1.0) <= 1e-12);
  int cell_counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double x = cloud.axis[0][i], y = cloud.axis[1][i];
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
    int bx = x > 0.5 ? 1 : 0, by = y > 0.5 ? 1 : 0;
    cell_counts[2 * bx + by]++;
  }
  // uniform coding: each first-level cell holds 1/4 +- 3 sigma (binomial)
  double sigma3 = 3.0 * std::sqrt(0.25 * 0.75 * 20000.0);
  for (int s = 0; s < 4; ++s) CHECK(std::fabs(cell_counts[s] - 5000.0) <= sigma3);

  PointCloud again = sample_self_similar(20000, lambda, 3);
  CHECK(again.axis[0][12345] == cloud.axis[0][12345]);
}

TEST_CASE("tent map: hand values and eventual periodicity") {
  CHECK(tent_step(0.7) == doctest::Approx(0.2));
  double x = 0.7;
  for (int i = 0; i < 3; ++i) x = tent_step(x);
  CHECK(x == doctest::Approx(tent_step(0.7)));  // T^3 = T
  // involution on the image [0, 1/2]
  for (double t : {0.0, 0.1, 0.25, 0.4, 0.5})
    CHECK(tent_step(tent_step(t)) == doctest::Approx(t));

  SystemSpec id = make_identity(2);
  PhasePoint p = make_point(0.3, 0.9);
  PhasePoint q = step(id, p);
  CHECK(q[0] == p[0]);
  CHECK(q[1] == p[1]);
}

TEST_CASE("union chain: windows, conjugacy of corners, injectivity on samples") {
  CHECK_THROWS_AS(make_union_chain(0.3, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(make_union_chain(0.4, 0.2), std::invalid_argument);
  SystemSpec spec = make_union_chain(0.4, 0.05);

  // corner fixed points of the head map to corner fixed points of the tail
  using namespace union_chain_detail;
  for (int s : {0, 7, 5}) {
    double cx = (s & 4) ? 1.0 : 0.0, cy = (s & 2) ? 1.0 : 0.0, cz = (s & 1) ? 1.0 : 0.0;
    PhasePoint head = make_point(kHeadBase + cx, kHeadBase + cy, kHeadBase + cz);
    PhasePoint tail = step(spec, head);
    CHECK(tail[0] == doctest::Approx(kTailBase + cx).epsilon(1e-9));
    CHECK(tail[1] == doctest::Approx(kTailBase + cy).epsilon(1e-9));
    CHECK(tail[2] == doctest::Approx(kTailBase + cz).epsilon(1e-9));
  }

  // chain tail: copies halve toward the fixed origin
  PhasePoint x2 = make_point(2.5, 2.5, 2.5);
  PhasePoint x3 = step(spec, x2);
  CHECK(x3[0] == doctest::Approx((2.5 + 7.5) / 8.0));
  PhasePoint x4 = step(spec, x3);
  CHECK(x4[0] == doctest::Approx(x3[0] / 2.0));
  PhasePoint origin = step(spec, make_point(0.0, 0.0, 0.0));
  CHECK(origin[0] == 0.0);

  // step is injective on samples: well-separated points land in disjoint
  // tail cells (no collisions at tolerance 1e-9)
  PointCloud cloud = sample_union_chain(3000, spec, 5);
  CHECK(std::fabs(kahan_sum(cloud.weight) - 1.0) <= 1e-12);
  std::vector<PhasePoint> images;
  images.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) images.push_back(step(spec, cloud.point(i)));
  for (std::size_t i = 0; i < images.size(); i += 37)
    for (std::size_t j = i + 1; j < images.size(); j += 37) {
      if (dist2(cloud.point(i), cloud.point(j), Metric{}) < 0.1 * 0.1) continue;
      CHECK(std::sqrt(dist2(images[i], images[j], Metric{})) > 1e-9);
    }

  // expected head dimension for these ratios: log 8 / -log 0.4 ~ 2.27 > 2
  CHECK(std::log(8.0) / -std::log(0.4) == doctest::Approx(2.2694).epsilon(1e-3));
  CHECK(std::log(8.0) / -std::log(0.05) < 1.0);
}

TEST_CASE("system descriptors round-trip") {
  for (const auto& desc : {std::string("solenoid"), std::string("tent"),
                           std::string("identity:dim=2"),
                           describe(make_four_corner(1.0 / 3.0)),
                           describe(make_union_chain(0.4, 0.05))}) {
    SystemSpec spec = parse_system(desc);
    CHECK(describe(spec) == desc);
  }
  CHECK_THROWS_AS(parse_system("nonsense"), std::invalid_argument);
}
