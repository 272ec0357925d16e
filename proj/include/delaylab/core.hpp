#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace delaylab {

inline constexpr double kTwoPi = 6.2831853071795864769;

// Point in phase space. Ambient dimension is 1, 2 or 3 depending on the
// system; unused coordinates stay zero.
struct PhasePoint {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 3;

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline PhasePoint make_point(double x) { return PhasePoint{{x, 0.0, 0.0}, 1}; }
inline PhasePoint make_point(double x, double y) { return PhasePoint{{x, y, 0.0}, 2}; }
inline PhasePoint make_point(double x, double y, double z) { return PhasePoint{{x, y, z}, 3}; }

// Phase-space metric tag. Reconstruction space is always Euclidean; solenoid
// clouds measure the first coordinate by angular distance so that neighbor
// queries do not see the 0/2pi cut of the chart.
struct Metric {
  bool angular_first = false;
};

inline double angular_dist(double a, double b) {
  double d = std::fabs(a - b);
  return d > kTwoPi - d ? kTwoPi - d : d;
}

inline double dist2(const double* a, const double* b, int dim, Metric m) {
  double acc = 0.0;
  int i = 0;
  if (m.angular_first) {
    double d = angular_dist(a[0], b[0]);
    acc = d * d;
    i = 1;
  }
  for (; i < dim; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline double dist2(const PhasePoint& a, const PhasePoint& b, Metric m) {
  return dist2(a.c.data(), b.c.data(), a.dim, m);
}

// Non-owning SoA view; the kernel layer works exclusively on this.
struct SoAView {
  std::array<const double*, 3> axis{nullptr, nullptr, nullptr};
  const double* weight = nullptr;
  std::size_t n = 0;
  int dim = 0;
  bool angular_first = false;
};

// Weighted point cloud in SoA layout (one contiguous array per axis).
// Doubles as the sampled-measure type: weights are nonnegative and sum to 1.
struct PointCloud {
  int dim = 0;
  Metric metric;
  std::array<std::vector<double>, 3> axis;
  std::vector<double> weight;
  std::uint64_t seed = 0;
  std::string provenance;  // "orbit-average" | "iid-coding" | ...
  std::string system;      // compact generator descriptor, see io.hpp

  std::size_t size() const { return weight.size(); }
  bool empty() const { return weight.empty(); }

  PhasePoint point(std::size_t i) const {
    PhasePoint p;
    p.dim = dim;
    for (int d = 0; d < dim; ++d) p[d] = axis[static_cast<std::size_t>(d)][i];
    return p;
  }

  void push(const PhasePoint& p, double w) {
    if (dim == 0) dim = p.dim;
    if (p.dim != dim) throw std::invalid_argument("PointCloud::push: dimension mismatch");
    for (int d = 0; d < dim; ++d) axis[static_cast<std::size_t>(d)].push_back(p[d]);
    weight.push_back(w);
  }

  void reserve(std::size_t n) {
    for (int d = 0; d < dim; ++d) axis[static_cast<std::size_t>(d)].reserve(n);
    weight.reserve(n);
  }

  SoAView view() const {
    SoAView v;
    for (int d = 0; d < dim; ++d) v.axis[static_cast<std::size_t>(d)] = axis[static_cast<std::size_t>(d)].data();
    v.weight = weight.data();
    v.n = size();
    v.dim = dim;
    v.angular_first = metric.angular_first;
    return v;
  }
};

// Compensated sum; the weight-normalization invariant (sum = 1 within 1e-12)
// is stated at a tolerance below the naive summation error of 1e5 terms.
double kahan_sum(const std::vector<double>& v);

// Rescale weights so they sum to exactly 1 under compensated summation.
void normalize_weights(PointCloud& cloud);

struct BoundingBox {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
  int dim = 0;
  double diag() const {
    double acc = 0;
    for (int d = 0; d < dim; ++d) {
      double e = hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)];
      acc += e * e;
    }
    return std::sqrt(acc);
  }
};

BoundingBox bounding_box(const SoAView& v);

// Max pairwise distance over a deterministic subsample (exact for n <= cap).
double sample_diameter(const SoAView& v, std::size_t cap = 2000);

// Deterministic chunked parallel-for. Results must be written into per-chunk
// slots and reduced in chunk order by the caller; output is then independent
// of the worker count. Thread count: DELAYLAB_THREADS, else hardware.
void parallel_chunks(std::size_t total, std::size_t grain,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& fn);

std::size_t thread_count();

}  // namespace delaylab
