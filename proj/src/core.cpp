#include "delaylab/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace delaylab {

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void normalize_weights(PointCloud& cloud) {
  double s = kahan_sum(cloud.weight);
  if (s <= 0.0) throw std::invalid_argument("normalize_weights: nonpositive total weight");
  for (double& w : cloud.weight) w /= s;
}

BoundingBox bounding_box(const SoAView& v) {
  BoundingBox box;
  box.dim = v.dim;
  if (v.n == 0) return box;
  for (int d = 0; d < v.dim; ++d) {
    const double* a = v.axis[static_cast<std::size_t>(d)];
    double lo = a[0], hi = a[0];
    for (std::size_t i = 1; i < v.n; ++i) {
      lo = std::min(lo, a[i]);
      hi = std::max(hi, a[i]);
    }
    box.lo[static_cast<std::size_t>(d)] = lo;
    box.hi[static_cast<std::size_t>(d)] = hi;
  }
  return box;
}

double sample_diameter(const SoAView& v, std::size_t cap) {
  if (v.n < 2) return 0.0;
  std::size_t stride = v.n > cap ? (v.n + cap - 1) / cap : 1;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.n; i += stride) idx.push_back(i);
  Metric m{v.angular_first};
  double best = 0.0;
  double a[3], b[3];
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (int d = 0; d < v.dim; ++d) a[d] = v.axis[static_cast<std::size_t>(d)][idx[p]];
    for (std::size_t q = p + 1; q < idx.size(); ++q) {
      for (int d = 0; d < v.dim; ++d) b[d] = v.axis[static_cast<std::size_t>(d)][idx[q]];
      best = std::max(best, dist2(a, b, v.dim, m));
    }
  }
  return std::sqrt(best);
}

std::size_t thread_count() {
  static std::size_t n = [] {
    if (const char* e = std::getenv("DELAYLAB_THREADS")) {
      long v = std::atol(e);
      if (v >= 1) return static_cast<std::size_t>(std::min(v, 64L));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : std::min(hw, 8u));
  }();
  return n;
}

void parallel_chunks(std::size_t total, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (total == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t n_chunks = (total + grain - 1) / grain;
  const std::size_t nt = std::min(thread_count(), n_chunks);
  if (nt <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c, c * grain, std::min(total, (c + 1) * grain));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      fn(c, c * grain, std::min(total, (c + 1) * grain));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (std::size_t t = 0; t + 1 < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace delaylab
