#pragma once

#include <cstdint>
#include <vector>

#include "delaylab/core.hpp"

namespace delaylab {

// Fixed-radius index over an SoA cloud. Queries are vectorized linear scans
// (runtime-dispatched kernels); at desk scale and dim <= 3 this beats tree
// traversal and keeps membership bit-identical across kernel variants.
// The view must outlive the index. All balls are closed.
class NeighborIndex {
 public:
  explicit NeighborIndex(SoAView pts) : pts_(pts) {}

  const SoAView& points() const { return pts_; }

  // Ascending indices of points with dist(q, p) <= r.
  std::vector<std::uint32_t> query(const double* q, double r) const;

  // Buffer-reusing variant; idx/d2 are resized to the hit count.
  std::size_t query(const double* q, double r, std::vector<std::uint32_t>& idx,
                    std::vector<double>& d2) const;

  // Weighted cumulative pair counts over an ascending radius ladder:
  // mass[j] = sum of w_i*w_j over unordered pairs with dist <= radii[j],
  // count[j] = number of such pairs. Threaded, deterministic.
  void pair_counts(const std::vector<double>& radii, std::vector<double>& mass,
                   std::vector<double>& count) const;

  // Weighted closed-ball masses around q over the ladder (cumulative).
  void ball_masses(const double* q, const std::vector<double>& radii,
                   std::vector<double>& mass, std::vector<double>& count) const;

  // Distance to the nearest point, optionally ignoring one index (a query
  // point that itself belongs to the cloud).
  double nearest_distance(const double* q, std::int64_t exclude = -1) const;

 private:
  SoAView pts_;
};

}  // namespace delaylab
