#include "delaylab/neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "delaylab/kernels.hpp"

namespace delaylab {

namespace {

std::vector<double> squared_ladder(const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("empty radius ladder");
  if (radii.size() > static_cast<std::size_t>(kernels::kMaxLadder))
    throw std::invalid_argument("radius ladder too long");
  std::vector<double> r2(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0 || (i > 0 && radii[i] <= radii[i - 1]))
      throw std::invalid_argument("radius ladder must be positive and strictly increasing");
    r2[i] = radii[i] * radii[i];
  }
  return r2;
}

}  // namespace

std::vector<std::uint32_t> NeighborIndex::query(const double* q, double r) const {
  std::vector<std::uint32_t> idx;
  std::vector<double> d2;
  query(q, r, idx, d2);
  return idx;
}

std::size_t NeighborIndex::query(const double* q, double r, std::vector<std::uint32_t>& idx,
                                 std::vector<double>& d2) const {
  idx.resize(pts_.n);
  d2.resize(pts_.n);
  std::size_t hits = kernels::active_ops().gather_within(pts_, q, r * r, idx.data(), d2.data());
  idx.resize(hits);
  d2.resize(hits);
  return hits;
}

void NeighborIndex::pair_counts(const std::vector<double>& radii, std::vector<double>& mass,
                                std::vector<double>& count) const {
  const auto r2 = squared_ladder(radii);
  const int nr = static_cast<int>(r2.size());
  const std::size_t n = pts_.n;
  mass.assign(r2.size(), 0.0);
  count.assign(r2.size(), 0.0);
  if (n < 2) return;

  const std::size_t grain = std::max<std::size_t>(32, n / 512);
  const std::size_t n_chunks = (n + grain - 1) / grain;
  std::vector<std::vector<double>> part_mass(n_chunks), part_count(n_chunks);
  parallel_chunks(n, grain, [&](std::size_t c, std::size_t begin, std::size_t end) {
    part_mass[c].assign(r2.size(), 0.0);
    part_count[c].assign(r2.size(), 0.0);
    kernels::active_ops().pair_hist(pts_, begin, end, r2.data(), nr, part_mass[c].data(),
                                    part_count[c].data());
  });
  for (std::size_t c = 0; c < n_chunks; ++c) {
    if (part_mass[c].empty()) continue;
    for (std::size_t b = 0; b < r2.size(); ++b) {
      mass[b] += part_mass[c][b];
      count[b] += part_count[c][b];
    }
  }
}

void NeighborIndex::ball_masses(const double* q, const std::vector<double>& radii,
                                std::vector<double>& mass, std::vector<double>& count) const {
  const auto r2 = squared_ladder(radii);
  mass.assign(r2.size(), 0.0);
  count.assign(r2.size(), 0.0);
  kernels::active_ops().ball_mass(pts_, q, r2.data(), static_cast<int>(r2.size()), mass.data(),
                                  count.data());
}

double NeighborIndex::nearest_distance(const double* q, std::int64_t exclude) const {
  const Metric m{pts_.angular_first};
  double best = std::numeric_limits<double>::infinity();
  double b[3];
  for (std::size_t i = 0; i < pts_.n; ++i) {
    if (static_cast<std::int64_t>(i) == exclude) continue;
    for (int d = 0; d < pts_.dim; ++d) b[d] = pts_.axis[static_cast<std::size_t>(d)][i];
    best = std::min(best, dist2(q, b, pts_.dim, m));
  }
  return std::sqrt(best);
}

}  // namespace delaylab
