#include "delaylab/slices.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "delaylab/kernels.hpp"
#include "delaylab/neighbor.hpp"
#include "delaylab/rng.hpp"

namespace delaylab {

SliceEstimate geometric_slice(const EmbeddedCloud& ec, const double* y, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric_slice: delta must be positive");
  const SoAView u = ec.u_view();
  std::vector<std::uint32_t> idx(u.n);
  std::size_t m = kernels::active_ops().gather_within(u, y, delta * delta, idx.data(), nullptr);
  if (m == 0) throw EmptySlab("geometric_slice: empty slab");
  idx.resize(m);

  SliceEstimate s;
  s.y.assign(y, y + ec.k);
  s.delta = delta;
  s.k = ec.k;
  s.members = idx;
  s.phase.dim = ec.phase.dim;
  s.phase.metric = ec.phase.metric;
  s.phase.seed = ec.seed;
  s.phase.provenance = "slice";
  s.phase.system = ec.phase.system;
  s.phase.reserve(m);
  for (int d = 0; d < ec.k; ++d) s.image[static_cast<std::size_t>(d)].reserve(m);
  for (std::uint32_t i : idx) {
    s.phase.push(ec.phase.point(i), ec.phase.weight[i]);
    for (int d = 0; d < ec.k; ++d)
      s.image[static_cast<std::size_t>(d)].push_back(ec.v[static_cast<std::size_t>(d)][i]);
  }
  s.original_weight = s.phase.weight;
  s.slab_mass = kahan_sum(s.phase.weight);
  for (double& w : s.phase.weight) w /= s.slab_mass;
  return s;
}

DimensionEstimate slice_dimension(const SliceEstimate& slice, const SystemSpec& sys, int iterate,
                                  double floor_factor) {
  if (slice.phase.size() < 200)
    throw EstimateError("slice_dimension: needs >= 200 members");
  PointCloud iterated = slice.phase;
  if (iterate > 0) {
    for (std::size_t i = 0; i < iterated.size(); ++i) {
      PhasePoint p = delaylab::iterate(sys, iterated.point(i), iterate);
      for (int d = 0; d < iterated.dim; ++d) iterated.axis[static_cast<std::size_t>(d)][i] = p[d];
    }
  }
  ScaleLadder ladder = make_ladder(iterated.view());
  double floor = floor_factor * slice.delta;
  if (floor > ladder.r.front() && floor < ladder.r.back() / 2.0)
    ladder = geometric_ladder(floor, ladder.r.back(), static_cast<int>(ladder.r.size()));
  return correlation_dimension(iterated, ladder);
}

double image_slice_spread(const SliceEstimate& slice) {
  // same two-pass computation as sigma, over the stored members with their
  // original weights
  const std::size_t m = slice.phase.size();
  double mass = 0.0;
  std::array<double, 3> mean{0, 0, 0};
  for (std::size_t t = 0; t < m; ++t) {
    const double w = slice.original_weight[t];
    mass += w;
    for (int d = 0; d < slice.k; ++d)
      mean[static_cast<std::size_t>(d)] += w * slice.image[static_cast<std::size_t>(d)][t];
  }
  if (mass <= 0.0) return 0.0;
  for (int d = 0; d < slice.k; ++d) mean[static_cast<std::size_t>(d)] /= mass;
  double dev = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double w = slice.original_weight[t];
    double acc = 0.0;
    for (int d = 0; d < slice.k; ++d) {
      double e = slice.image[static_cast<std::size_t>(d)][t] - mean[static_cast<std::size_t>(d)];
      acc += e * e;
    }
    dev += w * acc;
  }
  return std::sqrt(dev / mass);
}

CollisionReport injectivity_probe(const EmbeddedCloud& ec, double tol_u, double sep_x,
                                  std::size_t max_centers, std::size_t max_pairs) {
  CollisionReport rep;
  const SoAView u = ec.u_view();
  const Metric phase_m = ec.phase.metric;
  const std::size_t n = ec.size();
  const std::size_t stride = n > max_centers ? (n + max_centers - 1) / max_centers : 1;
  std::vector<std::uint32_t> idx(n);
  double mass_probed = 0.0, mass_hit = 0.0;
  double y[3];
  for (std::size_t i = 0; i < n; i += stride) {
    ++rep.centers_probed;
    mass_probed += ec.phase.weight[i];
    for (int d = 0; d < ec.k; ++d) y[d] = ec.u[static_cast<std::size_t>(d)][i];
    std::size_t m = kernels::active_ops().gather_within(u, y, tol_u * tol_u, idx.data(), nullptr);
    bool hit = false;
    PhasePoint xi = ec.phase.point(i);
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t j = idx[t];
      if (j <= i) continue;
      PhasePoint xj = ec.phase.point(j);
      double xd = std::sqrt(dist2(xi, xj, phase_m));
      if (xd >= sep_x) {
        hit = true;
        if (rep.pairs.size() < max_pairs) {
          double ud2 = 0.0;
          for (int d = 0; d < ec.k; ++d) {
            double e = ec.u[static_cast<std::size_t>(d)][j] - y[d];
            ud2 += e * e;
          }
          rep.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                               std::sqrt(ud2), xd});
        }
      }
    }
    if (hit) {
      ++rep.centers_with_collision;
      mass_hit += ec.phase.weight[i];
    }
  }
  rep.mass_fraction = mass_probed > 0.0 ? mass_hit / mass_probed : 0.0;
  return rep;
}

DensityReport pushforward_density_diagnostic(const EmbeddedCloud& ec, int levels, int base_cells,
                                             double min_count) {
  DensityReport rep;
  const SoAView u = ec.u_view();
  const BoundingBox box = bounding_box(u);
  double total_volume = 1.0;
  for (int d = 0; d < ec.k; ++d) {
    double e = box.hi[static_cast<std::size_t>(d)] - box.lo[static_cast<std::size_t>(d)];
    total_volume *= e > 0.0 ? e : 1.0;
  }
  std::unordered_map<std::uint64_t, std::pair<double, double>> cells;  // mass, count
  for (int l = 0; l < levels; ++l) {
    const int per_axis = base_cells << l;
    cells.clear();
    cells.reserve(u.n);
    for (std::size_t i = 0; i < u.n; ++i) {
      std::uint64_t key = 0;
      for (int d = 0; d < ec.k; ++d) {
        double lo = box.lo[static_cast<std::size_t>(d)];
        double e = box.hi[static_cast<std::size_t>(d)] - lo;
        if (e <= 0.0) e = 1.0;
        auto c = static_cast<std::uint64_t>(
            std::min<double>(per_axis - 1, (u.axis[static_cast<std::size_t>(d)][i] - lo) / e *
                                               per_axis));
        key = key * 1048583ULL + c;
      }
      auto& slot = cells[key];
      slot.first += u.weight[i];
      slot.second += 1.0;
    }
    DensityLevel lvl;
    lvl.cell_size = 1.0 / per_axis;
    lvl.occupied = cells.size();
    double max_mass = 0.0;
    for (const auto& [key, mc] : cells) {
      if (mc.first > max_mass) {
        max_mass = mc.first;
        lvl.max_count = mc.second;
      }
    }
    double cell_fraction = std::pow(1.0 / per_axis, ec.k);  // relative cell volume
    lvl.max_ratio = max_mass / cell_fraction;
    lvl.usable = lvl.max_count >= min_count;
    rep.levels.push_back(lvl);
  }
  double log_growth = 0.0;
  int steps = 0;
  for (std::size_t l = 1; l < rep.levels.size(); ++l) {
    if (!rep.levels[l].usable || !rep.levels[l - 1].usable) continue;
    log_growth += std::log(rep.levels[l].max_ratio / rep.levels[l - 1].max_ratio);
    ++steps;
  }
  for (const auto& l : rep.levels) rep.usable_levels += l.usable ? 1 : 0;
  rep.growth = steps > 0 ? std::exp(log_growth / steps) : 1.0;
  rep.diverging = rep.usable_levels >= 3 && rep.growth >= 1.3;
  return rep;
}

LocalDimPairs pushforward_local_dimension(const EmbeddedCloud& ec, int sample_count,
                                          std::uint64_t seed) {
  LocalDimPairs out;
  const PointCloud ucloud = ec.u_cloud();
  ScaleLadder phase_ladder = make_ladder(ec.phase.view());
  ScaleLadder image_ladder = make_ladder(ucloud.view());

  std::vector<double> cum(ec.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < ec.size(); ++i) {
    acc += ec.phase.weight[i];
    cum[i] = acc;
  }
  Rng rng(split_seed(seed, 21));
  for (int s = 0; s < sample_count; ++s) {
    double r = rng.uniform() * acc;
    std::size_t i = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), r) -
                                             cum.begin());
    if (i >= ec.size()) i = ec.size() - 1;
    try {
      DimensionEstimate pd = local_dimension(ec.phase, ec.phase.point(i), phase_ladder);
      DimensionEstimate id = local_dimension(ucloud, ucloud.point(i), image_ladder);
      if (std::isfinite(pd.value) && std::isfinite(id.value)) {
        out.phase_dim.push_back(pd.value);
        out.image_dim.push_back(id.value);
      }
    } catch (const EstimateError&) {
      // center skipped
    }
  }
  if (out.phase_dim.empty()) throw EstimateError("pushforward_local_dimension: no usable centers");
  for (double v : out.phase_dim) out.mean_phase += v;
  for (double v : out.image_dim) out.mean_image += v;
  out.mean_phase /= static_cast<double>(out.phase_dim.size());
  out.mean_image /= static_cast<double>(out.image_dim.size());
  return out;
}

}  // namespace delaylab
