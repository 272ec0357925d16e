#include "delaylab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "delaylab/rng.hpp"

namespace delaylab {

namespace {

std::vector<std::size_t> stride_sample(std::size_t n, std::size_t cap) {
  std::size_t stride = n > cap ? (n + cap - 1) / cap : 1;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  return idx;
}

double kth_neighbor_radius(const SoAView& pts, std::size_t center, int k) {
  const Metric m{pts.angular_first};
  double q[3], b[3];
  for (int d = 0; d < pts.dim; ++d) q[d] = pts.axis[static_cast<std::size_t>(d)][center];
  std::vector<double> d2(pts.n);
  for (std::size_t i = 0; i < pts.n; ++i) {
    for (int d = 0; d < pts.dim; ++d) b[d] = pts.axis[static_cast<std::size_t>(d)][i];
    d2[i] = dist2(q, b, pts.dim, m);
  }
  std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), d2.size() - 1);
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(kk), d2.end());
  return std::sqrt(d2[kk]);
}

struct FitInput {
  std::vector<double> lx, ly;
  double r_lo = 0.0, r_hi = 0.0;
};

// Collect interior usable scales; widen to the full ladder when the interior
// gives fewer than 4 points (degraded).
template <typename Usable>
FitInput select_scales(const ScaleLadder& ladder, Usable usable, bool& degraded) {
  FitInput in;
  auto collect = [&](int lo, int hi) {
    in.lx.clear();
    in.ly.clear();
    for (int i = lo; i < hi; ++i) {
      auto val = usable(i);
      if (!val.has_value()) continue;
      if (in.lx.empty()) in.r_lo = ladder.r[static_cast<std::size_t>(i)];
      in.r_hi = ladder.r[static_cast<std::size_t>(i)];
      in.lx.push_back(std::log(ladder.r[static_cast<std::size_t>(i)]));
      in.ly.push_back(std::log(*val));
    }
  };
  collect(ladder.fit_lo, ladder.fit_hi);
  degraded = false;
  if (in.lx.size() < 4) {
    degraded = true;
    collect(0, static_cast<int>(ladder.r.size()));
  }
  return in;
}

DimensionEstimate fit_estimate(const FitInput& in, bool degraded, const char* method) {
  DimensionEstimate est;
  est.method = method;
  est.degraded = degraded;
  est.n_scales = static_cast<int>(in.lx.size());
  est.r_min = in.r_lo;
  est.r_max = in.r_hi;
  if (in.lx.size() >= 2) {
    SlopeFit fit = fit_line(in.lx, in.ly);
    est.value = fit.slope;
    est.residual = fit.residual;
  }
  return est;
}

}  // namespace

ScaleLadder geometric_ladder(double r_min, double r_max, int n_scales) {
  if (!(r_min > 0.0 && r_max > r_min)) throw std::invalid_argument("geometric_ladder: bad range");
  if (n_scales < 2) throw std::invalid_argument("geometric_ladder: need >= 2 scales");
  ScaleLadder l;
  l.r.resize(static_cast<std::size_t>(n_scales));
  double step = std::log(r_max / r_min) / (n_scales - 1);
  for (int i = 0; i < n_scales; ++i) l.r[static_cast<std::size_t>(i)] = r_min * std::exp(step * i);
  l.r.back() = r_max;
  l.fit_lo = n_scales >= 12 ? 2 : 0;
  l.fit_hi = n_scales >= 12 ? n_scales - 2 : n_scales;
  return l;
}

ScaleLadder make_ladder(const SoAView& pts, int n_scales, double top_frac, int min_ball) {
  if (pts.n < 2) throw EstimateError("make_ladder: cloud too small");
  double diam = sample_diameter(pts);
  if (!(diam > 0.0)) throw EstimateError("make_ladder: degenerate cloud");
  double r_max = top_frac * diam;
  auto centers = stride_sample(pts.n, 256);
  std::vector<double> radii;
  radii.reserve(centers.size());
  for (std::size_t c : centers) radii.push_back(kth_neighbor_radius(pts, c, min_ball));
  double r_min = quantile(radii, 0.5);
  r_min = std::min(std::max(r_min, r_max * 1e-4), r_max / 8.0);
  return geometric_ladder(r_min, r_max, n_scales);
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  SlopeFit f;
  f.n_used = static_cast<int>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / static_cast<double>(x.size()));
  return f;
}

std::vector<double> correlation_sums(const PointCloud& cloud, const std::vector<double>& radii,
                                     std::vector<double>* counts) {
  NeighborIndex index(cloud.view());
  std::vector<double> mass, count;
  index.pair_counts(radii, mass, count);
  double w2 = 0.0;
  for (double w : cloud.weight) w2 += w * w;
  double denom = 1.0 - w2;
  if (denom <= 0.0) denom = 1.0;  // single-atom cloud: no distinct pairs
  std::vector<double> c(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) c[i] = std::min(1.0, 2.0 * mass[i] / denom);
  if (counts != nullptr) *counts = count;
  return c;
}

double correlation_sum(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("correlation_sum: r must be positive");
  return correlation_sums(cloud, {r}).front();
}

DimensionEstimate correlation_dimension(const PointCloud& cloud) {
  return correlation_dimension(cloud, make_ladder(cloud.view()));
}

DimensionEstimate correlation_dimension(const PointCloud& cloud, const ScaleLadder& ladder) {
  std::vector<double> counts;
  std::vector<double> c = correlation_sums(cloud, ladder.r, &counts);
  bool degraded = false;
  auto in = select_scales(ladder, [&](int i) -> std::optional<double> {
    if (counts[static_cast<std::size_t>(i)] < 10.0 || c[static_cast<std::size_t>(i)] <= 0.0)
      return std::nullopt;
    return c[static_cast<std::size_t>(i)];
  }, degraded);
  return fit_estimate(in, degraded, "correlation");
}

DimensionEstimate box_counting_dimension(const PointCloud& cloud) {
  return box_counting_dimension(cloud, make_ladder(cloud.view()));
}

DimensionEstimate box_counting_dimension(const PointCloud& cloud, const ScaleLadder& ladder) {
  const SoAView pts = cloud.view();
  const BoundingBox box = bounding_box(pts);
  std::vector<double> n_cells(ladder.r.size(), 0.0);
  std::unordered_set<std::uint64_t> cells;
  cells.reserve(pts.n);
  for (std::size_t s = 0; s < ladder.r.size(); ++s) {
    const double delta = ladder.r[s];
    cells.clear();
    for (std::size_t i = 0; i < pts.n; ++i) {
      std::uint64_t key = 0;
      for (int d = 0; d < pts.dim; ++d) {
        double off = pts.axis[static_cast<std::size_t>(d)][i] - box.lo[static_cast<std::size_t>(d)];
        auto cell = static_cast<std::uint64_t>(off / delta);
        key = key * 2097169ULL + cell;  // mixing by a prime > 2^21
      }
      cells.insert(key);
    }
    n_cells[s] = static_cast<double>(cells.size());
  }
  const double n = static_cast<double>(pts.n);
  bool degraded = false;
  auto in = select_scales(ladder, [&](int i) -> std::optional<double> {
    double nc = n_cells[static_cast<std::size_t>(i)];
    if (nc < 8.0 || nc > n / 4.0) return std::nullopt;
    return nc;
  }, degraded);
  DimensionEstimate est = fit_estimate(in, degraded, "box");
  est.value = -est.value;  // N(delta) ~ delta^{-dim}
  return est;
}

DimensionEstimate local_dimension(const PointCloud& cloud, const PhasePoint& x,
                                  const ScaleLadder& ladder) {
  NeighborIndex index(cloud.view());
  std::vector<double> mass, count;
  double q[3] = {x[0], x[1], x[2]};
  index.ball_masses(q, ladder.r, mass, count);
  if (mass.back() <= 0.0) throw EstimateError("local_dimension: empty balls at all scales");
  bool degraded = false;
  auto in = select_scales(ladder, [&](int i) -> std::optional<double> {
    if (count[static_cast<std::size_t>(i)] < 10.0 || mass[static_cast<std::size_t>(i)] <= 0.0)
      return std::nullopt;
    return mass[static_cast<std::size_t>(i)];
  }, degraded);
  return fit_estimate(in, degraded, "local");
}

HausdorffProxies hausdorff_proxies(const PointCloud& cloud, int sample_count, double q_lo,
                                   double q_hi, std::uint64_t seed) {
  if (sample_count < 50) throw std::invalid_argument("hausdorff_proxies: sample_count must be >= 50");
  ScaleLadder ladder = make_ladder(cloud.view());
  std::vector<double> cum(cloud.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    acc += cloud.weight[i];
    cum[i] = acc;
  }
  Rng rng(split_seed(seed, 12));
  HausdorffProxies out;
  for (int s = 0; s < sample_count; ++s) {
    double u = rng.uniform() * acc;
    std::size_t i = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (i >= cloud.size()) i = cloud.size() - 1;
    try {
      DimensionEstimate est = local_dimension(cloud, cloud.point(i), ladder);
      if (std::isfinite(est.value)) out.samples.push_back(est.value);
    } catch (const EstimateError&) {
      // skipped center; tallied implicitly by the sample count
    }
  }
  if (out.samples.size() < std::max<std::size_t>(10, static_cast<std::size_t>(sample_count) / 4))
    throw EstimateError("hausdorff_proxies: too few usable centers");
  out.lower = quantile(out.samples, q_lo);
  out.upper = quantile(out.samples, q_hi);
  return out;
}

namespace {

double energy_sum(const SoAView& pts, const std::vector<std::size_t>& idx,
                  const std::vector<double>& w, double s, bool& atom) {
  const Metric m{pts.angular_first};
  double a[3], b[3];
  double acc = 0.0;
  atom = false;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (int d = 0; d < pts.dim; ++d) a[d] = pts.axis[static_cast<std::size_t>(d)][idx[p]];
    for (std::size_t q = p + 1; q < idx.size(); ++q) {
      for (int d = 0; d < pts.dim; ++d) b[d] = pts.axis[static_cast<std::size_t>(d)][idx[q]];
      double d2 = dist2(a, b, pts.dim, m);
      if (d2 == 0.0) {
        atom = true;
        return std::numeric_limits<double>::infinity();
      }
      acc += 2.0 * w[p] * w[q] * std::pow(d2, -0.5 * s);
    }
  }
  return acc;
}

}  // namespace

EnergyResult energy(const PointCloud& cloud, double s, std::size_t max_points) {
  if (!(s > 0.0)) throw std::invalid_argument("energy: s must be positive");
  const SoAView pts = cloud.view();
  auto idx = stride_sample(pts.n, max_points);
  std::vector<double> w(idx.size());
  double tot = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) tot += cloud.weight[idx[p]];
  for (std::size_t p = 0; p < idx.size(); ++p) w[p] = cloud.weight[idx[p]] / tot;

  EnergyResult res;
  bool atom = false;
  res.value = energy_sum(pts, idx, w, s, atom);
  if (atom) {
    res.diverged = true;
    return res;
  }
  if (idx.size() < 64) return res;  // halves carry no signal on tiny clouds
  // stability under halving: a divergent sum keeps growing with sample size
  std::vector<std::size_t> even, odd;
  std::vector<double> we, wo;
  double te = 0, to = 0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (p % 2 == 0) {
      even.push_back(idx[p]);
      te += cloud.weight[idx[p]];
    } else {
      odd.push_back(idx[p]);
      to += cloud.weight[idx[p]];
    }
  }
  for (std::size_t i : even) we.push_back(cloud.weight[i] / te);
  for (std::size_t i : odd) wo.push_back(cloud.weight[i] / to);
  bool a1 = false, a2 = false;
  double e1 = energy_sum(pts, even, we, s, a1);
  double e2 = energy_sum(pts, odd, wo, s, a2);
  if (a1 || a2) {
    res.diverged = true;
    return res;
  }
  double half = 0.5 * (e1 + e2);
  res.diverged = std::fabs(res.value - half) > 0.10 * std::max(res.value, 1e-300);
  return res;
}

double local_potential(const PointCloud& cloud, const PhasePoint& x, double s) {
  const SoAView pts = cloud.view();
  const Metric m{pts.angular_first};
  double q[3] = {x[0], x[1], x[2]};
  double b[3];
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.n; ++i) {
    for (int d = 0; d < pts.dim; ++d) b[d] = pts.axis[static_cast<std::size_t>(d)][i];
    double d2 = dist2(q, b, pts.dim, m);
    if (d2 == 0.0) continue;
    acc += pts.weight[i] * std::pow(d2, -0.5 * s);
  }
  return acc;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto i = static_cast<std::size_t>(std::llround(pos));
  if (i >= values.size()) i = values.size() - 1;
  return values[i];
}

}  // namespace delaylab
