#include "delaylab/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delaylab/kernels.hpp"
#include "delaylab/neighbor.hpp"
#include "delaylab/rng.hpp"

namespace delaylab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SoAView recon_view(const std::array<std::vector<double>, 3>& axes, const std::vector<double>& w,
                   int k) {
  SoAView v;
  for (int d = 0; d < k; ++d) v.axis[static_cast<std::size_t>(d)] = axes[static_cast<std::size_t>(d)].data();
  v.weight = w.data();
  v.n = w.size();
  v.dim = k;
  v.angular_first = false;
  return v;
}

// Two-pass ball moments in ascending member order: mean first, then RMS
// deviation. This is the definitional route; the parallel-axis identity is
// reserved for tests.
struct BallMoments {
  double mass = 0.0;
  std::size_t count = 0;
  std::array<double, 3> mean{0, 0, 0};
  double rms = 0.0;
};

BallMoments moments_over(const EmbeddedCloud& ec, const std::uint32_t* idx, std::size_t m) {
  BallMoments out;
  const int k = ec.k;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t i = idx[t];
    const double w = ec.phase.weight[i];
    out.mass += w;
    for (int d = 0; d < k; ++d)
      out.mean[static_cast<std::size_t>(d)] += w * ec.v[static_cast<std::size_t>(d)][i];
  }
  out.count = m;
  if (out.mass <= 0.0) return out;
  for (int d = 0; d < k; ++d) out.mean[static_cast<std::size_t>(d)] /= out.mass;
  double dev = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t i = idx[t];
    const double w = ec.phase.weight[i];
    double acc = 0.0;
    for (int d = 0; d < k; ++d) {
      double e = ec.v[static_cast<std::size_t>(d)][i] - out.mean[static_cast<std::size_t>(d)];
      acc += e * e;
    }
    dev += w * acc;
  }
  out.rms = std::sqrt(dev / out.mass);
  return out;
}

BallMoments ball_moments(const EmbeddedCloud& ec, const double* y, double eps) {
  const SoAView u = ec.u_view();
  std::vector<std::uint32_t> idx(u.n);
  std::size_t m = kernels::active_ops().gather_within(u, y, eps * eps, idx.data(), nullptr);
  if (m == 0) {
    NeighborIndex index(u);
    throw EmptyBall(index.nearest_distance(y));
  }
  return moments_over(ec, idx.data(), m);
}

}  // namespace

SoAView EmbeddedCloud::u_view() const { return recon_view(u, phase.weight, k); }
SoAView EmbeddedCloud::v_view() const { return recon_view(v, phase.weight, k); }

PointCloud EmbeddedCloud::u_cloud() const {
  PointCloud c;
  c.dim = k;
  c.metric = Metric{false};
  for (int d = 0; d < k; ++d) c.axis[static_cast<std::size_t>(d)] = u[static_cast<std::size_t>(d)];
  c.weight = phase.weight;
  c.seed = seed;
  c.provenance = "reconstruction";
  c.system = system.kind == SystemKind::Identity ? phase.system : describe(system);
  return c;
}

EmbeddedCloud build_embedded(const PointCloud& cloud, const SystemSpec& sys, const Observable& h,
                             int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("build_embedded: k must be 1..3");
  EmbeddedCloud ec;
  ec.k = k;
  ec.system = sys;
  ec.observable_base = h.base_name();
  ec.seed = cloud.seed;
  ec.phase = cloud;
  const std::size_t n = cloud.size();
  for (int d = 0; d < k; ++d) {
    ec.u[static_cast<std::size_t>(d)].resize(n);
    ec.v[static_cast<std::size_t>(d)].resize(n);
  }
  const std::size_t grain = std::max<std::size_t>(256, n / 256);
  parallel_chunks(n, grain, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> local(static_cast<std::size_t>(k) + 1);
    for (std::size_t i = begin; i < end; ++i) {
      PhasePoint p = cloud.point(i);
      for (int s = 0; s <= k; ++s) {
        local[static_cast<std::size_t>(s)] = h(p);
        if (s < k) p = step(sys, p);
      }
      for (int d = 0; d < k; ++d) {
        ec.u[static_cast<std::size_t>(d)][i] = local[static_cast<std::size_t>(d)];
        ec.v[static_cast<std::size_t>(d)][i] = local[static_cast<std::size_t>(d + 1)];
      }
    }
  });
  return ec;
}

std::vector<double> chi(const EmbeddedCloud& ec, const double* y, double eps) {
  BallMoments m = ball_moments(ec, y, eps);
  return std::vector<double>(m.mean.begin(), m.mean.begin() + ec.k);
}

double sigma(const EmbeddedCloud& ec, const double* y, double eps) {
  return ball_moments(ec, y, eps).rms;
}

ExceedancePoint exceedance(const EmbeddedCloud& ec, double delta, double eps) {
  if (!(delta > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("exceedance: delta and eps must be positive");
  ExceedancePoint out;
  const SoAView u = ec.u_view();
  std::vector<std::uint32_t> idx(u.n);
  double y[3];
  for (std::size_t i = 0; i < ec.size(); ++i) {
    for (int d = 0; d < ec.k; ++d) y[d] = ec.u[static_cast<std::size_t>(d)][i];
    std::size_t m = kernels::active_ops().gather_within(u, y, eps * eps, idx.data(), nullptr);
    if (m == 0) {
      out.empty_fraction += ec.phase.weight[i];
      continue;
    }
    if (moments_over(ec, idx.data(), m).rms > delta) out.fraction += ec.phase.weight[i];
  }
  return out;
}

SigmaScan scan_sigmas(const EmbeddedCloud& ec, const std::vector<double>& eps_ladder,
                      std::size_t n_queries, std::uint64_t seed) {
  if (eps_ladder.size() < 2) throw std::invalid_argument("scan_sigmas: ladder too short");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (eps_ladder[i] <= eps_ladder[i - 1])
      throw std::invalid_argument("scan_sigmas: ladder must be strictly increasing");

  const std::size_t n = ec.size();
  SigmaScan scan;
  scan.eps = eps_ladder;
  if (n_queries >= n) {
    scan.queries.resize(n);
    for (std::size_t i = 0; i < n; ++i) scan.queries[i] = static_cast<std::uint32_t>(i);
  } else {
    // weight-proportional draw so unweighted query averages estimate mu
    std::vector<double> cum(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += ec.phase.weight[i];
      cum[i] = acc;
    }
    Rng rng(split_seed(seed, 20));
    scan.queries.resize(n_queries);
    for (auto& q : scan.queries) {
      double u = rng.uniform() * acc;
      std::size_t i = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) -
                                               cum.begin());
      q = static_cast<std::uint32_t>(std::min(i, n - 1));
    }
  }

  const int ne = scan.n_eps();
  scan.sigma.assign(scan.queries.size() * static_cast<std::size_t>(ne), kNaN);
  std::vector<double> eps2(eps_ladder.size());
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) eps2[e] = eps_ladder[e] * eps_ladder[e];
  const double top2 = eps2.back();
  const SoAView u = ec.u_view();
  const int k = ec.k;

  parallel_chunks(scan.queries.size(), 16, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> idx(n);
    std::vector<double> d2(n);
    std::vector<double> mass(static_cast<std::size_t>(ne));
    std::vector<double> meanv(static_cast<std::size_t>(ne) * 3);
    std::vector<double> dev(static_cast<std::size_t>(ne));
    std::vector<int> bin(n);
    for (std::size_t qi = begin; qi < end; ++qi) {
      double y[3];
      for (int d = 0; d < k; ++d)
        y[d] = ec.u[static_cast<std::size_t>(d)][scan.queries[qi]];
      std::size_t m = kernels::active_ops().gather_within(u, y, top2, idx.data(), d2.data());
      if (m == 0) continue;  // NaN row = empty ball
      std::fill(mass.begin(), mass.end(), 0.0);
      std::fill(meanv.begin(), meanv.end(), 0.0);
      std::fill(dev.begin(), dev.end(), 0.0);
      for (std::size_t t = 0; t < m; ++t) {
        int b = 0;
        while (d2[t] > eps2[static_cast<std::size_t>(b)]) ++b;
        bin[t] = b;
        const std::size_t i = idx[t];
        const double w = ec.phase.weight[i];
        mass[static_cast<std::size_t>(b)] += w;
        for (int d = 0; d < k; ++d)
          meanv[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(d)] +=
              w * ec.v[static_cast<std::size_t>(d)][i];
      }
      for (int e = 1; e < ne; ++e) {
        mass[static_cast<std::size_t>(e)] += mass[static_cast<std::size_t>(e - 1)];
        for (int d = 0; d < k; ++d)
          meanv[static_cast<std::size_t>(e) * 3 + static_cast<std::size_t>(d)] +=
              meanv[static_cast<std::size_t>(e - 1) * 3 + static_cast<std::size_t>(d)];
      }
      for (int e = 0; e < ne; ++e) {
        double ms = mass[static_cast<std::size_t>(e)];
        if (ms > 0.0)
          for (int d = 0; d < 3; ++d)
            meanv[static_cast<std::size_t>(e) * 3 + static_cast<std::size_t>(d)] /= ms;
      }
      // deviation pass: each member contributes to every scale above its bin
      for (std::size_t t = 0; t < m; ++t) {
        const std::size_t i = idx[t];
        const double w = ec.phase.weight[i];
        for (int e = bin[t]; e < ne; ++e) {
          double acc = 0.0;
          for (int d = 0; d < k; ++d) {
            double diff = ec.v[static_cast<std::size_t>(d)][i] -
                          meanv[static_cast<std::size_t>(e) * 3 + static_cast<std::size_t>(d)];
            acc += diff * diff;
          }
          dev[static_cast<std::size_t>(e)] += w * acc;
        }
      }
      for (int e = 0; e < ne; ++e) {
        double ms = mass[static_cast<std::size_t>(e)];
        if (ms > 0.0)
          scan.sigma[qi * static_cast<std::size_t>(ne) + static_cast<std::size_t>(e)] =
              std::sqrt(dev[static_cast<std::size_t>(e)] / ms);
      }
    }
  });
  return scan;
}

ExceedanceCurve curve_from_scan(const SigmaScan& scan, double delta) {
  ExceedanceCurve c;
  c.eps = scan.eps;
  c.delta = delta;
  const std::size_t nq = scan.n_queries();
  c.fraction.assign(scan.eps.size(), 0.0);
  c.empty_fraction.assign(scan.eps.size(), 0.0);
  if (nq == 0) return c;
  for (std::size_t q = 0; q < nq; ++q) {
    for (int e = 0; e < scan.n_eps(); ++e) {
      double s = scan.at(q, e);
      if (std::isnan(s))
        c.empty_fraction[static_cast<std::size_t>(e)] += 1.0;
      else if (s > delta)
        c.fraction[static_cast<std::size_t>(e)] += 1.0;
    }
  }
  for (auto& f : c.fraction) f /= static_cast<double>(nq);
  for (auto& f : c.empty_fraction) f /= static_cast<double>(nq);
  return c;
}

ScalingFit scaling_exponent(const ExceedanceCurve& curve, std::size_t n_eff) {
  ScalingFit out;
  const double floor = 10.0 / static_cast<double>(n_eff);
  std::vector<double> lx, ly;
  for (std::size_t e = 0; e < curve.eps.size(); ++e) {
    double f = curve.fraction[e];
    if (f <= floor || f >= 0.5) continue;
    if (lx.empty()) out.eps_lo = curve.eps[e];
    out.eps_hi = curve.eps[e];
    lx.push_back(std::log(curve.eps[e]));
    ly.push_back(std::log(f));
  }
  out.fit = fit_line(lx, ly);
  out.usable = out.fit.n_used >= 4;
  return out;
}

Prediction fs_predict(const EmbeddedCloud& ec, const double* y, double eps, int steps) {
  Prediction out;
  std::vector<double> cur(y, y + ec.k);
  for (int s = 0; s < steps; ++s) {
    try {
      cur = chi(ec, cur.data(), eps);
    } catch (const EmptyBall&) {
      out.truncated = true;
      break;
    }
    out.trajectory.push_back(cur);
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Collapses: return "collapses";
    case Verdict::BoundedBelow: return "bounded_below";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict predictability_verdict(const ExceedanceCurve& curve, std::size_t n_eff) {
  if (curve.eps.size() < 3) return Verdict::Inconclusive;
  const double collapse_bar = std::max(0.01, 20.0 / static_cast<double>(n_eff));
  if (curve.fraction[0] < collapse_bar && curve.fraction[1] < collapse_bar)
    return Verdict::Collapses;
  const double floor = 0.05;
  if (curve.fraction[0] >= floor && curve.fraction[1] >= floor && curve.fraction[2] >= floor &&
      curve.fraction[0] >= 0.8 * curve.fraction[2])
    return Verdict::BoundedBelow;
  return Verdict::Inconclusive;
}

double image_std(const EmbeddedCloud& ec) {
  const std::size_t n = ec.size();
  double mass = 0.0;
  std::array<double, 3> mean{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ec.phase.weight[i];
    mass += w;
    for (int d = 0; d < ec.k; ++d)
      mean[static_cast<std::size_t>(d)] += w * ec.v[static_cast<std::size_t>(d)][i];
  }
  for (int d = 0; d < ec.k; ++d) mean[static_cast<std::size_t>(d)] /= mass;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ec.phase.weight[i];
    for (int d = 0; d < ec.k; ++d) {
      double e = ec.v[static_cast<std::size_t>(d)][i] - mean[static_cast<std::size_t>(d)];
      var += w * e * e;
    }
  }
  return std::sqrt(var / mass);
}

std::vector<double> delta_ladder(const EmbeddedCloud& ec, int n) {
  double s = image_std(ec);
  if (!(s > 0.0)) s = 1.0;
  std::vector<double> out(static_cast<std::size_t>(n));
  double lo = 0.01 * s, hi = 0.5 * s;
  double stepw = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(stepw * i);
  return out;
}

std::vector<double> eps_ladder(const EmbeddedCloud& ec, int n, double top_frac,
                               double floor_quantile) {
  const SoAView u = ec.u_view();
  double diam = sample_diameter(u);
  if (!(diam > 0.0)) throw EstimateError("eps_ladder: degenerate reconstruction cloud");
  double top = top_frac * diam;
  NeighborIndex index(u);
  // nearest-neighbor quantile over a deterministic subsample
  std::size_t cap = std::min<std::size_t>(u.n, 2000);
  std::size_t stride = u.n > cap ? (u.n + cap - 1) / cap : 1;
  std::vector<double> nn;
  double q[3];
  for (std::size_t i = 0; i < u.n; i += stride) {
    for (int d = 0; d < u.dim; ++d) q[d] = u.axis[static_cast<std::size_t>(d)][i];
    double r = index.nearest_distance(q, static_cast<std::int64_t>(i));
    if (r > 0.0 && std::isfinite(r)) nn.push_back(r);
  }
  double lo = nn.empty() ? top * 1e-5 : quantile(nn, floor_quantile);
  lo = std::min(std::max(lo, top * 1e-6), top / 8.0);
  return geometric_ladder(lo, top, n).r;
}

}  // namespace delaylab
