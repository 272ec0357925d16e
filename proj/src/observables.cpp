#include "delaylab/observables.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "delaylab/rng.hpp"

namespace delaylab {

namespace {

std::vector<std::array<int, 3>> enumerate_exponents(int n_vars, int degree) {
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= degree; ++total) {
    std::vector<std::array<int, 3>> level;
    std::array<int, 3> e{0, 0, 0};
    // walk all tuples with the given total over the active variables
    std::function<void(int, int)> rec = [&](int var, int left) {
      if (var == n_vars - 1) {
        e[static_cast<std::size_t>(var)] = left;
        level.push_back(e);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        e[static_cast<std::size_t>(var)] = v;
        rec(var + 1, left - v);
      }
    };
    rec(0, total);
    std::sort(level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

Eigen::MatrixXd to_eigen(const ObservationMatrix& m) {
  Eigen::MatrixXd a(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) a(i, j) = m.at(i, j);
  return a;
}

}  // namespace

void MonomialBasis::eval_all(const PhasePoint& x, double* out) const {
  double pw[3][16];
  for (int d = 0; d < n_vars; ++d) {
    double u = (x[d] - center[static_cast<std::size_t>(d)]) / halfwidth[static_cast<std::size_t>(d)];
    pw[d][0] = 1.0;
    for (int e = 1; e <= degree; ++e) pw[d][e] = pw[d][e - 1] * u;
  }
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    double v = 1.0;
    for (int d = 0; d < n_vars; ++d) v *= pw[d][exponents[j][static_cast<std::size_t>(d)]];
    out[j] = v;
  }
}

double MonomialBasis::eval(int j, const PhasePoint& x) const {
  double v = 1.0;
  for (int d = 0; d < n_vars; ++d) {
    double u = (x[d] - center[static_cast<std::size_t>(d)]) / halfwidth[static_cast<std::size_t>(d)];
    for (int e = 0; e < exponents[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)]; ++e) v *= u;
  }
  return v;
}

double MonomialBasis::lip_bound(int j) const {
  // gradient bound of the scaled monomial on [-1,1]^N, chained through the
  // affine rescale
  double acc = 0.0;
  for (int d = 0; d < n_vars; ++d) {
    double g = exponents[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] /
               halfwidth[static_cast<std::size_t>(d)];
    acc += g * g;
  }
  return std::sqrt(acc);
}

MonomialBasis probe_basis(int n_vars, int k, int d_override) {
  BoundingBox unit;
  unit.dim = n_vars;
  for (int d = 0; d < n_vars; ++d) {
    unit.lo[static_cast<std::size_t>(d)] = -1.0;
    unit.hi[static_cast<std::size_t>(d)] = 1.0;
  }
  return probe_basis(n_vars, k, d_override, unit);
}

MonomialBasis probe_basis(int n_vars, int k, int d_override, const BoundingBox& box) {
  if (n_vars < 1 || n_vars > 3) throw std::invalid_argument("probe_basis: n_vars must be 1..3");
  if (k < 1) throw std::invalid_argument("probe_basis: k must be >= 1");
  int d = d_override > 0 ? d_override : 2 * k + 1;
  if (d > 15) throw std::invalid_argument("probe_basis: degree too large");
  MonomialBasis b;
  b.n_vars = n_vars;
  b.degree = d;
  b.exponents = enumerate_exponents(n_vars, d);
  if (b.exponents.size() != binomial(n_vars + d, d) ||
      b.exponents.size() > static_cast<std::size_t>(kMaxMonomials))
    throw std::logic_error("probe_basis: monomial count mismatch");
  for (int v = 0; v < n_vars; ++v) {
    double lo = box.lo[static_cast<std::size_t>(v)], hi = box.hi[static_cast<std::size_t>(v)];
    b.center[static_cast<std::size_t>(v)] = 0.5 * (lo + hi);
    double hw = 0.5 * (hi - lo);
    b.halfwidth[static_cast<std::size_t>(v)] = hw > 0 ? hw : 1.0;
  }
  return b;
}

double Observable::operator()(const PhasePoint& x) const {
  double val = 0.0;
  switch (base) {
    case Base::Zero: val = 0.0; break;
    case Base::CosAngle: val = std::cos(x[0]); break;
    case Base::Coord: val = x[coord]; break;
  }
  if (!alpha.empty()) {
    double h[kMaxMonomials];
    basis.eval_all(x, h);
    double acc = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) acc += alpha[j] * h[j];
    val += acc;
  }
  return val;
}

std::string Observable::base_name() const {
  switch (base) {
    case Base::Zero: return "zero";
    case Base::CosAngle: return "cos_angle";
    case Base::Coord: return "coord_" + std::to_string(coord);
  }
  return "zero";
}

Observable make_observable(const std::string& base, MonomialBasis basis) {
  Observable h;
  h.basis = std::move(basis);
  if (base == "zero") {
    h.base = Observable::Base::Zero;
    h.lip_estimate = 0.0;
  } else if (base == "cos_angle") {
    h.base = Observable::Base::CosAngle;
    h.lip_estimate = 1.0;
  } else if (base.rfind("coord_", 0) == 0) {
    h.base = Observable::Base::Coord;
    h.coord = std::stoi(base.substr(6));
    if (h.coord < 0 || h.coord >= h.basis.n_vars)
      throw std::invalid_argument("make_observable: coordinate index out of range");
    h.lip_estimate = 1.0;
  } else {
    throw std::invalid_argument("make_observable: unknown base '" + base + "'");
  }
  return h;
}

Observable perturb(const Observable& h, std::span<const double> alpha) {
  if (static_cast<int>(alpha.size()) != h.basis.size())
    throw std::invalid_argument("perturb: coefficient length does not match the probe basis");
  Observable out = h;
  if (out.alpha.empty()) out.alpha.assign(alpha.begin(), alpha.end());
  else
    for (std::size_t j = 0; j < alpha.size(); ++j) out.alpha[j] += alpha[j];
  double extra = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    extra += std::fabs(alpha[j]) * h.basis.lip_bound(static_cast<int>(j));
  out.lip_estimate = h.lip_estimate + extra;
  return out;
}

std::vector<double> sample_alpha(int m, double radius, std::uint64_t seed) {
  if (radius <= 0) throw std::invalid_argument("sample_alpha: radius must be positive");
  Rng rng(split_seed(seed, 10));
  return rng.ball(m, radius);
}

std::vector<double> delay_map(const PhasePoint& x, const DelayMap& dm) {
  if (dm.k < 1) throw std::invalid_argument("delay_map: k must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(dm.k));
  PhasePoint p = x;
  for (int i = 0; i < dm.k; ++i) {
    out[static_cast<std::size_t>(i)] = dm.h(p);
    if (i + 1 < dm.k) p = step(dm.system, p);
  }
  return out;
}

ObservationMatrix observation_matrix(const PhasePoint& x, const PhasePoint& y,
                                     const MonomialBasis& basis, int k,
                                     const SystemSpec& sys) {
  ObservationMatrix m;
  m.rows = k;
  m.cols = basis.size();
  m.a.resize(static_cast<std::size_t>(k) * static_cast<std::size_t>(m.cols));
  double hx[kMaxMonomials], hy[kMaxMonomials];
  PhasePoint px = x, py = y;
  for (int i = 0; i < k; ++i) {
    basis.eval_all(px, hx);
    basis.eval_all(py, hy);
    for (int j = 0; j < m.cols; ++j)
      m.a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m.cols) + static_cast<std::size_t>(j)] =
          hx[j] - hy[j];
    if (i + 1 < k) {
      px = step(sys, px);
      py = step(sys, py);
    }
  }
  return m;
}

std::vector<double> singular_values(const ObservationMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& sv = svd.singularValues();
  std::vector<double> out(static_cast<std::size_t>(m.rows), 0.0);
  for (int i = 0; i < sv.size() && i < m.rows; ++i) out[static_cast<std::size_t>(i)] = sv(i);
  return out;
}

std::vector<double> base_offset(const PhasePoint& x, const PhasePoint& y, const Observable& h,
                                int k, const SystemSpec& sys) {
  Observable bare = h;
  bare.alpha.clear();
  std::vector<double> out(static_cast<std::size_t>(k));
  PhasePoint px = x, py = y;
  for (int i = 0; i < k; ++i) {
    out[static_cast<std::size_t>(i)] = bare(px) - bare(py);
    if (i + 1 < k) {
      px = step(sys, px);
      py = step(sys, py);
    }
  }
  return out;
}

InterpolationResult interpolate_on_orbit(const std::vector<PhasePoint>& points,
                                         const std::vector<double>& targets,
                                         const MonomialBasis& basis) {
  const std::size_t n = points.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("interpolate_on_orbit: need 2k points");
  if (targets.size() != n) throw std::invalid_argument("interpolate_on_orbit: targets/points mismatch");
  const int k = static_cast<int>(n / 2);
  const int m = basis.size();
  if (m < static_cast<int>(n)) throw std::invalid_argument("interpolate_on_orbit: basis too small");

  Eigen::MatrixXd a(n, m);
  double row[kMaxMonomials];
  for (std::size_t i = 0; i < n; ++i) {
    basis.eval_all(points[i], row);
    for (int j = 0; j < m; ++j) a(static_cast<Eigen::Index>(i), j) = row[j];
  }
  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = targets[i];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0 || sv(sv.size() - 1) < 1e-12 * sv(0))
    throw std::runtime_error("interpolate_on_orbit: system numerically rank-deficient");
  Eigen::VectorXd alpha = svd.solve(z);

  InterpolationResult res;
  res.alpha.assign(alpha.data(), alpha.data() + alpha.size());
  res.residual_inf = (a * alpha - z).lpNorm<Eigen::Infinity>();
  res.alpha_inf = alpha.lpNorm<Eigen::Infinity>();

  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    sep = std::min(sep, std::sqrt(dist2(points[static_cast<std::size_t>(i)],
                                        points[static_cast<std::size_t>(i + k)], Metric{})));
  double eps = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j - i == static_cast<std::size_t>(k)) continue;
      eps = std::min(eps, std::sqrt(dist2(points[i], points[j], Metric{})));
    }
  res.eps = eps;
  res.sep = sep;

  double max_norm = 1.0;
  for (const auto& p : points) {
    double norm2 = 0.0;
    for (int d = 0; d < p.dim; ++d) norm2 += p[d] * p[d];
    max_norm = std::max(max_norm, std::sqrt(norm2));
  }
  double z_inf = 0.0;
  for (double t : targets) z_inf = std::max(z_inf, std::fabs(t));
  res.bound = 2.0 * k * std::pow(max_norm, 2.0 * m - 1.0) * z_inf /
              (std::pow(eps, 2.0 * k - 2.0) * sep);
  res.within_bound = res.alpha_inf <= res.bound;
  return res;
}

TransversalityReport transversality_report(const PointCloud& cloud, const SystemSpec& sys,
                                           int k, int pair_count, std::uint64_t seed) {
  if (cloud.size() < 2) throw std::invalid_argument("transversality_report: cloud too small");
  MonomialBasis basis = probe_basis(cloud.dim, k, 2 * k + 1, domain_box(sys));
  Rng rng(split_seed(seed, 11));
  const Metric m{};  // orbit separations are Euclidean in the chart

  TransversalityReport rep;
  double mins[3] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  double min_kernel = std::numeric_limits<double>::infinity();

  for (int t = 0; t < pair_count; ++t) {
    std::size_t i = static_cast<std::size_t>(rng.below(cloud.size()));
    std::size_t j = static_cast<std::size_t>(rng.below(cloud.size()));
    if (i == j) {
      ++rep.pairs_skipped;
      continue;
    }
    PhasePoint x = cloud.point(i), y = cloud.point(j);
    std::vector<PhasePoint> ox(static_cast<std::size_t>(k + 1)), oy(static_cast<std::size_t>(k + 1));
    ox[0] = x;
    oy[0] = y;
    for (int s = 1; s <= k; ++s) {
      ox[static_cast<std::size_t>(s)] = step(sys, ox[static_cast<std::size_t>(s - 1)]);
      oy[static_cast<std::size_t>(s)] = step(sys, oy[static_cast<std::size_t>(s - 1)]);
    }
    auto min_sep = [&](int top) {
      double e = std::numeric_limits<double>::infinity();
      for (int a = 0; a <= top; ++a)
        for (int b = a + 1; b <= top; ++b) {
          e = std::min(e, dist2(ox[static_cast<std::size_t>(a)], ox[static_cast<std::size_t>(b)], m));
          e = std::min(e, dist2(oy[static_cast<std::size_t>(a)], oy[static_cast<std::size_t>(b)], m));
          e = std::min(e, dist2(ox[static_cast<std::size_t>(a)], oy[static_cast<std::size_t>(b)], m));
          e = std::min(e, dist2(oy[static_cast<std::size_t>(a)], ox[static_cast<std::size_t>(b)], m));
        }
      return std::sqrt(e);
    };
    double eps1 = min_sep(k - 1);
    double den1 = std::sqrt(dist2(ox[static_cast<std::size_t>(k - 1)], oy[static_cast<std::size_t>(k - 1)], m));
    if (!(eps1 > 0.0) || !(den1 > 0.0)) {
      ++rep.pairs_skipped;
      continue;
    }
    ObservationMatrix dxy = observation_matrix(x, y, basis, k, sys);
    auto sv = singular_values(dxy);
    double ratio = sv[static_cast<std::size_t>(k - 1)] /
                   (std::pow(eps1, 2.0 * k - 2.0) * den1);
    int half = (t < pair_count / 2) ? 1 : 2;
    mins[0] = std::min(mins[0], ratio);
    mins[half] = std::min(mins[half], ratio);

    double eps2 = min_sep(k);
    double den2 = std::sqrt(dist2(ox[static_cast<std::size_t>(k)], oy[static_cast<std::size_t>(k)], m));
    if (eps2 > 0.0 && den2 > 0.0) {
      Eigen::MatrixXd d1 = to_eigen(dxy);
      Eigen::MatrixXd d2 = to_eigen(observation_matrix(ox[1], oy[1], basis, k, sys));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(d1, Eigen::ComputeFullV);
      int rank = 0;
      for (int s = 0; s < svd.singularValues().size(); ++s)
        if (svd.singularValues()(s) > 1e-12 * svd.singularValues()(0)) ++rank;
      if (rank < basis.size()) {
        Eigen::MatrixXd kernel = svd.matrixV().rightCols(basis.size() - rank);
        Eigen::JacobiSVD<Eigen::MatrixXd> restricted(d2 * kernel);
        double top = restricted.singularValues()(0);
        min_kernel = std::min(min_kernel, top / (std::pow(eps2, 2.0 * k) * den2));
      }
    }
    ++rep.pairs_used;
  }
  rep.min_ratio = mins[0];
  rep.min_ratio_half1 = mins[1];
  rep.min_ratio_half2 = mins[2];
  rep.min_ratio_kernel = min_kernel;
  return rep;
}

}  // namespace delaylab
