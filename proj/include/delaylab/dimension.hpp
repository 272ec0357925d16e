#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaylab/core.hpp"
#include "delaylab/neighbor.hpp"

namespace delaylab {

// Fitted scaling exponent with diagnostics.
struct DimensionEstimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double r_min = 0.0, r_max = 0.0;  // fitted window
  double residual = std::numeric_limits<double>::quiet_NaN();
  int n_scales = 0;
  std::string method;
  bool degraded = false;  // window shrank below the requested interior scales
};

// Ascending geometric radius ladder; fits use [fit_lo, fit_hi).
struct ScaleLadder {
  std::vector<double> r;
  int fit_lo = 0;
  int fit_hi = 0;
};

ScaleLadder geometric_ladder(double r_min, double r_max, int n_scales);

// Default policy: 12 geometric scales from diameter/4 down to the radius at
// which the median ball holds >= min_ball points; fits use the interior 8.
ScaleLadder make_ladder(const SoAView& pts, int n_scales = 12, double top_frac = 0.25,
                        int min_ball = 20);

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  int n_used = 0;
};

SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

// Weighted fraction of ordered distinct pairs within distance r.
double correlation_sum(const PointCloud& cloud, double r);

// Cumulative correlation sums over a ladder; raw pair counts are written to
// *counts when provided (used for shot-noise filtering).
std::vector<double> correlation_sums(const PointCloud& cloud, const std::vector<double>& radii,
                                     std::vector<double>* counts = nullptr);

DimensionEstimate correlation_dimension(const PointCloud& cloud);
DimensionEstimate correlation_dimension(const PointCloud& cloud, const ScaleLadder& ladder);

DimensionEstimate box_counting_dimension(const PointCloud& cloud);
DimensionEstimate box_counting_dimension(const PointCloud& cloud, const ScaleLadder& ladder);

// Slope of log ball mass vs log radius at x. Throws EstimateError when no
// scale holds any mass.
DimensionEstimate local_dimension(const PointCloud& cloud, const PhasePoint& x,
                                  const ScaleLadder& ladder);

struct EstimateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Empirical quantiles of local dimensions over sampled cloud points, proxying
// the essential inf/sup of the lower local dimension.
struct HausdorffProxies {
  double lower = 0.0, upper = 0.0;
  std::vector<double> samples;  // per-center fitted local dimensions
};

HausdorffProxies hausdorff_proxies(const PointCloud& cloud, int sample_count,
                                   double q_lo = 0.05, double q_hi = 0.95,
                                   std::uint64_t seed = 0);

// Pair-potential energy sum_{i != j} w_i w_j / d_ij^s. Clouds larger than
// max_points are stride-subsampled (deterministic) before summing. diverged
// is set on atoms (zero distances) or when half-sample energies disagree
// with the full sum by more than 10%.
struct EnergyResult {
  double value = 0.0;
  bool diverged = false;
};

EnergyResult energy(const PointCloud& cloud, double s, std::size_t max_points = 20000);

// Local potential sum_j w_j / d(x, x_j)^s, zero-distance terms skipped.
double local_potential(const PointCloud& cloud, const PhasePoint& x, double s);

// Weighted quantile helper (nearest rank on sorted copies).
double quantile(std::vector<double> values, double q);

}  // namespace delaylab
