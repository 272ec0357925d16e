#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delaylab/core.hpp"
#include "delaylab/dimension.hpp"
#include "delaylab/observables.hpp"

namespace delaylab {

// Reconstruction-space sample: u_i = delay vector of x_i, v_i = delay vector
// of the image point T x_i. Weights are shared with the phase cloud.
struct EmbeddedCloud {
  int k = 1;
  SystemSpec system;
  std::string observable_base;
  std::uint64_t seed = 0;
  PointCloud phase;
  std::array<std::vector<double>, 3> u, v;

  std::size_t size() const { return phase.size(); }
  SoAView u_view() const;
  SoAView v_view() const;
  PointCloud u_cloud() const;  // copy for the dimension estimators
};

EmbeddedCloud build_embedded(const PointCloud& cloud, const SystemSpec& sys,
                             const Observable& h, int k);

struct EmptyBall : std::runtime_error {
  double nearest;
  explicit EmptyBall(double r)
      : std::runtime_error("empty reconstruction ball; nearest occupied radius " +
                           std::to_string(r)),
        nearest(r) {}
};

// Weighted mean of v over the closed eps-ball around y in u-space.
std::vector<double> chi(const EmbeddedCloud& ec, const double* y, double eps);

// Weighted RMS deviation of v from chi over the same ball.
double sigma(const EmbeddedCloud& ec, const double* y, double eps);

// Exact exceedance over every sample (O(n^2); intended for small clouds).
struct ExceedancePoint {
  double fraction = 0.0;        // weighted mass with sigma > delta
  double empty_fraction = 0.0;  // mass whose ball was empty (counted as non-exceeding)
};
ExceedancePoint exceedance(const EmbeddedCloud& ec, double delta, double eps);

// sigma evaluated on a seeded weight-proportional query subsample, at every
// ladder scale in one pass. sigma[q * n_eps + e]; NaN marks an empty ball.
struct SigmaScan {
  std::vector<double> eps;  // ascending
  std::vector<std::uint32_t> queries;
  std::vector<double> sigma;
  std::size_t n_queries() const { return queries.size(); }
  int n_eps() const { return static_cast<int>(eps.size()); }
  double at(std::size_t q, int e) const { return sigma[q * eps.size() + static_cast<std::size_t>(e)]; }
};

SigmaScan scan_sigmas(const EmbeddedCloud& ec, const std::vector<double>& eps_ladder,
                      std::size_t n_queries, std::uint64_t seed);

struct ExceedanceCurve {
  std::vector<double> eps;             // ascending
  std::vector<double> fraction;        // query fraction with sigma > delta
  std::vector<double> empty_fraction;  // query fraction with empty balls
  double delta = 0.0;
};

ExceedanceCurve curve_from_scan(const SigmaScan& scan, double delta);

// Log-log slope over scales with fraction in (10/n_eff, 1/2). Fewer than 4
// usable scales leaves the fit unusable (usable = false).
struct ScalingFit {
  SlopeFit fit;
  bool usable = false;
  double eps_lo = 0.0, eps_hi = 0.0;
};
ScalingFit scaling_exponent(const ExceedanceCurve& curve, std::size_t n_eff);

// Zeroth-order local predictor: iterate y <- chi(y, eps).
struct Prediction {
  std::vector<std::vector<double>> trajectory;
  bool truncated = false;  // empty ball before the requested step count
};
Prediction fs_predict(const EmbeddedCloud& ec, const double* y, double eps, int steps);

enum class Verdict { Collapses, BoundedBelow, Inconclusive };
const char* to_string(Verdict v);

// Thresholds (engineering constants, echoed by the harness):
//   collapses       fractions at the two smallest scales < max(0.01, 20/n_eff)
//   bounded_below   fractions at the three smallest scales >= 0.05, and the
//                   smallest-scale fraction >= 0.8 x the third-smallest
Verdict predictability_verdict(const ExceedanceCurve& curve, std::size_t n_eff);

// Default ladders.
std::vector<double> delta_ladder(const EmbeddedCloud& ec, int n = 6);
std::vector<double> eps_ladder(const EmbeddedCloud& ec, int n = 12, double top_frac = 0.25,
                               double floor_quantile = 0.001);

// Total standard deviation of the v-cloud (sets the delta scale).
double image_std(const EmbeddedCloud& ec);

}  // namespace delaylab
