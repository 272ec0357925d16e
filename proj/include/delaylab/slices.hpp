#pragma once

#include <cstdint>
#include <vector>

#include "delaylab/core.hpp"
#include "delaylab/dimension.hpp"
#include "delaylab/prediction.hpp"

namespace delaylab {

struct EmptySlab : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite-delta stand-in for the conditional measure at y: the phase cloud
// restricted to the slab |phi(x) - y| <= delta, weights renormalized.
struct SliceEstimate {
  std::vector<double> y;
  double delta = 0.0;
  int k = 1;
  double slab_mass = 0.0;                    // pre-normalization mass
  std::vector<std::uint32_t> members;        // indices into the embedded cloud
  PointCloud phase;                          // member points, renormalized weights
  std::vector<double> original_weight;       // member weights before renormalization
  std::array<std::vector<double>, 3> image;  // member v values
};

SliceEstimate geometric_slice(const EmbeddedCloud& ec, const double* y, double delta);

// Correlation dimension of the slice pushed forward by T^iterate. The fit
// floor is raised to floor_factor * delta: below the slab width a finite
// slice scales like the ambient cloud, not the fiber.
DimensionEstimate slice_dimension(const SliceEstimate& slice, const SystemSpec& sys, int iterate,
                                  double floor_factor = 3.0);

// Weighted standard deviation of the image members; shares the two-pass
// moment routine with sigma, so the two agree bitwise on a shared slab.
double image_slice_spread(const SliceEstimate& slice);

struct CollisionPair {
  std::uint32_t i = 0, j = 0;
  double u_dist = 0.0;
  double x_dist = 0.0;
};

struct CollisionReport {
  std::vector<CollisionPair> pairs;
  double mass_fraction = 0.0;  // weighted fraction of probed centers with a collision
  std::size_t centers_probed = 0;
  std::size_t centers_with_collision = 0;
};

// Pairs that are tol_u-close in reconstruction space yet sep_x-far in phase
// space. Probes a deterministic center subsample; pairs are capped.
CollisionReport injectivity_probe(const EmbeddedCloud& ec, double tol_u, double sep_x,
                                  std::size_t max_centers = 2000, std::size_t max_pairs = 10000);

struct DensityLevel {
  double cell_size = 0.0;
  std::size_t occupied = 0;
  double max_count = 0.0;
  double max_ratio = 0.0;  // densest cell relative to the uniform density
  bool usable = false;     // densest cell still resolves >= min_count points
};

struct DensityReport {
  std::vector<DensityLevel> levels;
  int usable_levels = 0;
  double growth = 0.0;  // geometric mean ratio step across usable levels
  bool diverging = false;
};

// Histogram the pushforward on dyadically refined grids; absolute continuity
// shows bounded max-density growth, a singular image diverges with
// refinement.
DensityReport pushforward_density_diagnostic(const EmbeddedCloud& ec, int levels = 5,
                                             int base_cells = 4, double min_count = 50.0);

struct LocalDimPairs {
  std::vector<double> phase_dim;  // d(mu, x) estimates
  std::vector<double> image_dim;  // d(phi mu, phi x) estimates
  double mean_phase = 0.0;
  double mean_image = 0.0;
};

LocalDimPairs pushforward_local_dimension(const EmbeddedCloud& ec, int sample_count,
                                          std::uint64_t seed);

}  // namespace delaylab
