#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "delaylab/core.hpp"
#include "delaylab/systems.hpp"

namespace delaylab {

inline constexpr int kMaxMonomials = 256;

// All real monomials of n_vars variables with total degree <= degree,
// graded-lexicographic, degree 0 included. Inputs are affinely rescaled to
// [-1,1]^N (center/halfwidth) before evaluation to control conditioning;
// the scaling is part of the basis identity.
struct MonomialBasis {
  int n_vars = 1;
  int degree = 1;
  std::vector<std::array<int, 3>> exponents;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> halfwidth{1.0, 1.0, 1.0};

  int size() const { return static_cast<int>(exponents.size()); }
  void eval_all(const PhasePoint& x, double* out) const;
  double eval(int j, const PhasePoint& x) const;
  double lip_bound(int j) const;
};

// Default degree is 2k+1; pass d_override for the 2k-1 variant.
MonomialBasis probe_basis(int n_vars, int k, int d_override = -1);
MonomialBasis probe_basis(int n_vars, int k, int d_override, const BoundingBox& box);

// Scalar observable: a named builtin plus a monomial perturbation.
struct Observable {
  enum class Base { Zero, CosAngle, Coord };
  Base base = Base::Zero;
  int coord = 0;
  MonomialBasis basis;
  std::vector<double> alpha;  // empty or basis.size() entries
  double lip_estimate = 0.0;

  double operator()(const PhasePoint& x) const;
  std::string base_name() const;
};

// base: "zero" | "cos_angle" | "coord_0" | "coord_1" | "coord_2"
Observable make_observable(const std::string& base, MonomialBasis basis);

Observable perturb(const Observable& h, std::span<const double> alpha);

// Uniform draw from the m-ball of the given radius.
std::vector<double> sample_alpha(int m, double radius, std::uint64_t seed);

struct DelayMap {
  Observable h;
  int k = 1;
  SystemSpec system;
};

// (h(x), h(Tx), ..., h(T^{k-1}x))
std::vector<double> delay_map(const PhasePoint& x, const DelayMap& dm);

// k x m matrix of probe differences along the orbits of x and y.
struct ObservationMatrix {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
};

ObservationMatrix observation_matrix(const PhasePoint& x, const PhasePoint& y,
                                     const MonomialBasis& basis, int k,
                                     const SystemSpec& sys);

// Descending singular values, length = rows.
std::vector<double> singular_values(const ObservationMatrix& m);

// Base-observable offset (h(T^i x) - h(T^i y))_i; the delay difference of a
// perturbed observable splits as D_{x,y} alpha + this vector.
std::vector<double> base_offset(const PhasePoint& x, const PhasePoint& y, const Observable& h,
                                int k, const SystemSpec& sys);

struct InterpolationResult {
  std::vector<double> alpha;
  double residual_inf = 0.0;
  double alpha_inf = 0.0;
  double bound = 0.0;       // 2k max{1,|y|}^{2m-1} |z|_inf / (eps^{2k-2} sep)
  bool within_bound = false;
  double eps = 0.0;         // cross-orbit separation measured from the inputs
  double sep = 0.0;         // i vs i+k separation
};

// Minimum-norm coefficients with sum_j alpha_j h_j(y_i) = z_i on 2k points.
// Throws EstimateError-like runtime_error when the system is numerically
// rank-deficient (separation hypothesis violated).
InterpolationResult interpolate_on_orbit(const std::vector<PhasePoint>& points,
                                         const std::vector<double>& targets,
                                         const MonomialBasis& basis);

struct TransversalityReport {
  int pairs_used = 0;
  int pairs_skipped = 0;
  double min_ratio = 0.0;         // sigma_k(D_{x,y}) / (eps^{2k-2} |T^{k-1}x - T^{k-1}y|)
  double min_ratio_kernel = 0.0;  // sigma_1 of the image-step matrix restricted to ker D_{x,y}
  double min_ratio_half1 = 0.0;   // same minima over the two disjoint halves
  double min_ratio_half2 = 0.0;
};

TransversalityReport transversality_report(const PointCloud& cloud, const SystemSpec& sys,
                                           int k, int pair_count, std::uint64_t seed);

}  // namespace delaylab
