#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaylab/core.hpp"

namespace delaylab {

// Raised when a point cannot be assigned to a first-level IFS cell.
struct CodingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SystemKind {
  Solenoid,           // solid-torus map, chart (t, Re z, Im z); step defaults to the squared map
  CornerCantorShift,  // four-corner Cantor set with the coding shift
  TentHalf,           // x -> |x - 1/2| on [0,1]
  Identity,
  UnionChain,         // self-similar head X1 mapped through a chain of shrinking copies
  SelfSimilarIFS,     // generic equal-ratio IFS with the coding shift where defined
};

struct IFSMap {
  double ratio;
  std::array<double, 3> offset{0, 0, 0};
};

struct SystemSpec {
  SystemKind kind = SystemKind::Identity;
  int ambient_dim = 1;
  double lipschitz_bound = 1.0;
  bool squared = true;              // Solenoid only: step applies the base map twice
  double lambda = 0.0;              // CornerCantorShift contraction ratio
  double lambda1 = 0.0, lambda2 = 0.0;  // UnionChain ratios (head / tail copies)
  std::vector<IFSMap> maps;         // SelfSimilarIFS
};

SystemSpec make_solenoid(bool squared = true);
SystemSpec make_four_corner(double lambda);
SystemSpec make_tent();
SystemSpec make_identity(int dim);
SystemSpec make_union_chain(double lambda1, double lambda2);
SystemSpec make_ifs(int dim, std::vector<IFSMap> maps);

// Phase metric for neighbor queries; solenoid clouds wrap the angle.
Metric phase_metric(const SystemSpec& spec);

// Coordinate box enclosing the dynamics; monomial probes are rescaled to it.
BoundingBox domain_box(const SystemSpec& spec);

std::string describe(const SystemSpec& spec);
SystemSpec parse_system(const std::string& desc);

// --- step maps ---------------------------------------------------------

// Solid-torus map (2t mod 2pi, z/4 + e^{it}/2); squared applies it twice.
// Rejects points with |z| > 1 beyond 1e-9.
PhasePoint solenoid_step(const PhasePoint& p, bool squared);

double tent_step(double x);

// Coding shift on the four-corner set: identify the first-level cell,
// invert its map. Tolerance 1e-9; ties resolve to the smallest symbol.
PhasePoint cantor_shift_step(const PhasePoint& p, double lambda);

PhasePoint step(const SystemSpec& spec, const PhasePoint& p);

inline PhasePoint iterate(const SystemSpec& spec, PhasePoint p, int times) {
  for (int i = 0; i < times; ++i) p = step(spec, p);
  return p;
}

// --- samplers ----------------------------------------------------------

// Orbit average over the squared solenoid map from a volume-random seed
// point; the first burn_in iterates are discarded.
PointCloud sample_srb(std::size_t n, std::size_t burn_in, std::uint64_t seed);

// Limit point of f_{w1} o ... o f_{wL}(0) for the four-corner maps.
PhasePoint ifs_natural_projection(const std::vector<int>& word, double lambda);

// n i.i.d. points with uniform codings of the given depth (0 = deep enough
// that the truncation error lambda^depth < 1e-9).
PointCloud sample_self_similar(std::size_t n, double lambda, std::uint64_t seed,
                               std::size_t depth = 0);

// Uniform coding measure on the union-chain head set X1.
PointCloud sample_union_chain(std::size_t n, const SystemSpec& spec, std::uint64_t seed);

// Generic sampler dispatching on the spec kind (uniform [0,1]^dim for
// tent/identity).
PointCloud sample_measure(const SystemSpec& spec, std::size_t n, std::uint64_t seed,
                          std::size_t burn_in = 1000);

// i.i.d. uniform points in [0,1]^dim; tagged with the identity system.
PointCloud sample_uniform_box(std::size_t n, int dim, std::uint64_t seed);

namespace union_chain_detail {
inline constexpr double kHeadBase = 4.0;   // X1 lives in [4,5]^3
inline constexpr double kTailBase = 2.0;   // X2 lives in [2,3]^3
std::size_t coding_depth(double ratio);
}  // namespace union_chain_detail

}  // namespace delaylab
