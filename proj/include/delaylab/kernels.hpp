#pragma once

#include <cstddef>
#include <cstdint>

#include "delaylab/core.hpp"

namespace delaylab::kernels {

inline constexpr int kMaxLadder = 24;

// Low-level distance kernels over SoA clouds. Scalar reference and AVX2
// variants are semantically interchangeable:
//   - per-point squared distances are computed with the same mul/add sequence
//     (no FMA, -ffp-contract=off) so membership decisions agree bitwise;
//   - reductions may differ in summation order only (raw counts are sums of
//     1.0 and stay exact in any order).
//
// Histogram accumulators are cumulative against an ascending r2 ladder of at
// most kMaxLadder rungs: a point with d2 <= r2[t] contributes to acc[t].
struct Ops {
  const char* name;

  // Append indices (ascending) of points with d2(q,p) <= r2 to out_idx and,
  // if out_d2 != nullptr, the matching squared distances. Returns hit count.
  std::size_t (*gather_within)(const SoAView& pts, const double* q, double r2,
                               std::uint32_t* out_idx, double* out_d2);

  // Unordered pairs (i, j), row i in [row_begin, row_end), j > i:
  // acc[t] += w_i * w_j and cnt[t] += 1 for every covering rung. cnt may be
  // nullptr.
  void (*pair_hist)(const SoAView& pts, std::size_t row_begin, std::size_t row_end,
                    const double* r2, int nr, double* acc, double* cnt);

  // Weighted ball masses around q: acc[t] += w_i, cnt[t] += 1, cumulative.
  void (*ball_mass)(const SoAView& pts, const double* q, const double* r2, int nr,
                    double* acc, double* cnt);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported by compiler or CPU

// Runtime selection: AVX2 when available, overridable with
// DELAYLAB_KERNELS=scalar|avx2 (unsupported requests fall back to scalar).
const Ops& active_ops();

}  // namespace delaylab::kernels
