#pragma once

#include <cstddef>
#include <cstdint>

#include "delaylab/core.hpp"

// Shared per-point scalar arithmetic. AVX2 tails call these so that every
// point is measured with the exact same operation sequence regardless of path.
namespace delaylab::kernels::detail {

template <int Dim, bool Angular>
inline double point_d2(const SoAView& pts, std::size_t i, const double* q) {
  double acc = 0.0;
  if constexpr (Angular) {
    double d = angular_dist(pts.axis[0][i], q[0]);
    acc = d * d;
  } else {
    double d = pts.axis[0][i] - q[0];
    acc = d * d;
  }
  if constexpr (Dim >= 2) {
    double d = pts.axis[1][i] - q[1];
    acc += d * d;
  }
  if constexpr (Dim >= 3) {
    double d = pts.axis[2][i] - q[2];
    acc += d * d;
  }
  return acc;
}

// Cumulative rung accumulation: every rung whose radius covers d2 receives
// the contribution. The ladder is ascending; d2 <= r2[nr-1] is the caller's
// hit test.
inline void accumulate_rungs(double d2, double wp, const double* r2, int nr, double* acc,
                             double* cnt) {
  for (int t = nr - 1; t >= 0 && d2 <= r2[t]; --t) {
    acc[t] += wp;
    if (cnt != nullptr) cnt[t] += 1.0;
  }
}

template <int Dim, bool Angular>
std::size_t gather_within_t(const SoAView& pts, const double* q, double r2,
                            std::uint32_t* out_idx, double* out_d2) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pts.n; ++i) {
    double d2 = point_d2<Dim, Angular>(pts, i, q);
    if (d2 <= r2) {
      out_idx[hits] = static_cast<std::uint32_t>(i);
      if (out_d2 != nullptr) out_d2[hits] = d2;
      ++hits;
    }
  }
  return hits;
}

template <int Dim, bool Angular>
void pair_hist_t(const SoAView& pts, std::size_t row_begin, std::size_t row_end,
                 const double* r2, int nr, double* acc, double* cnt) {
  const double top = r2[nr - 1];
  double q[3] = {0, 0, 0};
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (int d = 0; d < Dim; ++d) q[d] = pts.axis[static_cast<std::size_t>(d)][i];
    const double wi = pts.weight[i];
    for (std::size_t j = i + 1; j < pts.n; ++j) {
      double d2 = point_d2<Dim, Angular>(pts, j, q);
      if (d2 <= top) accumulate_rungs(d2, wi * pts.weight[j], r2, nr, acc, cnt);
    }
  }
}

template <int Dim, bool Angular>
void ball_mass_t(const SoAView& pts, const double* q, const double* r2, int nr,
                 double* acc, double* cnt) {
  const double top = r2[nr - 1];
  for (std::size_t i = 0; i < pts.n; ++i) {
    double d2 = point_d2<Dim, Angular>(pts, i, q);
    if (d2 <= top) accumulate_rungs(d2, pts.weight[i], r2, nr, acc, cnt);
  }
}

}  // namespace delaylab::kernels::detail
