// AVX2 variants. Per-point arithmetic mirrors the scalar kernels exactly:
// sub/mul/add (never FMA), angular wrap via abs + min, so membership masks
// match the scalar path bitwise. Tails fall through to the shared scalar
// per-point routine.
#include "delaylab/kernels.hpp"

#include "kernels_detail.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace delaylab::kernels {

namespace {

using namespace detail;

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

template <int Dim, bool Angular>
inline __m256d block_d2(const SoAView& pts, std::size_t j, const __m256d* q) {
  __m256d acc;
  if constexpr (Angular) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pts.axis[0] + j), q[0]);
    d = _mm256_and_pd(d, kAbsMask);
    d = _mm256_min_pd(d, _mm256_sub_pd(_mm256_set1_pd(kTwoPi), d));
    acc = _mm256_mul_pd(d, d);
  } else {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pts.axis[0] + j), q[0]);
    acc = _mm256_mul_pd(d, d);
  }
  if constexpr (Dim >= 2) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pts.axis[1] + j), q[1]);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  if constexpr (Dim >= 3) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pts.axis[2] + j), q[2]);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return acc;
}

template <int Dim, bool Angular>
std::size_t gather_within_v(const SoAView& pts, const double* q, double r2,
                            std::uint32_t* out_idx, double* out_d2) {
  __m256d qv[3];
  for (int d = 0; d < Dim; ++d) qv[d] = _mm256_set1_pd(q[d]);
  const __m256d rv = _mm256_set1_pd(r2);
  std::size_t hits = 0;
  std::size_t j = 0;
  alignas(32) double d2s[4];
  for (; j + 4 <= pts.n; j += 4) {
    __m256d d2 = block_d2<Dim, Angular>(pts, j, qv);
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, rv, _CMP_LE_OQ));
    if (mask != 0) {
      _mm256_store_pd(d2s, d2);
      for (int lane = 0; lane < 4; ++lane) {
        if ((mask >> lane) & 1) {
          out_idx[hits] = static_cast<std::uint32_t>(j + static_cast<std::size_t>(lane));
          if (out_d2 != nullptr) out_d2[hits] = d2s[lane];
          ++hits;
        }
      }
    }
  }
  for (; j < pts.n; ++j) {
    double d2 = point_d2<Dim, Angular>(pts, j, q);
    if (d2 <= r2) {
      out_idx[hits] = static_cast<std::uint32_t>(j);
      if (out_d2 != nullptr) out_d2[hits] = d2;
      ++hits;
    }
  }
  return hits;
}

// Per-rung masked accumulation over a 4-lane block. Rung vectors live in a
// small stack array; the rung loop walks down the ladder and stops at the
// first empty mask (the ladder is ascending, so lower rungs stay empty too).
inline void accumulate_rungs_v(__m256d d2, __m256d wp, const double* r2, int nr,
                               __m256d* acc_v, __m256d* cnt_v, bool want_counts) {
  const __m256d ones = _mm256_set1_pd(1.0);
  for (int t = nr - 1; t >= 0; --t) {
    __m256d mask = _mm256_cmp_pd(d2, _mm256_set1_pd(r2[t]), _CMP_LE_OQ);
    if (_mm256_movemask_pd(mask) == 0) break;
    acc_v[t] = _mm256_add_pd(acc_v[t], _mm256_and_pd(mask, wp));
    if (want_counts) cnt_v[t] = _mm256_add_pd(cnt_v[t], _mm256_and_pd(mask, ones));
  }
}

inline void flush_rungs_v(const __m256d* acc_v, const __m256d* cnt_v, int nr, double* acc,
                          double* cnt, bool want_counts) {
  alignas(32) double tmp[4];
  for (int t = 0; t < nr; ++t) {
    _mm256_store_pd(tmp, acc_v[t]);
    acc[t] += tmp[0] + tmp[1] + tmp[2] + tmp[3];
    if (want_counts) {
      _mm256_store_pd(tmp, cnt_v[t]);
      cnt[t] += tmp[0] + tmp[1] + tmp[2] + tmp[3];
    }
  }
}

constexpr int kMaxRungs = 24;

template <int Dim, bool Angular>
void pair_hist_v(const SoAView& pts, std::size_t row_begin, std::size_t row_end,
                 const double* r2, int nr, double* acc, double* cnt) {
  const double top = r2[nr - 1];
  const __m256d topv = _mm256_set1_pd(top);
  const bool want_counts = cnt != nullptr;
  __m256d acc_v[kMaxRungs], cnt_v[kMaxRungs];
  for (int t = 0; t < nr; ++t) acc_v[t] = cnt_v[t] = _mm256_setzero_pd();
  double q[3] = {0, 0, 0};
  __m256d qv[3];
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (int d = 0; d < Dim; ++d) {
      q[d] = pts.axis[static_cast<std::size_t>(d)][i];
      qv[d] = _mm256_set1_pd(q[d]);
    }
    const double wi = pts.weight[i];
    const __m256d wiv = _mm256_set1_pd(wi);
    std::size_t j = i + 1;
    for (; j + 4 <= pts.n; j += 4) {
      __m256d d2 = block_d2<Dim, Angular>(pts, j, qv);
      if (_mm256_movemask_pd(_mm256_cmp_pd(d2, topv, _CMP_LE_OQ)) == 0) continue;
      __m256d wp = _mm256_mul_pd(wiv, _mm256_loadu_pd(pts.weight + j));
      accumulate_rungs_v(d2, wp, r2, nr, acc_v, cnt_v, want_counts);
    }
    for (; j < pts.n; ++j) {
      double d2 = point_d2<Dim, Angular>(pts, j, q);
      if (d2 <= top) accumulate_rungs(d2, wi * pts.weight[j], r2, nr, acc, cnt);
    }
  }
  flush_rungs_v(acc_v, cnt_v, nr, acc, cnt, want_counts);
}

template <int Dim, bool Angular>
void ball_mass_v(const SoAView& pts, const double* q, const double* r2, int nr,
                 double* acc, double* cnt) {
  const double top = r2[nr - 1];
  const __m256d topv = _mm256_set1_pd(top);
  const bool want_counts = cnt != nullptr;
  __m256d acc_v[kMaxRungs], cnt_v[kMaxRungs];
  for (int t = 0; t < nr; ++t) acc_v[t] = cnt_v[t] = _mm256_setzero_pd();
  __m256d qv[3];
  for (int d = 0; d < Dim; ++d) qv[d] = _mm256_set1_pd(q[d]);
  std::size_t j = 0;
  for (; j + 4 <= pts.n; j += 4) {
    __m256d d2 = block_d2<Dim, Angular>(pts, j, qv);
    if (_mm256_movemask_pd(_mm256_cmp_pd(d2, topv, _CMP_LE_OQ)) == 0) continue;
    accumulate_rungs_v(d2, _mm256_loadu_pd(pts.weight + j), r2, nr, acc_v, cnt_v, want_counts);
  }
  for (; j < pts.n; ++j) {
    double d2 = point_d2<Dim, Angular>(pts, j, q);
    if (d2 <= top) accumulate_rungs(d2, pts.weight[j], r2, nr, acc, cnt);
  }
  flush_rungs_v(acc_v, cnt_v, nr, acc, cnt, want_counts);
}

std::size_t gather_within_avx2(const SoAView& pts, const double* q, double r2,
                               std::uint32_t* out_idx, double* out_d2) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: return gather_within_v<1, true>(pts, q, r2, out_idx, out_d2);
      case 2: return gather_within_v<2, true>(pts, q, r2, out_idx, out_d2);
      default: return gather_within_v<3, true>(pts, q, r2, out_idx, out_d2);
    }
  }
  switch (pts.dim) {
    case 1: return gather_within_v<1, false>(pts, q, r2, out_idx, out_d2);
    case 2: return gather_within_v<2, false>(pts, q, r2, out_idx, out_d2);
    default: return gather_within_v<3, false>(pts, q, r2, out_idx, out_d2);
  }
}

void pair_hist_avx2(const SoAView& pts, std::size_t row_begin, std::size_t row_end,
                    const double* r2, int nr, double* acc, double* cnt) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: pair_hist_v<1, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
      case 2: pair_hist_v<2, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
      default: pair_hist_v<3, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    }
  }
  switch (pts.dim) {
    case 1: pair_hist_v<1, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    case 2: pair_hist_v<2, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    default: pair_hist_v<3, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
  }
}

void ball_mass_avx2(const SoAView& pts, const double* q, const double* r2, int nr,
                    double* acc, double* cnt) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: ball_mass_v<1, true>(pts, q, r2, nr, acc, cnt); return;
      case 2: ball_mass_v<2, true>(pts, q, r2, nr, acc, cnt); return;
      default: ball_mass_v<3, true>(pts, q, r2, nr, acc, cnt); return;
    }
  }
  switch (pts.dim) {
    case 1: ball_mass_v<1, false>(pts, q, r2, nr, acc, cnt); return;
    case 2: ball_mass_v<2, false>(pts, q, r2, nr, acc, cnt); return;
    default: ball_mass_v<3, false>(pts, q, r2, nr, acc, cnt); return;
  }
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops{"avx2", gather_within_avx2, pair_hist_avx2, ball_mass_avx2};
  return &ops;
}

}  // namespace delaylab::kernels

#else  // !__AVX2__

namespace delaylab::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace delaylab::kernels

#endif
