#include "delaylab/kernels.hpp"

#include "kernels_detail.hpp"

namespace delaylab::kernels {

namespace {

using namespace detail;

std::size_t gather_within_scalar(const SoAView& pts, const double* q, double r2,
                                 std::uint32_t* out_idx, double* out_d2) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: return gather_within_t<1, true>(pts, q, r2, out_idx, out_d2);
      case 2: return gather_within_t<2, true>(pts, q, r2, out_idx, out_d2);
      default: return gather_within_t<3, true>(pts, q, r2, out_idx, out_d2);
    }
  }
  switch (pts.dim) {
    case 1: return gather_within_t<1, false>(pts, q, r2, out_idx, out_d2);
    case 2: return gather_within_t<2, false>(pts, q, r2, out_idx, out_d2);
    default: return gather_within_t<3, false>(pts, q, r2, out_idx, out_d2);
  }
}

void pair_hist_scalar(const SoAView& pts, std::size_t row_begin, std::size_t row_end,
                      const double* r2, int nr, double* acc, double* cnt) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: pair_hist_t<1, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
      case 2: pair_hist_t<2, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
      default: pair_hist_t<3, true>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    }
  }
  switch (pts.dim) {
    case 1: pair_hist_t<1, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    case 2: pair_hist_t<2, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
    default: pair_hist_t<3, false>(pts, row_begin, row_end, r2, nr, acc, cnt); return;
  }
}

void ball_mass_scalar(const SoAView& pts, const double* q, const double* r2, int nr,
                      double* acc, double* cnt) {
  if (pts.angular_first) {
    switch (pts.dim) {
      case 1: ball_mass_t<1, true>(pts, q, r2, nr, acc, cnt); return;
      case 2: ball_mass_t<2, true>(pts, q, r2, nr, acc, cnt); return;
      default: ball_mass_t<3, true>(pts, q, r2, nr, acc, cnt); return;
    }
  }
  switch (pts.dim) {
    case 1: ball_mass_t<1, false>(pts, q, r2, nr, acc, cnt); return;
    case 2: ball_mass_t<2, false>(pts, q, r2, nr, acc, cnt); return;
    default: ball_mass_t<3, false>(pts, q, r2, nr, acc, cnt); return;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", gather_within_scalar, pair_hist_scalar, ball_mass_scalar};
  return ops;
}

}  // namespace delaylab::kernels
