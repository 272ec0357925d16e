#include "delaylab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace delaylab::kernels {

const Ops& active_ops() {
  static const Ops* selected = [] {
    const Ops* avx2 = avx2_ops();
    if (const char* e = std::getenv("DELAYLAB_KERNELS")) {
      if (std::strcmp(e, "scalar") == 0) return &scalar_ops();
      if (std::strcmp(e, "avx2") == 0 && avx2 != nullptr) return avx2;
    }
    return avx2 != nullptr ? avx2 : &scalar_ops();
  }();
  return *selected;
}

}  // namespace delaylab::kernels
