#include "netdecomp/kernels/lane_degree.hpp"

namespace netdecomp::kernels {

bool avx2_available() {
#if defined(__x86_64__) && defined(NETDECOMP_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend b = avx2_available() ? Backend::kAvx2 : Backend::kScalar;
  return b;
}

std::string_view backend_name(Backend b) { return b == Backend::kAvx2 ? "avx2" : "scalar"; }

void lane_degree(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out) {
  if (active_backend() == Backend::kAvx2) {
    lane_degree_avx2(shifts, neighbors, lanes, out);
  } else {
    lane_degree_scalar(shifts, neighbors, lanes, out);
  }
}

}  // namespace netdecomp::kernels
