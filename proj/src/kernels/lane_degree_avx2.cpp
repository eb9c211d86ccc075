#include "netdecomp/kernels/lane_degree.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

#include <cstring>
#endif

namespace netdecomp::kernels {

#if defined(__x86_64__) && defined(__AVX2__)

// Four lanes per 256-bit register. vpsllvq yields 0 for counts >= 64, which
// is exactly the "gone" encoding.
void lane_degree_avx2(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out) {
  const __m256i one = _mm256_set1_epi64x(1);
  const std::size_t wide = lanes & ~std::size_t{3};
  for (std::size_t l = 0; l < wide; l += 4) {
    __m256i acc = _mm256_setzero_si256();
    for (std::size_t i = 0; i < neighbors; ++i) {
      std::int32_t packed;
      std::memcpy(&packed, shifts + i * lanes + l, 4);
      const __m256i cnt = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
      acc = _mm256_add_epi64(acc, _mm256_sllv_epi64(one, cnt));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + l), acc);
  }
  for (std::size_t l = wide; l < lanes; ++l) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < neighbors; ++i) {
      const std::uint8_t c = shifts[i * lanes + l];
      if (c < kGone) s += std::uint64_t{1} << c;
    }
    out[l] = s;
  }
}

#else

void lane_degree_avx2(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out) {
  lane_degree_scalar(shifts, neighbors, lanes, out);
}

#endif

}  // namespace netdecomp::kernels
