#include "netdecomp/kernels/lane_degree.hpp"

namespace netdecomp::kernels {

void lane_degree_scalar(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out) {
  for (std::size_t l = 0; l < lanes; ++l) out[l] = 0;
  for (std::size_t i = 0; i < neighbors; ++i) {
    const std::uint8_t* row = shifts + i * lanes;
    for (std::size_t l = 0; l < lanes; ++l) {
      if (row[l] < kGone) out[l] += std::uint64_t{1} << row[l];
    }
  }
}

}  // namespace netdecomp::kernels
