#pragma once

// Effective degree over bit-packed parallel MIS runs. For one node, `shifts`
// holds one byte per (neighbor, lane), row-major by neighbor: 48 - e for a
// neighbor whose desire is 2^-e in that lane, or 64 and above for a neighbor
// that no longer counts. out[l] = sum over neighbors of 2^shift, that is the
// lane's effective degree in fixed point with 48 fractional bits.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace netdecomp::kernels {

inline constexpr int kDesireFracBits = 48;
inline constexpr std::uint8_t kGone = 64;

void lane_degree_scalar(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out);
void lane_degree_avx2(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out);

enum class Backend { kScalar, kAvx2 };

/// True if the CPU and the build support the AVX2 path.
bool avx2_available();
/// Backend picked at first use: AVX2 when available.
Backend active_backend();
std::string_view backend_name(Backend b);
/// Routes to the active backend.
void lane_degree(const std::uint8_t* shifts, std::size_t neighbors, std::size_t lanes, std::uint64_t* out);

}  // namespace netdecomp::kernels
