#include <vector>

#include "doctest.h"
#include "netdecomp/kernels/lane_degree.hpp"
#include "netdecomp/rng.hpp"

using namespace netdecomp;
using namespace netdecomp::kernels;

TEST_CASE("scalar kernel on a hand-checked row") {
  // Two neighbors, three lanes: desires 1/2 and 1/4, one neighbor gone in lane 2.
  const std::vector<std::uint8_t> shifts{47, 46, 47, 46, 47, kGone};
  std::vector<std::uint64_t> out(3);
  lane_degree_scalar(shifts.data(), 2, 3, out.data());
  const std::uint64_t half = std::uint64_t{1} << 47, quarter = std::uint64_t{1} << 46;
  CHECK(out[0] == half + quarter);
  CHECK(out[1] == quarter + half);
  CHECK(out[2] == half);
  lane_degree_scalar(shifts.data(), 0, 3, out.data());
  CHECK(out == std::vector<std::uint64_t>(3, 0));
}

TEST_CASE("vector kernel equals scalar kernel") {
  INFO("active backend: " << backend_name(active_backend()));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Stream rng(seed, 1, 2);
    const std::size_t lanes = 1 + rng.below(70);
    const std::size_t nbrs = rng.below(40);
    std::vector<std::uint8_t> shifts(lanes * nbrs);
    for (auto& s : shifts) {
      const auto r = rng.below(10);
      s = r == 0 ? static_cast<std::uint8_t>(kGone + rng.below(100)) : static_cast<std::uint8_t>(rng.below(48));
    }
    std::vector<std::uint64_t> a(lanes, 7), b(lanes, 9), c(lanes, 11);
    lane_degree_scalar(shifts.data(), nbrs, lanes, a.data());
    lane_degree_avx2(shifts.data(), nbrs, lanes, b.data());
    lane_degree(shifts.data(), nbrs, lanes, c.data());
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("dispatch reports a backend consistent with the CPU") {
  if (!avx2_available()) CHECK(active_backend() == Backend::kScalar);
  else CHECK(active_backend() == Backend::kAvx2);
}
