#pragma once

#include <cstdint>

#include "hisim/trace.hpp"

namespace hisim::fixtures {

inline constexpr std::uint64_t kCifarSeed = 20230607;
inline constexpr std::uint64_t kDogSeed = 20230912;

/// 10000-sample multiclass trace with the CIFAR-10 aggregates: at theta 0.607
/// 3550 offloaded, 1577 accepted-but-wrong, 71 offloaded-and-remote-wrong;
/// 3742 local errors and 500 remote errors overall.
Trace cifar_fixture(std::uint64_t seed = kCifarSeed);

/// 10000-sample binary trace: 1000 relevant (912 with p >= 0.5) and 9000
/// irrelevant (3521 with p >= 0.5).
Trace dog_fixture(std::uint64_t seed = kDogSeed);

}  // namespace hisim::fixtures
