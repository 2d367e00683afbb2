#pragma once

#include <cstdint>

namespace schedopt {

// Instance-stream tags: instance i of stream s is drawn from the generator
// seeded with derive_seed(family_seed, s, i), so sampling is deterministic
// and parallel-safe.
inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kValidationStream = 2;
inline constexpr std::uint64_t kTestStream = 3;
inline constexpr std::uint64_t kCalibrationStream = 4;

}  // namespace schedopt
