#pragma once

#include <cstdint>
#include <initializer_list>

namespace ellipsoid_lab {

/// SplitMix64 finalizer: z += 0x9E3779B97F4A7C15, then two xor-shift-multiply
/// rounds (constants 0xBF58476D1CE4E5B9, 0x94D049BB133111EB) and a final
/// xor-shift by 31.
std::uint64_t splitmix64(std::uint64_t x);

/// Fixed avalanche mixer for deriving RNG substreams.
///
///   h = splitmix64(w[0])
///   for k = 1..n-1:  h = splitmix64(h ^ splitmix64(w[k] + k))
///
/// Golden values are frozen in tests/test_seeding.cpp; changing this function
/// changes every derived seed and therefore every stored experiment.
std::uint64_t mix64(std::initializer_list<std::uint64_t> words);

}  // namespace ellipsoid_lab
