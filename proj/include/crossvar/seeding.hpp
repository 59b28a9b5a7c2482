#pragma once

#include <cstdint>

namespace crossvar {

// Substream seeds.
//
// Every random draw in the library is made from a std::mt19937_64 engine whose
// seed is derived from a master seed by the fixed mixing function below:
//
//   mix(a, b)               = splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15))
//   replicate_seed(m, r)    = mix(m, r)
//   component_seed(s, c)    = mix(s, 0xc0ffee0000000000 + c)
//
// A replicate r of an experiment with master seed m draws driving component c
// from component_seed(replicate_seed(m, r), c). The derivation never depends on
// the order in which replicates are processed.

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept;
std::uint64_t component_seed(std::uint64_t seed, std::uint64_t component) noexcept;

}  // namespace crossvar
