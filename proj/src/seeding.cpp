#include "crossvar/seeding.hpp"

namespace crossvar {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
  return mix_seed(master, replicate);
}

std::uint64_t component_seed(std::uint64_t seed, std::uint64_t component) noexcept {
  return mix_seed(seed, 0xc0ffee0000000000ULL + component);
}

}  // namespace crossvar
