#include "dynsym/rng.hpp"

#include <array>

namespace dynsym {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  const std::array<std::uint32_t, 5> words = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x64796e73u};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace dynsym
