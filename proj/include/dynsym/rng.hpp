#pragma once

#include <cstdint>
#include <random>

namespace dynsym {

// Independent generator for (seed, index). Work is split into fixed-size
// chunks indexed from zero, so results do not depend on the worker count.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

}  // namespace dynsym
