#pragma once

#include <cstdint>

#include "levinforge/grammar.hpp"

// Shared internals of the grammar/enumeration machinery. Not installed.
namespace levinforge::internal {

// Appends production template nodes to `out` (whose names table must be the
// grammar's canonical table) and returns the new root index. Hole nodes are
// copied verbatim; callers patch them via Production::holes offsets.
int32_t instantiate_template(Program& out, const Production& pr);

// SplitMix64: seed scrambler so consecutive user seeds give decorrelated
// generator states.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform draw in [0, 1) from a 64-bit word, identical on every platform.
inline double unit_double(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace levinforge::internal
