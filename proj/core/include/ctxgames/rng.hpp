#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ctxgames {

using Rng = std::mt19937_64;

/// Child seed for the stream (role, index) under `master`. Streams are keyed
/// by name rather than creation order, so adding or removing one agent never
/// shifts another agent's randomness.
std::uint64_t derive_seed(std::uint64_t master, std::string_view role, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::string_view role, std::uint64_t index) {
  return Rng(derive_seed(master, role, index));
}

}  // namespace ctxgames
