#pragma once

// Small random generators for property tests. Fixed seeds keep failures
// reproducible; each test seeds its own engine.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iplc/context.hpp"

namespace iplc::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniformInt(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Tag randomTag(Rng& rng) {
  switch (uniformInt(rng, 0, 5)) {
    case 0: return Tag{std::string(1, static_cast<char>('a' + uniformInt(rng, 0, 3)))};
    case 1: return Tag{static_cast<double>(uniformInt(rng, -8, 8)) / 4.0};
    case 2: return Tag{uniformInt(rng, 0, 1) == 1};
    default: return Tag{uniformInt(rng, -3, 3)};
  }
}

/// Small contexts over a fixed pool of dimension names so that collisions
/// between independently generated contexts are frequent.
inline Context randomContext(Rng& rng, std::size_t maxDims = 3, bool intOnly = false) {
  static const char* kDims[] = {"d", "e", "f", "t", "x"};
  Context::Bindings b;
  auto n = uniformInt(rng, 0, static_cast<std::int64_t>(maxDims));
  for (std::int64_t i = 0; i < n; ++i) {
    DimensionName d{kDims[uniformInt(rng, 0, 4)]};
    b.insert_or_assign(d, intOnly ? Tag{uniformInt(rng, 0, 2)} : randomTag(rng));
  }
  return Context{std::move(b)};
}

inline ContextSet randomContextSet(Rng& rng, std::size_t maxSize = 5) {
  ContextSet s;
  auto n = uniformInt(rng, 0, static_cast<std::int64_t>(maxSize));
  for (std::int64_t i = 0; i < n; ++i) s.insert(randomContext(rng, 2, true));
  return s;
}

}  // namespace iplc::testing
