#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace iplc {

enum class OpFamily : std::uint8_t { Arith, Compare, Logic, Stream, Context, Set };

/// A built-in operator: preloaded into every program's dictionary as an
/// (op, f) identifier. `symbol` is its infix or prefix spelling, if any.
struct BuiltinOp {
  std::string_view name;
  std::string_view symbol;
  int minArity;
  int maxArity;  // -1: variadic
  OpFamily family;
};

std::span<const BuiltinOp> builtinOps() noexcept;
const BuiltinOp* findBuiltin(std::string_view name) noexcept;
/// Binary operator by its infix symbol (`+`, `<=`, `&&`, ...).
const BuiltinOp* findInfix(std::string_view symbol) noexcept;

}  // namespace iplc
