#include "iplc/builtins.hpp"

#include <array>

namespace iplc {

namespace {

constexpr std::array kOps{
    BuiltinOp{"add", "+", 2, 2, OpFamily::Arith},
    BuiltinOp{"sub", "-", 2, 2, OpFamily::Arith},
    BuiltinOp{"mul", "*", 2, 2, OpFamily::Arith},
    BuiltinOp{"div", "/", 2, 2, OpFamily::Arith},
    BuiltinOp{"mod", "%", 2, 2, OpFamily::Arith},
    BuiltinOp{"neg", "-", 1, 1, OpFamily::Arith},
    BuiltinOp{"eq", "==", 2, 2, OpFamily::Compare},
    BuiltinOp{"ne", "!=", 2, 2, OpFamily::Compare},
    BuiltinOp{"lt", "<", 2, 2, OpFamily::Compare},
    BuiltinOp{"le", "<=", 2, 2, OpFamily::Compare},
    BuiltinOp{"gt", ">", 2, 2, OpFamily::Compare},
    BuiltinOp{"ge", ">=", 2, 2, OpFamily::Compare},
    BuiltinOp{"and", "&&", 2, 2, OpFamily::Logic},
    BuiltinOp{"or", "||", 2, 2, OpFamily::Logic},
    BuiltinOp{"not", "!", 1, 1, OpFamily::Logic},
    BuiltinOp{"iseod", "", 1, 1, OpFamily::Stream},
    BuiltinOp{"merge", "", 2, 2, OpFamily::Context},
    BuiltinOp{"override", "", 2, 2, OpFamily::Context},
    BuiltinOp{"project", "", 1, -1, OpFamily::Context},
    BuiltinOp{"dimdiff", "", 1, -1, OpFamily::Context},
    BuiltinOp{"union", "", 2, 2, OpFamily::Set},
    BuiltinOp{"intersect", "", 2, 2, OpFamily::Set},
    BuiltinOp{"difference", "", 2, 2, OpFamily::Set},
};

}  // namespace

std::span<const BuiltinOp> builtinOps() noexcept { return kOps; }

const BuiltinOp* findBuiltin(std::string_view name) noexcept {
  for (const auto& op : kOps) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

const BuiltinOp* findInfix(std::string_view symbol) noexcept {
  for (const auto& op : kOps) {
    if (op.symbol == symbol && op.minArity == 2) return &op;
  }
  return nullptr;
}

}  // namespace iplc
