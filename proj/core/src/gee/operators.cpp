#include <cmath>

#include "interpreter.hpp"
#include "iplc/builtins.hpp"
#include "iplc/error.hpp"

namespace iplc::detail {

namespace {

[[noreturn]] void typeError(std::string_view op, const Value& v) {
  throw Error(ErrorCode::TypeError, "'" + std::string(op) + "' cannot take " +
                                        std::string(kindName(v.kind())) + " " + v.text());
}

template <typename F>
std::int64_t checked(F overflows, std::int64_t x, std::int64_t y, std::string_view op) {
  std::int64_t r = 0;
  if (overflows(x, y, &r)) throw Error(ErrorCode::TypeError, "integer overflow in '" + std::string(op) + "'");
  return r;
}

Value arith(std::string_view op, const Value& a, const Value& b) {
  if (!a.isNumber()) typeError(op, a);
  if (!b.isNumber()) typeError(op, b);
  bool zero = b.isInt() ? b.asInt() == 0 : b.asFloat() == 0.0;
  if ((op == "div" || op == "mod") && zero) {
    throw Error(ErrorCode::DivisionByZero, "'" + std::string(op) + "' by zero");
  }
  if (a.isInt() && b.isInt()) {
    std::int64_t x = a.asInt(), y = b.asInt();
    auto add = [](auto p, auto q, auto* r) { return __builtin_add_overflow(p, q, r); };
    auto sub = [](auto p, auto q, auto* r) { return __builtin_sub_overflow(p, q, r); };
    auto mul = [](auto p, auto q, auto* r) { return __builtin_mul_overflow(p, q, r); };
    if (op == "add") return checked(add, x, y, op);
    if (op == "sub") return checked(sub, x, y, op);
    if (op == "mul") return checked(mul, x, y, op);
    if (x == INT64_MIN && y == -1) throw Error(ErrorCode::TypeError, "integer overflow in '" + std::string(op) + "'");
    if (op == "div") return x / y;
    return x % y;
  }
  double x = a.asNumber(), y = b.asNumber();
  if (op == "add") return x + y;
  if (op == "sub") return x - y;
  if (op == "mul") return x * y;
  if (op == "div") return x / y;
  return std::fmod(x, y);
}

bool equal(const Value& a, const Value& b) {
  if (a.isNumber() && b.isNumber()) {
    if (a.isInt() && b.isInt()) return a.asInt() == b.asInt();
    return a.asNumber() == b.asNumber();
  }
  return a == b;
}

bool ordered(std::string_view op, const Value& a, const Value& b) {
  std::partial_ordering c = std::partial_ordering::unordered;
  if (a.isNumber() && b.isNumber()) {
    c = a.isInt() && b.isInt() ? a.asInt() <=> b.asInt() : a.asNumber() <=> b.asNumber();
  } else if (a.isStr() && b.isStr()) {
    c = a.asStr() <=> b.asStr();
  } else {
    typeError(op, a.isNumber() || a.isStr() ? b : a);
  }
  if (op == "lt") return c < 0;
  if (op == "le") return c <= 0;
  if (op == "gt") return c > 0;
  return c >= 0;
}

bool boolean(std::string_view op, const Value& v) {
  if (!v.isBool()) typeError(op, v);
  return v.asBool();
}

const Context& context(std::string_view op, const Value& v) {
  if (!v.isCtx()) typeError(op, v);
  return v.asCtx();
}

ContextSet contextSet(std::string_view op, const Value& v) {
  if (v.isCtx()) return ContextSet{v.asCtx()};
  if (!v.isCtxSet()) typeError(op, v);
  return v.asCtxSet();
}

std::set<DimensionName> dims(std::string_view op, std::span<const Value> vs) {
  std::set<DimensionName> out;
  for (const auto& v : vs) {
    if (!v.isDim()) typeError(op, v);
    out.insert(DimensionName{v.asDim().name});
  }
  return out;
}

bool sub(std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_sub_overflow(x, y, r); }

}  // namespace

Value applyBuiltin(std::string_view name, std::span<const Value> args) {
  const BuiltinOp* op = findBuiltin(name);
  if (!op) throw Error(ErrorCode::TypeError, "no built-in operator '" + std::string(name) + "'");
  auto n = static_cast<int>(args.size());
  if (n < op->minArity || (op->maxArity >= 0 && n > op->maxArity)) {
    throw Error(ErrorCode::ArityMismatch, "'" + std::string(name) + "' applied to " +
                                              std::to_string(n) + " arguments");
  }
  if (name == "iseod") return args[0].isEod();
  if (name == "eq") return equal(args[0], args[1]);
  if (name == "ne") return !equal(args[0], args[1]);
  for (const auto& a : args) {
    if (a.isEod()) throw Error(ErrorCode::EodArith, "'" + std::string(name) + "' applied to eod");
  }
  switch (op->family) {
    case OpFamily::Arith:
      if (name == "neg") {
        if (args[0].isInt()) return checked(sub, std::int64_t{0}, args[0].asInt(), name);
        if (args[0].isFloat()) return -args[0].asFloat();
        typeError(name, args[0]);
      }
      return arith(name, args[0], args[1]);
    case OpFamily::Compare: return ordered(name, args[0], args[1]);
    case OpFamily::Logic:
      if (name == "not") return !boolean(name, args[0]);
      if (name == "and") return boolean(name, args[0]) && boolean(name, args[1]);
      return boolean(name, args[0]) || boolean(name, args[1]);
    case OpFamily::Context:
      if (name == "merge") return ctxMerge(context(name, args[0]), context(name, args[1]));
      if (name == "override") return override(context(name, args[0]), context(name, args[1]));
      if (name == "project") return project(context(name, args[0]), dims(name, args.subspan(1)));
      return dimDifference(context(name, args[0]), dims(name, args.subspan(1)));
    case OpFamily::Set: {
      ContextSet a = contextSet(name, args[0]), b = contextSet(name, args[1]);
      if (name == "union") return setUnion(a, b);
      if (name == "intersect") return setIntersect(a, b);
      return setDifference(a, b);
    }
    case OpFamily::Stream: break;
  }
  throw Error(ErrorCode::TypeError, "operator '" + std::string(name) + "' has no implementation");
}

}  // namespace iplc::detail
