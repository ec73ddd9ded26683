#include "iplc/procedures.hpp"

#include <cmath>

#include "iplc/error.hpp"

namespace iplc {

void ProcedureRegistry::add(const std::string& name, std::size_t arity, NativeProcedure fn) {
  if (!entries_.emplace(name, Entry{arity, std::move(fn)}).second) {
    throw Error(ErrorCode::DuplicateProcedure, "procedure '" + name + "' already registered");
  }
}

bool ProcedureRegistry::contains(std::string_view name) const { return find(name) != nullptr; }

const ProcedureRegistry::Entry* ProcedureRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> ProcedureRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

Value ProcedureRegistry::call(std::string_view name, std::span<const Value> args) const {
  const Entry* e = find(name);
  if (!e) throw Error(ErrorCode::UnknownProcedure, "no procedure '" + std::string(name) + "'");
  if (args.size() != e->arity) {
    throw Error(ErrorCode::ArityMismatch, "procedure '" + std::string(name) + "' takes " +
                                              std::to_string(e->arity) + " arguments, got " +
                                              std::to_string(args.size()));
  }
  try {
    return e->fn(args);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(ErrorCode::ProcedureFailed, "procedure '" + std::string(name) + "' failed: " + ex.what());
  }
}

namespace {

double number(const Value& v, std::string_view proc) {
  if (!v.isNumber()) {
    throw Error(ErrorCode::TypeError,
                std::string(proc) + " expects numbers, got " + std::string(kindName(v.kind())));
  }
  return v.asNumber();
}

Value times(const Value& a, const Value& b) {
  if (a.isInt() && b.isInt()) return Value{a.asInt() * b.asInt()};
  return Value{number(a, "square") * number(b, "square")};
}

}  // namespace

ProcedureRegistry standardProcedures() {
  ProcedureRegistry r;
  r.add("square", 1, [](std::span<const Value> a) { return times(a[0], a[0]); });
  r.add("cube", 1, [](std::span<const Value> a) { return times(times(a[0], a[0]), a[0]); });
  r.add("hypot", 2, [](std::span<const Value> a) {
    return Value{std::hypot(number(a[0], "hypot"), number(a[1], "hypot"))};
  });
  r.add("slow_square", 1, [](std::span<const Value> a) {
    // Deterministic busy work so that a worker is observably "in progress".
    volatile std::int64_t sink = 0;
    for (int i = 0; i < 20000; ++i) sink = sink + i;
    return times(a[0], a[0]);
  });
  r.add("concat", 2, [](std::span<const Value> a) {
    auto str = [](const Value& v) { return v.isStr() ? v.asStr() : v.text(); };
    return Value{str(a[0]) + str(a[1])};
  });
  r.add("fail", 1, [](std::span<const Value>) -> Value {
    throw std::runtime_error("deliberate failure");
  });
  return r;
}

}  // namespace iplc
