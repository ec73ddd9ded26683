#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "iplc/value.hpp"

namespace iplc {

using NativeProcedure = std::function<Value(std::span<const Value>)>;

/// Native stand-ins for the foreign-language procedures a program declares
/// with `procedure name(...)`. Calling one is a procedural demand.
class ProcedureRegistry {
 public:
  struct Entry {
    std::size_t arity;
    NativeProcedure fn;
  };

  /// Throws DuplicateProcedure when `name` is taken.
  void add(const std::string& name, std::size_t arity, NativeProcedure fn);
  bool contains(std::string_view name) const;
  const Entry* find(std::string_view name) const;
  std::vector<std::string> names() const;

  /// UnknownProcedure, ArityMismatch, or ProcedureFailed when the native code
  /// throws something other than an iplc::Error.
  Value call(std::string_view name, std::span<const Value> args) const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

/// square, cube, hypot, slow_square (busy work), concat, and fail (always
/// throws): enough for the corpus and the tier tests.
ProcedureRegistry standardProcedures();

}  // namespace iplc
