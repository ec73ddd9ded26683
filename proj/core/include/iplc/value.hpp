#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iplc/context.hpp"

namespace iplc {

class TextCursor;

/// End-of-data marker that terminates finite tuple streams.
struct Eod {
  friend bool operator==(Eod, Eod) noexcept { return true; }
};

/// An identifier evaluated to itself: a dimension, function (or procedure)
/// or built-in operator.
struct DimRef {
  std::string name;
  friend bool operator==(const DimRef&, const DimRef&) = default;
};
struct FunRef {
  std::string name;
  friend bool operator==(const FunRef&, const FunRef&) = default;
};
struct OpRef {
  std::string name;
  friend bool operator==(const OpRef&, const OpRef&) = default;
};

class Value;

/// Result of applying an expression over a context set: a canonical
/// (sorted, duplicate-free) set of values.
class ValueSet {
 public:
  ValueSet();
  explicit ValueSet(std::vector<Value> items);

  const std::vector<Value>& items() const noexcept { return *items_; }
  std::size_t size() const noexcept;

  friend bool operator==(const ValueSet& a, const ValueSet& b);

 private:
  std::shared_ptr<const std::vector<Value>> items_;
};

class Value {
 public:
  enum class Kind : std::uint8_t { Int, Float, Bool, Str, Ctx, CtxSet, Dim, Fun, Op, Eod, Set };
  using Storage = std::variant<std::int64_t, double, bool, std::string, Context, ContextSet,
                               DimRef, FunRef, OpRef, Eod, ValueSet>;

  Value() : data_(std::int64_t{0}) {}
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  Value(T v) : data_(static_cast<std::int64_t>(v)) {}
  Value(double v) : data_(v) {}
  Value(bool v) : data_(v) {}
  Value(std::string v) : data_(std::move(v)) {}
  Value(const char* v) : data_(std::string(v)) {}
  Value(Context v) : data_(std::move(v)) {}
  Value(ContextSet v) : data_(std::move(v)) {}
  Value(DimRef v) : data_(std::move(v)) {}
  Value(FunRef v) : data_(std::move(v)) {}
  Value(OpRef v) : data_(std::move(v)) {}
  Value(Eod v) : data_(v) {}
  Value(ValueSet v) : data_(std::move(v)) {}

  static Value fromTag(const Tag& tag);

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  const Storage& data() const noexcept { return data_; }

  bool isInt() const noexcept { return kind() == Kind::Int; }
  bool isFloat() const noexcept { return kind() == Kind::Float; }
  bool isNumber() const noexcept { return isInt() || isFloat(); }
  bool isBool() const noexcept { return kind() == Kind::Bool; }
  bool isStr() const noexcept { return kind() == Kind::Str; }
  bool isCtx() const noexcept { return kind() == Kind::Ctx; }
  bool isCtxSet() const noexcept { return kind() == Kind::CtxSet; }
  bool isDim() const noexcept { return kind() == Kind::Dim; }
  bool isFun() const noexcept { return kind() == Kind::Fun; }
  bool isOp() const noexcept { return kind() == Kind::Op; }
  bool isEod() const noexcept { return kind() == Kind::Eod; }
  bool isSet() const noexcept { return kind() == Kind::Set; }

  std::int64_t asInt() const { return std::get<std::int64_t>(data_); }
  double asFloat() const { return std::get<double>(data_); }
  /// Int or Float widened to double.
  double asNumber() const { return isInt() ? static_cast<double>(asInt()) : asFloat(); }
  bool asBool() const { return std::get<bool>(data_); }
  const std::string& asStr() const { return std::get<std::string>(data_); }
  const Context& asCtx() const { return std::get<Context>(data_); }
  const ContextSet& asCtxSet() const { return std::get<ContextSet>(data_); }
  const DimRef& asDim() const { return std::get<DimRef>(data_); }
  const FunRef& asFun() const { return std::get<FunRef>(data_); }
  const OpRef& asOp() const { return std::get<OpRef>(data_); }
  const ValueSet& asSet() const { return std::get<ValueSet>(data_); }

  /// Ground scalars convert to tags; Eod raises EodArith, others TypeError.
  Tag toTag() const;

  /// Canonical text, e.g. `42`, `2.5`, `"s"`, `[t:1]`, `{[t:1]}`,
  /// `dim(t)`, `fun(f)`, `op(add)`, `eod`, `{|1,2|}`.
  std::string text() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Storage data_;
};

std::string_view kindName(Value::Kind kind) noexcept;

/// Total order over values for canonical sets: kind first, then contents.
int canonicalCompare(const Value& a, const Value& b) noexcept;

Value readValue(TextCursor& cur);
Value parseValue(std::string_view text);

}  // namespace iplc
