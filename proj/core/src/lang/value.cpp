#include "iplc/value.hpp"

#include <algorithm>

#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

ValueSet::ValueSet() : items_(std::make_shared<const std::vector<Value>>()) {}

ValueSet::ValueSet(std::vector<Value> items) {
  std::sort(items.begin(), items.end(),
            [](const Value& a, const Value& b) { return canonicalCompare(a, b) < 0; });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Value& a, const Value& b) { return canonicalCompare(a, b) == 0; }),
              items.end());
  items_ = std::make_shared<const std::vector<Value>>(std::move(items));
}

std::size_t ValueSet::size() const noexcept { return items_->size(); }

bool operator==(const ValueSet& a, const ValueSet& b) { return a.items() == b.items(); }

Value Value::fromTag(const Tag& tag) {
  switch (tag.kind()) {
    case Tag::Kind::Int: return Value{tag.asInt()};
    case Tag::Kind::Str: return Value{tag.asStr()};
    case Tag::Kind::Float: return Value{tag.asFloat()};
    case Tag::Kind::Bool: return Value{tag.asBool()};
  }
  return {};
}

Tag Value::toTag() const {
  switch (kind()) {
    case Kind::Int: return Tag{asInt()};
    case Kind::Float: return Tag{asFloat()};
    case Kind::Bool: return Tag{asBool()};
    case Kind::Str: return Tag{asStr()};
    case Kind::Eod: throw Error(ErrorCode::EodArith, "eod cannot be used as a tag");
    default:
      throw Error(ErrorCode::TypeError,
                  std::string(kindName(kind())) + " value " + text() + " cannot be used as a tag");
  }
}

std::string_view kindName(Value::Kind kind) noexcept {
  switch (kind) {
    case Value::Kind::Int: return "int";
    case Value::Kind::Float: return "float";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Str: return "string";
    case Value::Kind::Ctx: return "context";
    case Value::Kind::CtxSet: return "context set";
    case Value::Kind::Dim: return "dimension";
    case Value::Kind::Fun: return "function";
    case Value::Kind::Op: return "operator";
    case Value::Kind::Eod: return "eod";
    case Value::Kind::Set: return "value set";
  }
  return "?";
}

std::string Value::text() const {
  switch (kind()) {
    case Kind::Int: return std::to_string(asInt());
    case Kind::Float: return formatFloat(asFloat());
    case Kind::Bool: return asBool() ? "true" : "false";
    case Kind::Str: return quote(asStr());
    case Kind::Ctx: return asCtx().text();
    case Kind::CtxSet: return asCtxSet().text();
    case Kind::Dim: return "dim(" + asDim().name + ")";
    case Kind::Fun: return "fun(" + asFun().name + ")";
    case Kind::Op: return "op(" + asOp().name + ")";
    case Kind::Eod: return "eod";
    case Kind::Set: {
      std::string out = "{|";
      bool first = true;
      for (const auto& v : asSet().items()) {
        if (!first) out.push_back(',');
        first = false;
        out += v.text();
      }
      return out + "|}";
    }
  }
  return {};
}

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int canonicalCompare(const Value& a, const Value& b) noexcept {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Value::Kind::Int: return cmp3(a.asInt(), b.asInt());
    case Value::Kind::Float: return cmp3(a.asFloat(), b.asFloat());
    case Value::Kind::Bool: return cmp3(a.asBool(), b.asBool());
    case Value::Kind::Str: return cmp3(a.asStr(), b.asStr());
    case Value::Kind::Ctx: return canonicalCompare(a.asCtx(), b.asCtx());
    case Value::Kind::CtxSet: return canonicalCompare(a.asCtxSet(), b.asCtxSet());
    case Value::Kind::Dim: return cmp3(a.asDim().name, b.asDim().name);
    case Value::Kind::Fun: return cmp3(a.asFun().name, b.asFun().name);
    case Value::Kind::Op: return cmp3(a.asOp().name, b.asOp().name);
    case Value::Kind::Eod: return 0;
    case Value::Kind::Set: {
      const auto& x = a.asSet().items();
      const auto& y = b.asSet().items();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (int c = canonicalCompare(x[i], y[i]); c != 0) return c;
      }
      return cmp3(x.size(), y.size());
    }
  }
  return 0;
}

Value readValue(TextCursor& cur) {
  char c = cur.peek();
  if (c == '"') return Value{cur.readQuoted()};
  if (c == '[') return Value{cur.readContext()};
  if (c == '{') {
    std::string_view rest = cur.rest();
    if (rest.size() >= 2 && rest[1] == '|') {
      cur.expect('{');
      cur.expect('|');
      std::vector<Value> items;
      if (!cur.consume('|')) {
        do {
          items.push_back(readValue(cur));
        } while (cur.consume(','));
        cur.expect('|');
      }
      cur.expect('}');
      return Value{ValueSet{std::move(items)}};
    }
    return Value{cur.readContextSet()};
  }
  if (cur.atNumber()) return Value::fromTag(cur.readNumber());
  if (cur.consumeWord("true")) return Value{true};
  if (cur.consumeWord("false")) return Value{false};
  if (cur.consumeWord("eod")) return Value{Eod{}};
  auto wrapped = [&] {
    cur.expect('(');
    auto name = cur.readIdentifier();
    cur.expect(')');
    return name;
  };
  if (cur.consumeWord("dim")) return Value{DimRef{wrapped()}};
  if (cur.consumeWord("fun")) return Value{FunRef{wrapped()}};
  if (cur.consumeWord("op")) return Value{OpRef{wrapped()}};
  cur.fail("expected value");
}

Value parseValue(std::string_view text) {
  TextCursor cur(text);
  Value v = readValue(cur);
  cur.expectEnd();
  return v;
}

}  // namespace iplc
