#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace iplc {

/// Letter followed by letters, digits or underscores.
bool isIdentifier(std::string_view text) noexcept;

/// A coordinate along one dimension: integer, string, float or boolean.
///
/// Equality is structural, so `Tag{1}` and `Tag{1.0}` differ. Ordering is
/// only defined inside one kind; `compareTags` rejects mixed kinds.
class Tag {
 public:
  enum class Kind : std::uint8_t { Int, Str, Float, Bool };

  Tag() : value_(std::int64_t{0}) {}
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  Tag(T v) : value_(static_cast<std::int64_t>(v)) {}
  Tag(double v) : value_(v) {}
  Tag(bool v) : value_(v) {}
  Tag(std::string v) : value_(std::move(v)) {}
  Tag(const char* v) : value_(std::string(v)) {}

  Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
  bool isInt() const noexcept { return kind() == Kind::Int; }
  bool isStr() const noexcept { return kind() == Kind::Str; }
  bool isFloat() const noexcept { return kind() == Kind::Float; }
  bool isBool() const noexcept { return kind() == Kind::Bool; }

  std::int64_t asInt() const { return std::get<std::int64_t>(value_); }
  const std::string& asStr() const { return std::get<std::string>(value_); }
  double asFloat() const { return std::get<double>(value_); }
  bool asBool() const { return std::get<bool>(value_); }

  /// Canonical text: decimal integer, quoted string, `true`/`false`, or the
  /// shortest round-trip float (always containing `.` or an exponent).
  std::string text() const;

  friend bool operator==(const Tag&, const Tag&) = default;

 private:
  std::variant<std::int64_t, std::string, double, bool> value_;
};

std::string_view tagKindName(Tag::Kind kind) noexcept;

/// Ordering for same-kind tags. Throws TagKindMismatch for mixed kinds and
/// for booleans, which carry no order.
std::strong_ordering compareTags(const Tag& a, const Tag& b);

/// Total order used only for canonical storage: kind first, then value.
int canonicalCompare(const Tag& a, const Tag& b) noexcept;

class DimensionName {
 public:
  /// Throws InvalidDimension unless `name` is an identifier.
  explicit DimensionName(std::string name);
  DimensionName(const char* name) : DimensionName(std::string(name)) {}

  const std::string& str() const noexcept { return name_; }

  friend auto operator<=>(const DimensionName&, const DimensionName&) = default;

 private:
  std::string name_;
};

/// A point in the context space: a finite map from dimension to tag.
/// Bindings are kept sorted by dimension name.
class Context {
 public:
  using Bindings = std::map<DimensionName, Tag>;

  Context() = default;
  explicit Context(Bindings bindings) : bindings_(std::move(bindings)) {}
  Context(std::initializer_list<std::pair<const DimensionName, Tag>> init)
      : bindings_(init) {}

  const Bindings& bindings() const noexcept { return bindings_; }
  bool empty() const noexcept { return bindings_.empty(); }
  std::size_t size() const noexcept { return bindings_.size(); }
  bool contains(const DimensionName& d) const { return bindings_.contains(d); }
  const Tag* find(const DimensionName& d) const;

  /// Copy with `d` bound to `tag`.
  Context with(const DimensionName& d, Tag tag) const;
  std::set<DimensionName> dimensions() const;

  /// `[d1:v1,d2:v2]`, dimensions in lexicographic order.
  std::string text() const;

  friend bool operator==(const Context&, const Context&) = default;

 private:
  Bindings bindings_;
};

int canonicalCompare(const Context& a, const Context& b) noexcept;

struct CanonicalContextLess {
  bool operator()(const Context& a, const Context& b) const noexcept {
    return canonicalCompare(a, b) < 0;
  }
};

class ContextSet {
 public:
  using Elements = std::set<Context, CanonicalContextLess>;

  ContextSet() = default;
  ContextSet(std::initializer_list<Context> init) : elements_(init) {}
  explicit ContextSet(Elements elements) : elements_(std::move(elements)) {}

  void insert(Context c) { elements_.insert(std::move(c)); }
  bool contains(const Context& c) const { return elements_.contains(c); }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }
  const Elements& elements() const noexcept { return elements_; }

  /// `{[..],[..]}` in canonical element order.
  std::string text() const;

  friend bool operator==(const ContextSet& a, const ContextSet& b) {
    return a.elements_ == b.elements_;
  }

 private:
  Elements elements_;
};

int canonicalCompare(const ContextSet& a, const ContextSet& b) noexcept;

/// Finite, ordered, duplicate-free set of tags a Box may enumerate.
class TagDomain {
 public:
  TagDomain(DimensionName dimension, std::vector<Tag> values);

  /// Integer range lo..hi inclusive.
  static TagDomain range(DimensionName dimension, std::int64_t lo, std::int64_t hi);

  const DimensionName& dimension() const noexcept { return dimension_; }
  const std::vector<Tag>& values() const noexcept { return values_; }

 private:
  DimensionName dimension_;
  std::vector<Tag> values_;
};

// Context calculus.

/// Right-biased union: bindings of `delta` win.
Context override(const Context& base, const Context& delta);
Tag lookup(const Context& c, const DimensionName& d);
Context project(const Context& c, const std::set<DimensionName>& dims);
/// Removes the given dimensions.
Context dimDifference(const Context& c, const std::set<DimensionName>& dims);
Tag dot(const Context& c, const DimensionName& d);
/// Union of bindings; throws ConflictingTags when a shared dimension differs.
Context ctxMerge(const Context& a, const Context& b);

using ContextPredicate = std::function<bool(const Context&)>;

/// Cross product of the domains filtered by `predicate`. Dimensions must be
/// pairwise distinct and the list non-empty.
ContextSet box(const std::vector<TagDomain>& domains, const ContextPredicate& predicate);

ContextSet setUnion(const ContextSet& a, const ContextSet& b);
ContextSet setIntersect(const ContextSet& a, const ContextSet& b);
ContextSet setDifference(const ContextSet& a, const ContextSet& b);

// Canonical text readers. All throw SyntaxError on malformed input and accept
// insignificant whitespace.
Tag parseTag(std::string_view text);
Context parseContext(std::string_view text);
ContextSet parseContextSet(std::string_view text);

}  // namespace iplc
