#include "iplc/context.hpp"

#include <algorithm>
#include <cctype>

#include "iplc/error.hpp"
#include "iplc/text.hpp"

namespace iplc {

bool isIdentifier(std::string_view text) noexcept {
  if (text.empty() || !std::isalpha(static_cast<unsigned char>(text.front()))) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string Tag::text() const {
  switch (kind()) {
    case Kind::Int: return std::to_string(asInt());
    case Kind::Str: return quote(asStr());
    case Kind::Float: return formatFloat(asFloat());
    case Kind::Bool: return asBool() ? "true" : "false";
  }
  return {};
}

std::string_view tagKindName(Tag::Kind kind) noexcept {
  switch (kind) {
    case Tag::Kind::Int: return "int";
    case Tag::Kind::Str: return "string";
    case Tag::Kind::Float: return "float";
    case Tag::Kind::Bool: return "bool";
  }
  return "?";
}

std::strong_ordering compareTags(const Tag& a, const Tag& b) {
  if (a.kind() != b.kind() || a.isBool()) {
    throw Error(ErrorCode::TagKindMismatch,
                "cannot order " + std::string(tagKindName(a.kind())) + " tag against " +
                    std::string(tagKindName(b.kind())) + " tag");
  }
  switch (a.kind()) {
    case Tag::Kind::Int: return a.asInt() <=> b.asInt();
    case Tag::Kind::Str: return a.asStr() <=> b.asStr();
    case Tag::Kind::Float: {
      double x = a.asFloat();
      double y = b.asFloat();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case Tag::Kind::Bool: break;
  }
  return std::strong_ordering::equal;
}

int canonicalCompare(const Tag& a, const Tag& b) noexcept {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Tag::Kind::Int: return a.asInt() < b.asInt() ? -1 : (a.asInt() > b.asInt() ? 1 : 0);
    case Tag::Kind::Str: return a.asStr().compare(b.asStr()) < 0 ? -1 : (a.asStr() == b.asStr() ? 0 : 1);
    case Tag::Kind::Float:
      return a.asFloat() < b.asFloat() ? -1 : (b.asFloat() < a.asFloat() ? 1 : 0);
    case Tag::Kind::Bool: return static_cast<int>(a.asBool()) - static_cast<int>(b.asBool());
  }
  return 0;
}

DimensionName::DimensionName(std::string name) : name_(std::move(name)) {
  if (!isIdentifier(name_)) {
    throw Error(ErrorCode::InvalidDimension, "'" + name_ + "' is not a valid dimension name");
  }
}

const Tag* Context::find(const DimensionName& d) const {
  auto it = bindings_.find(d);
  return it == bindings_.end() ? nullptr : &it->second;
}

Context Context::with(const DimensionName& d, Tag tag) const {
  Context out = *this;
  out.bindings_.insert_or_assign(d, std::move(tag));
  return out;
}

std::set<DimensionName> Context::dimensions() const {
  std::set<DimensionName> out;
  for (const auto& [d, t] : bindings_) out.insert(d);
  return out;
}

std::string Context::text() const {
  std::string out = "[";
  bool first = true;
  for (const auto& [d, t] : bindings_) {
    if (!first) out.push_back(',');
    first = false;
    out += d.str();
    out.push_back(':');
    out += t.text();
  }
  out.push_back(']');
  return out;
}

int canonicalCompare(const Context& a, const Context& b) noexcept {
  auto ia = a.bindings().begin();
  auto ib = b.bindings().begin();
  for (; ia != a.bindings().end() && ib != b.bindings().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    if (int c = canonicalCompare(ia->second, ib->second); c != 0) return c;
  }
  if (ia == a.bindings().end() && ib == b.bindings().end()) return 0;
  return ia == a.bindings().end() ? -1 : 1;
}

std::string ContextSet::text() const {
  std::string out = "{";
  bool first = true;
  for (const auto& c : elements_) {
    if (!first) out.push_back(',');
    first = false;
    out += c.text();
  }
  out.push_back('}');
  return out;
}

int canonicalCompare(const ContextSet& a, const ContextSet& b) noexcept {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (int c = canonicalCompare(*ia, *ib); c != 0) return c;
  }
  if (ia == a.end() && ib == b.end()) return 0;
  return ia == a.end() ? -1 : 1;
}

TagDomain::TagDomain(DimensionName dimension, std::vector<Tag> values)
    : dimension_(std::move(dimension)), values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::TypeError, "tag domain for '" + dimension_.str() + "' is empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (std::size_t j = i + 1; j < values_.size(); ++j) {
      if (values_[i] == values_[j]) {
        throw Error(ErrorCode::TypeError, "tag domain for '" + dimension_.str() +
                                              "' repeats " + values_[i].text());
      }
    }
  }
}

TagDomain TagDomain::range(DimensionName dimension, std::int64_t lo, std::int64_t hi) {
  std::vector<Tag> values;
  for (std::int64_t v = lo; v <= hi; ++v) values.emplace_back(v);
  return TagDomain{std::move(dimension), std::move(values)};
}

Context override(const Context& base, const Context& delta) {
  Context::Bindings out = base.bindings();
  for (const auto& [d, t] : delta.bindings()) out.insert_or_assign(d, t);
  return Context{std::move(out)};
}

Tag lookup(const Context& c, const DimensionName& d) {
  if (const Tag* t = c.find(d)) return *t;
  throw Error(ErrorCode::UnboundDimension,
              "dimension '" + d.str() + "' is not bound in " + c.text());
}

Context project(const Context& c, const std::set<DimensionName>& dims) {
  Context::Bindings out;
  for (const auto& [d, t] : c.bindings()) {
    if (dims.contains(d)) out.emplace(d, t);
  }
  return Context{std::move(out)};
}

Context dimDifference(const Context& c, const std::set<DimensionName>& dims) {
  Context::Bindings out;
  for (const auto& [d, t] : c.bindings()) {
    if (!dims.contains(d)) out.emplace(d, t);
  }
  return Context{std::move(out)};
}

Tag dot(const Context& c, const DimensionName& d) { return lookup(project(c, {d}), d); }

Context ctxMerge(const Context& a, const Context& b) {
  Context::Bindings out = a.bindings();
  for (const auto& [d, t] : b.bindings()) {
    auto [it, inserted] = out.emplace(d, t);
    if (!inserted && !(it->second == t)) {
      throw Error(ErrorCode::ConflictingTags, "dimension '" + d.str() + "' bound to " +
                                                  it->second.text() + " and " + t.text());
    }
  }
  return Context{std::move(out)};
}

ContextSet box(const std::vector<TagDomain>& domains, const ContextPredicate& predicate) {
  if (domains.empty()) throw Error(ErrorCode::TypeError, "Box needs at least one dimension");
  std::set<DimensionName> seen;
  for (const auto& dom : domains) {
    if (!seen.insert(dom.dimension()).second) {
      throw Error(ErrorCode::TypeError,
                  "Box lists dimension '" + dom.dimension().str() + "' twice");
    }
  }
  ContextSet out;
  std::vector<std::size_t> index(domains.size(), 0);
  while (true) {
    Context::Bindings b;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      b.emplace(domains[i].dimension(), domains[i].values()[index[i]]);
    }
    Context candidate{std::move(b)};
    if (predicate(candidate)) out.insert(std::move(candidate));
    // Odometer step, last dimension fastest.
    std::size_t k = domains.size();
    while (k > 0) {
      --k;
      if (++index[k] < domains[k].values().size()) break;
      index[k] = 0;
      if (k == 0) return out;
    }
  }
}

ContextSet setUnion(const ContextSet& a, const ContextSet& b) {
  ContextSet::Elements out = a.elements();
  out.insert(b.begin(), b.end());
  return ContextSet{std::move(out)};
}

ContextSet setIntersect(const ContextSet& a, const ContextSet& b) {
  ContextSet::Elements out;
  for (const auto& c : a) {
    if (b.contains(c)) out.insert(c);
  }
  return ContextSet{std::move(out)};
}

ContextSet setDifference(const ContextSet& a, const ContextSet& b) {
  ContextSet::Elements out;
  for (const auto& c : a) {
    if (!b.contains(c)) out.insert(c);
  }
  return ContextSet{std::move(out)};
}

Tag parseTag(std::string_view text) {
  TextCursor cur(text);
  Tag t = cur.readTag();
  cur.expectEnd();
  return t;
}

Context parseContext(std::string_view text) {
  TextCursor cur(text);
  Context c = cur.readContext();
  cur.expectEnd();
  return c;
}

ContextSet parseContextSet(std::string_view text) {
  TextCursor cur(text);
  ContextSet s = cur.readContextSet();
  cur.expectEnd();
  return s;
}

}  // namespace iplc
