#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iplc/ast.hpp"

namespace iplc {

enum class EntryKind : std::uint8_t { Const, Op, Dim, Func, Var, Proc };

std::string_view entryKindName(EntryKind kind) noexcept;

/// One identifier of a compiled program.
struct GeerEntry {
  EntryKind kind = EntryKind::Var;
  std::size_t arity = 0;
  std::vector<std::string> params;  // Func
  ExprPtr ast;                      // Const (a Literal), Var, Func
  std::set<DimensionName> rank;
  std::optional<DomainExpr> domain;  // Dim, when declared with `in`
};

struct ProcSignature {
  std::string name;
  std::size_t arity;
  friend bool operator==(const ProcSignature&, const ProcSignature&) = default;
};

/// Compiled program dictionary shared by every tier. Built-in operators are
/// implicit and never stored as entries.
class Geer {
 public:
  static constexpr std::string_view kFormat = "GEER/1";
  static constexpr std::string_view kRootSubject = "$root";

  std::map<std::string, GeerEntry, std::less<>> entries;
  ExprPtr root;
  std::set<DimensionName> rootRank;
  /// Hex SHA-256 of the serialized body; filled by seal() and geerParse().
  std::string programId;

  const GeerEntry* find(std::string_view name) const;
  /// Every declared dimension.
  std::set<DimensionName> dimensions() const;
  std::vector<ProcSignature> procTable() const;
  /// Rank of a var entry, or of the root for kRootSubject.
  const std::set<DimensionName>& rankOf(std::string_view subject) const;

  void seal();
};

/// Canonical bytes: `GEER/1`, one sorted line per entry, the root, then
/// `hash <sha256>` over everything before it.
std::string geerSerialize(const Geer& g);
/// Inverse of geerSerialize. Throws MalformedGeer, VersionMismatch or
/// HashMismatch.
Geer geerParse(std::string_view bytes);

/// Structural equality ignoring programId and source positions.
bool sameGeer(const Geer& a, const Geer& b);

/// Throws UnresolvedIdentifier naming the first IdRef that is neither an
/// entry, a built-in, nor bound by an enclosing parameter list or `where`.
void validateGeer(const Geer& g);

/// Dimensions an expression's value may depend on: those queried with `#d`,
/// navigated with `@ d` or indexed by a stream, closed over the identifiers
/// it references. Global entries contribute their stored rank. A dynamically
/// computed dimension contributes every declared dimension.
std::set<DimensionName> freeDims(const ExprPtr& e, const Geer& env);

/// Fixed point of freeDims over all var/func entries and the root.
void computeRanks(Geer& g);

std::string sha256Hex(std::string_view bytes);

}  // namespace iplc
