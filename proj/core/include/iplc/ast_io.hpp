#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iplc/ast.hpp"

namespace iplc {

class TextCursor;

/// Source-syntax rendering. Every compound sub-expression is parenthesised,
/// so the output parses back to the same tree.
std::string printExpr(const ExprPtr& e);
std::string printDecl(const Decl& d);
/// `root where decls end`, or just `root` when there are no declarations.
std::string printProgram(const ExprPtr& root, const std::vector<Decl>& decls);

/// Canonical s-expression form used inside GEER files, e.g.
/// `(op (id add) (id x) (lit 1))`.
std::string toSexpr(const ExprPtr& e);
std::string toSexpr(const Decl& d);
std::string toSexpr(const std::optional<DomainExpr>& dom);

ExprPtr readSexpr(TextCursor& cur);
Decl readSexprDecl(TextCursor& cur);
std::optional<DomainExpr> readSexprDomain(TextCursor& cur);
ExprPtr parseSexpr(std::string_view text);

}  // namespace iplc
