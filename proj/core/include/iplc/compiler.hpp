#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iplc/ast.hpp"
#include "iplc/error.hpp"
#include "iplc/geer.hpp"

namespace iplc {

enum class TokenKind : std::uint8_t { Identifier, Int, Float, String, Keyword, Operator, Punct, Eof };

std::string_view tokenKindName(TokenKind kind) noexcept;

struct Token {
  TokenKind kind = TokenKind::Eof;
  /// Source text of the token; string tokens keep their quotes and escapes.
  std::string lexeme;
  int line = 1;
  int column = 1;

  SourcePos pos() const noexcept { return {line, column}; }
  bool is(TokenKind k, std::string_view text) const noexcept { return kind == k && lexeme == text; }
};

enum class CompilePhase : std::uint8_t { Lex, Parse, Analyze };

struct CompileError {
  CompilePhase phase;
  ErrorCode code;
  std::string message;
  SourcePos pos;

  /// `line:column: <phase> error: message`
  std::string text() const;
};

/// Thrown by every compiler entry point. Carries all diagnostics found; the
/// Error code is that of the first one.
class CompileFailure : public Error {
 public:
  explicit CompileFailure(std::vector<CompileError> errors);

  const std::vector<CompileError>& errors() const noexcept { return errors_; }

 private:
  std::vector<CompileError> errors_;
};

std::vector<Token> tokenize(std::string_view source);

struct ParsedProgram {
  ExprPtr root;
  std::vector<Decl> decls;
};

/// `E where Q end` or a bare `E`.
ParsedProgram parse(const std::vector<Token>& tokens);
ParsedProgram parseSource(std::string_view source);
/// A single declaration (`x = e;`, `dimension t;`, ...), for the REPL.
std::vector<Decl> parseDeclarations(std::string_view source);

/// Checked program: nested `where` names renamed apart (`name__k`), tuple and
/// Box dimensions that were never declared added as global dimensions.
struct AnalyzedProgram {
  ExprPtr root;
  std::vector<Decl> globals;

  std::set<DimensionName> dimensions() const;
  /// Every declared dimension bound to tag 0.
  Context initialPoint() const;
};

AnalyzedProgram analyze(const ParsedProgram& program);

/// Rewrites first/next/prev/fby/wvr/asa/upon into `@`/`#` forms. Fresh names
/// introduced for wvr/asa/upon avoid every identifier in `reserved`.
ExprPtr lower(const ExprPtr& e, std::set<std::string>& reserved);
ExprPtr lower(const ExprPtr& e);

struct CompileOptions {
  /// Keep the surface intensional operators (used to check lowering).
  bool lowerOperators = true;
};

Geer buildGeer(const AnalyzedProgram& program, const CompileOptions& options = {});
Geer compile(std::string_view source, const CompileOptions& options = {});

}  // namespace iplc
