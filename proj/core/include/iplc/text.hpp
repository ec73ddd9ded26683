#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "iplc/context.hpp"

namespace iplc {

/// Quotes and escapes a string the way canonical texts render them.
std::string quote(std::string_view raw);

/// Shortest round-trip decimal for a double, always recognisable as a float.
std::string formatFloat(double v);

/// Hand-written scanner shared by every canonical text format (contexts,
/// values, GEER s-expressions, wire fields).
class TextCursor {
 public:
  explicit TextCursor(std::string_view text) : text_(text) {}

  std::size_t position() const noexcept { return pos_; }
  bool atEnd() const noexcept { return pos_ >= text_.size(); }
  std::string_view rest() const noexcept { return text_.substr(pos_); }

  void skipSpace() noexcept;
  /// Next non-space character, or '\0' at end.
  char peek() noexcept;
  bool consume(char c) noexcept;
  bool consumeWord(std::string_view word) noexcept;
  void expect(char c);
  void expectEnd();

  std::string readIdentifier();
  std::string readQuoted();
  /// Bare run of characters up to whitespace or one of `stops`.
  std::string readAtom(std::string_view stops = "()[]{},:");

  bool atNumber() noexcept;
  /// Integer or float literal, optionally signed.
  Tag readNumber();
  Tag readTag();
  Context readContext();
  ContextSet readContextSet();

  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace iplc
