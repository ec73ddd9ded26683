#include "iplc/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

#include "iplc/error.hpp"

namespace iplc {

std::string quote(std::string_view raw) {
  std::string out;
  out.reserve(raw.size() + 2);
  out.push_back('"');
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string formatFloat(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

void TextCursor::skipSpace() noexcept {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

char TextCursor::peek() noexcept {
  skipSpace();
  return atEnd() ? '\0' : text_[pos_];
}

bool TextCursor::consume(char c) noexcept {
  if (peek() != c) return false;
  ++pos_;
  return true;
}

bool TextCursor::consumeWord(std::string_view word) noexcept {
  skipSpace();
  if (text_.substr(pos_, word.size()) != word) return false;
  std::size_t after = pos_ + word.size();
  if (after < text_.size()) {
    char n = text_[after];
    if (std::isalnum(static_cast<unsigned char>(n)) || n == '_') return false;
  }
  pos_ = after;
  return true;
}

void TextCursor::expect(char c) {
  if (!consume(c)) fail(std::string("expected '") + c + "'");
}

void TextCursor::expectEnd() {
  skipSpace();
  if (!atEnd()) fail("unexpected trailing input");
}

void TextCursor::fail(const std::string& what) const {
  throw Error(ErrorCode::SyntaxError,
              what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
}

std::string TextCursor::readIdentifier() {
  skipSpace();
  std::size_t start = pos_;
  if (atEnd() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected identifier");
  while (pos_ < text_.size() &&
         (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
    ++pos_;
  }
  return std::string(text_.substr(start, pos_ - start));
}

std::string TextCursor::readQuoted() {
  expect('"');
  std::string out;
  while (true) {
    if (atEnd()) fail("unterminated string");
    char c = text_[pos_++];
    if (c == '"') break;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (atEnd()) fail("unterminated escape");
    char e = text_[pos_++];
    switch (e) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case 'u': {
        if (pos_ + 4 > text_.size()) fail("short \\u escape");
        unsigned code = 0;
        auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + 4, code, 16);
        if (ec != std::errc{} || p != text_.data() + pos_ + 4 || code > 0x7f) fail("bad \\u escape");
        out.push_back(static_cast<char>(code));
        pos_ += 4;
        break;
      }
      default: fail("unknown escape");
    }
  }
  return out;
}

std::string TextCursor::readAtom(std::string_view stops) {
  skipSpace();
  std::size_t start = pos_;
  while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
         stops.find(text_[pos_]) == std::string_view::npos) {
    ++pos_;
  }
  if (pos_ == start) fail("expected atom");
  return std::string(text_.substr(start, pos_ - start));
}

bool TextCursor::atNumber() noexcept {
  char c = peek();
  if (std::isdigit(static_cast<unsigned char>(c))) return true;
  if (c == '-' && pos_ + 1 < text_.size()) {
    char n = text_[pos_ + 1];
    return std::isdigit(static_cast<unsigned char>(n)) || text_.substr(pos_, 4) == "-inf";
  }
  return text_.substr(pos_, 3) == "inf" || text_.substr(pos_, 3) == "nan";
}

Tag TextCursor::readNumber() {
  skipSpace();
  if (consumeWord("nan")) return Tag{std::nan("")};
  if (consumeWord("inf")) return Tag{HUGE_VAL};
  if (text_.substr(pos_, 4) == "-inf") {
    pos_ += 4;
    return Tag{-HUGE_VAL};
  }
  std::size_t start = pos_;
  std::size_t p = pos_;
  if (p < text_.size() && text_[p] == '-') ++p;
  std::size_t digits = p;
  while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
  if (p == digits) fail("expected number");
  bool isFloat = false;
  if (p + 1 < text_.size() && text_[p] == '.' &&
      std::isdigit(static_cast<unsigned char>(text_[p + 1]))) {
    isFloat = true;
    ++p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
  }
  if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
    std::size_t q = p + 1;
    if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
    if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
      isFloat = true;
      p = q;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    }
  }
  const char* first = text_.data() + start;
  const char* last = text_.data() + p;
  if (isFloat) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail("bad float literal");
    pos_ = p;
    return Tag{v};
  }
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail("integer literal out of range");
  pos_ = p;
  return Tag{v};
}

Tag TextCursor::readTag() {
  char c = peek();
  if (c == '"') return Tag{readQuoted()};
  if (consumeWord("true")) return Tag{true};
  if (consumeWord("false")) return Tag{false};
  if (atNumber()) return readNumber();
  fail("expected tag");
}

Context TextCursor::readContext() {
  expect('[');
  Context::Bindings bindings;
  if (consume(']')) return Context{std::move(bindings)};
  do {
    std::string dim = readIdentifier();
    expect(':');
    Tag tag = readTag();
    if (!bindings.emplace(DimensionName{dim}, std::move(tag)).second) {
      fail("dimension '" + dim + "' bound twice");
    }
  } while (consume(','));
  expect(']');
  return Context{std::move(bindings)};
}

ContextSet TextCursor::readContextSet() {
  expect('{');
  ContextSet out;
  if (consume('}')) return out;
  do {
    out.insert(readContext());
  } while (consume(','));
  expect('}');
  return out;
}

}  // namespace iplc
