#include <array>
#include <cctype>

#include "iplc/compiler.hpp"

namespace iplc {

namespace {

constexpr std::array<std::string_view, 20> kKeywords{
    "where", "end", "dimension", "procedure", "if",    "then", "else",  "fby", "wvr",    "asa",
    "upon",  "first", "next",    "prev",      "true",  "false", "eod",  "Box", "select", "in"};

// Longest first so that `<=` wins over `<`.
constexpr std::array<std::string_view, 21> kOperators{
    "==", "!=", "<=", ">=", "&&", "||", "..", "+", "-", "*", "/",
    "%",  "<",  ">",  "!",  "=",  "#",  "@",  ".", "|", ":"};

constexpr std::string_view kPunct = "()[]{},;";

bool isKeyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skipTrivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{TokenKind::Eof, "<eof>", line_, col_});
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int line, int col) const {
    throw CompileFailure({CompileError{CompilePhase::Lex, ErrorCode::LexError, msg, {line, col}}});
  }

  char at(std::size_t i) const { return i < src_.size() ? src_[i] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipTrivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && at(pos_ + 1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && at(pos_ + 1) == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (!(at(pos_) == '*' && at(pos_ + 1) == '/')) {
          if (pos_ >= src_.size()) fail("unterminated block comment", line, col);
          advance();
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    char c = src_[pos_];
    auto finish = [&](TokenKind kind) {
      return Token{kind, std::string(src_.substr(start, pos_ - start)), line, col};
    };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (std::isalnum(static_cast<unsigned char>(at(pos_))) || at(pos_) == '_') advance();
      Token t = finish(TokenKind::Identifier);
      if (isKeyword(t.lexeme)) t.kind = TokenKind::Keyword;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(line, col);
    if (c == '"') {
      advance();
      while (true) {
        if (pos_ >= src_.size() || at(pos_) == '\n') fail("unterminated string literal", line, col);
        char s = src_[pos_];
        advance();
        if (s == '"') break;
        if (s == '\\') {
          if (pos_ >= src_.size()) fail("unterminated string literal", line, col);
          char e = src_[pos_];
          if (std::string_view("\"\\ntru").find(e) == std::string_view::npos) {
            fail(std::string("unknown escape '\\") + e + "'", line_, col_ - 1);
          }
          advance();
        }
      }
      return finish(TokenKind::String);
    }
    if (kPunct.find(c) != std::string_view::npos) {
      advance();
      return finish(TokenKind::Punct);
    }
    for (auto op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        return finish(TokenKind::Operator);
      }
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c))
                            ? std::string(1, c)
                            : "\\x" + std::to_string(static_cast<unsigned char>(c));
    fail("illegal character '" + shown + "'", line, col);
  }

  Token number(int line, int col) {
    std::size_t start = pos_;
    bool isFloat = false;
    while (std::isdigit(static_cast<unsigned char>(at(pos_)))) advance();
    if (at(pos_) == '.' && std::isdigit(static_cast<unsigned char>(at(pos_ + 1)))) {
      isFloat = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(at(pos_)))) advance();
    }
    if (at(pos_) == 'e' || at(pos_) == 'E') {
      std::size_t q = pos_ + 1;
      if (at(q) == '+' || at(q) == '-') ++q;
      if (std::isdigit(static_cast<unsigned char>(at(q)))) {
        isFloat = true;
        while (pos_ < q) advance();
        while (std::isdigit(static_cast<unsigned char>(at(pos_)))) advance();
      }
    }
    if (std::isalpha(static_cast<unsigned char>(at(pos_))) || at(pos_) == '_') {
      fail("malformed number", line, col);
    }
    return Token{isFloat ? TokenKind::Float : TokenKind::Int,
                 std::string(src_.substr(start, pos_ - start)), line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view tokenKindName(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Int: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::String: return "string";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::Eof: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace iplc
