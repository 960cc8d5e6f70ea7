#include "lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace spatial::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

constexpr std::array<std::string_view, 7> kTwoCharSymbols = {"==", "!=", "<=", ">=", "&&", "||", ".."};
constexpr std::string_view kOneCharSymbols = "=<>+-*/()[].,;:?|!";

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int column = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.where = {line, column};
    if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          while (k < text.size() && digit(text[k])) ++k;
          j = k;
        }
      }
      if (j < text.size() && ident_start(text[j])) {
        // Words such as `3D` start with a digit.
        while (j < text.size() && ident_char(text[j])) ++j;
        tok.kind = TokenKind::identifier;
        tok.text = std::string(text.substr(i, j - i));
      } else {
        tok.kind = TokenKind::number;
        tok.text = std::string(text.substr(i, j - i));
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, tok.number);
        if (ec != std::errc() || !std::isfinite(tok.number)) {
          throw ParseError(tok.where, "number '" + tok.text + "' is out of range");
        }
      }
      advance(j - i);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = TokenKind::identifier;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '\'') {
      std::size_t j = i + 1;
      std::string value;
      while (j < text.size() && text[j] != '\'') {
        if (text[j] == '\\' && j + 1 < text.size()) ++j;
        value += text[j++];
      }
      if (j >= text.size()) throw ParseError(tok.where, "unterminated string literal");
      tok.kind = TokenKind::string;
      tok.text = std::move(value);
      advance(j + 1 - i);
    } else {
      std::string_view sym;
      for (auto two : kTwoCharSymbols) {
        if (text.substr(i, 2) == two) sym = two;
      }
      if (sym.empty() && kOneCharSymbols.find(c) != std::string_view::npos) sym = text.substr(i, 1);
      if (sym.empty()) throw ParseError(tok.where, std::string("unexpected character '") + c + "'");
      tok.kind = TokenKind::symbol;
      tok.text = std::string(sym);
      advance(sym.size());
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::end;
  end.where = {line, column};
  out.push_back(end);
  return out;
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::end: return "end of input";
    case TokenKind::string: return "string '" + token.text + "'";
    default: return "'" + token.text + "'";
  }
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::is_symbol(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::symbol && t.text == s;
}

bool TokenStream::is_word(std::string_view w, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::identifier && t.text == w;
}

bool TokenStream::accept_symbol(std::string_view s) {
  if (!is_symbol(s)) return false;
  next();
  return true;
}

const Token& TokenStream::expect_symbol(std::string_view s) {
  if (!is_symbol(s)) fail("expected '" + std::string(s) + "' but found " + describe(peek()));
  return next();
}

const Token& TokenStream::expect_identifier(std::string_view what) {
  if (peek().kind != TokenKind::identifier) fail("expected " + std::string(what) + " but found " + describe(peek()));
  return next();
}

long long TokenStream::expect_integer(std::string_view what) {
  const bool negative = accept_symbol("-");
  const Token& t = peek();
  if (t.kind != TokenKind::number || t.number != std::floor(t.number) || std::abs(t.number) > 1e15) {
    fail("expected " + std::string(what) + " (an integer) but found " + describe(t));
  }
  next();
  const auto v = static_cast<long long>(t.number);
  return negative ? -v : v;
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& token, const std::string& message) { throw ParseError(token.where, message); }

}  // namespace spatial::detail
