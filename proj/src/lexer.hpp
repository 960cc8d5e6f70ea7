#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spatial/errors.hpp"
#include "spatial/pipeline.hpp"

namespace spatial::detail {

enum class TokenKind { identifier, number, string, symbol, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // identifier name, symbol spelling, decoded string
  double number = 0.0;
  SourceLocation where;
};

std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the helpers the recursive-descent parsers
/// share.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::end; }

  bool is_symbol(std::string_view s, std::size_t ahead = 0) const;
  bool is_word(std::string_view w, std::size_t ahead = 0) const;
  bool accept_symbol(std::string_view s);
  const Token& expect_symbol(std::string_view s);
  const Token& expect_identifier(std::string_view what);
  long long expect_integer(std::string_view what);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] static void fail_at(const Token& token, const std::string& message);

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// Expression grammar, stopping at the first token that cannot continue it.
Expr parse_expr(TokenStream& ts);
/// Reference path `name[idx].member...`.
std::vector<RefSegment> parse_ref_path(TokenStream& ts);

std::string describe(const Token& token);

}  // namespace spatial::detail
