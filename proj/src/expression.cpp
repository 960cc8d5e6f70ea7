#include <set>

#include "lexer.hpp"
#include "spatial/io.hpp"
#include "spatial/pipeline.hpp"

namespace spatial {

Expr Expr::make_number(double v) {
  Expr e;
  e.kind = Kind::number;
  e.number = v;
  return e;
}

Expr Expr::make_string(std::string s) {
  Expr e;
  e.kind = Kind::string;
  e.text = std::move(s);
  return e;
}

Expr Expr::make_bool(bool b) {
  Expr e;
  e.kind = Kind::boolean;
  e.boolean = b;
  return e;
}

Expr Expr::make_ref(std::vector<RefSegment> path) {
  Expr e;
  e.kind = Kind::ref;
  e.path = std::move(path);
  return e;
}

Expr Expr::make_call(std::string name, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::call;
  e.text = std::move(name);
  e.args = std::move(args);
  return e;
}

Expr Expr::make_not(Expr operand) {
  Expr e;
  e.kind = Kind::logical_not;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::make_negate(Expr operand) {
  if (operand.kind == Kind::number) return make_number(-operand.number);
  Expr e;
  e.kind = Kind::negate;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::make_binary(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::binary;
  e.text = std::move(op);
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

namespace {

const std::set<std::string, std::less<>> kFunctions = {"count", "min", "max", "sum", "average", "avg", "median"};

bool is_keyword(std::string_view w, std::string_view upper) {
  if (w == upper) return true;
  if (w.size() != upper.size()) return false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != static_cast<char>(upper[i] - 'A' + 'a')) return false;
  }
  return true;
}

bool is_reserved(std::string_view w) {
  for (auto k : {"AND", "OR", "NOT", "TRUE", "FALSE"}) {
    if (is_keyword(w, k)) return true;
  }
  return false;
}

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string path_text(const std::vector<RefSegment>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += path[i].name;
    if (path[i].index) out += "[" + std::to_string(*path[i].index) + "]";
  }
  return out;
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: return format_number(e.number);
    case Expr::Kind::string: return quote(e.text);
    case Expr::Kind::boolean: return e.boolean ? "TRUE" : "FALSE";
    case Expr::Kind::ref: return path_text(e.path);
    case Expr::Kind::call: {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + to_string(e.args[i]);
      return out + ")";
    }
    case Expr::Kind::logical_not: {
      const Expr& x = e.args[0];
      return "NOT " + (x.kind == Expr::Kind::binary ? "(" + to_string(x) + ")" : to_string(x));
    }
    case Expr::Kind::negate: {
      const Expr& x = e.args[0];
      const bool bare = x.kind == Expr::Kind::ref || x.kind == Expr::Kind::call;
      return "-" + (bare ? to_string(x) : "(" + to_string(x) + ")");
    }
    case Expr::Kind::binary: {
      // Any nested binary operand is parenthesized; this keeps the printed
      // form unambiguous without tracking associativity.
      const bool logical = e.text == "AND" || e.text == "OR";
      auto side = [logical](const Expr& x) {
        const bool wrap = x.kind == Expr::Kind::binary || (!logical && x.kind == Expr::Kind::logical_not);
        return wrap ? "(" + to_string(x) + ")" : to_string(x);
      };
      return side(e.args[0]) + " " + e.text + " " + side(e.args[1]);
    }
  }
  return {};
}

namespace detail {

namespace {

Expr parse_or(TokenStream& ts);

Expr parse_primary(TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case TokenKind::number: {
      ts.next();
      return Expr::make_number(t.number);
    }
    case TokenKind::string: {
      ts.next();
      return Expr::make_string(t.text);
    }
    case TokenKind::identifier: {
      if (is_keyword(t.text, "TRUE") || is_keyword(t.text, "FALSE")) {
        const bool value = is_keyword(t.text, "TRUE");
        ts.next();
        return Expr::make_bool(value);
      }
      if (is_reserved(t.text)) ts.fail("unexpected keyword " + describe(t));
      if (ts.is_symbol("(", 1)) {
        const Token name = ts.next();
        if (!kFunctions.count(name.text)) TokenStream::fail_at(name, "unknown function '" + name.text + "'");
        ts.next();
        std::vector<Expr> args;
        if (!ts.is_symbol(")")) {
          args.push_back(parse_or(ts));
          while (ts.accept_symbol(",")) args.push_back(parse_or(ts));
        }
        ts.expect_symbol(")");
        if (args.size() != 1) TokenStream::fail_at(name, "function '" + name.text + "' takes one argument");
        return Expr::make_call(name.text, std::move(args));
      }
      return Expr::make_ref(parse_ref_path(ts));
    }
    case TokenKind::symbol:
      if (ts.accept_symbol("(")) {
        Expr inner = parse_or(ts);
        ts.expect_symbol(")");
        return inner;
      }
      break;
    case TokenKind::end: break;
  }
  ts.fail("expected a value but found " + describe(t));
}

Expr parse_unary(TokenStream& ts) {
  if (ts.accept_symbol("-")) return Expr::make_negate(parse_unary(ts));
  if (ts.accept_symbol("+")) return parse_unary(ts);
  return parse_primary(ts);
}

Expr parse_multiplicative(TokenStream& ts) {
  Expr lhs = parse_unary(ts);
  while (ts.is_symbol("*") || ts.is_symbol("/")) {
    std::string op = ts.next().text;
    lhs = Expr::make_binary(std::move(op), std::move(lhs), parse_unary(ts));
  }
  return lhs;
}

Expr parse_additive(TokenStream& ts) {
  Expr lhs = parse_multiplicative(ts);
  while (ts.is_symbol("+") || ts.is_symbol("-")) {
    std::string op = ts.next().text;
    lhs = Expr::make_binary(std::move(op), std::move(lhs), parse_multiplicative(ts));
  }
  return lhs;
}

Expr parse_comparison(TokenStream& ts) {
  Expr lhs = parse_additive(ts);
  for (const char* op : {"==", "!=", "<=", ">=", "<", ">", "="}) {
    if (ts.is_symbol(op)) {
      const Token tok = ts.next();
      // A lone `=` inside a condition is read as equality.
      std::string name = tok.text == "=" ? "==" : tok.text;
      Expr rhs = parse_additive(ts);
      for (const char* again : {"==", "!=", "<=", ">=", "<", ">"}) {
        if (ts.is_symbol(again)) ts.fail("comparisons cannot be chained; add parentheses");
      }
      return Expr::make_binary(std::move(name), std::move(lhs), std::move(rhs));
    }
  }
  return lhs;
}

Expr parse_not(TokenStream& ts) {
  const Token& t = ts.peek();
  if ((t.kind == TokenKind::identifier && is_keyword(t.text, "NOT")) || ts.is_symbol("!")) {
    ts.next();
    return Expr::make_not(parse_not(ts));
  }
  return parse_comparison(ts);
}

bool at_word(const TokenStream& ts, std::string_view upper) {
  const Token& t = ts.peek();
  return t.kind == TokenKind::identifier && is_keyword(t.text, upper);
}

Expr parse_and(TokenStream& ts) {
  Expr lhs = parse_not(ts);
  while (at_word(ts, "AND") || ts.is_symbol("&&")) {
    ts.next();
    lhs = Expr::make_binary("AND", std::move(lhs), parse_not(ts));
  }
  return lhs;
}

Expr parse_or(TokenStream& ts) {
  Expr lhs = parse_and(ts);
  while (at_word(ts, "OR") || ts.is_symbol("||")) {
    ts.next();
    lhs = Expr::make_binary("OR", std::move(lhs), parse_and(ts));
  }
  return lhs;
}

}  // namespace

Expr parse_expr(TokenStream& ts) { return parse_or(ts); }

std::vector<RefSegment> parse_ref_path(TokenStream& ts) {
  std::vector<RefSegment> path;
  while (true) {
    const Token& name = ts.expect_identifier("a name");
    if (is_reserved(name.text)) TokenStream::fail_at(name, "unexpected keyword " + describe(name));
    RefSegment seg{name.text, std::nullopt};
    if (ts.accept_symbol("[")) {
      seg.index = ts.expect_integer("an index");
      ts.expect_symbol("]");
    }
    path.push_back(std::move(seg));
    if (!ts.is_symbol(".")) break;
    ts.next();
  }
  return path;
}

}  // namespace detail

Expr parse_expression(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  Expr e = detail::parse_expr(ts);
  if (!ts.at_end()) ts.fail("unexpected " + detail::describe(ts.peek()) + " after expression");
  return e;
}

}  // namespace spatial
