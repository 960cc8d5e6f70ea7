#include <algorithm>
#include <functional>

#include "attributes.hpp"
#include "lexer.hpp"
#include "spatial/deduction.hpp"
#include "spatial/geometry.hpp"
#include "spatial/io.hpp"
#include "spatial/pipeline.hpp"

namespace spatial {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

namespace {

// ---- validation helpers -----------------------------------------------------

// Walks every reference in the expression together with the token where the
// expression started (references carry no location of their own).
void for_each_ref(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (e.kind == Expr::Kind::ref) fn(e);
  for (const auto& a : e.args) for_each_ref(a, fn);
}

void check_attribute_condition(const Expr& e, const Token& at, std::string_view op) {
  for_each_ref(e, [&](const Expr& ref) {
    const std::string& head = ref.path.front().name;
    if (is_predicate(head) && !detail::is_builtin_attribute(head)) {
      TokenStream::fail_at(at, "'" + head + "' is a spatial relation; " + std::string(op) +
                                   "() takes attribute conditions, use pick() or select() for relations");
    }
  });
}

void check_relation_condition(const Expr& e, const Token& at) {
  for_each_ref(e, [&](const Expr& ref) {
    const std::string& head = ref.path.front().name;
    if (is_predicate(head)) {
      if (ref.path.size() > 2 || (ref.path.size() == 2 && ref.path[1].name != "delta" && ref.path[1].name != "angle")) {
        TokenStream::fail_at(at, "relation metric must be '" + head + ".delta' or '" + head + ".angle'");
      }
      return;
    }
    if (!detail::is_builtin_attribute(head) && head != "objects") {
      TokenStream::fail_at(at, "unknown predicate '" + head + "'");
    }
  });
}

const std::vector<std::string> kOperations = {"adjust", "deduce", "filter", "isa",     "pick",   "select",
                                              "sort",   "slice",  "calc",   "map",     "produce", "backtrace",
                                              "reload", "halt",   "log"};

bool is_produce_kind(std::string_view kind) {
  if (kind == "copy" || kind == "group" || kind == "on" || kind == "at" || kind == "by" || kind == "in") return true;
  return SectorLabel::parse(kind).has_value();
}

// ---- per-operation argument parsers ----------------------------------------

double expect_number(TokenStream& ts, std::string_view what) {
  const bool negative = ts.accept_symbol("-");
  const Token& t = ts.peek();
  if (t.kind != TokenKind::number) ts.fail("expected " + std::string(what) + " but found " + detail::describe(t));
  ts.next();
  return negative ? -t.number : t.number;
}

void validate_directive(const Directive& d, const Token& at) {
  auto words_are = [&](std::initializer_list<std::string_view> expected) {
    return std::equal(d.words.begin(), d.words.end(), expected.begin(), expected.end());
  };
  const std::size_t n = d.values.size();
  bool ok = false;
  if (words_are({"max", "gap"}) || words_are({"max", "angle"}) || words_are({"long", "ratio"}) ||
      words_are({"thin", "ratio"})) {
    ok = n == 1;
  } else if (d.words.size() == 2 && d.words[0] == "sector") {
    ok = n == 1 && parse_sector_schema(d.words[1]).has_value();
  } else if (d.words.size() == 2 && d.words[0] == "nearby") {
    ok = n == 1 && parse_nearby_schema(d.words[1]).has_value();
  } else if (words_are({"north"})) {
    ok = n == 2;
  }
  if (!ok) {
    std::string text;
    for (const auto& w : d.words) text += (text.empty() ? "" : " ") + w;
    TokenStream::fail_at(at, "unknown adjust directive '" + text + "'");
  }
}

AdjustOp parse_adjust(TokenStream& ts) {
  AdjustOp op;
  if (ts.is_symbol(")")) ts.fail("adjust() needs at least one directive");
  do {
    const Token start = ts.peek();
    Directive d;
    while (ts.peek().kind == TokenKind::identifier) d.words.push_back(ts.next().text);
    if (d.words.empty()) ts.fail("expected a directive name but found " + detail::describe(ts.peek()));
    d.values.push_back(expect_number(ts, "a value"));
    while (ts.peek().kind == TokenKind::number || ts.is_symbol("-")) d.values.push_back(expect_number(ts, "a value"));
    validate_directive(d, start);
    op.directives.push_back(std::move(d));
  } while (ts.accept_symbol(";"));
  return op;
}

DeduceOp parse_deduce(TokenStream& ts) {
  DeduceOp op;
  while (ts.peek().kind == TokenKind::identifier) {
    const Token& t = ts.next();
    if (t.text != "topology" && !parse_category(t.text)) {
      TokenStream::fail_at(t, "unknown relation category '" + t.text + "'");
    }
    op.categories.push_back(t.text);
    ts.accept_symbol(",");
  }
  return op;
}

IsaOp parse_isa(TokenStream& ts) {
  IsaOp op;
  while (true) {
    const Token& t = ts.peek();
    if (t.kind == TokenKind::string) {
      op.classes.push_back(ts.next().text);
    } else if (t.kind == TokenKind::identifier && t.text != "OR" && t.text != "or") {
      // Multi-word class names are written as consecutive words.
      std::string name = ts.next().text;
      while (ts.peek().kind == TokenKind::identifier && ts.peek().text != "OR" && ts.peek().text != "or") {
        name += " " + ts.next().text;
      }
      op.classes.push_back(name);
    } else {
      ts.fail("expected a class name but found " + detail::describe(t));
    }
    if (ts.is_word("OR") || ts.is_word("or") || ts.is_symbol("||")) {
      ts.next();
      continue;
    }
    break;
  }
  return op;
}

SortOp parse_sort(TokenStream& ts) {
  SortOp op;
  const Token start = ts.peek();
  op.key = detail::parse_ref_path(ts);
  const std::string& head = op.key.front().name;
  if (is_predicate(head) && !detail::is_builtin_attribute(head)) {
    if (op.key.size() != 2 || (op.key[1].name != "delta" && op.key[1].name != "angle")) {
      TokenStream::fail_at(start, "relation sort key must be '" + head + ".delta' or '" + head + ".angle'");
    }
  }
  if (ts.is_symbol("<") || ts.is_symbol(">")) op.order = ts.next().text[0];
  if (!ts.is_symbol(")")) {
    if (!op.order) ts.fail("expected '<' or '>' but found " + detail::describe(ts.peek()));
    op.steps = ts.expect_integer("backtrace steps");
    if (*op.steps == 0) ts.fail("backtrace steps must not be zero");
  }
  return op;
}

SliceOp parse_slice(TokenStream& ts) {
  SliceOp op;
  const Token start = ts.peek();
  op.first = ts.expect_integer("a slice index");
  if (op.first == 0) TokenStream::fail_at(start, "slice indices are 1-based; 0 is not allowed");
  if (ts.accept_symbol("..")) {
    const Token end = ts.peek();
    op.last = ts.expect_integer("a range end");
    if (*op.last == 0) TokenStream::fail_at(end, "slice indices are 1-based; 0 is not allowed");
  } else if (ts.is_symbol(".")) {
    ts.fail("malformed range; use 'a..b'");
  }
  return op;
}

std::vector<Assignment> parse_assignments(TokenStream& ts, std::string_view op_name, bool allow_id) {
  std::vector<Assignment> out;
  if (ts.is_symbol(")")) return out;
  do {
    const Token start = ts.peek();
    Assignment a;
    for (const auto& seg : detail::parse_ref_path(ts)) {
      if (seg.index) TokenStream::fail_at(start, "assignment targets cannot be indexed");
      a.target.push_back(seg.name);
    }
    if (a.target.front() == "id" && !allow_id) {
      TokenStream::fail_at(start, std::string(op_name) + "() cannot change object ids");
    }
    if (detail::is_read_only_attribute(a.target.front()) && op_name != "calc") {
      TokenStream::fail_at(start, "'" + a.target.front() + "' is derived and read-only");
    }
    if (op_name == "calc" && a.target.size() != 1) TokenStream::fail_at(start, "variable names cannot be dotted");
    ts.expect_symbol("=");
    a.value = detail::parse_expr(ts);
    out.push_back(std::move(a));
  } while (ts.accept_symbol(";"));
  return out;
}

LogOp parse_log(TokenStream& ts) {
  LogOp op;
  while (ts.peek().kind == TokenKind::identifier) {
    const Token& t = ts.next();
    if (t.text != "3D" && t.text != "base" && !is_predicate(t.text)) {
      TokenStream::fail_at(t, "log() accepts 3D, base and predicate names, not '" + t.text + "'");
    }
    op.tokens.push_back(t.text);
    ts.accept_symbol(",");
  }
  return op;
}

Operation parse_operation(TokenStream& ts, const Token& name) {
  const std::string& op = name.text;
  if (op == "adjust") return parse_adjust(ts);
  if (op == "deduce") return parse_deduce(ts);
  if (op == "filter") {
    const Token start = ts.peek();
    FilterOp f{detail::parse_expr(ts)};
    check_attribute_condition(f.condition, start, "filter");
    return f;
  }
  if (op == "isa") return parse_isa(ts);
  if (op == "pick") {
    const Token start = ts.peek();
    PickOp p{detail::parse_expr(ts)};
    check_relation_condition(p.relations, start);
    return p;
  }
  if (op == "select") {
    const Token start = ts.peek();
    SelectOp s{detail::parse_expr(ts), std::nullopt};
    check_relation_condition(s.relations, start);
    if (ts.accept_symbol("?")) {
      const Token cond = ts.peek();
      s.condition = detail::parse_expr(ts);
      check_attribute_condition(*s.condition, cond, "select");
    }
    return s;
  }
  if (op == "sort") return parse_sort(ts);
  if (op == "slice") return parse_slice(ts);
  if (op == "calc") return CalcOp{parse_assignments(ts, "calc", false)};
  if (op == "map") return MapOp{parse_assignments(ts, "map", false)};
  if (op == "produce") {
    const Token& kind = ts.expect_identifier("a produce kind");
    if (!is_produce_kind(kind.text)) TokenStream::fail_at(kind, "unknown produce kind '" + kind.text + "'");
    ProduceOp p{kind.text, {}};
    if (ts.accept_symbol(":")) p.assignments = parse_assignments(ts, "produce", true);
    return p;
  }
  if (op == "backtrace") {
    BacktraceOp b;
    if (!ts.is_symbol(")")) b.steps = ts.expect_integer("backtrace steps");
    return b;
  }
  if (op == "reload") return ReloadOp{};
  if (op == "halt") return HaltOp{};
  if (op == "log") return parse_log(ts);
  TokenStream::fail_at(name, "unknown operation '" + op + "'");
}

// ---- printing ---------------------------------------------------------------

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? std::string(sep) : "") + parts[i];
  return out;
}

std::string path_text(const std::vector<RefSegment>& path) { return to_string(Expr::make_ref(path)); }

std::string assignments_text(const std::vector<Assignment>& as) {
  std::vector<std::string> parts;
  for (const auto& a : as) parts.push_back(join(a.target, ".") + " = " + to_string(a.value));
  return join(parts, "; ");
}

bool plain_word(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  if (s == "OR" || s == "or") return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

struct Printer {
  std::string operator()(const AdjustOp& op) const {
    std::vector<std::string> parts;
    for (const auto& d : op.directives) {
      std::string text = join(d.words, " ");
      for (double v : d.values) text += " " + format_number(v);
      parts.push_back(text);
    }
    return join(parts, "; ");
  }
  std::string operator()(const DeduceOp& op) const { return join(op.categories, " "); }
  std::string operator()(const FilterOp& op) const { return to_string(op.condition); }
  std::string operator()(const IsaOp& op) const {
    std::vector<std::string> parts;
    for (const auto& c : op.classes) parts.push_back(plain_word(c) ? c : to_string(Expr::make_string(c)));
    return join(parts, " OR ");
  }
  std::string operator()(const PickOp& op) const { return to_string(op.relations); }
  std::string operator()(const SelectOp& op) const {
    return to_string(op.relations) + (op.condition ? " ? " + to_string(*op.condition) : "");
  }
  std::string operator()(const SortOp& op) const {
    std::string out = path_text(op.key);
    if (op.order) out += std::string(" ") + *op.order;
    if (op.steps) out += " " + std::to_string(*op.steps);
    return out;
  }
  std::string operator()(const SliceOp& op) const {
    return std::to_string(op.first) + (op.last ? ".." + std::to_string(*op.last) : "");
  }
  std::string operator()(const CalcOp& op) const { return assignments_text(op.assignments); }
  std::string operator()(const MapOp& op) const { return assignments_text(op.assignments); }
  std::string operator()(const ProduceOp& op) const {
    return op.kind + (op.assignments.empty() ? "" : " : " + assignments_text(op.assignments));
  }
  std::string operator()(const BacktraceOp& op) const { return op.steps ? std::to_string(*op.steps) : ""; }
  std::string operator()(const ReloadOp&) const { return ""; }
  std::string operator()(const HaltOp&) const { return ""; }
  std::string operator()(const LogOp& op) const { return join(op.tokens, " "); }
};

}  // namespace

std::string_view operation_name(const Operation& op) { return kOperations[op.index()]; }

std::string to_string(const Operation& op) {
  return std::string(operation_name(op)) + "(" + std::visit(Printer{}, op) + ")";
}

PipelineProgram parse_pipeline(std::string_view text) {
  TokenStream ts(detail::tokenize(text));
  PipelineProgram program;
  if (ts.at_end()) return program;
  while (true) {
    const Token name = ts.peek();
    if (name.kind != TokenKind::identifier) ts.fail("expected an operation name but found " + detail::describe(name));
    if (std::find(kOperations.begin(), kOperations.end(), name.text) == kOperations.end()) {
      TokenStream::fail_at(name, "unknown operation '" + name.text + "'");
    }
    ts.next();
    ts.expect_symbol("(");
    Operation op = parse_operation(ts, name);
    if (!ts.is_symbol(")")) {
      ts.fail("unexpected " + detail::describe(ts.peek()) + " in " + name.text + "(); expected ')'");
    }
    ts.next();
    program.operations.push_back(std::move(op));
    program.locations.push_back(name.where);
    if (ts.at_end()) break;
    if (!ts.accept_symbol("|")) ts.fail("expected '|' between operations but found " + detail::describe(ts.peek()));
  }
  return program;
}

std::string to_string(const PipelineProgram& program) {
  std::vector<std::string> parts;
  for (const auto& op : program.operations) parts.push_back(to_string(op));
  return join(parts, " | ");
}

}  // namespace spatial
