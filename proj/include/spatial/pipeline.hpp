#pragma once

// The pipe-delimited inference language: syntax tree, parser, printer and
// evaluator.
//
//   filter(volume > 0.4) | pick(left AND above) | log()

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spatial/core.hpp"
#include "spatial/errors.hpp"

namespace spatial {

class Taxonomy;

// ---- expressions ------------------------------------------------------------

/// One step of a reference path: `objects[0]` is {"objects", 0}.
struct RefSegment {
  std::string name;
  std::optional<long long> index;

  friend bool operator==(const RefSegment&, const RefSegment&) = default;
};

struct Expr {
  enum class Kind { number, string, boolean, ref, call, logical_not, negate, binary };

  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;  // string literal, call name, or binary operator
  bool boolean = false;
  std::vector<RefSegment> path;
  std::vector<Expr> args;  // call arguments, unary operand, binary operands

  static Expr make_number(double v);
  static Expr make_string(std::string s);
  static Expr make_bool(bool b);
  static Expr make_ref(std::vector<RefSegment> path);
  static Expr make_call(std::string name, std::vector<Expr> args);
  static Expr make_not(Expr operand);
  static Expr make_negate(Expr operand);
  /// `op` is one of AND OR == != < <= > >= + - * /.
  static Expr make_binary(std::string op, Expr lhs, Expr rhs);

  friend bool operator==(const Expr&, const Expr&) = default;
};

std::string to_string(const Expr& expr);

/// Parses a standalone expression (used by tests and tools).
Expr parse_expression(std::string_view text);

// ---- operations -------------------------------------------------------------

struct Directive {
  std::vector<std::string> words;  // e.g. {"max", "gap"}, {"sector", "fixed"}
  std::vector<double> values;

  friend bool operator==(const Directive&, const Directive&) = default;
};

struct Assignment {
  std::vector<std::string> target;  // `confidence.label` -> {"confidence", "label"}
  Expr value;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AdjustOp {
  std::vector<Directive> directives;
  friend bool operator==(const AdjustOp&, const AdjustOp&) = default;
};
struct DeduceOp {
  std::vector<std::string> categories;
  friend bool operator==(const DeduceOp&, const DeduceOp&) = default;
};
struct FilterOp {
  Expr condition;
  friend bool operator==(const FilterOp&, const FilterOp&) = default;
};
struct IsaOp {
  std::vector<std::string> classes;  // alternatives joined by OR
  friend bool operator==(const IsaOp&, const IsaOp&) = default;
};
struct PickOp {
  Expr relations;
  friend bool operator==(const PickOp&, const PickOp&) = default;
};
struct SelectOp {
  Expr relations;
  std::optional<Expr> condition;  // evaluated on the related object
  friend bool operator==(const SelectOp&, const SelectOp&) = default;
};
struct SortOp {
  std::vector<RefSegment> key;  // attribute, or predicate.metric
  std::optional<char> order;    // '<' ascending (default) or '>'
  std::optional<long long> steps;  // backtrace depth as written; |steps| is used
  friend bool operator==(const SortOp&, const SortOp&) = default;
};
struct SliceOp {
  long long first = 1;
  std::optional<long long> last;
  friend bool operator==(const SliceOp&, const SliceOp&) = default;
};
struct CalcOp {
  std::vector<Assignment> assignments;
  friend bool operator==(const CalcOp&, const CalcOp&) = default;
};
struct MapOp {
  std::vector<Assignment> assignments;
  friend bool operator==(const MapOp&, const MapOp&) = default;
};
struct ProduceOp {
  std::string kind;  // copy, group, on, at, by, in, or a sector code
  std::vector<Assignment> assignments;
  friend bool operator==(const ProduceOp&, const ProduceOp&) = default;
};
struct BacktraceOp {
  std::optional<long long> steps;
  friend bool operator==(const BacktraceOp&, const BacktraceOp&) = default;
};
struct ReloadOp {
  friend bool operator==(const ReloadOp&, const ReloadOp&) = default;
};
struct HaltOp {
  friend bool operator==(const HaltOp&, const HaltOp&) = default;
};
struct LogOp {
  std::vector<std::string> tokens;  // `3D`, `base` and predicate names
  friend bool operator==(const LogOp&, const LogOp&) = default;
};

using Operation = std::variant<AdjustOp, DeduceOp, FilterOp, IsaOp, PickOp, SelectOp, SortOp, SliceOp, CalcOp,
                               MapOp, ProduceOp, BacktraceOp, ReloadOp, HaltOp, LogOp>;

std::string_view operation_name(const Operation& op);
std::string to_string(const Operation& op);

struct PipelineProgram {
  std::vector<Operation> operations;
  std::vector<SourceLocation> locations;  // where each operation starts

  friend bool operator==(const PipelineProgram& a, const PipelineProgram& b) {
    return a.operations == b.operations;
  }
};

/// Throws ParseError (with line/column) on any syntax or validation error.
PipelineProgram parse_pipeline(std::string_view text);

/// Canonical text; parse_pipeline(to_string(p)) == p.
std::string to_string(const PipelineProgram& program);

// ---- evaluation -------------------------------------------------------------

struct LogArtifact {
  enum class Kind { summary, base, mermaid, scene };

  std::size_t step = 0;  // 1-based
  Kind kind = Kind::summary;
  std::string content;
};

std::string_view to_string(LogArtifact::Kind kind);

struct EvaluationOptions {
  const Taxonomy* taxonomy = nullptr;
  std::optional<std::string> observer;
};

struct EvaluationContext {
  FactBase facts;
  AdjustmentSettings settings;
  /// Object-id lists: the initial input, then one entry per executed step.
  std::vector<std::vector<std::string>> chain;
  std::vector<std::string> produced;
  std::vector<LogArtifact> logs;
  bool halted = false;

  const std::vector<std::string>& result() const { return chain.back(); }
  const std::map<std::string, double>& variables() const { return facts.variables(); }
};

/// Runs the program over a copy of `fb`. Runtime failures raise
/// EvaluationError carrying the 1-based step.
EvaluationContext evaluate(const PipelineProgram& program, const FactBase& fb, const AdjustmentSettings& settings,
                           const EvaluationOptions& options = {});

}  // namespace spatial
