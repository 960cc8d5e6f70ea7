#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "corpus.hpp"
#include "spatial/pipeline.hpp"

using namespace spatial;

namespace {

Expr num(double v) { return Expr::make_number(v); }
Expr ref(std::string name) { return Expr::make_ref({{std::move(name), std::nullopt}}); }
Expr bin(std::string op, Expr a, Expr b) { return Expr::make_binary(std::move(op), std::move(a), std::move(b)); }

SourceLocation error_at(std::string_view text) {
  try {
    parse_pipeline(text);
  } catch (const ParseError& e) {
    return e.where();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {0, 0};
}

std::string error_text(std::string_view text) {
  try {
    parse_pipeline(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

// Random trees over attribute names, literals and every operator.
Expr random_expr(std::mt19937_64& rng, int depth) {
  static const char* kNames[] = {"volume", "width", "height", "label", "virtual", "moving", "x", "cnt"};
  static const char* kOps[] = {"AND", "OR", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/"};
  const auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  if (depth == 0 || pick(4) == 0) {
    switch (pick(4)) {
      case 0: return num(pick(1000) / 8.0);
      case 1: return Expr::make_string(std::string("s") + std::to_string(pick(50)));
      case 2: return Expr::make_bool(pick(2) == 1);
      default: return ref(kNames[pick(8)]);
    }
  }
  switch (pick(6)) {
    case 0: return Expr::make_not(random_expr(rng, depth - 1));
    case 1: return Expr::make_negate(random_expr(rng, depth - 1));
    case 2: return Expr::make_call(pick(2) ? "max" : "count", {ref("objects")});
    default: return bin(kOps[pick(12)], random_expr(rng, depth - 1), random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST(Parser, WholeCorpusParsesAndRoundTrips) {
  const auto start = std::chrono::steady_clock::now();
  for (auto text : corpus::kPipelines) {
    SCOPED_TRACE(std::string(text));
    const auto program = parse_pipeline(text);
    ASSERT_FALSE(program.operations.empty());
    const std::string canonical = to_string(program);
    const auto again = parse_pipeline(canonical);
    EXPECT_EQ(again, program) << canonical;
    EXPECT_EQ(to_string(again), canonical);
  }
  for (auto text : corpus::kLogExamples) EXPECT_EQ(parse_pipeline(to_string(parse_pipeline(text))), parse_pipeline(text));
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Parser, IntroductoryExampleStructure) {
  const auto p = parse_pipeline(corpus::kPipelines[0]);
  ASSERT_EQ(p.operations.size(), 3u);
  const auto& f = std::get<FilterOp>(p.operations[0]);
  EXPECT_EQ(f.condition, bin(">", ref("volume"), num(0.4)));
  const auto& pick = std::get<PickOp>(p.operations[1]);
  EXPECT_EQ(pick.relations, bin("AND", ref("left"), ref("above")));
  EXPECT_TRUE(std::holds_alternative<LogOp>(p.operations[2]));
  ASSERT_EQ(p.locations.size(), 3u);
  EXPECT_EQ(p.locations[1].line, 2);
  EXPECT_EQ(p.locations[1].column, 3);
  EXPECT_EQ(operation_name(p.operations[1]), "pick");
}

TEST(Parser, OperatorPrecedence) {
  EXPECT_EQ(parse_expression("a OR b AND c"), bin("OR", ref("a"), bin("AND", ref("b"), ref("c"))));
  EXPECT_EQ(parse_expression("NOT a AND b"), bin("AND", Expr::make_not(ref("a")), ref("b")));
  EXPECT_EQ(parse_expression("x + y * 2 > 3"), bin(">", bin("+", ref("x"), bin("*", ref("y"), num(2))), num(3)));
  EXPECT_EQ(parse_expression("x - y - z"), bin("-", bin("-", ref("x"), ref("y")), ref("z")));
  EXPECT_EQ(parse_expression("a && b || c"), bin("OR", bin("AND", ref("a"), ref("b")), ref("c")));
  EXPECT_EQ(parse_expression("(a OR b) AND c"), bin("AND", bin("OR", ref("a"), ref("b")), ref("c")));
  EXPECT_EQ(parse_expression("-x * 2"), bin("*", Expr::make_negate(ref("x")), num(2)));
}

TEST(Parser, ReferencePathsAndCalls) {
  const auto e = parse_expression("objects[0].volume");
  ASSERT_EQ(e.kind, Expr::Kind::ref);
  ASSERT_EQ(e.path.size(), 2u);
  EXPECT_EQ(e.path[0].index, 0);
  EXPECT_EQ(e.path[1].name, "volume");
  const auto c = parse_expression("max(objects.volume)");
  EXPECT_EQ(c.kind, Expr::Kind::call);
  EXPECT_EQ(c.text, "max");
  EXPECT_THROW(parse_expression("mode(objects.volume)"), ParseError);
}

TEST(Parser, RandomExpressionsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 5);
    const std::string text = to_string(e);
    Expr back;
    try {
      back = parse_expression(text);
    } catch (const ParseError& err) {
      ADD_FAILURE() << text << " -> " << err.what();
      continue;
    }
    EXPECT_EQ(back, e) << text << " reprinted as " << to_string(back);
  }
}

TEST(Parser, OperationDetails) {
  const auto adjust = std::get<AdjustOp>(parse_pipeline("adjust(nearby limit 4.0; max gap 0.1)").operations[0]);
  ASSERT_EQ(adjust.directives.size(), 2u);
  EXPECT_EQ(adjust.directives[0].words, (std::vector<std::string>{"nearby", "limit"}));
  EXPECT_EQ(adjust.directives[1].values, (std::vector<double>{0.1}));

  const auto sort = std::get<SortOp>(parse_pipeline("sort(disjoint.delta > -2)").operations[0]);
  EXPECT_EQ(sort.key.size(), 2u);
  EXPECT_EQ(sort.order, '>');
  EXPECT_EQ(sort.steps, -2);

  const auto slice = std::get<SliceOp>(parse_pipeline("slice(2..3)").operations[0]);
  EXPECT_EQ(slice.first, 2);
  EXPECT_EQ(slice.last, 3);
  EXPECT_EQ(std::get<SliceOp>(parse_pipeline("slice(-1)").operations[0]).first, -1);

  const auto select = std::get<SelectOp>(parse_pipeline("select(ontop ? label == 'table')").operations[0]);
  EXPECT_EQ(select.relations, ref("ontop"));
  ASSERT_TRUE(select.condition);

  const auto produce = std::get<ProduceOp>(parse_pipeline("produce(by : label = 'corner'; h = 0.02)").operations[0]);
  EXPECT_EQ(produce.kind, "by");
  ASSERT_EQ(produce.assignments.size(), 2u);
  EXPECT_EQ(produce.assignments[1].value, num(0.02));

  const auto isa = std::get<IsaOp>(parse_pipeline("isa(Computer OR Monitor)").operations[0]);
  EXPECT_EQ(isa.classes, (std::vector<std::string>{"Computer", "Monitor"}));
  EXPECT_EQ(std::get<IsaOp>(parse_pipeline("isa('double bed')").operations[0]).classes,
            (std::vector<std::string>{"double bed"}));

  const auto deduce = std::get<DeduceOp>(parse_pipeline("deduce(topology visibility)").operations[0]);
  EXPECT_EQ(deduce.categories.size(), 2u);
  EXPECT_EQ(std::get<LogOp>(parse_pipeline("log(3D near left)").operations[0]).tokens.size(), 3u);
  EXPECT_TRUE(parse_pipeline("").operations.empty());
}

TEST(Parser, ErrorsCarryLineAndColumn) {
  {
    const auto at = error_at("filter(volume > 0.4)\n| frobnicate()");
    EXPECT_EQ(at.line, 2);
    EXPECT_EQ(at.column, 3);
  }
  {
    const auto at = error_at("filter(volume > 0.4) pick(near)");
    EXPECT_EQ(at.line, 1);
    EXPECT_EQ(at.column, 22);
  }
  {
    const auto at = error_at("slice(0)");
    EXPECT_EQ(at.column, 7);
  }
  {
    const auto at = error_at("filter(1 < x < 3)");
    EXPECT_EQ(at.column, 14);
  }
  {
    const auto at = error_at("filter(volume >\n  )");
    EXPECT_EQ(at.line, 2);
    EXPECT_EQ(at.column, 3);
  }
  EXPECT_NE(error_text("slice(0)").find("1-based"), std::string::npos);
  EXPECT_NE(error_text("filter(1 < x < 3)").find("chained"), std::string::npos);
  EXPECT_NE(error_text("frob()").find("unknown operation 'frob'"), std::string::npos);
}

TEST(Parser, SemanticChecksAtParseTime) {
  EXPECT_NE(error_text("filter(near)").find("spatial relation"), std::string::npos);
  EXPECT_NE(error_text("pick(wobbly)").find("unknown predicate"), std::string::npos);
  EXPECT_NE(error_text("sort(near.size)").find("delta"), std::string::npos);
  EXPECT_NE(error_text("map(id = 'x')").find("ids"), std::string::npos);
  EXPECT_NE(error_text("map(volume = 2)").find("read-only"), std::string::npos);
  EXPECT_NE(error_text("deduce(magic)").find("category"), std::string::npos);
  EXPECT_NE(error_text("produce(zz : label = 'x')").find("produce kind"), std::string::npos);
  EXPECT_NE(error_text("adjust(turbo 3)").find("directive"), std::string::npos);
  EXPECT_NE(error_text("log(weird)").find("log()"), std::string::npos);
  EXPECT_NE(error_text("sort(volume > 0)").find("zero"), std::string::npos);
  EXPECT_THROW(parse_pipeline("filter(volume > 0.4) |"), ParseError);
  EXPECT_THROW(parse_pipeline("filter('unterminated)"), ParseError);
  EXPECT_NO_THROW(parse_pipeline("produce(copy : id = 'copy'; y = 2.0)"));
}
