#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "attributes.hpp"
#include "spatial/deduction.hpp"
#include "spatial/geometry.hpp"
#include "spatial/io.hpp"
#include "spatial/pipeline.hpp"
#include "spatial/taxonomy.hpp"

namespace spatial {

using detail::Value;

std::string_view to_string(LogArtifact::Kind kind) {
  switch (kind) {
    case LogArtifact::Kind::summary: return "summary";
    case LogArtifact::Kind::base: return "base";
    case LogArtifact::Kind::mermaid: return "mermaid";
    case LogArtifact::Kind::scene: return "scene";
  }
  return "?";
}

namespace {

using IdList = std::vector<std::string>;

bool truthy(const Value& v) {
  struct Visitor {
    bool operator()(std::monostate) const { return false; }
    bool operator()(double d) const { return d != 0.0; }
    bool operator()(const std::string& s) const { return !s.empty(); }
    bool operator()(bool b) const { return b; }
    bool operator()(const std::vector<double>& l) const { return !l.empty(); }
  };
  return std::visit(Visitor{}, v);
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

bool is_relation_ref(const std::vector<RefSegment>& path) {
  const std::string& head = path.front().name;
  return is_predicate(head) && !detail::is_builtin_attribute(head);
}

void collect_categories(const Expr& e, std::set<Category>& out) {
  if (e.kind == Expr::Kind::ref && is_relation_ref(e.path)) {
    out.insert(*category_of_predicate(e.path.front().name));
  }
  for (const auto& a : e.args) collect_categories(a, out);
}

bool compare(const std::string& op, const Value& a, const Value& b) {
  if (std::holds_alternative<std::monostate>(a) || std::holds_alternative<std::monostate>(b)) return false;
  if (std::holds_alternative<std::vector<double>>(a) || std::holds_alternative<std::vector<double>>(b)) {
    throw InvalidArgument("cannot compare a list; use an aggregate such as count() or max()");
  }
  auto order = [&](auto x, auto y) {
    if (op == "==") return x == y;
    if (op == "!=") return x != y;
    if (op == "<") return x < y;
    if (op == "<=") return x <= y;
    if (op == ">") return x > y;
    return x >= y;
  };
  if (a.index() != b.index()) return op == "!=";
  if (const auto* x = std::get_if<double>(&a)) return order(*x, std::get<double>(b));
  if (const auto* x = std::get_if<std::string>(&a)) return order(*x, std::get<std::string>(b));
  return order(static_cast<int>(std::get<bool>(a)), static_cast<int>(std::get<bool>(b)));
}

double aggregate(const std::string& fn, std::vector<double> values) {
  if (fn == "count") return static_cast<double>(values.size());
  if (fn == "sum") return std::accumulate(values.begin(), values.end(), 0.0);
  if (values.empty()) throw InvalidArgument(fn + "() over an empty list");
  if (fn == "min") return *std::min_element(values.begin(), values.end());
  if (fn == "max") return *std::max_element(values.begin(), values.end());
  if (fn == "average" || fn == "avg") return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

struct Scope {
  const SpatialObject* subject = nullptr;
  const SpatialObject* partner = nullptr;  // object side of relation references
  const IdList* objects = nullptr;          // binding of `objects`
  bool strict = false;                      // unknown names raise instead of yielding absent
};

class Evaluator {
 public:
  Evaluator(EvaluationContext& ctx, const EvaluationOptions& options) : ctx_(ctx), options_(options) {}

  void run(const PipelineProgram& program) {
    for (std::size_t i = 0; i < program.operations.size() && !ctx_.halted; ++i) {
      step_ = i + 1;
      try {
        IdList next = std::visit([&](const auto& op) { return apply(op); }, program.operations[i]);
        ctx_.chain.push_back(std::move(next));
      } catch (const EvaluationError&) {
        throw;
      } catch (const std::exception& e) {
        throw EvaluationError(step_, std::string(operation_name(program.operations[i])) + ": " + e.what());
      }
    }
  }

 private:
  const IdList& input() const { return ctx_.chain.back(); }
  FactBase& facts() { return ctx_.facts; }

  const SpatialObject& object(const std::string& id) {
    const SpatialObject* obj = facts().find(id);
    if (obj == nullptr) throw InvalidArgument("object '" + id + "' is no longer in the fact base");
    return *obj;
  }

  IdList all_ids() const {
    IdList out;
    for (const auto& obj : ctx_.facts.objects()) out.push_back(obj.id);
    return out;
  }

  // ---- expressions ----------------------------------------------------------

  Value eval(const Expr& e, const Scope& scope) {
    switch (e.kind) {
      case Expr::Kind::number: return e.number;
      case Expr::Kind::string: return e.text;
      case Expr::Kind::boolean: return e.boolean;
      case Expr::Kind::ref: return resolve(e.path, scope);
      case Expr::Kind::logical_not: return !truthy(eval(e.args[0], scope));
      case Expr::Kind::negate: {
        const Value v = eval(e.args[0], scope);
        if (std::holds_alternative<std::monostate>(v)) return v;
        if (const auto* d = std::get_if<double>(&v)) return -*d;
        throw InvalidArgument("cannot negate " + detail::describe(v));
      }
      case Expr::Kind::call: {
        const Value v = eval(e.args[0], scope);
        std::vector<double> values;
        if (const auto* l = std::get_if<std::vector<double>>(&v)) values = *l;
        else if (const auto* d = std::get_if<double>(&v)) values = {*d};
        else if (!std::holds_alternative<std::monostate>(v)) {
          throw InvalidArgument(e.text + "() needs numbers, got " + detail::describe(v));
        }
        return aggregate(e.text, std::move(values));
      }
      case Expr::Kind::binary: return binary(e, scope);
    }
    return std::monostate{};
  }

  Value binary(const Expr& e, const Scope& scope) {
    const std::string& op = e.text;
    if (op == "AND") return truthy(eval(e.args[0], scope)) && truthy(eval(e.args[1], scope));
    if (op == "OR") return truthy(eval(e.args[0], scope)) || truthy(eval(e.args[1], scope));
    const Value a = eval(e.args[0], scope);
    const Value b = eval(e.args[1], scope);
    if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") return compare(op, a, b);
    if (std::holds_alternative<std::monostate>(a) || std::holds_alternative<std::monostate>(b)) {
      return std::monostate{};
    }
    if (op == "+" && std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
      return std::get<std::string>(a) + std::get<std::string>(b);
    }
    const auto* x = std::get_if<double>(&a);
    const auto* y = std::get_if<double>(&b);
    if (!x || !y) throw InvalidArgument("cannot apply '" + op + "' to " + detail::describe(a) + " and " + detail::describe(b));
    if (op == "+") return *x + *y;
    if (op == "-") return *x - *y;
    if (op == "*") return *x * *y;
    if (*y == 0.0) throw InvalidArgument("division by zero");
    return *x / *y;
  }

  Value resolve(const std::vector<RefSegment>& path, const Scope& scope) {
    const RefSegment& head = path.front();
    if (head.name == "objects" && scope.objects != nullptr) return resolve_objects(path, *scope.objects, scope);

    if (is_relation_ref(path)) {
      if (scope.subject == nullptr || scope.partner == nullptr) {
        throw InvalidArgument("relation '" + head.name + "' can only be used in pick() or select()");
      }
      const std::string predicate(canonical_predicate(head.name));
      const SpatialRelation* r = facts().find_relation(scope.subject->id, predicate, scope.partner->id);
      if (path.size() == 1) return r != nullptr;
      if (r == nullptr) return std::monostate{};
      return path[1].name == "delta" ? r->delta : r->angle;
    }

    if (scope.subject != nullptr) {
      Value v = detail::attribute_value(*scope.subject, derive_attributes(*scope.subject, ctx_.settings), path);
      if (!std::holds_alternative<std::monostate>(v) || detail::is_builtin_attribute(head.name)) return v;
    }
    if (path.size() == 1 && !head.index) {
      const auto& vars = ctx_.facts.variables();
      if (auto it = vars.find(head.name); it != vars.end()) return it->second;
    }
    if (scope.strict) throw InvalidArgument("unknown name '" + head.name + "'");
    return std::monostate{};
  }

  Value resolve_objects(const std::vector<RefSegment>& path, const IdList& list, const Scope& scope) {
    const RefSegment& head = path.front();
    if (head.index) {
      long long i = *head.index;
      const auto n = static_cast<long long>(list.size());
      if (i < 0) i += n;
      if (i < 0 || i >= n) {
        if (scope.strict) throw InvalidArgument("objects[" + std::to_string(*head.index) + "] is out of range");
        return std::monostate{};
      }
      if (path.size() == 1) throw InvalidArgument("objects[" + std::to_string(*head.index) + "] needs an attribute");
      const SpatialObject& obj = object(list[static_cast<std::size_t>(i)]);
      Value v = detail::attribute_value(obj, derive_attributes(obj, ctx_.settings), path, 1);
      if (scope.strict && std::holds_alternative<std::monostate>(v) && !detail::is_builtin_attribute(path[1].name)) {
        throw InvalidArgument("unknown attribute '" + path[1].name + "'");
      }
      return v;
    }
    std::vector<double> out;
    if (path.size() == 1) {
      out.assign(list.size(), 1.0);
      return out;
    }
    for (const auto& id : list) {
      const SpatialObject& obj = object(id);
      const Value v = detail::attribute_value(obj, derive_attributes(obj, ctx_.settings), path, 1);
      if (const auto* d = std::get_if<double>(&v)) out.push_back(*d);
      else if (const auto* b = std::get_if<bool>(&v)) out.push_back(*b ? 1.0 : 0.0);
    }
    return out;
  }

  // ---- relation bookkeeping ---------------------------------------------------

  std::optional<std::string> observer_for(const IdList& current) {
    if (options_.observer) return options_.observer;
    if (auto flagged = resolve_observer(facts())) return flagged;
    if (current.size() == 1) return current.front();
    return std::nullopt;
  }

  void ensure(const std::set<Category>& wanted, const IdList& current) {
    std::set<Category> missing;
    for (Category c : wanted) {
      if (!facts().is_deduced(c)) missing.insert(c);
    }
    if (missing.empty()) return;
    std::optional<std::string> observer;
    if (missing.count(Category::visibility)) {
      observer = observer_for(current);
      if (!observer) throw InvalidArgument("visibility needs an observer: flag one object or filter to a single object");
    }
    deduce(facts(), missing, ctx_.settings,
           observer ? std::optional<std::string_view>(*observer) : std::nullopt);
  }

  // ---- operations -------------------------------------------------------------

  IdList apply(const AdjustOp& op) {
    AdjustmentSettings s = ctx_.settings;
    for (const auto& d : op.directives) {
      const std::string& w0 = d.words[0];
      const double v = d.values[0];
      if (w0 == "max" && d.words[1] == "gap") s.max_gap = v;
      else if (w0 == "max" && d.words[1] == "angle") s.max_angle = v * kPi / 180.0;
      else if (w0 == "long") s.long_ratio = v;
      else if (w0 == "thin") s.thin_ratio = v;
      else if (w0 == "sector") {
        s.sector_schema = *parse_sector_schema(d.words[1]);
        s.sector_factor = v;
      } else if (w0 == "nearby") {
        s.nearby_schema = *parse_nearby_schema(d.words[1]);
        if (s.nearby_schema == NearbySchema::limit) s.nearby_limit = v;
        else s.nearby_factor = v;
      } else if (w0 == "north") {
        const double n = std::hypot(d.values[0], d.values[1]);
        if (n == 0.0) throw InvalidArgument("north direction must not be zero");
        s.north_x = d.values[0] / n;
        s.north_z = d.values[1] / n;
      }
    }
    s.validate();
    if (!(s == ctx_.settings)) {
      ctx_.settings = s;
      facts().invalidate_relations();
    }
    return input();
  }

  IdList apply(const DeduceOp& op) {
    const std::set<Category> cats = expand_categories(op.categories);
    std::optional<std::string> observer;
    if (cats.count(Category::visibility)) {
      observer = observer_for(input());
      if (!observer) throw InvalidArgument("visibility needs an observer: flag one object or filter to a single object");
    }
    deduce(facts(), cats, ctx_.settings, observer ? std::optional<std::string_view>(*observer) : std::nullopt);
    return input();
  }

  IdList apply(const FilterOp& op) {
    IdList out;
    for (const auto& id : input()) {
      const SpatialObject& obj = object(id);
      if (truthy(eval(op.condition, {&obj, nullptr, &input(), false}))) out.push_back(id);
    }
    return out;
  }

  IdList apply(const IsaOp& op) {
    auto matches = [&](const std::string& value) {
      if (value.empty()) return false;
      for (const auto& cls : op.classes) {
        if (iequals(value, cls)) return true;
        if (options_.taxonomy != nullptr && options_.taxonomy->isa(value, cls)) return true;
      }
      return false;
    };
    IdList out;
    for (const auto& id : input()) {
      const SpatialObject& obj = object(id);
      if (matches(obj.type) || matches(obj.label)) out.push_back(id);
    }
    return out;
  }

  IdList apply(const PickOp& op) {
    std::set<Category> cats;
    collect_categories(op.relations, cats);
    ensure(cats, input());
    IdList out;
    for (const auto& candidate : facts().objects()) {
      for (const auto& id : input()) {
        if (id == candidate.id) continue;
        const SpatialObject& other = object(id);
        if (truthy(eval(op.relations, {&candidate, &other, &input(), false}))) {
          out.push_back(candidate.id);
          break;
        }
      }
    }
    return out;
  }

  IdList apply(const SelectOp& op) {
    std::set<Category> cats;
    collect_categories(op.relations, cats);
    ensure(cats, input());
    IdList out;
    for (const auto& id : input()) {
      const SpatialObject& subject = object(id);
      for (const auto& other : facts().objects()) {
        if (other.id == id) continue;
        if (!truthy(eval(op.relations, {&subject, &other, &input(), false}))) continue;
        if (op.condition && !truthy(eval(*op.condition, {&other, nullptr, &input(), false}))) continue;
        out.push_back(id);
        break;
      }
    }
    return out;
  }

  IdList apply(const SortOp& op) {
    const bool descending = op.order && *op.order == '>';
    std::vector<std::pair<Value, std::string>> keyed;
    if (is_relation_ref(op.key)) {
      const std::string predicate(canonical_predicate(op.key[0].name));
      ensure({*category_of_predicate(predicate)}, input());
      const auto steps = static_cast<std::size_t>(op.steps ? std::llabs(*op.steps) : 1);
      const std::size_t back_index = ctx_.chain.size() > steps ? ctx_.chain.size() - 1 - steps : 0;
      const IdList& backtraced = ctx_.chain[back_index];
      const bool by_delta = op.key[1].name == "delta";
      for (const auto& id : input()) {
        Value key;
        for (const auto& other : backtraced) {
          if (const SpatialRelation* r = facts().find_relation(id, predicate, other)) {
            key = by_delta ? r->delta : r->angle;
            break;
          }
        }
        keyed.emplace_back(std::move(key), id);
      }
    } else {
      for (const auto& id : input()) {
        const SpatialObject& obj = object(id);
        keyed.emplace_back(eval(Expr::make_ref(op.key), {&obj, nullptr, &input(), false}), id);
      }
    }
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      const bool a_missing = std::holds_alternative<std::monostate>(a.first);
      const bool b_missing = std::holds_alternative<std::monostate>(b.first);
      if (a_missing || b_missing) return !a_missing && b_missing;
      if (a.first.index() != b.first.index()) return a.first.index() < b.first.index();
      return descending ? compare(">", a.first, b.first) : compare("<", a.first, b.first);
    });
    IdList out;
    for (auto& [key, id] : keyed) out.push_back(std::move(id));
    return out;
  }

  IdList apply(const SliceOp& op) {
    const auto n = static_cast<long long>(input().size());
    auto position = [&](long long i) { return i > 0 ? i : n + 1 + i; };
    long long lo = position(op.first);
    long long hi = op.last ? position(*op.last) : lo;
    lo = std::max(lo, 1LL);
    hi = std::min(hi, n);
    IdList out;
    for (long long i = lo; i <= hi; ++i) out.push_back(input()[static_cast<std::size_t>(i - 1)]);
    return out;
  }

  IdList apply(const CalcOp& op) {
    for (const auto& a : op.assignments) {
      const Value v = eval(a.value, {nullptr, nullptr, &input(), true});
      double number = 0.0;
      if (const auto* d = std::get_if<double>(&v)) number = *d;
      else if (const auto* b = std::get_if<bool>(&v)) number = *b ? 1.0 : 0.0;
      else throw InvalidArgument("variable '" + a.target[0] + "' must be numeric, got " + detail::describe(v));
      facts().variables()[a.target[0]] = number;
    }
    return input();
  }

  IdList apply(const MapOp& op) {
    const IdList current = input();
    for (const auto& id : current) {
      SpatialObject obj = object(id);
      for (const auto& a : op.assignments) {
        detail::assign_attribute(obj, a.target, eval(a.value, {&obj, nullptr, &current, true}));
      }
      facts().upsert(std::move(obj));
    }
    return current;
  }

  std::string fresh_id(const std::string& kind) {
    while (true) {
      std::string id = kind + "-" + std::to_string(++produced_counter_);
      if (!facts().contains(id)) return id;
    }
  }

  void finish_produced(SpatialObject obj, const std::vector<Assignment>& assignments, const IdList& current,
                       IdList& out) {
    std::optional<std::string> id;
    for (const auto& a : assignments) {
      const Value v = eval(a.value, {&obj, nullptr, &current, true});
      if (a.target.size() == 1 && a.target[0] == "id") {
        const auto* s = std::get_if<std::string>(&v);
        if (s == nullptr || s->empty()) throw InvalidArgument("id must be a non-empty string");
        id = *s;
      } else {
        detail::assign_attribute(obj, a.target, v);
      }
    }
    if (id) {
      if (facts().contains(*id)) throw InvalidArgument("produced id '" + *id + "' already exists");
      obj.id = *id;
    }
    out.push_back(obj.id);
    ctx_.produced.push_back(obj.id);
    facts().upsert(std::move(obj));
  }

  IdList apply(const ProduceOp& op) {
    const IdList current = input();
    IdList out;
    const std::string& kind = op.kind;
    auto blank = [&](const std::string& k) {
      SpatialObject obj;
      obj.id = fresh_id(k);
      obj.label = k;
      obj.is_virtual = true;
      return obj;
    };

    if (kind == "copy") {
      for (const auto& id : current) {
        SpatialObject obj = object(id);
        obj.id = fresh_id(kind);
        finish_produced(std::move(obj), op.assignments, current, out);
      }
    } else if (kind == "group") {
      if (current.empty()) return out;
      std::vector<SpatialObject> members;
      for (const auto& id : current) members.push_back(object(id));
      SpatialObject box = enclosing_box(members);
      SpatialObject obj = blank(kind);
      obj.x = box.x;
      obj.y = box.y;
      obj.z = box.z;
      obj.w = box.w;
      obj.h = box.h;
      obj.d = box.d;
      finish_produced(std::move(obj), op.assignments, current, out);
    } else if (kind == "on" || kind == "at" || kind == "by" || kind == "in") {
      ensure({Category::connectivity}, current);
      std::vector<SpatialObject> pending;
      for (std::size_t i = 0; i < current.size(); ++i) {
        for (std::size_t j = i + 1; j < current.size(); ++j) {
          const SpatialObject& a = object(current[i]);
          const SpatialObject& b = object(current[j]);
          const bool ab = facts().has_relation(a.id, kind, b.id);
          const bool ba = facts().has_relation(b.id, kind, a.id);
          if (!ab && !ba) continue;
          SpatialObject obj = blank(kind);
          if (kind == "in") {
            const SpatialObject& inner = ab ? a : b;
            obj.x = inner.x;
            obj.y = inner.y;
            obj.z = inner.z;
            obj.w = inner.w;
            obj.h = inner.h;
            obj.d = inner.d;
            obj.angle = inner.angle;
          } else {
            const auto place = contact_region(a, b, ctx_.settings);
            if (!place) continue;
            obj.x = place->position.x;
            obj.y = place->position.y;
            obj.z = place->position.z;
            obj.w = place->w;
            obj.h = place->h;
            obj.d = place->d;
          }
          pending.push_back(std::move(obj));
        }
      }
      // Pairs are collected first so relation lookups above never see a
      // partially updated fact base.
      for (auto& obj : pending) finish_produced(std::move(obj), op.assignments, current, out);
    } else {
      const SectorLabel sector = *SectorLabel::parse(kind);
      for (const auto& id : current) {
        const SpatialObject& ref = object(id);
        SpatialObject box = sector_box(ref, sector, ctx_.settings);
        SpatialObject obj = blank(kind);
        obj.x = box.x;
        obj.y = box.y;
        obj.z = box.z;
        obj.w = box.w;
        obj.h = box.h;
        obj.d = box.d;
        obj.angle = box.angle;
        finish_produced(std::move(obj), op.assignments, current, out);
      }
    }
    return out;
  }

  IdList apply(const BacktraceOp& op) {
    const auto steps = static_cast<std::size_t>(op.steps ? std::llabs(*op.steps) : 1);
    const std::size_t index = ctx_.chain.size() > steps ? ctx_.chain.size() - 1 - steps : 0;
    return ctx_.chain[index];
  }

  IdList apply(const ReloadOp&) { return all_ids(); }

  IdList apply(const HaltOp&) {
    ctx_.halted = true;
    return input();
  }

  IdList apply(const LogOp& op) {
    bool scene = false;
    bool base = false;
    std::set<std::string> predicates;
    for (const auto& t : op.tokens) {
      if (t == "3D") scene = true;
      else if (t == "base") base = true;
      else predicates.insert(std::string(canonical_predicate(t)));
    }
    auto emit = [&](LogArtifact::Kind kind, std::string content) {
      ctx_.logs.push_back({step_, kind, std::move(content)});
    };
    if (op.tokens.empty()) emit(LogArtifact::Kind::summary, export_summary(facts(), input()));
    if (base) emit(LogArtifact::Kind::base, dump_facts(facts(), ctx_.settings, true));
    if (scene) emit(LogArtifact::Kind::scene, export_scene(facts()));
    if (!predicates.empty()) {
      std::set<Category> cats;
      for (const auto& p : predicates) cats.insert(*category_of_predicate(p));
      ensure(cats, input());
      emit(LogArtifact::Kind::mermaid, export_mermaid(facts(), predicates));
    }
    return input();
  }

  EvaluationContext& ctx_;
  const EvaluationOptions& options_;
  std::size_t step_ = 0;
  std::size_t produced_counter_ = 0;
};

}  // namespace

EvaluationContext evaluate(const PipelineProgram& program, const FactBase& fb, const AdjustmentSettings& settings,
                           const EvaluationOptions& options) {
  settings.validate();
  EvaluationContext ctx;
  ctx.facts = fb;
  ctx.settings = settings;
  IdList all;
  for (const auto& obj : fb.objects()) all.push_back(obj.id);
  ctx.chain.push_back(std::move(all));
  Evaluator(ctx, options).run(program);
  return ctx;
}

}  // namespace spatial
