#pragma once

// Shared test helpers: random surface programs, random types, value
// comparison, and a scripted-feed enumerator for small expressions.

#include <functional>
#include <string>
#include <vector>

#include "bluejay/interp.hpp"
#include "bluejay/oracle.hpp"
#include "bluejay/parse.hpp"

namespace testgen {

using namespace bluejay;

inline bool value_equal(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_closure()) return true;  // same class is enough across rewrites
  if (a.is_untouchable()) return a.as_untouchable().alpha == b.as_untouchable().alpha;
  if (a.is_variant()) {
    return a.as_variant().ctor == b.as_variant().ctor &&
           value_equal(*a.as_variant().payload.v, *b.as_variant().payload.v);
  }
  if (a.is_record()) {
    const auto& ra = a.as_record();
    const auto& rb = b.as_record();
    if (ra.fields.size() != rb.fields.size() || ra.declared != rb.declared) return false;
    for (size_t i = 0; i < ra.fields.size(); ++i) {
      if (ra.fields[i].label != rb.fields[i].label) return false;
      if (!value_equal(*ra.fields[i].value.v, *rb.fields[i].value.v)) return false;
    }
    return true;
  }
  ListPtr pa = a.as_list(), pb = b.as_list();
  while (pa && pb) {
    if (!value_equal(*pa->head.v, *pb->head.v)) return false;
    pa = pa->tail;
    pb = pb->tail;
  }
  return !pa && !pb;
}

// ---- random surface programs ----

class ProgramGen {
public:
  explicit ProgramGen(uint64_t seed) : rng_(seed) {}

  // A closed surface expression (no typed declarations).
  std::string expr(int budget) { return gen_expr(budget, {}); }

  // A small program with typed declarations and a final use.
  std::string typed_program() {
    std::ostringstream os;
    int decls = 1 + int(rng_.range(0, 1));
    std::vector<std::string> names;
    for (int i = 0; i < decls; ++i) {
      std::string name = "d" + std::to_string(i);
      std::string ty = gen_type(2);
      os << "let " << name << " (x : " << ty << ") : " << gen_type(1) << " = "
         << gen_expr(3, {"x"}) << " in\n";
      names.push_back(name);
    }
    os << names[size_t(rng_.range(0, int64_t(names.size()) - 1))];
    return os.str();
  }

  std::string gen_type(int budget) {
    if (budget <= 0) return rng_.next_bool() ? "int" : "bool";
    switch (rng_.range(0, 5)) {
      case 0: return "int";
      case 1: return "bool";
      case 2: return "(" + gen_type(budget - 1) + " -> " + gen_type(budget - 1) + ")";
      case 3: return "{int | fun q -> " + std::string(rng_.next_bool() ? "0 < q" : "q < 10") + "}";
      case 4: return "{u : int; w : bool}";
      default: return "list " + (rng_.next_bool() ? std::string("int") : std::string("bool"));
    }
  }

  std::string gen_expr(int budget, std::vector<std::string> vars) {
    if (budget <= 0) return atom(vars);
    switch (rng_.range(0, 9)) {
      case 0: return atom(vars);
      case 1:
        return "(" + gen_expr(budget - 1, vars) + " + " + gen_expr(budget - 1, vars) + ")";
      case 2:
        return "(" + gen_expr(budget - 1, vars) + " < " + gen_expr(budget - 1, vars) + ")";
      case 3:
        return "(if " + gen_expr(budget - 1, vars) + " then " + gen_expr(budget - 1, vars) +
               " else " + gen_expr(budget - 1, vars) + ")";
      case 4: {
        std::string v = "v" + std::to_string(counter_++);
        std::string rhs = gen_expr(budget - 1, vars);
        vars.push_back(v);
        return "(let " + v + " = " + rhs + " in " + gen_expr(budget - 1, vars) + ")";
      }
      case 5: {
        std::string v = "p" + std::to_string(counter_++);
        auto inner = vars;
        inner.push_back(v);
        return "(fun " + v + " -> " + gen_expr(budget - 1, inner) + ")";
      }
      case 6:
        return "((fun a" + std::to_string(counter_++) + " -> " + gen_expr(budget - 1, vars) +
               ") " + gen_expr(budget - 1, vars) + ")";
      case 7:
        return "{u = " + gen_expr(budget - 1, vars) + "; w = " + gen_expr(budget - 1, vars) + "}";
      case 8:
        return "(" + gen_expr(budget - 1, vars) + " ~ " +
               (rng_.next_bool() ? "int" : "bool") + ")";
      default:
        return "[" + gen_expr(budget - 1, vars) + "; " + gen_expr(budget - 1, vars) + "]";
    }
  }

  Rng& rng() { return rng_; }

private:
  Rng rng_;
  long counter_ = 0;

  std::string atom(const std::vector<std::string>& vars) {
    if (!vars.empty() && rng_.next_bool())
      return vars[size_t(rng_.range(0, int64_t(vars.size()) - 1))];
    switch (rng_.range(0, 3)) {
      case 0: return std::to_string(rng_.range(-20, 20));
      case 1: return "true";
      case 2: return "false";
      default: return std::to_string(rng_.range(0, 5));
    }
  }
};

// ---- random types as AST, for embedding properties ----

class TypeGen {
public:
  explicit TypeGen(uint64_t seed) : rng_(seed) {}

  TypePtr type(int budget) {
    if (budget <= 0) return base();
    switch (rng_.range(0, 7)) {
      case 0:
      case 1: return base();
      case 2: {
        auto t = mk_type(TypeKind::Arrow);
        t->a = type(budget - 1);
        t->b = type(budget - 1);
        return t;
      }
      case 3: {  // refinement over int with a simple predicate
        auto t = mk_type(TypeKind::Refine);
        t->a = mk_type(TypeKind::Int);
        t->pred = parse(rng_.next_bool() ? "fun q -> 0 < q" : "fun q -> q < 4");
        return t;
      }
      case 4: {
        auto t = mk_type(TypeKind::Record);
        t->fields.emplace_back(intern("u"), type(budget - 1));
        t->fields.emplace_back(intern("w"), type(budget - 1));
        return t;
      }
      case 5: {
        auto t = mk_type(TypeKind::Variant);
        t->variants.push_back({intern("A"), type(budget - 1)});
        t->variants.push_back({intern("B"), type(budget - 1)});
        return t;
      }
      case 6: {
        auto t = mk_type(TypeKind::List);
        t->a = base();
        return t;
      }
      default: {
        auto t = mk_type(TypeKind::Forall);
        t->foralls.push_back(intern("zz"));
        auto body = mk_type(TypeKind::Arrow);
        auto pv = mk_type(TypeKind::Poly);
        pv->var = intern("zz");
        body->a = pv;
        auto pv2 = mk_type(TypeKind::Poly);
        pv2->var = intern("zz");
        body->b = rng_.next_bool() ? pv2 : type(budget - 1);
        t->a = body;
        return t;
      }
    }
  }

  // A small closed surface expression to feed into a checker.
  std::string small_value() {
    switch (rng_.range(0, 6)) {
      case 0: return std::to_string(rng_.range(-8, 8));
      case 1: return "true";
      case 2: return "false";
      case 3: return "fun z -> z";
      case 4: return "{u = 1; w = true}";
      case 5: return "[1; 2]";
      default: return "A 3";
    }
  }

  Rng& rng() { return rng_; }

private:
  Rng rng_;

  TypePtr base() {
    return mk_type(rng_.next_bool() ? TypeKind::Int : TypeKind::Bool);
  }
};

// Enumerates scripted feeds breadth-first and reports each conclusive
// outcome. Returns false if the budget was exceeded.
inline bool for_each_feed(const Expr& e, int max_depth, long max_feeds, int64_t lo, int64_t hi,
                          const std::function<void(const Outcome&)>& visit) {
  std::vector<int64_t> ints = bluejay::detail::magnitude_order(lo, hi);
  std::deque<std::vector<PickVal>> frontier;
  frontier.push_back({});
  long used = 0;
  while (!frontier.empty()) {
    if (++used > max_feeds) return false;
    auto prefix = std::move(frontier.front());
    frontier.pop_front();
    EvalResult r = eval(e, Feed::scripted(prefix), 20000);
    if (r.outcome.kind == OutcomeKind::FeedMiss) {
      if (int(prefix.size()) >= max_depth) continue;
      if (r.outcome.miss_wants_bool) {
        for (bool v : {false, true}) {
          auto next = prefix;
          next.push_back(PickVal::of_bool(v));
          frontier.push_back(std::move(next));
        }
      } else {
        for (int64_t v : ints) {
          auto next = prefix;
          next.push_back(PickVal::of_int(v));
          frontier.push_back(std::move(next));
        }
      }
      continue;
    }
    visit(r.outcome);
  }
  return true;
}

}  // namespace testgen
