#include <catch2/catch_amalgamated.hpp>

#include "bluejay/instrument.hpp"
#include "bluejay/normalize.hpp"
#include "bluejay/oracle.hpp"
#include "bluejay/parse.hpp"
#include "support/testgen.hpp"

using namespace bluejay;

namespace {

// let t = [[tau]] in t.check <e>
ExprPtr check_expr(const TypePtr& tau, const std::string& value_src) {
  static int n = 0;
  ++n;
  Symbol t = intern("t$tc" + std::to_string(n));
  auto let = mk_expr(ExprKind::Let);
  let->label = intern("let$tc" + std::to_string(n));
  let->var = t;
  let->a = embed_type(tau);
  auto proj = mk_expr(ExprKind::Proj);
  proj->label = intern("prj$tc" + std::to_string(n));
  proj->var = intern("check");
  auto tv = mk_expr(ExprKind::Var);
  tv->label = intern("var$tc" + std::to_string(n));
  tv->var = t;
  proj->a = tv;
  auto app = mk_expr(ExprKind::App);
  app->label = intern("app$tc" + std::to_string(n));
  app->a = proj;
  app->b = parse(value_src);
  let->b = app;
  return normalize(let);
}

// let t = [[tau]] in t.check (t.gen 0)
ExprPtr self_check_expr(const TypePtr& tau) {
  static int n = 0;
  ++n;
  Symbol t = intern("t$sc" + std::to_string(n));
  long node_counter = 0;
  auto mk = [&](ExprKind k, const char* hint) {
    auto e = mk_expr(k);
    e->label = intern(std::string(hint) + "$sc" + std::to_string(n) + "_" +
                      std::to_string(++node_counter));
    return e;
  };
  auto tv1 = mk(ExprKind::Var, "v1");
  tv1->var = t;
  auto tv2 = mk(ExprKind::Var, "v2");
  tv2->var = t;
  auto genp = mk(ExprKind::Proj, "gp");
  genp->var = intern("gen");
  genp->a = tv1;
  auto gapp = mk(ExprKind::App, "ga");
  gapp->a = genp;
  gapp->b = parse("0");
  auto chkp = mk(ExprKind::Proj, "cp");
  chkp->var = intern("check");
  chkp->a = tv2;
  auto capp = mk(ExprKind::App, "ca");
  capp->a = chkp;
  capp->b = gapp;
  auto let = mk(ExprKind::Let, "lt");
  let->var = t;
  let->a = embed_type(tau);
  let->b = capp;
  return normalize(let);
}

TypePtr parse_type_of_decl(const std::string& ty_src) {
  // piggyback on the declaration parser
  ExprPtr d = parse("let q (x : " + ty_src + ") : bool = true in q");
  return d->params[0].type;
}

}  // namespace

TEST_CASE("checker for int rejects a boolean") {
  ExprPtr e = check_expr(mk_type(TypeKind::Int), "true");
  EvalResult r = eval(*e, Feed::random(0), 10000);
  REQUIRE(r.outcome.kind == OutcomeKind::Value);
  REQUIRE(!r.outcome.value->as_bool());
}

TEST_CASE("generated int->int functions can reject ill-classed arguments") {
  // [[int -> int]].gen produces a function that on a bool argument reaches
  // ERROR on the pick_b branch that checks the argument.
  TypePtr arrow = parse_type_of_decl("int -> int");
  static int n = 0;
  ++n;
  Symbol t = intern("t$g" + std::to_string(n));
  auto let = mk_expr(ExprKind::Let);
  let->label = intern("l$g" + std::to_string(n));
  let->var = t;
  let->a = embed_type(arrow);
  ExprPtr body = parse("(t$g" + std::to_string(n) + ".gen 0) true");
  let->b = body;
  ExprPtr prog = normalize(let);

  bool error_reachable = false, value_reachable = false;
  testgen::for_each_feed(*prog, 6, 4000, -2, 2, [&](const Outcome& o) {
    if (o.kind == OutcomeKind::Error) error_reachable = true;
    if (o.kind == OutcomeKind::Value) value_reachable = true;
  });
  REQUIRE(error_reachable);
  REQUIRE(value_reachable);  // the unchecked branch still returns an int
}

TEST_CASE("refinement generator filters through mzero") {
  TypePtr ref = parse_type_of_decl("{int | fun a -> 0 < a}");
  static int n = 0;
  ++n;
  Symbol t = intern("t$r" + std::to_string(n));
  auto let = mk_expr(ExprKind::Let);
  let->label = intern("l$r" + std::to_string(n));
  let->var = t;
  let->a = embed_type(ref);
  let->b = parse("t$r" + std::to_string(n) + ".gen 0");
  ExprPtr prog = normalize(let);

  EvalResult neg = eval(*prog, Feed::scripted({PickVal::of_int(-3)}), 10000);
  REQUIRE(neg.outcome.kind == OutcomeKind::MZero);
  EvalResult pos = eval(*prog, Feed::scripted({PickVal::of_int(7)}), 10000);
  REQUIRE(pos.outcome.kind == OutcomeKind::Value);
  REQUIRE(pos.outcome.value->as_int() == 7);
}

TEST_CASE("instrumented bad declaration reaches ERROR") {
  Instrumented ins = instrument_program(parse("let id (x : bool) : bool = 1 in id"));
  ExprPtr prog = normalize(ins.program);
  EnumBounds b;
  b.max_pick_depth = 4;
  RefuteResult r = exhaustive_refute(*prog, b);
  REQUIRE(r.status == RefuteStatus::Refuted);
}

TEST_CASE("programs without annotations are unchanged modulo primitive guards") {
  ExprPtr src = parse("(fun x -> x + 1) 2");
  InstrumentConfig cfg;
  cfg.guard_primitives = false;
  Instrumented ins = instrument_program(src, cfg);
  REQUIRE(expr_equal(*src, *ins.program));

  Instrumented guarded = instrument_program(src);
  REQUIRE(!expr_equal(*src, *guarded.program));
  EvalResult r = eval(*normalize(guarded.program), Feed::random(0), 10000);
  REQUIRE(r.outcome.kind == OutcomeKind::Value);
  REQUIRE(r.outcome.value->as_int() == 3);
}

TEST_CASE("wrap makes use errors reachable and its absence hides them") {
  // the body ignores its argument, so only the wrapper can flag the bad use
  std::string src = "let f : (int -> int) = fun x -> 5 in f true";
  InstrumentConfig wrap_on;
  Instrumented with_wrap = instrument_program(parse(src), wrap_on);
  EnumBounds b;
  b.max_pick_depth = 6;
  REQUIRE(exhaustive_refute(*normalize(with_wrap.program), b).status ==
          RefuteStatus::Refuted);

  InstrumentConfig wrap_off;
  wrap_off.wrap_enabled = false;
  Instrumented without = instrument_program(parse(src), wrap_off);
  RefuteResult r = exhaustive_refute(*normalize(without.program), b);
  REQUIRE(r.status == RefuteStatus::NoErrorWithinBounds);

  // checked arguments that the body actually uses fail either way: with wrap
  // at the wrapper's argument check, without it at the guarded operation
  std::string used = "let f : (int -> int) = fun x -> x + 1 in f true";
  Instrumented used_nowrap = instrument_program(parse(used), wrap_off);
  REQUIRE(exhaustive_refute(*normalize(used_nowrap.program), b).status ==
          RefuteStatus::Refuted);
}

TEST_CASE("guarding leaves a bare literal unchanged") {
  ExprPtr one = parse("1");
  REQUIRE(expr_equal(*one, *guard_primitives(one)));
}

TEST_CASE("guarded misuse of an untouchable operand reaches ERROR") {
  // V('a) + 1, built directly since untouchables are instrumentation-only.
  // The class dispatch itself trips the opaque-pattern rule.
  auto add = mk_expr(ExprKind::Bin);
  add->label = intern("add$gu1");
  add->op = BinOp::Add;
  auto u = mk_expr(ExprKind::Untouchable);
  u->label = intern("u$gu1");
  u->alpha = 9;
  add->a = u;
  add->b = parse("1");
  ExprPtr guarded = normalize(guard_primitives(add));
  EvalResult r = eval(*guarded, Feed::random(0), 10000);
  REQUIRE(r.outcome.kind == OutcomeKind::Error);
}

TEST_CASE("guarded class mismatches fail at a named guard clause") {
  ExprPtr guarded = normalize(guard_primitives(parse("1 + true")));
  EvalResult r = eval(*guarded, Feed::random(0), 10000);
  REQUIRE(r.outcome.kind == OutcomeKind::Error);
  REQUIRE(sym_name(r.outcome.site.id).rfind("primerr", 0) == 0);
}

TEST_CASE("wrap on base types is the identity") {
  for (TypeKind k : {TypeKind::Int, TypeKind::Bool}) {
    ExprPtr emb = embed_type(mk_type(k));
    // the wrap field is literally fun w -> w
    REQUIRE(emb->kind == ExprKind::Record);
    const auto& fields = emb->fields;
    bool found = false;
    for (const auto& [l, f] : fields) {
      if (l != intern("wrap")) continue;
      found = true;
      REQUIRE(f->kind == ExprKind::Fun);
      REQUIRE(f->a->kind == ExprKind::Var);
      REQUIRE(f->a->var == f->var);
    }
    REQUIRE(found);
  }
}

TEST_CASE("record wrap retags to exactly the declared labels") {
  TypePtr rt = parse_type_of_decl("{a : int}");
  static int n = 0;
  ++n;
  Symbol t = intern("t$w" + std::to_string(n));
  auto let = mk_expr(ExprKind::Let);
  let->label = intern("l$w" + std::to_string(n));
  let->var = t;
  let->a = embed_type(rt);
  let->b = parse("(t$w" + std::to_string(n) + ".wrap {a = 1; b = 2}).b");
  EvalResult r = eval(*normalize(let), Feed::random(0), 10000);
  REQUIRE(r.outcome.kind == OutcomeKind::Error);  // b is hidden after the wrap
}

TEST_CASE("generator soundness: generated values pass their own checker") {
  const char* types[] = {
      "int", "bool", "{int | fun a -> 0 < a}", "(A of int || B of bool)",
      "{u : int; w : bool}", "list bool",
  };
  for (const char* ty : types) {
    ExprPtr prog = self_check_expr(parse_type_of_decl(ty));
    long conclusive = 0;
    bool done = testgen::for_each_feed(*prog, 7, 30000, -2, 2, [&](const Outcome& o) {
      INFO(ty);
      if (o.kind == OutcomeKind::MZero) return;  // discarded generation
      REQUIRE(o.kind == OutcomeKind::Value);
      REQUIRE(o.value->is_bool());
      REQUIRE(o.value->as_bool());
      ++conclusive;
    });
    INFO(ty);
    REQUIRE(done);
    REQUIRE(conclusive > 0);
  }
}

TEST_CASE("checker range: only booleans, Error, MZero, or the budget marker") {
  testgen::TypeGen gen(4242);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    TypePtr tau = gen.type(2);
    std::string value = gen.small_value();
    ExprPtr prog;
    try {
      prog = check_expr(tau, value);
    } catch (const IllFormedType&) {
      continue;
    }
    for (uint64_t seed = 0; seed < 3; ++seed) {
      EvalResult r = eval(*prog, Feed::random(seed ^ (uint64_t(i) << 8)), 20000);
      if (r.outcome.kind == OutcomeKind::Value) {
        INFO(render_type(tau) + " on " + value);
        REQUIRE(r.outcome.value->is_bool());
      }
      ++checked;
    }
  }
  REQUIRE(checked > 300);
}

TEST_CASE("ill-formed types are rejected") {
  auto dup = mk_type(TypeKind::Variant);
  dup->variants.push_back({intern("A"), mk_type(TypeKind::Int)});
  dup->variants.push_back({intern("A"), mk_type(TypeKind::Bool)});
  REQUIRE_THROWS_AS(embed_type(dup), IllFormedType);

  auto badf = mk_type(TypeKind::Forall);
  badf->foralls.push_back(intern("a"));
  badf->a = mk_type(TypeKind::Int);
  REQUIRE_THROWS_AS(embed_type(badf), IllFormedType);

  auto freepoly = mk_type(TypeKind::Poly);
  freepoly->var = intern("zz");
  REQUIRE_THROWS_AS(embed_type(freepoly), IllFormedType);
}

TEST_CASE("polymorphic identity checks; typecasing on the opaque value fails") {
  Instrumented good = instrument_program(parse("let f (type a) (x : a) : a = x in f"));
  EnumBounds b;
  b.max_pick_depth = 4;
  REQUIRE(exhaustive_refute(*normalize(good.program), b).status ==
          RefuteStatus::NoErrorWithinBounds);

  Instrumented bad = instrument_program(
      parse("let f (type a) (x : a) : a = if x ~ int then x else x in f"));
  REQUIRE(exhaustive_refute(*normalize(bad.program), b).status == RefuteStatus::Refuted);
}

TEST_CASE("intersection checks draw the clause index nondeterministically") {
  EnumBounds b;
  b.int_lo = -1;
  b.int_hi = 4;
  b.max_pick_depth = 8;
  // i = 1 checks the A clause, i = 2 the B clause, out-of-range discards.
  std::string bad =
      "let (g : ((A of int) -> int) && ((B of bool) -> bool)) = "
      "(fun v -> match v with | A x -> x | B y -> 5) in g";
  Instrumented ins = instrument_program(parse(bad));
  REQUIRE(exhaustive_refute(*normalize(ins.program), b).status == RefuteStatus::Refuted);

  std::string ok =
      "let (g : ((A of int) -> int) && ((B of bool) -> bool)) = "
      "(fun v -> match v with | A x -> x | B y -> y) in g";
  Instrumented ins2 = instrument_program(parse(ok));
  RefuteResult r2 = exhaustive_refute(*normalize(ins2.program), b);
  REQUIRE(r2.status == RefuteStatus::NoErrorWithinBounds);
}
