#include <catch2/catch_amalgamated.hpp>

#include "bluejay/pipeline.hpp"
#include "support/testgen.hpp"

using namespace bluejay;

namespace {

ExprPtr pick_error_program() {
  // if pick_b then ERROR else 1
  auto pick = mk_expr(ExprKind::PickB);
  pick->label = intern("pk$or1");
  auto iff = mk_expr(ExprKind::If);
  iff->label = intern("if$or1");
  iff->a = pick;
  iff->b = mk_expr(ExprKind::Error);
  iff->b->label = intern("er$or1");
  iff->c = parse("1");
  return normalize(iff);
}

}  // namespace

TEST_CASE("a one-pick error is refuted with the true branch") {
  ExprPtr prog = pick_error_program();
  EnumBounds b;
  RefuteResult r = exhaustive_refute(*prog, b);
  REQUIRE(r.status == RefuteStatus::Refuted);
  REQUIRE(r.witness.values.size() == 1);
  REQUIRE(r.witness.values.begin()->second.b == true);
}

TEST_CASE("a well-typed boolean program exhausts fully") {
  Instrumented ins = instrument_program(parse("let id (x : bool) : bool = x in id"));
  EnumBounds b;
  b.max_pick_depth = 6;
  RefuteResult r = exhaustive_refute(*normalize(ins.program), b);
  REQUIRE(r.status == RefuteStatus::NoErrorWithinBounds);
  REQUIRE(r.fully_exhausted);
}

TEST_CASE("enumeration is deterministic and returns the first witness in order") {
  ExprPtr prog = pick_error_program();
  EnumBounds b;
  RefuteResult r1 = exhaustive_refute(*prog, b);
  RefuteResult r2 = exhaustive_refute(*prog, b);
  REQUIRE(r1.runs == r2.runs);
  REQUIRE(feed_to_text(r1.witness) == feed_to_text(r2.witness));
}

TEST_CASE("enumeration finds the deep constant path in the overview program") {
  std::string src =
      "let appl_int (fn : int -> int) : int = (let res = fn 1 in if res != 32767 then fn 0 "
      "else (res - 1) < 0) in appl_int";
  Prepared p = prepare(src, RunOptions{});
  EnumBounds b;
  b.int_lo = -16;
  b.int_hi = 32767;
  b.max_pick_depth = 6;
  b.max_total_feeds = 400000;
  RefuteResult r = exhaustive_refute(*p.normalized, b);
  REQUIRE(r.status == RefuteStatus::Refuted);
  Outcome o = replay(*p.normalized, r.witness);
  REQUIRE(o.kind == OutcomeKind::Error);
}

TEST_CASE("bounded exhaustion respects the feed budget") {
  std::string src =
      "let f (x : int) : int = x in f";  // one int pick fans out over the range
  Prepared p = prepare(src, RunOptions{});
  EnumBounds b;
  b.max_total_feeds = 3;
  RefuteResult r = exhaustive_refute(*p.normalized, b);
  REQUIRE(r.status == RefuteStatus::BudgetExceeded);
}

TEST_CASE("fuzzing finds shallow errors within a few runs") {
  ExprPtr prog = pick_error_program();
  RefuteResult r = fuzz_refute(*prog, 99, 50);
  REQUIRE(r.status == RefuteStatus::Refuted);
  REQUIRE(r.runs < 20);
  Outcome o = replay(*prog, r.witness);
  REQUIRE(o.kind == OutcomeKind::Error);
}

TEST_CASE("fuzzing is deterministic given the seed") {
  ExprPtr prog = pick_error_program();
  RefuteResult a = fuzz_refute(*prog, 1234, 100);
  RefuteResult b = fuzz_refute(*prog, 1234, 100);
  REQUIRE(a.status == b.status);
  REQUIRE(a.runs == b.runs);
  REQUIRE(feed_to_text(a.witness) == feed_to_text(b.witness));
}

TEST_CASE("random choice is very unlikely to hit the overview error path") {
  std::string src =
      "let appl_int (fn : int -> int) : int = (let res = fn 1 in if res != 32767 then fn 0 "
      "else (res - 1) < 0) in appl_int";
  Prepared p = prepare(src, RunOptions{});
  RefuteResult r = fuzz_refute(*p.normalized, 5, 2000);
  REQUIRE(r.status == RefuteStatus::NoErrorWithinBounds);
}

TEST_CASE("oracle and concolic verdicts agree on tiny programs") {
  const char* sources[] = {
      "let f (x : bool) : bool = x in f",
      "let f (x : bool) : bool = 1 in f",
      "let f (x : bool) : int = if x then 1 else 2 in f",
      "let f (x : int) : {int | fun r -> 0 < r} = (if x < 0 then 0 - x else x) + 1 in f",
      "let f (x : int) : {int | fun r -> 0 < r} = x in f",
  };
  for (const char* src : sources) {
    Prepared p = prepare(src, RunOptions{});
    EnumBounds b;
    b.max_pick_depth = 8;
    RefuteResult oracle = exhaustive_refute(*p.normalized, b);
    SearchConfig cfg;
    cfg.timeout_s = 20;
    SolverHandle solver;
    SearchReport concolic = search(*p.normalized, cfg, solver);
    INFO(src);
    if (oracle.status == RefuteStatus::Refuted) {
      REQUIRE(concolic.verdict == Verdict::ErrorFound);
    } else if (oracle.fully_exhausted) {
      REQUIRE(concolic.verdict == Verdict::Exhausted);
    }
  }
}
