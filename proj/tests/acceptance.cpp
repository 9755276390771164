// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Budgets and tolerances are pinned here, in code.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bluejay/bench.hpp"
#include "bluejay/pipeline.hpp"
#include "support/testgen.hpp"

using namespace bluejay;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int num;
  std::string title;
  std::vector<std::string> failures;

  Criterion(int n, std::string t) : num(n), title(std::move(t)) {}

  void expect(bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  }

  void finish() {
    std::cout << "ACCEPTANCE " << num << " " << (failures.empty() ? "PASS" : "FAIL") << ": "
              << title << std::endl;
    for (const auto& f : failures) std::cout << "    - " << f << std::endl;
    INFO(title);
    REQUIRE(failures.empty());
  }
};

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(BLUEJAY_CORPUS_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOptions default_options() {
  RunOptions opts;  // paper budgets: 50k steps, depth 60 in 6 steps, 90 s
  return opts;
}

RunOptions quick_options(uint64_t seed = 0) {
  RunOptions opts;
  opts.search.max_step = 4000;
  opts.search.max_tree_depth = 12;
  opts.search.depth_increments = 3;
  opts.search.timeout_s = 5;
  opts.search.seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("criterion 1: paper-example reproduction") {
  Criterion c(1, "six fully listed programs yield their published verdicts within 90 s");
  struct Entry {
    const char* file;
    bool expect_error;
  };
  const Entry entries[] = {
      {"appl_int.bjy", true},  {"id_bool.bjy", true},   {"prepend.bjy", true},
      {"mk_student.bjy", true}, {"bad_tree.bjy", true},  {"transform_record.bjy", false},
  };
  for (const Entry& e : entries) {
    RunOptions opts = default_options();
    std::string src = read_corpus(e.file);
    auto t0 = std::chrono::steady_clock::now();
    CheckOutcome out = check_program(src, opts);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(wall < 90.0, std::string(e.file) + " exceeded 90 s");
    if (e.expect_error) {
      c.expect(out.error_found(), std::string(e.file) + " was not refuted");
      if (out.error_found()) {
        Prepared p = prepare(src, opts);
        Outcome replayed = replay(*p.normalized, out.witness, opts.search.max_step);
        c.expect(replayed.kind == OutcomeKind::Error,
                 std::string(e.file) + " witness does not replay to Error");
      }
    } else {
      c.expect(out.verdict == CheckOutcome::Verdict::NoError,
               std::string(e.file) + " should report no errors with full exhaustion");
    }
  }
  // the id example's published report lines
  CheckOutcome id = check_program(read_corpus("id_bool.bjy"), default_options());
  c.expect(id.report.expected == "(bool -> bool)", "id expected-type text diverges");
  c.expect(id.report.actual == "(bool -> int)", "id actual-type text diverges");
  c.finish();
}

TEST_CASE("criterion 2: no false positives across corpus and 1000 fuzzed programs") {
  Criterion c(2, "every ErrorFound witness replays deterministically to Error");
  long checked = 0;

  for (const auto& entry : fs::directory_iterator(BLUEJAY_CORPUS_DIR)) {
    if (entry.path().extension() != ".bjy") continue;
    std::string src = read_corpus(entry.path().filename().string());
    RunOptions opts = default_options();
    opts.search.timeout_s = 30;
    CheckOutcome out = check_program(src, opts);
    if (out.error_found()) {
      Prepared p = prepare(src, opts);
      Outcome o1 = replay(*p.normalized, out.witness, opts.search.max_step);
      Outcome o2 = replay(*p.normalized, out.witness, opts.search.max_step);
      c.expect(o1.kind == OutcomeKind::Error && o2.kind == OutcomeKind::Error &&
                   o1.site == o2.site,
               entry.path().filename().string() + ": witness replay not deterministic Error");
      ++checked;
    }
  }

  testgen::ProgramGen gen(20260811);
  for (int i = 0; i < 1000; ++i) {
    std::string src = gen.typed_program();
    RunOptions opts = quick_options(uint64_t(i));
    CheckOutcome out;
    try {
      out = check_program(src, opts);
    } catch (const std::exception& e) {
      c.expect(false, "fuzzed program " + std::to_string(i) + " crashed: " + e.what());
      continue;
    }
    if (!out.error_found()) continue;
    Prepared p = prepare(src, opts);
    Outcome o1 = replay(*p.normalized, out.witness, opts.search.max_step);
    Outcome o2 = replay(*p.normalized, out.witness, opts.search.max_step);
    bool ok = o1.kind == OutcomeKind::Error && o2.kind == OutcomeKind::Error && o1.site == o2.site;
    c.expect(ok, "fuzzed program " + std::to_string(i) + ": witness did not replay to Error");
    ++checked;
  }
  c.expect(checked >= 300, "too few refutations exercised: " + std::to_string(checked));
  c.finish();
}

TEST_CASE("criterion 3: oracle agreement on tiny programs") {
  Criterion c(3, "concolic verdict matches exhaustive enumeration on >= 30 tiny programs");
  const char* sources[] = {
      "let f (x : bool) : bool = x in f",
      "let f (x : bool) : bool = 1 in f",
      "let f (x : bool) : int = if x then 1 else 0 in f",
      "let f (x : bool) : int = if x then 1 else true in f",
      "let f (x : int) : int = x + 1 in f",
      "let f (x : int) : bool = x in f",
      "let f (x : int) : {int | fun r -> 0 - 17 < r} = if x < 0 then 0 - x else x in f",
      "let f (x : int) : {int | fun r -> 0 < r} = x in f",
      "let (v : int) = 5 in v",
      "let (v : int) = true in v",
      "let (v : {int | fun a -> a < 3}) = 2 in v",
      "let (v : {int | fun a -> a < 3}) = 7 in v",
      "let f (x : bool) : bool = x xor true in f",
      "let f (x : bool) : bool = assert x in f",
      "let f (x : bool) : bool = assume x in f",
      "let f (x : int) : int = if x == 4 then true else 0 in f",
      "let f (x : int) : int = if 20 < x then 0 else x in f",
      "let g (f : bool -> bool) : bool = f true in g",
      "let g (f : bool -> bool) : bool = f 1 in g",
      "let g (f : bool -> int) : int = if f false then 1 else 2 in g",
      "let (r : {a : int}) = {a = 1} in r",
      "let (r : {a : int}) = {b = 1} in r",
      "let (r : {a : int; b : bool}) = {a = 1; b = true} in r",
      "let (v : (A of int || B of bool)) = A 3 in v",
      "let (v : (A of int || B of bool)) = A true in v",
      "let (v : (A of int || B of bool)) = C 3 in v",
      "let (v : list int) = [1; 2] in v",
      "let (v : list int) = [1; true] in v",
      "let (v : list bool) = 5 in v",
      "let f (x : int) : {int | fun r -> r == x + 1} = x + 2 in f",
      "let f (x : int) : {int | fun r -> r == x + 1} = x + 1 in f",
      "let f (x : bool) : bool -> bool = fun y -> x in f",
  };
  int agreements = 0;
  for (const char* src : sources) {
    Prepared p = prepare(src, RunOptions{});
    EnumBounds b;  // ints in [-16, 16], pick depth <= 8
    b.max_pick_depth = 8;
    RefuteResult oracle = exhaustive_refute(*p.normalized, b);
    SearchConfig cfg;
    cfg.timeout_s = 30;
    SolverHandle solver;
    SearchReport concolic = search(*p.normalized, cfg, solver);
    if (oracle.status == RefuteStatus::Refuted) {
      c.expect(concolic.verdict == Verdict::ErrorFound,
               std::string("refuted by oracle, not by concolic: ") + src);
    } else if (oracle.status == RefuteStatus::NoErrorWithinBounds && oracle.fully_exhausted) {
      c.expect(concolic.verdict == Verdict::Exhausted,
               std::string("oracle exhausted fully, concolic did not: ") + src);
    } else {
      c.expect(false, std::string("oracle inconclusive on a tiny program: ") + src);
    }
    ++agreements;
  }
  c.expect(agreements >= 30, "fewer than 30 programs compared");
  c.finish();
}

TEST_CASE("criterion 4: theorem-consequence suite") {
  Criterion c(4, "15 hand-derived semantic-typing verdicts match exhaustive refutation");
  struct Pair {
    const char* expr;
    const char* type;
    bool well_typed;  // hand-derived semantic verdict
  };
  const Pair pairs[] = {
      {"1", "int", true},
      {"true", "int", false},
      {"1 + 2", "int", true},
      {"fun x -> x + 1", "int -> int", true},
      {"fun x -> x", "bool -> int", false},
      {"fun x -> 1", "bool -> bool", false},
      {"fun x -> if x then 1 else 2", "bool -> int", true},
      {"5", "{int | fun a -> 0 < a}", true},
      {"-5", "{int | fun a -> 0 < a}", false},
      {"fun x -> x + 1", "(x : int) -> {int | fun r -> x < r}", true},
      {"fun x -> x - 1", "(x : int) -> {int | fun r -> x < r}", false},
      {"fun x -> x", "'a -> 'a", true},
      {"fun x -> if x ~ int then x else x", "'a -> 'a", false},
      {"fun x -> 1", "'a -> int", true},
      {"fun x -> ERROR", "int -> int", false},
  };
  int idx = 0;
  for (const Pair& pr : pairs) {
    ++idx;
    std::string src =
        "let (subject : " + std::string(pr.type) + ") = (" + pr.expr + ") in subject";
    Prepared p = prepare(src, RunOptions{});
    EnumBounds b;
    b.max_pick_depth = 8;
    RefuteResult r = exhaustive_refute(*p.normalized, b);
    bool judged_well = r.status != RefuteStatus::Refuted;
    c.expect(r.status == RefuteStatus::Refuted ||
                 (r.status == RefuteStatus::NoErrorWithinBounds && r.fully_exhausted),
             "pair " + std::to_string(idx) + " did not conclude");
    c.expect(judged_well == pr.well_typed,
             "pair " + std::to_string(idx) + " (" + pr.expr + " : " + pr.type +
                 ") disagrees with the hand-derived verdict");
  }
  c.finish();
}

TEST_CASE("criterion 5: checker range invariant") {
  Criterion c(5, "500 generated (type, feed) pairs: checks yield only "
                 "true/false/Error/MZero/StepLimit");
  testgen::TypeGen gen(555);
  long pairs = 0;
  while (pairs < 500) {
    TypePtr tau = gen.type(2);
    std::string value = gen.small_value();
    ExprPtr emb;
    try {
      emb = embed_type(tau);
    } catch (const IllFormedType&) {
      continue;
    }
    static long n = 0;
    ++n;
    Symbol t = intern("t$acc5_" + std::to_string(n));
    auto let = mk_expr(ExprKind::Let);
    let->label = intern("l$acc5_" + std::to_string(n));
    let->var = t;
    let->a = emb;
    auto proj = mk_expr(ExprKind::Proj);
    proj->label = intern("p$acc5_" + std::to_string(n));
    proj->var = intern("check");
    auto tv = mk_expr(ExprKind::Var);
    tv->label = intern("v$acc5_" + std::to_string(n));
    tv->var = t;
    proj->a = tv;
    auto app = mk_expr(ExprKind::App);
    app->label = intern("a$acc5_" + std::to_string(n));
    app->a = proj;
    app->b = parse(value);
    let->b = app;
    ExprPtr prog = normalize(let);

    EvalResult r = eval(*prog, Feed::random(gen.rng().next()), 20000);
    switch (r.outcome.kind) {
      case OutcomeKind::Value:
        c.expect(r.outcome.value->is_bool(),
                 "check returned a non-boolean for " + render_type(tau) + " on " + value);
        break;
      case OutcomeKind::Error:
      case OutcomeKind::MZero:
      case OutcomeKind::StepLimit:
        break;
      case OutcomeKind::FeedMiss:
        c.expect(false, "random feed reported a miss");
        break;
    }
    ++pairs;
  }
  c.finish();
}

TEST_CASE("criterion 6: record subtyping invariants") {
  Criterion c(6, "declared labels stay within actual labels; wrapped-away labels project to Error");
  const char* record_heavy[] = {
      "transform_record.bjy", "mk_student.bjy", "sub_hidden.bjy",
      "oop_counter.bjy",      "record_proj.bjy", "type_fun_pair.bjy",
  };
  long runs = 0;
  for (const char* file : record_heavy) {
    Prepared p = prepare(read_corpus(file), RunOptions{});
    for (uint64_t seed = 0; seed < 34; ++seed) {
      EvalOptions opts;
      opts.limits.max_steps = 50000;
      opts.check_record_tags = true;  // the debug assertion walk
      try {
        eval(*p.normalized, Feed::random(seed * 7919 + 13), opts);
      } catch (const InternalInvariantError& e) {
        c.expect(false, std::string(file) + ": tag invariant violated: " + e.what());
      }
      ++runs;
    }
  }
  c.expect(runs >= 200, "fewer than 200 randomized runs");

  // constructed cases: wrap a wider record at a narrower type, project hidden
  int constructed = 0, errored = 0;
  for (int i = 0; i < 25; ++i) {
    std::string src = "let (r : { a : int }) = { a = " + std::to_string(i) +
                      "; extra" + std::to_string(i) + " = true } in r.extra" + std::to_string(i);
    Prepared p = prepare(src, RunOptions{});
    EvalResult r = eval(*p.normalized, Feed::random(i), 50000);
    ++constructed;
    if (r.outcome.kind == OutcomeKind::Error) ++errored;
  }
  c.expect(errored == constructed, "projecting a wrapped-away label did not always Error ("
                                    + std::to_string(errored) + "/" + std::to_string(constructed) + ")");
  c.finish();
}

TEST_CASE("criterion 7: fuzz-vs-concolic separation on the overview program") {
  Criterion c(7, "fuzzing misses the deep constant for >= 9 of 10 seeds; concolic finds it 10/10");
  std::string src = read_corpus("appl_int.bjy");
  Prepared p = prepare(src, RunOptions{});

  int fuzz_hits = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    RefuteResult r = fuzz_refute(*p.normalized, seed, 10000);
    if (r.status == RefuteStatus::Refuted) ++fuzz_hits;
  }
  c.expect(fuzz_hits <= 1, "fuzzing found the error for " + std::to_string(fuzz_hits) +
                               " of 10 seeds; expected at most 1");

  int concolic_hits = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    SearchConfig cfg;
    cfg.seed = seed;
    SolverHandle solver;
    SearchReport rep = search(*p.normalized, cfg, solver);
    if (rep.verdict == Verdict::ErrorFound) ++concolic_hits;
  }
  c.expect(concolic_hits == 10,
           "concolic found the error for only " + std::to_string(concolic_hits) + " of 10 seeds");
  c.finish();
}

TEST_CASE("criterion 8: performance sanity over the corpus") {
  Criterion c(8, "median concolic search time over the corpus <= 5 s, with comparable tables");
  RunOptions opts = default_options();
  BenchResult bench = run_bench(BLUEJAY_CORPUS_DIR, opts);
  c.expect(!bench.rows.empty(), "empty corpus");
  c.expect(bench.all_matched, "corpus verdicts do not all match expectations");
  std::vector<double> times;
  for (const auto& row : bench.rows) times.push_back(row.run_ms);
  std::sort(times.begin(), times.end());
  double median = times[times.size() / 2];
  c.expect(median <= 5000.0, "median search time " + std::to_string(median) + " ms exceeds 5 s");
  std::cout << bench_table(bench);
  c.finish();
}

TEST_CASE("criterion 9: backend agreement on recorded solver queries") {
  Criterion c(9, ">= 200 recorded queries: external SMT and bounded enumerator verdicts coincide");
  std::vector<Query> recorded;
  for (const auto& entry : fs::directory_iterator(BLUEJAY_CORPUS_DIR)) {
    if (entry.path().extension() != ".bjy") continue;
    if (recorded.size() >= 400) break;
    Prepared p = prepare(read_corpus(entry.path().filename().string()), RunOptions{});
    SearchConfig cfg;
    cfg.timeout_s = 30;
    SolverHandle solver;
    solver.recorder = &recorded;
    search(*p.normalized, cfg, solver);
  }
  c.expect(recorded.size() >= 200,
           "only " + std::to_string(recorded.size()) + " queries recorded");

  long compared = 0, mismatches = 0;
  for (size_t i = 0; i < recorded.size() && i < 400; ++i) {
    SolverHandle en;
    SolverHandle ex;
    ex.backend = SolverHandle::Backend::External;
    ex.command = BLUEJAY_MINISMT;
    CheckResult a = solver_check(recorded[i], en);
    CheckResult b = solver_check(recorded[i], ex);
    if (a.status == CheckStatus::Unknown || b.status == CheckStatus::Unknown) continue;
    ++compared;
    if (a.status != b.status) {
      ++mismatches;
      c.expect(false, "query " + std::to_string(i) + ": enumerator says " +
                          (a.status == CheckStatus::Sat ? "sat" : "unsat") +
                          ", external says " +
                          (b.status == CheckStatus::Sat ? "sat" : "unsat"));
    }
  }
  c.expect(compared >= 200, "only " + std::to_string(compared) + " conclusive comparisons");
  c.expect(mismatches == 0, std::to_string(mismatches) + " verdict mismatches");
  c.finish();
}
