#pragma once

#include <chrono>

#include "bluejay/concolic.hpp"
#include "bluejay/oracle.hpp"
#include "bluejay/parse.hpp"
#include "bluejay/report.hpp"

namespace bluejay {

enum class BackendKind { Concolic, Exhaustive, Fuzz };

struct RunOptions {
  BackendKind backend = BackendKind::Concolic;
  bool wrap = true;
  bool guard = true;
  SearchConfig search;
  EnumBounds enum_bounds;
  long fuzz_runs = 10000;
  std::string solver_command;  // empty: built-in bounded enumerator
  std::string solver_debug_dir;
  bool dump_core = false;
};

struct Prepared {
  Instrumented ins;
  ExprPtr normalized;
};

inline Prepared prepare(const std::string& source, const RunOptions& opts) {
  Prepared p;
  ExprPtr ast = parse(source);
  InstrumentConfig icfg;
  icfg.wrap_enabled = opts.wrap;
  icfg.guard_primitives = opts.guard;
  p.ins = instrument_program(ast, icfg);
  p.normalized = normalize(p.ins.program);
  return p;
}

struct CheckOutcome {
  enum class Verdict { ErrorFound, NoError, NoErrorBounded, Timeout };
  Verdict verdict = Verdict::NoError;
  ErrorReport report;       // valid when verdict == ErrorFound
  Feed witness;
  int depth_reached = 0;
  SearchStats stats;
  double translate_s = 0.0;
  double search_s = 0.0;
  std::string dump;

  bool error_found() const { return verdict == Verdict::ErrorFound; }
};

inline SolverHandle make_solver(const RunOptions& opts) {
  SolverHandle h;
  if (!opts.solver_command.empty()) {
    h.backend = SolverHandle::Backend::External;
    h.command = opts.solver_command;
  }
  h.debug_dir = opts.solver_debug_dir;
  return h;
}

inline CheckOutcome check_program(const std::string& source, const RunOptions& opts,
                                  SolverHandle* solver = nullptr) {
  using clock = std::chrono::steady_clock;
  CheckOutcome out;

  auto t0 = clock::now();
  Prepared p = prepare(source, opts);
  out.translate_s = std::chrono::duration<double>(clock::now() - t0).count();
  if (opts.dump_core) out.dump = render(p.normalized);

  EvalLimits limits;
  limits.max_steps = opts.search.max_step;
  limits.max_host_depth = opts.search.max_host_depth;

  auto t1 = clock::now();
  switch (opts.backend) {
    case BackendKind::Concolic: {
      SolverHandle local = make_solver(opts);
      SolverHandle& h = solver ? *solver : local;
      SearchReport rep = search(*p.normalized, opts.search, h);
      out.stats = rep.stats;
      out.depth_reached = rep.depth_reached;
      switch (rep.verdict) {
        case Verdict::ErrorFound:
          out.verdict = CheckOutcome::Verdict::ErrorFound;
          out.witness = rep.witness;
          out.report = build_error_report(p.ins, *p.normalized, rep.witness, rep.error_site, limits);
          break;
        case Verdict::Exhausted:
          out.verdict = CheckOutcome::Verdict::NoError;
          break;
        case Verdict::ExhaustedAtDepth:
          out.verdict = CheckOutcome::Verdict::NoErrorBounded;
          break;
        case Verdict::Timeout:
          out.verdict = CheckOutcome::Verdict::Timeout;
          break;
      }
      break;
    }
    case BackendKind::Exhaustive: {
      EnumBounds b = opts.enum_bounds;
      b.step_budget = opts.search.max_step;
      RefuteResult r = exhaustive_refute(*p.normalized, b);
      out.stats.runs = r.runs;
      if (r.status == RefuteStatus::Refuted) {
        out.verdict = CheckOutcome::Verdict::ErrorFound;
        out.witness = r.witness;
        out.report = build_error_report(p.ins, *p.normalized, r.witness, r.error_site, limits);
      } else {
        out.verdict = r.status == RefuteStatus::NoErrorWithinBounds && r.fully_exhausted
                          ? CheckOutcome::Verdict::NoError
                          : CheckOutcome::Verdict::NoErrorBounded;
      }
      break;
    }
    case BackendKind::Fuzz: {
      RefuteResult r = fuzz_refute(*p.normalized, opts.search.seed, opts.fuzz_runs,
                                   opts.search.max_step);
      out.stats.runs = r.runs;
      if (r.status == RefuteStatus::Refuted) {
        out.verdict = CheckOutcome::Verdict::ErrorFound;
        out.witness = r.witness;
        out.report = build_error_report(p.ins, *p.normalized, r.witness, r.error_site, limits);
      } else {
        out.verdict = CheckOutcome::Verdict::NoErrorBounded;
      }
      break;
    }
  }
  out.search_s = std::chrono::duration<double>(clock::now() - t1).count();
  return out;
}

// Human-format result text: the paper-shaped report, or the no-error notice.
inline std::string outcome_text(const CheckOutcome& out, const RunOptions& opts) {
  std::ostringstream os;
  switch (out.verdict) {
    case CheckOutcome::Verdict::ErrorFound:
      os << out.report.text();
      break;
    case CheckOutcome::Verdict::NoError:
      os << "No errors found\n";
      os << "All reachable paths exhausted.\n";
      break;
    case CheckOutcome::Verdict::NoErrorBounded:
      os << "No errors found\n";
      if (opts.backend == BackendKind::Concolic)
        os << "All paths exhausted up to depth " << out.depth_reached << ".\n";
      else if (opts.backend == BackendKind::Fuzz)
        os << "No error after " << out.stats.runs << " random runs.\n";
      else
        os << "No error within the enumeration bounds.\n";
      break;
    case CheckOutcome::Verdict::Timeout:
      os << "No errors found\n";
      os << "Search timed out (inconclusive).\n";
      break;
  }
  return os.str();
}

}  // namespace bluejay
