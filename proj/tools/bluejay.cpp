// bluejay: a type-error refuter for the Bluejay language. Type declarations
// compile into executable generator/checker/wrapper code; a concolic search
// (or an exhaustive/fuzzing oracle) then hunts for an input stream that drives
// the instrumented program to ERROR. Any reported error ships with a
// replayable witness feed.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bluejay/bench.hpp"
#include "bluejay/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string backend = "concolic";
  bool no_wrap = false;
  bool no_guard = false;
  int64_t max_step = 50000;
  int max_depth = 60;
  double timeout_s = 90.0;
  uint64_t seed = 0;
  long fuzz_runs = 10000;
  std::string solver;
  std::string format = "human";
  std::string solver_debug_dir;
  bool dump_core = false;
  std::string witness_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", backend, "search backend")
        ->check(CLI::IsMember({"concolic", "exhaustive", "fuzz"}));
    cmd->add_flag("--no-wrap", no_wrap, "skip use-checking wrappers");
    cmd->add_flag("--no-guard", no_guard, "skip primitive-operation guards");
    cmd->add_option("--max-step", max_step, "per-run step budget");
    cmd->add_option("--max-depth", max_depth, "path tree depth limit");
    cmd->add_option("--timeout-s", timeout_s, "global search timeout in seconds");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--fuzz-runs", fuzz_runs, "runs for the fuzz backend");
    cmd->add_option("--solver", solver,
                    "external SMT-LIB 2 solver command (default: $BLUEJAY_SOLVER, "
                    "else the built-in bounded enumerator)");
    cmd->add_option("--solver-debug-dir", solver_debug_dir,
                    "write each solver query as a .smt2 script into this directory");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"human", "structured"}));
    cmd->add_flag("--dump-core", dump_core, "print the instrumented core program");
    cmd->add_option("--witness", witness_path, "where to write the witness feed");
  }

  bluejay::RunOptions options() const {
    bluejay::RunOptions opts;
    if (backend == "exhaustive") opts.backend = bluejay::BackendKind::Exhaustive;
    else if (backend == "fuzz") opts.backend = bluejay::BackendKind::Fuzz;
    opts.wrap = !no_wrap;
    opts.guard = !no_guard;
    opts.search.max_step = max_step;
    opts.search.max_tree_depth = max_depth;
    opts.search.timeout_s = timeout_s;
    opts.search.seed = seed;
    opts.fuzz_runs = fuzz_runs;
    opts.solver_command = solver;
    opts.solver_debug_dir = solver_debug_dir;
    if (opts.solver_command.empty()) {
      const char* env = std::getenv("BLUEJAY_SOLVER");
      if (env) opts.solver_command = env;
    }
    opts.dump_core = dump_core;
    return opts;
  }
};

const char* verdict_name(bluejay::CheckOutcome::Verdict v) {
  switch (v) {
    case bluejay::CheckOutcome::Verdict::ErrorFound: return "error";
    case bluejay::CheckOutcome::Verdict::NoError: return "no-error";
    case bluejay::CheckOutcome::Verdict::NoErrorBounded: return "no-error-bounded";
    case bluejay::CheckOutcome::Verdict::Timeout: return "timeout";
  }
  return "?";
}

int cmd_check(const std::string& path, const CommonFlags& flags) {
  bluejay::RunOptions opts = flags.options();
  std::string source;
  bluejay::CheckOutcome out;
  try {
    source = read_file(path);
    out = bluejay::check_program(source, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (opts.dump_core) std::cout << out.dump << "\n";

  std::string witness_file;
  if (out.error_found()) {
    witness_file = flags.witness_path.empty() ? path + ".feed" : flags.witness_path;
    bluejay::feed_to_file(out.witness, witness_file);
  }

  if (flags.format == "structured") {
    json j;
    j["verdict"] = verdict_name(out.verdict);
    j["stats"] = {{"runs", out.stats.runs},
                  {"solver_calls", out.stats.solver_calls},
                  {"search_s", out.search_s},
                  {"translate_s", out.translate_s},
                  {"depth", out.depth_reached}};
    if (out.error_found()) {
      j["declaration"] = out.report.value_name;
      j["expected"] = out.report.expected;
      j["actual"] = out.report.actual;
      j["found_at"] = out.report.found_at;
      j["witness"] = witness_file;
    }
    std::cout << j.dump() << "\n";
  } else {
    std::cout << bluejay::outcome_text(out, opts);
    if (out.error_found()) std::cout << "witness feed written to " << witness_file << "\n";
  }
  return out.error_found() ? 1 : 0;
}

int cmd_replay(const std::string& program_path, const std::string& feed_path,
               const CommonFlags& flags) {
  try {
    bluejay::RunOptions opts = flags.options();
    bluejay::Prepared p = bluejay::prepare(read_file(program_path), opts);
    bluejay::Feed feed = bluejay::feed_from_file(feed_path);
    bluejay::Outcome out = bluejay::replay(*p.normalized, feed, opts.search.max_step);
    switch (out.kind) {
      case bluejay::OutcomeKind::Error:
        std::cout << "ERROR at clause " << bluejay::key_str(out.site) << "\n";
        return 0;
      case bluejay::OutcomeKind::Value:
        std::cout << "value: " << bluejay::render_value(*out.value) << "\n";
        return 1;
      case bluejay::OutcomeKind::MZero:
        std::cout << "mzero (discarded path)\n";
        return 1;
      case bluejay::OutcomeKind::StepLimit:
        std::cout << "step limit reached\n";
        return 1;
      default:
        return 2;
    }
  } catch (const bluejay::FeedMissError& e) {
    std::cerr << "feed miss: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_bench(const std::string& dir, const CommonFlags& flags) {
  bluejay::RunOptions opts = flags.options();
  bluejay::BenchResult result;
  try {
    result = bluejay::run_bench(dir, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (flags.format == "structured") {
    for (const auto& row : result.rows) {
      json j;
      j["name"] = row.name;
      j["verdict"] = row.failed ? "harness-failure" : verdict_name(row.verdict);
      j["expected_error"] = row.expect_error;
      j["matched"] = row.matched;
      j["run_ms"] = row.run_ms;
      j["translate_ms"] = row.translate_ms;
      j["total_ms"] = row.run_ms + row.translate_ms;
      j["loc"] = row.loc;
      std::cout << j.dump() << "\n";
    }
  } else {
    std::cout << bluejay::bench_table(result);
  }
  return result.all_matched ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bluejay: semantic type-error refuter"};
  app.require_subcommand(1);

  CommonFlags flags;

  std::string check_path;
  CLI::App* check = app.add_subcommand("check", "type-check one program by refutation");
  check->add_option("file", check_path, "program (.bjy)")->required();
  flags.attach(check);

  std::string replay_program, replay_feed;
  CLI::App* replay = app.add_subcommand("replay", "replay a witness feed");
  replay->add_option("file", replay_program, "program (.bjy)")->required();
  replay->add_option("feed", replay_feed, "witness feed file")->required();
  flags.attach(replay);

  std::string bench_dir;
  CLI::App* bench = app.add_subcommand("bench", "run a corpus with expected verdicts");
  bench->add_option("dir", bench_dir, "corpus directory")->required();
  flags.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (check->parsed()) return cmd_check(check_path, flags);
  if (replay->parsed()) return cmd_replay(replay_program, replay_feed, flags);
  if (bench->parsed()) return cmd_bench(bench_dir, flags);
  return 2;
}
