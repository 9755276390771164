#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "bluejay/solver.hpp"  // run_subprocess

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args) {
  auto r = bluejay::detail::run_subprocess(std::string(BLUEJAY_CLI) + " " + args, "", 120000);
  REQUIRE(!r.spawn_failed);
  REQUIRE(!r.timed_out);
  return {r.exit_code, r.output};
}

std::string corpus_file(const std::string& name) {
  return std::string(BLUEJAY_CORPUS_DIR) + "/" + name;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bluejay-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("check exits 1 and prints the report shape on an ill-typed program") {
  TempDir tmp;
  std::string witness = (tmp.path / "id.feed").string();
  CliResult r = cli("check " + corpus_file("id_bool.bjy") + " --witness " + witness);
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("** Bluejay Type Errors **") != std::string::npos);
  REQUIRE(r.out.find("- Found at clause :") != std::string::npos);
  REQUIRE(r.out.find("* Expected : (bool -> bool)") != std::string::npos);
  REQUIRE(r.out.find("* Actual   : (bool -> int)") != std::string::npos);
  REQUIRE(fs::exists(witness));

  CliResult rep = cli("replay " + corpus_file("id_bool.bjy") + " " + witness);
  REQUIRE(rep.code == 0);
  REQUIRE(rep.out.find("ERROR") != std::string::npos);
}

TEST_CASE("check exits 0 and reports no errors on a well-typed program") {
  CliResult r = cli("check " + corpus_file("transform_record.bjy"));
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("No errors found") != std::string::npos);
}

TEST_CASE("a missing input file exits 2") {
  CliResult r = cli("check /nonexistent/missing.bjy 2>&1");
  REQUIRE(r.code == 2);
}

TEST_CASE("a parse failure exits 2") {
  TempDir tmp;
  std::string bad = (tmp.path / "bad.bjy").string();
  std::ofstream(bad) << "let x = in";
  CliResult r = cli("check " + bad + " 2>&1");
  REQUIRE(r.code == 2);
}

TEST_CASE("instrumentation-only forms in source exit 2") {
  TempDir tmp;
  std::string bad = (tmp.path / "instr.bjy").string();
  std::ofstream(bad) << "pick_i + 1";
  CliResult r = cli("check " + bad + " 2>&1");
  REQUIRE(r.code == 2);
}

TEST_CASE("structured output is one machine-readable record") {
  TempDir tmp;
  std::string witness = (tmp.path / "w.feed").string();
  CliResult r =
      cli("check " + corpus_file("id_bool.bjy") + " --format structured --witness " + witness);
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("\"verdict\":\"error\"") != std::string::npos);
  REQUIRE(r.out.find("\"declaration\":\"id\"") != std::string::npos);
  REQUIRE(r.out.find("\"witness\":") != std::string::npos);
  REQUIRE(r.out.find('\n') == r.out.size() - 1);  // line-delimited
}

TEST_CASE("replay on a pick-free program prints its value") {
  TempDir tmp;
  std::string prog = (tmp.path / "v.bjy").string();
  std::ofstream(prog) << "1 + 2";
  std::string feed = (tmp.path / "empty.feed").string();
  std::ofstream(feed) << "";
  CliResult r = cli("replay " + prog + " " + feed);
  REQUIRE(r.code == 1);  // ran fine but did not reach ERROR
  REQUIRE(r.out.find("value: 3") != std::string::npos);
}

TEST_CASE("replay with a wrong feed reports the miss") {
  TempDir tmp;
  std::string feed = (tmp.path / "wrong.feed").string();
  std::ofstream(feed) << "nonsense$clause 0 i 5\n";
  CliResult r = cli("replay " + corpus_file("id_bool.bjy") + " " + feed + " 2>&1");
  // id_bool's check draws a pick the feed does not cover
  REQUIRE(r.code == 2);
}

TEST_CASE("dump-core prints instrumented code") {
  CliResult r = cli("check " + corpus_file("id_bool.bjy") + " --dump-core");
  REQUIRE(r.out.find("pick_b") != std::string::npos);
}

TEST_CASE("exhaustive and fuzz backends are selectable") {
  CliResult ex = cli("check " + corpus_file("id_bool.bjy") + " --backend exhaustive");
  REQUIRE(ex.code == 1);
  CliResult fz = cli("check " + corpus_file("id_bool.bjy") + " --backend fuzz --seed 3");
  REQUIRE(fz.code == 1);
}

TEST_CASE("the external solver is usable through --solver") {
  CliResult r = cli("check " + corpus_file("appl_int.bjy") + " --solver \"" BLUEJAY_MINISMT
                    "\" --timeout-s 60");
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("** Bluejay Type Errors **") != std::string::npos);
}

TEST_CASE("bench runs a corpus and self-checks expectations") {
  TempDir tmp;
  std::ofstream((tmp.path / "good.bjy").string()) << "let id (x : bool) : bool = x in id";
  std::ofstream((tmp.path / "good.expect").string()) << "no-error\n";
  std::ofstream((tmp.path / "bad.bjy").string()) << "let id (x : bool) : bool = 1 in id";
  std::ofstream((tmp.path / "bad.expect").string()) << "error\n";
  CliResult r = cli("bench " + tmp.path.string());
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("bad") != std::string::npos);
  REQUIRE(r.out.find("0 mismatches") != std::string::npos);

  std::ofstream((tmp.path / "bad.expect").string()) << "no-error\n";
  CliResult r2 = cli("bench " + tmp.path.string());
  REQUIRE(r2.code == 1);
  REQUIRE(r2.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("bench on an empty corpus exits 0 with an empty table") {
  TempDir tmp;
  CliResult r = cli("bench " + tmp.path.string());
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("0 programs") != std::string::npos);
}

TEST_CASE("bench emits machine-readable rows with timing columns") {
  TempDir tmp;
  std::ofstream((tmp.path / "one.bjy").string()) << "let id (x : bool) : bool = 1 in id";
  std::ofstream((tmp.path / "one.expect").string()) << "error\n";
  CliResult r = cli("bench " + tmp.path.string() + " --format structured");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("\"name\":\"one\"") != std::string::npos);
  REQUIRE(r.out.find("\"run_ms\":") != std::string::npos);
  REQUIRE(r.out.find("\"translate_ms\":") != std::string::npos);
  REQUIRE(r.out.find("\"total_ms\":") != std::string::npos);
  REQUIRE(r.out.find("\"loc\":") != std::string::npos);
  REQUIRE(r.out.find("\"matched\":true") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CliResult r = cli("frobnicate 2>&1");
  REQUIRE(r.code == 2);
}
