#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>

#include "bluejay/bench.hpp"

using namespace bluejay;
namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string name;
  std::string source;
  bool expect_error = false;
  std::string features;
};

std::vector<Entry> load_corpus() {
  std::vector<Entry> out;
  for (const auto& e : fs::directory_iterator(BLUEJAY_CORPUS_DIR)) {
    if (e.path().extension() != ".bjy") continue;
    Entry entry;
    entry.name = e.path().stem().string();
    std::ifstream in(e.path());
    std::ostringstream ss;
    ss << in.rdbuf();
    entry.source = ss.str();
    fs::path expect = e.path();
    expect.replace_extension(".expect");
    std::ifstream ein(expect);
    std::string line;
    std::getline(ein, line);
    entry.expect_error = line.rfind("error", 0) == 0;
    // header comment: (* features: X Y Z -- note *)
    size_t fpos = entry.source.find("features:");
    if (fpos != std::string::npos) {
      size_t end = entry.source.find("--", fpos);
      if (end == std::string::npos) end = entry.source.find("*)", fpos);
      entry.features = entry.source.substr(fpos + 9, end - fpos - 9);
    }
    out.push_back(std::move(entry));
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  return out;
}

}  // namespace

TEST_CASE("every corpus entry parses, instruments, and matches its verdict") {
  RunOptions opts;
  opts.search.timeout_s = 60;
  BenchResult r = run_bench(BLUEJAY_CORPUS_DIR, opts);
  REQUIRE(!r.rows.empty());
  for (const auto& row : r.rows) {
    INFO(row.name);
    REQUIRE(!row.failed);
    REQUIRE(row.has_expectation);
    REQUIRE(row.matched);
  }
}

TEST_CASE("error verdicts are stable across seeds") {
  for (const Entry& e : load_corpus()) {
    if (!e.expect_error) continue;
    for (uint64_t seed : {1, 2, 3}) {
      RunOptions opts;
      opts.search.seed = seed;
      opts.search.timeout_s = 60;
      CheckOutcome out = check_program(e.source, opts);
      INFO(e.name + " seed " + std::to_string(seed));
      REQUIRE(out.error_found());
    }
  }
}

TEST_CASE("every feature letter appears in at least one error-expected entry") {
  const std::string letters = "PVIRMHSTOFDACWNUYX";
  std::map<char, int> seen;
  for (const Entry& e : load_corpus()) {
    if (!e.expect_error) continue;
    for (char c : e.features)
      if (letters.find(c) != std::string::npos) ++seen[c];
  }
  for (char c : letters) {
    INFO(std::string("feature letter ") + c);
    REQUIRE(seen[c] >= 1);
  }
}
