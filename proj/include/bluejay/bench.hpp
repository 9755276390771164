#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "bluejay/pipeline.hpp"

namespace bluejay {

struct BenchRow {
  std::string name;
  bool expect_error = false;
  bool has_expectation = false;
  CheckOutcome::Verdict verdict = CheckOutcome::Verdict::NoError;
  bool matched = false;
  bool failed = false;       // harness-level failure (parse error, ...)
  std::string failure;
  double run_ms = 0.0;
  double translate_ms = 0.0;
  long loc = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  bool all_matched = true;
};

namespace detail {

inline long count_loc(const std::string& src) {
  long n = 0;
  bool any = false;
  for (char c : src) {
    if (c == '\n') { if (any) ++n; any = false; }
    else if (!std::isspace(static_cast<unsigned char>(c))) any = true;
  }
  if (any) ++n;
  return n;
}

}  // namespace detail

// Runs every `<name>.bjy` under dir against its `<name>.expect` sidecar
// (one line: `error` or `no-error`). Per-file failures are reported and the
// harness continues.
inline BenchResult run_bench(const std::string& dir, const RunOptions& opts) {
  namespace fs = std::filesystem;
  BenchResult result;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".bjy") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const fs::path& f : files) {
    BenchRow row;
    row.name = f.stem().string();
    fs::path expect = f;
    expect.replace_extension(".expect");
    if (fs::exists(expect)) {
      std::ifstream in(expect);
      std::string line;
      std::getline(in, line);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
        line.pop_back();
      row.has_expectation = true;
      row.expect_error = line == "error";
    }
    try {
      std::ifstream in(f);
      std::ostringstream ss;
      ss << in.rdbuf();
      std::string src = ss.str();
      row.loc = detail::count_loc(src);
      CheckOutcome out = check_program(src, opts);
      row.verdict = out.verdict;
      row.run_ms = out.search_s * 1000.0;
      row.translate_ms = out.translate_s * 1000.0;
      row.matched = !row.has_expectation || (row.expect_error == out.error_found());
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure = e.what();
      row.matched = false;
    }
    if (!row.matched) result.all_matched = false;
    result.rows.push_back(std::move(row));
  }
  return result;
}

inline const char* bench_verdict_text(const BenchRow& r) {
  if (r.failed) return "FAIL";
  switch (r.verdict) {
    case CheckOutcome::Verdict::ErrorFound: return "error";
    case CheckOutcome::Verdict::NoError: return "no-error";
    case CheckOutcome::Verdict::NoErrorBounded: return "no-error*";
    case CheckOutcome::Verdict::Timeout: return "timeout";
  }
  return "?";
}

inline std::string bench_table(const BenchResult& result) {
  std::ostringstream os;
  size_t name_w = 4;
  for (const auto& r : result.rows) name_w = std::max(name_w, r.name.size());
  os << std::left << std::setw(int(name_w) + 2) << "name" << std::right
     << std::setw(10) << "run(ms)" << std::setw(12) << "transl(ms)" << std::setw(11)
     << "total(ms)" << std::setw(6) << "loc" << "  " << std::left << std::setw(11)
     << "verdict" << "expected" << "\n";
  double run_total = 0, transl_total = 0;
  long mismatches = 0;
  for (const auto& r : result.rows) {
    run_total += r.run_ms;
    transl_total += r.translate_ms;
    if (!r.matched) ++mismatches;
    os << std::left << std::setw(int(name_w) + 2) << r.name << std::right << std::fixed
       << std::setprecision(1) << std::setw(10) << r.run_ms << std::setw(12)
       << r.translate_ms << std::setw(11) << (r.run_ms + r.translate_ms) << std::setw(6)
       << r.loc << "  " << std::left << std::setw(11) << bench_verdict_text(r)
       << (r.has_expectation ? (r.expect_error ? "error" : "no-error") : "-")
       << (r.matched ? "" : "   <-- MISMATCH") << "\n";
    if (r.failed) os << "    failure: " << r.failure << "\n";
  }
  os << std::left << std::setw(int(name_w) + 2) << "TOTAL" << std::right << std::fixed
     << std::setprecision(1) << std::setw(10) << run_total << std::setw(12) << transl_total
     << std::setw(11) << (run_total + transl_total) << "\n";
  os << result.rows.size() << " programs, " << mismatches << " mismatches\n";
  return os.str();
}

}  // namespace bluejay
