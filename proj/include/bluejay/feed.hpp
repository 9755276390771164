#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bluejay/common.hpp"

namespace bluejay {

struct PickVal {
  bool is_bool = false;
  int64_t i = 0;
  bool b = false;

  static PickVal of_int(int64_t v) { PickVal p; p.is_bool = false; p.i = v; return p; }
  static PickVal of_bool(bool v) { PickVal p; p.is_bool = true; p.b = v; return p; }

  bool operator==(const PickVal& o) const {
    return is_bool == o.is_bool && (is_bool ? b == o.b : i == o.i);
  }
};

// A replayable assignment of concrete values to pick sites plus a policy for
// sites the map misses. Replay mode fails on a miss; search mode randomizes;
// the exhaustive oracle drives picks positionally from a script.
struct Feed {
  enum class Fallback { FailOnMiss, Random, Script };

  std::unordered_map<ClauseKey, PickVal, ClauseKeyHash> values;
  Fallback fallback = Fallback::FailOnMiss;
  uint64_t seed = 0;
  std::vector<PickVal> script;  // Fallback::Script only; consumed in pick order

  static Feed replay_of(std::unordered_map<ClauseKey, PickVal, ClauseKeyHash> m) {
    Feed f;
    f.values = std::move(m);
    f.fallback = Fallback::FailOnMiss;
    return f;
  }
  static Feed random(uint64_t seed) {
    Feed f;
    f.fallback = Fallback::Random;
    f.seed = seed;
    return f;
  }
  static Feed scripted(std::vector<PickVal> vals) {
    Feed f;
    f.fallback = Fallback::Script;
    f.script = std::move(vals);
    return f;
  }
};

struct BranchStep {
  ClauseKey site;
  bool taken = false;  // direction of the conditional
};

struct PickRecord {
  ClauseKey site;
  PickVal value;
};

// One run's observable history: branches taken plus every pick consumed.
struct Trace {
  std::vector<BranchStep> branches;
  std::vector<PickRecord> picks;

  Feed recorded_feed() const {
    std::unordered_map<ClauseKey, PickVal, ClauseKeyHash> m;
    for (const auto& p : picks) m.emplace(p.site, p.value);
    return Feed::replay_of(std::move(m));
  }
};

// Witness file format: one `clause_id depth kind value` line per pick.
inline std::string feed_to_text(const Feed& f) {
  std::vector<std::pair<ClauseKey, PickVal>> entries(f.values.begin(), f.values.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream os;
  for (const auto& [k, v] : entries) {
    os << sym_name(k.id) << " " << k.depth << " " << (v.is_bool ? "b" : "i") << " ";
    if (v.is_bool) os << (v.b ? "true" : "false");
    else os << v.i;
    os << "\n";
  }
  return os.str();
}

struct FeedFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Feed feed_from_text(const std::string& text) {
  Feed f;
  f.fallback = Feed::Fallback::FailOnMiss;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, kind, value;
    int depth;
    if (!(ls >> id >> depth >> kind >> value))
      throw FeedFormatError("malformed feed line " + std::to_string(lineno));
    ClauseKey key{intern(id), depth};
    if (kind == "i") f.values[key] = PickVal::of_int(std::strtoll(value.c_str(), nullptr, 10));
    else if (kind == "b") f.values[key] = PickVal::of_bool(value == "true");
    else throw FeedFormatError("unknown pick kind '" + kind + "' on line " + std::to_string(lineno));
  }
  return f;
}

inline void feed_to_file(const Feed& f, const std::string& path) {
  std::ofstream out(path);
  out << feed_to_text(f);
}

inline Feed feed_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FeedFormatError("cannot read feed file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return feed_from_text(ss.str());
}

}  // namespace bluejay
