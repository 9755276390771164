#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bluejay {

// Interned identifier. 0 is reserved for "no symbol".
using Symbol = uint32_t;

class SymbolTable {
public:
  static SymbolTable& instance() {
    static SymbolTable t;
    return t;
  }

  Symbol intern(const std::string& s) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    Symbol id = static_cast<Symbol>(names_.size());
    names_.push_back(s);
    ids_.emplace(s, id);
    return id;
  }

  const std::string& name(Symbol s) const {
    std::lock_guard<std::mutex> lock(mu_);
    return names_.at(s);
  }

private:
  SymbolTable() { names_.push_back(""); ids_.emplace("", 0); }
  mutable std::mutex mu_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> ids_;
};

inline Symbol intern(const std::string& s) { return SymbolTable::instance().intern(s); }
inline const std::string& sym_name(Symbol s) { return SymbolTable::instance().name(s); }

// Identity of one runtime clause instance: the clause's label plus the number
// of function entries on the path to it.
struct ClauseKey {
  Symbol id = 0;
  int32_t depth = 0;

  bool operator==(const ClauseKey& o) const { return id == o.id && depth == o.depth; }
  bool operator!=(const ClauseKey& o) const { return !(*this == o); }
  bool operator<(const ClauseKey& o) const {
    return id != o.id ? id < o.id : depth < o.depth;
  }
};

struct ClauseKeyHash {
  size_t operator()(const ClauseKey& k) const {
    return std::hash<uint64_t>()((uint64_t(k.id) << 32) | uint32_t(k.depth));
  }
};

inline std::string key_str(const ClauseKey& k) {
  return sym_name(k.id) + "@" + std::to_string(k.depth);
}

// Deterministic RNG (splitmix64). std::mt19937 distributions are not portable
// across standard libraries, and seeds must reproduce runs bit-exactly.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  bool next_bool() { return (next() & 1) != 0; }

  // Uniform in [lo, hi], inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    uint64_t span = uint64_t(hi - lo) + 1;
    return lo + int64_t(next() % span);
  }

  Rng fork() { return Rng(next()); }

private:
  uint64_t state_;
};

struct InternalInvariantError : std::runtime_error {
  explicit InternalInvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bluejay
