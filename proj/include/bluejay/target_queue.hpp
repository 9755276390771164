#pragma once

#include <map>
#include <set>
#include <string>

#include "bluejay/common.hpp"
#include "bluejay/path_tree.hpp"

namespace bluejay {

// Three priority orders over the same target set: depth-first (deepest and
// most recent first), breadth-first (shallowest and oldest first), and
// uniformly random. A target exists at most once per queue; re-pushing
// re-prioritizes it.
class TargetQueues {
public:
  explicit TargetQueues(uint64_t seed) : rng_(seed) {}

  void push(const Target& t) {
    std::string id = t.id();
    auto it = entries_.find(id);
    if (it != entries_.end()) erase_entry(id, it->second);
    Entry e;
    e.target = t;
    e.seq = ++seq_;
    e.rand = rng_.next();
    dfs_.insert(dfs_key(e, id));
    bfs_.insert(bfs_key(e, id));
    rnd_.insert(rnd_key(e, id));
    entries_[id] = e;
  }

  std::optional<Target> pop_dfs() { return pop_from(dfs_); }
  std::optional<Target> pop_bfs() { return pop_from(bfs_); }
  std::optional<Target> pop_random() { return pop_from(rnd_); }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

private:
  struct Entry {
    Target target;
    long seq = 0;
    uint64_t rand = 0;
  };
  using Key = std::tuple<int64_t, int64_t, std::string>;

  Key dfs_key(const Entry& e, const std::string& id) const {
    // deepest first, then newest first
    return {-int64_t(e.target.depth()), -e.seq, id};
  }
  Key bfs_key(const Entry& e, const std::string& id) const {
    return {int64_t(e.target.depth()), e.seq, id};
  }
  Key rnd_key(const Entry& e, const std::string& id) const {
    return {int64_t(e.rand >> 1), e.seq, id};
  }

  void erase_entry(const std::string& id, const Entry& e) {
    dfs_.erase(dfs_key(e, id));
    bfs_.erase(bfs_key(e, id));
    rnd_.erase(rnd_key(e, id));
    entries_.erase(id);
  }

  std::optional<Target> pop_from(std::set<Key>& q) {
    if (q.empty()) return std::nullopt;
    auto key = *q.begin();
    const std::string& id = std::get<2>(key);
    auto it = entries_.find(id);
    Target t = it->second.target;
    erase_entry(id, it->second);
    return t;
  }

  Rng rng_;
  long seq_ = 0;
  std::map<std::string, Entry> entries_;
  std::set<Key> dfs_, bfs_, rnd_;
};

}  // namespace bluejay
