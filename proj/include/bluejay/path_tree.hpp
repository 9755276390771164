#pragma once

#include <memory>

#include "bluejay/encode.hpp"
#include "bluejay/formula.hpp"

namespace bluejay {

// A target names the child to negate: the branch decisions from the root,
// where the final pair is the direction we want to force.
struct Target {
  std::vector<std::pair<ClauseKey, bool>> path;

  size_t depth() const { return path.size(); }
  std::string id() const {
    std::string s;
    for (const auto& [k, d] : path) {
      s += key_str(k);
      s += d ? "+" : "-";
    }
    return s;
  }
};

enum class ChildStatus { Unsolved, Unknown, Unsatisfiable, Hit };

struct PathNode;

struct PathChild {
  ChildStatus status = ChildStatus::Unsolved;
  bool constraint_set = false;
  std::optional<Formula> constraint;  // nullopt: condition outside formula sorts
  std::unique_ptr<PathNode> node;     // subtree; only Hit children have one
};

// Each node covers the clauses between one branch and the next; formulas
// gathered there are stored once (the same prefix always recomputes them).
struct PathNode {
  bool site_set = false;
  ClauseKey site{};  // the conditional this node ends at
  bool formulas_set = false;
  std::vector<Formula> formulas;
  PathChild children[2];

  PathChild& child(bool dir) { return children[dir ? 1 : 0]; }
  const PathChild& child(bool dir) const { return children[dir ? 1 : 0]; }
};

struct RunBranch {
  ClauseKey site;
  bool dir = false;
  std::optional<Formula> cons_true;   // constraint forcing the true child
  std::optional<Formula> cons_false;  // constraint forcing the false child
};

class PathTree {
public:
  PathNode root;

  // Merges one run: segment[i] are the formulas gathered before branch i.
  // Returns false if the trace contradicts the tree (an internal bug).
  bool merge(const std::vector<RunBranch>& branches,
             const std::vector<std::vector<Formula>>& segments, size_t max_depth) {
    PathNode* node = &root;
    for (size_t i = 0; i < branches.size() && i < max_depth; ++i) {
      if (!node->formulas_set && i < segments.size()) {
        node->formulas = segments[i];
        node->formulas_set = true;
      }
      if (node->site_set && node->site != branches[i].site) return false;
      node->site = branches[i].site;
      node->site_set = true;
      for (bool d : {false, true}) {
        PathChild& side = node->child(d);
        if (!side.constraint_set) {
          side.constraint = d ? branches[i].cons_true : branches[i].cons_false;
          side.constraint_set = true;
        }
      }
      PathChild& c = node->child(branches[i].dir);
      c.status = ChildStatus::Hit;
      if (!c.node) c.node = std::make_unique<PathNode>();
      node = c.node.get();
    }
    if (!node->formulas_set && branches.size() < segments.size() &&
        branches.size() <= max_depth) {
      // terminal segment of a run that ended without another branch
      node->formulas = segments[branches.size()];
      node->formulas_set = true;
    }
    return true;
  }

  PathChild* locate(const Target& t) {
    PathNode* node = &root;
    for (size_t i = 0; i + 1 < t.path.size(); ++i) {
      PathChild& c = node->child(t.path[i].second);
      if (!c.node) return nullptr;
      node = c.node.get();
    }
    if (t.path.empty()) return nullptr;
    return &node->child(t.path.back().second);
  }

  // Conjoins every node formula and taken-child constraint along the target's
  // prefix, ending with the target child's own constraint. nullopt when any
  // needed constraint is outside the formula sorts.
  std::optional<std::vector<Formula>> constraints_for(const Target& t) {
    std::vector<Formula> out;
    PathNode* node = &root;
    for (size_t i = 0; i < t.path.size(); ++i) {
      if (node->formulas_set)
        out.insert(out.end(), node->formulas.begin(), node->formulas.end());
      PathChild& c = node->child(t.path[i].second);
      if (!c.constraint_set || !c.constraint.has_value()) return std::nullopt;
      out.push_back(*c.constraint);
      if (i + 1 < t.path.size()) {
        if (!c.node) return std::nullopt;
        node = c.node.get();
      }
    }
    return out;
  }
};

}  // namespace bluejay
