#pragma once

#include <chrono>

#include "bluejay/encode.hpp"
#include "bluejay/interp.hpp"
#include "bluejay/normalize.hpp"
#include "bluejay/path_tree.hpp"
#include "bluejay/solver.hpp"
#include "bluejay/target_queue.hpp"

namespace bluejay {

struct SearchConfig {
  int64_t max_step = 50000;
  int max_tree_depth = 60;
  int depth_increments = 6;
  double timeout_s = 90.0;
  uint64_t seed = 0;
  double dfs_probability = 0.5;
  int max_host_depth = 15000;

  void validate() const {
    if (max_step <= 0 || max_tree_depth <= 0 || depth_increments <= 0 || timeout_s <= 0)
      throw std::invalid_argument("search budgets must be positive");
    if (max_tree_depth % depth_increments != 0)
      throw std::invalid_argument("depth_increments must divide max_tree_depth");
  }
};

enum class Verdict { ErrorFound, Exhausted, ExhaustedAtDepth, Timeout };

struct SearchStats {
  long runs = 0;
  long solver_calls = 0;
  long sat_results = 0;
  long unsat_results = 0;
  long unknown_results = 0;
  double wall_s = 0.0;
};

struct SearchReport {
  Verdict verdict = Verdict::Exhausted;
  int depth_reached = 0;
  Feed witness;           // ErrorFound: replays to Error
  ClauseKey error_site{}; // ErrorFound
  SearchStats stats;
};

namespace detail {

// Gathers one run's branches, per-segment formulas, and pick variables.
class SymbolicSession : public EvalListener {
public:
  SymbolicSession(LabelMap& labels, size_t max_branches)
      : labels_(labels), max_branches_(max_branches) {
    segments_.emplace_back();
  }

  void on_pick(ClauseKey key, PickVal v) override {
    if (!seen_picks_.insert(key).second) return;
    picks_.push_back({key, v.is_bool ? Sort::Bool : Sort::Int});
  }

  void on_branch(ClauseKey site, Origin cond, bool dir) override {
    if (branches_.size() >= max_branches_) {
      overflowed_ = true;
      return;
    }
    RunBranch b;
    b.site = site;
    b.dir = dir;
    b.cons_true = branch_constraint(cond, true);
    b.cons_false = branch_constraint(cond, false);
    branches_.push_back(std::move(b));
    segments_.emplace_back();
  }

  void on_clause(const ClauseEvent& ev) override {
    if (overflowed_) return;
    auto fs = encode_clause(ev, labels_);
    auto& seg = segments_.back();
    seg.insert(seg.end(), fs.begin(), fs.end());
  }

  const std::vector<RunBranch>& branches() const { return branches_; }
  const std::vector<std::vector<Formula>>& segments() const { return segments_; }
  const std::vector<PickVar>& picks() const { return picks_; }
  bool overflowed() const { return overflowed_; }

private:
  LabelMap& labels_;
  size_t max_branches_;
  std::vector<RunBranch> branches_;
  std::vector<std::vector<Formula>> segments_;
  std::vector<PickVar> picks_;
  std::unordered_set<ClauseKey, ClauseKeyHash> seen_picks_;
  bool overflowed_ = false;
};

}  // namespace detail

// Acquires the negations of branches taken by the merged run whose tree
// status is still Unsolved.
inline std::vector<Target> acquire_targets(const std::vector<RunBranch>& branches,
                                           PathTree& tree, size_t max_depth) {
  std::vector<Target> out;
  Target prefix;
  PathNode* node = &tree.root;
  for (size_t i = 0; i < branches.size() && i < max_depth; ++i) {
    const PathChild& sibling = node->child(!branches[i].dir);
    if (sibling.status == ChildStatus::Unsolved) {
      Target t = prefix;
      t.path.emplace_back(branches[i].site, !branches[i].dir);
      out.push_back(std::move(t));
    }
    prefix.path.emplace_back(branches[i].site, branches[i].dir);
    PathNode* next = node->child(branches[i].dir).node.get();
    if (!next) break;
    node = next;
  }
  return out;
}

// Solves one target against the tree: conjoin the prefix constraints, ask the
// solver, and record the child status.
inline CheckResult solve_target(const Target& t, PathTree& tree, SolverHandle& solver,
                                const std::vector<PickVar>& picks, size_t bv_width) {
  PathChild* child = tree.locate(t);
  CheckResult r;
  auto formulas = tree.constraints_for(t);
  if (!formulas.has_value()) {
    r.status = CheckStatus::Unknown;
    r.note = "path constraint outside formula sorts";
    if (child) child->status = ChildStatus::Unknown;
    return r;
  }
  Query q;
  q.formulas = std::move(*formulas);
  q.picks = picks;
  q.bv_width = bv_width;
  r = solver_check(q, solver);
  if (child) {
    if (r.status == CheckStatus::Unsat) child->status = ChildStatus::Unsatisfiable;
    if (r.status == CheckStatus::Unknown) child->status = ChildStatus::Unknown;
  }
  return r;
}

namespace detail {

class ConcolicEngine {
public:
  ConcolicEngine(const Expr& program, SearchConfig cfg, SolverHandle& solver)
      : program_(program), cfg_(cfg), solver_(solver), rng_(cfg.seed ^ 0x9e37u),
        queues_(Rng(cfg.seed).next()) {
    cfg_.validate();
    depth_step_ = cfg_.max_tree_depth / cfg_.depth_increments;
    depth_cap_ = depth_step_;
  }

  SearchReport run() {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    SearchReport rep;
    std::optional<Feed> next_feed;
    std::optional<Target> pending_target;
    bool last_run_hit_step_limit = false;

    while (true) {
      if (elapsed() > cfg_.timeout_s) {
        rep.verdict = Verdict::Timeout;
        break;
      }

      // one concrete+symbolic run
      Feed feed = next_feed.value_or(Feed::random(0));
      feed.fallback = Feed::Fallback::Random;
      feed.seed = rng_.next();
      next_feed.reset();

      SymbolicSession session(labels_, size_t(cfg_.max_tree_depth) + 1);
      EvalOptions opts;
      opts.limits.max_steps = cfg_.max_step;
      opts.limits.max_host_depth = cfg_.max_host_depth;
      opts.listener = &session;
      EvalResult res = eval(program_, feed, opts);
      ++rep.stats.runs;
      last_run_hit_step_limit = res.outcome.kind == OutcomeKind::StepLimit;

      for (const PickVar& p : session.picks()) known_picks_.insert(p);
      if (session.overflowed()) beyond_max_depth_ = true;

      if (pending_target.has_value()) {
        confirm_target_followed(*pending_target, res, session.branches());
        pending_target.reset();
      }

      if (!tree_.merge(session.branches(), session.segments(), size_t(cfg_.max_tree_depth)))
        throw InternalInvariantError("trace disagrees with path tree");

      if (res.outcome.kind == OutcomeKind::Error) {
        Feed witness = res.trace.recorded_feed();
        EvalOptions vopts;
        vopts.limits.max_steps = cfg_.max_step;
        vopts.limits.max_host_depth = cfg_.max_host_depth;
        EvalResult check = eval(program_, witness, vopts);
        if (check.outcome.kind != OutcomeKind::Error || check.outcome.site != res.outcome.site)
          throw InternalInvariantError("witness does not replay to the same error");
        rep.verdict = Verdict::ErrorFound;
        rep.witness = std::move(witness);
        rep.error_site = res.outcome.site;
        break;
      }

      for (Target& t : acquire_targets(session.branches(), tree_, size_t(cfg_.max_tree_depth))) {
        if (int(t.depth()) <= depth_cap_) queues_.push(t);
        else deferred_.push_back(std::move(t));
      }

      // choose and solve the next target
      bool exhausted = false;
      while (true) {
        if (elapsed() > cfg_.timeout_s) {
          rep.verdict = Verdict::Timeout;
          rep.stats.wall_s = elapsed();
          rep.depth_reached = depth_cap_;
          finalize(rep);
          return rep;
        }
        std::optional<Target> t = pop_target(last_run_hit_step_limit);
        if (!t.has_value()) {
          if (!deferred_.empty() && depth_cap_ < cfg_.max_tree_depth) {
            raise_cap();
            continue;
          }
          exhausted = true;
          break;
        }
        PathChild* child = tree_.locate(*t);
        if (!child || child->status != ChildStatus::Unsolved) continue;

        std::vector<PickVar> picks(known_picks_.begin(), known_picks_.end());
        CheckResult cr = solve_target(*t, tree_, solver_, picks, labels_.width());
        ++rep.stats.solver_calls;
        if (cr.status == CheckStatus::Sat) {
          ++rep.stats.sat_results;
          Feed f;
          f.values.insert(cr.model.values.begin(), cr.model.values.end());
          next_feed = std::move(f);
          pending_target = std::move(t);
          break;
        }
        if (cr.status == CheckStatus::Unsat) ++rep.stats.unsat_results;
        else {
          ++rep.stats.unknown_results;
          any_unknown_ = true;
        }
      }

      if (exhausted) {
        bool complete = !any_unknown_ && !beyond_max_depth_ && deferred_.empty();
        rep.verdict = complete ? Verdict::Exhausted : Verdict::ExhaustedAtDepth;
        break;
      }
    }

    rep.depth_reached = depth_cap_;
    rep.stats.wall_s = elapsed();
    finalize(rep);
    return rep;
  }

private:
  struct PickVarLess {
    bool operator()(const PickVar& a, const PickVar& b) const {
      return a.key < b.key;
    }
  };

  const Expr& program_;
  SearchConfig cfg_;
  SolverHandle& solver_;
  Rng rng_;
  LabelMap labels_;
  PathTree tree_;
  TargetQueues queues_;
  std::vector<Target> deferred_;
  std::set<PickVar, PickVarLess> known_picks_;
  int depth_step_ = 10;
  int depth_cap_ = 10;
  bool any_unknown_ = false;
  bool beyond_max_depth_ = false;

  void finalize(SearchReport&) {}

  void raise_cap() {
    depth_cap_ += depth_step_;
    std::vector<Target> keep;
    for (Target& t : deferred_) {
      if (int(t.depth()) <= depth_cap_) queues_.push(t);
      else keep.push_back(std::move(t));
    }
    deferred_ = std::move(keep);
  }

  std::optional<Target> pop_target(bool after_step_limit) {
    // After a step-limited run, draw from the breadth-first horizon; otherwise
    // pick a horizon at random.
    if (after_step_limit) {
      auto t = queues_.pop_bfs();
      if (t) return t;
      return queues_.pop_dfs();
    }
    bool dfs_first = (rng_.next() >> 11) * 0x1.0p-53 < cfg_.dfs_probability;
    auto t = dfs_first ? queues_.pop_dfs() : queues_.pop_bfs();
    if (t) return t;
    return dfs_first ? queues_.pop_bfs() : queues_.pop_dfs();
  }

  void confirm_target_followed(const Target& t, const EvalResult& res,
                               const std::vector<RunBranch>& branches) {
    size_t n = std::min(t.path.size(), branches.size());
    for (size_t i = 0; i < n; ++i) {
      if (branches[i].site != t.path[i].first || branches[i].dir != t.path[i].second)
        throw InternalInvariantError("solved model did not replay the intended path prefix");
    }
    if (branches.size() < t.path.size() && res.outcome.kind != OutcomeKind::Error) {
      // The run ended before reaching the target (budget exhaustion); leave
      // the child conservatively Unknown so exhaustion is never overclaimed.
      PathChild* child = tree_.locate(t);
      if (child && child->status == ChildStatus::Unsolved) {
        child->status = ChildStatus::Unknown;
        any_unknown_ = true;
      }
    }
  }
};

}  // namespace detail

// Repeatedly interprets the instrumented program, accumulating path
// constraints and negating unexplored branches, until an ERROR is reached,
// the reachable tree is exhausted, or budgets expire.
inline SearchReport search(const Expr& instrumented_normalized, const SearchConfig& cfg,
                           SolverHandle& solver) {
  detail::ConcolicEngine engine(instrumented_normalized, cfg, solver);
  return engine.run();
}

}  // namespace bluejay
