#pragma once

#include <deque>

#include "bluejay/interp.hpp"

namespace bluejay {

struct EnumBounds {
  int64_t int_lo = -16;
  int64_t int_hi = 16;
  int max_pick_depth = 8;       // longest pick sequence explored
  long max_total_feeds = 500000;
  int64_t step_budget = 50000;

  void validate() const {
    if (int_lo > int_hi || max_pick_depth <= 0 || max_total_feeds <= 0 || step_budget <= 0)
      throw std::invalid_argument("enumeration bounds must be finite and positive");
  }
};

enum class RefuteStatus { Refuted, NoErrorWithinBounds, BudgetExceeded };

struct RefuteResult {
  RefuteStatus status = RefuteStatus::NoErrorWithinBounds;
  bool fully_exhausted = false;  // no run was cut off by depth or step budget
  Feed witness;                  // Refuted: replays to Error
  ClauseKey error_site{};
  long runs = 0;
};

namespace detail {

inline std::vector<int64_t> magnitude_order(int64_t lo, int64_t hi) {
  std::vector<int64_t> out;
  for (int64_t m = 0;; ++m) {
    bool any = false;
    if (m >= lo && m <= hi) { out.push_back(m); any = true; }
    if (m > 0 && -m >= lo && -m <= hi) { out.push_back(-m); any = true; }
    if (!any && (m > hi && -m < lo)) break;
    if (m > std::max(std::llabs(lo), std::llabs(hi))) break;
  }
  return out;
}

}  // namespace detail

// Breadth-first enumeration of pick-value prefixes: any Error reachable
// within the bounds is found, and the first witness in enumeration order is
// returned. Runs that out-live the step budget or need picks beyond the depth
// bound make the exploration inexhaustive but never unsound.
inline RefuteResult exhaustive_refute(const Expr& instrumented, const EnumBounds& b) {
  b.validate();
  RefuteResult res;
  res.fully_exhausted = true;
  std::vector<int64_t> int_values = detail::magnitude_order(b.int_lo, b.int_hi);

  std::deque<std::vector<PickVal>> frontier;
  frontier.push_back({});
  while (!frontier.empty()) {
    if (res.runs >= b.max_total_feeds) {
      res.status = RefuteStatus::BudgetExceeded;
      res.fully_exhausted = false;
      return res;
    }
    std::vector<PickVal> prefix = std::move(frontier.front());
    frontier.pop_front();
    ++res.runs;

    EvalResult r = eval(instrumented, Feed::scripted(prefix), b.step_budget);
    switch (r.outcome.kind) {
      case OutcomeKind::Error: {
        res.status = RefuteStatus::Refuted;
        res.witness = r.trace.recorded_feed();
        res.error_site = r.outcome.site;
        Outcome verify = replay(instrumented, res.witness, b.step_budget);
        if (verify.kind != OutcomeKind::Error)
          throw InternalInvariantError("oracle witness does not replay to Error");
        return res;
      }
      case OutcomeKind::FeedMiss: {
        if (int(prefix.size()) >= b.max_pick_depth) {
          res.fully_exhausted = false;  // cut by the depth bound
          break;
        }
        if (r.outcome.miss_wants_bool) {
          for (bool v : {false, true}) {
            auto next = prefix;
            next.push_back(PickVal::of_bool(v));
            frontier.push_back(std::move(next));
          }
        } else {
          for (int64_t v : int_values) {
            auto next = prefix;
            next.push_back(PickVal::of_int(v));
            frontier.push_back(std::move(next));
          }
        }
        break;
      }
      case OutcomeKind::StepLimit:
        res.fully_exhausted = false;
        break;
      case OutcomeKind::Value:
      case OutcomeKind::MZero:
        break;  // conclusive leaf
    }
  }
  res.status = RefuteStatus::NoErrorWithinBounds;
  return res;
}

// Seeded random testing: property-based-style runs with random feeds.
inline RefuteResult fuzz_refute(const Expr& instrumented, uint64_t seed, long runs,
                                int64_t step_budget = 50000) {
  RefuteResult res;
  Rng rng(seed);
  for (long i = 0; i < runs; ++i) {
    ++res.runs;
    EvalResult r = eval(instrumented, Feed::random(rng.next()), step_budget);
    if (r.outcome.kind == OutcomeKind::Error) {
      res.status = RefuteStatus::Refuted;
      res.witness = r.trace.recorded_feed();
      res.error_site = r.outcome.site;
      Outcome verify = replay(instrumented, res.witness, step_budget);
      if (verify.kind != OutcomeKind::Error)
        throw InternalInvariantError("fuzz witness does not replay to Error");
      return res;
    }
  }
  res.status = RefuteStatus::NoErrorWithinBounds;
  res.fully_exhausted = false;
  return res;
}

}  // namespace bluejay
