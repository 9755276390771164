#pragma once

#include <optional>
#include <unordered_set>

#include "bluejay/ast.hpp"
#include "bluejay/feed.hpp"
#include "bluejay/value.hpp"

namespace bluejay {

// Pattern match per the operational semantics: dispatch on value class;
// an untouchable scrutinee yields Error for every pattern; record patterns
// test containment in the declared-label set.
inline std::optional<bool> matches(const Value& v, const Pattern& p) {
  if (v.is_untouchable()) return std::nullopt;  // Opaque Pattern
  switch (p.kind) {
    case Pattern::Kind::Int: return v.is_int();
    case Pattern::Kind::Bool: return v.is_bool();
    case Pattern::Kind::Fun: return v.is_closure();
    case Pattern::Kind::Any: return true;
    case Pattern::Kind::EmptyList: return v.is_list() && v.as_list() == nullptr;
    case Pattern::Kind::Cons: return v.is_list() && v.as_list() != nullptr;
    case Pattern::Kind::Variant: return v.is_variant() && v.as_variant().ctor == p.ctor;
    case Pattern::Kind::Record: {
      if (!v.is_record()) return false;
      const auto& r = v.as_record();
      for (Symbol l : p.labels)
        if (!r.has_declared(l)) return false;
      return true;
    }
  }
  return false;
}

enum class OutcomeKind { Value, Error, MZero, StepLimit, FeedMiss };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Value;
  ValuePtr value;                   // Value
  ClauseKey site{};                 // Error: the ERROR clause; FeedMiss: the pick
  bool miss_wants_bool = false;     // FeedMiss
  size_t miss_position = 0;         // FeedMiss: picks consumed before the miss
  int64_t steps_used = 0;
};

struct EvalLimits {
  int64_t max_steps = 50000;
  int max_host_depth = 15000;
  size_t max_trace_branches = 1u << 20;
};

// Per-clause execution event, consumed by the symbolic layer.
struct ClauseEvent {
  ClauseKey key{};
  const Expr* node = nullptr;
  Origin a{}, b{};                  // operand origins (use varies by node kind)
  const Value* aval = nullptr;      // operand values
  const Value* bval = nullptr;
  const Value* scrutinee = nullptr; // PatTest operand
  const Value* result = nullptr;    // concrete result
};

class EvalListener {
public:
  virtual ~EvalListener() = default;
  virtual void on_pick(ClauseKey, PickVal) {}
  virtual void on_branch(ClauseKey, Origin, bool) {}
  virtual void on_clause(const ClauseEvent&) {}
};

// Records the values bound to a chosen set of binder names, in order; used to
// reconstruct the failing check when building an error report.
struct WatchRecorder {
  std::unordered_set<Symbol> binders;
  std::vector<std::pair<Symbol, ValuePtr>> events;
};

struct EvalResult {
  Outcome outcome;
  Trace trace;
};

namespace detail {

class Interp {
public:
  Interp(const Feed& feed, EvalLimits lim, EvalListener* listener, WatchRecorder* watch,
         bool check_record_tags)
      : feed_(feed), lim_(lim), listener_(listener), watch_(watch),
        check_tags_(check_record_tags), rng_(feed.seed) {}

  EvalResult run(const Expr& e) {
    EvalResult r;
    RV rv = eval(&e, nullptr, 0);
    r.outcome.steps_used = steps_;
    if (abort_ == OutcomeKind::Value) {
      r.outcome.kind = OutcomeKind::Value;
      r.outcome.value = rv.v;
    } else {
      r.outcome.kind = abort_;
      r.outcome.site = abort_site_;
      r.outcome.miss_wants_bool = miss_wants_bool_;
      r.outcome.miss_position = miss_position_;
    }
    r.trace = std::move(trace_);
    return r;
  }

private:
  const Feed& feed_;
  EvalLimits lim_;
  EvalListener* listener_;
  WatchRecorder* watch_;
  bool check_tags_;
  Rng rng_;
  Trace trace_;
  int64_t steps_ = 0;
  int host_depth_ = 0;
  int32_t fun_entries_ = 0;
  size_t script_pos_ = 0;
  OutcomeKind abort_ = OutcomeKind::Value;
  ClauseKey abort_site_{};
  bool miss_wants_bool_ = false;
  size_t miss_position_ = 0;

  bool aborted() const { return abort_ != OutcomeKind::Value; }
  RV stop(OutcomeKind k, ClauseKey site) {
    if (!aborted()) { abort_ = k; abort_site_ = site; }
    return {};
  }

  PickVal draw_random(bool want_bool) {
    if (want_bool) return PickVal::of_bool(rng_.next_bool());
    // Mostly small integers, with occasional larger draws.
    uint64_t bucket = rng_.next() & 3;
    if (bucket < 2) return PickVal::of_int(rng_.range(-16, 16));
    if (bucket == 2) return PickVal::of_int(rng_.range(-256, 256));
    return PickVal::of_int(rng_.range(-(int64_t(1) << 30), int64_t(1) << 30));
  }

  std::optional<PickVal> resolve_pick(ClauseKey key, bool want_bool) {
    auto it = feed_.values.find(key);
    if (it != feed_.values.end() && it->second.is_bool == want_bool) return it->second;
    switch (feed_.fallback) {
      case Feed::Fallback::FailOnMiss:
        return std::nullopt;
      case Feed::Fallback::Random:
        return draw_random(want_bool);
      case Feed::Fallback::Script: {
        if (script_pos_ >= feed_.script.size()) return std::nullopt;
        const PickVal& pv = feed_.script[script_pos_];
        if (pv.is_bool != want_bool) return std::nullopt;
        ++script_pos_;
        return pv;
      }
    }
    return std::nullopt;
  }

  void emit(const ClauseEvent& ev) {
    if (listener_) listener_->on_clause(ev);
  }

  RV eval(const Expr* e, EnvPtr env, int32_t depth) {
    if (++host_depth_ > lim_.max_host_depth) {
      --host_depth_;
      return stop(OutcomeKind::StepLimit, ClauseKey{e->label, depth});
    }
    RV out = eval_loop(e, std::move(env), depth);
    --host_depth_;
    return out;
  }

  RV eval_loop(const Expr* e, EnvPtr env, int32_t depth) {
    while (true) {
      if (aborted()) return {};
      if (++steps_ > lim_.max_steps)
        return stop(OutcomeKind::StepLimit, ClauseKey{e->label, depth});
      ClauseKey key{e->label, depth};
      switch (e->kind) {
        case ExprKind::Int:
          return {mk_int_val(e->int_val), Origin::int_lit(e->int_val)};
        case ExprKind::Bool:
          return {e->bool_val ? true_val() : false_val(), Origin::bool_lit(e->bool_val)};
        case ExprKind::Var: {
          const RV* b = Env::lookup(env, e->var);
          if (!b) return stop(OutcomeKind::Error, key);  // unbound: ill-formed program
          return *b;
        }
        case ExprKind::Fun: {
          Closure c;
          c.param = e->var;
          c.body = e->a.get();
          c.env = env;
          c.fun_label = e->label;
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          emit(ev);
          return {mk_val(std::move(c)), Origin::clause(key)};
        }
        case ExprKind::App: {
          RV f = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          RV a = eval(e->b.get(), env, depth);
          if (aborted()) return {};
          if (!f.v->is_closure()) return stop(OutcomeKind::Error, key);  // Appl-Err
          const Closure& c = f.v->as_closure();
          int32_t callee_depth = ++fun_entries_;
          env = Env::extend(c.env, c.param, std::move(a));
          e = c.body;
          depth = callee_depth;
          continue;  // tail position
        }
        case ExprKind::Bin: {
          RV l = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          RV r = eval(e->b.get(), env, depth);
          if (aborted()) return {};
          RV res = apply_binop(e->op, l, r, key);
          if (aborted()) return {};
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          ev.a = l.origin;
          ev.b = r.origin;
          ev.aval = l.v.get();
          ev.bval = r.v.get();
          ev.result = res.v.get();
          emit(ev);
          return res;
        }
        case ExprKind::If: {
          RV c = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!c.v->is_bool()) return stop(OutcomeKind::Error, key);  // If-Err
          bool dir = c.v->as_bool();
          if (trace_.branches.size() < lim_.max_trace_branches)
            trace_.branches.push_back({key, dir});
          if (listener_) listener_->on_branch(key, c.origin, dir);
          e = dir ? e->b.get() : e->c.get();
          continue;
        }
        case ExprKind::Match: {
          RV s = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          const Expr* taken = nullptr;
          EnvPtr arm_env = env;
          for (const auto& arm : e->arms) {
            auto m = matches(*s.v, arm.pat);
            if (!m.has_value()) return stop(OutcomeKind::Error, key);
            if (!*m) continue;
            taken = arm.body.get();
            if (arm.pat.kind == Pattern::Kind::Cons) {
              const ListPtr& l = s.v->as_list();
              if (arm.pat.bind_a) arm_env = Env::extend(arm_env, arm.pat.bind_a, l->head);
              if (arm.pat.bind_b)
                arm_env = Env::extend(arm_env, arm.pat.bind_b, {mk_val(ListPtr(l->tail)), Origin::opaque()});
            } else if (arm.pat.kind == Pattern::Kind::Variant && arm.pat.bind_a) {
              arm_env = Env::extend(arm_env, arm.pat.bind_a, s.v->as_variant().payload);
            }
            break;
          }
          if (!taken) return stop(OutcomeKind::Error, key);  // no arm matched
          e = taken;
          env = arm_env;
          continue;
        }
        case ExprKind::PatTest: {
          RV s = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          auto m = matches(*s.v, e->pat);
          if (!m.has_value()) return stop(OutcomeKind::Error, key);
          RV res{*m ? true_val() : false_val(), Origin::clause(key)};
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          ev.a = s.origin;
          ev.scrutinee = s.v.get();
          ev.result = res.v.get();
          emit(ev);
          return res;
        }
        case ExprKind::Let: {
          RV rhs = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (watch_ && watch_->binders.count(e->var))
            watch_->events.emplace_back(e->var, rhs.v);
          env = Env::extend(env, e->var, std::move(rhs));
          e = e->b.get();
          continue;
        }
        case ExprKind::LetTyped:
          // Typed declarations are consumed by the instrumenter; a bare eval
          // has no checking semantics for them.
          return stop(OutcomeKind::Error, key);
        case ExprKind::Record: {
          RecordVal r;
          for (const auto& [label, fe] : e->fields) {
            RV fv = eval(fe.get(), env, depth);
            if (aborted()) return {};
            r.fields.push_back({label, std::move(fv)});
            r.declared.push_back(label);
          }
          ValuePtr v = mk_val(std::move(r));
          if (check_tags_ && !record_tags_valid(*v))
            throw InternalInvariantError("record tag invariant violated at " + key_str(key));
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          ev.result = v.get();
          emit(ev);
          return {std::move(v), Origin::clause(key)};
        }
        case ExprKind::Proj: {
          RV r = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!r.v->is_record()) return stop(OutcomeKind::Error, key);
          const RecordVal& rec = r.v->as_record();
          if (!rec.has_declared(e->var)) return stop(OutcomeKind::Error, key);  // Proj-Error
          const RV* f = rec.field(e->var);
          if (!f) throw InternalInvariantError("declared label missing from record");
          return *f;
        }
        case ExprKind::List: {
          ListPtr tail = nullptr;
          std::vector<RV> vals;
          vals.reserve(e->elems.size());
          for (const auto& el : e->elems) {
            RV v = eval(el.get(), env, depth);
            if (aborted()) return {};
            vals.push_back(std::move(v));
          }
          for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
            auto node = std::make_shared<ListNode>();
            node->head = std::move(*it);
            node->tail = tail;
            tail = node;
          }
          return {mk_val(std::move(tail)), Origin::clause(key)};
        }
        case ExprKind::Cons: {
          RV h = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          RV t = eval(e->b.get(), env, depth);
          if (aborted()) return {};
          if (!t.v->is_list()) return stop(OutcomeKind::Error, key);
          auto node = std::make_shared<ListNode>();
          node->head = std::move(h);
          node->tail = t.v->as_list();
          return {mk_val(ListPtr(std::move(node))), Origin::clause(key)};
        }
        case ExprKind::Variant: {
          RV p = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          VariantVal v;
          v.ctor = e->var;
          v.payload = std::move(p);
          return {mk_val(std::move(v)), Origin::clause(key)};
        }
        case ExprKind::TypeLit:
          // Only the instrumenter gives types-as-expressions a meaning.
          return stop(OutcomeKind::Error, key);
        case ExprKind::PickI:
        case ExprKind::PickB: {
          bool want_bool = e->kind == ExprKind::PickB;
          size_t position = trace_.picks.size();
          auto pv = resolve_pick(key, want_bool);
          if (!pv.has_value()) {
            miss_wants_bool_ = want_bool;
            miss_position_ = position;
            return stop(OutcomeKind::FeedMiss, key);
          }
          trace_.picks.push_back({key, *pv});
          if (listener_) listener_->on_pick(key, *pv);
          if (want_bool) return {pv->b ? true_val() : false_val(), Origin::clause(key)};
          return {mk_int_val(pv->i), Origin::clause(key)};
        }
        case ExprKind::Error:
          return stop(OutcomeKind::Error, key);
        case ExprKind::MZero:
          return stop(OutcomeKind::MZero, key);
        case ExprKind::Retag: {
          RV r = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!r.v->is_record()) return stop(OutcomeKind::Error, key);  // Retag-Error1
          const RecordVal& rec = r.v->as_record();
          for (Symbol l : e->labelset)
            if (!rec.has_actual(l)) return stop(OutcomeKind::Error, key);  // Retag-Error2
          RecordVal out = rec;
          out.declared = e->labelset;
          ValuePtr v = mk_val(std::move(out));
          if (check_tags_ && !record_tags_valid(*v))
            throw InternalInvariantError("record tag invariant violated at " + key_str(key));
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          ev.a = r.origin;
          ev.result = v.get();
          emit(ev);
          return {std::move(v), Origin::clause(key)};
        }
        case ExprKind::PolyTest: {
          RV s = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          bool ok = s.v->is_untouchable() && s.v->as_untouchable().alpha == e->alpha;
          RV res{ok ? true_val() : false_val(), Origin::clause(key)};
          ClauseEvent ev;
          ev.key = key;
          ev.node = e;
          ev.a = s.origin;
          ev.result = res.v.get();
          emit(ev);
          return res;
        }
        case ExprKind::Untouchable:
          return {mk_val(Untouchable{e->alpha}), Origin::opaque()};
        case ExprKind::ListHead: {
          RV l = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!l.v->is_list() || !l.v->as_list()) return stop(OutcomeKind::Error, key);
          return l.v->as_list()->head;
        }
        case ExprKind::ListTail: {
          RV l = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!l.v->is_list() || !l.v->as_list()) return stop(OutcomeKind::Error, key);
          return {mk_val(ListPtr(l.v->as_list()->tail)), Origin::clause(key)};
        }
        case ExprKind::VariantPayload: {
          RV v = eval(e->a.get(), env, depth);
          if (aborted()) return {};
          if (!v.v->is_variant()) return stop(OutcomeKind::Error, key);
          return v.v->as_variant().payload;
        }
        case ExprKind::Assert:
        case ExprKind::Assume:
          // Desugared by the parser; reaching one is an ill-formed program.
          return stop(OutcomeKind::Error, key);
      }
    }
  }

  RV apply_binop(BinOp op, const RV& l, const RV& r, ClauseKey key) {
    switch (op) {
      case BinOp::Add:
      case BinOp::Sub: {
        if (!l.v->is_int() || !r.v->is_int()) return stop(OutcomeKind::Error, key);  // Add-Err
        int64_t out;
        bool ovf = op == BinOp::Add
                       ? __builtin_add_overflow(l.v->as_int(), r.v->as_int(), &out)
                       : __builtin_sub_overflow(l.v->as_int(), r.v->as_int(), &out);
        if (ovf) return stop(OutcomeKind::Error, key);  // wrap-around rejected
        return {mk_int_val(out), Origin::clause(key)};
      }
      case BinOp::Lt: {
        if (!l.v->is_int() || !r.v->is_int()) return stop(OutcomeKind::Error, key);
        return {l.v->as_int() < r.v->as_int() ? true_val() : false_val(), Origin::clause(key)};
      }
      case BinOp::Eq: {
        if (l.v->is_int() && r.v->is_int())
          return {l.v->as_int() == r.v->as_int() ? true_val() : false_val(), Origin::clause(key)};
        if (l.v->is_bool() && r.v->is_bool())
          return {l.v->as_bool() == r.v->as_bool() ? true_val() : false_val(), Origin::clause(key)};
        return stop(OutcomeKind::Error, key);
      }
      case BinOp::And:
      case BinOp::Or:
      case BinOp::Xor: {
        if (!l.v->is_bool() || !r.v->is_bool()) return stop(OutcomeKind::Error, key);
        bool a = l.v->as_bool(), b = r.v->as_bool();
        bool out = op == BinOp::And ? (a && b) : op == BinOp::Or ? (a || b) : (a != b);
        return {out ? true_val() : false_val(), Origin::clause(key)};
      }
    }
    return stop(OutcomeKind::Error, key);
  }
};

}  // namespace detail

struct EvalOptions {
  EvalLimits limits;
  EvalListener* listener = nullptr;
  WatchRecorder* watch = nullptr;
  bool check_record_tags = false;
};

inline EvalResult eval(const Expr& program, const Feed& feed, const EvalOptions& opts = {}) {
  detail::Interp interp(feed, opts.limits, opts.listener, opts.watch, opts.check_record_tags);
  return interp.run(program);
}

inline EvalResult eval(const Expr& program, const Feed& feed, int64_t step_budget) {
  EvalOptions opts;
  opts.limits.max_steps = step_budget;
  return eval(program, feed, opts);
}

struct FeedMissError : std::runtime_error {
  ClauseKey site;
  FeedMissError(ClauseKey k, const std::string& msg) : std::runtime_error(msg), site(k) {}
};

// Replays a recorded feed; the feed must resolve every pick reached.
inline Outcome replay(const Expr& program, const Feed& feed,
                      int64_t step_budget = 50000) {
  Feed strict = feed;
  strict.fallback = Feed::Fallback::FailOnMiss;
  EvalResult r = eval(program, strict, step_budget);
  if (r.outcome.kind == OutcomeKind::FeedMiss)
    throw FeedMissError(r.outcome.site,
                        "feed does not cover pick at " + key_str(r.outcome.site));
  return r.outcome;
}

}  // namespace bluejay
