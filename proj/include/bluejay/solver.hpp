#pragma once

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <csignal>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "bluejay/feed.hpp"
#include "bluejay/formula.hpp"

namespace bluejay {

struct SolverUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CheckStatus { Sat, Unsat, Unknown };

struct Model {
  std::map<ClauseKey, PickVal> values;
};

struct CheckResult {
  CheckStatus status = CheckStatus::Unknown;
  Model model;
  std::string note;
};

struct PickVar {
  ClauseKey key;
  Sort sort = Sort::Int;
};

struct Query {
  std::vector<Formula> formulas;
  std::vector<PickVar> picks;
  size_t bv_width = 1;
};

struct EnumeratorBounds {
  int64_t lo = -16;
  int64_t hi = 16;
  long max_nodes = 2000000;
};

// One query per call; no state is retained between queries.
struct SolverHandle {
  enum class Backend { Enumerator, External };
  Backend backend = Backend::Enumerator;
  std::string command;  // external solver invocation, run via sh -c
  EnumeratorBounds bounds;
  int timeout_ms = 20000;
  std::vector<Query>* recorder = nullptr;  // when set, every query is copied here
  std::string debug_dir;                   // when set, scripts are written here
  long queries_issued = 0;
};

namespace detail {

// ---- bounded enumerator ----

struct EVal {
  Sort sort = Sort::Int;
  int64_t i = 0;
  bool b = false;
  uint64_t bv = 0;
  uint64_t fid = 0;

  bool operator==(const EVal& o) const {
    if (sort != o.sort) return false;
    switch (sort) {
      case Sort::Int: return i == o.i;
      case Sort::Bool: return b == o.b;
      case Sort::BitVec: return bv == o.bv;
      case Sort::Fun: return fid == o.fid;
    }
    return false;
  }
  static EVal of_int(int64_t v) { EVal e; e.sort = Sort::Int; e.i = v; return e; }
  static EVal of_bool(bool v) { EVal e; e.sort = Sort::Bool; e.b = v; return e; }
  static EVal of_bv(uint64_t v) { EVal e; e.sort = Sort::BitVec; e.bv = v; return e; }
  static EVal of_fun(uint64_t v) { EVal e; e.sort = Sort::Fun; e.fid = v; return e; }
};

class Enumerator {
public:
  Enumerator(const Query& q, const EnumeratorBounds& bounds) : q_(q), bounds_(bounds) {
    harvest_constants();
  }

  CheckResult run() {
    CheckResult r;
    try {
      bool sat = solve(0);
      r.status = sat ? CheckStatus::Sat : CheckStatus::Unsat;
    } catch (const BudgetExhausted&) {
      r.status = CheckStatus::Unknown;
      r.note = "enumeration budget exhausted";
      return r;
    }
    if (r.status == CheckStatus::Sat) {
      for (const PickVar& p : q_.picks) {
        auto it = assign_.find(p.key);
        if (it != assign_.end() && it->second.sort == p.sort) {
          r.model.values[p.key] = p.sort == Sort::Bool ? PickVal::of_bool(it->second.b)
                                                       : PickVal::of_int(it->second.i);
        } else {
          // completion: unconstrained picks default to 0 / false
          r.model.values[p.key] =
              p.sort == Sort::Bool ? PickVal::of_bool(false) : PickVal::of_int(0);
        }
      }
    }
    return r;
  }

private:
  struct BudgetExhausted {};

  const Query& q_;
  EnumeratorBounds bounds_;
  std::map<ClauseKey, EVal> assign_;
  std::vector<int64_t> int_candidates_;
  long nodes_ = 0;

  void harvest_constants() {
    std::set<int64_t> cands;
    for (int64_t v = 0; v <= std::max<int64_t>(bounds_.hi, -bounds_.lo); ++v) {
      if (v >= bounds_.lo && v <= bounds_.hi) cands.insert(v);
      if (-v >= bounds_.lo && -v <= bounds_.hi) cands.insert(-v);
    }
    std::function<void(const Term&)> walk = [&](const Term& t) {
      if (t.kind == Term::Kind::IntLit) {
        cands.insert(t.ival);
        if (t.ival > INT64_MIN) cands.insert(t.ival - 1);
        if (t.ival < INT64_MAX) cands.insert(t.ival + 1);
      }
      for (const Term& a : t.args) walk(a);
    };
    for (const Formula& f : q_.formulas) walk(f.t);
    int_candidates_.assign(cands.begin(), cands.end());
    // deterministic magnitude-first order
    std::sort(int_candidates_.begin(), int_candidates_.end(), [](int64_t a, int64_t b) {
      uint64_t ma = a < 0 ? uint64_t(-(a + 1)) + 1 : uint64_t(a);
      uint64_t mb = b < 0 ? uint64_t(-(b + 1)) + 1 : uint64_t(b);
      if (ma != mb) return ma < mb;
      return a > b;  // positive before negative
    });
  }

  void budget() {
    if (++nodes_ > bounds_.max_nodes) throw BudgetExhausted{};
  }

  std::optional<EVal> eval(const Term& t) const {
    switch (t.kind) {
      case Term::Kind::Var: {
        auto it = assign_.find(t.var);
        if (it == assign_.end()) return std::nullopt;
        return it->second;
      }
      case Term::Kind::IntLit: return EVal::of_int(t.ival);
      case Term::Kind::BoolLit: return EVal::of_bool(t.bval);
      case Term::Kind::BvLit: return EVal::of_bv(t.bv);
      case Term::Kind::FunLit: return EVal::of_fun(t.fun_id);
      case Term::Kind::App: {
        std::vector<EVal> vs;
        vs.reserve(t.args.size());
        for (const Term& a : t.args) {
          auto v = eval(a);
          if (!v) return std::nullopt;
          vs.push_back(*v);
        }
        switch (t.op) {
          case TermOp::Add:
          case TermOp::Sub: {
            int64_t out;
            bool ovf = t.op == TermOp::Add ? __builtin_add_overflow(vs[0].i, vs[1].i, &out)
                                           : __builtin_sub_overflow(vs[0].i, vs[1].i, &out);
            if (ovf) return std::nullopt;
            return EVal::of_int(out);
          }
          case TermOp::Lt: return EVal::of_bool(vs[0].i < vs[1].i);
          case TermOp::Eq: return EVal::of_bool(vs[0] == vs[1]);
          case TermOp::And: return EVal::of_bool(vs[0].b && vs[1].b);
          case TermOp::Or: return EVal::of_bool(vs[0].b || vs[1].b);
          case TermOp::Xor: return EVal::of_bool(vs[0].b != vs[1].b);
          case TermOp::Not: return EVal::of_bool(!vs[0].b);
          case TermOp::BvAnd: return EVal::of_bv(vs[0].bv & vs[1].bv);
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  const Term* first_unassigned(const Term& t) const {
    if (t.kind == Term::Kind::Var) return assign_.count(t.var) ? nullptr : &t;
    if (t.kind == Term::Kind::App)
      for (const Term& a : t.args)
        if (const Term* u = first_unassigned(a)) return u;
    return nullptr;
  }

  // Solves `t == target` when t contains exactly one unassigned variable that
  // can be isolated through +/-/not chains.
  std::optional<std::pair<ClauseKey, EVal>> isolate(const Term& t, EVal target) const {
    switch (t.kind) {
      case Term::Kind::Var:
        if (assign_.count(t.var)) return std::nullopt;
        if (t.var_sort != target.sort) return std::nullopt;
        return std::make_pair(t.var, target);
      case Term::Kind::App:
        switch (t.op) {
          case TermOp::Add:
          case TermOp::Sub: {
            if (target.sort != Sort::Int) return std::nullopt;
            auto a = eval(t.args[0]);
            auto b = eval(t.args[1]);
            int64_t out;
            if (a && !b) {
              bool ovf = t.op == TermOp::Add ? __builtin_sub_overflow(target.i, a->i, &out)
                                             : __builtin_sub_overflow(a->i, target.i, &out);
              if (ovf) return std::nullopt;
              return isolate(t.args[1], EVal::of_int(out));
            }
            if (!a && b) {
              bool ovf = t.op == TermOp::Add ? __builtin_sub_overflow(target.i, b->i, &out)
                                             : __builtin_add_overflow(target.i, b->i, &out);
              if (ovf) return std::nullopt;
              return isolate(t.args[0], EVal::of_int(out));
            }
            return std::nullopt;
          }
          case TermOp::Not:
            if (target.sort != Sort::Bool) return std::nullopt;
            return isolate(t.args[0], EVal::of_bool(!target.b));
          case TermOp::Eq: {
            if (target.sort != Sort::Bool || !target.b) return std::nullopt;
            auto a = eval(t.args[0]);
            auto b = eval(t.args[1]);
            if (a && !b) return isolate(t.args[1], *a);
            if (!a && b) return isolate(t.args[0], *b);
            return std::nullopt;
          }
          default:
            return std::nullopt;
        }
      default:
        return std::nullopt;
    }
  }

  // Suggested values to try first when branching var w blocked inside formula
  // f, found by pushing the wanted truth value down through the connectives.
  void suggest(const Term& t, bool want, ClauseKey w, std::vector<EVal>& out) const {
    auto push_iso = [&](const Term& side, EVal target) {
      auto iso = isolate(side, target);
      if (iso && iso->first == w) out.push_back(iso->second);
    };
    if (t.kind == Term::Kind::Var) {
      if (t.var == w) out.push_back(EVal::of_bool(want));
      return;
    }
    if (t.kind != Term::Kind::App) return;
    switch (t.op) {
      case TermOp::Not:
        suggest(t.args[0], !want, w, out);
        return;
      case TermOp::And:
      case TermOp::Or:
        suggest(t.args[0], want, w, out);
        suggest(t.args[1], want, w, out);
        return;
      case TermOp::Lt: {
        auto l = eval(t.args[0]);
        auto r = eval(t.args[1]);
        // want:  l < r.  not want:  l >= r.
        if (l && !r) {
          push_iso(t.args[1], EVal::of_int(want ? l->i + 1 : l->i));
          if (!want) push_iso(t.args[1], EVal::of_int(l->i - 1));
        }
        if (r && !l) {
          push_iso(t.args[0], EVal::of_int(want ? r->i - 1 : r->i));
          if (!want) push_iso(t.args[0], EVal::of_int(r->i + 1));
        }
        return;
      }
      case TermOp::Eq: {
        auto l = eval(t.args[0]);
        auto r = eval(t.args[1]);
        // push a known boolean side through as a polarity
        if (l && l->sort == Sort::Bool && !r) suggest(t.args[1], want == l->b, w, out);
        if (r && r->sort == Sort::Bool && !l) suggest(t.args[0], want == r->b, w, out);
        if (want) {
          if (l && !r) push_iso(t.args[1], *l);
          if (r && !l) push_iso(t.args[0], *r);
        } else {
          // any differing value; nudge around the known side
          if (l && !r && l->sort == Sort::Int) {
            push_iso(t.args[1], EVal::of_int(l->i + 1));
            push_iso(t.args[1], EVal::of_int(l->i - 1));
          }
          if (l && !r && l->sort == Sort::Bool) push_iso(t.args[1], EVal::of_bool(!l->b));
          if (r && !l && r->sort == Sort::Int) {
            push_iso(t.args[0], EVal::of_int(r->i + 1));
            push_iso(t.args[0], EVal::of_int(r->i - 1));
          }
          if (r && !l && r->sort == Sort::Bool) push_iso(t.args[0], EVal::of_bool(!r->b));
        }
        return;
      }
      default:
        return;
    }
  }

  std::vector<EVal> suggestions(const Formula& f, const Term& w) const {
    std::vector<EVal> out;
    suggest(f.t, true, w.var, out);
    return out;
  }

  bool solve(size_t i) {
    budget();
    if (i == q_.formulas.size()) return true;
    const Formula& f = q_.formulas[i];

    // definitional propagation: (= var rhs) with var unassigned
    const Term& t = f.t;
    if (t.kind == Term::Kind::App && t.op == TermOp::Eq && t.args.size() == 2 &&
        t.args[0].kind == Term::Kind::Var && !assign_.count(t.args[0].var)) {
      auto rhs = eval(t.args[1]);
      if (rhs) {
        if (rhs->sort != t.args[0].var_sort) return false;
        assign_[t.args[0].var] = *rhs;
        bool ok = solve(i + 1);
        if (!ok) assign_.erase(t.args[0].var);
        return ok;
      }
    }

    auto v = eval(t);
    if (v) {
      if (v->sort != Sort::Bool) return false;
      if (!v->b) return false;
      return solve(i + 1);
    }

    const Term* w = first_unassigned(t);
    if (!w) return false;  // unevaluable yet fully assigned (overflow)

    std::vector<EVal> cands;
    for (const EVal& s : suggestions(f, *w)) cands.push_back(s);
    switch (w->var_sort) {
      case Sort::Bool:
        cands.push_back(EVal::of_bool(false));
        cands.push_back(EVal::of_bool(true));
        break;
      case Sort::Int:
        for (int64_t c : int_candidates_) cands.push_back(EVal::of_int(c));
        break;
      case Sort::BitVec: {
        size_t w2 = std::min<size_t>(q_.bv_width, 12);
        for (uint64_t m = 0; m < (uint64_t(1) << w2); ++m) cands.push_back(EVal::of_bv(m));
        break;
      }
      case Sort::Fun: {
        std::set<uint64_t> ids{0};
        std::function<void(const Term&)> walk = [&](const Term& tt) {
          if (tt.kind == Term::Kind::FunLit) ids.insert(tt.fun_id);
          for (const Term& a : tt.args) walk(a);
        };
        for (const Formula& ff : q_.formulas) walk(ff.t);
        for (uint64_t id : ids) cands.push_back(EVal::of_fun(id));
        break;
      }
    }

    std::vector<EVal> tried;
    for (const EVal& c : cands) {
      if (c.sort != w->var_sort) continue;
      bool dup = false;
      for (const EVal& t2 : tried)
        if (t2 == c) { dup = true; break; }
      if (dup) continue;
      tried.push_back(c);
      assign_[w->var] = c;
      if (solve(i)) return true;
      assign_.erase(w->var);
    }
    return false;
  }
};

// ---- external SMT-LIB 2 process ----

struct SubprocessResult {
  int exit_code = -1;
  std::string output;
  bool timed_out = false;
  bool spawn_failed = false;
};

inline SubprocessResult run_subprocess(const std::string& command, const std::string& input,
                                       int timeout_ms) {
  SubprocessResult res;
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    res.spawn_failed = true;
    return res;
  }
  pid_t pid = fork();
  if (pid < 0) {
    res.spawn_failed = true;
    return res;
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  size_t written = 0;
  while (written < input.size()) {
    ssize_t w = write(in_pipe[1], input.data() + written, input.size() - written);
    if (w <= 0) break;
    written += size_t(w);
  }
  close(in_pipe[1]);

  char buf[4096];
  auto deadline_exceeded = [&](int waited) { return waited >= timeout_ms; };
  int waited = 0;
  while (true) {
    struct pollfd pfd{out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, 50);
    if (pr > 0) {
      ssize_t n = read(out_pipe[0], buf, sizeof buf);
      if (n <= 0) break;
      res.output.append(buf, size_t(n));
    } else {
      waited += 50;
      if (deadline_exceeded(waited)) {
        res.timed_out = true;
        kill(pid, SIGKILL);
        break;
      }
    }
  }
  close(out_pipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

// Minimal s-expression reader for (get-value ...) responses.
struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_atom = false;
};

inline SExpr parse_sexpr(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  SExpr e;
  if (i >= s.size()) return e;
  if (s[i] == '(') {
    ++i;
    while (i < s.size() && s[i] != ')') {
      e.items.push_back(parse_sexpr(s, i));
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    if (i < s.size()) ++i;
    return e;
  }
  e.is_atom = true;
  size_t start = i;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')')
    ++i;
  e.atom = s.substr(start, i - start);
  return e;
}

inline std::optional<int64_t> sexpr_int(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom.empty()) return std::nullopt;
    if (e.atom[0] == '#') {  // #bxxxx / #xhh
      if (e.atom.size() > 2 && e.atom[1] == 'b') return std::strtoll(e.atom.c_str() + 2, nullptr, 2);
      if (e.atom.size() > 2 && e.atom[1] == 'x') return std::strtoll(e.atom.c_str() + 2, nullptr, 16);
      return std::nullopt;
    }
    char* end = nullptr;
    long long v = std::strtoll(e.atom.c_str(), &end, 10);
    if (end && *end == '\0') return v;
    return std::nullopt;
  }
  // (- 5)
  if (e.items.size() == 2 && e.items[0].is_atom && e.items[0].atom == "-") {
    auto inner = sexpr_int(e.items[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

inline CheckResult check_external(const Query& q, SolverHandle& h) {
  VarNames names;
  std::vector<ClauseKey> want;
  for (const PickVar& p : q.picks) want.push_back(p.key);
  std::string script = to_smtlib(q.formulas, want, q.bv_width, names);
  SubprocessResult sub = run_subprocess(h.command, script, h.timeout_ms);
  CheckResult r;
  if (sub.spawn_failed) throw SolverUnavailable("cannot start solver: " + h.command);
  if (sub.timed_out) {
    r.status = CheckStatus::Unknown;
    r.note = "solver timeout";
    return r;
  }
  if (sub.exit_code == 127) throw SolverUnavailable("solver not found: " + h.command);

  std::istringstream is(sub.output);
  std::string first;
  std::getline(is, first);
  while (!first.empty() && (first.back() == '\r' || first.back() == ' ')) first.pop_back();
  if (first == "unsat") {
    r.status = CheckStatus::Unsat;
    return r;
  }
  if (first != "sat") {
    r.status = CheckStatus::Unknown;
    r.note = "solver said: " + first;
    return r;
  }
  r.status = CheckStatus::Sat;

  std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  size_t pos = 0;
  SExpr values = parse_sexpr(rest, pos);
  std::map<std::string, const SExpr*> by_name;
  for (const SExpr& pair : values.items)
    if (pair.items.size() == 2 && pair.items[0].is_atom)
      by_name[pair.items[0].atom] = &pair.items[1];

  for (const PickVar& p : q.picks) {
    PickVal out = p.sort == Sort::Bool ? PickVal::of_bool(false) : PickVal::of_int(0);
    auto it = by_name.find(names.name_of(p.key));
    if (it != by_name.end()) {
      const SExpr& v = *it->second;
      if (p.sort == Sort::Bool) {
        if (v.is_atom) out = PickVal::of_bool(v.atom == "true");
      } else {
        auto iv = sexpr_int(v);
        if (iv) out = PickVal::of_int(*iv);
      }
    }
    r.model.values[p.key] = out;
  }
  return r;
}

}  // namespace detail

inline CheckResult solver_check(const Query& q, SolverHandle& h) {
  ++h.queries_issued;
  if (h.recorder) h.recorder->push_back(q);
  if (!h.debug_dir.empty()) {
    VarNames names;
    std::vector<ClauseKey> want;
    for (const PickVar& p : q.picks) want.push_back(p.key);
    std::ofstream out(h.debug_dir + "/query_" + std::to_string(h.queries_issued) + ".smt2");
    out << to_smtlib(q.formulas, want, q.bv_width, names);
  }
  if (h.backend == SolverHandle::Backend::External) return detail::check_external(q, h);
  detail::Enumerator en(q, h.bounds);
  return en.run();
}

}  // namespace bluejay
