// minismt: a tiny SMT-LIB 2 text solver for the quantifier-free fragment this
// project emits (linear integer arithmetic, booleans, fixed-width bitvectors
// with bvand). Reads a script on stdin, prints sat/unsat/unknown and
// get-value answers on stdout. Deliberately self-contained: it shares no code
// with the in-process solver so the two sides of the backend-agreement check
// stay independent.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_atom = false;
};

struct Reader {
  std::string s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
      if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      break;
    }
  }

  std::optional<SExpr> next() {
    skip_ws();
    if (i >= s.size()) return std::nullopt;
    if (s[i] == '(') {
      ++i;
      SExpr e;
      while (true) {
        skip_ws();
        if (i >= s.size()) return std::nullopt;  // unbalanced
        if (s[i] == ')') { ++i; break; }
        auto inner = next();
        if (!inner) return std::nullopt;
        e.items.push_back(std::move(*inner));
      }
      return e;
    }
    SExpr e;
    e.is_atom = true;
    size_t start = i;
    if (s[i] == '|') {
      ++i;
      while (i < s.size() && s[i] != '|') ++i;
      ++i;
      e.atom = s.substr(start, i - start);
      return e;
    }
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
           s[i] != ')' && s[i] != ';')
      ++i;
    e.atom = s.substr(start, i - start);
    return e;
  }
};

enum class VSort { Int, Bool, BV };

struct Val {
  VSort sort = VSort::Int;
  int64_t i = 0;       // Int
  bool b = false;      // Bool
  uint64_t bv = 0;     // BV

  bool operator==(const Val& o) const {
    if (sort != o.sort) return false;
    if (sort == VSort::Int) return i == o.i;
    if (sort == VSort::Bool) return b == o.b;
    return bv == o.bv;
  }
};

struct Var {
  VSort sort = VSort::Int;
  unsigned width = 1;  // BV
};

struct Solver {
  std::map<std::string, Var> vars;
  std::vector<SExpr> asserts;
  std::map<std::string, Val> model;
  bool solved = false;
  bool sat = false;
  long nodes = 0;
  static constexpr long kMaxNodes = 4000000;
  struct Budget {};

  static std::optional<int64_t> parse_num(const std::string& a) {
    if (a.empty()) return std::nullopt;
    if (a[0] == '#') {
      if (a.size() > 2 && a[1] == 'b') return std::strtoll(a.c_str() + 2, nullptr, 2);
      if (a.size() > 2 && a[1] == 'x') return std::strtoll(a.c_str() + 2, nullptr, 16);
      return std::nullopt;
    }
    if (!std::isdigit(static_cast<unsigned char>(a[0]))) return std::nullopt;
    return std::strtoll(a.c_str(), nullptr, 10);
  }

  std::optional<Val> eval(const SExpr& e, const std::map<std::string, Val>& env) const {
    if (e.is_atom) {
      if (e.atom == "true") return Val{VSort::Bool, 0, true, 0};
      if (e.atom == "false") return Val{VSort::Bool, 0, false, 0};
      if (e.atom.size() > 1 && e.atom[0] == '#') {
        auto n = parse_num(e.atom);
        if (!n) return std::nullopt;
        return Val{VSort::BV, 0, false, uint64_t(*n)};
      }
      if (auto n = parse_num(e.atom)) return Val{VSort::Int, *n, false, 0};
      auto it = env.find(e.atom);
      if (it != env.end()) return it->second;
      return std::nullopt;
    }
    if (e.items.empty()) return std::nullopt;
    const std::string& op = e.items[0].atom;
    std::vector<Val> args;
    args.reserve(e.items.size() - 1);
    for (size_t k = 1; k < e.items.size(); ++k) {
      auto v = eval(e.items[k], env);
      if (!v) return std::nullopt;
      args.push_back(*v);
    }
    auto all_int = [&] {
      for (const Val& v : args)
        if (v.sort != VSort::Int) return false;
      return true;
    };
    if (op == "-" && args.size() == 1) {
      if (args[0].sort != VSort::Int) return std::nullopt;
      return Val{VSort::Int, -args[0].i, false, 0};
    }
    if (op == "+" || op == "-") {
      if (!all_int() || args.size() < 2) return std::nullopt;
      int64_t acc = args[0].i;
      for (size_t k = 1; k < args.size(); ++k) {
        int64_t out;
        bool ovf = op == "+" ? __builtin_add_overflow(acc, args[k].i, &out)
                             : __builtin_sub_overflow(acc, args[k].i, &out);
        if (ovf) return std::nullopt;
        acc = out;
      }
      return Val{VSort::Int, acc, false, 0};
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      if (args.size() != 2 || !all_int()) return std::nullopt;
      bool r = op == "<"    ? args[0].i < args[1].i
               : op == "<=" ? args[0].i <= args[1].i
               : op == ">"  ? args[0].i > args[1].i
                            : args[0].i >= args[1].i;
      return Val{VSort::Bool, 0, r, 0};
    }
    if (op == "=") {
      if (args.size() != 2) return std::nullopt;
      return Val{VSort::Bool, 0, args[0] == args[1], 0};
    }
    if (op == "distinct") {
      if (args.size() != 2) return std::nullopt;
      return Val{VSort::Bool, 0, !(args[0] == args[1]), 0};
    }
    if (op == "not") {
      if (args.size() != 1 || args[0].sort != VSort::Bool) return std::nullopt;
      return Val{VSort::Bool, 0, !args[0].b, 0};
    }
    if (op == "and" || op == "or" || op == "xor" || op == "=>") {
      bool acc = args.empty() ? (op == "and") : args[0].b;
      for (const Val& v : args)
        if (v.sort != VSort::Bool) return std::nullopt;
      for (size_t k = 1; k < args.size(); ++k) {
        bool x = args[k].b;
        acc = op == "and" ? (acc && x) : op == "or" ? (acc || x) : op == "xor" ? (acc != x)
                                                                               : (!acc || x);
      }
      return Val{VSort::Bool, 0, acc, 0};
    }
    if (op == "bvand") {
      if (args.size() != 2 || args[0].sort != VSort::BV) return std::nullopt;
      return Val{VSort::BV, 0, false, args[0].bv & args[1].bv};
    }
    if (op == "ite") {
      if (args.size() != 3 || args[0].sort != VSort::Bool) return std::nullopt;
      return args[0].b ? args[1] : args[2];
    }
    return std::nullopt;
  }

  void collect_consts(const SExpr& e, std::set<int64_t>& out) const {
    if (e.is_atom) {
      if (e.atom.empty() || e.atom[0] == '#') return;
      if (auto n = parse_num(e.atom)) {
        out.insert(*n);
        out.insert(*n - 1);
        out.insert(*n + 1);
      }
      return;
    }
    // (- 5) literals
    if (e.items.size() == 2 && e.items[0].is_atom && e.items[0].atom == "-" &&
        e.items[1].is_atom) {
      if (auto n = parse_num(e.items[1].atom)) {
        out.insert(-*n);
        out.insert(-*n - 1);
        out.insert(-*n + 1);
      }
    }
    for (const SExpr& x : e.items) collect_consts(x, out);
  }

  const std::string* first_free(const SExpr& e, const std::map<std::string, Val>& env) const {
    if (e.is_atom) {
      if (vars.count(e.atom) && !env.count(e.atom)) return &e.atom;
      return nullptr;
    }
    for (size_t k = 1; k < e.items.size(); ++k)
      if (const std::string* f = first_free(e.items[k], env)) return f;
    if (!e.items.empty() && e.items[0].items.size() > 0)
      if (const std::string* f = first_free(e.items[0], env)) return f;
    return nullptr;
  }

  // solve `e == target` for a single free variable reachable through +,-,not,=
  bool isolate(const SExpr& e, Val target, const std::map<std::string, Val>& env,
               std::string* who, Val* what) const {
    if (e.is_atom) {
      auto it = vars.find(e.atom);
      if (it == vars.end() || env.count(e.atom)) return false;
      VSort want = it->second.sort;
      if (want != target.sort) return false;
      *who = e.atom;
      *what = target;
      return true;
    }
    if (e.items.empty()) return false;
    const std::string& op = e.items[0].atom;
    if ((op == "+" || op == "-") && e.items.size() == 3 && target.sort == VSort::Int) {
      auto a = eval(e.items[1], env);
      auto b = eval(e.items[2], env);
      if (a && !b) {
        int64_t out;
        bool ovf = op == "+" ? __builtin_sub_overflow(target.i, a->i, &out)
                             : __builtin_sub_overflow(a->i, target.i, &out);
        if (ovf) return false;
        return isolate(e.items[2], Val{VSort::Int, out, false, 0}, env, who, what);
      }
      if (!a && b) {
        int64_t out;
        bool ovf = op == "+" ? __builtin_sub_overflow(target.i, b->i, &out)
                             : __builtin_add_overflow(target.i, b->i, &out);
        if (ovf) return false;
        return isolate(e.items[1], Val{VSort::Int, out, false, 0}, env, who, what);
      }
      return false;
    }
    if (op == "-" && e.items.size() == 2 && target.sort == VSort::Int)
      return isolate(e.items[1], Val{VSort::Int, -target.i, false, 0}, env, who, what);
    if (op == "not" && e.items.size() == 2 && target.sort == VSort::Bool)
      return isolate(e.items[1], Val{VSort::Bool, 0, !target.b, 0}, env, who, what);
    if (op == "=" && e.items.size() == 3 && target.sort == VSort::Bool && target.b) {
      auto a = eval(e.items[1], env);
      auto b = eval(e.items[2], env);
      if (a && !b) return isolate(e.items[2], *a, env, who, what);
      if (!a && b) return isolate(e.items[1], *b, env, who, what);
    }
    return false;
  }

  // Pushes the wanted truth value through the connectives, collecting
  // candidate assignments for `who` from isolations and comparison bounds.
  void hint(const SExpr& e, bool want, const std::string& who,
            const std::map<std::string, Val>& env, std::vector<Val>& out) const {
    auto iso_into = [&](const SExpr& side, Val target) {
      std::string w;
      Val v;
      if (isolate(side, target, env, &w, &v) && w == who) out.push_back(v);
    };
    if (e.is_atom) {
      if (e.atom == who) out.push_back(Val{VSort::Bool, 0, want, 0});
      return;
    }
    if (e.items.empty()) return;
    const std::string& op = e.items[0].atom;
    if (op == "not" && e.items.size() == 2) {
      hint(e.items[1], !want, who, env, out);
      return;
    }
    if (op == "and" || op == "or") {
      for (size_t k = 1; k < e.items.size(); ++k) hint(e.items[k], want, who, env, out);
      return;
    }
    if ((op == "<" || op == "<=" || op == ">" || op == ">=") && e.items.size() == 3) {
      auto l = eval(e.items[1], env);
      auto r = eval(e.items[2], env);
      bool lt = op == "<" || op == "<=";
      bool strict = op == "<" || op == ">";
      // normalize to a (< or <=) b with a = items[lo], b = items[hi]
      const SExpr& lo = lt ? e.items[1] : e.items[2];
      const SExpr& hi = lt ? e.items[2] : e.items[1];
      auto lov = lt ? l : r;
      auto hiv = lt ? r : l;
      if (want) {
        if (hiv && !lov) iso_into(lo, Val{VSort::Int, hiv->i - (strict ? 1 : 0), false, 0});
        if (lov && !hiv) iso_into(hi, Val{VSort::Int, lov->i + (strict ? 1 : 0), false, 0});
      } else {  // lo >= hi (or lo > hi when non-strict)
        if (hiv && !lov) iso_into(lo, Val{VSort::Int, hiv->i + (strict ? 0 : 1), false, 0});
        if (lov && !hiv) iso_into(hi, Val{VSort::Int, lov->i - (strict ? 0 : 1), false, 0});
      }
      return;
    }
    if ((op == "=" || op == "distinct") && e.items.size() == 3) {
      bool eq_wanted = (op == "=") == want;
      auto l = eval(e.items[1], env);
      auto r = eval(e.items[2], env);
      if (l && l->sort == VSort::Bool && !r) hint(e.items[2], eq_wanted == l->b, who, env, out);
      if (r && r->sort == VSort::Bool && !l) hint(e.items[1], eq_wanted == r->b, who, env, out);
      if (eq_wanted) {
        if (l && !r) iso_into(e.items[2], *l);
        if (r && !l) iso_into(e.items[1], *r);
      } else {
        if (l && !r && l->sort == VSort::Int) {
          iso_into(e.items[2], Val{VSort::Int, l->i + 1, false, 0});
          iso_into(e.items[2], Val{VSort::Int, l->i - 1, false, 0});
        }
        if (r && !l && r->sort == VSort::Int) {
          iso_into(e.items[1], Val{VSort::Int, r->i + 1, false, 0});
          iso_into(e.items[1], Val{VSort::Int, r->i - 1, false, 0});
        }
      }
      return;
    }
  }

  bool dfs(size_t idx, std::map<std::string, Val>& env, const std::vector<int64_t>& ints) {
    if (++nodes > kMaxNodes) throw Budget{};
    if (idx == asserts.size()) {
      model = env;
      return true;
    }
    const SExpr& a = asserts[idx];
    auto v = eval(a, env);
    if (v) {
      if (v->sort != VSort::Bool || !v->b) return false;
      return dfs(idx + 1, env, ints);
    }
    const std::string* free = first_free(a, env);
    if (!free) return false;
    const Var& var = vars.at(*free);

    std::vector<Val> cands;
    hint(a, true, *free, env, cands);
    switch (var.sort) {
      case VSort::Bool:
        cands.push_back(Val{VSort::Bool, 0, false, 0});
        cands.push_back(Val{VSort::Bool, 0, true, 0});
        break;
      case VSort::Int:
        for (int64_t c : ints) cands.push_back(Val{VSort::Int, c, false, 0});
        break;
      case VSort::BV: {
        unsigned w = var.width > 12 ? 12 : var.width;
        for (uint64_t m = 0; m < (uint64_t(1) << w); ++m)
          cands.push_back(Val{VSort::BV, 0, false, m});
        break;
      }
    }

    std::vector<Val> tried;
    for (const Val& c : cands) {
      if (c.sort != var.sort) continue;
      bool dup = false;
      for (const Val& t : tried)
        if (t == c) { dup = true; break; }
      if (dup) continue;
      tried.push_back(c);
      env[*free] = c;
      if (dfs(idx, env, ints)) return true;
      env.erase(*free);
    }
    return false;
  }

  std::string check_sat() {
    std::set<int64_t> consts;
    for (int64_t v = -16; v <= 16; ++v) consts.insert(v);
    for (const SExpr& a : asserts) collect_consts(a, consts);
    std::vector<int64_t> ints(consts.begin(), consts.end());
    std::sort(ints.begin(), ints.end(), [](int64_t a, int64_t b) {
      uint64_t ma = a < 0 ? uint64_t(-(a + 1)) + 1 : uint64_t(a);
      uint64_t mb = b < 0 ? uint64_t(-(b + 1)) + 1 : uint64_t(b);
      if (ma != mb) return ma < mb;
      return a > b;
    });
    std::map<std::string, Val> env;
    nodes = 0;
    try {
      sat = dfs(0, env, ints);
    } catch (const Budget&) {
      solved = false;
      return "unknown";
    }
    solved = true;
    return sat ? "sat" : "unsat";
  }

  void print_val(std::ostream& os, const std::string& name) {
    Val v{};
    auto vi = vars.find(name);
    if (vi != vars.end()) {
      v.sort = vi->second.sort;
      auto mi = model.find(name);
      if (mi != model.end()) v = mi->second;
    }
    switch (v.sort) {
      case VSort::Int:
        if (v.i < 0) os << "(- " << (uint64_t) - (v.i + 1) + 1 << ")";
        else os << v.i;
        break;
      case VSort::Bool:
        os << (v.b ? "true" : "false");
        break;
      case VSort::BV: {
        unsigned w = vi != vars.end() ? vi->second.width : 1;
        os << "#b";
        for (unsigned k = w; k-- > 0;) os << ((v.bv >> k) & 1);
        break;
      }
    }
  }
};

}  // namespace

int main() {
  std::string input((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  Reader rd{input};
  Solver solver;
  while (auto cmd = rd.next()) {
    if (cmd->is_atom || cmd->items.empty() || !cmd->items[0].is_atom) continue;
    const std::string& head = cmd->items[0].atom;
    if (head == "declare-fun" || head == "declare-const") {
      if (cmd->items.size() < 3) continue;
      const std::string& name = cmd->items[1].atom;
      const SExpr& sort = cmd->items.back();
      Var v;
      if (sort.is_atom && sort.atom == "Bool") v.sort = VSort::Bool;
      else if (sort.is_atom && sort.atom == "Int") v.sort = VSort::Int;
      else if (!sort.is_atom && sort.items.size() == 3 && sort.items[1].atom == "BitVec") {
        v.sort = VSort::BV;
        v.width = unsigned(std::strtoul(sort.items[2].atom.c_str(), nullptr, 10));
      }
      solver.vars[name] = v;
    } else if (head == "assert") {
      if (cmd->items.size() == 2) solver.asserts.push_back(cmd->items[1]);
    } else if (head == "check-sat") {
      std::cout << solver.check_sat() << "\n";
    } else if (head == "get-value") {
      if (!solver.solved || !solver.sat) {
        std::cout << "(error \"no model\")\n";
        continue;
      }
      std::cout << "(";
      bool first = true;
      if (cmd->items.size() == 2)
        for (const SExpr& v : cmd->items[1].items) {
          if (!first) std::cout << " ";
          first = false;
          std::cout << "(" << v.atom << " ";
          solver.print_val(std::cout, v.atom);
          std::cout << ")";
        }
      std::cout << ")\n";
    } else if (head == "get-model") {
      std::cout << "(\n";
      for (const auto& [name, var] : solver.vars) {
        std::cout << "  (define-fun " << name << " () ";
        if (var.sort == VSort::BV) std::cout << "(_ BitVec " << var.width << ")";
        else std::cout << (var.sort == VSort::Bool ? "Bool" : "Int");
        std::cout << " ";
        solver.print_val(std::cout, name);
        std::cout << ")\n";
      }
      std::cout << ")\n";
    } else if (head == "exit") {
      break;
    }
    // set-logic, set-option, push/pop etc. are accepted and ignored
  }
  return 0;
}
