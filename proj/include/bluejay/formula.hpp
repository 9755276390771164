#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "bluejay/common.hpp"
#include "bluejay/value.hpp"

namespace bluejay {

enum class Sort { Int, Bool, BitVec, Fun };

enum class TermOp { Add, Sub, Lt, Eq, And, Or, Xor, Not, BvAnd };

// Quantifier-free terms over per-clause variables: integers, booleans,
// opaque function identifiers, and record-label bitvectors.
struct Term {
  enum class Kind { Var, IntLit, BoolLit, BvLit, FunLit, App };
  Kind kind = Kind::BoolLit;
  ClauseKey var{};
  Sort var_sort = Sort::Int;
  int64_t ival = 0;
  bool bval = false;
  uint64_t bv = 0;
  Symbol fun_id = 0;
  TermOp op = TermOp::Eq;
  std::vector<Term> args;

  static Term variable(ClauseKey k, Sort s) {
    Term t;
    t.kind = Kind::Var;
    t.var = k;
    t.var_sort = s;
    return t;
  }
  static Term int_lit(int64_t v) { Term t; t.kind = Kind::IntLit; t.ival = v; return t; }
  static Term bool_lit(bool v) { Term t; t.kind = Kind::BoolLit; t.bval = v; return t; }
  static Term bv_lit(uint64_t v) { Term t; t.kind = Kind::BvLit; t.bv = v; return t; }
  static Term fun_lit(Symbol id) { Term t; t.kind = Kind::FunLit; t.fun_id = id; return t; }
  static Term app(TermOp op, std::vector<Term> args) {
    Term t;
    t.kind = Kind::App;
    t.op = op;
    t.args = std::move(args);
    return t;
  }
  static Term eq(Term a, Term b) { return app(TermOp::Eq, {std::move(a), std::move(b)}); }
};

// A boolean-sorted assertion.
struct Formula {
  Term t;
};

// The fixed label -> bit assignment for one program's records.
class LabelMap {
public:
  int bit_of(Symbol label) {
    auto it = bits_.find(label);
    if (it != bits_.end()) return it->second;
    int b = int(order_.size());
    if (b >= 64) throw InternalInvariantError("more than 64 distinct record labels");
    bits_.emplace(label, b);
    order_.push_back(label);
    return b;
  }
  uint64_t mask_of(const std::vector<Symbol>& labels) {
    uint64_t m = 0;
    for (Symbol l : labels) m |= uint64_t(1) << bit_of(l);
    return m;
  }
  size_t width() const { return order_.size() == 0 ? 1 : order_.size(); }

private:
  std::map<Symbol, int> bits_;
  std::vector<Symbol> order_;
};

// ---- SMT-LIB 2 rendering ----

class VarNames {
public:
  const std::string& name_of(ClauseKey k) {
    auto it = names_.find(k);
    if (it != names_.end()) return it->second;
    std::string n = "k" + std::to_string(names_.size());
    return names_.emplace(k, std::move(n)).first->second;
  }
  std::optional<ClauseKey> key_of(const std::string& name) const {
    for (const auto& [k, n] : names_)
      if (n == name) return k;
    return std::nullopt;
  }

private:
  std::map<ClauseKey, std::string> names_;
};

namespace detail {

inline const char* smt_op(TermOp op) {
  switch (op) {
    case TermOp::Add: return "+";
    case TermOp::Sub: return "-";
    case TermOp::Lt: return "<";
    case TermOp::Eq: return "=";
    case TermOp::And: return "and";
    case TermOp::Or: return "or";
    case TermOp::Xor: return "xor";
    case TermOp::Not: return "not";
    case TermOp::BvAnd: return "bvand";
  }
  return "?";
}

inline void smt_term(std::ostream& os, const Term& t, VarNames& names, size_t bv_width) {
  switch (t.kind) {
    case Term::Kind::Var:
      os << names.name_of(t.var);
      return;
    case Term::Kind::IntLit:
      if (t.ival < 0) os << "(- " << -(t.ival + 1) + uint64_t(1) << ")";
      else os << t.ival;
      return;
    case Term::Kind::BoolLit:
      os << (t.bval ? "true" : "false");
      return;
    case Term::Kind::BvLit: {
      os << "#b";
      for (size_t i = bv_width; i-- > 0;) os << ((t.bv >> i) & 1);
      return;
    }
    case Term::Kind::FunLit:
      os << uint64_t(t.fun_id);  // function identities as integers
      return;
    case Term::Kind::App: {
      os << "(" << smt_op(t.op);
      for (const Term& a : t.args) {
        os << " ";
        smt_term(os, a, names, bv_width);
      }
      os << ")";
      return;
    }
  }
}

inline void collect_vars(const Term& t, std::map<ClauseKey, Sort>& out) {
  if (t.kind == Term::Kind::Var) {
    out.emplace(t.var, t.var_sort);
    return;
  }
  if (t.kind == Term::Kind::App)
    for (const Term& a : t.args) collect_vars(a, out);
}

}  // namespace detail

inline const char* smt_sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::BitVec: return "BitVec";
    case Sort::Fun: return "Int";
  }
  return "Int";
}

// Renders a complete SMT-LIB 2 script: declarations, assertions, check-sat,
// and a get-value over the given free variables.
inline std::string to_smtlib(const std::vector<Formula>& formulas,
                             const std::vector<ClauseKey>& value_vars, size_t bv_width,
                             VarNames& names) {
  std::map<ClauseKey, Sort> vars;
  for (const Formula& f : formulas) detail::collect_vars(f.t, vars);
  std::ostringstream os;
  os << "(set-logic ALL)\n";
  for (const auto& [k, s] : vars) {
    os << "(declare-fun " << names.name_of(k) << " () ";
    if (s == Sort::BitVec) os << "(_ BitVec " << bv_width << ")";
    else os << smt_sort_name(s);
    os << ")\n";
  }
  for (const Formula& f : formulas) {
    os << "(assert ";
    detail::smt_term(os, f.t, names, bv_width);
    os << ")\n";
  }
  os << "(check-sat)\n";
  if (!value_vars.empty()) {
    os << "(get-value (";
    bool first = true;
    for (ClauseKey k : value_vars) {
      if (vars.count(k) == 0) continue;
      if (!first) os << " ";
      first = false;
      os << names.name_of(k);
    }
    os << "))\n";
  }
  os << "(exit)\n";
  return os.str();
}

}  // namespace bluejay
