#pragma once

#include "bluejay/ast.hpp"
#include "bluejay/formula.hpp"
#include "bluejay/interp.hpp"

namespace bluejay {

namespace detail {

inline std::optional<Term> term_of(const Origin& o, Sort want) {
  switch (o.kind) {
    case Origin::Kind::Clause:
      return Term::variable(o.key, want);
    case Origin::Kind::IntConst:
      if (want != Sort::Int) return std::nullopt;
      return Term::int_lit(o.int_const);
    case Origin::Kind::BoolConst:
      if (want != Sort::Bool) return std::nullopt;
      return Term::bool_lit(o.bool_const);
    case Origin::Kind::Opaque:
      return std::nullopt;
  }
  return std::nullopt;
}

inline std::optional<Term> concrete_term(const Value& v) {
  if (v.is_int()) return Term::int_lit(v.as_int());
  if (v.is_bool()) return Term::bool_lit(v.as_bool());
  return std::nullopt;
}

inline std::optional<TermOp> op_of(BinOp op) {
  switch (op) {
    case BinOp::Add: return TermOp::Add;
    case BinOp::Sub: return TermOp::Sub;
    case BinOp::Lt: return TermOp::Lt;
    case BinOp::Eq: return TermOp::Eq;
    case BinOp::And: return TermOp::And;
    case BinOp::Or: return TermOp::Or;
    case BinOp::Xor: return TermOp::Xor;
  }
  return std::nullopt;
}

}  // namespace detail

// Per-clause symbolic encoding. One executed clause yields equalities over
// keyed variables; anything outside the formula sorts falls back to pinning
// the clause at its concrete value, leaving the branch to concrete
// confirmation.
inline std::vector<Formula> encode_clause(const ClauseEvent& ev, LabelMap& labels) {
  std::vector<Formula> out;
  const Expr* n = ev.node;
  if (!n) return out;

  auto pin_concrete = [&](Sort s) {
    if (!ev.result) return;
    auto lit = detail::concrete_term(*ev.result);
    if (lit) out.push_back({Term::eq(Term::variable(ev.key, s), *lit)});
  };

  switch (n->kind) {
    case ExprKind::Bin: {
      bool bool_op = n->op == BinOp::And || n->op == BinOp::Or || n->op == BinOp::Xor;
      Sort operand = bool_op ? Sort::Bool : Sort::Int;
      // == dispatches on what actually flowed through
      if (n->op == BinOp::Eq && ev.aval)
        operand = ev.aval->is_bool() ? Sort::Bool : Sort::Int;
      Sort result_sort = (n->op == BinOp::Add || n->op == BinOp::Sub) ? Sort::Int : Sort::Bool;
      auto a = detail::term_of(ev.a, operand);
      auto b = detail::term_of(ev.b, operand);
      auto op = detail::op_of(n->op);
      if (a && b && op) {
        out.push_back({Term::eq(Term::variable(ev.key, result_sort),
                                Term::app(*op, {*a, *b}))});
      } else {
        pin_concrete(result_sort);
      }
      return out;
    }
    case ExprKind::PatTest: {
      if (n->pat.kind == Pattern::Kind::Record && ev.scrutinee && ev.scrutinee->is_record()) {
        // at-least-labels subset test: p = r AND p over the label bitvector
        auto r = detail::term_of(ev.a, Sort::BitVec);
        if (r) {
          uint64_t p = labels.mask_of(n->pat.labels);
          Term pt = Term::bv_lit(p);
          Term test = Term::eq(pt, Term::app(TermOp::BvAnd, {*r, pt}));
          out.push_back({Term::eq(Term::variable(ev.key, Sort::Bool), test)});
          return out;
        }
      }
      // class tests are concrete along a fixed path
      pin_concrete(Sort::Bool);
      return out;
    }
    case ExprKind::PolyTest:
      pin_concrete(Sort::Bool);
      return out;
    case ExprKind::Record:
      if (ev.result && ev.result->is_record())
        out.push_back({Term::eq(Term::variable(ev.key, Sort::BitVec),
                                Term::bv_lit(labels.mask_of(ev.result->as_record().declared)))});
      return out;
    case ExprKind::Retag:
      if (ev.result && ev.result->is_record())
        out.push_back({Term::eq(Term::variable(ev.key, Sort::BitVec),
                                Term::bv_lit(labels.mask_of(ev.result->as_record().declared)))});
      return out;
    case ExprKind::Fun:
      out.push_back({Term::eq(Term::variable(ev.key, Sort::Fun), Term::fun_lit(n->label))});
      return out;
    default:
      return out;
  }
}

// Strict-layout record test (`r = p`), exposed for the solver surface; the
// surface language's pattern tests are all at-least tests.
inline Formula encode_strict_record_test(ClauseKey result, ClauseKey record, uint64_t mask) {
  return {Term::eq(Term::variable(result, Sort::Bool),
                   Term::eq(Term::variable(record, Sort::BitVec), Term::bv_lit(mask)))};
}

// The constraint asserting a branch condition took the given direction.
// nullopt when the condition is outside the formula sorts.
inline std::optional<Formula> branch_constraint(const Origin& cond, bool dir) {
  switch (cond.kind) {
    case Origin::Kind::Clause: {
      Term v = Term::variable(cond.key, Sort::Bool);
      return Formula{dir ? v : Term::app(TermOp::Not, {v})};
    }
    case Origin::Kind::BoolConst:
      return Formula{Term::bool_lit(cond.bool_const == dir)};
    default:
      return std::nullopt;
  }
}

}  // namespace bluejay
