#pragma once

#include <unordered_set>

#include "bluejay/ast.hpp"

namespace bluejay {

namespace detail {

inline bool is_atom(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int: case ExprKind::Bool: case ExprKind::Var: case ExprKind::Untouchable:
      return true;
    default:
      return false;
  }
}

class Normalizer {
public:
  ExprPtr run(const ExprPtr& e) { return block(e); }

private:
  long counter_ = 0;
  using Binds = std::vector<std::pair<Symbol, ExprPtr>>;

  Symbol fresh_label(const std::string& hint) {
    return intern(hint + "$n" + std::to_string(++counter_));
  }
  Symbol fresh_name(const std::string& hint) {
    return intern(hint + "$t" + std::to_string(++counter_));
  }

  ExprPtr node(ExprKind k, const std::string& hint) {
    auto e = mk_expr(k);
    e->label = fresh_label(hint);
    return e;
  }
  ExprPtr var_ref(Symbol s) {
    auto e = node(ExprKind::Var, sym_name(s));
    e->var = s;
    return e;
  }

  ExprPtr block(const ExprPtr& e0) {
    Binds binds;
    ExprPtr tail = chase(e0, binds);
    if (!is_atom(*tail)) {
      Symbol v = fresh_name("v");
      binds.emplace_back(v, tail);
      tail = var_ref(v);
    }
    for (auto it = binds.rbegin(); it != binds.rend(); ++it) {
      auto let = node(ExprKind::Let, "let");
      let->var = it->first;
      let->a = it->second;
      let->b = tail;
      tail = let;
    }
    return tail;
  }

  // Flattens let chains and match sugar, returning an atom or a clause.
  ExprPtr chase(ExprPtr cur, Binds& binds) {
    while (true) {
      if (cur->kind == ExprKind::Let) {
        ExprPtr rhs = is_atom(*cur->a) ? cur->a : chase_clause(cur->a, binds);
        binds.emplace_back(cur->var, rhs);
        cur = cur->b;
        continue;
      }
      if (cur->kind == ExprKind::Match) {
        cur = compile_match(cur);
        continue;
      }
      if (is_atom(*cur)) return cur;
      return clause(cur, binds);
    }
  }

  ExprPtr chase_clause(const ExprPtr& e, Binds& binds) {
    ExprPtr r = chase(e, binds);
    return r;
  }

  ExprPtr atomize(const ExprPtr& e, Binds& binds) {
    ExprPtr r = chase(e, binds);
    if (is_atom(*r)) return r;
    Symbol v = fresh_name("v");
    binds.emplace_back(v, r);
    return var_ref(v);
  }

  ExprPtr clause(const ExprPtr& e, Binds& binds) {
    auto out = std::make_shared<Expr>(*e);  // keep label and payload fields
    switch (e->kind) {
      case ExprKind::Bin:
      case ExprKind::App:
      case ExprKind::Cons:
        out->a = atomize(e->a, binds);
        out->b = atomize(e->b, binds);
        return out;
      case ExprKind::PatTest:
      case ExprKind::Proj:
      case ExprKind::Variant:
      case ExprKind::Retag:
      case ExprKind::PolyTest:
      case ExprKind::ListHead:
      case ExprKind::ListTail:
      case ExprKind::VariantPayload:
        out->a = atomize(e->a, binds);
        return out;
      case ExprKind::If:
        out->a = atomize(e->a, binds);
        out->b = block(e->b);
        out->c = block(e->c);
        return out;
      case ExprKind::Fun:
        out->a = block(e->a);
        return out;
      case ExprKind::Record:
        for (auto& f : out->fields) f.second = atomize(f.second, binds);
        return out;
      case ExprKind::List:
        for (auto& el : out->elems) el = atomize(el, binds);
        return out;
      case ExprKind::PickI:
      case ExprKind::PickB:
      case ExprKind::Error:
      case ExprKind::MZero:
      case ExprKind::TypeLit:
        return out;
      case ExprKind::LetTyped:
        // Not expected after instrumentation; normalize subterms untouched.
        out->a = block(e->a);
        out->b = block(e->b);
        return out;
      default:
        return out;
    }
  }

  Pattern strip_binders(const Pattern& p) {
    Pattern q = p;
    q.bind_a = 0;
    q.bind_b = 0;
    return q;
  }

  ExprPtr compile_match(const ExprPtr& m) {
    Symbol s = fresh_name("m");
    ExprPtr chain = node(ExprKind::Error, "nomatch@" + sym_name(m->label));
    for (auto it = m->arms.rbegin(); it != m->arms.rend(); ++it) {
      ExprPtr body = it->body;
      if (it->pat.kind == Pattern::Kind::Cons) {
        if (it->pat.bind_b) {
          auto lt = node(ExprKind::Let, "let");
          lt->var = it->pat.bind_b;
          lt->a = node(ExprKind::ListTail, "tl");
          lt->a->a = var_ref(s);
          lt->b = body;
          body = lt;
        }
        if (it->pat.bind_a) {
          auto lh = node(ExprKind::Let, "let");
          lh->var = it->pat.bind_a;
          lh->a = node(ExprKind::ListHead, "hd");
          lh->a->a = var_ref(s);
          lh->b = body;
          body = lh;
        }
      } else if (it->pat.kind == Pattern::Kind::Variant && it->pat.bind_a) {
        auto lp = node(ExprKind::Let, "let");
        lp->var = it->pat.bind_a;
        lp->a = node(ExprKind::VariantPayload, "pay");
        lp->a->a = var_ref(s);
        lp->b = body;
        body = lp;
      }
      auto test = node(ExprKind::PatTest, "arm");
      test->a = var_ref(s);
      test->pat = strip_binders(it->pat);
      auto iff = node(ExprKind::If, "disp");
      iff->a = test;
      iff->b = body;
      iff->c = chain;
      chain = iff;
    }
    auto let = node(ExprKind::Let, "scrut");
    let->var = s;
    let->a = m->a;
    let->b = chain;
    return let;
  }
};

inline void collect_labels(const Expr& e, std::unordered_set<Symbol>& seen) {
  if (e.label == 0) throw InternalInvariantError("unlabeled clause after normalization");
  if (!seen.insert(e.label).second)
    throw InternalInvariantError("duplicate clause label: " + sym_name(e.label));
  auto rec = [&](const ExprPtr& p) { if (p) collect_labels(*p, seen); };
  rec(e.a);
  rec(e.b);
  rec(e.c);
  for (const auto& arm : e.arms) rec(arm.body);
  for (const auto& f : e.fields) rec(f.second);
  for (const auto& el : e.elems) rec(el);
}

}  // namespace detail

// Rewrites the program so every subcomputation is a named clause with atomic
// operands, and pattern matches become chains of conditionals over pattern
// tests. Labels present in the input survive; new clauses get fresh labels.
inline ExprPtr normalize(const ExprPtr& program) {
  detail::Normalizer n;
  ExprPtr out = n.run(program);
  std::unordered_set<Symbol> seen;
  detail::collect_labels(*out, seen);
  return out;
}

}  // namespace bluejay
