#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bluejay/common.hpp"

namespace bluejay {

struct Expr;
struct TypeExpr;
using ExprPtr = std::shared_ptr<Expr>;
using TypePtr = std::shared_ptr<TypeExpr>;

enum class BinOp { Add, Sub, Lt, Eq, And, Or, Xor };

inline const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Lt: return "<";
    case BinOp::Eq: return "==";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Xor: return "xor";
  }
  return "?";
}

struct Pattern {
  enum class Kind { Int, Bool, Fun, Any, Record, EmptyList, Cons, Variant };
  Kind kind = Kind::Any;
  std::vector<Symbol> labels;  // Record: distinct label set
  Symbol ctor = 0;             // Variant
  Symbol bind_a = 0;           // Cons head / Variant payload binder (match arms only)
  Symbol bind_b = 0;           // Cons tail binder
};

// One variant per production of the extended grammar. Instrumentation-only
// forms (Retag, Untouchable, PolyTest, PickI, PickB, MZero, and the payload
// extractors) are produced by the instrumenter and normalizer, never by the
// surface parser.
enum class ExprKind {
  Int, Bool, Var, Fun, App, Bin, If, Match, PatTest,
  Let,        // internal binding; no function entry on evaluation
  LetTyped,   // typed declaration sugar, consumed by the instrumenter
  Record, Proj, List, Cons, Variant,
  TypeLit,    // a type in expression position
  PickI, PickB, Error, MZero,
  Retag, PolyTest, Untouchable,
  ListHead, ListTail, VariantPayload,
  Assert, Assume,
};

struct MatchArm {
  Pattern pat;
  ExprPtr body;
};

struct TypedParam {
  Symbol name = 0;
  TypePtr type;
};

struct Expr {
  ExprKind kind;
  Symbol label = 0;  // unique clause identifier
  int line = 0, col = 0;

  int64_t int_val = 0;          // Int
  bool bool_val = false;        // Bool
  Symbol var = 0;               // Var, Fun param, Let binder, Proj label, Variant ctor
  BinOp op = BinOp::Add;        // Bin
  ExprPtr a, b, c;              // children (use varies by kind)
  std::vector<MatchArm> arms;   // Match
  Pattern pat;                  // PatTest
  std::vector<std::pair<Symbol, ExprPtr>> fields;  // Record literal (ordered)
  std::vector<ExprPtr> elems;   // List literal
  std::vector<Symbol> labelset; // Retag
  TypePtr type;                 // TypeLit
  int32_t alpha = 0;            // PolyTest / Untouchable tag

  // LetTyped
  bool is_rec = false;
  std::vector<Symbol> type_params;
  std::vector<TypedParam> params;
  TypePtr ret_type;    // function declarations
  TypePtr value_type;  // value declarations
};

enum class TypeKind {
  Int, Bool, Arrow, Refine, Dep, Poly, Forall,
  Variant, Intersect, Record, Mu, Var, List, ExprPos,
};

struct VariantArm {
  Symbol ctor = 0;
  TypePtr payload;
};

struct IntersectArm {
  Symbol ctor = 0;
  TypePtr domain;  // payload type of the variant-domain
  TypePtr codomain;
};

struct TypeExpr {
  TypeKind kind;
  TypePtr a, b;                       // Arrow/Dep/Refine base/Mu body/List elem
  ExprPtr pred;                       // Refine predicate, ExprPos expression
  Symbol var = 0;                     // Dep binder, Poly name, Mu binder, Var name
  std::vector<Symbol> foralls;        // Forall binders
  int explicit_foralls = 0;           // leading binders that are (type a) params
  std::vector<VariantArm> variants;   // Variant
  std::vector<IntersectArm> clauses;  // Intersect
  std::vector<std::pair<Symbol, TypePtr>> fields;  // Record type (ordered)
};

inline ExprPtr mk_expr(ExprKind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

inline TypePtr mk_type(TypeKind k) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = k;
  return t;
}

// Structural equality ignoring clause labels and positions; used for the
// parse/render round-trip property.
bool expr_equal(const Expr& x, const Expr& y);

inline bool type_equal(const TypeExpr& x, const TypeExpr& y) {
  if (x.kind != y.kind || x.var != y.var) return false;
  auto peq = [](const TypePtr& p, const TypePtr& q) {
    if (!p || !q) return !p && !q;
    return type_equal(*p, *q);
  };
  if (!peq(x.a, y.a) || !peq(x.b, y.b)) return false;
  if (!x.pred != !y.pred) return false;
  if (x.pred && !expr_equal(*x.pred, *y.pred)) return false;
  if (x.foralls != y.foralls) return false;
  if (x.variants.size() != y.variants.size()) return false;
  for (size_t i = 0; i < x.variants.size(); ++i) {
    if (x.variants[i].ctor != y.variants[i].ctor) return false;
    if (!peq(x.variants[i].payload, y.variants[i].payload)) return false;
  }
  if (x.clauses.size() != y.clauses.size()) return false;
  for (size_t i = 0; i < x.clauses.size(); ++i) {
    if (x.clauses[i].ctor != y.clauses[i].ctor) return false;
    if (!peq(x.clauses[i].domain, y.clauses[i].domain)) return false;
    if (!peq(x.clauses[i].codomain, y.clauses[i].codomain)) return false;
  }
  if (x.fields.size() != y.fields.size()) return false;
  for (size_t i = 0; i < x.fields.size(); ++i) {
    if (x.fields[i].first != y.fields[i].first) return false;
    if (!peq(x.fields[i].second, y.fields[i].second)) return false;
  }
  return true;
}

inline bool pattern_equal(const Pattern& p, const Pattern& q) {
  return p.kind == q.kind && p.labels == q.labels && p.ctor == q.ctor &&
         p.bind_a == q.bind_a && p.bind_b == q.bind_b;
}

inline bool expr_equal(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  if (x.int_val != y.int_val || x.bool_val != y.bool_val || x.var != y.var ||
      x.op != y.op || x.alpha != y.alpha || x.is_rec != y.is_rec ||
      x.labelset != y.labelset || x.type_params != y.type_params)
    return false;
  auto peq = [](const ExprPtr& p, const ExprPtr& q) {
    if (!p || !q) return !p && !q;
    return expr_equal(*p, *q);
  };
  auto teq = [](const TypePtr& p, const TypePtr& q) {
    if (!p || !q) return !p && !q;
    return type_equal(*p, *q);
  };
  if (!peq(x.a, y.a) || !peq(x.b, y.b) || !peq(x.c, y.c)) return false;
  if (!pattern_equal(x.pat, y.pat)) return false;
  if (x.arms.size() != y.arms.size()) return false;
  for (size_t i = 0; i < x.arms.size(); ++i) {
    if (!pattern_equal(x.arms[i].pat, y.arms[i].pat)) return false;
    if (!peq(x.arms[i].body, y.arms[i].body)) return false;
  }
  if (x.fields.size() != y.fields.size()) return false;
  for (size_t i = 0; i < x.fields.size(); ++i) {
    if (x.fields[i].first != y.fields[i].first) return false;
    if (!peq(x.fields[i].second, y.fields[i].second)) return false;
  }
  if (x.elems.size() != y.elems.size()) return false;
  for (size_t i = 0; i < x.elems.size(); ++i)
    if (!peq(x.elems[i], y.elems[i])) return false;
  if (!teq(x.type, y.type)) return false;
  if (x.params.size() != y.params.size()) return false;
  for (size_t i = 0; i < x.params.size(); ++i) {
    if (x.params[i].name != y.params[i].name) return false;
    if (!teq(x.params[i].type, y.params[i].type)) return false;
  }
  if (!teq(x.ret_type, y.ret_type) || !teq(x.value_type, y.value_type)) return false;
  return true;
}

}  // namespace bluejay
