#pragma once

#include <sstream>
#include <string>

#include "bluejay/ast.hpp"

namespace bluejay {

namespace detail {

// Precedence levels mirroring the parser: 10 or/xor, 20 and, 30 comparisons
// and pattern tests, 40 cons, 50 add/sub, 60 application, 100 atoms.
inline int expr_prec(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int: return e.int_val < 0 ? 50 : 100;
    case ExprKind::Bool: case ExprKind::Var: case ExprKind::Record:
    case ExprKind::List: case ExprKind::Error: case ExprKind::MZero:
    case ExprKind::PickI: case ExprKind::PickB: case ExprKind::Untouchable:
    case ExprKind::Retag:
      return 100;
    case ExprKind::Proj: return 95;
    case ExprKind::App: case ExprKind::Variant:
    case ExprKind::ListHead: case ExprKind::ListTail: case ExprKind::VariantPayload:
      return 60;
    case ExprKind::Bin:
      switch (e.op) {
        case BinOp::Add: case BinOp::Sub: return 50;
        case BinOp::Lt: case BinOp::Eq: return 30;
        case BinOp::And: return 20;
        case BinOp::Or: case BinOp::Xor: return 10;
      }
      return 10;
    case ExprKind::Cons: return 40;
    case ExprKind::PatTest: case ExprKind::PolyTest: return 30;
    case ExprKind::TypeLit: return 100;
    default: return 0;  // fun, if, match, let forms extend right
  }
}

void render_expr(std::ostream& os, const Expr& e, int ctx);
void render_type(std::ostream& os, const TypeExpr& t, int ctx);

inline void render_pattern(std::ostream& os, const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Int: os << "int"; break;
    case Pattern::Kind::Bool: os << "bool"; break;
    case Pattern::Kind::Fun: os << "fun"; break;
    case Pattern::Kind::Any: os << "any"; break;
    case Pattern::Kind::EmptyList: os << "[]"; break;
    case Pattern::Kind::Cons:
      os << (p.bind_a ? sym_name(p.bind_a) : "_") << " :: "
         << (p.bind_b ? sym_name(p.bind_b) : "_");
      break;
    case Pattern::Kind::Record: {
      os << "{";
      for (size_t i = 0; i < p.labels.size(); ++i)
        os << (i ? "; " : "") << sym_name(p.labels[i]);
      os << "}";
      break;
    }
    case Pattern::Kind::Variant:
      os << sym_name(p.ctor);
      if (p.bind_a) os << " " << sym_name(p.bind_a);
      break;
  }
}

inline void render_expr(std::ostream& os, const Expr& e, int ctx) {
  int prec = expr_prec(e);
  bool paren = prec < ctx;
  if (paren) os << "(";
  switch (e.kind) {
    case ExprKind::Int: os << e.int_val; break;
    case ExprKind::Bool: os << (e.bool_val ? "true" : "false"); break;
    case ExprKind::Var: os << sym_name(e.var); break;
    case ExprKind::Fun:
      os << "fun " << sym_name(e.var) << " -> ";
      render_expr(os, *e.a, 0);
      break;
    case ExprKind::App:
      render_expr(os, *e.a, 60);
      os << " ";
      render_expr(os, *e.b, 100);
      break;
    case ExprKind::Bin: {
      int lctx = prec, rctx = prec + 1;
      render_expr(os, *e.a, lctx);
      os << " " << binop_name(e.op) << " ";
      render_expr(os, *e.b, rctx);
      break;
    }
    case ExprKind::If:
      os << "if ";
      render_expr(os, *e.a, 0);
      os << " then ";
      render_expr(os, *e.b, 0);
      os << " else ";
      render_expr(os, *e.c, 0);
      break;
    case ExprKind::Match: {
      os << "match ";
      render_expr(os, *e.a, 0);
      os << " with";
      for (const auto& arm : e.arms) {
        os << " | ";
        render_pattern(os, arm.pat);
        os << " -> ";
        render_expr(os, *arm.body, 1);
      }
      break;
    }
    case ExprKind::PatTest:
      render_expr(os, *e.a, 40);
      os << " ~ ";
      render_pattern(os, e.pat);
      break;
    case ExprKind::Let:
      os << "let " << sym_name(e.var) << " = ";
      render_expr(os, *e.a, 0);
      os << " in ";
      render_expr(os, *e.b, 0);
      break;
    case ExprKind::LetTyped: {
      os << "let ";
      if (e.is_rec) os << "rec ";
      os << sym_name(e.var);
      if (!e.type_params.empty()) {
        os << " (type";
        for (Symbol s : e.type_params) os << " " << sym_name(s);
        os << ")";
      }
      for (const auto& p : e.params) {
        os << " (" << sym_name(p.name) << " : ";
        render_type(os, *p.type, 0);
        os << ")";
      }
      if (e.ret_type) {
        os << " : ";
        render_type(os, *e.ret_type, 11);
      }
      if (e.value_type) {
        os << " : ";
        render_type(os, *e.value_type, 11);
      }
      os << " = ";
      render_expr(os, *e.a, 0);
      os << " in ";
      render_expr(os, *e.b, 0);
      break;
    }
    case ExprKind::Record: {
      os << "{";
      for (size_t i = 0; i < e.fields.size(); ++i) {
        os << (i ? "; " : "") << sym_name(e.fields[i].first) << " = ";
        render_expr(os, *e.fields[i].second, 1);
      }
      os << "}";
      break;
    }
    case ExprKind::Proj:
      render_expr(os, *e.a, 95);
      os << "." << sym_name(e.var);
      break;
    case ExprKind::List: {
      os << "[";
      for (size_t i = 0; i < e.elems.size(); ++i) {
        if (i) os << "; ";
        render_expr(os, *e.elems[i], 1);
      }
      os << "]";
      break;
    }
    case ExprKind::Cons:
      render_expr(os, *e.a, 41);
      os << " :: ";
      render_expr(os, *e.b, 40);
      break;
    case ExprKind::Variant:
      os << sym_name(e.var) << " ";
      render_expr(os, *e.a, 100);
      break;
    case ExprKind::TypeLit:
      render_type(os, *e.type, 100);
      break;
    case ExprKind::PickI: os << "pick_i"; break;
    case ExprKind::PickB: os << "pick_b"; break;
    case ExprKind::Error: os << "ERROR"; break;
    case ExprKind::MZero: os << "mzero"; break;
    case ExprKind::Retag: {
      os << "retag(";
      render_expr(os, *e.a, 0);
      os << ", {";
      for (size_t i = 0; i < e.labelset.size(); ++i)
        os << (i ? "; " : "") << sym_name(e.labelset[i]);
      os << "})";
      break;
    }
    case ExprKind::PolyTest:
      render_expr(os, *e.a, 40);
      os << " =~ 'a" << e.alpha;
      break;
    case ExprKind::Untouchable: os << "V('a" << e.alpha << ")"; break;
    case ExprKind::ListHead:
      os << "$head ";
      render_expr(os, *e.a, 100);
      break;
    case ExprKind::ListTail:
      os << "$tail ";
      render_expr(os, *e.a, 100);
      break;
    case ExprKind::VariantPayload:
      os << "$payload ";
      render_expr(os, *e.a, 100);
      break;
    case ExprKind::Assert:
      os << "assert ";
      render_expr(os, *e.a, 10);
      break;
    case ExprKind::Assume:
      os << "assume ";
      render_expr(os, *e.a, 10);
      break;
  }
  if (paren) os << ")";
}

// Type precedence: 5 variant sums, 7 intersections, 10 arrows, 100 atoms.
inline int type_prec(const TypeExpr& t) {
  switch (t.kind) {
    case TypeKind::Arrow: case TypeKind::Dep: return 10;
    case TypeKind::Variant: return t.variants.size() == 1 ? 60 : 5;
    case TypeKind::Intersect: return 7;
    case TypeKind::Mu: case TypeKind::Forall: return 0;
    case TypeKind::ExprPos: return 60;
    default: return 100;
  }
}

inline void render_type(std::ostream& os, const TypeExpr& t, int ctx) {
  int prec = type_prec(t);
  bool paren = prec < ctx;
  if (paren) os << "(";
  switch (t.kind) {
    case TypeKind::Int: os << "int"; break;
    case TypeKind::Bool: os << "bool"; break;
    case TypeKind::Arrow:
      render_type(os, *t.a, 11);
      os << " -> ";
      render_type(os, *t.b, 11);
      break;
    case TypeKind::Dep:
      os << "(" << sym_name(t.var) << " : ";
      render_type(os, *t.a, 0);
      os << ") -> ";
      render_type(os, *t.b, 11);
      break;
    case TypeKind::Refine:
      os << "{";
      render_type(os, *t.a, 6);
      os << " | ";
      render_expr(os, *t.pred, 0);
      os << "}";
      break;
    case TypeKind::Poly: os << "'" << sym_name(t.var); break;
    case TypeKind::Forall: {
      // Quantifiers are implicit in surface syntax; render just the body.
      render_type(os, *t.a, ctx > 0 ? 0 : 0);
      break;
    }
    case TypeKind::Variant: {
      for (size_t i = 0; i < t.variants.size(); ++i) {
        if (i) os << " || ";
        os << sym_name(t.variants[i].ctor) << " of ";
        render_type(os, *t.variants[i].payload, 100);
      }
      break;
    }
    case TypeKind::Intersect: {
      for (size_t i = 0; i < t.clauses.size(); ++i) {
        if (i) os << " && ";
        os << "(" << sym_name(t.clauses[i].ctor) << " of ";
        render_type(os, *t.clauses[i].domain, 100);
        os << ") -> ";
        render_type(os, *t.clauses[i].codomain, 11);
      }
      break;
    }
    case TypeKind::Record: {
      os << "{";
      for (size_t i = 0; i < t.fields.size(); ++i) {
        os << (i ? "; " : "") << sym_name(t.fields[i].first) << " : ";
        render_type(os, *t.fields[i].second, 1);
      }
      os << "}";
      break;
    }
    case TypeKind::Mu:
      os << "Mu " << sym_name(t.var) << ". ";
      render_type(os, *t.a, 0);
      break;
    case TypeKind::Var: os << sym_name(t.var); break;
    case TypeKind::List:
      os << "[";
      render_type(os, *t.a, 0);
      os << "]";
      break;
    case TypeKind::ExprPos:
      render_expr(os, *t.pred, 60);
      break;
  }
  if (paren) os << ")";
}

}  // namespace detail

inline std::string render(const Expr& e) {
  std::ostringstream os;
  detail::render_expr(os, e, 0);
  return os.str();
}

inline std::string render(const ExprPtr& e) { return render(*e); }

inline std::string render_type(const TypeExpr& t) {
  std::ostringstream os;
  detail::render_type(os, t, 0);
  return os.str();
}

inline std::string render_type(const TypePtr& t) { return render_type(*t); }

inline std::string render_pattern(const Pattern& p) {
  std::ostringstream os;
  detail::render_pattern(os, p);
  return os.str();
}

}  // namespace bluejay
