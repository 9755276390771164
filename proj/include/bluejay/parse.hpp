#pragma once

#include <cctype>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bluejay/ast.hpp"

namespace bluejay {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_), col(col_) {}
};

// Source used an instrumentation-only form (pick_i, pick_b, mzero, retag, ...).
struct RejectedConstruct : ParseError {
  using ParseError::ParseError;
};

namespace detail {

enum class Tok {
  Int, Ident, Ctor, PolyVar,
  KwLet, KwRec, KwIn, KwFun, KwIf, KwThen, KwElse, KwMatch, KwWith, KwType,
  KwAssert, KwAssume, KwTrue, KwFalse, KwInt, KwBool, KwList, KwMu, KwForall,
  KwOf, KwAnd, KwOr, KwXor, KwNot, KwError, KwAny,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Semi, Colon, Dot, Comma, Bar, BarBar, AmpAmp, Arrow,
  Eq, EqEq, Neq, Lt, Gt, Le, Ge, Plus, Minus, ColonColon, Tilde,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int64_t ival = 0;
  int line = 1, col = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  int line = 1, col = 1;
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (src[i + j] == '\n') { ++line; col = 1; } else ++col;
    }
    i += k;
  };
  auto push = [&](Tok k, const std::string& text) {
    out.push_back({k, text, 0, line, col});
    advance(text.size());
  };
  while (i < n) {
    char ch = src[i];
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') { advance(1); continue; }
    if (ch == '(' && i + 1 < n && src[i + 1] == '*') {
      int startl = line, startc = col;
      int depth = 1;
      advance(2);
      while (i < n && depth > 0) {
        if (src[i] == '(' && i + 1 < n && src[i + 1] == '*') { depth++; advance(2); }
        else if (src[i] == '*' && i + 1 < n && src[i + 1] == ')') { depth--; advance(2); }
        else advance(1);
      }
      if (depth > 0) throw ParseError("unterminated comment", startl, startc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, src.substr(i, j - i), 0, line, col};
      t.ival = std::strtoll(t.text.c_str(), nullptr, 10);
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (ch == '\'' && i + 1 < n && std::islower(static_cast<unsigned char>(src[i + 1]))) {
      size_t j = i + 1;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::PolyVar, src.substr(i + 1, j - i - 1), 0, line, col});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                       src[j] == '\'' || src[j] == '$'))
        ++j;
      std::string w = src.substr(i, j - i);
      Tok k;
      if (w == "let") k = Tok::KwLet;
      else if (w == "rec") k = Tok::KwRec;
      else if (w == "in") k = Tok::KwIn;
      else if (w == "fun") k = Tok::KwFun;
      else if (w == "if") k = Tok::KwIf;
      else if (w == "then") k = Tok::KwThen;
      else if (w == "else") k = Tok::KwElse;
      else if (w == "match") k = Tok::KwMatch;
      else if (w == "with") k = Tok::KwWith;
      else if (w == "type") k = Tok::KwType;
      else if (w == "assert") k = Tok::KwAssert;
      else if (w == "assume") k = Tok::KwAssume;
      else if (w == "true") k = Tok::KwTrue;
      else if (w == "false") k = Tok::KwFalse;
      else if (w == "int") k = Tok::KwInt;
      else if (w == "bool") k = Tok::KwBool;
      else if (w == "list") k = Tok::KwList;
      else if (w == "Mu") k = Tok::KwMu;
      else if (w == "forall") k = Tok::KwForall;
      else if (w == "of") k = Tok::KwOf;
      else if (w == "and") k = Tok::KwAnd;
      else if (w == "or") k = Tok::KwOr;
      else if (w == "xor") k = Tok::KwXor;
      else if (w == "not") k = Tok::KwNot;
      else if (w == "ERROR") k = Tok::KwError;
      else if (w == "any") k = Tok::KwAny;
      else if (std::isupper(static_cast<unsigned char>(w[0]))) k = Tok::Ctor;
      else k = Tok::Ident;
      out.push_back({k, w, 0, line, col});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return ch == a && i + 1 < n && src[i + 1] == b; };
    if (two('|', '|')) { push(Tok::BarBar, "||"); continue; }
    if (two('&', '&')) { push(Tok::AmpAmp, "&&"); continue; }
    if (two('-', '>')) { push(Tok::Arrow, "->"); continue; }
    if (two('=', '=')) { push(Tok::EqEq, "=="); continue; }
    if (two('!', '=')) { push(Tok::Neq, "!="); continue; }
    if (two('<', '>')) { push(Tok::Neq, "<>"); continue; }
    if (two('<', '=')) { push(Tok::Le, "<="); continue; }
    if (two('>', '=')) { push(Tok::Ge, ">="); continue; }
    if (two(':', ':')) { push(Tok::ColonColon, "::"); continue; }
    switch (ch) {
      case '(': push(Tok::LParen, "("); continue;
      case ')': push(Tok::RParen, ")"); continue;
      case '{': push(Tok::LBrace, "{"); continue;
      case '}': push(Tok::RBrace, "}"); continue;
      case '[': push(Tok::LBracket, "["); continue;
      case ']': push(Tok::RBracket, "]"); continue;
      case ';': push(Tok::Semi, ";"); continue;
      case ':': push(Tok::Colon, ":"); continue;
      case '.': push(Tok::Dot, "."); continue;
      case ',': push(Tok::Comma, ","); continue;
      case '|': push(Tok::Bar, "|"); continue;
      case '=': push(Tok::Eq, "="); continue;
      case '<': push(Tok::Lt, "<"); continue;
      case '>': push(Tok::Gt, ">"); continue;
      case '+': push(Tok::Plus, "+"); continue;
      case '-': push(Tok::Minus, "-"); continue;
      case '~': push(Tok::Tilde, "~"); continue;
      default:
        throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
    }
  }
  out.push_back({Tok::End, "", 0, line, col});
  return out;
}

class Parser {
public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

  ExprPtr parse_program() {
    ExprPtr e = expr();
    expect(Tok::End, "end of input");
    return e;
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  long counter_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool eat(Tok k) {
    if (at(k)) { ++pos_; return true; }
    return false;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) throw ParseError(std::string("expected ") + what + ", found '" + cur().text + "'", cur().line, cur().col);
    return toks_[pos_++];
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " (found '" + cur().text + "')", cur().line, cur().col);
  }

  ExprPtr node(ExprKind k, const std::string& hint) {
    auto e = mk_expr(k);
    e->label = intern(hint + "$p" + std::to_string(++counter_));
    e->line = cur().line;
    e->col = cur().col;
    return e;
  }

  Symbol fresh_var(const std::string& hint) {
    return intern(hint + "$g" + std::to_string(++counter_));
  }

  ExprPtr mk_int(int64_t v) {
    auto e = node(ExprKind::Int, "lit");
    e->int_val = v;
    return e;
  }
  ExprPtr mk_bool(bool v) {
    auto e = node(ExprKind::Bool, "lit");
    e->bool_val = v;
    return e;
  }
  ExprPtr mk_var(Symbol s) {
    auto e = node(ExprKind::Var, sym_name(s));
    e->var = s;
    return e;
  }
  ExprPtr mk_fun(Symbol param, ExprPtr body) {
    auto e = node(ExprKind::Fun, "fun");
    e->var = param;
    e->a = std::move(body);
    return e;
  }
  ExprPtr mk_app(ExprPtr f, ExprPtr a) {
    auto e = node(ExprKind::App, "app");
    e->a = std::move(f);
    e->b = std::move(a);
    return e;
  }
  ExprPtr mk_bin(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = node(ExprKind::Bin, binop_name(op) == std::string("==") ? "eq" : "bin");
    e->op = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  ExprPtr mk_if(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = node(ExprKind::If, "if");
    e->a = std::move(c);
    e->b = std::move(t);
    e->c = std::move(f);
    return e;
  }
  ExprPtr mk_not(ExprPtr x) { return mk_bin(BinOp::Xor, std::move(x), mk_bool(true)); }

  // Strict fixed-point combinator; `let rec` goes through it.
  ExprPtr z_combinator(Symbol f) {
    auto half = [&]() {
      Symbol x = fresh_var("zx");
      Symbol v = fresh_var("zv");
      // fun x -> f (fun v -> (x x) v)
      ExprPtr inner = mk_fun(v, mk_app(mk_app(mk_var(x), mk_var(x)), mk_var(v)));
      return mk_fun(x, mk_app(mk_var(f), inner));
    };
    return mk_fun(f, mk_app(half(), half()));
  }

  void reject_instrumentation_ident(const Token& t) {
    if (t.text == "pick_i" || t.text == "pick_b" || t.text == "mzero" || t.text == "retag")
      throw RejectedConstruct("'" + t.text + "' is an instrumentation-only form", t.line, t.col);
  }

  // ---- expressions ----

  ExprPtr expr() {
    switch (cur().kind) {
      case Tok::KwFun: return parse_fun();
      case Tok::KwLet: return parse_let();
      case Tok::KwIf: {
        ++pos_;
        ExprPtr c = expr();
        expect(Tok::KwThen, "'then'");
        ExprPtr t = expr();
        expect(Tok::KwElse, "'else'");
        ExprPtr f = expr();
        return mk_if(std::move(c), std::move(t), std::move(f));
      }
      case Tok::KwMatch: return parse_match();
      case Tok::KwAssert: {
        ++pos_;
        ExprPtr c = opchain(0);
        return mk_if(std::move(c), mk_bool(true), node(ExprKind::Error, "assert_fail"));
      }
      case Tok::KwAssume: {
        ++pos_;
        ExprPtr c = opchain(0);
        return mk_if(std::move(c), mk_bool(true), node(ExprKind::MZero, "assume_fail"));
      }
      default:
        return opchain(0);
    }
  }

  ExprPtr parse_fun() {
    expect(Tok::KwFun, "'fun'");
    std::vector<Symbol> params;
    while (at(Tok::Ident)) {
      reject_instrumentation_ident(cur());
      params.push_back(intern(cur().text));
      ++pos_;
    }
    if (params.empty()) fail("function needs at least one parameter");
    expect(Tok::Arrow, "'->'");
    ExprPtr body = expr();
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      body = mk_fun(*it, std::move(body));
    return body;
  }

  ExprPtr parse_match() {
    expect(Tok::KwMatch, "'match'");
    ExprPtr scrut = expr();
    expect(Tok::KwWith, "'with'");
    eat(Tok::Bar);
    auto m = node(ExprKind::Match, "match");
    m->a = std::move(scrut);
    while (true) {
      MatchArm arm;
      arm.pat = parse_pattern(true);
      expect(Tok::Arrow, "'->'");
      arm.body = expr();
      m->arms.push_back(std::move(arm));
      if (!eat(Tok::Bar)) break;
    }
    return m;
  }

  Pattern parse_pattern(bool binders) {
    Pattern p;
    switch (cur().kind) {
      case Tok::KwInt: ++pos_; p.kind = Pattern::Kind::Int; return p;
      case Tok::KwBool: ++pos_; p.kind = Pattern::Kind::Bool; return p;
      case Tok::KwFun: ++pos_; p.kind = Pattern::Kind::Fun; return p;
      case Tok::KwAny: ++pos_; p.kind = Pattern::Kind::Any; return p;
      case Tok::LBracket:
        ++pos_;
        expect(Tok::RBracket, "']'");
        p.kind = Pattern::Kind::EmptyList;
        return p;
      case Tok::LBrace: {
        ++pos_;
        p.kind = Pattern::Kind::Record;
        while (!at(Tok::RBrace)) {
          Token l = expect(Tok::Ident, "record label");
          Symbol s = intern(l.text);
          for (Symbol prev : p.labels)
            if (prev == s) throw ParseError("duplicate label in record pattern", l.line, l.col);
          p.labels.push_back(s);
          if (!eat(Tok::Semi)) break;
        }
        expect(Tok::RBrace, "'}'");
        return p;
      }
      case Tok::Ctor: {
        p.kind = Pattern::Kind::Variant;
        p.ctor = intern(cur().text);
        ++pos_;
        if (binders && at(Tok::Ident)) {
          p.bind_a = cur().text == "_" ? 0 : intern(cur().text);
          ++pos_;
        }
        return p;
      }
      case Tok::Ident: {
        // cons pattern: x :: y
        if (peek().kind == Tok::ColonColon) {
          Symbol h = cur().text == "_" ? 0 : intern(cur().text);
          ++pos_;
          ++pos_;
          Token t = expect(Tok::Ident, "cons tail binder");
          p.kind = Pattern::Kind::Cons;
          if (binders) {
            p.bind_a = h;
            p.bind_b = t.text == "_" ? 0 : intern(t.text);
          }
          return p;
        }
        if (cur().text == "_") { ++pos_; p.kind = Pattern::Kind::Any; return p; }
        fail("expected a pattern");
      }
      default:
        fail("expected a pattern");
    }
  }

  // ---- let forms ----

  ExprPtr parse_let() {
    expect(Tok::KwLet, "'let'");
    bool is_rec = eat(Tok::KwRec);

    // let (x : tau) = e in e
    if (at(Tok::LParen)) {
      expect(Tok::LParen, "'('");
      Token name = expect(Tok::Ident, "identifier");
      reject_instrumentation_ident(name);
      expect(Tok::Colon, "':'");
      TypePtr ty = parse_type();
      expect(Tok::RParen, "')'");
      expect(Tok::Eq, "'='");
      ExprPtr rhs = expr();
      expect(Tok::KwIn, "'in'");
      ExprPtr body = expr();
      return make_typed_value(intern(name.text), is_rec, std::move(ty), std::move(rhs), std::move(body));
    }

    Token name = expect(Tok::Ident, "identifier");
    reject_instrumentation_ident(name);
    Symbol fname = intern(name.text);

    // let x : tau = e in e
    if (at(Tok::Colon)) {
      ++pos_;
      TypePtr ty = parse_type();
      expect(Tok::Eq, "'='");
      ExprPtr rhs = expr();
      expect(Tok::KwIn, "'in'");
      ExprPtr body = expr();
      return make_typed_value(fname, is_rec, std::move(ty), std::move(rhs), std::move(body));
    }

    // let x = e in e  (plain sugar for application)
    if (at(Tok::Eq)) {
      ++pos_;
      ExprPtr rhs = expr();
      expect(Tok::KwIn, "'in'");
      ExprPtr body = expr();
      if (is_rec) rhs = mk_app(z_combinator(fresh_var("z")), mk_fun(fname, std::move(rhs)));
      return mk_app(mk_fun(fname, std::move(body)), std::move(rhs));
    }

    // Parameters: either all-bare (untyped function) or all-typed, optionally
    // preceded by (type a b ...).
    std::vector<Symbol> type_params;
    if (at(Tok::LParen) && peek().kind == Tok::KwType) {
      pos_ += 2;
      while (at(Tok::Ident)) {
        type_params.push_back(intern(cur().text));
        ++pos_;
      }
      expect(Tok::RParen, "')'");
    }

    std::vector<TypedParam> typed_params;
    std::vector<Symbol> bare_params;
    while (true) {
      if (at(Tok::LParen) && peek().kind == Tok::Ident && peek(2).kind == Tok::Colon) {
        ++pos_;
        Token p = expect(Tok::Ident, "parameter");
        expect(Tok::Colon, "':'");
        TypePtr ty = parse_type();
        expect(Tok::RParen, "')'");
        typed_params.push_back({intern(p.text), std::move(ty)});
        continue;
      }
      if (at(Tok::Ident) && typed_params.empty() && type_params.empty()) {
        bare_params.push_back(intern(cur().text));
        ++pos_;
        continue;
      }
      break;
    }

    if (!typed_params.empty() || !type_params.empty()) {
      TypePtr ret;
      if (eat(Tok::Colon)) ret = parse_type();
      if (!ret) fail("typed declaration needs a return type annotation");
      expect(Tok::Eq, "'='");
      ExprPtr rhs = expr();
      expect(Tok::KwIn, "'in'");
      ExprPtr body = expr();
      auto d = node(ExprKind::LetTyped, "decl$" + name.text);
      d->var = fname;
      d->is_rec = is_rec;
      d->type_params = std::move(type_params);
      d->params = std::move(typed_params);
      d->ret_type = std::move(ret);
      d->a = std::move(rhs);
      d->b = std::move(body);
      return d;
    }

    if (bare_params.empty()) fail("malformed let binding");
    if (at(Tok::Colon)) fail("annotate each parameter to give a declaration a return type");
    expect(Tok::Eq, "'='");
    ExprPtr rhs = expr();
    expect(Tok::KwIn, "'in'");
    ExprPtr body = expr();
    for (auto it = bare_params.rbegin(); it != bare_params.rend(); ++it)
      rhs = mk_fun(*it, std::move(rhs));
    if (is_rec) rhs = mk_app(z_combinator(fresh_var("z")), mk_fun(fname, std::move(rhs)));
    return mk_app(mk_fun(fname, std::move(body)), std::move(rhs));
  }

  ExprPtr make_typed_value(Symbol name, bool is_rec, TypePtr ty, ExprPtr rhs, ExprPtr body) {
    auto d = node(ExprKind::LetTyped, "decl$" + sym_name(name));
    d->var = name;
    d->is_rec = is_rec;
    d->value_type = std::move(ty);
    d->a = std::move(rhs);
    d->b = std::move(body);
    return d;
  }

  // ---- operator precedence ----
  // 0: or xor ||   1: and &&   2: == != < > <= >= ~   3: :: (right)
  // 4: + -   5: application
  ExprPtr opchain(int level) {
    if (level == 3) {
      ExprPtr l = opchain(4);
      if (at(Tok::ColonColon)) {
        ++pos_;
        ExprPtr r = opchain(3);
        auto e = node(ExprKind::Cons, "cons");
        e->a = std::move(l);
        e->b = std::move(r);
        return e;
      }
      return l;
    }
    if (level == 5) return application();

    ExprPtr l = opchain(level + 1);
    while (true) {
      BinOp op;
      bool negate = false, swap = false;
      switch (cur().kind) {
        case Tok::KwOr: case Tok::BarBar: if (level != 0) return l; op = BinOp::Or; break;
        case Tok::KwXor: if (level != 0) return l; op = BinOp::Xor; break;
        case Tok::KwAnd: case Tok::AmpAmp: if (level != 1) return l; op = BinOp::And; break;
        case Tok::EqEq: if (level != 2) return l; op = BinOp::Eq; break;
        case Tok::Neq: if (level != 2) return l; op = BinOp::Eq; negate = true; break;
        case Tok::Lt: if (level != 2) return l; op = BinOp::Lt; break;
        case Tok::Gt: if (level != 2) return l; op = BinOp::Lt; swap = true; break;
        case Tok::Le: if (level != 2) return l; op = BinOp::Lt; swap = true; negate = true; break;
        case Tok::Ge: if (level != 2) return l; op = BinOp::Lt; negate = true; break;
        case Tok::Tilde: {
          if (level != 2) return l;
          ++pos_;
          Pattern p = parse_pattern(false);
          auto e = node(ExprKind::PatTest, "tst");
          e->a = std::move(l);
          e->pat = p;
          l = std::move(e);
          continue;
        }
        case Tok::Plus: if (level != 4) return l; op = BinOp::Add; break;
        case Tok::Minus: if (level != 4) return l; op = BinOp::Sub; break;
        default: return l;
      }
      ++pos_;
      ExprPtr r = opchain(level + 1);
      if (swap) std::swap(l, r);
      l = mk_bin(op, std::move(l), std::move(r));
      if (negate) l = mk_not(std::move(l));
    }
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::Int: case Tok::Ident: case Tok::Ctor: case Tok::KwTrue: case Tok::KwFalse:
      case Tok::LParen: case Tok::LBrace: case Tok::LBracket: case Tok::KwError:
      case Tok::KwInt: case Tok::KwBool: case Tok::KwList: case Tok::KwMu:
      case Tok::KwForall: case Tok::PolyVar:
        return true;
      default:
        return false;
    }
  }

  ExprPtr application() {
    if (at(Tok::KwNot)) {
      ++pos_;
      return mk_not(application());
    }
    if (at(Tok::Minus)) {  // unary minus; a literal operand folds
      ++pos_;
      if (at(Tok::Int)) {
        int64_t v = cur().ival;
        ++pos_;
        return mk_int(-v);
      }
      return mk_bin(BinOp::Sub, mk_int(0), application());
    }
    if (at(Tok::Ctor)) {
      Symbol ctor = intern(cur().text);
      ++pos_;
      if (!starts_atom()) fail("variant constructor needs a payload");
      auto e = node(ExprKind::Variant, "mk" + sym_name(ctor));
      e->var = ctor;
      e->a = atom();
      return e;
    }
    ExprPtr f = atom();
    while (starts_atom() && !at(Tok::Ctor)) f = mk_app(std::move(f), atom());
    // one trailing constructor argument: f (Ctor x) must be parenthesized,
    // but `f Ctor` alone is rejected above anyway.
    return f;
  }

  ExprPtr atom() {
    ExprPtr e = atom_base();
    while (at(Tok::Dot)) {
      ++pos_;
      Token l = expect(Tok::Ident, "record label");
      auto p = node(ExprKind::Proj, "proj" + l.text);
      p->a = std::move(e);
      p->var = intern(l.text);
      e = std::move(p);
    }
    return e;
  }

  ExprPtr mk_typelit(TypePtr t) {
    auto e = node(ExprKind::TypeLit, "ty");
    e->type = std::move(t);
    return e;
  }

  ExprPtr atom_base() {
    switch (cur().kind) {
      case Tok::Int: {
        int64_t v = cur().ival;
        ++pos_;
        return mk_int(v);
      }
      case Tok::KwTrue: ++pos_; return mk_bool(true);
      case Tok::KwFalse: ++pos_; return mk_bool(false);
      case Tok::KwError: ++pos_; return node(ExprKind::Error, "error");
      case Tok::Ident: {
        reject_instrumentation_ident(cur());
        Symbol s = intern(cur().text);
        ++pos_;
        return mk_var(s);
      }
      case Tok::KwInt: case Tok::KwBool: case Tok::KwList: case Tok::KwMu:
      case Tok::KwForall: case Tok::PolyVar:
        return mk_typelit(parse_type_atom());
      case Tok::LBracket: {
        ++pos_;
        auto e = node(ExprKind::List, "listlit");
        if (!at(Tok::RBracket)) {
          e->elems.push_back(expr());
          while (eat(Tok::Semi)) e->elems.push_back(expr());
        }
        expect(Tok::RBracket, "']'");
        return e;
      }
      case Tok::LBrace: {
        // { l = ... } is a record literal; otherwise a type ({ l : t }, { t | p }).
        if (peek().kind == Tok::Ident && peek(2).kind == Tok::Eq) {
          ++pos_;
          auto e = node(ExprKind::Record, "rec");
          while (!at(Tok::RBrace)) {
            Token l = expect(Tok::Ident, "record label");
            Symbol s = intern(l.text);
            for (auto& f : e->fields)
              if (f.first == s) throw ParseError("duplicate record label", l.line, l.col);
            expect(Tok::Eq, "'='");
            e->fields.emplace_back(s, expr());
            if (!eat(Tok::Semi)) break;
          }
          expect(Tok::RBrace, "'}'");
          return e;
        }
        return mk_typelit(parse_type_atom());
      }
      case Tok::LParen: {
        size_t save = pos_;
        long save_counter = counter_;
        ++pos_;
        try {
          ExprPtr e = expr();
          expect(Tok::RParen, "')'");
          return e;
        } catch (const RejectedConstruct&) {
          throw;
        } catch (const ParseError&) {
          pos_ = save;
          counter_ = save_counter;
        }
        ++pos_;
        TypePtr t = parse_type();
        expect(Tok::RParen, "')'");
        return mk_typelit(std::move(t));
      }
      default:
        fail("expected an expression");
    }
  }

  // ---- types ----

  TypePtr parse_type() {
    // sum level: variant arms separated by ||
    TypePtr first = parse_type_prod();
    if (!at(Tok::BarBar)) return first;
    auto v = mk_type(TypeKind::Variant);
    v->variants.push_back(to_variant_arm(first));
    while (eat(Tok::BarBar)) v->variants.push_back(to_variant_arm(parse_type_prod()));
    check_distinct_ctors(v);
    return v;
  }

  VariantArm to_variant_arm(const TypePtr& t) {
    if (t->kind != TypeKind::Variant || t->variants.size() != 1)
      fail("variant type arms must look like 'Ctor of type'");
    return t->variants[0];
  }

  void check_distinct_ctors(const TypePtr& v) {
    for (size_t i = 0; i < v->variants.size(); ++i)
      for (size_t j = i + 1; j < v->variants.size(); ++j)
        if (v->variants[i].ctor == v->variants[j].ctor)
          fail("variant constructors must be distinct");
  }

  TypePtr parse_type_prod() {
    TypePtr first = parse_type_arrow();
    if (!at(Tok::AmpAmp)) return first;
    auto isect = mk_type(TypeKind::Intersect);
    isect->clauses.push_back(to_intersect_arm(first));
    while (eat(Tok::AmpAmp)) isect->clauses.push_back(to_intersect_arm(parse_type_arrow()));
    for (size_t i = 0; i < isect->clauses.size(); ++i)
      for (size_t j = i + 1; j < isect->clauses.size(); ++j)
        if (isect->clauses[i].ctor == isect->clauses[j].ctor)
          fail("intersection clauses must have distinct variant constructors");
    return isect;
  }

  IntersectArm to_intersect_arm(const TypePtr& t) {
    if (t->kind == TypeKind::Arrow && t->a->kind == TypeKind::Variant && t->a->variants.size() == 1)
      return {t->a->variants[0].ctor, t->a->variants[0].payload, t->b};
    fail("intersection clauses must look like '(Ctor of type) -> type'");
  }

  TypePtr parse_type_arrow() {
    // dependent arrow: ( x : t ) -> t
    if (at(Tok::LParen) && peek().kind == Tok::Ident && peek(2).kind == Tok::Colon) {
      size_t save = pos_;
      long save_counter = counter_;
      ++pos_;
      Token x = expect(Tok::Ident, "identifier");
      expect(Tok::Colon, "':'");
      TypePtr dom = parse_type();
      expect(Tok::RParen, "')'");
      if (at(Tok::Arrow)) {
        ++pos_;
        auto d = mk_type(TypeKind::Dep);
        d->var = intern(x.text);
        d->a = std::move(dom);
        d->b = parse_type_arrow();
        return d;
      }
      pos_ = save;
      counter_ = save_counter;
    }
    TypePtr dom = parse_type_app();
    if (eat(Tok::Arrow)) {
      auto a = mk_type(TypeKind::Arrow);
      a->a = std::move(dom);
      a->b = parse_type_arrow();
      return a;
    }
    return dom;
  }

  // Variant arm, or a type-level application treated as an expression.
  TypePtr parse_type_app() {
    if (at(Tok::Ctor)) {
      auto v = mk_type(TypeKind::Variant);
      VariantArm arm;
      arm.ctor = intern(cur().text);
      ++pos_;
      eat(Tok::KwOf);
      arm.payload = parse_type_atom();
      v->variants.push_back(arm);
      return v;
    }
    TypePtr t = parse_type_atom();
    // Application of a type-level function: (mk_rec n), (pair int bool).
    if (starts_atom() && !at(Tok::Ctor)) {
      ExprPtr f = type_to_expr(t);
      while (starts_atom() && !at(Tok::Ctor)) f = mk_app(std::move(f), atom());
      auto e = mk_type(TypeKind::ExprPos);
      e->pred = std::move(f);
      return e;
    }
    return t;
  }

  ExprPtr type_to_expr(const TypePtr& t) {
    if (t->kind == TypeKind::Var) return mk_var(t->var);
    if (t->kind == TypeKind::ExprPos) return t->pred;
    return mk_typelit(t);
  }

  TypePtr parse_type_atom() {
    switch (cur().kind) {
      case Tok::KwInt: ++pos_; return mk_type(TypeKind::Int);
      case Tok::KwBool: ++pos_; return mk_type(TypeKind::Bool);
      case Tok::PolyVar: {
        auto t = mk_type(TypeKind::Poly);
        t->var = intern(cur().text);
        ++pos_;
        return t;
      }
      case Tok::Ident: {
        reject_instrumentation_ident(cur());
        auto t = mk_type(TypeKind::Var);
        t->var = intern(cur().text);
        ++pos_;
        return t;
      }
      case Tok::KwList: {
        ++pos_;
        auto t = mk_type(TypeKind::List);
        t->a = parse_type_atom();
        return t;
      }
      case Tok::LBracket: {
        ++pos_;
        auto t = mk_type(TypeKind::List);
        t->a = parse_type();
        expect(Tok::RBracket, "']'");
        return t;
      }
      case Tok::KwMu: {
        ++pos_;
        Token b = expect(Tok::Ident, "recursion binder");
        expect(Tok::Dot, "'.'");
        auto t = mk_type(TypeKind::Mu);
        t->var = intern(b.text);
        t->a = parse_type();
        return t;
      }
      case Tok::KwForall: {
        ++pos_;
        auto t = mk_type(TypeKind::Forall);
        while (at(Tok::PolyVar)) {
          t->foralls.push_back(intern(cur().text));
          ++pos_;
        }
        if (t->foralls.empty()) fail("forall needs at least one type variable");
        expect(Tok::Dot, "'.'");
        t->a = parse_type();
        return t;
      }
      case Tok::LBrace: {
        ++pos_;
        if (at(Tok::Ident) && peek().kind == Tok::Colon) {
          auto t = mk_type(TypeKind::Record);
          while (!at(Tok::RBrace)) {
            Token l = expect(Tok::Ident, "record label");
            Symbol s = intern(l.text);
            for (auto& f : t->fields)
              if (f.first == s) throw ParseError("duplicate label in record type", l.line, l.col);
            expect(Tok::Colon, "':'");
            t->fields.emplace_back(s, parse_type());
            if (!eat(Tok::Semi)) break;
          }
          expect(Tok::RBrace, "'}'");
          return t;
        }
        auto t = mk_type(TypeKind::Refine);
        t->a = parse_type();
        expect(Tok::Bar, "'|'");
        t->pred = expr();
        expect(Tok::RBrace, "'}'");
        return t;
      }
      case Tok::LParen: {
        ++pos_;
        TypePtr t = parse_type();
        expect(Tok::RParen, "')'");
        return t;
      }
      default:
        fail("expected a type");
    }
  }
};

}  // namespace detail

// Parses a surface program. Surface sugar is expanded here: untyped `let` to
// application, `let rec` through the fixed-point combinator, assert/assume to
// conditionals, derived comparison operators to ==/</xor.
inline ExprPtr parse(const std::string& source) {
  detail::Parser p(source);
  return p.parse_program();
}

}  // namespace bluejay
