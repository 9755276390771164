#pragma once

#include <functional>
#include <map>
#include <unordered_map>

#include "bluejay/ast.hpp"
#include "bluejay/render.hpp"

namespace bluejay {

struct IllFormedType : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstrumentConfig {
  bool wrap_enabled = true;
  bool guard_primitives = true;
};

struct ObsPathElem {
  enum class Kind { Dom, Cod, Field, Arm, Elem };
  Kind kind;
  Symbol name = 0;  // Field label / Arm constructor
};
using ObsPath = std::vector<ObsPathElem>;

// One embedded check site: the binder holding the value under test, the
// binder holding that test's boolean outcome, the owning declaration, and
// where in the declared type the test sits.
struct ObsPoint {
  Symbol obs_binder = 0;
  Symbol chk_binder = 0;     // 0 for match-dispatch checks
  Symbol nomatch_of = 0;     // match clause label whose no-arm error implicates this obs
  int decl = -1;             // -1: embedding not owned by a declaration
  ObsPath path;
};

struct DeclInfo {
  Symbol name = 0;
  std::string found_at;
  std::string expected;
  TypePtr type;              // forall-closed declared type
  Symbol tyerr_label = 0;    // ERROR clause taken when the check returns false
  Symbol enter_binder = 0;   // bound just before this declaration's check runs
};

struct Instrumented {
  ExprPtr program;
  std::vector<DeclInfo> decls;
  std::vector<ObsPoint> obs;
  std::unordered_map<Symbol, int> obs_by_chk;      // chk binder -> obs index
  std::unordered_map<Symbol, int> obs_by_nomatch;  // match label -> obs index
  std::unordered_map<Symbol, int> error_owner;     // generated ERROR/match label -> decl
  std::unordered_map<Symbol, std::string> prim_sites;  // guard ERROR label -> op text
};

namespace detail {

inline const Symbol SYM_GEN = intern("gen");
inline const Symbol SYM_CHECK = intern("check");
inline const Symbol SYM_WRAP = intern("wrap");

class Instrumenter {
public:
  explicit Instrumenter(InstrumentConfig cfg) : cfg_(cfg) {}

  Instrumented run(const ExprPtr& program) {
    ExprPtr p = program;
    if (cfg_.guard_primitives) p = guard(p);
    out_.program = walk(p);
    return std::move(out_);
  }

  // Exposed separately: wraps each primitive application in a class dispatch.
  ExprPtr guard_only(const ExprPtr& program) { return guard(program); }

  // Builds the gen/check/wrap record for a closed type.
  ExprPtr embed_closed(const TypePtr& t) { return embed(t, {}, {}); }

private:
  using TypeEnv = std::map<Symbol, std::function<ExprPtr(const ObsPath&)>>;

  InstrumentConfig cfg_;
  Instrumented out_;
  long counter_ = 0;
  int32_t alpha_counter_ = 0;
  int cur_decl_ = -1;

  // ---- node builders ----
  Symbol lab(const std::string& hint) {
    return intern(hint + "$i" + std::to_string(++counter_));
  }
  Symbol fresh(const std::string& hint) {
    return intern(hint + "$s" + std::to_string(++counter_));
  }
  ExprPtr node(ExprKind k, const std::string& hint) {
    auto e = mk_expr(k);
    e->label = lab(hint);
    return e;
  }
  ExprPtr V(Symbol s) { auto e = node(ExprKind::Var, sym_name(s)); e->var = s; return e; }
  ExprPtr I(int64_t v) { auto e = node(ExprKind::Int, "lit"); e->int_val = v; return e; }
  ExprPtr B(bool v) { auto e = node(ExprKind::Bool, "lit"); e->bool_val = v; return e; }
  ExprPtr FUN(Symbol p, ExprPtr body) {
    auto e = node(ExprKind::Fun, "fun");
    e->var = p;
    e->a = std::move(body);
    return e;
  }
  ExprPtr APP(ExprPtr f, ExprPtr a) {
    auto e = node(ExprKind::App, "app");
    e->a = std::move(f);
    e->b = std::move(a);
    return e;
  }
  ExprPtr LET(Symbol x, ExprPtr rhs, ExprPtr body) {
    auto e = node(ExprKind::Let, "let");
    e->var = x;
    e->a = std::move(rhs);
    e->b = std::move(body);
    return e;
  }
  ExprPtr IF(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = node(ExprKind::If, "if");
    e->a = std::move(c);
    e->b = std::move(t);
    e->c = std::move(f);
    return e;
  }
  ExprPtr BIN(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = node(ExprKind::Bin, "bin");
    e->op = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  ExprPtr PAT(ExprPtr s, Pattern p) {
    auto e = node(ExprKind::PatTest, "tst");
    e->a = std::move(s);
    e->pat = std::move(p);
    return e;
  }
  ExprPtr PROJ(ExprPtr r, Symbol l) {
    auto e = node(ExprKind::Proj, "proj");
    e->a = std::move(r);
    e->var = l;
    return e;
  }
  ExprPtr ERR(const std::string& hint) {
    auto e = node(ExprKind::Error, hint);
    if (cur_decl_ >= 0) out_.error_owner[e->label] = cur_decl_;
    return e;
  }
  ExprPtr MZERO() { return node(ExprKind::MZero, "mzero"); }
  ExprPtr PICK(bool boolean) {
    return node(boolean ? ExprKind::PickB : ExprKind::PickI, boolean ? "pickb" : "picki");
  }
  ExprPtr UNTOUCH(int32_t alpha) {
    auto e = node(ExprKind::Untouchable, "opaque");
    e->alpha = alpha;
    return e;
  }
  ExprPtr POLYTEST(ExprPtr s, int32_t alpha) {
    auto e = node(ExprKind::PolyTest, "polytst");
    e->a = std::move(s);
    e->alpha = alpha;
    return e;
  }
  ExprPtr RETAG(ExprPtr r, std::vector<Symbol> labels) {
    auto e = node(ExprKind::Retag, "retag");
    e->a = std::move(r);
    e->labelset = std::move(labels);
    return e;
  }
  ExprPtr RECORD(std::vector<std::pair<Symbol, ExprPtr>> fields) {
    auto e = node(ExprKind::Record, "record");
    e->fields = std::move(fields);
    return e;
  }
  ExprPtr VARIANT(Symbol ctor, ExprPtr payload) {
    auto e = node(ExprKind::Variant, "mk" + sym_name(ctor));
    e->var = ctor;
    e->a = std::move(payload);
    return e;
  }
  ExprPtr MATCH(ExprPtr scrut, std::vector<MatchArm> arms) {
    auto e = node(ExprKind::Match, "dispatch");
    e->a = std::move(scrut);
    e->arms = std::move(arms);
    if (cur_decl_ >= 0) out_.error_owner[e->label] = cur_decl_;
    return e;
  }
  ExprPtr LIST0() { return node(ExprKind::List, "nil"); }
  ExprPtr CONS(ExprPtr h, ExprPtr t) {
    auto e = node(ExprKind::Cons, "cons");
    e->a = std::move(h);
    e->b = std::move(t);
    return e;
  }
  ExprPtr HEAD(ExprPtr l) { auto e = node(ExprKind::ListHead, "hd"); e->a = std::move(l); return e; }
  ExprPtr TAIL(ExprPtr l) { auto e = node(ExprKind::ListTail, "tl"); e->a = std::move(l); return e; }

  ExprPtr GEN_OF(ExprPtr emb) { return APP(PROJ(std::move(emb), SYM_GEN), I(0)); }
  ExprPtr CHECK_OF(ExprPtr emb, ExprPtr arg) {
    return APP(PROJ(std::move(emb), SYM_CHECK), std::move(arg));
  }
  ExprPtr WRAP_OF(ExprPtr emb, ExprPtr arg) {
    return APP(PROJ(std::move(emb), SYM_WRAP), std::move(arg));
  }

  Pattern pat_kind(Pattern::Kind k) { Pattern p; p.kind = k; return p; }
  Pattern pat_ctor(Symbol c, Symbol bind = 0) {
    Pattern p;
    p.kind = Pattern::Kind::Variant;
    p.ctor = c;
    p.bind_a = bind;
    return p;
  }
  Pattern pat_labels(std::vector<Symbol> ls) {
    Pattern p;
    p.kind = Pattern::Kind::Record;
    p.labels = std::move(ls);
    return p;
  }

  // fun f -> (fun x -> f (fun v -> x x v)) (fun x -> f (fun v -> x x v))
  ExprPtr Z() {
    Symbol f = fresh("zf");
    auto half = [&]() {
      Symbol x = fresh("zx"), v = fresh("zv");
      return FUN(x, APP(V(f), FUN(v, APP(APP(V(x), V(x)), V(v)))));
    };
    return FUN(f, APP(half(), half()));
  }

  // Registers an (observed value, check outcome) pair and builds
  //   let obs = <scrut> in let chk = <test(obs)> in <body(obs, chk)>
  struct ObsPair {
    Symbol obs, chk;
  };
  ObsPair new_obs(const ObsPath& path) {
    ObsPoint pt;
    pt.obs_binder = fresh("obs");
    pt.chk_binder = fresh("chk");
    pt.decl = cur_decl_;
    pt.path = path;
    out_.obs.push_back(pt);
    out_.obs_by_chk[pt.chk_binder] = int(out_.obs.size()) - 1;
    return {pt.obs_binder, pt.chk_binder};
  }
  void register_match_obs(Symbol obs_binder, Symbol match_label, const ObsPath& path) {
    ObsPoint pt;
    pt.obs_binder = obs_binder;
    pt.nomatch_of = match_label;
    pt.decl = cur_decl_;
    pt.path = path;
    out_.obs.push_back(pt);
    out_.obs_by_nomatch[match_label] = int(out_.obs.size()) - 1;
  }

  // ---- the type embedding ----

  ObsPath extend(ObsPath p, ObsPathElem::Kind k, Symbol name = 0) {
    p.push_back({k, name});
    return p;
  }

  ExprPtr poly_embedding(int32_t alpha, const ObsPath& path) {
    Symbol u = fresh("u"), e = fresh("e"), w = fresh("w");
    ObsPair ob = new_obs(path);
    ExprPtr check = FUN(e, LET(ob.obs, V(e), LET(ob.chk, POLYTEST(V(ob.obs), alpha), V(ob.chk))));
    return RECORD({{SYM_GEN, FUN(u, UNTOUCH(alpha))},
                   {SYM_CHECK, std::move(check)},
                   {SYM_WRAP, FUN(w, V(w))}});
  }

  // For implicitly quantified variables inside use wrappers: without an
  // instantiation there is nothing to check a use against.
  ExprPtr permissive_poly_embedding(int32_t alpha) {
    Symbol u = fresh("u"), e = fresh("e"), w = fresh("w");
    return RECORD({{SYM_GEN, FUN(u, UNTOUCH(alpha))},
                   {SYM_CHECK, FUN(e, B(true))},
                   {SYM_WRAP, FUN(w, V(w))}});
  }

  ExprPtr embed(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    switch (t->kind) {
      case TypeKind::Int:
      case TypeKind::Bool:
        return embed_base(t->kind == TypeKind::Int, path);
      case TypeKind::Poly:
      case TypeKind::Var: {
        auto it = env.find(t->var);
        if (it != env.end()) return it->second(path);
        if (t->kind == TypeKind::Poly)
          throw IllFormedType("unbound type variable '" + sym_name(t->var));
        return V(t->var);  // a first-class type held in an ordinary variable
      }
      case TypeKind::Arrow:
        return embed_arrow(0, t->a, t->b, env, path);
      case TypeKind::Dep:
        return embed_arrow(t->var, t->a, t->b, env, path);
      case TypeKind::Refine:
        return embed_refine(t, env, path);
      case TypeKind::Forall:
        return embed_forall(t, env, path);
      case TypeKind::Variant:
        return embed_variant(t, env, path);
      case TypeKind::Intersect:
        return embed_intersect(t, env, path);
      case TypeKind::Record:
        return embed_record(t, env, path);
      case TypeKind::Mu:
        return embed_mu(t, env, path);
      case TypeKind::List:
        return embed_list(t, env, path);
      case TypeKind::ExprPos:
        return relabel(walk(t->pred));
    }
    throw IllFormedType("unhandled type form");
  }

  ExprPtr embed_base(bool is_int, const ObsPath& path) {
    Symbol u = fresh("u"), e = fresh("e"), w = fresh("w");
    ObsPair ob = new_obs(path);
    Pattern p = pat_kind(is_int ? Pattern::Kind::Int : Pattern::Kind::Bool);
    ExprPtr check = FUN(e, LET(ob.obs, V(e), LET(ob.chk, PAT(V(ob.obs), p), V(ob.chk))));
    return RECORD({{SYM_GEN, FUN(u, PICK(!is_int))},
                   {SYM_CHECK, std::move(check)},
                   {SYM_WRAP, FUN(w, V(w))}});
  }

  // Function and dependent function types. The domain embedding is shared;
  // the codomain is a function of the (dependent) parameter so it embeds once.
  ExprPtr embed_arrow(Symbol dep_var, const TypePtr& dom, const TypePtr& cod,
                      const TypeEnv& env, const ObsPath& path) {
    Symbol t1 = fresh("tdom"), t2f = fresh("tcodf");
    Symbol xname = dep_var ? dep_var : fresh("x");

    ExprPtr dom_emb = embed(dom, env, extend(path, ObsPathElem::Kind::Dom));
    ExprPtr cod_fun = FUN(xname, embed(cod, env, extend(path, ObsPathElem::Kind::Cod)));

    // gen: fun _ -> fun arg -> if pick_b then
    //        if dom.check arg then cod(arg).gen else ERROR else cod(arg).gen
    Symbol u = fresh("u"), arg = fresh("arg"), codr = fresh("tcod"), outg = fresh("outg");
    ExprPtr gen_inner =
        LET(codr, APP(V(t2f), V(arg)),
            LET(outg, FUN(fresh("u"), GEN_OF(V(codr))),
                IF(PICK(true),
                   IF(CHECK_OF(V(t1), V(arg)), APP(V(outg), I(0)), ERR("generr")),
                   APP(V(outg), I(0)))));
    ExprPtr gen = FUN(u, FUN(arg, std::move(gen_inner)));

    // check: fun e -> if e ~ fun then let a = dom.gen in cod(a).check (e a) else false
    Symbol e = fresh("e"), carg = fresh("arg"), ccod = fresh("tcod");
    ObsPair ob = new_obs(path);
    ExprPtr check_body =
        IF(V(ob.chk),
           LET(carg, GEN_OF(V(t1)),
               LET(ccod, APP(V(t2f), V(carg)),
                   CHECK_OF(V(ccod), APP(V(ob.obs), V(carg))))),
           B(false));
    ExprPtr check =
        FUN(e, LET(ob.obs, V(e),
                   LET(ob.chk, PAT(V(ob.obs), pat_kind(Pattern::Kind::Fun)),
                       std::move(check_body))));

    // wrap: fun e -> fun x' -> if pick_b then
    //          if dom.check x' then cod(x').wrap (e (dom.wrap x')) else ERROR
    //        else cod(x').wrap (e (dom.wrap x'))
    Symbol we = fresh("e"), wx = fresh("xw"), wcod = fresh("tcod"), wres = fresh("wres");
    ExprPtr wrap_call = FUN(fresh("u"), WRAP_OF(V(wcod), APP(V(we), WRAP_OF(V(t1), V(wx)))));
    ExprPtr wrap_inner =
        LET(wcod, APP(V(t2f), V(wx)),
            LET(wres, std::move(wrap_call),
                IF(PICK(true),
                   IF(CHECK_OF(V(t1), V(wx)), APP(V(wres), I(0)), ERR("wraperr")),
                   APP(V(wres), I(0)))));
    ExprPtr wrap = FUN(we, FUN(wx, std::move(wrap_inner)));

    return LET(t1, std::move(dom_emb),
               LET(t2f, std::move(cod_fun),
                   RECORD({{SYM_GEN, std::move(gen)},
                           {SYM_CHECK, std::move(check)},
                           {SYM_WRAP, std::move(wrap)}})));
  }

  ExprPtr embed_refine(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    Symbol tb = fresh("tbase");
    ExprPtr base = embed(t->a, env, path);

    // check: fun e -> base.check e and (pred e)
    Symbol e = fresh("e"), bres = fresh("bres");
    ObsPair ob = new_obs(path);
    ExprPtr pred1 = relabel(walk(t->pred));
    ExprPtr check =
        FUN(e, LET(ob.obs, V(e),
                   LET(bres, CHECK_OF(V(tb), V(ob.obs)),
                       LET(ob.chk, APP(std::move(pred1), V(ob.obs)),
                           BIN(BinOp::And, V(bres), V(ob.chk))))));

    // gen: fun _ -> let gend = base.gen in if pred gend then gend else mzero
    Symbol u = fresh("u"), gend = fresh("gend");
    ExprPtr pred2 = relabel(walk(t->pred));
    ExprPtr gen = FUN(u, LET(gend, GEN_OF(V(tb)),
                             IF(APP(std::move(pred2), V(gend)), V(gend), MZERO())));

    Symbol w = fresh("w");
    ExprPtr wrap = FUN(w, WRAP_OF(V(tb), V(w)));

    return LET(tb, std::move(base),
               RECORD({{SYM_GEN, std::move(gen)},
                       {SYM_CHECK, std::move(check)},
                       {SYM_WRAP, std::move(wrap)}}));
  }

  // Two kinds of quantifier: the leading explicit_foralls binders come from
  // (type a ...) parameters, so the function takes type arguments at run time
  // and definition checking threads untouchables through them. Implicitly
  // quantified variables have no argument position: they embed at their
  // untouchable singletons directly (the core checker/generator), and use
  // wrappers treat them permissively since uses carry no instantiation.
  ExprPtr embed_forall(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    const TypePtr& body = t->a;
    if (body->kind != TypeKind::Arrow && body->kind != TypeKind::Dep)
      throw IllFormedType("polymorphic types must quantify over a function type");
    size_t n_explicit = size_t(std::max(0, t->explicit_foralls));
    if (n_explicit > t->foralls.size())
      throw IllFormedType("more explicit type parameters than quantified variables");

    std::vector<int32_t> alphas;
    std::vector<Symbol> params;  // explicit binders only
    for (Symbol v : t->foralls) {
      alphas.push_back(++alpha_counter_);
      if (params.size() < n_explicit) params.push_back(fresh("tp" + sym_name(v)));
    }

    TypeEnv check_env = env, gen_env = env, wrap_env = env;
    for (size_t i = 0; i < t->foralls.size(); ++i) {
      int32_t a = alphas[i];
      check_env[t->foralls[i]] = [this, a](const ObsPath& pp) { return poly_embedding(a, pp); };
      if (i < n_explicit) {
        Symbol p = params[i];
        gen_env[t->foralls[i]] = [this, p](const ObsPath&) { return V(p); };
        wrap_env[t->foralls[i]] = [this, p](const ObsPath&) { return V(p); };
      } else {
        gen_env[t->foralls[i]] = [this, a](const ObsPath& pp) { return poly_embedding(a, pp); };
        wrap_env[t->foralls[i]] = [this, a](const ObsPath&) {
          return permissive_poly_embedding(a);
        };
      }
    }

    Symbol tchk = fresh("tmono");
    ExprPtr chk_emb = embed(body, check_env, path);

    // check: fun e -> if e ~ fun then tmono.check (e V(a1) ... V(ak)) else false
    Symbol e = fresh("e");
    ObsPair ob = new_obs(path);
    ExprPtr inst = V(ob.obs);
    for (size_t i = 0; i < n_explicit; ++i) inst = APP(std::move(inst), UNTOUCH(alphas[i]));
    ExprPtr check =
        FUN(e, LET(ob.obs, V(e),
                   LET(ob.chk, PAT(V(ob.obs), pat_kind(Pattern::Kind::Fun)),
                       IF(V(ob.chk), CHECK_OF(V(tchk), std::move(inst)), B(false)))));

    // gen: fun _ -> fun a1 ... ak -> [[body]] .gen 0, the explicit type
    // variables resolving to the received type arguments
    Symbol u = fresh("u");
    ExprPtr gen_body = GEN_OF(embed(body, gen_env, path));
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      gen_body = FUN(*it, std::move(gen_body));
    ExprPtr gen = FUN(u, std::move(gen_body));

    // wrap: fun e -> fun a1 ... ak -> [[body]] .wrap (fun z -> e a1 ... ak z)
    Symbol we = fresh("e"), z = fresh("z");
    ExprPtr passthrough = V(we);
    for (Symbol p : params) passthrough = APP(std::move(passthrough), V(p));
    if (!params.empty()) passthrough = FUN(z, APP(std::move(passthrough), V(z)));
    ExprPtr wrap_body = WRAP_OF(embed(body, wrap_env, path), std::move(passthrough));
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      wrap_body = FUN(*it, std::move(wrap_body));
    ExprPtr wrap = FUN(we, std::move(wrap_body));

    return LET(tchk, std::move(chk_emb),
               RECORD({{SYM_GEN, std::move(gen)},
                       {SYM_CHECK, std::move(check)},
                       {SYM_WRAP, std::move(wrap)}}));
  }

  ExprPtr embed_variant(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    for (size_t i = 0; i < t->variants.size(); ++i)
      for (size_t j = i + 1; j < t->variants.size(); ++j)
        if (t->variants[i].ctor == t->variants[j].ctor)
          throw IllFormedType("variant constructors must be distinct");

    std::vector<Symbol> embs;
    ExprPtr result;
    // check: match e with V1 v1 -> t1.check v1 | ... (no default: a value
    // outside every constructor fails by unmatched dispatch)
    Symbol e = fresh("e");
    std::vector<MatchArm> check_arms;
    for (const auto& arm : t->variants) {
      Symbol v = fresh("pay");
      Symbol te = fresh("tv" + sym_name(arm.ctor));
      embs.push_back(te);
      check_arms.push_back({pat_ctor(arm.ctor, v), CHECK_OF(V(te), V(v))});
    }
    Symbol obs_binder = fresh("obs");
    ExprPtr dispatch = MATCH(V(obs_binder), std::move(check_arms));
    register_match_obs(obs_binder, dispatch->label, path);
    ExprPtr check = FUN(e, LET(obs_binder, V(e), std::move(dispatch)));

    // gen: if pick_b then V1(t1.gen) else if pick_b ... else Vn(tn.gen)
    Symbol u = fresh("u");
    ExprPtr gen_chain = VARIANT(t->variants.back().ctor, GEN_OF(V(embs.back())));
    for (size_t i = t->variants.size() - 1; i-- > 0;)
      gen_chain = IF(PICK(true), VARIANT(t->variants[i].ctor, GEN_OF(V(embs[i]))),
                     std::move(gen_chain));
    ExprPtr gen = FUN(u, std::move(gen_chain));

    // wrap: match e with Vi vi -> Vi (ti.wrap vi)
    Symbol w = fresh("w");
    std::vector<MatchArm> wrap_arms;
    for (size_t i = 0; i < t->variants.size(); ++i) {
      Symbol v = fresh("pay");
      wrap_arms.push_back({pat_ctor(t->variants[i].ctor, v),
                           VARIANT(t->variants[i].ctor, WRAP_OF(V(embs[i]), V(v)))});
    }
    ExprPtr wrap = FUN(w, MATCH(V(w), std::move(wrap_arms)));

    result = RECORD({{SYM_GEN, std::move(gen)},
                     {SYM_CHECK, std::move(check)},
                     {SYM_WRAP, std::move(wrap)}});
    for (size_t i = t->variants.size(); i-- > 0;)
      result = LET(embs[i],
                   embed(t->variants[i].payload, env,
                         extend(path, ObsPathElem::Kind::Arm, t->variants[i].ctor)),
                   std::move(result));
    return result;
  }

  ExprPtr embed_intersect(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    for (size_t i = 0; i < t->clauses.size(); ++i)
      for (size_t j = i + 1; j < t->clauses.size(); ++j)
        if (t->clauses[i].ctor == t->clauses[j].ctor)
          throw IllFormedType("intersection clauses must have distinct variant constructors");

    size_t n = t->clauses.size();
    std::vector<Symbol> doms(n), cods(n);
    for (size_t i = 0; i < n; ++i) {
      doms[i] = fresh("tdom" + sym_name(t->clauses[i].ctor));
      cods[i] = fresh("tcod" + sym_name(t->clauses[i].ctor));
    }

    // check: let i = pick_i in if i == 1 then check-clause-1 e ... else mzero
    Symbol e = fresh("e"), iv = fresh("ix"), scrut = fresh("isc");
    ExprPtr chain = MZERO();
    for (size_t i = n; i-- > 0;) {
      const auto& cl = t->clauses[i];
      ObsPath cpath = extend(path, ObsPathElem::Kind::Arm, cl.ctor);
      // one clause's function check, with the variant-domain argument
      Symbol carg = fresh("arg");
      ObsPair cob = new_obs(cpath);
      ExprPtr clause_chk =
          LET(cob.obs, V(scrut),
              LET(cob.chk, PAT(V(cob.obs), pat_kind(Pattern::Kind::Fun)),
                  IF(V(cob.chk),
                     LET(carg, VARIANT(cl.ctor, GEN_OF(V(doms[i]))),
                         CHECK_OF(V(cods[i]), APP(V(cob.obs), V(carg)))),
                     B(false))));
      ExprPtr cond = BIN(BinOp::Eq, V(iv), I(int64_t(i) + 1));
      chain = IF(std::move(cond), std::move(clause_chk), std::move(chain));
    }
    ExprPtr check = FUN(e, LET(scrut, V(e), LET(iv, PICK(false), std::move(chain))));

    // gen: fun x -> match x with Vi vi -> nondeterministic check then cod gen | _ -> ERROR
    Symbol u = fresh("u"), gx = fresh("xg");
    std::vector<MatchArm> gen_arms;
    for (size_t i = 0; i < n; ++i) {
      Symbol v = fresh("pay");
      ExprPtr arm_body = IF(PICK(true),
                            IF(CHECK_OF(V(doms[i]), V(v)), GEN_OF(V(cods[i])), ERR("generr")),
                            GEN_OF(V(cods[i])));
      gen_arms.push_back({pat_ctor(t->clauses[i].ctor, v), std::move(arm_body)});
    }
    gen_arms.push_back({pat_kind(Pattern::Kind::Any), ERR("generr")});
    ExprPtr gen = FUN(u, FUN(gx, MATCH(V(gx), std::move(gen_arms))));

    // wrap: fun x -> match x with Vi vi -> nondeterministic check then
    //         codi.wrap (e (Vi (domi.wrap vi)))
    Symbol we = fresh("e"), wx = fresh("xw");
    std::vector<MatchArm> wrap_arms;
    for (size_t i = 0; i < n; ++i) {
      Symbol v = fresh("pay");
      auto call = [&]() {
        return WRAP_OF(V(cods[i]),
                       APP(V(we), VARIANT(t->clauses[i].ctor, WRAP_OF(V(doms[i]), V(v)))));
      };
      ExprPtr arm_body = IF(PICK(true),
                            IF(CHECK_OF(V(doms[i]), V(v)), call(), ERR("wraperr")),
                            call());
      wrap_arms.push_back({pat_ctor(t->clauses[i].ctor, v), std::move(arm_body)});
    }
    ExprPtr wrap = FUN(we, FUN(wx, MATCH(V(wx), std::move(wrap_arms))));

    ExprPtr result = RECORD({{SYM_GEN, std::move(gen)},
                             {SYM_CHECK, std::move(check)},
                             {SYM_WRAP, std::move(wrap)}});
    for (size_t i = n; i-- > 0;) {
      ObsPath cpath = extend(path, ObsPathElem::Kind::Arm, t->clauses[i].ctor);
      result = LET(cods[i],
                   embed(t->clauses[i].codomain, env, extend(cpath, ObsPathElem::Kind::Cod)),
                   std::move(result));
      result = LET(doms[i],
                   embed(t->clauses[i].domain, env, extend(cpath, ObsPathElem::Kind::Dom)),
                   std::move(result));
    }
    return result;
  }

  ExprPtr embed_record(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    size_t n = t->fields.size();
    std::vector<Symbol> embs(n);
    std::vector<Symbol> labels(n);
    for (size_t i = 0; i < n; ++i) {
      embs[i] = fresh("tf" + sym_name(t->fields[i].first));
      labels[i] = t->fields[i].first;
    }

    // check: fun e -> if e ~ {l1; ...} then nested field checks else false
    Symbol e = fresh("e");
    ObsPair ob = new_obs(path);
    ExprPtr fields_chk = B(true);
    for (size_t i = n; i-- > 0;)
      fields_chk = IF(CHECK_OF(V(embs[i]), PROJ(V(ob.obs), labels[i])),
                      std::move(fields_chk), B(false));
    ExprPtr check = FUN(e, LET(ob.obs, V(e),
                               LET(ob.chk, PAT(V(ob.obs), pat_labels(labels)),
                                   IF(V(ob.chk), std::move(fields_chk), B(false)))));

    // gen: fun _ -> { l1 = t1.gen; ... }
    Symbol u = fresh("u");
    std::vector<std::pair<Symbol, ExprPtr>> gen_fields;
    for (size_t i = 0; i < n; ++i) gen_fields.emplace_back(labels[i], GEN_OF(V(embs[i])));
    ExprPtr gen = FUN(u, RECORD(std::move(gen_fields)));

    // wrap: fun e -> let r = { li = ti.wrap e.li } in retag(r, {l1; ...})
    Symbol w = fresh("w"), rr = fresh("rw");
    std::vector<std::pair<Symbol, ExprPtr>> wrap_fields;
    for (size_t i = 0; i < n; ++i)
      wrap_fields.emplace_back(labels[i], WRAP_OF(V(embs[i]), PROJ(V(w), labels[i])));
    ExprPtr wrap = FUN(w, LET(rr, RECORD(std::move(wrap_fields)), RETAG(V(rr), labels)));

    ExprPtr result = RECORD({{SYM_GEN, std::move(gen)},
                             {SYM_CHECK, std::move(check)},
                             {SYM_WRAP, std::move(wrap)}});
    for (size_t i = n; i-- > 0;)
      result = LET(embs[i],
                   embed(t->fields[i].second, env,
                         extend(path, ObsPathElem::Kind::Field, labels[i])),
                   std::move(result));
    return result;
  }

  // Mu b. t  ==>  (Z (fun self -> fun _ ->
  //   let tf = fun _ -> let b = self 0 in [[t]] in
  //   { gen = fun _ -> (tf 0).gen 0; check = fun e -> (tf 0).check e; ... })) 0
  ExprPtr embed_mu(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    Symbol self = fresh("self"), tf = fresh("tunroll"), beta = fresh("mu" + sym_name(t->var));
    TypeEnv inner = env;
    inner[t->var] = [this, beta](const ObsPath&) { return V(beta); };

    ExprPtr unrolled = LET(beta, APP(V(self), I(0)), embed(t->a, inner, path));
    Symbol u = fresh("u"), ug = fresh("u"), e = fresh("e"), w = fresh("w");
    ExprPtr rec =
        LET(tf, FUN(u, std::move(unrolled)),
            RECORD({{SYM_GEN, FUN(ug, GEN_OF(APP(V(tf), I(0))))},
                    {SYM_CHECK, FUN(e, CHECK_OF(APP(V(tf), I(0)), V(e)))},
                    {SYM_WRAP, FUN(w, WRAP_OF(APP(V(tf), I(0)), V(w)))}}));
    return APP(APP(Z(), FUN(self, FUN(fresh("u"), std::move(rec)))), I(0));
  }

  ExprPtr embed_list(const TypePtr& t, const TypeEnv& env, const ObsPath& path) {
    Symbol te = fresh("telem");
    ExprPtr elem = embed(t->a, env, extend(path, ObsPathElem::Kind::Elem));

    // check: fun e -> (e ~ [] or e ~ _::_) and all elements check
    Symbol e = fresh("e"), self = fresh("self"), l = fresh("l");
    ObsPair ob = new_obs(path);
    ExprPtr loop_body =
        FUN(l, IF(PAT(V(l), pat_kind(Pattern::Kind::EmptyList)), B(true),
                  IF(CHECK_OF(V(te), HEAD(V(l))), APP(V(self), TAIL(V(l))), B(false))));
    ExprPtr loop = APP(Z(), FUN(self, std::move(loop_body)));
    ExprPtr is_list = BIN(BinOp::Or, PAT(V(ob.obs), pat_kind(Pattern::Kind::EmptyList)),
                          PAT(V(ob.obs), pat_kind(Pattern::Kind::Cons)));
    ExprPtr check = FUN(e, LET(ob.obs, V(e),
                               LET(ob.chk, std::move(is_list),
                                   IF(V(ob.chk), APP(std::move(loop), V(ob.obs)), B(false)))));

    // gen: fun _ -> (Z (fun self -> fun _ -> if pick_b then [] else elem.gen :: self 0)) 0
    Symbol u = fresh("u"), gself = fresh("self"), gu = fresh("u");
    ExprPtr gen_loop =
        APP(Z(), FUN(gself, FUN(gu, IF(PICK(true), LIST0(),
                                       CONS(GEN_OF(V(te)), APP(V(gself), I(0)))))));
    ExprPtr gen = FUN(u, APP(std::move(gen_loop), I(0)));

    // wrap: fun e -> map elem.wrap over the spine (anything else passes through)
    Symbol w = fresh("w"), wself = fresh("self"), wl = fresh("l");
    ExprPtr wrap_loop_body =
        FUN(wl, IF(PAT(V(wl), pat_kind(Pattern::Kind::EmptyList)), LIST0(),
                   IF(PAT(V(wl), pat_kind(Pattern::Kind::Cons)),
                      CONS(WRAP_OF(V(te), HEAD(V(wl))), APP(V(wself), TAIL(V(wl)))),
                      V(wl))));
    ExprPtr wrap = FUN(w, APP(APP(Z(), FUN(wself, std::move(wrap_loop_body))), V(w)));

    return LET(te, std::move(elem),
               RECORD({{SYM_GEN, std::move(gen)},
                       {SYM_CHECK, std::move(check)},
                       {SYM_WRAP, std::move(wrap)}}));
  }

  // ---- declaration transformation ----

  void collect_free_polys(const TypePtr& t, std::vector<Symbol>& bound,
                          std::vector<Symbol>& out) {
    if (!t) return;
    auto is_bound = [&](Symbol s) {
      return std::find(bound.begin(), bound.end(), s) != bound.end();
    };
    switch (t->kind) {
      case TypeKind::Poly:
        if (!is_bound(t->var) && std::find(out.begin(), out.end(), t->var) == out.end())
          out.push_back(t->var);
        return;
      case TypeKind::Forall: {
        size_t mark = bound.size();
        for (Symbol v : t->foralls) bound.push_back(v);
        collect_free_polys(t->a, bound, out);
        bound.resize(mark);
        return;
      }
      default:
        collect_free_polys(t->a, bound, out);
        collect_free_polys(t->b, bound, out);
        for (const auto& v : t->variants) collect_free_polys(v.payload, bound, out);
        for (const auto& c : t->clauses) {
          collect_free_polys(c.domain, bound, out);
          collect_free_polys(c.codomain, bound, out);
        }
        for (const auto& f : t->fields) collect_free_polys(f.second, bound, out);
        return;
    }
  }

  TypePtr decl_type(const Expr& d) {
    TypePtr t;
    if (d.value_type) {
      t = d.value_type;
    } else {
      t = d.ret_type;
      for (auto it = d.params.rbegin(); it != d.params.rend(); ++it) {
        auto arrow = mk_type(TypeKind::Dep);
        arrow->var = it->name;
        arrow->a = it->type;
        arrow->b = t;
        // Degrade to a plain arrow when the parameter is not referenced.
        if (!type_mentions(t, it->name)) {
          arrow->kind = TypeKind::Arrow;
          arrow->var = 0;
        }
        t = arrow;
      }
    }
    std::vector<Symbol> binders = d.type_params;
    std::vector<Symbol> frees;
    collect_free_polys(t, binders, frees);
    std::vector<Symbol> all = d.type_params;
    all.insert(all.end(), frees.begin(), frees.end());
    if (!all.empty()) {
      auto fa = mk_type(TypeKind::Forall);
      fa->foralls = std::move(all);
      fa->explicit_foralls = int(d.type_params.size());
      fa->a = t;
      t = fa;
    }
    return t;
  }

  static bool expr_mentions(const ExprPtr& e, Symbol name);

  static bool type_mentions(const TypePtr& t, Symbol name) {
    if (!t) return false;
    if ((t->kind == TypeKind::Var || t->kind == TypeKind::Poly) && t->var == name) return true;
    if (t->pred && expr_mentions(t->pred, name)) return true;
    if (type_mentions(t->a, name) || type_mentions(t->b, name)) return true;
    for (const auto& v : t->variants)
      if (type_mentions(v.payload, name)) return true;
    for (const auto& c : t->clauses)
      if (type_mentions(c.domain, name) || type_mentions(c.codomain, name)) return true;
    for (const auto& f : t->fields)
      if (type_mentions(f.second, name)) return true;
    return false;
  }

  std::string decl_found_at(const Expr& d) {
    std::ostringstream os;
    os << "let " << (d.is_rec ? "rec " : "");
    if (d.value_type) {
      os << "(" << sym_name(d.var) << " : " << render_type(d.value_type) << ")";
    } else {
      os << sym_name(d.var);
      if (!d.type_params.empty()) {
        os << " (type";
        for (Symbol s : d.type_params) os << " " << sym_name(s);
        os << ")";
      }
      for (const auto& p : d.params)
        os << " (" << sym_name(p.name) << " : " << render_type(p.type) << ")";
      os << " : " << render_type(d.ret_type);
    }
    std::string rhs = render(d.a);
    os << " = " << (rhs.size() <= 40 ? rhs : "...");
    os << " in " << (d.b->kind == ExprKind::Var ? sym_name(d.b->var) : "...");
    return os.str();
  }

  ExprPtr transform_decl(const Expr& d) {
    TypePtr tau = decl_type(d);

    int idx = int(out_.decls.size());
    DeclInfo info;
    info.name = d.var;
    info.type = tau;
    info.found_at = decl_found_at(d);
    {
      std::ostringstream os;
      detail::render_type(os, *tau, 11);
      info.expected = os.str();
    }
    info.enter_binder = fresh("declenter$" + sym_name(d.var));
    out_.decls.push_back(info);

    int prev_decl = cur_decl_;
    cur_decl_ = idx;

    // raw definition
    ExprPtr raw = walk(d.a);
    if (!d.params.empty() || !d.type_params.empty()) {
      for (auto it = d.params.rbegin(); it != d.params.rend(); ++it)
        raw = FUN(it->name, std::move(raw));
      for (auto it = d.type_params.rbegin(); it != d.type_params.rend(); ++it)
        raw = FUN(*it, std::move(raw));
    }
    if (d.is_rec) raw = APP(Z(), FUN(d.var, std::move(raw)));

    ExprPtr ty_emb = embed(tau, {}, {});

    Symbol rawv = fresh(sym_name(d.var) + "$raw");
    Symbol tyv = fresh(sym_name(d.var) + "$ty");
    Symbol chkv = fresh(sym_name(d.var) + "$chk");

    ExprPtr tyerr = ERR("tyerr$" + sym_name(d.var));
    out_.decls[idx].tyerr_label = tyerr->label;
    out_.error_owner[tyerr->label] = idx;

    cur_decl_ = prev_decl;
    ExprPtr body = walk(d.b);
    cur_decl_ = idx;

    ExprPtr exported = cfg_.wrap_enabled ? WRAP_OF(V(tyv), V(rawv)) : V(rawv);
    ExprPtr out =
        LET(rawv, std::move(raw),
            LET(tyv, std::move(ty_emb),
                LET(info.enter_binder, B(true),
                    LET(chkv, CHECK_OF(V(tyv), V(rawv)),
                        IF(V(chkv),
                           LET(d.var, std::move(exported), std::move(body)),
                           std::move(tyerr))))));
    cur_decl_ = prev_decl;
    return out;
  }

  // ---- program walk ----

  ExprPtr walk(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::LetTyped:
        return transform_decl(*e);
      case ExprKind::TypeLit:
        return embed(e->type, {}, {});
      default: {
        auto out = std::make_shared<Expr>(*e);
        if (out->a) out->a = walk(out->a);
        if (out->b) out->b = walk(out->b);
        if (out->c) out->c = walk(out->c);
        for (auto& arm : out->arms) arm.body = walk(arm.body);
        for (auto& f : out->fields) f.second = walk(f.second);
        for (auto& el : out->elems) el = walk(el);
        return out;
      }
    }
  }

  // Fresh labels for a duplicated user expression.
  ExprPtr relabel(const ExprPtr& e) {
    auto out = std::make_shared<Expr>(*e);
    out->label = lab(sym_name(e->label));
    if (out->a) out->a = relabel(out->a);
    if (out->b) out->b = relabel(out->b);
    if (out->c) out->c = relabel(out->c);
    for (auto& arm : out->arms) arm.body = relabel(arm.body);
    for (auto& f : out->fields) f.second = relabel(f.second);
    for (auto& el : out->elems) el = relabel(el);
    return out;
  }

  // ---- primitive guards ----

  // Types (and the expressions inside them) are not rewritten: their
  // operations fail at their own named clauses already, and reports quote the
  // declared type as written.
  ExprPtr guard(const ExprPtr& e) {
    auto out = std::make_shared<Expr>(*e);
    if (out->a) out->a = guard(out->a);
    if (out->b) out->b = guard(out->b);
    if (out->c) out->c = guard(out->c);
    for (auto& arm : out->arms) arm.body = guard(arm.body);
    for (auto& f : out->fields) f.second = guard(f.second);
    for (auto& el : out->elems) el = guard(el);

    if (out->kind == ExprKind::Bin) return guard_bin(out);
    if (out->kind == ExprKind::Cons) return guard_cons(out);
    return out;
  }

  ExprPtr prim_error(const Expr& site) {
    auto err = node(ExprKind::Error, "primerr");
    out_.prim_sites[err->label] = render(site);
    return err;
  }

  ExprPtr guard_bin(const ExprPtr& b) {
    Symbol ga = fresh("opl"), gb = fresh("opr");
    Pattern::Kind want = (b->op == BinOp::And || b->op == BinOp::Or || b->op == BinOp::Xor)
                             ? Pattern::Kind::Bool
                             : Pattern::Kind::Int;
    auto redo = [&]() {
      auto op = std::make_shared<Expr>(*b);
      op->label = lab("bin");
      op->a = V(ga);
      op->b = V(gb);
      return op;
    };
    auto rhs_dispatch = [&](Pattern::Kind k) {
      return MATCH(V(gb), {{pat_kind(k), redo()}, {pat_kind(Pattern::Kind::Any), prim_error(*b)}});
    };
    ExprPtr dispatch;
    if (b->op == BinOp::Eq) {
      dispatch = MATCH(V(ga), {{pat_kind(Pattern::Kind::Int), rhs_dispatch(Pattern::Kind::Int)},
                               {pat_kind(Pattern::Kind::Bool), rhs_dispatch(Pattern::Kind::Bool)},
                               {pat_kind(Pattern::Kind::Any), prim_error(*b)}});
    } else {
      dispatch = MATCH(V(ga), {{pat_kind(want), rhs_dispatch(want)},
                               {pat_kind(Pattern::Kind::Any), prim_error(*b)}});
    }
    return LET(ga, b->a, LET(gb, b->b, std::move(dispatch)));
  }

  ExprPtr guard_cons(const ExprPtr& c) {
    Symbol gh = fresh("hd"), gt = fresh("tl");
    auto redo = [&]() {
      auto op = std::make_shared<Expr>(*c);
      op->label = lab("cons");
      op->a = V(gh);
      op->b = V(gt);
      return op;
    };
    ExprPtr dispatch = MATCH(V(gt), {{pat_kind(Pattern::Kind::EmptyList), redo()},
                                     {pat_kind(Pattern::Kind::Cons), redo()},
                                     {pat_kind(Pattern::Kind::Any), prim_error(*c)}});
    return LET(gh, c->a, LET(gt, c->b, std::move(dispatch)));
  }
};

inline bool Instrumenter::expr_mentions(const ExprPtr& e, Symbol name) {
  if (!e) return false;
  if (e->kind == ExprKind::Var && e->var == name) return true;
  if (expr_mentions(e->a, name) || expr_mentions(e->b, name) || expr_mentions(e->c, name))
    return true;
  for (const auto& arm : e->arms)
    if (expr_mentions(arm.body, name)) return true;
  for (const auto& f : e->fields)
    if (expr_mentions(f.second, name)) return true;
  for (const auto& el : e->elems)
    if (expr_mentions(el, name)) return true;
  if (e->type && type_mentions(e->type, name)) return true;
  return false;
}

}  // namespace detail

// Rewrites every typed declaration into raw definition + embedded check +
// (optionally) wrapped export, embeds types in expression position, and
// guards primitive operations.
inline Instrumented instrument_program(const ExprPtr& program, InstrumentConfig cfg = {}) {
  detail::Instrumenter ins(cfg);
  return ins.run(program);
}

// The primitive-operation guard alone.
inline ExprPtr guard_primitives(const ExprPtr& program) {
  detail::Instrumenter ins(InstrumentConfig{});
  return ins.guard_only(program);
}

// The gen/check/wrap embedding of a closed type, as an expression.
inline ExprPtr embed_type(const TypePtr& t) {
  detail::Instrumenter ins(InstrumentConfig{});
  return ins.embed_closed(t);
}

}  // namespace bluejay
