#pragma once

#include "bluejay/instrument.hpp"
#include "bluejay/interp.hpp"

namespace bluejay {

struct ErrorReport {
  std::string found_at;
  std::string value_name;
  std::string expected;
  std::string actual;
  int decl = -1;

  std::string text() const {
    std::ostringstream os;
    os << "** Bluejay Type Errors **\n";
    os << "- Found at clause : " << found_at << "\n";
    os << "--------------------\n";
    os << "* Value    : " << value_name << "\n";
    os << "* Expected : " << expected << "\n";
    os << "* Actual   : " << actual << "\n";
    return os.str();
  }
};

namespace detail {

inline std::string describe_shape(const Value& v) {
  if (v.is_int()) return "int";
  if (v.is_bool()) return "bool";
  if (v.is_closure()) return "fun";
  return render_value(v);
}

// Re-renders the declared type with the sub-type at `path` replaced by the
// observed shape. nullopt when the path crosses a form that cannot be
// addressed syntactically (Mu bodies, type expressions, ...).
inline std::optional<std::string> render_actual(const TypeExpr& t, const ObsPath& path,
                                                size_t i, const std::string& repl) {
  if (t.kind == TypeKind::Forall) return render_actual(*t.a, path, i, repl);
  if (i == path.size()) return repl;
  switch (t.kind) {
    case TypeKind::Refine:
      return render_actual(*t.a, path, i, repl);  // transparent for paths
    case TypeKind::Arrow:
    case TypeKind::Dep: {
      std::optional<std::string> dom, cod;
      if (path[i].kind == ObsPathElem::Kind::Dom) {
        dom = render_actual(*t.a, path, i + 1, repl);
        if (!dom) return std::nullopt;
      }
      if (path[i].kind == ObsPathElem::Kind::Cod) {
        cod = render_actual(*t.b, path, i + 1, repl);
        if (!cod) return std::nullopt;
      }
      if (!dom && !cod) return std::nullopt;
      std::ostringstream os;
      os << "(";
      if (t.kind == TypeKind::Dep) os << "(" << sym_name(t.var) << " : ";
      if (dom) os << *dom;
      else render_type(os, *t.a, t.kind == TypeKind::Dep ? 0 : 11);
      if (t.kind == TypeKind::Dep) os << ")";
      os << " -> ";
      if (cod) os << *cod;
      else render_type(os, *t.b, 11);
      os << ")";
      return os.str();
    }
    case TypeKind::Record: {
      if (path[i].kind != ObsPathElem::Kind::Field) return std::nullopt;
      std::ostringstream os;
      os << "{";
      bool first = true;
      for (const auto& [l, ft] : t.fields) {
        if (!first) os << "; ";
        first = false;
        os << sym_name(l) << " : ";
        if (l == path[i].name) {
          auto inner = render_actual(*ft, path, i + 1, repl);
          if (!inner) return std::nullopt;
          os << *inner;
        } else {
          render_type(os, *ft, 1);
        }
      }
      os << "}";
      return os.str();
    }
    case TypeKind::Variant: {
      if (path[i].kind != ObsPathElem::Kind::Arm) return std::nullopt;
      std::ostringstream os;
      bool found = false;
      for (size_t j = 0; j < t.variants.size(); ++j) {
        if (j) os << " || ";
        os << sym_name(t.variants[j].ctor) << " of ";
        if (t.variants[j].ctor == path[i].name) {
          auto inner = render_actual(*t.variants[j].payload, path, i + 1, repl);
          if (!inner) return std::nullopt;
          os << "(" << *inner << ")";
          found = true;
        } else {
          render_type(os, *t.variants[j].payload, 100);
        }
      }
      if (!found) return std::nullopt;
      return os.str();
    }
    case TypeKind::List: {
      if (path[i].kind != ObsPathElem::Kind::Elem) return std::nullopt;
      auto inner = render_actual(*t.a, path, i + 1, repl);
      if (!inner) return std::nullopt;
      return "[" + *inner + "]";
    }
    default:
      return std::nullopt;
  }
}

inline bool has_prefix(const std::string& s, const char* p) {
  return s.rfind(p, 0) == 0;
}

}  // namespace detail

// Reconstructs the paper-shaped error report from a verified witness: replay
// the feed once, watching the embedded observation clauses, then name the
// failing declaration and synthesize expected/actual text.
inline ErrorReport build_error_report(const Instrumented& ins, const Expr& program,
                                      const Feed& witness, ClauseKey error_site,
                                      const EvalLimits& limits = {}) {
  ErrorReport rep;

  WatchRecorder watch;
  for (const ObsPoint& p : ins.obs) {
    watch.binders.insert(p.obs_binder);
    if (p.chk_binder) watch.binders.insert(p.chk_binder);
  }
  for (const DeclInfo& d : ins.decls) watch.binders.insert(d.enter_binder);

  Feed strict = witness;
  strict.fallback = Feed::Fallback::FailOnMiss;
  EvalOptions opts;
  opts.limits = limits;
  opts.watch = &watch;
  eval(program, strict, opts);

  // who owns the error site
  std::string site_name = sym_name(error_site.id);
  Symbol base = error_site.id;
  int obs_from_nomatch = -1;
  if (detail::has_prefix(site_name, "nomatch@")) {
    base = intern(site_name.substr(8));
    auto it = ins.obs_by_nomatch.find(base);
    if (it != ins.obs_by_nomatch.end()) obs_from_nomatch = it->second;
  }
  int owner = -1;
  if (auto it = ins.error_owner.find(base); it != ins.error_owner.end()) owner = it->second;

  if (owner < 0) {
    if (auto it = ins.prim_sites.find(base); it != ins.prim_sites.end()) {
      rep.found_at = it->second;
      rep.value_name = it->second;
      rep.expected = "matching operand classes";
      rep.actual = "ill-classed operand";
      return rep;
    }
    if (detail::has_prefix(site_name, "assert_fail")) {
      rep.found_at = "assert";
      rep.value_name = "assert";
      rep.expected = "true";
      rep.actual = "false";
      return rep;
    }
    // fall back to the innermost declaration whose check was running
    for (const auto& [binder, val] : watch.events) {
      for (size_t d = 0; d < ins.decls.size(); ++d)
        if (ins.decls[d].enter_binder == binder) owner = int(d);
    }
    if (owner < 0) {
      rep.found_at = "clause " + site_name;
      rep.value_name = site_name;
      rep.expected = "no reachable ERROR";
      rep.actual = "ERROR";
      return rep;
    }
  }

  const DeclInfo& decl = ins.decls[size_t(owner)];
  rep.decl = owner;
  rep.found_at = decl.found_at;
  rep.value_name = sym_name(decl.name);
  rep.expected = decl.expected;
  rep.actual = "TypeError: Type unknown";

  // the first failing check owned by this declaration
  int failing_obs = obs_from_nomatch;
  size_t failing_at = watch.events.size();
  if (failing_obs < 0) {
    for (size_t i = 0; i < watch.events.size(); ++i) {
      const auto& [binder, val] = watch.events[i];
      auto it = ins.obs_by_chk.find(binder);
      if (it == ins.obs_by_chk.end()) continue;
      const ObsPoint& pt = ins.obs[size_t(it->second)];
      if (pt.decl != owner) continue;
      if (val && val->is_bool() && !val->as_bool()) {
        failing_obs = it->second;
        failing_at = i;
        break;
      }
    }
  }
  if (failing_obs < 0) return rep;

  // last value bound to the paired observation binder before the failure
  const ObsPoint& pt = ins.obs[size_t(failing_obs)];
  ValuePtr observed;
  for (size_t i = 0; i < watch.events.size() && i <= failing_at; ++i)
    if (watch.events[i].first == pt.obs_binder) observed = watch.events[i].second;
  if (!observed) return rep;

  if (pt.path.empty()) {
    rep.actual = render_value(*observed);
    return rep;
  }
  auto actual = detail::render_actual(*decl.type, pt.path, 0, detail::describe_shape(*observed));
  if (actual) rep.actual = *actual;
  return rep;
}

}  // namespace bluejay
