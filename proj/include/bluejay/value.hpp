#pragma once

#include <algorithm>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bluejay/ast.hpp"

namespace bluejay {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

// Where a runtime value was computed; feeds the per-clause formula encoding.
struct Origin {
  enum class Kind { Clause, IntConst, BoolConst, Opaque };
  Kind kind = Kind::Opaque;
  ClauseKey key{};
  int64_t int_const = 0;
  bool bool_const = false;

  static Origin clause(ClauseKey k) { Origin o; o.kind = Kind::Clause; o.key = k; return o; }
  static Origin int_lit(int64_t v) { Origin o; o.kind = Kind::IntConst; o.int_const = v; return o; }
  static Origin bool_lit(bool v) { Origin o; o.kind = Kind::BoolConst; o.bool_const = v; return o; }
  static Origin opaque() { return Origin{}; }
};

// A runtime value paired with its origin.
struct RV {
  ValuePtr v;
  Origin origin;
};

struct Env;
using EnvPtr = std::shared_ptr<const Env>;

struct Env {
  Symbol name;
  RV binding;
  EnvPtr next;

  static EnvPtr extend(const EnvPtr& env, Symbol name, RV rv) {
    auto e = std::make_shared<Env>();
    e->name = name;
    e->binding = std::move(rv);
    e->next = env;
    return e;
  }

  static const RV* lookup(const EnvPtr& env, Symbol name) {
    for (const Env* p = env.get(); p; p = p->next.get())
      if (p->name == name) return &p->binding;
    return nullptr;
  }
};

struct Closure {
  Symbol param = 0;
  const Expr* body = nullptr;
  EnvPtr env;
  Symbol fun_label = 0;  // identifies functions in formulas
};

struct RecordField {
  Symbol label;
  RV value;
};

struct RecordVal {
  std::vector<RecordField> fields;    // actual labels, in source order
  std::vector<Symbol> declared;      // subset of actual labels

  bool has_actual(Symbol l) const {
    for (const auto& f : fields)
      if (f.label == l) return true;
    return false;
  }
  bool has_declared(Symbol l) const {
    return std::find(declared.begin(), declared.end(), l) != declared.end();
  }
  const RV* field(Symbol l) const {
    for (const auto& f : fields)
      if (f.label == l) return &f.value;
    return nullptr;
  }
};

struct VariantVal {
  Symbol ctor = 0;
  RV payload;
};

struct ListNode;
using ListPtr = std::shared_ptr<const ListNode>;  // nullptr is the empty list

struct ListNode {
  RV head;
  ListPtr tail;
};

struct Untouchable {
  int32_t alpha = 0;
};

struct Value {
  std::variant<int64_t, bool, Closure, RecordVal, VariantVal, ListPtr, Untouchable> v;

  bool is_int() const { return std::holds_alternative<int64_t>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_closure() const { return std::holds_alternative<Closure>(v); }
  bool is_record() const { return std::holds_alternative<RecordVal>(v); }
  bool is_variant() const { return std::holds_alternative<VariantVal>(v); }
  bool is_list() const { return std::holds_alternative<ListPtr>(v); }
  bool is_untouchable() const { return std::holds_alternative<Untouchable>(v); }

  int64_t as_int() const { return std::get<int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const Closure& as_closure() const { return std::get<Closure>(v); }
  const RecordVal& as_record() const { return std::get<RecordVal>(v); }
  const VariantVal& as_variant() const { return std::get<VariantVal>(v); }
  const ListPtr& as_list() const { return std::get<ListPtr>(v); }
  const Untouchable& as_untouchable() const { return std::get<Untouchable>(v); }
};

inline ValuePtr mk_int_val(int64_t n) { return std::make_shared<Value>(Value{n}); }
inline ValuePtr mk_bool_val(bool b) { return std::make_shared<Value>(Value{b}); }
template <class T>
ValuePtr mk_val(T&& t) { return std::make_shared<Value>(Value{std::forward<T>(t)}); }

// Shared singletons for the common literals.
inline ValuePtr true_val() { static ValuePtr v = mk_bool_val(true); return v; }
inline ValuePtr false_val() { static ValuePtr v = mk_bool_val(false); return v; }

inline void render_value_to(std::ostream& os, const Value& v) {
  if (v.is_int()) { os << v.as_int(); return; }
  if (v.is_bool()) { os << (v.as_bool() ? "true" : "false"); return; }
  if (v.is_closure()) { os << "<fun>"; return; }
  if (v.is_untouchable()) { os << "V('a" << v.as_untouchable().alpha << ")"; return; }
  if (v.is_variant()) {
    const auto& t = v.as_variant();
    os << sym_name(t.ctor) << " ";
    bool paren = !t.payload.v->is_record() && !t.payload.v->is_list();
    if (paren) os << "(";
    render_value_to(os, *t.payload.v);
    if (paren) os << ")";
    return;
  }
  if (v.is_record()) {
    const auto& r = v.as_record();
    os << "{";
    bool first = true;
    for (const auto& f : r.fields) {
      if (!r.has_declared(f.label)) continue;  // hidden labels are unobservable
      if (!first) os << "; ";
      first = false;
      os << sym_name(f.label) << " = ";
      render_value_to(os, *f.value.v);
    }
    os << "}";
    return;
  }
  os << "[";
  bool first = true;
  for (ListPtr p = v.as_list(); p; p = p->tail) {
    if (!first) os << "; ";
    first = false;
    render_value_to(os, *p->head.v);
  }
  os << "]";
}

inline std::string render_value(const Value& v) {
  std::ostringstream os;
  render_value_to(os, v);
  return os.str();
}

// The class name a value would match: "int", "bool", "fun", or a structural
// shape for data values. Used when reporting the observed shape of a failure.
inline std::string value_shape(const Value& v) {
  if (v.is_int()) return "int";
  if (v.is_bool()) return "bool";
  if (v.is_closure()) return "fun";
  return render_value(v);
}

// Debug walk for the record-tag invariant: every reachable record satisfies
// declared ⊆ actual.
inline bool record_tags_valid(const Value& v) {
  if (v.is_record()) {
    const auto& r = v.as_record();
    for (Symbol l : r.declared)
      if (!r.has_actual(l)) return false;
    for (const auto& f : r.fields)
      if (!record_tags_valid(*f.value.v)) return false;
    return true;
  }
  if (v.is_variant()) return record_tags_valid(*v.as_variant().payload.v);
  if (v.is_list()) {
    for (ListPtr p = v.as_list(); p; p = p->tail)
      if (!record_tags_valid(*p->head.v)) return false;
    return true;
  }
  return true;
}

}  // namespace bluejay
