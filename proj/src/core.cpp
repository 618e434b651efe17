#include "lte/core.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace lte {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

}  // namespace

std::size_t TermBank::TermKeyHash::operator()(const TermKey& k) const {
  std::size_t h = k.is_var ? 0x51ed270b : 0x2545f491;
  h = hash_combine(h, k.head);
  for (TermId a : k.args) h = hash_combine(h, a);
  return h;
}

TermBank::TermBank() {
  m_bool = add_sort("Bool", /*builtin=*/true);
  m_int = add_sort("Int", /*builtin=*/true);
  m_true_sym = add_symbol("true", {}, m_bool, SymbolKind::predicate, false,
                          Builtin::bool_true);
  m_false_sym = add_symbol("false", {}, m_bool, SymbolKind::predicate, false,
                           Builtin::bool_false);
  m_and = add_symbol("and", {}, m_bool, SymbolKind::predicate, false,
                     Builtin::logical_and);
  m_or = add_symbol("or", {}, m_bool, SymbolKind::predicate, false,
                    Builtin::logical_or);
  m_not = add_symbol("not", {m_bool}, m_bool, SymbolKind::predicate, false,
                     Builtin::logical_not);
  m_implies = add_symbol("=>", {m_bool, m_bool}, m_bool, SymbolKind::predicate,
                         false, Builtin::implies);
  m_add = add_symbol("+", {m_int, m_int}, m_int, SymbolKind::function, false,
                     Builtin::int_add);
  m_sub = add_symbol("-", {m_int, m_int}, m_int, SymbolKind::function, false,
                     Builtin::int_sub);
  m_neg = add_symbol("~neg", {m_int}, m_int, SymbolKind::function, false,
                     Builtin::int_neg);
  m_le = add_symbol("<=", {m_int, m_int}, m_bool, SymbolKind::predicate, false,
                    Builtin::int_le);
  m_lt = add_symbol("<", {m_int, m_int}, m_bool, SymbolKind::predicate, false,
                    Builtin::int_lt);
}

SortId TermBank::add_sort(const std::string& name, bool builtin) {
  if (m_sort_names.count(name))
    throw SortError("sort '" + name + "' already declared");
  SortId s = static_cast<SortId>(m_sorts.size());
  m_sorts.push_back(SortData{name, builtin});
  m_sort_names.emplace(name, s);
  return s;
}

std::optional<SortId> TermBank::find_sort(const std::string& name) const {
  auto it = m_sort_names.find(name);
  if (it == m_sort_names.end()) return std::nullopt;
  return it->second;
}

SymbolId TermBank::add_symbol(const std::string& name,
                              std::vector<SortId> arg_sorts, SortId result,
                              SymbolKind kind, bool is_extension,
                              Builtin builtin) {
  if (m_symbol_names.count(name))
    throw SortError("symbol '" + name + "' already declared");
  if (kind == SymbolKind::predicate && result != m_bool && result != k_none)
    throw SortError("predicate '" + name + "' must have result sort Bool");
  SymbolId f = static_cast<SymbolId>(m_symbols.size());
  m_symbols.push_back(SymbolData{name, std::move(arg_sorts),
                                 kind == SymbolKind::predicate ? m_bool : result,
                                 kind, is_extension, builtin});
  m_symbol_names.emplace(name, f);
  return f;
}

std::optional<SymbolId> TermBank::find_symbol(const std::string& name) const {
  auto it = m_symbol_names.find(name);
  if (it == m_symbol_names.end()) return std::nullopt;
  return it->second;
}

SymbolId TermBank::eq_symbol(SortId s) {
  auto it = m_eq_syms.find(s);
  if (it != m_eq_syms.end()) return it->second;
  // Distinguished name; '=' is resolved per operand sort by the frontend.
  SymbolId f = add_symbol(fresh_symbol_name("=:" + m_sorts.at(s).name),
                          {s, s}, m_bool, SymbolKind::predicate, false,
                          Builtin::eq);
  m_eq_syms.emplace(s, f);
  return f;
}

SymbolId TermBank::instclosure_symbol(SortId s) {
  auto it = m_instclosure_syms.find(s);
  if (it != m_instclosure_syms.end()) return it->second;
  SymbolId f =
      add_symbol(fresh_symbol_name("instclosure_" + m_sorts.at(s).name), {s},
                 m_bool, SymbolKind::predicate, false, Builtin::instclosure);
  m_instclosure_syms.emplace(s, f);
  return f;
}

SymbolId TermBank::numeral_symbol(std::uint64_t value) {
  auto it = m_numerals.find(value);
  if (it != m_numerals.end()) return it->second;
  SymbolId f = add_symbol(std::to_string(value), {}, m_int,
                          SymbolKind::function, false, Builtin::numeral);
  m_numerals.emplace(value, f);
  return f;
}

VarId TermBank::add_var(const std::string& name, SortId sort) {
  VarId v = static_cast<VarId>(m_vars.size());
  m_vars.push_back(VarData{name, sort});
  return v;
}

TermId TermBank::intern(TermData data) {
  TermKey key{data.is_var, data.head, data.args};
  auto it = m_intern.find(key);
  if (it != m_intern.end()) return it->second;
  TermId t = static_cast<TermId>(m_terms.size());
  m_terms.push_back(std::move(data));
  m_intern.emplace(std::move(key), t);
  return t;
}

TermId TermBank::mk_app(SymbolId f, std::span<const TermId> args) {
  const SymbolData& sym = m_symbols.at(f);
  bool variadic = sym.builtin == Builtin::logical_and ||
                  sym.builtin == Builtin::logical_or;
  if (!variadic && args.size() != sym.arity())
    throw SortError("symbol '" + sym.name + "' expects " +
                    std::to_string(sym.arity()) + " arguments, got " +
                    std::to_string(args.size()) + " (position " +
                    std::to_string(std::min(args.size(), sym.arity()) + 1) +
                    ")");
  bool ground = true;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const TermData& a = m_terms.at(args[i]);
    SortId expect = variadic ? m_bool : sym.arg_sorts[i];
    if (a.sort != expect)
      throw SortError("argument " + std::to_string(i + 1) + " of '" + sym.name +
                      "' has sort " + m_sorts.at(a.sort).name + ", expected " +
                      m_sorts.at(expect).name);
    ground = ground && a.ground;
  }
  TermData data;
  data.is_var = false;
  data.head = f;
  data.sort = sym.result;
  data.ground = ground;
  data.args.assign(args.begin(), args.end());
  return intern(std::move(data));
}

TermId TermBank::mk_var(VarId v) {
  TermData data;
  data.is_var = true;
  data.head = v;
  data.sort = m_vars.at(v).sort;
  data.ground = false;
  return intern(std::move(data));
}

TermId TermBank::mk_eq(TermId lhs, TermId rhs) {
  SortId s = sort_of(lhs);
  if (s != sort_of(rhs))
    throw SortError("equality between sorts " + m_sorts.at(s).name + " and " +
                    m_sorts.at(sort_of(rhs)).name);
  return mk_app(eq_symbol(s), {lhs, rhs});
}

TermId TermBank::true_term() { return mk_const(m_true_sym); }

bool TermBank::is_connective(TermId t) const {
  const TermData& d = m_terms.at(t);
  if (d.is_var) return false;
  switch (m_symbols[d.head].builtin) {
    case Builtin::logical_and:
    case Builtin::logical_or:
    case Builtin::logical_not:
    case Builtin::implies:
      return true;
    default:
      return false;
  }
}

bool TermBank::is_atom(TermId t) const {
  const TermData& d = m_terms.at(t);
  if (d.is_var) return false;
  return d.sort == m_bool && !is_connective(t);
}

std::string TermBank::fresh_symbol_name(const std::string& base) const {
  if (!m_symbol_names.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!m_symbol_names.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------

void Substitution::bind(VarId v, TermId t) {
  auto it = std::lower_bound(m_map.begin(), m_map.end(), v,
                             [](const auto& e, VarId x) { return e.first < x; });
  if (it != m_map.end() && it->first == v)
    it->second = t;
  else
    m_map.insert(it, {v, t});
}

std::optional<TermId> Substitution::lookup(VarId v) const {
  auto it = std::lower_bound(m_map.begin(), m_map.end(), v,
                             [](const auto& e, VarId x) { return e.first < x; });
  if (it != m_map.end() && it->first == v) return it->second;
  return std::nullopt;
}

TermId apply_subst(TermBank& bank, TermId t, const Substitution& sigma) {
  const TermData& d = bank.term(t);
  if (d.ground) return t;
  if (d.is_var) {
    auto img = sigma.lookup(d.head);
    if (!img)
      throw UnboundVarError("variable '" + bank.var(d.head).name +
                            "' not bound by substitution");
    return *img;
  }
  std::vector<TermId> args;
  args.reserve(d.args.size());
  for (TermId a : d.args) args.push_back(apply_subst(bank, a, sigma));
  SymbolId head = d.head;  // d may dangle after mk_app reallocates
  return bank.mk_app(head, args);
}

Clause apply_subst(TermBank& bank, const Clause& c, const Substitution& sigma) {
  Clause out;
  out.reserve(c.size());
  for (const Literal& l : c)
    out.push_back(Literal{apply_subst(bank, l.atom, sigma), l.positive});
  return out;
}

std::vector<TermId> subterms(const TermBank& bank, std::span<const TermId> roots) {
  std::unordered_set<TermId> seen;
  std::vector<TermId> out;
  std::function<void(TermId)> walk = [&](TermId t) {
    if (!seen.insert(t).second) return;
    const TermData& d = bank.term(t);
    if (!d.is_var) {
      if (d.ground && d.sort != bank.bool_sort()) out.push_back(t);
      for (TermId a : d.args) walk(a);
    }
  };
  for (TermId r : roots) walk(r);
  std::sort(out.begin(), out.end());
  return out;
}

void collect_vars(const TermBank& bank, TermId t, std::vector<VarId>& out) {
  const TermData& d = bank.term(t);
  if (d.ground) return;
  if (d.is_var) {
    if (std::find(out.begin(), out.end(), d.head) == out.end())
      out.push_back(d.head);
    return;
  }
  for (TermId a : d.args) collect_vars(bank, a, out);
}

void sort_check(const TermBank& bank, TermId t) {
  const TermData& d = bank.term(t);
  if (d.is_var) {
    if (d.sort != bank.var(d.head).sort)
      throw SortError("variable term sort mismatch");
    return;
  }
  const SymbolData& sym = bank.symbol(d.head);
  bool variadic = sym.builtin == Builtin::logical_and ||
                  sym.builtin == Builtin::logical_or;
  if (!variadic && d.args.size() != sym.arity())
    throw SortError("arity mismatch at '" + sym.name + "'");
  if (d.sort != sym.result) throw SortError("result sort mismatch");
  for (std::size_t i = 0; i < d.args.size(); ++i) {
    SortId expect = variadic ? bank.bool_sort() : sym.arg_sorts[i];
    if (bank.sort_of(d.args[i]) != expect)
      throw SortError("argument sort mismatch at '" + sym.name + "' position " +
                      std::to_string(i + 1));
    sort_check(bank, d.args[i]);
  }
}

std::string term_to_string(const TermBank& bank, TermId t) {
  const TermData& d = bank.term(t);
  if (d.is_var) return bank.var(d.head).name;
  const SymbolData& sym = bank.symbol(d.head);
  std::string head = sym.name;
  if (sym.builtin == Builtin::eq) head = "=";
  if (sym.builtin == Builtin::int_neg) head = "-";
  if (d.args.empty()) return head;
  std::string out = "(" + head;
  for (TermId a : d.args) out += " " + term_to_string(bank, a);
  out += ")";
  return out;
}

std::string literal_to_string(const TermBank& bank, const Literal& l) {
  std::string a = term_to_string(bank, l.atom);
  return l.positive ? a : "(not " + a + ")";
}

std::string clause_to_string(const TermBank& bank, const Clause& c) {
  if (c.empty()) return "false";
  if (c.size() == 1) return literal_to_string(bank, c[0]);
  std::string out = "(or";
  for (const Literal& l : c) out += " " + literal_to_string(bank, l);
  return out + ")";
}

}  // namespace lte
