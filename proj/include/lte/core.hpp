// core.hpp -- sorts, symbols, terms, literals, clauses, substitutions.
//
// All syntax lives in a per-problem TermBank. Terms are hash-consed into a
// DAG with stable integer ids; structural equality coincides with id
// equality, and every downstream structure (e-graph, matcher, caches) keys
// on ids.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lte {

using SortId = std::uint32_t;
using SymbolId = std::uint32_t;
using VarId = std::uint32_t;
using TermId = std::uint32_t;

inline constexpr std::uint32_t k_none = 0xffffffffu;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ill-sorted construction: arity mismatch, argument sort mismatch,
// cross-sort equality.
class SortError : public Error {
 public:
  using Error::Error;
};

// Substitution application hit a variable outside the substitution's domain.
class UnboundVarError : public Error {
 public:
  using Error::Error;
};

// Construct outside the supported fragment (existentials under axioms,
// non-clausal axiom bodies, unknown commands, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Axiom shape violates the locality assumption (variable below a
// non-extension symbol after flattening).
class LocalityError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Signature

enum class SymbolKind : std::uint8_t { function, predicate };

// Interpreted roles. Connectives are only used by formula trees before
// clausification; eq is the sort-indexed equality predicate.
enum class Builtin : std::uint8_t {
  none,
  eq,
  bool_true,
  bool_false,
  logical_and,
  logical_or,
  logical_not,
  implies,
  int_add,
  int_sub,
  int_neg,
  int_le,
  int_lt,
  numeral,
  instclosure,
};

struct SortData {
  std::string name;
  bool builtin = false;
};

struct SymbolData {
  std::string name;
  std::vector<SortId> arg_sorts;
  SortId result = k_none;
  SymbolKind kind = SymbolKind::function;
  bool is_extension = false;
  Builtin builtin = Builtin::none;

  std::size_t arity() const { return arg_sorts.size(); }
};

struct VarData {
  std::string name;
  SortId sort = k_none;
};

struct TermData {
  bool is_var = false;
  std::uint32_t head = k_none;  // SymbolId, or VarId when is_var
  SortId sort = k_none;
  bool ground = true;
  std::vector<TermId> args;
};

// ---------------------------------------------------------------------------
// TermBank

class TermBank {
 public:
  TermBank();

  TermBank(const TermBank&) = delete;
  TermBank& operator=(const TermBank&) = delete;
  TermBank(TermBank&&) = default;
  TermBank& operator=(TermBank&&) = default;

  // -- sorts
  SortId add_sort(const std::string& name, bool builtin = false);
  std::optional<SortId> find_sort(const std::string& name) const;
  const SortData& sort(SortId s) const { return m_sorts.at(s); }
  std::size_t num_sorts() const { return m_sorts.size(); }
  SortId bool_sort() const { return m_bool; }
  SortId int_sort() const { return m_int; }

  // -- symbols
  SymbolId add_symbol(const std::string& name, std::vector<SortId> arg_sorts,
                      SortId result, SymbolKind kind, bool is_extension = false,
                      Builtin builtin = Builtin::none);
  std::optional<SymbolId> find_symbol(const std::string& name) const;
  const SymbolData& symbol(SymbolId f) const { return m_symbols.at(f); }
  std::size_t num_symbols() const { return m_symbols.size(); }

  // Sort-indexed equality predicate, created on demand.
  SymbolId eq_symbol(SortId s);
  // Fresh-per-sort predicate asserting Psi witness terms.
  SymbolId instclosure_symbol(SortId s);
  // Interned integer numeral constant (non-negative; negation stays an app).
  SymbolId numeral_symbol(std::uint64_t value);

  SymbolId true_symbol() const { return m_true_sym; }
  SymbolId and_symbol() const { return m_and; }
  SymbolId or_symbol() const { return m_or; }
  SymbolId not_symbol() const { return m_not; }
  SymbolId implies_symbol() const { return m_implies; }
  SymbolId add_sym() const { return m_add; }
  SymbolId sub_sym() const { return m_sub; }
  SymbolId neg_sym() const { return m_neg; }
  SymbolId le_sym() const { return m_le; }
  SymbolId lt_sym() const { return m_lt; }

  // -- variables (scoped to their axiom by construction; names may repeat)
  VarId add_var(const std::string& name, SortId sort);
  const VarData& var(VarId v) const { return m_vars.at(v); }
  std::size_t num_vars() const { return m_vars.size(); }

  // -- terms
  // Interning constructor. Throws SortError on arity or argument-sort
  // mismatch, naming the offending position.
  TermId mk_app(SymbolId f, std::span<const TermId> args);
  TermId mk_app(SymbolId f, std::initializer_list<TermId> args) {
    return mk_app(f, std::span<const TermId>(args.begin(), args.size()));
  }
  TermId mk_var(VarId v);
  TermId mk_const(SymbolId c) { return mk_app(c, std::span<const TermId>{}); }
  TermId mk_numeral(std::uint64_t value) { return mk_const(numeral_symbol(value)); }
  // Equality atom; both sides must share a sort (SortError otherwise).
  TermId mk_eq(TermId lhs, TermId rhs);

  TermId true_term();

  const TermData& term(TermId t) const { return m_terms.at(t); }
  std::size_t num_terms() const { return m_terms.size(); }
  bool ground(TermId t) const { return m_terms.at(t).ground; }
  SortId sort_of(TermId t) const { return m_terms.at(t).sort; }

  bool is_var(TermId t) const { return m_terms.at(t).is_var; }
  bool is_app_of(TermId t, Builtin b) const {
    const TermData& d = m_terms.at(t);
    return !d.is_var && m_symbols[d.head].builtin == b;
  }
  bool is_eq(TermId t) const { return is_app_of(t, Builtin::eq); }
  bool is_connective(TermId t) const;
  // An atom: Bool-sorted, not a connective (predicate app, equality, true).
  bool is_atom(TermId t) const;

  // Produces a symbol name not currently declared, derived from `base`.
  std::string fresh_symbol_name(const std::string& base) const;

 private:
  std::vector<SortData> m_sorts;
  std::unordered_map<std::string, SortId> m_sort_names;
  std::vector<SymbolData> m_symbols;
  std::unordered_map<std::string, SymbolId> m_symbol_names;
  std::vector<VarData> m_vars;
  std::vector<TermData> m_terms;

  struct TermKey {
    bool is_var;
    std::uint32_t head;
    std::vector<TermId> args;
    bool operator==(const TermKey&) const = default;
  };
  struct TermKeyHash {
    std::size_t operator()(const TermKey& k) const;
  };
  std::unordered_map<TermKey, TermId, TermKeyHash> m_intern;

  std::unordered_map<SortId, SymbolId> m_eq_syms;
  std::unordered_map<SortId, SymbolId> m_instclosure_syms;
  std::unordered_map<std::uint64_t, SymbolId> m_numerals;

  SortId m_bool = k_none, m_int = k_none;
  SymbolId m_true_sym = k_none, m_false_sym = k_none;
  SymbolId m_and = k_none, m_or = k_none, m_not = k_none, m_implies = k_none;
  SymbolId m_add = k_none, m_sub = k_none, m_neg = k_none, m_le = k_none,
           m_lt = k_none;

  TermId intern(TermData data);
};

// ---------------------------------------------------------------------------
// Literals, clauses, substitutions

struct Literal {
  TermId atom = k_none;  // Bool-sorted non-connective term
  bool positive = true;

  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

// Sort-respecting map from variables to terms. Kept sorted by VarId.
class Substitution {
 public:
  Substitution() = default;

  void bind(VarId v, TermId t);
  std::optional<TermId> lookup(VarId v) const;
  std::size_t size() const { return m_map.size(); }
  const std::vector<std::pair<VarId, TermId>>& entries() const { return m_map; }

  bool operator==(const Substitution&) const = default;

 private:
  std::vector<std::pair<VarId, TermId>> m_map;
};

// ---------------------------------------------------------------------------
// Free operations

// Applies a substitution to a term / clause. Every free variable must be
// bound (UnboundVarError otherwise). Interning makes repeated application
// cheap and id-stable.
TermId apply_subst(TermBank& bank, TermId t, const Substitution& sigma);
Clause apply_subst(TermBank& bank, const Clause& c, const Substitution& sigma);

// st(roots): all ground, sort-valued subterms (Bool-sorted atom and formula
// nodes are traversed but not collected). Result is sorted by id and closed
// under the subterm relation.
std::vector<TermId> subterms(const TermBank& bank, std::span<const TermId> roots);

// Collects the distinct variables occurring in t, in first-occurrence order.
void collect_vars(const TermBank& bank, TermId t, std::vector<VarId>& out);

// Recursive well-sortedness validator, independent of the checks performed
// at construction time; usable as a test oracle. Throws SortError.
void sort_check(const TermBank& bank, TermId t);

// S-expression rendering (SMT-LIB style) used by the printer, the debug
// dumps and error messages.
std::string term_to_string(const TermBank& bank, TermId t);
std::string literal_to_string(const TermBank& bank, const Literal& l);
std::string clause_to_string(const TermBank& bank, const Clause& c);

}  // namespace lte
