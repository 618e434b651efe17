#include "lte/preprocess.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lte {

namespace {

constexpr std::size_t k_max_axiom_clauses = 4096;

bool lit_in(const Clause& c, const Literal& l) {
  return std::find(c.begin(), c.end(), l) != c.end();
}

// CNF by distribution, polarity-driven. Returns a set of clauses equivalent
// to `t` under the given polarity. No fresh symbols.
std::vector<Clause> cnf(TermBank& bank, TermId t, bool positive) {
  const TermData& d = bank.term(t);
  if (!d.is_var) {
    Builtin b = bank.symbol(d.head).builtin;
    if (b == Builtin::bool_true) {
      if (positive) return {};
      return {Clause{}};
    }
    if (b == Builtin::bool_false) {
      if (positive) return {Clause{}};
      return {};
    }
    if (b == Builtin::logical_not) return cnf(bank, d.args[0], !positive);
    bool conj = (b == Builtin::logical_and && positive) ||
                (b == Builtin::logical_or && !positive);
    bool disj = (b == Builtin::logical_or && positive) ||
                (b == Builtin::logical_and && !positive);
    if (b == Builtin::implies) {
      std::vector<TermId> args = d.args;  // copy: mk_* below may reallocate
      if (positive) {
        // a => b  ==  ~a \/ b
        std::vector<Clause> left = cnf(bank, args[0], false);
        std::vector<Clause> right = cnf(bank, args[1], true);
        if (left.empty() || right.empty()) return {};
        std::vector<Clause> out;
        for (const Clause& cl : left)
          for (const Clause& cr : right) {
            Clause merged = cl;
            for (const Literal& l : cr)
              if (!lit_in(merged, l)) merged.push_back(l);
            out.push_back(std::move(merged));
            if (out.size() > k_max_axiom_clauses)
              throw UnsupportedError("axiom body too large to clausify");
          }
        return out;
      }
      // ~(a => b)  ==  a /\ ~b
      std::vector<Clause> out = cnf(bank, args[0], true);
      std::vector<Clause> more = cnf(bank, args[1], false);
      out.insert(out.end(), more.begin(), more.end());
      return out;
    }
    if (conj || disj) {
      std::vector<TermId> args = d.args;
      std::vector<std::vector<Clause>> parts;
      parts.reserve(args.size());
      for (TermId a : args) parts.push_back(cnf(bank, a, positive));
      if (conj) {
        std::vector<Clause> out;
        for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
        return out;
      }
      // disjunction: distribute
      std::vector<Clause> out{Clause{}};
      for (auto& p : parts) {
        std::vector<Clause> next;
        for (const Clause& acc : out)
          for (const Clause& add : p) {
            Clause merged = acc;
            for (const Literal& l : add)
              if (!lit_in(merged, l)) merged.push_back(l);
            next.push_back(std::move(merged));
            if (next.size() > k_max_axiom_clauses)
              throw UnsupportedError("axiom body too large to clausify");
          }
        out = std::move(next);
      }
      return out;
    }
  }
  if (!bank.is_atom(t))
    throw UnsupportedError("unsupported formula construct in axiom body");
  return {Clause{Literal{t, positive}}};
}

bool is_tautology(const Clause& c) {
  for (const Literal& l : c)
    if (lit_in(c, Literal{l.atom, !l.positive})) return true;
  return false;
}

}  // namespace

bool PreparedProblem::is_stage1(TermId t) const {
  return std::binary_search(psi_terms.begin(), psi_terms.end(), t);
}

std::vector<VarClause> clausify_axiom(TermBank& bank, const AxiomDecl& ax) {
  std::vector<Clause> clauses = cnf(bank, ax.body, true);
  std::vector<VarClause> out;
  for (Clause& c : clauses) {
    if (is_tautology(c)) continue;
    std::vector<VarId> occurring;
    for (const Literal& l : c) collect_vars(bank, l.atom, occurring);
    // keep quantifier order
    std::vector<VarId> vars;
    for (VarId v : ax.vars)
      if (std::find(occurring.begin(), occurring.end(), v) != occurring.end())
        vars.push_back(v);
    out.push_back(VarClause{std::move(vars), std::move(c)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flattening / linearization

namespace {

class Flattener {
 public:
  Flattener(TermBank& bank, const std::vector<VarId>& vars)
      : m_bank(bank), m_vars(vars) {
    for (VarId v : vars) m_names.insert(bank.var(v).name);
  }

  FlatAxiom run(const Clause& clause) {
    Clause body;
    for (const Literal& l : clause)
      body.push_back(Literal{flatten_atom(l.atom), l.positive});
    Clause lin_guards = linearize(body, m_flat_guards);
    FlatAxiom out;
    out.vars = m_vars;
    out.vars.insert(out.vars.end(), m_fresh.begin(), m_fresh.end());
    out.clause = std::move(lin_guards);
    out.clause.insert(out.clause.end(), m_flat_guards.begin(),
                      m_flat_guards.end());
    out.clause.insert(out.clause.end(), body.begin(), body.end());
    out.changed = m_changed;
    return out;
  }

 private:
  TermBank& m_bank;
  std::vector<VarId> m_vars;
  std::vector<VarId> m_fresh;
  std::set<std::string> m_names;
  Clause m_flat_guards;
  std::unordered_map<TermId, TermId> m_extracted;  // nested term -> its var
  int m_counter = 0;
  bool m_changed = false;

  VarId fresh_var(SortId sort) {
    std::string name;
    do {
      name = "_z" + std::to_string(m_counter++);
    } while (m_names.count(name));
    m_names.insert(name);
    VarId v = m_bank.add_var(name, sort);
    m_fresh.push_back(v);
    return v;
  }

  // Atom position: arguments may keep one level of variable-containing
  // application; anything nested below that is pulled out.
  TermId flatten_atom(TermId atom) {
    const TermData& d = m_bank.term(atom);
    if (d.ground || d.is_var) return atom;
    std::vector<TermId> args = d.args;
    SymbolId head = d.head;
    bool any = false;
    for (TermId& a : args) {
      TermId fa = flatten_term(a);
      any = any || fa != a;
      a = fa;
    }
    return any ? m_bank.mk_app(head, args) : atom;
  }

  // Term position: rewrite so that every variable-containing argument is a
  // plain variable, introducing guarded fresh variables for nested
  // applications (f(g(x)) becomes f(z) under guard z = g(x)).
  TermId flatten_term(TermId t) {
    const TermData& d = m_bank.term(t);
    if (d.ground || d.is_var) return t;
    std::vector<TermId> args = d.args;
    SymbolId head = d.head;
    bool any = false;
    for (TermId& a : args) {
      TermId fa = flatten_term(a);
      if (!m_bank.ground(fa) && !m_bank.is_var(fa)) {
        m_changed = true;
        auto it = m_extracted.find(fa);
        TermId zt;
        if (it != m_extracted.end()) {
          zt = it->second;  // reuse the variable for repeated occurrences
        } else {
          VarId z = fresh_var(m_bank.sort_of(fa));
          zt = m_bank.mk_var(z);
          m_flat_guards.push_back(Literal{m_bank.mk_eq(zt, fa), false});
          m_extracted.emplace(fa, zt);
        }
        fa = zt;
      }
      any = any || fa != a;
      a = fa;
    }
    return any ? m_bank.mk_app(head, args) : t;
  }

  // Renames variables occurring under more than one application term so each
  // variable sits under at most one, guarding every rename with an equality.
  // Body occurrences take precedence over guard occurrences, which keeps the
  // original pattern terms intact. Returns the rename guards.
  Clause linearize(Clause& body, Clause& guards) {
    struct Occ {
      VarId var;
      std::vector<TermId> apps;  // distinct var-containing application terms
    };
    std::vector<Occ> occ;
    auto note = [&](VarId v, TermId app) {
      for (Occ& o : occ)
        if (o.var == v) {
          if (std::find(o.apps.begin(), o.apps.end(), app) == o.apps.end())
            o.apps.push_back(app);
          return;
        }
      occ.push_back(Occ{v, {app}});
    };
    auto scan = [&](const Clause& c) {
      // Only extension applications count: linearity constrains occurrences
      // under extension terms.
      for (const Literal& l : c) {
        const TermData& d = m_bank.term(l.atom);
        if (d.ground) continue;
        for (TermId a : d.args) {
          const TermData& ad = m_bank.term(a);
          if (ad.ground || ad.is_var) continue;
          const SymbolData& sym = m_bank.symbol(ad.head);
          if (!(sym.kind == SymbolKind::function && sym.is_extension))
            continue;
          std::vector<VarId> vs;
          collect_vars(m_bank, a, vs);
          for (VarId v : vs) note(v, a);
        }
      }
    };
    scan(body);    // body occurrences first: they keep the variable
    scan(guards);  // guard occurrences are renamed when shared
    Clause lin_guards;
    for (Occ& o : occ) {
      for (std::size_t i = 1; i < o.apps.size(); ++i) {
        m_changed = true;
        VarId renamed = fresh_var(m_bank.var(o.var).sort);
        TermId rt = m_bank.mk_var(renamed);
        lin_guards.push_back(
            Literal{m_bank.mk_eq(m_bank.mk_var(o.var), rt), false});
        TermId target = o.apps[i];
        TermId replacement = rewrite_var(target, o.var, rt);
        auto swap_everywhere = [&](Clause& c) {
          for (Literal& l : c) l.atom = replace_term(l.atom, target, replacement);
        };
        swap_everywhere(body);
        swap_everywhere(guards);
        for (Occ& other : occ)
          for (TermId& u : other.apps)
            if (u == target && other.var != o.var) u = replacement;
      }
    }
    return lin_guards;
  }

  TermId rewrite_var(TermId t, VarId v, TermId image) {
    const TermData& d = m_bank.term(t);
    if (d.ground) return t;
    if (d.is_var) return d.head == v ? image : t;
    std::vector<TermId> args = d.args;
    SymbolId head = d.head;
    bool any = false;
    for (TermId& a : args) {
      TermId na = rewrite_var(a, v, image);
      any = any || na != a;
      a = na;
    }
    return any ? m_bank.mk_app(head, args) : t;
  }

  TermId replace_term(TermId t, TermId from, TermId to) {
    if (t == from) return to;
    const TermData& d = m_bank.term(t);
    if (d.ground || d.is_var) return t;
    std::vector<TermId> args = d.args;
    SymbolId head = d.head;
    bool any = false;
    for (TermId& a : args) {
      TermId na = replace_term(a, from, to);
      any = any || na != a;
      a = na;
    }
    return any ? m_bank.mk_app(head, args) : t;
  }
};

}  // namespace

FlatAxiom flatten_linearize(TermBank& bank, const std::vector<VarId>& vars,
                            const Clause& clause) {
  Flattener f(bank, vars);
  return f.run(clause);
}

bool is_flat_linear(const TermBank& bank, const Clause& clause) {
  // flat: a variable-containing application has no application arguments
  // with variables inside
  std::function<bool(TermId)> term_flat = [&](TermId t) -> bool {
    const TermData& d = bank.term(t);
    if (d.ground || d.is_var) return true;
    for (TermId a : d.args) {
      const TermData& ad = bank.term(a);
      if (!ad.ground && !ad.is_var) return false;
    }
    return true;
  };
  std::vector<std::pair<VarId, std::set<TermId>>> occ;
  for (const Literal& l : clause) {
    const TermData& d = bank.term(l.atom);
    if (d.ground) continue;
    for (TermId a : d.args) {
      const TermData& ad = bank.term(a);
      if (ad.ground || ad.is_var) continue;
      if (!term_flat(a)) return false;
      const SymbolData& sym = bank.symbol(ad.head);
      if (!(sym.kind == SymbolKind::function && sym.is_extension)) continue;
      std::vector<VarId> vs;
      collect_vars(bank, a, vs);
      for (VarId v : vs) {
        bool found = false;
        for (auto& [w, s] : occ)
          if (w == v) {
            s.insert(a);
            found = true;
          }
        if (!found) occ.push_back({v, {a}});
      }
    }
  }
  for (auto& [v, s] : occ) {
    (void)v;
    if (s.size() > 1) return false;  // linear violation
  }
  return true;
}

void validate_local_shape(const TermBank& bank, const Clause& clause) {
  std::function<void(TermId, bool)> walk = [&](TermId t, bool below_nonext) {
    const TermData& d = bank.term(t);
    if (d.is_var) {
      if (below_nonext)
        throw LocalityError(
            "variable '" + bank.var(d.head).name +
            "' occurs below a non-extension function symbol");
      return;
    }
    if (d.ground) return;
    const SymbolData& sym = bank.symbol(d.head);
    bool nonext = sym.kind == SymbolKind::function && !sym.is_extension;
    for (TermId a : d.args) walk(a, below_nonext || nonext);
  };
  for (const Literal& l : clause) {
    const TermData& d = bank.term(l.atom);
    if (d.ground) continue;
    for (TermId a : d.args) walk(a, false);
  }
}

std::vector<TermId> extract_patterns(TermBank& bank, const FlatAxiom& axiom,
                                     std::span<const TermId> user_patterns) {
  std::vector<TermId> computed;
  std::function<void(TermId)> scan = [&](TermId t) {
    const TermData& d = bank.term(t);
    if (d.ground || d.is_var) return;
    const SymbolData& sym = bank.symbol(d.head);
    if (sym.kind == SymbolKind::function && sym.is_extension) {
      if (std::find(computed.begin(), computed.end(), t) == computed.end())
        computed.push_back(t);
      return;  // maximal: do not descend (flat: args are vars or ground)
    }
    for (TermId a : d.args) scan(a);
  };
  for (const Literal& l : axiom.clause) {
    const TermData& d = bank.term(l.atom);
    if (d.ground) continue;
    for (TermId a : d.args) scan(a);
  }
  if (user_patterns.empty()) return computed;

  if (axiom.changed)
    throw Error(
        "invalid pattern: user patterns are only supported on axioms that "
        "are already flat and linear");
  for (TermId p : user_patterns) {
    const TermData& d = bank.term(p);
    bool flat_ext = !d.is_var && !d.ground &&
                    bank.symbol(d.head).kind == SymbolKind::function &&
                    bank.symbol(d.head).is_extension;
    if (flat_ext)
      for (TermId a : d.args) {
        const TermData& ad = bank.term(a);
        if (!ad.ground && !ad.is_var) flat_ext = false;
      }
    if (!flat_ext)
      throw Error("invalid pattern: '" + term_to_string(bank, p) +
                  "' is not a flat extension term");
    if (std::find(computed.begin(), computed.end(), p) == computed.end())
      throw Error("invalid pattern: '" + term_to_string(bank, p) +
                  "' does not occur in the axiom body");
  }
  return std::vector<TermId>(user_patterns.begin(), user_patterns.end());
}

PreparedAxiom make_prepared_axiom(TermBank& bank, std::uint32_t original_index,
                                  const std::vector<VarId>& vars,
                                  const Clause& clause,
                                  std::span<const TermId> user_patterns) {
  FlatAxiom flat = flatten_linearize(bank, vars, clause);
  validate_local_shape(bank, flat.clause);
  PreparedAxiom ax;
  ax.original_index = original_index;
  ax.vars = flat.vars;
  ax.body = flat.clause;
  ax.patterns = extract_patterns(bank, flat, user_patterns);
  std::vector<VarId> covered;
  for (TermId p : ax.patterns) collect_vars(bank, p, covered);
  for (VarId v : ax.vars)
    if (std::find(covered.begin(), covered.end(), v) == covered.end())
      ax.free_vars.push_back(v);
  // EPR style: no variable below any function symbol anywhere in the body.
  bool epr = true;
  std::function<bool(TermId)> has_var_below_fn = [&](TermId t) -> bool {
    const TermData& d = bank.term(t);
    if (d.ground || d.is_var) return false;
    if (bank.symbol(d.head).kind == SymbolKind::function) return true;
    for (TermId a : d.args)
      if (has_var_below_fn(a)) return true;
    return false;
  };
  for (const Literal& l : ax.body) {
    const TermData& d = bank.term(l.atom);
    if (d.ground) continue;
    for (TermId a : d.args)
      if (!bank.term(a).ground && has_var_below_fn(a)) epr = false;
  }
  ax.epr_style = epr;
  // same-sort groups for the special-case strategy
  std::map<SortId, std::vector<VarId>> by_sort;
  for (VarId v : ax.vars) by_sort[bank.var(v).sort].push_back(v);
  for (auto& [s, group] : by_sort) {
    (void)s;
    if (group.size() >= 2) ax.same_sort_groups.push_back(group);
  }
  return ax;
}

// ---------------------------------------------------------------------------
// Psi closure

std::vector<TermId> psi_closure(TermBank& bank,
                                std::span<const TermId> ground_terms,
                                std::span<const PsiRule> rules) {
  std::set<TermId> in(ground_terms.begin(), ground_terms.end());
  std::set<TermId> out = in;
  for (const PsiRule& rule : rules) {
    SortId hole_sort = bank.var(rule.hole).sort;
    // proper subterms of the template along the path to the hole
    std::vector<TermId> path;  // template subterms strictly below the root
    {
      TermId cur = rule.templ;
      for (;;) {
        const TermData& d = bank.term(cur);
        if (d.is_var) break;
        TermId next = k_none;
        for (TermId a : d.args)
          if (!bank.ground(a)) next = a;
        if (next == k_none) break;
        if (!bank.is_var(next)) path.push_back(next);
        cur = next;
      }
    }
    for (TermId t : ground_terms) {
      if (bank.sort_of(t) != hole_sort) continue;
      Substitution sigma;
      sigma.bind(rule.hole, t);
      bool anchored = true;
      for (TermId sub : path) {
        TermId inst = apply_subst(bank, sub, sigma);
        if (!in.count(inst)) {
          anchored = false;
          break;
        }
      }
      if (!anchored) continue;
      TermId full = apply_subst(bank, rule.templ, sigma);
      std::vector<TermId> root{full};
      for (TermId s : subterms(bank, root)) out.insert(s);
    }
  }
  return std::vector<TermId>(out.begin(), out.end());
}

void inject_closure_witnesses(Problem& p, std::span<const TermId> new_terms) {
  for (TermId t : new_terms) {
    SymbolId pred = p.bank.instclosure_symbol(p.bank.sort_of(t));
    p.ground_assertions.push_back(p.bank.mk_app(pred, {t}));
  }
}

// ---------------------------------------------------------------------------
// Ground clausification (Tseitin)

namespace {

class GroundClausifier {
 public:
  explicit GroundClausifier(TermBank& bank) : m_bank(bank) {}

  std::vector<Clause> run(std::span<const TermId> formulas) {
    for (TermId f : formulas) top(f);
    return std::move(m_clauses);
  }

 private:
  TermBank& m_bank;
  std::vector<Clause> m_clauses;
  std::unordered_map<TermId, Literal> m_defs;
  int m_counter = 0;

  // Constant folding: is t literally true/false?
  std::optional<bool> const_value(TermId t) {
    if (m_bank.is_app_of(t, Builtin::bool_true)) return true;
    if (m_bank.is_app_of(t, Builtin::bool_false)) return false;
    return std::nullopt;
  }

  void top(TermId f) {
    const TermData& d = m_bank.term(f);
    if (auto cv = const_value(f)) {
      if (!*cv) m_clauses.push_back(Clause{});  // contradiction
      return;
    }
    if (m_bank.is_app_of(f, Builtin::logical_and)) {
      std::vector<TermId> args = d.args;
      for (TermId a : args) top(a);
      return;
    }
    if (auto cl = as_clause(f)) {
      if (!is_tautology(*cl)) m_clauses.push_back(std::move(*cl));
      return;
    }
    m_clauses.push_back(Clause{lit(f)});
  }

  // Recognizes literal / or-of-literals shapes that need no fresh atoms.
  std::optional<Clause> as_clause(TermId f) {
    Clause c;
    std::function<bool(TermId, bool)> walk = [&](TermId t, bool pos) -> bool {
      const TermData& d = m_bank.term(t);
      if (auto cv = const_value(t)) {
        if (*cv == pos) return false;  // tautological literal: clause true
        return true;                   // neutral literal: drop
      }
      if (m_bank.is_app_of(t, Builtin::logical_not))
        return walk(d.args[0], !pos);
      if (pos && m_bank.is_app_of(t, Builtin::logical_or)) {
        std::vector<TermId> args = d.args;
        for (TermId a : args)
          if (!walk(a, true)) return false;
        return true;
      }
      if (pos && m_bank.is_app_of(t, Builtin::implies)) {
        std::vector<TermId> args = d.args;
        return walk(args[0], false) && walk(args[1], true);
      }
      if (m_bank.is_atom(t)) {
        c.push_back(Literal{t, pos});
        return true;
      }
      return false;  // needs Tseitin
    };
    std::optional<Clause> out;
    if (walk(f, true)) out = std::move(c);
    return out;
  }

  Literal fresh_def(TermId t) {
    auto it = m_defs.find(t);
    if (it != m_defs.end()) return it->second;
    SymbolId p = m_bank.add_symbol(
        m_bank.fresh_symbol_name("p$" + std::to_string(m_counter++)), {},
        m_bank.bool_sort(), SymbolKind::predicate);
    Literal l{m_bank.mk_const(p), true};
    m_defs.emplace(t, l);
    return l;
  }

  static Literal negate(Literal l) { return Literal{l.atom, !l.positive}; }

  // Definitional literal for an arbitrary subformula.
  Literal lit(TermId t) {
    const TermData& d = m_bank.term(t);
    if (auto cv = const_value(t)) {
      // encode constants via a definitional unit
      Literal p = fresh_def(t);
      m_clauses.push_back(Clause{*cv ? p : negate(p)});
      return p;
    }
    if (m_bank.is_atom(t)) return Literal{t, true};
    if (m_bank.is_app_of(t, Builtin::logical_not))
      return negate(lit(d.args[0]));
    auto found = m_defs.find(t);
    if (found != m_defs.end()) return found->second;

    std::vector<TermId> args = d.args;
    Literal p = fresh_def(t);
    if (m_bank.is_app_of(t, Builtin::logical_and)) {
      Clause back{p};
      for (TermId a : args) {
        Literal la = lit(a);
        m_clauses.push_back(Clause{negate(p), la});
        back.push_back(negate(la));
      }
      m_clauses.push_back(std::move(back));
      return p;
    }
    if (m_bank.is_app_of(t, Builtin::logical_or)) {
      Clause fwd{negate(p)};
      for (TermId a : args) {
        Literal la = lit(a);
        m_clauses.push_back(Clause{p, negate(la)});
        fwd.push_back(la);
      }
      m_clauses.push_back(std::move(fwd));
      return p;
    }
    if (m_bank.is_app_of(t, Builtin::implies)) {
      Literal la = lit(args[0]);
      Literal lb = lit(args[1]);
      m_clauses.push_back(Clause{negate(p), negate(la), lb});
      m_clauses.push_back(Clause{p, la});
      m_clauses.push_back(Clause{p, negate(lb)});
      return p;
    }
    throw UnsupportedError("unsupported formula construct in assertion");
  }
};

}  // namespace

std::vector<Clause> clausify_ground(TermBank& bank,
                                    std::span<const TermId> formulas) {
  GroundClausifier g(bank);
  return g.run(formulas);
}

// ---------------------------------------------------------------------------
// Pipeline

PreparedProblem prepare(Problem p) {
  PreparedProblem out;
  out.arith_present = p.uses_arith();

  // Axioms: clausify, flatten, validate, annotate.
  std::vector<Clause> ground_from_axioms;
  TermBank& bank = p.bank;
  for (std::uint32_t i = 0; i < p.axioms.size(); ++i) {
    const AxiomDecl& ax = p.axioms[i];
    std::vector<VarClause> clauses = clausify_axiom(bank, ax);
    if (clauses.size() > 1 && !ax.user_patterns.empty())
      throw Error(
          "invalid pattern: user patterns require a single-clause axiom body");
    for (VarClause& vc : clauses) {
      if (vc.vars.empty()) {
        ground_from_axioms.push_back(vc.clause);  // assert directly
        continue;
      }
      out.axioms.push_back(
          make_prepared_axiom(bank, i, vc.vars, vc.clause, ax.user_patterns));
    }
  }

  // Base ground term universe: st(G u K_e).
  std::vector<TermId> roots = p.ground_assertions;
  for (const PreparedAxiom& ax : out.axioms)
    for (const Literal& l : ax.body) roots.push_back(l.atom);
  for (const Clause& c : ground_from_axioms)
    for (const Literal& l : c) roots.push_back(l.atom);
  out.base_terms = subterms(bank, roots);

  // Psi witnesses.
  if (!p.psi_rules.empty()) {
    std::vector<TermId> closure =
        psi_closure(bank, out.base_terms, p.psi_rules);
    std::vector<TermId> fresh;
    std::set_difference(closure.begin(), closure.end(), out.base_terms.begin(),
                        out.base_terms.end(), std::back_inserter(fresh));
    inject_closure_witnesses(p, fresh);
    out.psi_terms = std::move(fresh);
  }

  // Witness constants for quantified sorts with no ground terms.
  {
    std::set<SortId> inhabited;
    for (TermId t : out.base_terms) inhabited.insert(bank.sort_of(t));
    for (TermId t : out.psi_terms) inhabited.insert(bank.sort_of(t));
    std::set<SortId> needed;
    for (const PreparedAxiom& ax : out.axioms)
      for (VarId v : ax.vars) {
        SortId s = bank.var(v).sort;
        if (!inhabited.count(s)) needed.insert(s);
      }
    for (SortId s : needed) {
      SymbolId w = bank.add_symbol(
          bank.fresh_symbol_name("w$" + bank.sort(s).name), {}, s,
          SymbolKind::function);
      out.base_terms.push_back(bank.mk_const(w));
    }
    std::sort(out.base_terms.begin(), out.base_terms.end());
  }

  // Ground clause set: assertions (with instclosure units), direct axiom
  // clauses, numeral distinctness.
  out.ground_clauses = clausify_ground(bank, p.ground_assertions);
  for (Clause& c : ground_from_axioms)
    out.ground_clauses.push_back(std::move(c));
  {
    std::vector<TermId> numerals;
    for (TermId t : out.base_terms)
      if (bank.is_app_of(t, Builtin::numeral)) numerals.push_back(t);
    for (std::size_t i = 0; i < numerals.size(); ++i)
      for (std::size_t j = i + 1; j < numerals.size(); ++j)
        out.ground_clauses.push_back(
            Clause{Literal{bank.mk_eq(numerals[i], numerals[j]), false}});
  }

  out.problem = std::move(p);
  return out;
}

}  // namespace lte
