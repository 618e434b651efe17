// Shared test helpers: independent oracles and random instance generators.
// Everything here deliberately avoids the library's algorithmic paths: the
// closure oracle is a plain fixpoint scan, the ground oracle an exhaustive
// assignment search.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lte/core.hpp"

namespace lte::test {

// ---------------------------------------------------------------------------
// Naive congruence closure (fixpoint over all pairs).

class NaiveCc {
 public:
  explicit NaiveCc(const TermBank& bank) : m_bank(bank) {}

  void add(TermId t) {
    if (m_rep.count(t)) return;
    m_rep[t] = t;
    m_terms.push_back(t);
    for (TermId a : m_bank.term(t).args) add(a);
  }

  void merge(TermId a, TermId b) {
    add(a);
    add(b);
    TermId ra = find(a), rb = find(b);
    if (ra != rb) m_rep[ra] = rb;
    close();
  }

  void diseq(TermId a, TermId b) {
    add(a);
    add(b);
    m_diseqs.emplace_back(a, b);
  }

  TermId find(TermId t) const {
    TermId cur = t;
    for (;;) {
      TermId next = m_rep.at(cur);
      if (next == cur) return cur;
      cur = next;
    }
  }

  bool equal(TermId a, TermId b) const { return find(a) == find(b); }

  bool consistent() const {
    for (auto& [a, b] : m_diseqs)
      if (equal(a, b)) return false;
    return true;
  }

  const std::vector<TermId>& terms() const { return m_terms; }

 private:
  const TermBank& m_bank;
  std::map<TermId, TermId> m_rep;
  std::vector<TermId> m_terms;
  std::vector<std::pair<TermId, TermId>> m_diseqs;

  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (TermId s : m_terms) {
        const TermData& ds = m_bank.term(s);
        if (ds.args.empty()) continue;
        for (TermId t : m_terms) {
          if (s == t || equal(s, t)) continue;
          const TermData& dt = m_bank.term(t);
          if (ds.head != dt.head || ds.args.size() != dt.args.size()) continue;
          bool cong = true;
          for (std::size_t i = 0; cong && i < ds.args.size(); ++i)
            cong = equal(ds.args[i], dt.args[i]);
          if (cong) {
            m_rep[find(s)] = find(t);
            changed = true;
          }
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Exhaustive ground EUF check: assignment search over the occurring atoms
// with closure-consistency pruning. Independent of the DPLL solver.

inline bool naive_euf_consistent(const TermBank& bank,
                                 const std::vector<std::pair<TermId, bool>>&
                                     assigned /* atom, value */,
                                 TermId true_term) {
  NaiveCc cc(bank);
  cc.add(true_term);
  for (auto& [atom, value] : assigned) {
    const TermData& d = bank.term(atom);
    if (bank.is_eq(atom)) {
      if (value)
        cc.merge(d.args[0], d.args[1]);
      else
        cc.diseq(d.args[0], d.args[1]);
    } else if (!d.args.empty()) {
      if (value)
        cc.merge(atom, true_term);
      else
        cc.diseq(atom, true_term);
    }
  }
  return cc.consistent();
}

inline bool naive_ground_sat(TermBank& bank,
                             const std::vector<Clause>& clauses) {
  std::set<TermId> atom_set;
  for (const Clause& c : clauses)
    for (const Literal& l : c) atom_set.insert(l.atom);
  std::vector<TermId> atoms(atom_set.begin(), atom_set.end());
  TermId tt = bank.true_term();

  std::map<TermId, int> value;  // 0 unset, 1 true, -1 false
  for (TermId a : atoms) value[a] = 0;

  auto clauses_alive = [&]() {
    for (const Clause& c : clauses) {
      bool open = false;
      for (const Literal& l : c) {
        int v = value[l.atom];
        if (v == 0 || (v > 0) == l.positive) {
          open = true;
          break;
        }
      }
      if (!open) return false;
    }
    return true;
  };

  std::vector<std::pair<TermId, bool>> assigned;
  std::function<bool(std::size_t)> walk = [&](std::size_t i) -> bool {
    if (!clauses_alive()) return false;
    if (!naive_euf_consistent(bank, assigned, tt)) return false;
    if (i == atoms.size()) return true;
    for (bool v : {true, false}) {
      value[atoms[i]] = v ? 1 : -1;
      assigned.emplace_back(atoms[i], v);
      if (walk(i + 1)) return true;
      assigned.pop_back();
      value[atoms[i]] = 0;
    }
    return false;
  };
  return walk(0);
}

// ---------------------------------------------------------------------------
// Random ground term pools over a tiny EUF signature.

struct RandomSig {
  SortId sort;
  std::vector<SymbolId> consts;
  std::vector<SymbolId> fns;  // unary or binary
};

inline RandomSig make_sig(TermBank& bank, std::mt19937_64& rng, int n_consts,
                          int n_fns, int max_arity) {
  RandomSig sig;
  sig.sort = bank.add_sort("S");
  for (int i = 0; i < n_consts; ++i)
    sig.consts.push_back(
        bank.add_symbol("c" + std::to_string(i), {}, sig.sort,
                        SymbolKind::function));
  for (int i = 0; i < n_fns; ++i) {
    int arity = max_arity == 1 ? 1 : 1 + int(rng() % max_arity);
    std::vector<SortId> args(arity, sig.sort);
    sig.fns.push_back(bank.add_symbol("h" + std::to_string(i), std::move(args),
                                      sig.sort, SymbolKind::function, true));
  }
  return sig;
}

inline TermId random_term(TermBank& bank, const RandomSig& sig,
                          std::mt19937_64& rng, int depth) {
  if (depth == 0 || sig.fns.empty() || rng() % 3 == 0)
    return bank.mk_const(sig.consts[rng() % sig.consts.size()]);
  SymbolId f = sig.fns[rng() % sig.fns.size()];
  std::vector<TermId> args;
  for (std::size_t i = 0; i < bank.symbol(f).arity(); ++i)
    args.push_back(random_term(bank, sig, rng, depth - 1));
  return bank.mk_app(f, args);
}

}  // namespace lte::test
