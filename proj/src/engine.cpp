#include "lte/engine.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace lte {

std::string to_string(Status s) {
  switch (s) {
    case Status::sat:
      return "sat";
    case Status::unsat:
      return "unsat";
    default:
      return "unknown";
  }
}

bool Stats::counters_equal(const Stats& o) const {
  return instances == o.instances && eager_bound == o.eager_bound &&
         rounds == o.rounds && ground_checks == o.ground_checks &&
         backend_checks == o.backend_checks &&
         round_instances == o.round_instances;
}

bool InstanceCache::insert(std::uint32_t axiom, const std::vector<TermId>& key,
                           const std::vector<TermId>& images) {
  PerAxiom& pa = m_axioms[axiom];
  if (pa.keys.count(key) || pa.images.count(images)) return false;
  pa.keys.insert(key);
  pa.images.insert(images);
  ++m_count;
  return true;
}

// ---------------------------------------------------------------------------
// GroundSolver

GroundSolver::GroundSolver(TermBank& bank, const std::vector<Clause>& clauses,
                           const PreparedProblem* prep)
    : m_bank(bank), m_eg(bank) {
  m_true = bank.true_term();
  m_eg.register_term(m_true, 0);
  if (prep) {
    for (TermId t : prep->base_terms) m_eg.register_term(t, 0);
    for (TermId t : prep->psi_terms) m_eg.register_term(t, 1);
  }

  std::set<TermId> atom_set;
  for (const Clause& c : clauses)
    for (const Literal& l : c) atom_set.insert(l.atom);
  m_atoms.assign(atom_set.begin(), atom_set.end());
  for (std::size_t i = 0; i < m_atoms.size(); ++i)
    m_atom_of.emplace(m_atoms[i], static_cast<int>(i));

  for (TermId t : m_atoms) {
    const TermData& d = m_bank.term(t);
    if (m_bank.is_eq(t)) {
      m_eg.register_term(d.args[0], 0);
      m_eg.register_term(d.args[1], 0);
    } else if (!d.args.empty()) {
      m_eg.register_term(t, 0);
    }
  }

  m_value.assign(m_atoms.size(), 0);
  m_level.assign(m_atoms.size(), 0);
  m_watches.assign(2 * m_atoms.size(), {});

  for (const Clause& c : clauses) {
    std::vector<int> lits;
    bool taut = false;
    for (const Literal& l : c) {
      int lit = 2 * m_atom_of.at(l.atom) + (l.positive ? 0 : 1);
      if (std::find(lits.begin(), lits.end(), lit) != lits.end()) continue;
      if (std::find(lits.begin(), lits.end(), lit ^ 1) != lits.end()) {
        taut = true;
        break;
      }
      lits.push_back(lit);
    }
    if (taut) continue;
    if (lits.empty()) {
      m_has_empty = true;
      continue;
    }
    if (lits.size() == 1) {
      m_initial_units.push_back(lits[0]);
      continue;
    }
    int ci = static_cast<int>(m_clauses.size());
    m_watches[lits[0]].push_back(ci);
    m_watches[lits[1]].push_back(ci);
    m_clauses.push_back(std::move(lits));
  }
}

bool GroundSolver::assign(int lit) {
  int var = lit >> 1;
  bool val = !(lit & 1);
  if (m_value[var] != 0) {
    return (m_value[var] > 0) == val;
  }
  m_value[var] = val ? 1 : -1;
  m_level[var] = static_cast<int>(m_decisions.size());
  m_trail.push_back(lit);
  return theory_assert(lit);
}

bool GroundSolver::theory_assert(int lit) {
  TermId atom = m_atoms[lit >> 1];
  bool val = !(lit & 1);
  const TermData& d = m_bank.term(atom);
  if (m_bank.is_eq(atom)) {
    CcResult r = val ? m_eg.assert_eq(d.args[0], d.args[1])
                     : m_eg.assert_diseq(d.args[0], d.args[1]);
    return r == CcResult::ok;
  }
  if (d.args.empty()) return true;  // no congruence constraints on nullary atoms
  CcResult r = val ? m_eg.assert_eq(atom, m_true)
                   : m_eg.assert_diseq(atom, m_true);
  return r == CcResult::ok;
}

bool GroundSolver::propagate() {
  while (m_qhead < m_trail.size()) {
    int p = m_trail[m_qhead++];
    int falsified = p ^ 1;
    std::vector<int> watchers = std::move(m_watches[falsified]);
    m_watches[falsified].clear();
    std::size_t i = 0;
    auto abort_with_rest = [&]() {
      for (; i < watchers.size(); ++i)
        m_watches[falsified].push_back(watchers[i]);
    };
    auto lit_true = [&](int l) {
      int v = m_value[l >> 1];
      return (l & 1) ? v < 0 : v > 0;
    };
    auto lit_false = [&](int l) {
      int v = m_value[l >> 1];
      return (l & 1) ? v > 0 : v < 0;
    };
    for (; i < watchers.size(); ++i) {
      int ci = watchers[i];
      std::vector<int>& c = m_clauses[ci];
      if (c[0] == falsified) std::swap(c[0], c[1]);
      if (lit_true(c[0])) {
        m_watches[falsified].push_back(ci);
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (!lit_false(c[k])) {
          std::swap(c[1], c[k]);
          m_watches[c[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      m_watches[falsified].push_back(ci);
      if (lit_false(c[0])) {  // conflict
        ++i;
        abort_with_rest();
        return false;
      }
      if (!assign(c[0])) {  // theory conflict on propagation
        ++i;
        abort_with_rest();
        return false;
      }
    }
  }
  return true;
}

void GroundSolver::undo_to(std::size_t trail_mark) {
  while (m_trail.size() > trail_mark) {
    int lit = m_trail.back();
    m_trail.pop_back();
    m_value[lit >> 1] = 0;
  }
  m_qhead = trail_mark;
}

bool GroundSolver::backtrack() {
  while (!m_decisions.empty() && m_decisions.back().flipped) {
    undo_to(m_decisions.back().trail_mark);
    m_eg.pop();
    m_decisions.pop_back();
  }
  if (m_decisions.empty()) return false;
  DecisionRec& d = m_decisions.back();
  undo_to(d.trail_mark);
  m_eg.pop();
  m_eg.push();
  d.value = !d.value;
  d.flipped = true;
  int lit = (d.var << 1) | (d.value ? 0 : 1);
  if (!assign(lit)) return backtrack();
  return true;
}

void GroundSolver::finish_model() {
  m_model.values.clear();
  m_model.trail.clear();
  for (int lit : m_trail) {
    int var = lit >> 1;
    bool val = !(lit & 1);
    m_model.values.emplace(m_atoms[var], val);
    m_model.trail.push_back({Literal{m_atoms[var], val}, m_level[var]});
  }
}

Status GroundSolver::solve() {
  if (m_has_empty) return Status::unsat;
  for (int lit : m_initial_units)
    if (!assign(lit)) return Status::unsat;
  for (;;) {
    if (!propagate()) {
      if (!backtrack()) return Status::unsat;
      continue;
    }
    int next = -1;
    for (std::size_t v = 0; v < m_atoms.size(); ++v)
      if (m_value[v] == 0) {
        next = static_cast<int>(v);
        break;
      }
    if (next < 0) {
      finish_model();
      return Status::sat;
    }
    m_eg.push();
    m_decisions.push_back(DecisionRec{next, true, false, m_trail.size()});
    if (!assign(next << 1)) {
      if (!backtrack()) return Status::unsat;
    }
  }
}

GroundResult ground_solve(TermBank& bank, const std::vector<Clause>& clauses) {
  GroundSolver gs(bank, clauses, nullptr);
  GroundResult out;
  out.status = gs.solve();
  if (out.status == Status::sat) out.model = gs.model();
  return out;
}

// ---------------------------------------------------------------------------
// External backend

namespace {

bool term_uses_int(const TermBank& bank, TermId t) {
  const TermData& d = bank.term(t);
  if (!d.is_var && d.sort == bank.int_sort()) return true;
  for (TermId a : d.args)
    if (term_uses_int(bank, a)) return true;
  return false;
}

void emit_declarations(std::ostream& os, const TermBank& bank) {
  for (SortId s = 0; s < bank.num_sorts(); ++s)
    if (!bank.sort(s).builtin)
      os << "(declare-sort " << bank.sort(s).name << " 0)\n";
  for (SymbolId f = 0; f < bank.num_symbols(); ++f) {
    const SymbolData& sym = bank.symbol(f);
    if (sym.builtin != Builtin::none && sym.builtin != Builtin::instclosure)
      continue;
    os << "(declare-fun " << sym.name << " (";
    for (std::size_t i = 0; i < sym.arg_sorts.size(); ++i) {
      if (i) os << " ";
      os << bank.sort(sym.arg_sorts[i]).name;
    }
    os << ") " << bank.sort(sym.result).name << ")\n";
  }
}

}  // namespace

std::string emit_smtlib_ground(const TermBank& bank,
                               const std::vector<Clause>& clauses) {
  bool uses_int = false;
  for (const Clause& c : clauses)
    for (const Literal& l : c) uses_int = uses_int || term_uses_int(bank, l.atom);
  std::ostringstream os;
  os << "(set-logic " << (uses_int ? "QF_UFLIA" : "QF_UF") << ")\n";
  emit_declarations(os, bank);
  for (const Clause& c : clauses)
    os << "(assert " << clause_to_string(bank, c) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

BackendResult run_backend(const std::string& cmd, const std::string& smtlib,
                          std::optional<std::chrono::milliseconds> timeout) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() /
                  ("lte_backend_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter++) + ".smt2");
  {
    std::ofstream out(path);
    out << smtlib;
  }
  std::string line;
  std::string full = cmd;
  auto pos = full.find("{file}");
  if (pos != std::string::npos)
    full.replace(pos, 6, path.string());
  else
    full += " " + path.string();
  if (timeout && fs::exists("/usr/bin/timeout")) {
    double secs = std::chrono::duration<double>(*timeout).count();
    full = "/usr/bin/timeout " + std::to_string(secs) + " " + full;
  }
  BackendResult res;
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) {
    res.status = Status::unknown;
    res.detail = "cannot spawn backend";
    fs::remove(path);
    return res;
  }
  char buf[256];
  if (::fgets(buf, sizeof buf, pipe)) line = buf;
  int rc = ::pclose(pipe);
  fs::remove(path);
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
    line.pop_back();
  if (line == "sat")
    res.status = Status::sat;
  else if (line == "unsat")
    res.status = Status::unsat;
  else {
    res.status = Status::unknown;
    res.detail = line.empty() ? "backend exited with code " + std::to_string(rc)
                              : line;
  }
  res.detail = res.detail.empty() ? line : res.detail;
  return res;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

struct TimeoutSignal {};

// Substitutes bound variables, leaving unbound ones in place.
TermId apply_partial(TermBank& bank, TermId t, const Substitution& sigma) {
  const TermData& d = bank.term(t);
  if (d.ground) return t;
  if (d.is_var) {
    auto img = sigma.lookup(d.head);
    return img ? *img : t;
  }
  std::vector<TermId> args = d.args;
  SymbolId head = d.head;
  bool any = false;
  for (TermId& a : args) {
    TermId na = apply_partial(bank, a, sigma);
    any = any || na != a;
    a = na;
  }
  return any ? bank.mk_app(head, args) : t;
}

Clause apply_partial(TermBank& bank, const Clause& c, const Substitution& s) {
  Clause out;
  out.reserve(c.size());
  for (const Literal& l : c)
    out.push_back(Literal{apply_partial(bank, l.atom, s), l.positive});
  return out;
}

}  // namespace

Solver::Solver(PreparedProblem& prep, SolveOptions opts)
    : m_prep(&prep), m_opts(std::move(opts)) {
  for (TermId t : prep.base_terms) m_allowed_terms.insert(t);
  for (TermId t : prep.psi_terms) m_allowed_terms.insert(t);
  if (m_opts.timeout) {
    m_deadline = std::chrono::steady_clock::now() + *m_opts.timeout;
    m_has_deadline = true;
  }
}

bool Solver::timed_out() const {
  return m_has_deadline && std::chrono::steady_clock::now() >= m_deadline;
}

std::vector<std::vector<Substitution>>& Solver::eager_substitutions() {
  if (m_eager_subs) return *m_eager_subs;
  TermBank& bank = m_prep->problem.bank;

  std::vector<TermId> universe = m_prep->base_terms;
  universe.insert(universe.end(), m_prep->psi_terms.begin(),
                  m_prep->psi_terms.end());
  std::sort(universe.begin(), universe.end());

  std::unordered_map<SymbolId, std::vector<TermId>> apps;
  for (TermId t : universe) apps[bank.term(t).head].push_back(t);

  m_eager_subs.emplace();
  for (const PreparedAxiom& ax : m_prep->axioms) {
    std::vector<Substitution> subs;
    std::set<std::vector<TermId>> seen;
    Substitution sigma;

    std::function<void(std::size_t)> free_walk;
    std::function<void(std::size_t)> pat_walk;

    auto emit = [&]() {
      std::vector<TermId> images;
      images.reserve(ax.vars.size());
      for (VarId v : ax.vars) images.push_back(*sigma.lookup(v));
      if (seen.insert(images).second) subs.push_back(sigma);
    };

    free_walk = [&](std::size_t i) {
      if (timed_out()) throw TimeoutSignal{};
      if (i == ax.free_vars.size()) {
        emit();
        return;
      }
      SortId sort = bank.var(ax.free_vars[i]).sort;
      for (TermId t : universe) {
        if (bank.sort_of(t) != sort) continue;
        sigma.bind(ax.free_vars[i], t);
        free_walk(i + 1);
      }
    };

    pat_walk = [&](std::size_t pi) {
      if (pi == ax.patterns.size()) {
        Substitution saved = sigma;
        free_walk(0);
        sigma = std::move(saved);
        return;
      }
      const TermData& pat = bank.term(ax.patterns[pi]);
      auto it = apps.find(pat.head);
      if (it == apps.end()) return;
      for (TermId anchor : it->second) {
        const TermData& ad = bank.term(anchor);
        Substitution saved = sigma;
        bool ok = true;
        for (std::size_t i = 0; ok && i < pat.args.size(); ++i) {
          const TermData& pd = bank.term(pat.args[i]);
          if (pd.is_var) {
            auto bound = sigma.lookup(pd.head);
            if (bound)
              ok = *bound == ad.args[i];
            else
              sigma.bind(pd.head, ad.args[i]);
          } else {
            ok = pat.args[i] == ad.args[i];
          }
        }
        if (ok) pat_walk(pi + 1);
        sigma = saved;
      }
    };

    pat_walk(0);
    m_eager_subs->push_back(std::move(subs));
  }
  return *m_eager_subs;
}

std::uint64_t Solver::eager_bound() {
  if (!m_eager_bound) {
    std::uint64_t n = 0;
    for (const auto& subs : eager_substitutions()) n += subs.size();
    m_eager_bound = n;
  }
  return *m_eager_bound;
}

std::vector<Instance> Solver::eager_instances() {
  TermBank& bank = m_prep->problem.bank;
  std::vector<Instance> out;
  const auto& subs = eager_substitutions();
  for (std::uint32_t ai = 0; ai < subs.size(); ++ai) {
    const PreparedAxiom& ax = m_prep->axioms[ai];
    for (const Substitution& sigma : subs[ai]) {
      Instance inst;
      inst.axiom = ai;
      inst.subst = sigma;
      for (VarId v : ax.vars) inst.key.push_back(*sigma.lookup(v));
      inst.clause = apply_subst(bank, ax.body, sigma);
      inst.round = 0;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<Instance> Solver::d_t1_round(const EGraph& eg, int stage_limit,
                                         bool special_only,
                                         std::uint32_t round) {
  TermBank& bank = m_prep->problem.bank;
  std::vector<Instance> out;
  for (std::uint32_t ai = 0; ai < m_prep->axioms.size(); ++ai) {
    const PreparedAxiom& ax = m_prep->axioms[ai];
    if (ax.stage > stage_limit) continue;
    std::vector<MatchResult> results =
        ematch(eg, ax.vars, ax.patterns, ax.free_vars, stage_limit);
    for (MatchResult& r : results) {
      if (special_only && !ax.same_sort_groups.empty()) {
        bool diagonal = true;
        for (const auto& group : ax.same_sort_groups)
          for (std::size_t i = 1; diagonal && i < group.size(); ++i)
            diagonal = eg.are_equal(*r.subst.lookup(group[0]),
                                    *r.subst.lookup(group[i]));
        if (!diagonal) continue;
      }
      std::vector<TermId> images;
      images.reserve(ax.vars.size());
      for (VarId v : ax.vars) images.push_back(*r.subst.lookup(v));
      if (!m_cache.insert(ai, r.canonical_key, images)) continue;
      Instance inst;
      inst.axiom = ai;
      inst.subst = std::move(r.subst);
      inst.key = std::move(r.canonical_key);
      inst.clause = apply_subst(bank, ax.body, inst.subst);
      inst.round = round;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<Clause> Solver::split_clauses() {
  TermBank& bank = m_prep->problem.bank;
  std::vector<std::pair<TermId, TermId>> pairs;
  if (m_opts.eq_split_auto) {
    // same-sort constants occurring in extension-term argument positions
    std::set<TermId> consts;
    for (TermId t : m_prep->base_terms) {
      const TermData& d = bank.term(t);
      const SymbolData& sym = bank.symbol(d.head);
      if (!(sym.kind == SymbolKind::function && sym.is_extension)) continue;
      for (TermId a : d.args) {
        const TermData& ad = bank.term(a);
        if (ad.args.empty() && bank.symbol(ad.head).builtin == Builtin::none)
          consts.insert(a);
      }
    }
    std::vector<TermId> list(consts.begin(), consts.end());
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j)
        if (bank.sort_of(list[i]) == bank.sort_of(list[j]))
          pairs.emplace_back(list[i], list[j]);
  }
  for (const auto& [na, nb] : m_opts.eq_split_pairs) {
    auto fa = bank.find_symbol(na);
    auto fb = bank.find_symbol(nb);
    if (!fa || bank.symbol(*fa).arity() != 0)
      throw Error("eq-split: unknown constant '" + na + "'");
    if (!fb || bank.symbol(*fb).arity() != 0)
      throw Error("eq-split: unknown constant '" + nb + "'");
    TermId ta = bank.mk_const(*fa);
    TermId tb = bank.mk_const(*fb);
    if (bank.sort_of(ta) != bank.sort_of(tb))
      throw SortError("eq-split: cross-sort pair " + na + ", " + nb);
    pairs.emplace_back(ta, tb);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Clause> out;
  for (const auto& [a, b] : pairs) {
    TermId eq = bank.mk_eq(a, b);
    out.push_back(Clause{Literal{eq, true}, Literal{eq, false}});
  }
  return out;
}

void Solver::check_no_new_terms(const Clause& c) {
  TermBank& bank = m_prep->problem.bank;
  for (const Literal& l : c) {
    std::vector<TermId> roots{l.atom};
    for (TermId t : subterms(bank, roots)) {
      if (m_allowed_terms.count(t)) continue;
      const TermData& d = bank.term(t);
      const SymbolData& sym = bank.symbol(d.head);
      bool pattern_headed =
          sym.kind == SymbolKind::function && sym.is_extension;
      bool args_allowed = true;
      for (TermId a : d.args)
        args_allowed = args_allowed && m_allowed_terms.count(a) > 0;
      if (!pattern_headed || !args_allowed)
        throw InternalError("instance introduced ground term '" +
                            term_to_string(bank, t) + "'");
      m_allowed_terms.insert(t);
    }
  }
}

Verdict Solver::decide() {
  auto t0 = std::chrono::steady_clock::now();
  TermBank& bank = m_prep->problem.bank;
  Verdict v;
  Stats& st = v.stats;
  bool arith = m_prep->arith_present;
  bool have_backend = !m_opts.backend_cmd.empty();

  auto backend_timeout = [&]() -> std::optional<std::chrono::milliseconds> {
    if (!m_has_deadline) return std::nullopt;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        m_deadline - std::chrono::steady_clock::now());
    return left.count() > 0 ? left : std::chrono::milliseconds(1);
  };

  try {
    st.eager_bound = eager_bound();
    std::vector<Clause> clauses = m_prep->ground_clauses;
    for (Clause& c : split_clauses()) clauses.push_back(std::move(c));

    if (m_opts.mode == SolveOptions::Mode::eager) {
      std::vector<Instance> insts = eager_instances();
      st.instances = insts.size();
      for (const Instance& inst : insts) {
        check_no_new_terms(inst.clause);
        clauses.push_back(inst.clause);
      }
      GroundSolver gs(bank, clauses, m_prep);
      ++st.ground_checks;
      Status s = gs.solve();
      if (s == Status::unsat) {
        v.status = Status::unsat;
      } else if (!arith) {
        v.status = Status::sat;
      } else if (!have_backend) {
        v.status = Status::unknown;
        v.reason = "arithmetic backend required";
      } else {
        ++st.backend_checks;
        BackendResult r = run_backend(
            m_opts.backend_cmd, emit_smtlib_ground(bank, clauses),
            backend_timeout());
        v.status = r.status;
        if (r.status == Status::unknown) v.reason = "backend: " + r.detail;
      }
    } else {
      int max_stage = m_prep->psi_terms.empty() ? 0 : 1;
      int stage = (m_opts.staged_psi && max_stage > 0) ? 0 : max_stage;
      bool special = m_opts.special_case;
      std::uint32_t round_no = 0;
      for (;;) {
        if (timed_out()) throw TimeoutSignal{};
        GroundSolver gs(bank, clauses, m_prep);
        ++st.ground_checks;
        if (gs.solve() == Status::unsat) {
          v.status = Status::unsat;
          break;
        }
        if (arith && have_backend) {
          ++st.backend_checks;
          BackendResult r = run_backend(
              m_opts.backend_cmd, emit_smtlib_ground(bank, clauses),
              backend_timeout());
          if (r.status == Status::unsat) {
            v.status = Status::unsat;
            break;
          }
          if (r.status == Status::unknown) {
            v.status = Status::unknown;
            v.reason = "backend: " + r.detail;
            break;
          }
        }

        // E for matching: the model e-graph for pure EUF; only forced
        // (decision level 0) literals when arithmetic atoms are around, so
        // dedup modulo ~_E stays sound w.r.t. the backend's models.
        std::optional<EGraph> top;
        const EGraph* eg = &gs.egraph();
        if (arith) {
          top.emplace(bank);
          top->register_term(bank.true_term(), 0);
          for (TermId t : m_prep->base_terms) top->register_term(t, 0);
          for (TermId t : m_prep->psi_terms) top->register_term(t, 1);
          for (const auto& [lit, level] : gs.model().trail) {
            if (level != 0) continue;
            const TermData& d = bank.term(lit.atom);
            CcResult r = CcResult::ok;
            if (bank.is_eq(lit.atom)) {
              top->register_term(d.args[0], 0);
              top->register_term(d.args[1], 0);
              r = lit.positive ? top->assert_eq(d.args[0], d.args[1])
                               : top->assert_diseq(d.args[0], d.args[1]);
            } else if (!d.args.empty()) {
              top->register_term(lit.atom, 0);
              r = lit.positive ? top->assert_eq(lit.atom, bank.true_term())
                               : top->assert_diseq(lit.atom, bank.true_term());
            }
            if (r != CcResult::ok)
              throw InternalError("inconsistent top-level literal set");
          }
          eg = &*top;
        }

        ++round_no;
        std::vector<Instance> z = d_t1_round(*eg, stage, special, round_no);
        ++st.rounds;
        st.round_instances.push_back(static_cast<std::uint32_t>(z.size()));
        if (z.empty()) {
          if (special) {
            special = false;  // special cases saturated: full rounds now
            continue;
          }
          if (stage < max_stage) {
            ++stage;  // Psi terms join the matchable universe
            special = m_opts.special_case;
            continue;
          }
          if (arith && !have_backend) {
            v.status = Status::unknown;
            v.reason = "arithmetic backend required";
          } else {
            v.status = Status::sat;
          }
          break;
        }
        st.instances += z.size();
        if (st.instances > st.eager_bound)
          throw InternalError("instantiation bound exceeded: " +
                              std::to_string(st.instances) + " > " +
                              std::to_string(st.eager_bound));
        for (Instance& inst : z) {
          check_no_new_terms(inst.clause);
          clauses.push_back(std::move(inst.clause));
        }
      }
    }
  } catch (const TimeoutSignal&) {
    v.status = Status::unknown;
    v.reason = "timeout";
  }
  v.stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return v;
}

// ---------------------------------------------------------------------------
// EPR export

EprExport epr_export(PreparedProblem& prep, bool force) {
  TermBank& bank = prep.problem.bank;
  EprExport out;

  // Top-level equalities: unit ground clauses only.
  EGraph eg(bank);
  eg.register_term(bank.true_term(), 0);
  for (TermId t : prep.base_terms) eg.register_term(t, 0);
  for (TermId t : prep.psi_terms) eg.register_term(t, 1);
  for (const Clause& c : prep.ground_clauses) {
    if (c.size() != 1) continue;
    const Literal& l = c[0];
    const TermData& d = bank.term(l.atom);
    if (bank.is_eq(l.atom)) {
      eg.register_term(d.args[0], 0);
      eg.register_term(d.args[1], 0);
      if (l.positive)
        eg.assert_eq(d.args[0], d.args[1]);
      else
        eg.assert_diseq(d.args[0], d.args[1]);
    } else if (!d.args.empty()) {
      eg.register_term(l.atom, 0);
      if (l.positive)
        eg.assert_eq(l.atom, bank.true_term());
      else
        eg.assert_diseq(l.atom, bank.true_term());
    }
  }

  std::ostringstream body;
  bool uses_int = false;
  auto emit_clause = [&](const Clause& c) {
    for (const Literal& l : c) uses_int = uses_int || term_uses_int(bank, l.atom);
    body << "(assert " << clause_to_string(bank, c) << ")\n";
  };
  auto emit_forall = [&](const std::vector<VarId>& vars, const Clause& c) {
    for (const Literal& l : c) uses_int = uses_int || term_uses_int(bank, l.atom);
    body << "(assert (forall (";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) body << " ";
      body << "(" << bank.var(vars[i]).name << " "
           << bank.sort(bank.var(vars[i]).sort).name << ")";
    }
    body << ") " << clause_to_string(bank, c) << "))\n";
  };

  for (const Clause& c : prep.ground_clauses) emit_clause(c);

  // Syntactic EPR shape: no variable below a function symbol.
  auto violates_epr = [&](const Clause& c) {
    std::function<bool(TermId)> var_below_fn = [&](TermId t) -> bool {
      const TermData& d = bank.term(t);
      if (d.ground || d.is_var) return false;
      if (bank.symbol(d.head).kind == SymbolKind::function) return true;
      for (TermId a : d.args)
        if (var_below_fn(a)) return true;
      return false;
    };
    for (const Literal& l : c) {
      const TermData& d = bank.term(l.atom);
      if (d.ground) continue;
      for (TermId a : d.args)
        if (!bank.term(a).ground && var_below_fn(a)) return true;
    }
    return false;
  };

  for (const PreparedAxiom& ax : prep.axioms) {
    if (ax.patterns.empty()) {
      emit_forall(ax.vars, ax.body);
      continue;
    }
    std::vector<VarId> pattern_vars;
    for (VarId v : ax.vars)
      if (std::find(ax.free_vars.begin(), ax.free_vars.end(), v) ==
          ax.free_vars.end())
        pattern_vars.push_back(v);
    std::vector<MatchResult> results =
        ematch(eg, pattern_vars, ax.patterns, {}, /*stage_limit=*/1);
    bool bad = false;
    for (const MatchResult& r : results) {
      Clause partial = apply_partial(bank, ax.body, r.subst);
      if (ax.free_vars.empty()) {
        emit_clause(partial);
      } else {
        if (violates_epr(partial)) bad = true;
        emit_forall(ax.free_vars, partial);
      }
    }
    if (bad)
      out.report.push_back("axiom " + std::to_string(ax.original_index) +
                           ": not reducible to EPR shape");
  }

  if (!out.report.empty() && !force) {
    out.ok = false;
    return out;
  }

  std::ostringstream os;
  os << "(set-logic " << (uses_int ? "UFLIA" : "UF") << ")\n";
  emit_declarations(os, bank);
  os << body.str();
  os << "(check-sat)\n";
  out.text = os.str();
  out.ok = true;
  return out;
}

}  // namespace lte
