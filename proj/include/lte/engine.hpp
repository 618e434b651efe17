// engine.hpp -- the solving core.
//
// A chronological DPLL solver with two-watched-literal propagation and the
// e-graph as theory checker decides the ground fragment (EUF natively,
// arithmetic via an external backend process). On top of it, the saturation
// loop generates axiom instances by E-matching round by round, deduplicated
// modulo ~_E, until no new instances exist (sat) or the ground set becomes
// unsatisfiable (unsat). Strategies: eager upfront instantiation, plain
// incremental, staged Psi instantiation, equality splits, special-case-first.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lte/core.hpp"
#include "lte/egraph.hpp"
#include "lte/ematch.hpp"
#include "lte/preprocess.hpp"

namespace lte {

enum class Status : std::uint8_t { sat, unsat, unknown };
std::string to_string(Status s);

struct Stats {
  std::uint64_t instances = 0;      // instances generated by this run
  std::uint64_t eager_bound = 0;    // |K_e[G]|
  std::uint64_t rounds = 0;
  std::uint64_t ground_checks = 0;  // internal DPLL+EUF checks
  std::uint64_t backend_checks = 0;
  std::vector<std::uint32_t> round_instances;
  double wall_ms = 0.0;

  // Everything except wall time.
  bool counters_equal(const Stats& o) const;
};

struct Verdict {
  Status status = Status::unknown;
  std::string reason;  // set for unknown
  Stats stats;
};

// An axiom paired with a substitution: K[sigma].
struct Instance {
  std::uint32_t axiom = 0;  // index into PreparedProblem::axioms
  Substitution subst;
  std::vector<TermId> key;  // canonical e-class key at generation time
  Clause clause;
  std::uint32_t round = 0;
};

// Z: per-axiom sets of canonical keys and syntactic image tuples already
// instantiated. Monotone for the whole solve; never unwound on backtracking.
class InstanceCache {
 public:
  // Records and returns true iff neither the key (mod ~_E at generation
  // time) nor the exact image tuple was seen for this axiom.
  bool insert(std::uint32_t axiom, const std::vector<TermId>& key,
              const std::vector<TermId>& images);
  std::uint64_t size() const { return m_count; }

 private:
  struct PerAxiom {
    std::set<std::vector<TermId>> keys;
    std::set<std::vector<TermId>> images;
  };
  std::map<std::uint32_t, PerAxiom> m_axioms;
  std::uint64_t m_count = 0;
};

struct SolveOptions {
  enum class Mode : std::uint8_t { eager, ematch };
  Mode mode = Mode::ematch;
  bool staged_psi = false;
  bool special_case = false;
  bool eq_split_auto = false;
  // Constant-name pairs for explicit splits; resolved against the signature.
  std::vector<std::pair<std::string, std::string>> eq_split_pairs;
  std::string backend_cmd;  // empty: no external backend
  std::optional<std::chrono::milliseconds> timeout;
};

// ---------------------------------------------------------------------------
// Ground solving (DPLL + EUF)

struct GroundModel {
  std::unordered_map<TermId, bool> values;  // atom -> assignment
  std::vector<std::pair<Literal, int>> trail;  // literal, decision level
};

class GroundSolver {
 public:
  // `prep` supplies stage tags and the pre-registered term universe; may be
  // null for standalone use (atoms only).
  GroundSolver(TermBank& bank, const std::vector<Clause>& clauses,
               const PreparedProblem* prep);

  Status solve();  // sat or unsat
  const GroundModel& model() const { return m_model; }
  const EGraph& egraph() const { return m_eg; }

 private:
  TermBank& m_bank;
  EGraph m_eg;
  TermId m_true;

  std::vector<TermId> m_atoms;  // prop var -> atom term, ascending ids
  std::unordered_map<TermId, int> m_atom_of;
  std::vector<std::vector<int>> m_clauses;  // lit encoding: 2*var + (neg?1:0)
  std::vector<std::vector<int>> m_watches;  // lit -> clause indices
  std::vector<int> m_initial_units;
  bool m_has_empty = false;

  std::vector<signed char> m_value;  // 0 unassigned, 1 true, -1 false
  std::vector<int> m_level;
  std::vector<int> m_trail;  // assigned lits in order
  std::size_t m_qhead = 0;
  struct DecisionRec {
    int var;
    bool value;
    bool flipped;
    std::size_t trail_mark;
  };
  std::vector<DecisionRec> m_decisions;
  GroundModel m_model;

  int lit_of(TermId atom, bool positive) const;
  bool assign(int lit);          // enqueue + theory; false on theory conflict
  bool theory_assert(int lit);
  bool propagate();              // false on conflict
  bool backtrack();              // false when at level 0 (unsat)
  void undo_to(std::size_t trail_mark);
  void finish_model();
};

// Standalone ground satisfiability check (EUF only).
struct GroundResult {
  Status status = Status::unknown;
  GroundModel model;  // meaningful for sat
};
GroundResult ground_solve(TermBank& bank, const std::vector<Clause>& clauses);

// ---------------------------------------------------------------------------
// External backend

struct BackendResult {
  Status status = Status::unknown;
  std::string detail;  // raw first line / error description
};

// Writes `smtlib` to a temp file and runs `cmd` on it ("{file}" placeholder
// substituted, otherwise the path is appended). First stdout line must be
// sat/unsat/unknown.
BackendResult run_backend(const std::string& cmd, const std::string& smtlib,
                          std::optional<std::chrono::milliseconds> timeout);

// Ground clause set as standalone SMT-LIB 2 text; the logic line is
// QF_UFLIA when Int-sorted terms occur, QF_UF otherwise.
std::string emit_smtlib_ground(const TermBank& bank,
                               const std::vector<Clause>& clauses);

// ---------------------------------------------------------------------------
// Decision engine

class Solver {
 public:
  Solver(PreparedProblem& prep, SolveOptions opts);

  Verdict decide();

  // K_e[G]: every local instance, upfront. Substitution images range over
  // the registered term universe only (no new terms); deduplicated
  // syntactically per axiom.
  std::vector<Instance> eager_instances();
  std::uint64_t eager_bound();

  // One saturation round against a model e-graph: matches all axioms at the
  // stage limit, filters against the cache, returns the new instances (their
  // keys now recorded). `special_only` keeps diagonal matches only.
  std::vector<Instance> d_t1_round(const EGraph& eg, int stage_limit,
                                   bool special_only, std::uint32_t round);

  const PreparedProblem& prepared() const { return *m_prep; }

 private:
  PreparedProblem* m_prep;
  SolveOptions m_opts;
  InstanceCache m_cache;
  std::optional<std::uint64_t> m_eager_bound;
  std::optional<std::vector<std::vector<Substitution>>> m_eager_subs;
  std::unordered_set<TermId> m_allowed_terms;
  std::chrono::steady_clock::time_point m_deadline;
  bool m_has_deadline = false;

  std::vector<std::vector<Substitution>>& eager_substitutions();
  std::vector<Clause> split_clauses();
  void check_no_new_terms(const Clause& c);
  bool timed_out() const;
};

// ---------------------------------------------------------------------------
// EPR export

struct EprExport {
  std::string text;
  std::vector<std::string> report;  // axioms not reducible to EPR shape
  bool ok = false;
};

// Partially instantiates pattern-bound variables via one E-matching pass
// modulo top-level ground equalities; remaining universals are EPR-shaped.
// Refuses (ok = false, text empty) if some axiom is not reducible, unless
// `force` is set.
EprExport epr_export(PreparedProblem& prep, bool force = false);

}  // namespace lte
