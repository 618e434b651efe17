// preprocess.hpp -- lowering parsed problems into the solver's normal form.
//
// Axiom bodies are clausified (no fresh symbols), flattened and linearized
// with guard equalities, validated against the locality shape assumption,
// and annotated with patterns. Ground assertions are clausified
// Tseitin-style. Psi rules produce witness terms injected as instclosure
// assertions and tagged stage 1.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lte/core.hpp"
#include "lte/frontend.hpp"

namespace lte {

struct PreparedAxiom {
  std::uint32_t original_index = 0;  // index into Problem::axioms
  std::vector<VarId> vars;           // quantified vars, fresh guards included
  Clause body;                       // flat and linear
  std::vector<TermId> patterns;      // extension apps containing variables
  std::vector<VarId> free_vars;      // vars covered by no pattern
  bool epr_style = false;            // no variable below any function symbol
  int stage = 0;
  // Same-sort variable groups of size >= 2, for the special-case strategy.
  std::vector<std::vector<VarId>> same_sort_groups;
};

struct PreparedProblem {
  Problem problem;  // owns the bank; instclosure assertions appended
  std::vector<Clause> ground_clauses;
  std::vector<PreparedAxiom> axioms;
  // st(G u K_e) plus witness constants, sorted by id; stage 0.
  std::vector<TermId> base_terms;
  // Terms new in Psi(st(G u K_e)), sorted by id; stage 1.
  std::vector<TermId> psi_terms;
  bool arith_present = false;

  bool is_stage1(TermId t) const;
};

// -- axiom clausification (distribution; never introduces symbols) ---------

struct VarClause {
  std::vector<VarId> vars;  // occurring variables, in quantifier order
  Clause clause;
};

// Splits an axiom body into clauses. Tautologies are dropped; an
// always-false body yields one empty clause. Throws UnsupportedError if the
// body is not built from and/or/not/=>/atoms or if distribution explodes.
std::vector<VarClause> clausify_axiom(TermBank& bank, const AxiomDecl& ax);

// -- flattening and linearization -------------------------------------------

struct FlatAxiom {
  std::vector<VarId> vars;
  Clause clause;
  bool changed = false;  // false iff input was already flat and linear
};

// Rewrites nested variable-containing applications to fresh guarded
// variables and renames variables occurring under more than one application,
// in the style of "replace f(g(x)) by f(z) under guards x = y and z = g(y)".
// Idempotent on flat, linear input. Purely syntactic: the locality shape
// check is separate (validate_local_shape).
FlatAxiom flatten_linearize(TermBank& bank, const std::vector<VarId>& vars,
                            const Clause& clause);

// Standalone checker for the flat/linear invariant.
bool is_flat_linear(const TermBank& bank, const Clause& clause);

// Rejects variables below non-extension function symbols (LocalityError).
void validate_local_shape(const TermBank& bank, const Clause& clause);

// Maximal extension-headed, variable-containing subterms, in first-occurrence
// order. `user_patterns`, when non-empty, are validated against the computed
// set and returned verbatim (throws Error for invalid patterns).
std::vector<TermId> extract_patterns(TermBank& bank, const FlatAxiom& axiom,
                                     std::span<const TermId> user_patterns);

// Assembles a PreparedAxiom from a clausified axiom clause.
PreparedAxiom make_prepared_axiom(TermBank& bank, std::uint32_t original_index,
                                  const std::vector<VarId>& vars,
                                  const Clause& clause,
                                  std::span<const TermId> user_patterns);

// -- Psi closure -------------------------------------------------------------

// One application of the rule templates to `ground_terms` (sorted ids).
// template[t] is added only when every proper subterm of template[t] along
// the hole path already occurs in the input; the result includes the input
// and all subterms of the added terms, sorted.
std::vector<TermId> psi_closure(TermBank& bank,
                                std::span<const TermId> ground_terms,
                                std::span<const PsiRule> rules);

// Appends instclosure(t) unit assertions for each term of `new_terms`.
void inject_closure_witnesses(Problem& p, std::span<const TermId> new_terms);

// -- ground clausification ---------------------------------------------------

// Tseitin-style: clause-shaped formulas are emitted directly, anything else
// gets definitional Bool atoms (p$0, p$1, ...).
std::vector<Clause> clausify_ground(TermBank& bank,
                                    std::span<const TermId> formulas);

// -- pipeline ----------------------------------------------------------------

PreparedProblem prepare(Problem p);

}  // namespace lte
