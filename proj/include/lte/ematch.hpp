// ematch.hpp -- the E-matching procedure: all substitutions, modulo the
// e-graph's equivalence, under which every pattern is congruent to a
// registered ground term.
//
// Patterns are flat extension applications f(x1,...,xn) (ground arguments
// permitted); variables may be shared across patterns and repeated within
// one. Variables in `free_vars` occur in no pattern and enumerate one
// representative image per e-class of their sort. `stage_limit` caps both
// the anchors used and the images produced: stage-1 (Psi-witness) terms are
// suppressed at limit 0.
//
// A substitution qualifies at stage s iff every image has stage <= s and, for
// every pattern p, some registered application t of p's head with
// stage(t) <= s satisfies E |= p[sigma] ~ t. Matching is complete for that
// semantics modulo ~_E, with at most one result per canonical key (the tuple
// of image class representatives in `vars` order). Anchors are assumed
// stage-monotone: an application's stage is at least the stage of each
// argument, which registration order guarantees in the solver.

#pragma once

#include <span>
#include <vector>

#include "lte/core.hpp"
#include "lte/egraph.hpp"

namespace lte {

struct MatchResult {
  Substitution subst;                 // variable -> registered ground term
  std::vector<TermId> canonical_key;  // class reps of images, in `vars` order
  bool stage1 = false;                // some image is a stage-1 term

  bool operator==(const MatchResult&) const = default;
};

// `vars` fixes the key order and must cover every pattern variable and every
// free variable. Deterministic: identical e-graph states yield identical
// result sets in identical order.
std::vector<MatchResult> ematch(const EGraph& eg, std::span<const VarId> vars,
                                std::span<const TermId> patterns,
                                std::span<const VarId> free_vars,
                                int stage_limit);

// Brute-force oracle for the same problem: enumerates every assignment of
// registered terms to variables and filters by congruence. Independent of
// the matcher's anchor-and-join strategy; intended for testing.
std::vector<MatchResult> bf_match_oracle(const EGraph& eg,
                                         std::span<const VarId> vars,
                                         std::span<const TermId> patterns,
                                         std::span<const VarId> free_vars,
                                         int stage_limit);

}  // namespace lte
