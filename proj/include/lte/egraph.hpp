// egraph.hpp -- congruence closure over ground terms with disequalities and
// exact push/pop.
//
// The EGraph represents E and ~_E: a union-find over registered term ids,
// closed under congruence after every mutation, plus a store of asserted
// disequalities checked against the closure. Every mutation is trail-recorded
// so that pop() restores the pre-push state exactly (no path compression).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lte/core.hpp"

namespace lte {

enum class CcResult : std::uint8_t { ok, conflict };

class EGraph {
 public:
  explicit EGraph(const TermBank& bank) : m_bank(&bank) {}

  EGraph(const EGraph&) = delete;
  EGraph& operator=(const EGraph&) = delete;
  EGraph(EGraph&&) = default;
  EGraph& operator=(EGraph&&) = default;

  // Registers t and all its subterms (ground terms only). Congruence with
  // previously registered applications is propagated immediately. `stage`
  // tags Psi-witness terms (1); already-registered terms keep their tag.
  void register_term(TermId t, int stage = 0);
  bool is_registered(TermId t) const;
  int stage_of(TermId t) const;

  // Merge the classes of two registered, same-sorted ground terms and
  // propagate congruence. Returns conflict iff a stored disequality now
  // relates equal classes; the merges remain applied (callers backtrack via
  // pop).
  CcResult assert_eq(TermId t, TermId u);
  // Dual: records t != u; conflict iff t ~ u already (nothing stored then).
  CcResult assert_diseq(TermId t, TermId u);

  bool are_equal(TermId t, TermId u) const { return find(t) == find(u); }
  bool are_disequal(TermId t, TermId u) const;

  // Representative term id of t's class.
  TermId find(TermId t) const;

  void push();
  // Restores the state at the matching push exactly. Throws on underflow.
  void pop();
  std::size_t num_levels() const { return m_levels.size(); }

  // Class representatives, sorted by id.
  std::vector<TermId> class_reps() const;
  // Members of c's class, sorted by id.
  std::vector<TermId> terms_in_class(TermId c) const;
  // Every registered application of f, in registration order (occurrences,
  // not classes).
  const std::vector<TermId>& apps_of(SymbolId f) const;

  // Bumped by every registration, merge, and disequality.
  std::uint64_t generation() const { return m_generation; }

  const TermBank& bank() const { return *m_bank; }

  // One line per class: `{t1, t2, ...}`, members by ascending id, classes by
  // smallest member id.
  std::string dump() const;

 private:
  struct Node {
    bool registered = false;
    TermId parent = k_none;
    std::uint32_t size = 1;
    TermId ring_next = k_none;  // circular list of class members
    int stage = 0;
  };

  enum class RecKind : std::uint8_t { registered, merged, diseq };
  struct Record {
    RecKind kind;
    TermId a = k_none;  // registered: term; merged: loser root
    TermId b = k_none;  // merged: winner root
  };

  const TermBank* m_bank;
  std::vector<Node> m_nodes;  // indexed by TermId
  std::vector<TermId> m_app_list;  // registered apps with >=1 argument
  std::unordered_map<SymbolId, std::vector<TermId>> m_apps;
  std::vector<std::pair<TermId, TermId>> m_diseqs;
  std::vector<Record> m_trail;
  std::vector<std::size_t> m_levels;
  std::uint64_t m_generation = 0;

  Node& node(TermId t);
  const Node& node_checked(TermId t) const;
  void ensure_capacity(TermId t);
  void merge_roots(TermId a, TermId b);
  void propagate();
  CcResult check_diseqs() const;
  void undo(const Record& r);
};

}  // namespace lte
