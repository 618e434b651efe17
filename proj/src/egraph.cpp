#include "lte/egraph.hpp"

#include <algorithm>
#include <map>

namespace lte {

namespace {

// Congruence key: head symbol plus representative tuple of the arguments.
struct AppKey {
  SymbolId head;
  std::vector<TermId> arg_reps;
  bool operator==(const AppKey&) const = default;
};

struct AppKeyHash {
  std::size_t operator()(const AppKey& k) const {
    std::size_t h = k.head * 0x9e3779b97f4a7c15ull;
    for (TermId r : k.arg_reps) h = h * 31 + r + 1;
    return h;
  }
};

}  // namespace

EGraph::Node& EGraph::node(TermId t) {
  ensure_capacity(t);
  return m_nodes[t];
}

const EGraph::Node& EGraph::node_checked(TermId t) const {
  if (t >= m_nodes.size() || !m_nodes[t].registered)
    throw InternalError("e-graph: term " + std::to_string(t) +
                        " is not registered");
  return m_nodes[t];
}

void EGraph::ensure_capacity(TermId t) {
  if (t >= m_nodes.size()) m_nodes.resize(t + 1);
}

bool EGraph::is_registered(TermId t) const {
  return t < m_nodes.size() && m_nodes[t].registered;
}

int EGraph::stage_of(TermId t) const { return node_checked(t).stage; }

void EGraph::register_term(TermId t, int stage) {
  if (is_registered(t)) return;
  const TermData& d = m_bank->term(t);
  if (!d.ground) throw InternalError("e-graph: cannot register non-ground term");
  if (d.is_var) throw InternalError("e-graph: cannot register a variable");
  for (TermId a : d.args) register_term(a, stage);
  Node& n = node(t);
  n.registered = true;
  n.parent = t;
  n.size = 1;
  n.ring_next = t;
  n.stage = stage;
  std::vector<TermId>& bucket = m_apps[d.head];
  // Congruent twin among existing applications of the same symbol? Only a
  // collision requires the full fixpoint.
  TermId twin = k_none;
  if (!d.args.empty()) {
    for (TermId q : bucket) {
      const TermData& dq = m_bank->term(q);
      bool cong = true;
      for (std::size_t i = 0; cong && i < d.args.size(); ++i)
        cong = find(d.args[i]) == find(dq.args[i]);
      if (cong) {
        twin = q;
        break;
      }
    }
  }
  bucket.push_back(t);
  m_trail.push_back(Record{RecKind::registered, t, k_none});
  ++m_generation;
  if (!d.args.empty()) {
    m_app_list.push_back(t);
    if (twin != k_none) {
      merge_roots(find(twin), find(t));
      propagate();
    }
  }
}

TermId EGraph::find(TermId t) const {
  const Node* n = &node_checked(t);
  while (n->parent != t) {
    t = n->parent;
    n = &m_nodes[t];
  }
  return t;
}

void EGraph::merge_roots(TermId a, TermId b) {
  // Larger class wins; ties break toward the lower term id.
  TermId winner = a, loser = b;
  if (m_nodes[a].size < m_nodes[b].size ||
      (m_nodes[a].size == m_nodes[b].size && b < a)) {
    winner = b;
    loser = a;
  }
  m_nodes[loser].parent = winner;
  m_nodes[winner].size += m_nodes[loser].size;
  std::swap(m_nodes[winner].ring_next, m_nodes[loser].ring_next);
  m_trail.push_back(Record{RecKind::merged, loser, winner});
  ++m_generation;
}

void EGraph::propagate() {
  // Rescan all applications to a congruence fixpoint. Quadratic in the worst
  // case, which is fine at the problem sizes this engine targets, and it
  // keeps the undo trail limited to plain merge records.
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<AppKey, TermId, AppKeyHash> table;
    table.reserve(m_app_list.size() * 2);
    for (TermId p : m_app_list) {
      const TermData& d = m_bank->term(p);
      AppKey key{d.head, {}};
      key.arg_reps.reserve(d.args.size());
      for (TermId a : d.args) key.arg_reps.push_back(find(a));
      auto [it, fresh] = table.try_emplace(std::move(key), p);
      if (!fresh) {
        TermId q = it->second;
        TermId rp = find(p), rq = find(q);
        if (rp != rq) {
          merge_roots(rq, rp);
          changed = true;
        }
      }
    }
  }
}

CcResult EGraph::check_diseqs() const {
  for (const auto& [t, u] : m_diseqs)
    if (find(t) == find(u)) return CcResult::conflict;
  return CcResult::ok;
}

CcResult EGraph::assert_eq(TermId t, TermId u) {
  const Node& nt = node_checked(t);
  const Node& nu = node_checked(u);
  (void)nt;
  (void)nu;
  if (m_bank->sort_of(t) != m_bank->sort_of(u))
    throw SortError("e-graph: merging terms of different sorts");
  TermId rt = find(t), ru = find(u);
  if (rt != ru) {
    merge_roots(rt, ru);
    propagate();
  }
  return check_diseqs();
}

CcResult EGraph::assert_diseq(TermId t, TermId u) {
  node_checked(t);
  node_checked(u);
  if (m_bank->sort_of(t) != m_bank->sort_of(u))
    throw SortError("e-graph: disequality between terms of different sorts");
  if (find(t) == find(u)) return CcResult::conflict;
  m_diseqs.emplace_back(t, u);
  m_trail.push_back(Record{RecKind::diseq, k_none, k_none});
  ++m_generation;
  return CcResult::ok;
}

bool EGraph::are_disequal(TermId t, TermId u) const {
  TermId rt = find(t), ru = find(u);
  for (const auto& [a, b] : m_diseqs) {
    TermId ra = find(a), rb = find(b);
    if ((ra == rt && rb == ru) || (ra == ru && rb == rt)) return true;
  }
  return false;
}

void EGraph::push() { m_levels.push_back(m_trail.size()); }

void EGraph::undo(const Record& r) {
  switch (r.kind) {
    case RecKind::registered: {
      Node& n = m_nodes[r.a];
      const TermData& d = m_bank->term(r.a);
      n.registered = false;
      n.parent = k_none;
      n.ring_next = k_none;
      m_apps[d.head].pop_back();
      if (!d.args.empty()) m_app_list.pop_back();
      break;
    }
    case RecKind::merged: {
      Node& loser = m_nodes[r.a];
      Node& winner = m_nodes[r.b];
      winner.size -= loser.size;
      loser.parent = r.a;
      std::swap(winner.ring_next, loser.ring_next);
      break;
    }
    case RecKind::diseq:
      m_diseqs.pop_back();
      break;
  }
}

void EGraph::pop() {
  if (m_levels.empty()) throw InternalError("e-graph: pop without push");
  std::size_t mark = m_levels.back();
  m_levels.pop_back();
  while (m_trail.size() > mark) {
    undo(m_trail.back());
    m_trail.pop_back();
  }
  ++m_generation;
}

std::vector<TermId> EGraph::class_reps() const {
  std::vector<TermId> out;
  for (TermId t = 0; t < m_nodes.size(); ++t)
    if (m_nodes[t].registered && m_nodes[t].parent == t) out.push_back(t);
  return out;
}

std::vector<TermId> EGraph::terms_in_class(TermId c) const {
  TermId root = find(c);
  std::vector<TermId> out;
  TermId cur = root;
  do {
    out.push_back(cur);
    cur = m_nodes[cur].ring_next;
  } while (cur != root);
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<TermId>& EGraph::apps_of(SymbolId f) const {
  static const std::vector<TermId> empty;
  auto it = m_apps.find(f);
  return it == m_apps.end() ? empty : it->second;
}

std::string EGraph::dump() const {
  std::map<TermId, std::vector<TermId>> classes;  // keyed by smallest member
  for (TermId r : class_reps()) {
    std::vector<TermId> members = terms_in_class(r);
    classes.emplace(members.front(), std::move(members));
  }
  std::string out;
  for (const auto& [lead, members] : classes) {
    (void)lead;
    out += "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out += ", ";
      out += term_to_string(*m_bank, members[i]);
    }
    out += "}\n";
  }
  return out;
}

}  // namespace lte
