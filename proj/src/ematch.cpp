#include "lte/ematch.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

namespace lte {

namespace {

void check_pattern_flat(const TermBank& bank, TermId p) {
  const TermData& d = bank.term(p);
  bool ok = !d.is_var && !d.ground &&
            bank.symbol(d.head).kind == SymbolKind::function;
  if (ok)
    for (TermId a : d.args) {
      const TermData& ad = bank.term(a);
      if (!ad.ground && !ad.is_var) ok = false;
    }
  if (!ok)
    throw Error("e-matching requires flat patterns, got '" +
                term_to_string(bank, p) + "'");
}

// One candidate image per e-class and sort: the member with the least
// (stage, id), provided its stage passes the limit.
std::vector<TermId> class_images(const EGraph& eg, SortId sort,
                                 int stage_limit) {
  std::vector<TermId> out;
  for (TermId rep : eg.class_reps()) {
    if (eg.bank().sort_of(rep) != sort) continue;
    TermId best = k_none;
    for (TermId m : eg.terms_in_class(rep)) {
      if (best == k_none || eg.stage_of(m) < eg.stage_of(best) ||
          (eg.stage_of(m) == eg.stage_of(best) && m < best))
        best = m;
    }
    if (best != k_none && eg.stage_of(best) <= stage_limit)
      out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Collector {
  const EGraph& eg;
  std::span<const VarId> vars;
  std::set<std::vector<TermId>> seen;
  std::vector<MatchResult> out;

  void emit(const Substitution& sigma) {
    MatchResult r;
    r.subst = sigma;
    r.canonical_key.reserve(vars.size());
    for (VarId v : vars) {
      auto img = sigma.lookup(v);
      if (!img)
        throw InternalError("e-matching: variable left unbound");
      r.canonical_key.push_back(eg.find(*img));
      r.stage1 = r.stage1 || eg.stage_of(*img) > 0;
    }
    if (seen.insert(r.canonical_key).second) out.push_back(std::move(r));
  }
};

}  // namespace

std::vector<MatchResult> ematch(const EGraph& eg, std::span<const VarId> vars,
                                std::span<const TermId> patterns,
                                std::span<const VarId> free_vars,
                                int stage_limit) {
  const TermBank& bank = eg.bank();
  for (TermId p : patterns) check_pattern_flat(bank, p);

  Collector collect{eg, vars, {}, {}};

  // Pre-enumerated free-variable domains.
  std::vector<std::vector<TermId>> free_domains;
  free_domains.reserve(free_vars.size());
  for (VarId v : free_vars)
    free_domains.push_back(class_images(eg, bank.var(v).sort, stage_limit));

  Substitution sigma;
  std::function<void(std::size_t)> enum_free = [&](std::size_t i) {
    if (i == free_vars.size()) {
      collect.emit(sigma);
      return;
    }
    for (TermId img : free_domains[i]) {
      sigma.bind(free_vars[i], img);
      enum_free(i + 1);
    }
  };

  // Anchor-based join over the patterns, then free-variable enumeration.
  std::function<void(std::size_t)> match_pattern = [&](std::size_t pi) {
    if (pi == patterns.size()) {
      Substitution saved = sigma;
      enum_free(0);
      sigma = std::move(saved);
      return;
    }
    const TermData& pat = bank.term(patterns[pi]);
    for (TermId anchor : eg.apps_of(pat.head)) {
      if (eg.stage_of(anchor) > stage_limit) continue;
      const TermData& ad = bank.term(anchor);
      Substitution saved = sigma;
      bool ok = true;
      for (std::size_t i = 0; ok && i < pat.args.size(); ++i) {
        TermId parg = pat.args[i];
        TermId targ = ad.args[i];
        const TermData& pd = bank.term(parg);
        if (pd.is_var) {
          auto bound = sigma.lookup(pd.head);
          if (bound) {
            ok = eg.are_equal(*bound, targ);
          } else if (eg.stage_of(targ) <= stage_limit) {
            sigma.bind(pd.head, targ);
          } else {
            ok = false;
          }
        } else {
          // ground pattern argument
          ok = parg == targ ||
               (eg.is_registered(parg) && eg.are_equal(parg, targ));
        }
      }
      if (ok) match_pattern(pi + 1);
      sigma = saved;
    }
  };

  match_pattern(0);
  return std::move(collect.out);
}

std::vector<MatchResult> bf_match_oracle(const EGraph& eg,
                                         std::span<const VarId> vars,
                                         std::span<const TermId> patterns,
                                         std::span<const VarId> free_vars,
                                         int stage_limit) {
  const TermBank& bank = eg.bank();
  for (TermId p : patterns) check_pattern_flat(bank, p);

  // All registered terms, by id.
  std::vector<TermId> universe;
  for (TermId rep : eg.class_reps())
    for (TermId m : eg.terms_in_class(rep)) universe.push_back(m);
  std::sort(universe.begin(), universe.end());

  // Domains follow `vars` order; free variables use the same universe.
  (void)free_vars;
  std::vector<std::vector<TermId>> domains;
  domains.reserve(vars.size());
  for (VarId v : vars) {
    std::vector<TermId> d;
    for (TermId t : universe)
      if (bank.sort_of(t) == bank.var(v).sort &&
          eg.stage_of(t) <= stage_limit)
        d.push_back(t);
    domains.push_back(std::move(d));
  }

  Collector collect{eg, vars, {}, {}};
  Substitution sigma;

  auto pattern_matches = [&](TermId p) -> bool {
    const TermData& pd = bank.term(p);
    for (TermId anchor : eg.apps_of(pd.head)) {
      if (eg.stage_of(anchor) > stage_limit) continue;
      const TermData& ad = bank.term(anchor);
      bool ok = true;
      for (std::size_t i = 0; ok && i < pd.args.size(); ++i) {
        TermId parg = pd.args[i];
        TermId targ = ad.args[i];
        if (bank.is_var(parg)) {
          auto img = sigma.lookup(bank.term(parg).head);
          ok = img && eg.are_equal(*img, targ);
        } else {
          ok = parg == targ ||
               (eg.is_registered(parg) && eg.are_equal(parg, targ));
        }
      }
      if (ok) return true;
    }
    return false;
  };

  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == vars.size()) {
      for (TermId p : patterns)
        if (!pattern_matches(p)) return;
      collect.emit(sigma);
      return;
    }
    for (TermId img : domains[i]) {
      sigma.bind(vars[i], img);
      walk(i + 1);
    }
  };
  walk(0);
  return std::move(collect.out);
}

}  // namespace lte
