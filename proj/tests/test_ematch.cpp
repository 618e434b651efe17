#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lte/ematch.hpp"
#include "test_util.hpp"

using namespace lte;

namespace {

std::vector<std::vector<TermId>> key_set(const std::vector<MatchResult>& rs) {
  std::vector<std::vector<TermId>> keys;
  for (const MatchResult& r : rs) keys.push_back(r.canonical_key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

struct MonoFixture {
  TermBank bank;
  SortId s;
  SymbolId f;
  VarId x, y;
  TermId a, b, fa, fb, px, py;

  MonoFixture() {
    s = bank.add_sort("S");
    f = bank.add_symbol("f", {s}, s, SymbolKind::function, true);
    a = bank.mk_const(bank.add_symbol("a", {}, s, SymbolKind::function));
    b = bank.mk_const(bank.add_symbol("b", {}, s, SymbolKind::function));
    fa = bank.mk_app(f, {a});
    fb = bank.mk_app(f, {b});
    x = bank.add_var("x", s);
    y = bank.add_var("y", s);
    px = bank.mk_app(f, {bank.mk_var(x)});
    py = bank.mk_app(f, {bank.mk_var(y)});
  }
};

}  // namespace

TEST_CASE("monotonicity patterns give all four substitutions") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.fa);
  eg.register_term(fx.fb);
  std::vector<VarId> vars{fx.x, fx.y};
  std::vector<TermId> pats{fx.px, fx.py};
  std::vector<MatchResult> rs = ematch(eg, vars, pats, {}, 1);
  REQUIRE(rs.size() == 4);
  std::vector<std::vector<TermId>> images;
  for (const MatchResult& r : rs)
    images.push_back({*r.subst.lookup(fx.x), *r.subst.lookup(fx.y)});
  std::sort(images.begin(), images.end());
  std::vector<std::vector<TermId>> expect{
      {fx.a, fx.a}, {fx.a, fx.b}, {fx.b, fx.a}, {fx.b, fx.b}};
  std::sort(expect.begin(), expect.end());
  CHECK(images == expect);
  CHECK(key_set(rs) == key_set(bf_match_oracle(eg, vars, pats, {}, 1)));
}

TEST_CASE("after merging a and b only one substitution remains") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.fa);
  eg.register_term(fx.fb);
  REQUIRE(eg.assert_eq(fx.a, fx.b) == CcResult::ok);
  std::vector<VarId> vars{fx.x, fx.y};
  std::vector<TermId> pats{fx.px, fx.py};
  std::vector<MatchResult> rs = ematch(eg, vars, pats, {}, 1);
  CHECK(rs.size() == 1);
  CHECK(key_set(rs) == key_set(bf_match_oracle(eg, vars, pats, {}, 1)));
}

TEST_CASE("no registered application means no matches") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.a);
  std::vector<VarId> vars{fx.x};
  std::vector<TermId> pats{fx.px};
  CHECK(ematch(eg, vars, pats, {}, 1).empty());
}

TEST_CASE("empty patterns yield the single empty substitution") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.a);
  std::vector<MatchResult> rs = ematch(eg, {}, {}, {}, 1);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].subst.size() == 0);
  std::vector<MatchResult> os = bf_match_oracle(eg, {}, {}, {}, 1);
  REQUIRE(os.size() == 1);
}

TEST_CASE("non-flat patterns are rejected") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.fa);
  TermId nested = fx.bank.mk_app(fx.f, {fx.px});  // f(f(x))
  std::vector<VarId> vars{fx.x};
  std::vector<TermId> pats{nested};
  CHECK_THROWS_AS(ematch(eg, vars, pats, {}, 1), Error);
}

TEST_CASE("shared variables must be class-consistent across patterns") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s}, s, SymbolKind::function, true);
  SymbolId g = bank.add_symbol("g", {s}, s, SymbolKind::function, true);
  TermId a = bank.mk_const(bank.add_symbol("a", {}, s, SymbolKind::function));
  TermId b = bank.mk_const(bank.add_symbol("b", {}, s, SymbolKind::function));
  TermId fa = bank.mk_app(f, {a});
  TermId gb = bank.mk_app(g, {b});
  VarId x = bank.add_var("x", s);
  TermId pf = bank.mk_app(f, {bank.mk_var(x)});
  TermId pg = bank.mk_app(g, {bank.mk_var(x)});
  std::vector<VarId> vars{x};
  std::vector<TermId> pats{pf, pg};

  EGraph eg(bank);
  eg.register_term(fa);
  eg.register_term(gb);
  CHECK(ematch(eg, vars, pats, {}, 1).empty());
  REQUIRE(eg.assert_eq(a, b) == CcResult::ok);
  std::vector<MatchResult> rs = ematch(eg, vars, pats, {}, 1);
  REQUIRE(rs.size() == 1);
  CHECK(*rs[0].subst.lookup(x) == a);  // first pattern's binding
  CHECK(key_set(rs) == key_set(bf_match_oracle(eg, vars, pats, {}, 1)));
}

TEST_CASE("repeated variable within one pattern") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s, s}, s, SymbolKind::function, true);
  TermId a = bank.mk_const(bank.add_symbol("a", {}, s, SymbolKind::function));
  TermId b = bank.mk_const(bank.add_symbol("b", {}, s, SymbolKind::function));
  TermId fab = bank.mk_app(f, {a, b});
  TermId faa = bank.mk_app(f, {a, a});
  VarId x = bank.add_var("x", s);
  TermId pat = bank.mk_app(f, {bank.mk_var(x), bank.mk_var(x)});
  std::vector<VarId> vars{x};
  std::vector<TermId> pats{pat};

  EGraph eg(bank);
  eg.register_term(fab);
  eg.register_term(faa);
  std::vector<MatchResult> rs = ematch(eg, vars, pats, {}, 1);
  REQUIRE(rs.size() == 1);  // only f(a,a) matches
  CHECK(*rs[0].subst.lookup(x) == a);
  REQUIRE(eg.assert_eq(a, b) == CcResult::ok);
  rs = ematch(eg, vars, pats, {}, 1);
  CHECK(rs.size() == 1);  // f(a,b) now matches too, same class key
  CHECK(key_set(rs) == key_set(bf_match_oracle(eg, vars, pats, {}, 1)));
}

TEST_CASE("stage limit suppresses Psi anchors and images") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s}, s, SymbolKind::function, true);
  SymbolId g = bank.add_symbol("g", {s}, s, SymbolKind::function, true);
  TermId a = bank.mk_const(bank.add_symbol("a", {}, s, SymbolKind::function));
  TermId fa = bank.mk_app(f, {a});
  TermId gfa = bank.mk_app(g, {fa});
  VarId y = bank.add_var("y", s);
  TermId pg = bank.mk_app(g, {bank.mk_var(y)});

  EGraph eg(bank);
  eg.register_term(fa, 0);
  eg.register_term(gfa, 1);  // Psi witness
  std::vector<VarId> vars{y};
  std::vector<TermId> pats{pg};
  CHECK(ematch(eg, vars, pats, {}, 0).empty());
  std::vector<MatchResult> rs = ematch(eg, vars, pats, {}, 1);
  REQUIRE(rs.size() == 1);
  CHECK(!rs[0].stage1);  // the image f(a) is a stage-0 term
  CHECK(key_set(rs) == key_set(bf_match_oracle(eg, vars, pats, {}, 1)));

  // free-variable enumeration also respects the limit
  std::vector<VarId> free{y};
  std::vector<MatchResult> fs0 = ematch(eg, free, {}, free, 0);
  std::vector<MatchResult> fs1 = ematch(eg, free, {}, free, 1);
  CHECK(fs1.size() == fs0.size() + 1);  // the class of g(f(a) ) appears
}

TEST_CASE("determinism: identical states, identical results") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.fa);
  eg.register_term(fx.fb);
  std::vector<VarId> vars{fx.x, fx.y};
  std::vector<TermId> pats{fx.px, fx.py};
  std::vector<MatchResult> r1 = ematch(eg, vars, pats, {}, 1);
  std::vector<MatchResult> r2 = ematch(eg, vars, pats, {}, 1);
  CHECK(r1 == r2);
}

TEST_CASE("images never mint new ground terms") {
  MonoFixture fx;
  EGraph eg(fx.bank);
  eg.register_term(fx.fa);
  eg.register_term(fx.fb);
  std::vector<VarId> vars{fx.x, fx.y};
  std::vector<TermId> pats{fx.px, fx.py};
  for (const MatchResult& r : ematch(eg, vars, pats, {}, 1))
    for (const auto& [v, img] : r.subst.entries()) {
      (void)v;
      CHECK(eg.is_registered(img));
    }
}

// ---------------------------------------------------------------------------
// Completeness modulo ~_E against the brute-force oracle on random states.

TEST_CASE("ematch agrees with bf_match_oracle on random e-graph states") {
  std::mt19937_64 rng(4242);
  for (int iter = 0; iter < 300; ++iter) {
    TermBank bank;
    int n_consts = 2 + int(rng() % 4);
    test::RandomSig sig = test::make_sig(bank, rng, n_consts, 2, 2);

    EGraph eg(bank);
    std::vector<TermId> pool;
    int n_terms = 4 + int(rng() % 8);
    for (int i = 0; i < n_terms; ++i) {
      TermId t = test::random_term(bank, sig, rng, 2);
      pool.push_back(t);
      eg.register_term(t, 0);
    }
    // a few stage-1 registrations on top
    int n_psi = int(rng() % 3);
    for (int i = 0; i < n_psi; ++i) {
      TermId base = pool[rng() % pool.size()];
      SymbolId h = sig.fns[rng() % sig.fns.size()];
      std::vector<TermId> args(bank.symbol(h).arity(), base);
      TermId t = bank.mk_app(h, args);
      eg.register_term(t, 1);
      pool.push_back(t);
    }
    int n_merges = int(rng() % 5);
    for (int i = 0; i < n_merges; ++i)
      eg.assert_eq(pool[rng() % pool.size()], pool[rng() % pool.size()]);

    // random pattern set over one or two variables
    VarId x = bank.add_var("x", sig.sort);
    VarId y = bank.add_var("y", sig.sort);
    std::vector<VarId> vars;
    std::vector<TermId> pats;
    std::vector<VarId> free;
    auto mk_pat = [&](SymbolId h, std::vector<VarId> vs) {
      std::vector<TermId> args;
      for (VarId v : vs) args.push_back(bank.mk_var(v));
      while (args.size() < bank.symbol(h).arity())
        args.push_back(bank.mk_const(sig.consts[rng() % sig.consts.size()]));
      return bank.mk_app(h, args);
    };
    switch (rng() % 4) {
      case 0:
        vars = {x};
        pats = {mk_pat(sig.fns[0], {x})};
        break;
      case 1:
        vars = {x, y};
        pats = {mk_pat(sig.fns[0], {x}), mk_pat(sig.fns[rng() % 2], {y})};
        break;
      case 2:
        vars = {x};
        pats = {mk_pat(sig.fns[0], {x}), mk_pat(sig.fns[rng() % 2], {x})};
        break;
      default:
        vars = {x, y};
        pats = {mk_pat(sig.fns[0], {x})};
        free = {y};
        break;
    }
    for (int stage_limit : {0, 1}) {
      std::vector<MatchResult> got = ematch(eg, vars, pats, free, stage_limit);
      std::vector<MatchResult> want =
          bf_match_oracle(eg, vars, pats, free, stage_limit);
      CHECK(key_set(got) == key_set(want));
    }
  }
}
