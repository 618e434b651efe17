#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lte/core.hpp"
#include "test_util.hpp"

using namespace lte;

namespace {

// Independent structural equality (ignores interning).
bool struct_eq(const TermBank& bank, TermId a, TermId b) {
  const TermData& da = bank.term(a);
  const TermData& db = bank.term(b);
  if (da.is_var != db.is_var || da.head != db.head) return false;
  if (da.args.size() != db.args.size()) return false;
  for (std::size_t i = 0; i < da.args.size(); ++i)
    if (!struct_eq(bank, da.args[i], db.args[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("interning: identical construction yields identical ids") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s}, s, SymbolKind::function, true);
  SymbolId a = bank.add_symbol("a", {}, s, SymbolKind::function);
  TermId fa1 = bank.mk_app(f, {bank.mk_const(a)});
  TermId fa2 = bank.mk_app(f, {bank.mk_const(a)});
  CHECK(fa1 == fa2);
}

TEST_CASE("arity violation names the offending position") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s}, s, SymbolKind::function);
  SymbolId a = bank.add_symbol("a", {}, s, SymbolKind::function);
  TermId ta = bank.mk_const(a);
  try {
    bank.mk_app(f, {ta, ta});
    FAIL("expected SortError");
  } catch (const SortError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("cross-sort equality is rejected") {
  TermBank bank;
  SymbolId a = bank.add_symbol("a", {}, bank.int_sort(), SymbolKind::function);
  TermId ta = bank.mk_const(a);
  TermId tt = bank.true_term();
  CHECK_THROWS_AS(bank.mk_eq(ta, tt), SortError);
}

TEST_CASE("subterms of f(g(a)) = b") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId f = bank.add_symbol("f", {s}, s, SymbolKind::function);
  SymbolId g = bank.add_symbol("g", {s}, s, SymbolKind::function);
  SymbolId a = bank.add_symbol("a", {}, s, SymbolKind::function);
  SymbolId b = bank.add_symbol("b", {}, s, SymbolKind::function);
  TermId ta = bank.mk_const(a);
  TermId tga = bank.mk_app(g, {ta});
  TermId tfga = bank.mk_app(f, {tga});
  TermId tb = bank.mk_const(b);
  TermId eq = bank.mk_eq(tfga, tb);
  std::vector<TermId> roots{eq};
  std::vector<TermId> st = subterms(bank, roots);
  std::vector<TermId> expect{ta, tga, tfga, tb};
  std::sort(expect.begin(), expect.end());
  CHECK(st == expect);
}

TEST_CASE("subterms of the arithmetic example set") {
  // G = { a + b = 1, f(a) + f(b) = 0 }
  TermBank bank;
  SymbolId a = bank.add_symbol("a", {}, bank.int_sort(), SymbolKind::function);
  SymbolId b = bank.add_symbol("b", {}, bank.int_sort(), SymbolKind::function);
  SymbolId f = bank.add_symbol("f", {bank.int_sort()}, bank.int_sort(),
                               SymbolKind::function, true);
  TermId ta = bank.mk_const(a), tb = bank.mk_const(b);
  TermId sum_ab = bank.mk_app(bank.add_sym(), {ta, tb});
  TermId one = bank.mk_numeral(1), zero = bank.mk_numeral(0);
  TermId fa = bank.mk_app(f, {ta}), fb = bank.mk_app(f, {tb});
  TermId sum_f = bank.mk_app(bank.add_sym(), {fa, fb});
  std::vector<TermId> roots{bank.mk_eq(sum_ab, one), bank.mk_eq(sum_f, zero)};
  std::vector<TermId> st = subterms(bank, roots);
  for (TermId t : {ta, tb, one, zero, sum_ab, fa, fb, sum_f})
    CHECK(std::binary_search(st.begin(), st.end(), t));
  CHECK(st.size() == 8);
}

TEST_CASE("subterms of the empty set is empty") {
  TermBank bank;
  std::vector<TermId> none;
  CHECK(subterms(bank, none).empty());
}

TEST_CASE("subterms is monotone and idempotent") {
  TermBank bank;
  std::mt19937_64 rng(7);
  test::RandomSig sig = test::make_sig(bank, rng, 3, 2, 2);
  std::vector<TermId> a, ab;
  for (int i = 0; i < 5; ++i) a.push_back(test::random_term(bank, sig, rng, 3));
  ab = a;
  for (int i = 0; i < 5; ++i)
    ab.push_back(test::random_term(bank, sig, rng, 3));
  std::vector<TermId> st_a = subterms(bank, a);
  std::vector<TermId> st_ab = subterms(bank, ab);
  CHECK(std::includes(st_ab.begin(), st_ab.end(), st_a.begin(), st_a.end()));
  CHECK(subterms(bank, st_a) == st_a);
}

TEST_CASE("apply_subst: monotonicity instance") {
  // (x <= y => f(x) <= f(y)) as clause, sigma = {x -> a, y -> b}
  TermBank bank;
  SymbolId f = bank.add_symbol("f", {bank.int_sort()}, bank.int_sort(),
                               SymbolKind::function, true);
  SymbolId a = bank.add_symbol("a", {}, bank.int_sort(), SymbolKind::function);
  SymbolId b = bank.add_symbol("b", {}, bank.int_sort(), SymbolKind::function);
  VarId x = bank.add_var("x", bank.int_sort());
  VarId y = bank.add_var("y", bank.int_sort());
  TermId tx = bank.mk_var(x), ty = bank.mk_var(y);
  Clause k{
      Literal{bank.mk_app(bank.le_sym(), {tx, ty}), false},
      Literal{bank.mk_app(bank.le_sym(),
                          {bank.mk_app(f, {tx}), bank.mk_app(f, {ty})}),
              true},
  };
  Substitution sigma;
  TermId ta = bank.mk_const(a), tb = bank.mk_const(b);
  sigma.bind(x, ta);
  sigma.bind(y, tb);
  Clause inst = apply_subst(bank, k, sigma);
  REQUIRE(inst.size() == 2);
  CHECK(inst[0].atom == bank.mk_app(bank.le_sym(), {ta, tb}));
  CHECK_FALSE(inst[0].positive);
  CHECK(inst[1].atom == bank.mk_app(bank.le_sym(), {bank.mk_app(f, {ta}),
                                                    bank.mk_app(f, {tb})}));
  for (const Literal& l : inst) CHECK(bank.ground(l.atom));
}

TEST_CASE("apply_subst: ground clause unchanged under empty substitution") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId a = bank.add_symbol("a", {}, s, SymbolKind::function);
  Clause c{Literal{bank.mk_eq(bank.mk_const(a), bank.mk_const(a)), true}};
  Substitution empty;
  CHECK(apply_subst(bank, c, empty) == c);
}

TEST_CASE("apply_subst: unbound variable is an error") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  VarId z = bank.add_var("z", s);
  Clause c{Literal{bank.mk_eq(bank.mk_var(z), bank.mk_var(z)), true}};
  Substitution empty;
  CHECK_THROWS_AS(apply_subst(bank, c, empty), UnboundVarError);
}

TEST_CASE("interning soundness over random term DAGs") {
  TermBank bank;
  std::mt19937_64 rng(42);
  test::RandomSig sig = test::make_sig(bank, rng, 4, 2, 2);
  std::vector<TermId> terms;
  for (int i = 0; i < 200; ++i)
    terms.push_back(test::random_term(bank, sig, rng, 3));
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < terms.size(); ++j)
      CHECK(struct_eq(bank, terms[i], terms[j]) == (terms[i] == terms[j]));
}

TEST_CASE("sort preservation on random terms") {
  TermBank bank;
  std::mt19937_64 rng(11);
  test::RandomSig sig = test::make_sig(bank, rng, 3, 2, 2);
  for (int i = 0; i < 100; ++i) {
    TermId t = test::random_term(bank, sig, rng, 4);
    CHECK_NOTHROW(sort_check(bank, t));
    CHECK(bank.sort_of(t) == sig.sort);
  }
}

TEST_CASE("predicates carry result sort Bool") {
  TermBank bank;
  SortId s = bank.add_sort("S");
  SymbolId p = bank.add_symbol("p", {s}, bank.bool_sort(),
                               SymbolKind::predicate);
  CHECK(bank.symbol(p).result == bank.bool_sort());
  SymbolId a = bank.add_symbol("a", {}, s, SymbolKind::function);
  TermId atom = bank.mk_app(p, {bank.mk_const(a)});
  CHECK(bank.is_atom(atom));
  CHECK(!bank.is_connective(atom));
}
