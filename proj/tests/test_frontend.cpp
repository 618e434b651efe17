#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lte/frontend.hpp"

using namespace lte;

namespace {

const char* k_monotone =
    "(set-logic UFLIA)\n"
    "(declare-fun a () Int)\n"
    "(declare-fun b () Int)\n"
    "(declare-fun f (Int) Int :extension)\n"
    "(assert (= (+ a b) 1))\n"
    "(assert (= (+ (f a) (f b)) 0))\n"
    "(assert (forall ((x Int) (y Int)) (=> (<= x y) (<= (f x) (f y)))))\n"
    "(check-sat)\n";

const char* k_injective =
    "(declare-sort S 0)\n"
    "(declare-fun f (S) S :extension)\n"
    "(declare-fun g (S) S :extension)\n"
    "(declare-fun a () S)\n"
    "(declare-fun b () S)\n"
    "(assert (= (f a) (f b)))\n"
    "(assert (not (= a b)))\n"
    "(assert (forall ((x S) (y S)) (=> (= (f x) y) (= (g y) x))))\n"
    "(declare-psi-rule ((t S)) (g (f t)))\n";

}  // namespace

TEST_CASE("the monotonicity example parses") {
  Problem p = parse(k_monotone);
  CHECK(p.axioms.size() == 1);
  CHECK(p.ground_assertions.size() == 2);
  CHECK(p.axioms[0].vars.size() == 2);
  CHECK(p.logic == "UFLIA");
  CHECK(p.uses_arith());
  SymbolId f = *p.bank.find_symbol("f");
  CHECK(p.bank.symbol(f).is_extension);
}

TEST_CASE("undeclared symbols are named in the diagnostic") {
  try {
    parse("(assert (= (g 1) 1))");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'g'") != std::string::npos);
    CHECK(e.line == 1);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse("(declare-sort S 0)\n(assert (= a )");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line >= 2);
  }
}

TEST_CASE("ill-sorted expressions are rejected") {
  CHECK_THROWS_AS(
      parse("(declare-fun a () Int)\n(declare-sort S 0)\n"
            "(declare-fun c () S)\n(assert (= a c))"),
      ParseError);
}

TEST_CASE("unsupported constructs are named") {
  try {
    parse("(assert (exists ((x Int)) (= x x)))");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("existential") != std::string::npos);
  }
}

TEST_CASE("psi rule parses and round-trips") {
  Problem p = parse(k_injective);
  REQUIRE(p.psi_rules.size() == 1);
  const PsiRule& rule = p.psi_rules[0];
  CHECK(!p.bank.is_var(rule.templ));
  std::string text = print(p);
  CHECK(text.find("declare-psi-rule") != std::string::npos);
  Problem q = parse(text);
  CHECK(struct_equal(p, q));
}

TEST_CASE("psi rule must bind exactly one occurring variable") {
  CHECK_THROWS_AS(parse("(declare-sort S 0)\n(declare-fun f (S) S)\n"
                        "(declare-psi-rule ((t S) (u S)) (f t))"),
                  ParseError);
  CHECK_THROWS_AS(parse("(declare-sort S 0)\n(declare-fun c () S)\n"
                        "(declare-psi-rule ((t S)) c)"),
                  ParseError);
}

TEST_CASE("print is deterministic") {
  Problem p1 = parse(k_injective);
  Problem p2 = parse(k_injective);
  CHECK(print(p1) == print(p2));
  CHECK(print(p1) == print(p1));
}

TEST_CASE("problem with zero axioms prints pure ground text") {
  Problem p = parse("(declare-sort S 0)\n(declare-fun a () S)\n"
                    "(assert (= a a))");
  std::string text = print(p);
  CHECK(text.find("forall") == std::string::npos);
  Problem q = parse(text);
  CHECK(struct_equal(p, q));
}

TEST_CASE("user patterns survive the round trip") {
  const char* text =
      "(declare-sort S 0)\n"
      "(declare-fun f (S) S :extension)\n"
      "(declare-fun p (S S) Bool)\n"
      "(assert (forall ((x S) (y S)) (! (p (f x) (f y)) :pattern ((f x) (f y)))))\n";
  Problem p = parse(text);
  REQUIRE(p.axioms.size() == 1);
  CHECK(p.axioms[0].user_patterns.size() == 2);
  Problem q = parse(print(p));
  CHECK(struct_equal(p, q));
  CHECK(q.axioms[0].user_patterns.size() == 2);
}

TEST_CASE("let bindings expand") {
  Problem p = parse(
      "(declare-fun a () Int)\n"
      "(assert (let ((v (+ a 1))) (= v v)))");
  REQUIRE(p.ground_assertions.size() == 1);
  Problem q = parse("(declare-fun a () Int)\n(assert (= (+ a 1) (+ a 1)))");
  CHECK(struct_equal(p, q));
}

TEST_CASE("distinct desugars to pairwise disequalities") {
  Problem p = parse(
      "(declare-sort S 0)\n(declare-fun a () S)\n(declare-fun b () S)\n"
      "(declare-fun c () S)\n(assert (distinct a b c))");
  Problem q = parse(
      "(declare-sort S 0)\n(declare-fun a () S)\n(declare-fun b () S)\n"
      "(declare-fun c () S)\n"
      "(assert (and (not (= a b)) (not (= a c)) (not (= b c))))");
  CHECK(struct_equal(p, q));
}

// ---------------------------------------------------------------------------
// Round-trip property over randomly generated problems.

namespace {

std::string random_problem_text(std::mt19937_64& rng) {
  std::ostringstream os;
  os << "(declare-sort S 0)\n";
  int n_consts = 2 + int(rng() % 3);
  for (int i = 0; i < n_consts; ++i)
    os << "(declare-fun k" << i << " () S)\n";
  os << "(declare-fun f (S) S :extension)\n";
  os << "(declare-fun q (S) Bool)\n";
  auto random_ground = [&](auto&& self, int depth) -> std::string {
    if (depth == 0 || rng() % 2 == 0)
      return "k" + std::to_string(rng() % n_consts);
    return "(f " + self(self, depth - 1) + ")";
  };
  int n_asserts = 1 + int(rng() % 4);
  for (int i = 0; i < n_asserts; ++i) {
    std::string t1 = random_ground(random_ground, 2);
    std::string t2 = random_ground(random_ground, 2);
    switch (rng() % 4) {
      case 0:
        os << "(assert (= " << t1 << " " << t2 << "))\n";
        break;
      case 1:
        os << "(assert (not (= " << t1 << " " << t2 << ")))\n";
        break;
      case 2:
        os << "(assert (q " << t1 << "))\n";
        break;
      default:
        os << "(assert (or (q " << t1 << ") (not (q " << t2 << "))))\n";
        break;
    }
  }
  if (rng() % 2)
    os << "(assert (forall ((x S)) (q (f x))))\n";
  if (rng() % 2)
    os << "(assert (forall ((x S) (y S)) (=> (= (f x) y) (q y))))\n";
  if (rng() % 3 == 0) os << "(declare-psi-rule ((t S)) (f (f t)))\n";
  return os.str();
}

}  // namespace

TEST_CASE("parse-print round trip on random problems") {
  std::mt19937_64 rng(5150);
  for (int i = 0; i < 200; ++i) {
    std::string text = random_problem_text(rng);
    Problem p = parse(text);
    std::string printed = print(p);
    Problem q = parse(printed);
    CHECK(struct_equal(p, q));
    CHECK(print(q) == printed);
  }
}
