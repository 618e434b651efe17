// frontend.hpp -- the problem interchange format.
//
// A restricted SMT-LIB-2-style syntax: the ground fragment is SMT-LIB
// compatible, extension symbols carry an `:extension` attribute on their
// declaration, quantified extension axioms come as `(assert (forall ...))`
// with optional `:pattern` annotations, and Psi rules use the custom
// `(declare-psi-rule ((x S)) template)` command. Files use extension
// `.lte.smt2`.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lte/core.hpp"

namespace lte {

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

struct AxiomDecl {
  std::vector<VarId> vars;
  TermId body = k_none;                // formula over vars (clausified later)
  std::vector<TermId> user_patterns;   // verbatim :pattern terms, may be empty
};

struct PsiRule {
  VarId hole = k_none;
  TermId templ = k_none;  // term template with exactly one variable, the hole
};

struct Problem {
  TermBank bank;
  std::vector<TermId> ground_assertions;  // Bool-sorted ground formula terms
  std::vector<AxiomDecl> axioms;
  std::vector<PsiRule> psi_rules;
  std::optional<std::string> logic;

  // Declaration order, for printing and diagnostics.
  std::vector<SortId> decl_sorts;
  std::vector<SymbolId> decl_symbols;

  // True iff an interpreted arithmetic operator (+, -, <=, <) occurs in any
  // assertion or axiom. Numerals alone do not count: they are decided
  // internally via pairwise distinctness.
  bool uses_arith() const;
};

Problem parse(std::string_view text);
Problem parse_file(const std::string& path);

// Deterministic; output re-parses to a structurally equal Problem.
std::string print(const Problem& p);

// Structural equality across banks (names, sorts, term structure).
bool struct_equal(const Problem& a, const Problem& b);

}  // namespace lte
