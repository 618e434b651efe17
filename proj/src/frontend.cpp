#include "lte/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace lte {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t { lparen, rparen, symbol, numeral, keyword, eof };

struct Token {
  Tok kind;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : m_src(src) { advance(); }

  const Token& peek() const { return m_tok; }
  Token next() {
    Token t = m_tok;
    advance();
    return t;
  }

 private:
  std::string_view m_src;
  std::size_t m_pos = 0;
  int m_line = 1, m_col = 1;
  Token m_tok;

  int cur() const { return m_pos < m_src.size() ? m_src[m_pos] : -1; }
  void bump() {
    if (cur() == '\n') {
      ++m_line;
      m_col = 1;
    } else {
      ++m_col;
    }
    ++m_pos;
  }

  static bool sym_char(int c) {
    if (std::isalnum(c)) return true;
    return std::string_view("~!@$%^&*_-+=<>.?/").find(char(c)) !=
           std::string_view::npos;
  }

  void advance() {
    for (;;) {
      while (std::isspace(cur())) bump();
      if (cur() == ';') {
        while (cur() != -1 && cur() != '\n') bump();
        continue;
      }
      break;
    }
    m_tok.line = m_line;
    m_tok.col = m_col;
    int c = cur();
    if (c == -1) {
      m_tok = Token{Tok::eof, "", m_line, m_col};
      return;
    }
    if (c == '(') {
      bump();
      m_tok = Token{Tok::lparen, "(", m_tok.line, m_tok.col};
      return;
    }
    if (c == ')') {
      bump();
      m_tok = Token{Tok::rparen, ")", m_tok.line, m_tok.col};
      return;
    }
    if (c == ':') {
      std::string text;
      bump();
      while (sym_char(cur())) {
        text += char(cur());
        bump();
      }
      m_tok = Token{Tok::keyword, text, m_tok.line, m_tok.col};
      return;
    }
    if (std::isdigit(c)) {
      std::string text;
      while (std::isdigit(cur())) {
        text += char(cur());
        bump();
      }
      m_tok = Token{Tok::numeral, text, m_tok.line, m_tok.col};
      return;
    }
    if (sym_char(c)) {
      std::string text;
      while (sym_char(cur())) {
        text += char(cur());
        bump();
      }
      m_tok = Token{Tok::symbol, text, m_tok.line, m_tok.col};
      return;
    }
    throw ParseError(m_line, m_col, std::string("unexpected character '") +
                                        char(c) + "'");
  }
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : m_lex(src) {}

  Problem run() {
    Problem p;
    for (;;) {
      if (m_lex.peek().kind == Tok::eof) break;
      command(p);
    }
    return p;
  }

 private:
  Lexer m_lex;

  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    throw ParseError(at.line, at.col, msg);
  }

  Token expect(Tok kind, const char* what) {
    Token t = m_lex.next();
    if (t.kind != kind) fail(t, std::string("expected ") + what);
    return t;
  }

  Token expect_symbol(const char* what) { return expect(Tok::symbol, what); }

  void expect_close() { expect(Tok::rparen, "')'"); }

  SortId parse_sort(Problem& p) {
    Token t = expect_symbol("a sort name");
    auto s = p.bank.find_sort(t.text);
    if (!s) fail(t, "undeclared sort '" + t.text + "'");
    return *s;
  }

  // name -> term binding for quantified variables and let bindings.
  using Env = std::unordered_map<std::string, TermId>;

  void command(Problem& p) {
    expect(Tok::lparen, "'('");
    Token head = expect_symbol("a command name");
    if (head.text == "set-logic") {
      Token l = expect_symbol("a logic name");
      p.logic = l.text;
      expect_close();
    } else if (head.text == "declare-sort") {
      Token name = expect_symbol("a sort name");
      Token arity = m_lex.next();
      if (arity.kind != Tok::numeral || arity.text != "0")
        fail(arity, "unsupported construct: parametric sorts (arity must be 0)");
      if (p.bank.find_sort(name.text))
        fail(name, "sort '" + name.text + "' already declared");
      p.decl_sorts.push_back(p.bank.add_sort(name.text));
      expect_close();
    } else if (head.text == "declare-fun" || head.text == "declare-const") {
      declare_fun(p, head.text == "declare-const");
    } else if (head.text == "assert") {
      parse_assert(p);
    } else if (head.text == "declare-psi-rule") {
      parse_psi_rule(p);
    } else if (head.text == "check-sat" || head.text == "exit") {
      expect_close();
    } else {
      fail(head, "unsupported command '" + head.text + "'");
    }
  }

  void declare_fun(Problem& p, bool is_const) {
    Token name = expect_symbol("a symbol name");
    std::vector<SortId> args;
    if (!is_const) {
      expect(Tok::lparen, "'('");
      while (m_lex.peek().kind != Tok::rparen) args.push_back(parse_sort(p));
      expect_close();
    }
    SortId result = parse_sort(p);
    bool extension = false;
    while (m_lex.peek().kind == Tok::keyword) {
      Token attr = m_lex.next();
      if (attr.text == "extension")
        extension = true;
      else
        fail(attr, "unsupported attribute ':" + attr.text + "'");
    }
    expect_close();
    if (p.bank.find_symbol(name.text))
      fail(name, "symbol '" + name.text + "' already declared");
    SymbolKind kind = result == p.bank.bool_sort() ? SymbolKind::predicate
                                                   : SymbolKind::function;
    if (extension && kind == SymbolKind::predicate)
      fail(name, "extension symbols must be function symbols");
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i] == p.bank.bool_sort())
        fail(name, "Bool cannot be an argument sort (position " +
                       std::to_string(i + 1) + ")");
    p.decl_symbols.push_back(
        p.bank.add_symbol(name.text, std::move(args), result, kind, extension));
  }

  void parse_assert(Problem& p) {
    // Peek for a top-level forall.
    if (m_lex.peek().kind == Tok::lparen) {
      Token open = m_lex.next();
      Token head = m_lex.peek();
      if (head.kind == Tok::symbol && head.text == "forall") {
        m_lex.next();
        p.axioms.push_back(parse_forall(p));
        expect_close();  // closes the forall
        expect_close();  // closes the assert
        return;
      }
      if (head.kind == Tok::symbol && head.text == "exists")
        fail(head, "unsupported construct: existential quantifier");
      // Not a quantifier: parse as a compound ground term starting at `open`.
      Env env;
      TermId t = parse_compound(p, env, open);
      finish_ground_assert(p, t, open);
      return;
    }
    Token at = m_lex.peek();
    Env env;
    TermId t = parse_term(p, env);
    finish_ground_assert(p, t, at);
  }

  void finish_ground_assert(Problem& p, TermId t, const Token& at) {
    expect_close();
    if (p.bank.sort_of(t) != p.bank.bool_sort())
      fail(at, "asserted term is not Boolean");
    if (!p.bank.ground(t)) fail(at, "free variable in assertion");
    p.ground_assertions.push_back(t);
  }

  AxiomDecl parse_forall(Problem& p) {
    AxiomDecl ax;
    Env env;
    parse_bindings(p, env, ax.vars);
    // Body, possibly (! body :pattern (...) ...) or a nested forall.
    Token at = m_lex.peek();
    ax.body = parse_axiom_body(p, env, ax);
    if (p.bank.sort_of(ax.body) != p.bank.bool_sort())
      fail(at, "axiom body is not Boolean");
    return ax;
  }

  void parse_bindings(Problem& p, Env& env, std::vector<VarId>& vars) {
    expect(Tok::lparen, "'('");
    while (m_lex.peek().kind != Tok::rparen) {
      expect(Tok::lparen, "'('");
      Token name = expect_symbol("a variable name");
      SortId sort = parse_sort(p);
      expect_close();
      if (sort == p.bank.bool_sort())
        fail(name, "unsupported construct: Bool-sorted bound variable");
      if (env.count(name.text))
        fail(name, "duplicate bound variable '" + name.text + "'");
      VarId v = p.bank.add_var(name.text, sort);
      vars.push_back(v);
      env.emplace(name.text, p.bank.mk_var(v));
    }
    expect_close();
  }

  TermId parse_axiom_body(Problem& p, Env& env, AxiomDecl& ax) {
    if (m_lex.peek().kind == Tok::lparen) {
      Token open = m_lex.next();
      Token head = m_lex.peek();
      if (head.kind == Tok::symbol && head.text == "!") {
        m_lex.next();
        TermId body = parse_axiom_body(p, env, ax);
        while (m_lex.peek().kind == Tok::keyword) {
          Token attr = m_lex.next();
          if (attr.text != "pattern")
            fail(attr, "unsupported attribute ':" + attr.text + "'");
          expect(Tok::lparen, "'('");
          while (m_lex.peek().kind != Tok::rparen)
            ax.user_patterns.push_back(parse_term(p, env));
          expect_close();
        }
        expect_close();
        return body;
      }
      if (head.kind == Tok::symbol && head.text == "forall") {
        m_lex.next();
        parse_bindings(p, env, ax.vars);
        TermId body = parse_axiom_body(p, env, ax);
        expect_close();
        return body;
      }
      if (head.kind == Tok::symbol && head.text == "exists")
        fail(head, "unsupported construct: existential quantifier");
      return parse_compound(p, env, open);
    }
    return parse_term(p, env);
  }

  void parse_psi_rule(Problem& p) {
    PsiRule rule;
    Env env;
    std::vector<VarId> vars;
    parse_bindings(p, env, vars);
    if (vars.size() != 1) {
      Token t = m_lex.peek();
      fail(t, "psi rule must bind exactly one template variable");
    }
    rule.hole = vars[0];
    Token at = m_lex.peek();
    rule.templ = parse_term(p, env);
    expect_close();
    std::vector<VarId> occurring;
    collect_vars(p.bank, rule.templ, occurring);
    if (occurring != std::vector<VarId>{rule.hole})
      fail(at, "psi template must contain exactly its template variable");
    if (p.bank.is_var(rule.templ))
      fail(at, "psi template must be a proper term over the template variable");
    p.psi_rules.push_back(rule);
  }

  TermId parse_term(Problem& p, Env& env) {
    Token t = m_lex.next();
    switch (t.kind) {
      case Tok::numeral:
        try {
          return p.bank.mk_numeral(std::stoull(t.text));
        } catch (const std::out_of_range&) {
          fail(t, "numeral out of range");
        }
      case Tok::symbol: {
        auto it = env.find(t.text);
        if (it != env.end()) return it->second;
        auto f = p.bank.find_symbol(t.text);
        if (!f) fail(t, "undeclared symbol '" + t.text + "'");
        Builtin b = p.bank.symbol(*f).builtin;
        if (b != Builtin::none && b != Builtin::bool_true &&
            b != Builtin::bool_false && b != Builtin::numeral)
          fail(t, "misuse of builtin symbol '" + t.text + "'");
        if (p.bank.symbol(*f).arity() != 0)
          fail(t, "symbol '" + t.text + "' expects arguments");
        return p.bank.mk_const(*f);
      }
      case Tok::lparen:
        return parse_compound(p, env, t);
      default:
        fail(t, "expected a term");
    }
  }

  std::vector<TermId> parse_args(Problem& p, Env& env) {
    std::vector<TermId> args;
    while (m_lex.peek().kind != Tok::rparen) args.push_back(parse_term(p, env));
    expect_close();
    return args;
  }

  TermId mk_checked(Problem& p, const Token& at, SymbolId f,
                    const std::vector<TermId>& args) {
    try {
      return p.bank.mk_app(f, args);
    } catch (const SortError& e) {
      fail(at, e.what());
    }
  }

  TermId parse_compound(Problem& p, Env& env, const Token& open) {
    Token head = m_lex.next();
    if (head.kind != Tok::symbol) fail(head, "expected an operator or symbol");
    const std::string& op = head.text;
    TermBank& bank = p.bank;

    if (op == "let") {
      expect(Tok::lparen, "'('");
      std::vector<std::pair<std::string, TermId>> binds;
      while (m_lex.peek().kind != Tok::rparen) {
        expect(Tok::lparen, "'('");
        Token name = expect_symbol("a let binding name");
        binds.emplace_back(name.text, parse_term(p, env));
        expect_close();
      }
      expect_close();
      Env inner = env;  // parallel let
      for (auto& [name, term] : binds) inner[name] = term;
      TermId body = parse_term(p, inner);
      expect_close();
      return body;
    }
    if (op == "forall" || op == "exists")
      fail(head, "unsupported construct: nested quantifier");
    if (op == "ite")
      fail(head, "unsupported construct: ite");

    if (op == "=") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.size() != 2)
        fail(head, "unsupported construct: '=' expects exactly 2 arguments");
      if (bank.sort_of(args[0]) == bank.bool_sort())
        fail(head, "unsupported construct: '=' on Bool (use iff-free encoding)");
      if (bank.sort_of(args[0]) != bank.sort_of(args[1]))
        fail(head, "equality between sorts " +
                       bank.sort(bank.sort_of(args[0])).name + " and " +
                       bank.sort(bank.sort_of(args[1])).name);
      return bank.mk_eq(args[0], args[1]);
    }
    if (op == "distinct") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.size() < 2) fail(head, "'distinct' expects at least 2 arguments");
      std::vector<TermId> parts;
      for (std::size_t i = 0; i < args.size(); ++i)
        for (std::size_t j = i + 1; j < args.size(); ++j) {
          if (bank.sort_of(args[i]) != bank.sort_of(args[j]))
            fail(head, "'distinct' arguments must share a sort");
          parts.push_back(mk_checked(p, head, bank.not_symbol(),
                                     {bank.mk_eq(args[i], args[j])}));
        }
      if (parts.size() == 1) return parts[0];
      return mk_checked(p, head, bank.and_symbol(), parts);
    }
    if (op == "and" || op == "or") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.empty()) fail(head, "'" + op + "' expects arguments");
      if (args.size() == 1) return args[0];
      return mk_checked(p, head,
                        op == "and" ? bank.and_symbol() : bank.or_symbol(),
                        args);
    }
    if (op == "not") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.size() != 1) fail(head, "'not' expects 1 argument");
      return mk_checked(p, head, bank.not_symbol(), args);
    }
    if (op == "=>") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.size() < 2) fail(head, "'=>' expects at least 2 arguments");
      TermId acc = args.back();
      for (std::size_t i = args.size() - 1; i-- > 0;)
        acc = mk_checked(p, head, bank.implies_symbol(), {args[i], acc});
      return acc;
    }
    if (op == "+" || op == "-") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.empty()) fail(head, "'" + op + "' expects arguments");
      if (op == "-" && args.size() == 1)
        return mk_checked(p, head, bank.neg_sym(), args);
      TermId acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = mk_checked(p, head,
                         op == "+" ? bank.add_sym() : bank.sub_sym(),
                         {{acc, args[i]}});
      return acc;
    }
    if (op == "<=" || op == "<" || op == ">=" || op == ">") {
      std::vector<TermId> args = parse_args(p, env);
      if (args.size() != 2)
        fail(head, "unsupported construct: chained inequality");
      bool flip = op == ">=" || op == ">";
      SymbolId sym = (op == "<=" || op == ">=") ? bank.le_sym() : bank.lt_sym();
      if (flip) std::swap(args[0], args[1]);
      return mk_checked(p, head, sym, args);
    }
    if (op == "*")
      fail(head, "unsupported construct: multiplication");

    auto f = bank.find_symbol(op);
    if (!f) fail(head, "undeclared symbol '" + op + "'");
    if (bank.symbol(*f).builtin != Builtin::none)
      fail(head, "misuse of builtin symbol '" + op + "'");
    std::vector<TermId> args = parse_args(p, env);
    (void)open;
    return mk_checked(p, head, *f, args);
  }
};

// ---------------------------------------------------------------------------
// Printer

void print_sort_list(std::ostream& os, const TermBank& bank,
                     const std::vector<SortId>& sorts) {
  os << "(";
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (i) os << " ";
    os << bank.sort(sorts[i]).name;
  }
  os << ")";
}

}  // namespace

bool Problem::uses_arith() const {
  std::vector<TermId> roots = ground_assertions;
  for (const AxiomDecl& ax : axioms) roots.push_back(ax.body);
  std::function<bool(TermId)> walk = [&](TermId t) -> bool {
    const TermData& d = bank.term(t);
    if (d.is_var) return false;
    switch (bank.symbol(d.head).builtin) {
      case Builtin::int_add:
      case Builtin::int_sub:
      case Builtin::int_neg:
      case Builtin::int_le:
      case Builtin::int_lt:
        return true;
      default:
        break;
    }
    for (TermId a : d.args)
      if (walk(a)) return true;
    return false;
  };
  for (TermId r : roots)
    if (walk(r)) return true;
  return false;
}

Problem parse(std::string_view text) {
  Parser parser(text);
  return parser.run();
}

Problem parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string print(const Problem& p) {
  std::ostringstream os;
  const TermBank& bank = p.bank;
  if (p.logic) os << "(set-logic " << *p.logic << ")\n";
  for (SortId s : p.decl_sorts)
    os << "(declare-sort " << bank.sort(s).name << " 0)\n";
  for (SymbolId f : p.decl_symbols) {
    const SymbolData& sym = bank.symbol(f);
    os << "(declare-fun " << sym.name << " ";
    print_sort_list(os, bank, sym.arg_sorts);
    os << " " << bank.sort(sym.result).name;
    if (sym.is_extension) os << " :extension";
    os << ")\n";
  }
  for (TermId t : p.ground_assertions)
    os << "(assert " << term_to_string(bank, t) << ")\n";
  for (const AxiomDecl& ax : p.axioms) {
    os << "(assert (forall (";
    for (std::size_t i = 0; i < ax.vars.size(); ++i) {
      if (i) os << " ";
      os << "(" << bank.var(ax.vars[i]).name << " "
         << bank.sort(bank.var(ax.vars[i]).sort).name << ")";
    }
    os << ") ";
    if (!ax.user_patterns.empty()) {
      os << "(! " << term_to_string(bank, ax.body) << " :pattern (";
      for (std::size_t i = 0; i < ax.user_patterns.size(); ++i) {
        if (i) os << " ";
        os << term_to_string(bank, ax.user_patterns[i]);
      }
      os << "))";
    } else {
      os << term_to_string(bank, ax.body);
    }
    os << "))\n";
  }
  for (const PsiRule& rule : p.psi_rules) {
    os << "(declare-psi-rule ((" << bank.var(rule.hole).name << " "
       << bank.sort(bank.var(rule.hole).sort).name << ")) "
       << term_to_string(bank, rule.templ) << ")\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

namespace {

bool term_equal_across(const TermBank& ba, TermId ta, const TermBank& bb,
                       TermId tb) {
  const TermData& da = ba.term(ta);
  const TermData& db = bb.term(tb);
  if (da.is_var != db.is_var) return false;
  if (da.is_var)
    return ba.var(da.head).name == bb.var(db.head).name &&
           ba.sort(ba.var(da.head).sort).name ==
               bb.sort(bb.var(db.head).sort).name;
  const SymbolData& fa = ba.symbol(da.head);
  const SymbolData& fb = bb.symbol(db.head);
  if (fa.name != fb.name || fa.builtin != fb.builtin) return false;
  if (da.args.size() != db.args.size()) return false;
  for (std::size_t i = 0; i < da.args.size(); ++i)
    if (!term_equal_across(ba, da.args[i], bb, db.args[i])) return false;
  return true;
}

}  // namespace

bool struct_equal(const Problem& a, const Problem& b) {
  if (a.logic != b.logic) return false;
  if (a.decl_sorts.size() != b.decl_sorts.size()) return false;
  for (std::size_t i = 0; i < a.decl_sorts.size(); ++i)
    if (a.bank.sort(a.decl_sorts[i]).name != b.bank.sort(b.decl_sorts[i]).name)
      return false;
  if (a.decl_symbols.size() != b.decl_symbols.size()) return false;
  for (std::size_t i = 0; i < a.decl_symbols.size(); ++i) {
    const SymbolData& fa = a.bank.symbol(a.decl_symbols[i]);
    const SymbolData& fb = b.bank.symbol(b.decl_symbols[i]);
    if (fa.name != fb.name || fa.kind != fb.kind ||
        fa.is_extension != fb.is_extension ||
        fa.arg_sorts.size() != fb.arg_sorts.size())
      return false;
    if (a.bank.sort(fa.result).name != b.bank.sort(fb.result).name)
      return false;
    for (std::size_t j = 0; j < fa.arg_sorts.size(); ++j)
      if (a.bank.sort(fa.arg_sorts[j]).name !=
          b.bank.sort(fb.arg_sorts[j]).name)
        return false;
  }
  if (a.ground_assertions.size() != b.ground_assertions.size()) return false;
  for (std::size_t i = 0; i < a.ground_assertions.size(); ++i)
    if (!term_equal_across(a.bank, a.ground_assertions[i], b.bank,
                           b.ground_assertions[i]))
      return false;
  if (a.axioms.size() != b.axioms.size()) return false;
  for (std::size_t i = 0; i < a.axioms.size(); ++i) {
    const AxiomDecl& xa = a.axioms[i];
    const AxiomDecl& xb = b.axioms[i];
    if (xa.vars.size() != xb.vars.size()) return false;
    for (std::size_t j = 0; j < xa.vars.size(); ++j) {
      if (a.bank.var(xa.vars[j]).name != b.bank.var(xb.vars[j]).name)
        return false;
      if (a.bank.sort(a.bank.var(xa.vars[j]).sort).name !=
          b.bank.sort(b.bank.var(xb.vars[j]).sort).name)
        return false;
    }
    if (!term_equal_across(a.bank, xa.body, b.bank, xb.body)) return false;
    if (xa.user_patterns.size() != xb.user_patterns.size()) return false;
    for (std::size_t j = 0; j < xa.user_patterns.size(); ++j)
      if (!term_equal_across(a.bank, xa.user_patterns[j], b.bank,
                             xb.user_patterns[j]))
        return false;
  }
  if (a.psi_rules.size() != b.psi_rules.size()) return false;
  for (std::size_t i = 0; i < a.psi_rules.size(); ++i)
    if (!term_equal_across(a.bank, a.psi_rules[i].templ, b.bank,
                           b.psi_rules[i].templ))
      return false;
  return true;
}

}  // namespace lte
