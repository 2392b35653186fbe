#include "doctest.h"

#include "corpus.hpp"
#include "opal/parser.hpp"

using namespace opal;
using opal::test::corpus;

namespace {

// Productivity by naive repeated substitution over bounded words.
SymbolSet productive_oracle(const Grammar& g) {
  auto langs = enumerate_nonterminals(g, 8);
  SymbolSet out;
  for (const auto& [a, l] : langs)
    if (!l.empty()) out.insert(a);
  return out;
}

}  // namespace

TEST_SUITE("grammar") {
  TEST_CASE("load the arithmetic grammar") {
    Grammar g = corpus("gae");
    CHECK(g.nonterminals == SymbolSet{"E", "F", "T"});
    CHECK(g.productions.size() == 6);
    CHECK(g.axioms == SymbolSet{"E", "F", "T"});
    CHECK(g.terminals == SymbolSet{"*", "+", "e"});
  }

  TEST_CASE("validation reports every violation") {
    auto r = load_grammar("axioms: A\nA -> B C | B | a ;\nB -> b ;\nC -> c ;\n");
    REQUIRE(std::holds_alternative<ValidationReport>(r));
    const auto& rep = std::get<ValidationReport>(r);
    std::vector<ViolationKind> kinds;
    for (const auto& v : rep.violations) kinds.push_back(v.kind);
    CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::OperatorFormViolation) == 1);
    CHECK(std::count(kinds.begin(), kinds.end(), ViolationKind::RenamingRule) == 1);
  }

  TEST_CASE("missing axioms and stray empty rules") {
    auto r = load_grammar("A -> a ;\n");
    REQUIRE(std::holds_alternative<ValidationReport>(r));
    CHECK(std::get<ValidationReport>(r).violations.front().kind == ViolationKind::NoAxiom);
    auto e = load_grammar("axioms: A\nA -> a B | eps ;\nB -> b ;\n");
    REQUIRE(std::holds_alternative<Grammar>(e));
    auto bad = load_grammar("axioms: A\nA -> a B ;\nB -> b | eps ;\n");
    REQUIRE(std::holds_alternative<ValidationReport>(bad));
    CHECK(std::get<ValidationReport>(bad).violations.front().kind == ViolationKind::EmptyRule);
  }

  TEST_CASE("syntax errors carry a position") {
    try {
      (void)load_grammar("axioms: A\nA -> a\n");
      FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("text round trip") {
    Grammar g = corpus("gnl");
    Grammar h = load_grammar_or_throw(to_text(g));
    CHECK(h.productions == g.productions);
    CHECK(grammar_from_json(to_json(g)).productions == g.productions);
  }

  TEST_CASE("clean removes unreachable and unproductive nonterminals") {
    Grammar g = corpus("gae");
    CHECK(clean(g).productions == g.productions);
    Grammar h = load_grammar_or_throw(to_text(g) + "X -> e ;\nY -> e Y + ;\n");
    auto prod = productive_oracle(h);
    CHECK(prod.count("X"));
    CHECK_FALSE(prod.count("Y"));
    Grammar c = clean(h);
    CHECK_FALSE(c.nonterminals.count("X"));
    CHECK_FALSE(c.nonterminals.count("Y"));
    CHECK(c.productions == g.productions);
  }

  TEST_CASE("clean preserves bounded languages on the corpus") {
    for (const auto* name : {"gae", "gc", "gnc", "gnl", "even_a", "paired2", "six", "interleaved", "gcross"}) {
      Grammar g = corpus(name);
      CHECK(enumerate_language(clean(g), 10) == enumerate_language(g, 10));
    }
  }

  TEST_CASE("clean on an empty language") {
    Grammar g = load_grammar_or_throw("axioms: A\nA -> a A b ;\n");
    CHECK_THROWS_AS(clean(g), EmptyLanguage);
  }

  TEST_CASE("parenthesize wraps every rhs") {
    Grammar g = corpus("gnl");
    Grammar p = parenthesize_grammar(g);
    CHECK(p.productions.size() == g.productions.size());
    for (const auto& r : p.productions) {
      CHECK(r.rhs.front() == kOpen);
      CHECK(r.rhs.back() == kClose);
    }
    // Erasing markers gives back the plain language.
    Language plain;
    for (const auto& s : enumerate_language(p, 10)) plain.insert(erase_markers(s));
    CHECK(plain == enumerate_language(g, 10));
  }

  TEST_CASE("parenthesized odd a^n b^n") {
    Language l = enumerate_parenthesized(corpus("gc"), 6);
    Word s1{"(", "a", "b", ")"};
    Word s3{"(", "a", "(", "a", "(", "a", "b", ")", "b", ")", "b", ")"};
    CHECK(l == Language{s1, s3});
  }

  TEST_CASE("bdr keeps an already normal grammar") {
    Grammar g = corpus("gc");
    Grammar n = normalize_bdr(g);
    Grammar c = clean(g);
    c.canonicalize();
    CHECK(n.productions == c.productions);
    CHECK(n.axioms == g.axioms);
  }

  TEST_CASE("bdr merges duplicates used alike") {
    Grammar g = load_grammar_or_throw("axioms: S\nS -> x A y | x B y ;\nA -> a b ;\nB -> a b ;\n");
    Grammar n = normalize_bdr(g);
    CHECK(n.nonterminals.size() == 2);
    CHECK(n.productions.size() == 2);
    CHECK(enumerate_parenthesized(n, 10) == enumerate_parenthesized(g, 10));
  }

  TEST_CASE("bdr introduces lhs sets for shared rhs in different contexts") {
    Grammar g = load_grammar_or_throw("axioms: S\nS -> x A y | u B v | x C y ;\nA -> a b | a A b ;\nB -> a b ;\nC -> c ;\n");
    Grammar n = normalize_bdr(g);
    CHECK(n.nonterminals.count("{A,B}"));
    CHECK(enumerate_parenthesized(n, 10) == enumerate_parenthesized(g, 10));
    // Backward determinism: no rhs shared by two lhs.
    std::map<Word, Symbol> seen;
    for (const auto& p : n.productions) {
      auto [it, fresh] = seen.emplace(p.rhs, p.lhs);
      CHECK((fresh || it->second == p.lhs));
    }
  }

  TEST_CASE("bdr output has no equivalent nonterminals up to bounded contexts") {
    for (const auto* name : {"gae", "gnl", "interleaved", "gcross", "six"}) {
      Grammar n = normalize_bdr(corpus(name));
      auto langs = enumerate_nonterminals(parenthesize_grammar(n), 7);
      // Context oracle: one-step contexts (production, slot, siblings' classes ignored).
      std::map<Symbol, std::set<std::pair<Word, std::size_t>>> ctx;
      for (const auto& p : n.productions)
        for (std::size_t i = 0; i < p.rhs.size(); ++i)
          if (n.is_nonterminal(p.rhs[i])) {
            Word k = p.rhs;
            k[i] = "_";
            ctx[p.rhs[i]].insert({k, 0});
            ctx[p.rhs[i]].insert({{p.lhs}, 1});
          }
      for (const auto& a : n.nonterminals)
        for (const auto& b : n.nonterminals)
          if (a < b) CHECK_FALSE((langs[a] == langs[b] && ctx[a] == ctx[b] && n.axioms.count(a) == n.axioms.count(b)));
    }
  }
}
