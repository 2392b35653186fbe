#include "doctest.h"

#include "corpus.hpp"
#include "opal/opm.hpp"

using namespace opal;
using opal::test::corpus;

namespace {

RelSet R(char c) { return c == '<' ? RelSet(Rel::Yields) : c == '=' ? RelSet(Rel::Equal) : c == '>' ? RelSet(Rel::Takes) : RelSet{}; }

// Independent re-derivation: enumerate sentential forms of bounded size and
// read relations off adjacent terminal pairs inside the same rhs.
OpMatrix opm_oracle(const Grammar& g) {
  OpMatrix m(g.terminals);
  // Left/right sets by exhaustive expansion of short sentential forms.
  std::map<Symbol, SymbolSet> L, R;
  for (const auto& a : g.nonterminals) {
    // BFS over leftmost derivation heads: A => C a ... or A => a ...
    std::set<Symbol> seen{a};
    std::vector<Symbol> todo{a};
    while (!todo.empty()) {
      Symbol x = todo.back();
      todo.pop_back();
      for (const auto* p : g.rules_of(x)) {
        const Word& r = p->rhs;
        if (r.empty()) continue;
        std::size_t i = g.is_nonterminal(r[0]) ? 1 : 0;
        if (i < r.size()) L[a].insert(r[i]);
        if (i == 1 && seen.insert(r[0]).second) todo.push_back(r[0]);
      }
    }
    seen = {a};
    todo = {a};
    while (!todo.empty()) {
      Symbol x = todo.back();
      todo.pop_back();
      for (const auto* p : g.rules_of(x)) {
        const Word& r = p->rhs;
        if (r.empty()) continue;
        std::size_t last = r.size() - 1;
        bool nt = g.is_nonterminal(r[last]);
        if (nt && last >= 1) R[a].insert(r[last - 1]);
        if (!nt) R[a].insert(r[last]);
        if (nt && seen.insert(r[last]).second) todo.push_back(r[last]);
      }
    }
  }
  for (const auto& p : g.productions) {
    Word r = p.rhs;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = i + 1; j < r.size() && j <= i + 2; ++j) {
        bool ti = g.is_terminal(r[i]), tj = g.is_terminal(r[j]);
        if (j == i + 1 && ti && tj) m.add(r[i], r[j], Rel::Equal);
        if (j == i + 2 && ti && tj && g.is_nonterminal(r[i + 1])) m.add(r[i], r[j], Rel::Equal);
        if (j == i + 1 && ti && !tj)
          for (const auto& b : L[r[j]]) m.add(r[i], b, Rel::Yields);
        if (j == i + 1 && !ti && tj)
          for (const auto& a : R[r[i]]) m.add(a, r[j], Rel::Takes);
      }
  }
  for (const auto& ax : g.axioms) {
    for (const auto& b : L[ax]) m.add(kDelim, b, Rel::Yields);
    for (const auto& a : R[ax]) m.add(a, kDelim, Rel::Takes);
  }
  return m;
}

}  // namespace

TEST_SUITE("opm") {
  TEST_CASE("left and right sets of the arithmetic grammar") {
    auto lr = left_right_sets(corpus("gae"));
    CHECK(lr.left["E"] == SymbolSet{"+", "*", "e"});
    CHECK(lr.left["T"] == SymbolSet{"*", "e"});
    CHECK(lr.left["F"] == SymbolSet{"e"});
    CHECK(lr.right["E"] == SymbolSet{"+", "*", "e"});
    CHECK(lr.right["T"] == SymbolSet{"*", "e"});
    CHECK(lr.right["F"] == SymbolSet{"e"});
  }

  TEST_CASE("left and right sets of the nonlinear grammar") {
    auto lr = left_right_sets(corpus("gnl"));
    CHECK(lr.left["A"] == SymbolSet{"a"});
    CHECK(lr.left["B"] == SymbolSet{"b"});
    CHECK(lr.right["A"] == SymbolSet{"c"});
    CHECK(lr.right["B"] == SymbolSet{"c"});
  }

  TEST_CASE("arithmetic matrix cell for cell") {
    OpMatrix m = compute_opm(corpus("gae"));
    const char* rows[] = {"+", "*", "e", "#"};
    std::map<std::pair<std::string, std::string>, char> expected = {
        {{"+", "+"}, '>'}, {{"+", "*"}, '<'}, {{"+", "e"}, '<'}, {{"+", "#"}, '>'},
        {{"*", "+"}, '>'}, {{"*", "*"}, '>'}, {{"*", "e"}, '<'}, {{"*", "#"}, '>'},
        {{"e", "+"}, '>'}, {{"e", "*"}, '>'}, {{"e", "e"}, '.'}, {{"e", "#"}, '>'},
        {{"#", "+"}, '<'}, {{"#", "*"}, '<'}, {{"#", "e"}, '<'}, {{"#", "#"}, '.'},
    };
    for (const auto* a : rows)
      for (const auto* b : rows) CHECK_MESSAGE(m.at(a, b) == R(expected[{a, b}]), a << "," << b);
    CHECK(m.conflict_free());
    CHECK(m == opm_oracle(corpus("gae")));
  }

  TEST_CASE("single rule matrix") {
    OpMatrix m = compute_opm(load_grammar_or_throw("axioms: A\nA -> a b ;\n"));
    CHECK(m.cells().size() == 3);
    CHECK(m.at("a", "b") == RelSet(Rel::Equal));
    CHECK(m.at("#", "a") == RelSet(Rel::Yields));
    CHECK(m.at("b", "#") == RelSet(Rel::Takes));
  }

  TEST_CASE("matrix agrees with the expansion oracle on the corpus") {
    for (const auto* name : {"gae", "gc", "gnc", "gnl", "even_a", "paired2", "six", "interleaved", "gcross", "gnoop"})
      CHECK_MESSAGE(compute_opm(corpus(name)) == opm_oracle(corpus(name)), name);
  }

  TEST_CASE("conflict in the non operator precedence grammar") {
    auto res = compute_opm_detailed(corpus("gnoop"));
    auto c = res.conflicts();
    // The mirror cell (b,b) conflicts too.
    CHECK(c == std::vector<std::pair<Symbol, Symbol>>{{"a", "a"}, {"b", "b"}});
    CHECK(res.matrix.at("a", "a").has(Rel::Equal));
    CHECK(res.matrix.at("a", "a").has(Rel::Yields));
    CHECK_FALSE(res.witnesses[{"a", "a", Rel::Equal}].empty());
  }

  TEST_CASE("equal acyclicity") {
    CHECK(check_eq_acyclic(compute_opm(corpus("gae"))).acyclic);
    OpMatrix m(SymbolSet{"a"});
    m.add("a", "a", Rel::Equal);
    auto r = check_eq_acyclic(m);
    CHECK_FALSE(r.acyclic);
    CHECK(r.cycle == std::vector<Symbol>{"a"});
    OpMatrix i(SymbolSet{"call", "ret", "int"});
    i.add("call", "ret", Rel::Equal);
    CHECK(check_eq_acyclic(i).acyclic);
  }

  TEST_CASE("union of matrices") {
    OpMatrix m = compute_opm(corpus("gae"));
    CHECK(union_matrices(m, m) == m);
    OpMatrix x(SymbolSet{"a", "b"}), y(SymbolSet{"a", "b"});
    x.add("a", "b", Rel::Yields);
    y.add("a", "b", Rel::Takes);
    try {
      (void)union_matrices(x, y);
      FAIL("expected conflict");
    } catch (const ConflictError& e) {
      CHECK(e.cells() == std::vector<std::pair<Symbol, Symbol>>{{"a", "b"}});
    }
    OpMatrix c = compute_opm(corpus("gc")), n = compute_opm(corpus("gnc"));
    OpMatrix u = union_matrices(c, n);
    for (const auto& [k, v] : c.cells()) CHECK(u.at(k.first, k.second) == v);
    CHECK(u == union_matrices(n, c));
  }

  TEST_CASE("json round trip") {
    OpMatrix m = compute_opm(corpus("gnl"));
    CHECK(matrix_from_json(to_json(m)) == m);
  }
}
