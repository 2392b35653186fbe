#include "doctest.h"

#include <algorithm>

#include "corpus.hpp"
#include "opal/nc.hpp"

using namespace opal;
using opal::test::corpus;
using opal::test::w;

namespace {

const std::vector<std::string> kOpgCorpus = {"gae", "gc", "gnc", "gnl", "even_a", "paired2", "six", "interleaved", "gcross", "anbn", "l1", "l2", "l1l2"};

std::set<std::string> table_names(const std::vector<CounterTable>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(t.name());
  return out;
}

Grammar gl(const std::string& text) { return load_grammar_or_throw(text); }

// Counter tables by brute force: every sequence of distinct same-direction
// states closed into a cycle, every choice of labels along it.
std::set<std::string> tables_oracle(const ControlGraph& cg) {
  std::set<std::string> out;
  auto macro = macro_edges(cg);
  for (Dir dir : {Dir::Down, Dir::Up}) {
    std::vector<int> ids;
    for (int s = 0; s < cg.size(); ++s)
      if (cg.state(s).dir == dir) ids.push_back(s);
    const int n = static_cast<int>(ids.size());
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> pick;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) pick.push_back(ids[i]);
      if (pick.size() < 2) continue;
      std::sort(pick.begin(), pick.end());
      do {
        const int L = static_cast<int>(pick.size());
        std::vector<std::vector<Word>> choices(L);
        for (int t = 0; t < L; ++t)
          for (const auto& e : macro)
            if (e.from == pick[t] && e.to == pick[(t + 1) % L]) choices[t].push_back(e.label);
        std::vector<std::size_t> at(L, 0);
        if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;
        while (true) {
          std::vector<Word> lab(L);
          for (int t = 0; t < L; ++t) lab[t] = choices[t][at[t]];
          for (int j = 1; j <= L / 2; ++j) {
            if (L % j) continue;
            bool periodic = true;
            for (int t = j; t < L && periodic; ++t) periodic = lab[t] == lab[t - j];
            std::vector<Word> z(lab.begin(), lab.begin() + j);
            bool primitive = true;
            for (int p = 1; p < j && primitive; ++p) {
              if (j % p) continue;
              bool per = true;
              for (int t = p; t < j && per; ++t) per = z[t] == z[t - p];
              primitive = !per;
            }
            if (periodic && primitive) {
              std::vector<CgState> st;
              for (int s : pick) st.push_back(cg.state(s));
              out.insert(detail::table_key(detail::canonical_table(dir, st, lab, j)));
              break;
            }
          }
          int i = 0;
          while (i < L && ++at[i] == choices[i].size()) at[i++] = 0;
          if (i == L) break;
        }
      } while (std::next_permutation(pick.begin() + 1, pick.end()));
    }
  }
  return out;
}

ControlGraph shared_fragment() {
  ControlGraph cg;
  auto d = [](const char* s) { return CgState::down(s); };
  cg.add_edge(d("A"), {"a"}, d("H"), "");
  cg.add_edge(d("H"), {"b"}, d("L"), "");
  cg.add_edge(d("L"), {"a"}, d("B"), "");
  cg.add_edge(d("B"), {"b"}, d("A"), "");
  cg.add_edge(d("C"), {"c"}, d("H"), "");
  cg.add_edge(d("L"), {"c"}, d("D"), "");
  cg.add_edge(d("D"), {"b"}, d("C"), "");
  return cg;
}

std::set<std::tuple<std::string, std::string, std::string>> edge_set(const ControlGraph& cg) {
  std::set<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& e : cg.edges()) out.insert({cg.state(e.from).name(), join(e.label, " "), cg.state(e.to).name()});
  return out;
}

}  // namespace

TEST_SUITE("nc") {
  TEST_CASE("linearization of the nonlinear grammar") {
    Grammar lin = linearize(corpus("gnl"));
    Grammar expect = gl(
        "terminals: a b c A_bar B_bar epsL epsR\naxioms: A B\n"
        "A -> a B_bar c A epsR | a B c A_bar | a B_bar c B epsR | a B c B_bar | a c ;\n"
        "B -> b A_bar c A epsR | b A c A_bar | b A_bar c B epsR | b A c B_bar | b c ;\n");
    expect.canonicalize();
    CHECK(lin.productions == expect.productions);
    CHECK(extract_w(lin) == std::set<Word>{{"a"}, {"b"}, {"a", "B_bar", "c"}, {"b", "A_bar", "c"}, {"c", "A_bar"}, {"c", "B_bar"}, {"a", "c"}, {"b", "c"}, {"epsR"}});
  }

  TEST_CASE("linearization of small rules") {
    Grammar g = gl("terminals: a c\naxioms: A\nA -> a B c ;\nB -> a ;\n");
    CHECK(linearize(g).productions == g.productions);
    Grammar h = gl("terminals: a b\naxioms: A\nA -> B a C ;\nB -> b ;\nC -> b ;\n");
    auto lin = linearize(h);
    auto has = [&](Word r) { return std::count(lin.productions.begin(), lin.productions.end(), Production{"A", r}) == 1; };
    CHECK(has({"epsL", "B", "a", "C_bar"}));
    CHECK(has({"B_bar", "a", "C", "epsR"}));
  }

  TEST_CASE("counter tables of the corpus") {
    auto tabs = [](const std::string& n) { return find_counter_tables(build_control_graph(linearize(normalize_bdr(corpus(n))))); };
    auto ea = tabs("even_a");
    REQUIRE(ea.size() == 1);
    CHECK(ea[0].name() == "(dA dB, a)");
    CHECK(ea[0].dir == Dir::Down);

    auto six = tabs("six");
    REQUIRE(six.size() == 2);
    CHECK(six[0].dir == Dir::Down);
    CHECK(six[0].rows == 3);
    CHECK(six[0].cols == 2);
    CHECK(six[0].name() == "(dA1 dA3 dA5, a b)");
    CHECK(six[1].dir == Dir::Up);
    CHECK(six[1].rows == 2);
    CHECK(six[1].cols == 3);
    CHECK(six[1].name() == "(uA1 uA4, h g f)");

    CHECK(table_names(tabs("gnl")) == std::set<std::string>{"(uA uB, c A_bar)", "(uA uB, c B_bar)", "(uA uB, epsR)"});
    for (const auto& t : tabs("gnl")) {
      CHECK(t.dir == Dir::Up);
      CHECK(t.rows == 2);
      CHECK(t.cols == 1);
    }
    CHECK(table_names(tabs("gc")) == std::set<std::string>{"(dE dO, a)", "(uE uO, b)"});
    CHECK(tabs("gae").empty());
  }

  TEST_CASE("table search agrees with the brute-force oracle") {
    for (const auto& n : kOpgCorpus) {
      auto cg = build_control_graph(linearize(normalize_bdr(corpus(n))));
      CHECK_MESSAGE(table_keys(find_counter_tables(cg)) == tables_oracle(cg), n);
    }
    CHECK(table_keys(find_counter_tables(shared_fragment())) == tables_oracle(shared_fragment()));
  }

  TEST_CASE("grid layout") {
    auto t = find_counter_tables(build_control_graph(linearize(corpus("six"))));
    auto s = format_table(t[0]);
    CHECK(s.find("dA1 -a-> dA2 -b-> dA3") != std::string::npos);
    CHECK(s.find("dA5 -a-> dA6 -b-> dA1") != std::string::npos);
  }

  TEST_CASE("cycle budget") {
    Budget b;
    b.cycle_cap = 3;
    CHECK_THROWS_AS(find_counter_tables(build_control_graph(linearize(corpus("gnl"))), b), CycleBudgetExceeded);
  }

  TEST_CASE("paired counters") {
    auto run = [](const std::string& n) { return run_pipeline(corpus(n)); };
    auto p2 = run("paired2");
    REQUIRE(p2.paired.size() == 1);
    CHECK(p2.paired[0].desc_order == 2);
    CHECK(p2.paired[0].asc_order == 2);
    CHECK_FALSE(p2.paired[0].coprime());
    auto six = run("six");
    REQUIRE(six.paired.size() == 1);
    CHECK(six.paired[0].desc_order == 3);
    CHECK(six.paired[0].asc_order == 2);
    CHECK(six.paired[0].coprime());
    CHECK(run("even_a").paired.empty());
    CHECK(run("gnc").paired.empty());
    CHECK(run("gae").paired.empty());
    // The evidence is a closed chain of linear productions.
    for (const auto* p : {&p2, &six}) {
      const auto& ev = p->paired[0].evidence;
      std::set<Production> prods(p->linear.productions.begin(), p->linear.productions.end());
      for (std::size_t t = 0; t < ev.size(); ++t) {
        CHECK(prods.count(ev[t]));
        const auto& next = ev[(t + 1) % ev.size()];
        CHECK(std::count(ev[t].rhs.begin(), ev[t].rhs.end(), next.lhs) == 1);
      }
    }
  }

  TEST_CASE("split graph of the shared fragment") {
    auto cg = shared_fragment();
    auto tabs = find_counter_tables(cg);
    REQUIRE(tabs.size() == 2);
    auto hat = build_hat(cg, tabs);
    auto e = edge_set(hat);
    for (const char* a : {"dH[1]", "dH[2]"})
      for (const char* b : {"dL[1]", "dL[2]"}) CHECK(e.count({a, "b", b}));
    CHECK(e.count({"dA[1]", "a", "dH[1]"}));
    CHECK(e.count({"dA[1]", "a", "dH[2]"}));
    CHECK(hat.size() == 8);
    // Index erasure maps the split graph's tables onto the original ones.
    CHECK(projected_table_keys(find_counter_tables(hat, Budget{}, max_period(tabs))) == table_keys(tabs));
  }

  TEST_CASE("split graph tables project onto the original tables") {
    for (const auto& n : kOpgCorpus) {
      auto p = run_pipeline(corpus(n));
      CHECK_MESSAGE(projected_table_keys(find_counter_tables(p.hat, Budget{}, max_period(p.tables))) == table_keys(p.tables), n);
    }
    auto ea = run_pipeline(corpus("even_a"));
    CHECK(ea.hat.size() == ea.control.size());
    CHECK(ea.hat.edges().size() == ea.control.edges().size());
  }

  TEST_CASE("pipelines of the (aa)*d(bc)* grammar") {
    auto p = run_pipeline(corpus("even_a"));
    auto e = edge_set(p.bar);
    CHECK(e.count({"dA[1,0]", "a", "dB[1,1]"}));
    CHECK(e.count({"dB[1,1]", "a", "dAB[1]"}));
    CHECK(e.count({"dB[1,0]", "a", "dA[1,1]"}));
    CHECK(e.count({"dA[1,1]", "a", "dAB[1]"}));
    CHECK(e.count({"dAB[1]", "a", "dAB[1]"}));
    CHECK(e.count({"dAB[1]", "d", "uA"}));
    CHECK(e.count({"dA[1,0]", "d", "uA"}));
    auto lang = control_language(p.bar, detail::pipeline_state(hat_tables(p.tables)[0], 0, 0), CgState::up("A"));
    CHECK(is_aperiodic_regular(lang));
  }

  TEST_CASE("pipelines of the nonlinear grammar") {
    auto p = run_pipeline(corpus("gnl"));
    std::set<std::tuple<std::string, std::string, std::string>> down_c, down_bar;
    for (const auto& [a, l, b] : edge_set(p.control))
      if (a[0] == 'd' && b[0] == 'd') down_c.insert({a, l, b});
    for (const auto& [a, l, b] : edge_set(p.bar))
      if (a[0] == 'd' && b[0] == 'd') down_bar.insert({a, l, b});
    CHECK(down_c == down_bar);
    auto tabs = hat_tables(p.tables);
    for (const auto& t : tabs) {
      CHECK(t.size() == 2);
      for (int c = 0; c < t.size(); ++c) {
        // Entry, one more pipeline state, then the counter-sequence state.
        auto e0 = detail::pipeline_state(t, c, 0), e1 = detail::pipeline_state(t, c + 1, 1);
        auto x = detail::sequence_state(t, 0);
        auto es = edge_set(p.bar);
        CHECK(es.count({e0.name(), dot_label(t.labels[0]), e1.name()}));
        CHECK(es.count({e1.name(), dot_label(t.labels[0]), x.name()}));
        CHECK(es.count({x.name(), dot_label(t.labels[0]), x.name()}));
      }
    }
    int sequences = 0;
    for (const auto& s : p.bar.states()) sequences += s.counter_sequence();
    CHECK(sequences == 3);
  }

  TEST_CASE("homonymous pipeline states stay distinct") {
    ControlGraph cg;
    auto d = [](const char* s) { return CgState::down(s); };
    cg.add_edge(d("A"), {"a"}, d("B"), "");
    cg.add_edge(d("B"), {"b"}, d("C"), "");
    cg.add_edge(d("C"), {"c"}, d("B"), "");
    cg.add_edge(d("B"), {"a"}, d("D"), "");
    cg.add_edge(d("D"), {"b"}, d("E"), "");
    cg.add_edge(d("E"), {"c"}, d("A"), "");
    CounterTable t;
    t.index = 1;
    t.rows = 2;
    t.cols = 3;
    for (const char* s : {"A", "B", "C", "B", "D", "E"}) t.cells.push_back(d(s));
    t.labels = {{"a"}, {"b"}, {"c"}};
    auto hat = build_hat(cg, {t});
    auto bar = build_bar(hat, hat_tables({t}));
    CHECK(bar.size() == 36 + 3);
    std::set<std::string> names;
    for (const auto& s : bar.states()) names.insert(s.name());
    CHECK(names.size() == static_cast<std::size_t>(bar.size()));
    CHECK(names.count("dB[1,0]~1"));
    CHECK(names.count("dB[1,0]~2"));
    CHECK(names.count("dAB[1]"));
    CHECK(names.count("dBD[1]"));
    CHECK(names.count("dCE[1]"));
    // B -b-> C continues the table from the first B and leaves it from the second.
    auto e = edge_set(bar);
    CHECK(e.count({"dB[1,1]~1", "b", "dC[1,2]"}));
    CHECK(e.count({"dB[1,3]~2", "b", "dC[1,0]"}));
    CHECK_FALSE(e.count({"dB[1,3]~2", "b", "dC[1,4]"}));
  }

  TEST_CASE("pipeline path languages are aperiodic") {
    for (const auto& n : kOpgCorpus) {
      auto p = run_pipeline(corpus(n));
      auto fails = check_bar_paths(p.bar, p.bdr.nonterminals);
      CHECK_MESSAGE(fails.empty(), n);
    }
    // The unsplit graph of the same grammar is not.
    auto p = run_pipeline(corpus("even_a"));
    CHECK_FALSE(is_aperiodic_regular(control_language(p.control, CgState::down("A"), CgState::up("A"))));
  }

  TEST_CASE("pair grammar of the nonlinear grammar") {
    auto p = run_pipeline(corpus("gnl"));
    auto gp = build_gprime(p.bdr, p.bar);
    std::set<Production> prods(gp.grammar.productions.begin(), gp.grammar.productions.end());
    for (int f = 1; f <= 3; ++f) {
      std::string fs = std::to_string(f);
      CHECK(prods.count({"(dA,uA[" + fs + ",0])", {"a", "c"}}));
      CHECK(prods.count({"(dB,uB[" + fs + ",0])", {"b", "c"}}));
    }
  }

  TEST_CASE("pair grammar of the crossing grammar") {
    auto p = run_pipeline(corpus("gcross"));
    auto gp = build_gprime(p.bdr, p.bar);
    std::set<Symbol> deriving_h;
    for (const auto& q : gp.grammar.productions)
      if (q.rhs == Word{"h"} && gp.grammar.axioms.count(q.lhs)) deriving_h.insert(q.lhs);
    CHECK(deriving_h == std::set<Symbol>{"(dB[1,0],uB[2,0])"});
  }

  TEST_CASE("pair grammar without counters is a renaming") {
    auto p = run_pipeline(corpus("gae"));
    auto gp = build_gprime(p.bdr, p.bar);
    CHECK(gp.grammar.nonterminals.size() == p.bdr.nonterminals.size());
    for (const auto& [n, a] : gp.origin) CHECK(n == "(d" + a + ",u" + a + ")");
    CHECK(project_gprime(gp).productions == p.bdr.productions);
  }

  TEST_CASE("pair grammars are structurally equivalent with aperiodic control") {
    for (const auto& n : kOpgCorpus) {
      auto p = run_pipeline(corpus(n));
      auto gp = build_gprime(p.bdr, p.bar);
      int len = n == "six" ? 40 : 12;
      CHECK_MESSAGE(enumerate_parenthesized(gp.grammar, len) == enumerate_parenthesized(p.bdr, len), n);
      auto proj = project_gprime(gp);
      for (const auto& q : proj.productions) CHECK(std::count(p.bdr.productions.begin(), p.bdr.productions.end(), q) == 1);
      CHECK_MESSAGE(check_gprime_control(gp).empty(), n);
    }
  }

  TEST_CASE("noncounting verdicts") {
    auto gc = is_noncounting_opl(corpus("gc"));
    CHECK(gc.status == NcStatus::Counting);
    REQUIRE(gc.witness);
    ParenthesizedRecognizer rec(corpus("gc"));
    CHECK(witness_holds(*gc.witness, [&](const Word& x) { return rec.accepts(x); }));
    CHECK(is_noncounting_opl(corpus("gnc")).status == NcStatus::Noncounting);
    CHECK(is_noncounting_opl(corpus("paired2")).status == NcStatus::Counting);
    CHECK(is_noncounting_opl(corpus("gae")).status == NcStatus::Noncounting);
    CHECK_THROWS_AS(is_noncounting_opl(corpus("gnoop")), Error);
  }

  TEST_CASE("structural criterion agrees with the pump oracle") {
    for (const auto& n : kOpgCorpus) {
      auto g = corpus(n);
      auto p = run_pipeline(g);
      bool structural = std::any_of(p.paired.begin(), p.paired.end(), [](const auto& x) { return !x.coprime(); });
      auto oracle = pump_oracle_parenthesized(p.bdr, 3, 14);
      REQUIRE(oracle.status != NcStatus::Unknown);
      CHECK_MESSAGE(structural == (oracle.status == NcStatus::Counting), n);
      CHECK_MESSAGE(is_noncounting_opl(g).status == oracle.status, n);
    }
  }

  TEST_CASE("linearization keeps the pump verdict") {
    for (const auto& n : kOpgCorpus) {
      auto bdr = normalize_bdr(corpus(n));
      auto a = pump_oracle_parenthesized(bdr, 3, 14), b = pump_oracle_parenthesized(linearize(bdr), 3, 14);
      CHECK_MESSAGE(a.status == b.status, n);
    }
  }

  TEST_CASE("parenthesized control languages of linear grammars") {
    for (const auto& n : kOpgCorpus) {
      auto lin = linearize(normalize_bdr(corpus(n)));
      auto plain = build_control_graph(lin), par = build_control_graph(parenthesize_grammar(lin));
      for (const auto& a : lin.nonterminals) {
        bool x = is_aperiodic_regular(control_language(plain, CgState::down(a), CgState::up(a)));
        bool y = is_aperiodic_regular(control_language(par, CgState::down(a), CgState::up(a)));
        CHECK_MESSAGE(x == y, n << " " << a);
      }
    }
  }

  TEST_CASE("parenthesized recognizer agrees with the precedence parser") {
    for (const auto& n : kOpgCorpus) {
      auto g = normalize_bdr(corpus(n));
      Recognizer rec(g);
      ParenthesizedRecognizer prec(g);
      for (const auto& s : enumerate_parenthesized(g, 14)) CHECK(prec.accepts(s));
      for (const auto& x : all_words(g.terminals, 5)) {
        auto r = rec.run(x);
        if (r.member) CHECK(prec.accepts(r.tree->parenthesization()));
      }
      CHECK_FALSE(prec.accepts(w("(ab")));
    }
  }
}
