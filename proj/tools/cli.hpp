#pragma once
// The opal command line. Every command writes to the given streams and
// returns the exit code: 0 holds, 1 fails or not a member, 2 bad input.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opal/logic.hpp"
#include "opal/nc.hpp"
#include "opal/ope.hpp"

namespace opal::cli {

enum Exit { kHolds = 0, kFails = 1, kBadInput = 2 };

class InputError : public Error {
 public:
  using Error::Error;
};

struct Options {
  bool json = false;
  std::string dot;
  int maxlen = -1;  // command default when negative
  double budget = 0;
  unsigned seed = 1;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

inline bool is_json_file(const std::string& path) { return std::filesystem::path(path).extension() == ".json"; }

inline Grammar read_grammar(const std::string& path) {
  auto text = slurp(path);
  if (is_json_file(path)) return grammar_from_json(nlohmann::json::parse(text));
  auto r = load_grammar(text);
  if (auto* rep = std::get_if<ValidationReport>(&r)) throw InputError(path + ": invalid grammar\n" + rep->str());
  return std::get<Grammar>(r);
}

inline OpMatrix read_matrix(const std::string& path) {
  auto text = slurp(path);
  if (is_json_file(path)) return matrix_from_json(nlohmann::json::parse(text));
  return load_matrix(text);
}

inline Budget budget_of(const Options& o) {
  Budget b = Budget::from_env();
  if (o.budget > 0) b.scale(o.budget);
  if (o.maxlen >= 0) b.maxlen = o.maxlen;
  return b;
}

inline int maxlen_or(const Options& o, int fallback) { return o.maxlen >= 0 ? o.maxlen : fallback; }

// Longest length <= maxlen whose words over `sigma` number at most `cap`.
inline int affordable_length(const SymbolSet& sigma, int maxlen, std::size_t cap) {
  std::size_t total = 0, layer = 1;
  int len = 0;
  while (len < maxlen) {
    layer *= std::max<std::size_t>(sigma.size(), 1);
    if (total + layer > cap) break;
    total += layer;
    ++len;
  }
  return len;
}

inline std::string chord_text(const ChordSet& cs) {
  std::string s;
  for (const auto& c : cs) s += (s.empty() ? "" : " ") + std::string("(") + std::to_string(c.left) + "," + std::to_string(c.right) + ")";
  return s;
}

inline std::string graph_text(const ControlGraph& cg) {
  std::ostringstream os;
  os << "states:";
  for (const auto& s : cg.states()) os << " " << s.name();
  os << "\n";
  for (const auto& e : cg.edges()) os << cg.state(e.from).name() << " -" << dot_label(e.label) << "-> " << cg.state(e.to).name() << "\n";
  return os.str();
}

inline int find_state(const ControlGraph& cg, const std::string& name) {
  for (int i = 0; i < cg.size(); ++i)
    if (cg.state(i).name() == name) return i;
  throw InputError("no state " + name);
}

class Driver {
 public:
  Driver(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Operator-precedence language toolkit", "opal"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.add_flag("--json", o_.json, "Machine-readable output");
    app.add_option("--dot", o_.dot, "Write a DOT rendering to this file");
    app.add_option("--maxlen", o_.maxlen, "Length bound for enumerations")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", o_.budget, "Scale factor for work budgets")->check(CLI::PositiveNumber);
    app.add_option("--seed", o_.seed, "Seed for sampled words");
    int code = kHolds;
    auto set = [&](std::function<int()> f) { return [this, f, &code] { code = f(); }; };

    auto* opm = app.add_subcommand("opm", "Precedence matrices")->require_subcommand(1);
    auto* opm_compute = opm->add_subcommand("compute", "Matrix of a grammar");
    opm_compute->add_option("grammar", a_.grammar)->required();
    opm_compute->callback(set([this] { return opm_compute_cmd(); }));

    auto* parse = app.add_subcommand("parse", "Parse a word");
    auto* src = parse->add_option_group("source");
    src->add_option("--opm", a_.matrix, "Matrix file");
    src->add_option("--grammar", a_.grammar, "Grammar file");
    src->require_option(1);
    parse->add_option("word", a_.word)->required();
    parse->callback(set([this] { return parse_cmd(); }));

    auto* ope = app.add_subcommand("ope", "Operator-precedence expressions")->require_subcommand(1);
    auto ope_sub = [&](const char* name, const char* help, bool word, std::function<int()> f) {
      auto* c = ope->add_subcommand(name, help);
      c->add_option("--opm", a_.matrix, "Complete matrix file")->required();
      c->add_flag("--global", a_.global, "Check fences by chord lookup in the whole parse");
      c->add_option("expr", a_.expr)->required();
      if (word) c->add_option("word", a_.word)->required();
      c->callback(set(std::move(f)));
    };
    ope_sub("eval", "Membership of a word", true, [this] { return ope_eval_cmd(); });
    ope_sub("enum", "Words up to --maxlen (default 6)", false, [this] { return ope_enum_cmd(); });
    ope_sub("fnf", "Flat normal form", false, [this] { return ope_fnf_cmd(); });
    ope_sub("to-fo", "First-order sentence", false, [this] { return ope_fo_cmd(); });

    auto* gr = app.add_subcommand("grammar", "Grammar transformations")->require_subcommand(1);
    auto gr_sub = [&](const char* name, const char* help, std::function<int()> f) {
      auto* c = gr->add_subcommand(name, help);
      c->add_option("grammar", a_.grammar)->required();
      c->callback(set(std::move(f)));
    };
    gr_sub("validate", "Check the grammar invariants", [this] { return grammar_validate_cmd(); });
    gr_sub("clean", "Drop useless symbols", [this] { return grammar_out([](const Grammar& g) { return clean(g); }); });
    gr_sub("bdr", "Backward-deterministic reduced form", [this] { return grammar_out([](const Grammar& g) { return normalize_bdr(g); }); });
    gr_sub("parenthesize", "Parenthesized grammar", [this] { return grammar_out([](const Grammar& g) { return parenthesize_grammar(g); }); });
    gr_sub("linearize", "Linearized grammar of the reduced form", [this] { return grammar_out([](const Grammar& g) { return linearize(normalize_bdr(g)); }); });

    auto* cg = app.add_subcommand("cg", "Control graphs")->require_subcommand(1);
    auto cg_sub = [&](const char* name, const char* help, std::function<int()> f) {
      auto* c = cg->add_subcommand(name, help);
      c->add_option("grammar", a_.grammar)->required();
      c->add_flag("--linearized", a_.linearized, "Use the graph of the linearized reduced grammar");
      c->callback(set(std::move(f)));
      return c;
    };
    cg_sub("build", "Control graph", [this] { return cg_build_cmd(); });
    auto* lang = cg_sub("lang", "Path language between two states", [this] { return cg_lang_cmd(); });
    lang->add_option("from", a_.from)->required();
    lang->add_option("to", a_.to)->required();
    cg_sub("counters", "Counter tables and paired counters", [this] { return cg_counters_cmd(); });

    auto* tr = app.add_subcommand("transform", "Noncounting transformation")->require_subcommand(1);
    auto tr_sub = [&](const char* name, const char* help, std::function<int()> f) {
      auto* c = tr->add_subcommand(name, help);
      c->add_option("grammar", a_.grammar)->required();
      c->callback(set(std::move(f)));
      return c;
    };
    tr_sub("hat", "Split control graph", [this] { return graph_out(run_pipeline(read_grammar(a_.grammar), budget_of(o_)).hat, "hat"); });
    tr_sub("bar", "Pipeline control graph", [this] { return graph_out(run_pipeline(read_grammar(a_.grammar), budget_of(o_)).bar, "bar"); });
    tr_sub("gprime", "Pair grammar", [this] { return gprime_cmd(); })->add_option("-o,--output", a_.output, "Write the grammar here");

    auto* nc = app.add_subcommand("nc", "Noncounting check")->require_subcommand(1);
    auto* nc_check = nc->add_subcommand("check", "Verdict with witness and bounds");
    nc_check->add_option("grammar", a_.grammar)->required();
    nc_check->callback(set([this] { return nc_check_cmd(); }));

    auto* lg = app.add_subcommand("logic", "Formulas over delimited words")->require_subcommand(1);
    auto* ev = lg->add_subcommand("eval", "Truth of a sentence on a word");
    ev->add_option("--opm", a_.matrix, "Matrix file")->required();
    auto* fsrc = ev->add_option_group("formula");
    fsrc->add_option("--formula", a_.expr, "Formula text");
    fsrc->add_option("--file", a_.file, "Formula file");
    fsrc->require_option(1);
    ev->add_option("word", a_.word)->required();
    ev->add_option("--mso-max", a_.mso_max, "Longest word for second-order quantifiers");
    ev->callback(set([this] { return logic_eval_cmd(); }));
    auto* rc = lg->add_subcommand("regular-control", "Path-language formula of a nonterminal, or the sentence formula");
    rc->add_option("grammar", a_.grammar)->required();
    rc->add_option("word", a_.word)->required();
    rc->add_option("-n,--nonterminal", a_.nonterminal, "Nonterminal; the sentence formula when absent");
    rc->add_flag("--show-formula", a_.show_formula, "Print the formula");
    rc->callback(set([this] { return regular_control_cmd(); }));

    auto* vf = app.add_subcommand("verify", "Invariant suites")->require_subcommand(1);
    auto* va = vf->add_subcommand("all", "Every suite on one grammar");
    va->add_option("grammar", a_.grammar)->required();
    va->callback(set([this] { return verify_all_cmd(); }));

    std::vector<const char*> argv{"opal"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kHolds;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kHolds;
    } catch (const CLI::ParseError& e) {
      err_ << e.what() << "\n";
      return kBadInput;
    } catch (const WordTooLongForMSO& e) {
      err_ << e.what() << "\n";
      return kBadInput;
    } catch (const IncompatibleString& e) {
      err_ << e.what() << "\n";
      return kFails;
    } catch (const std::exception& e) {
      err_ << e.what() << "\n";
      return kBadInput;
    }
    return code;
  }

 private:
  struct Args {
    std::string grammar, matrix, word, expr, file, from, to, nonterminal, output;
    bool global = false, linearized = false, show_formula = false;
    int mso_max = Budget{}.mso_max_len;
  };

  void emit(const nlohmann::json& j) { out_ << j.dump(2) << "\n"; }
  void dot(const std::string& text) {
    if (!o_.dot.empty()) spit(o_.dot, text);
  }

  int opm_compute_cmd() {
    auto r = compute_opm_detailed(read_grammar(a_.grammar));
    auto conflicts = r.matrix.conflicts();
    if (o_.json) {
      auto j = to_json(r.matrix);
      j["conflicts"] = nlohmann::json::array();
      for (const auto& [a, b] : conflicts) j["conflicts"].push_back({a, b});
      emit(j);
    } else {
      out_ << pretty(r.matrix);
      for (const auto& [a, b] : conflicts) out_ << "conflict (" << a << "," << b << "): " << to_string(r.matrix.at(a, b)) << "\n";
    }
    return conflicts.empty() ? kHolds : kFails;
  }

  int parse_cmd() {
    std::optional<Grammar> g;
    OpMatrix m = a_.matrix.empty() ? OpMatrix{} : read_matrix(a_.matrix);
    if (!a_.grammar.empty()) {
      g = read_grammar(a_.grammar);
      m = compute_opm(*g);
      if (!m.conflict_free()) throw ConflictError(m.conflicts());
    }
    Word w = read_word(a_.word, g ? g->terminals : m.alphabet());
    auto r = parse_max(w, m);
    nlohmann::json j = {{"word", w}};
    if (!r.ok()) {
      j["accepted"] = false;
      j["reason"] = describe(r.reject());
      if (o_.json) emit(j);
      err_ << describe(r.reject()) << "\n";
      return kFails;
    }
    const auto& t = r.tree();
    auto cs = chords(t);
    j["accepted"] = true;
    j["parenthesized"] = show(t.parenthesization());
    j["chords"] = nlohmann::json::array();
    for (const auto& c : cs) j["chords"].push_back({c.left, c.right});
    dot(t.dot());
    bool member = true;
    if (g) {
      auto mem = member_grammar(w, *g);
      member = mem.member;
      j["member"] = member;
      if (!member) j["reason"] = mem.reason;
    }
    if (o_.json) {
      emit(j);
    } else {
      out_ << "parenthesized: " << show(t.parenthesization()) << "\n";
      out_ << "chords: " << chord_text(cs) << "\n";
      if (g) out_ << "member: " << (member ? "yes" : "no") << "\n";
    }
    return member ? kHolds : kFails;
  }

  struct Ope {
    OpeContext ctx;
    OpePtr e;
  };
  Ope load_ope() {
    OpeContext ctx(read_matrix(a_.matrix), a_.global ? FenceRoute::Global : FenceRoute::Standalone);
    auto e = parse_ope(a_.expr, ctx.alphabet());
    return {std::move(ctx), std::move(e)};
  }

  int ope_eval_cmd() {
    auto [ctx, e] = load_ope();
    bool yes = ope_member(read_word(a_.word, ctx.alphabet()), e, ctx);
    if (o_.json) emit({{"member", yes}});
    else out_ << (yes ? "true" : "false") << "\n";
    return yes ? kHolds : kFails;
  }

  int ope_enum_cmd() {
    auto [ctx, e] = load_ope();
    auto found = ope_enumerate(e, ctx, maxlen_or(o_, 6));
    std::vector<Word> ws(found.begin(), found.end());
    std::stable_sort(ws.begin(), ws.end(), [](const Word& x, const Word& y) { return x.size() < y.size(); });
    if (o_.json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& x : ws) arr.push_back(x);
      emit(arr);
    } else {
      for (const auto& x : ws) out_ << (x.empty() ? "eps" : show(x)) << "\n";
    }
    return kHolds;
  }

  int ope_fnf_cmd() {
    auto [ctx, e] = load_ope();
    auto f = flat_normal_form(e, ctx);
    if (o_.json) emit({{"input", to_text(e)}, {"fnf", to_text(f)}});
    else out_ << to_text(f) << "\n";
    return kHolds;
  }

  int ope_fo_cmd() {
    auto [ctx, e] = load_ope();
    auto f = ope_to_fo(e, ctx);
    if (o_.json) emit({{"input", to_text(e)}, {"formula", to_text(f)}});
    else out_ << to_text(f) << "\n";
    return kHolds;
  }

  int grammar_validate_cmd() {
    auto r = load_grammar(slurp(a_.grammar));
    if (auto* rep = std::get_if<ValidationReport>(&r)) {
      if (o_.json) {
        nlohmann::json vs = nlohmann::json::array();
        for (const auto& v : rep->violations)
          vs.push_back({{"kind", to_string(v.kind)}, {"production", v.production ? production_text(*v.production) : ""}, {"note", v.note}});
        emit({{"ok", false}, {"violations", vs}});
      } else {
        out_ << rep->str();
      }
      return kFails;
    }
    const auto& g = std::get<Grammar>(r);
    auto m = compute_opm(g);
    if (o_.json) {
      nlohmann::json cs = nlohmann::json::array();
      for (const auto& [a, b] : m.conflicts()) cs.push_back({a, b});
      emit({{"ok", true}, {"violations", nlohmann::json::array()}, {"conflicts", cs}});
    } else {
      out_ << "ok\n";
      if (!m.conflict_free()) out_ << "note: not an operator precedence grammar; conflicting cells " << nlohmann::json(m.conflicts()).dump() << "\n";
    }
    return kHolds;
  }

  int grammar_out(const std::function<Grammar(const Grammar&)>& f) {
    Grammar g = f(read_grammar(a_.grammar));
    if (o_.json) emit(to_json(g));
    else out_ << to_text(g);
    return kHolds;
  }

  ControlGraph graph_of(const Grammar& g) { return build_control_graph(a_.linearized ? linearize(normalize_bdr(g)) : g); }

  int graph_out(const ControlGraph& cg, const std::string& name) {
    dot(to_dot(cg, name));
    if (o_.json) emit(to_json(cg));
    else out_ << graph_text(cg);
    return kHolds;
  }

  int cg_build_cmd() { return graph_out(graph_of(read_grammar(a_.grammar)), "control"); }

  int cg_lang_cmd() {
    auto cg = graph_of(read_grammar(a_.grammar));
    auto nfa = control_language(cg, find_state(cg, a_.from), find_state(cg, a_.to));
    Budget b = budget_of(o_);
    auto d = determinize_minimize(nfa, b);
    bool aperiodic = is_aperiodic_regular(d, b);
    auto found = enumerate(d, maxlen_or(o_, 8));
    std::vector<Word> ws(found.begin(), found.end());
    std::stable_sort(ws.begin(), ws.end(), [](const Word& x, const Word& y) { return x.size() < y.size(); });
    if (o_.json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& x : ws) arr.push_back(x);
      emit({{"nfa", to_json(nfa)}, {"aperiodic", aperiodic}, {"minimal_states", d.size()}, {"words", arr}});
    } else {
      out_ << "aperiodic: " << (aperiodic ? "yes" : "no") << "\n";
      out_ << "minimal states: " << d.size() << "\n";
      for (const auto& x : ws) out_ << show(x) << "\n";
    }
    return kHolds;
  }

  int cg_counters_cmd() {
    auto p = run_pipeline(read_grammar(a_.grammar), budget_of(o_));
    if (o_.json) {
      nlohmann::json ts = nlohmann::json::array(), ps = nlohmann::json::array();
      for (const auto& t : p.tables) ts.push_back(to_json(t));
      for (const auto& q : p.paired)
        ps.push_back({{"descending", q.desc}, {"ascending", q.asc}, {"orders", {q.desc_order, q.asc_order}}, {"coprime", q.coprime()}});
      emit({{"tables", ts}, {"paired", ps}});
    } else {
      for (const auto& t : p.tables) out_ << format_table(t);
      for (const auto& q : p.paired)
        out_ << "paired: table " << q.desc << " (order " << q.desc_order << ") with table " << q.asc << " (order " << q.asc_order << ")"
             << (q.coprime() ? "" : ", not coprime") << "\n";
      if (p.tables.empty()) out_ << "no counters\n";
    }
    return kHolds;
  }

  int gprime_cmd() {
    auto p = run_pipeline(read_grammar(a_.grammar), budget_of(o_));
    auto gp = build_gprime(p.bdr, p.bar, budget_of(o_));
    std::string text = o_.json ? to_json(gp.grammar).dump(2) + "\n" : to_text(gp.grammar);
    dot(to_dot(gprime_control_graph(gp), "gprime"));
    if (!a_.output.empty()) spit(a_.output, text);
    else out_ << text;
    return kHolds;
  }

  int nc_check_cmd() {
    auto v = is_noncounting_opl(read_grammar(a_.grammar), budget_of(o_));
    if (o_.json) {
      emit(to_json(v));
    } else {
      out_ << "status: " << to_string(v.status) << "\n";
      if (v.witness) {
        const auto& w = *v.witness;
        out_ << "witness: x=" << show(w.x) << " u=" << show(w.u) << " z=" << show(w.z) << " v=" << show(w.v) << " y=" << show(w.y) << " n=" << w.n
             << " (member at n: " << (w.member_n ? "yes" : "no") << ", at n+1: " << (w.member_n1 ? "yes" : "no") << ")\n";
      }
      out_ << "bounds: pumpN=" << v.pump_n << " maxlen=" << v.maxlen << " sentences=" << v.sentences << "\n";
      if (!v.note.empty()) out_ << "note: " << v.note << "\n";
    }
    return kHolds;
  }

  int logic_eval_cmd() {
    auto m = read_matrix(a_.matrix);
    auto f = parse_formula(a_.file.empty() ? a_.expr : slurp(a_.file));
    if (!f->free1.empty() || !f->free2.empty()) throw InputError("formula has free variables");
    bool yes = eval_formula(f, read_word(a_.word, m.alphabet()), m, a_.mso_max);
    if (o_.json) emit({{"formula", to_text(f)}, {"holds", yes}, {"first_order", f->first_order()}});
    else out_ << (yes ? "true" : "false") << "\n";
    return yes ? kHolds : kFails;
  }

  int regular_control_cmd() {
    RegularControl rc(read_grammar(a_.grammar));
    Word w = read_word(a_.word, rc.grammar().terminals);
    bool sentence = a_.nonterminal.empty();
    if (!sentence && !rc.grammar().is_nonterminal(a_.nonterminal)) throw InputError("no nonterminal " + a_.nonterminal);
    bool yes = sentence ? rc.sentence(w) : rc.check(w, a_.nonterminal);
    if (o_.json) {
      nlohmann::json j = {{"holds", yes}};
      if (a_.show_formula) j["formula"] = to_text(sentence ? rc.chi() : rc.psi(a_.nonterminal));
      emit(j);
    } else {
      if (a_.show_formula) out_ << to_text(sentence ? rc.chi() : rc.psi(a_.nonterminal)) << "\n";
      out_ << (yes ? "true" : "false") << "\n";
    }
    return yes ? kHolds : kFails;
  }

  struct Check {
    std::string name;
    bool ok;
    std::string detail;
  };

  int verify_all_cmd() {
    Grammar g = read_grammar(a_.grammar);
    Budget b = budget_of(o_);
    const auto cap = static_cast<std::size_t>(40000 * (o_.budget > 0 ? o_.budget : 1.0));
    const int len = affordable_length(g.terminals, maxlen_or(o_, 8), cap);
    std::vector<Check> checks;
    auto add = [&](std::string name, const std::function<std::pair<bool, std::string>()>& f) {
      try {
        auto [ok, detail] = f();
        checks.push_back({std::move(name), ok, std::move(detail)});
      } catch (const std::exception& e) {
        checks.push_back({std::move(name), false, e.what()});
      }
    };

    auto m = compute_opm(g);
    checks.push_back({"matrix is conflict-free", m.conflict_free(), m.conflict_free() ? "" : nlohmann::json(m.conflicts()).dump()});
    if (m.conflict_free()) {
      std::mt19937 rng(o_.seed);
      std::vector<Symbol> sigma(g.terminals.begin(), g.terminals.end());
      auto words = all_words(g.terminals, len, 1);
      for (int i = 0; i < 200 && !sigma.empty(); ++i) {
        Word x(static_cast<std::size_t>(len + 1 + static_cast<int>(rng() % 4)));
        for (auto& s : x) s = sigma[rng() % sigma.size()];
        words.push_back(std::move(x));
      }
      // Near misses: one-symbol substitutions of short members.
      std::set<Word> seen(words.begin(), words.end());
      for (const auto& [a, lang] : enumerate_nonterminals(g, len + 3, b))
        for (const auto& x : lang)
          for (std::size_t i = 0; i < x.size() && seen.size() < 2 * cap; ++i)
            for (const auto& s : sigma) {
              Word y = x;
              y[i] = s;
              if (seen.insert(y).second) words.push_back(std::move(y));
            }
      const std::string scope = std::to_string(words.size()) + " words";

      add("parser agrees with handle rewriting", [&] {
        for (const auto& x : words) {
          auto p = parse_max(x, m), q = parse_by_rewriting(x, m);
          if (p.ok() != q.ok() || (p.ok() && chords(p.tree()) != chords(q.tree()))) return std::pair{false, show(x)};
        }
        return std::pair{true, scope};
      });

      Grammar bdr = normalize_bdr(g);
      add("reduced form keeps the language", [&] {
        Recognizer r1(g), r2(bdr);
        for (const auto& x : words)
          if (r1.run(x).member != r2.run(x).member) return std::pair{false, show(x)};
        return std::pair{true, scope};
      });

      add("derivations follow control paths", [&] {
        auto cg = build_control_graph(g);
        for (const auto& [a, lang] : enumerate_nonterminals(g, std::min(len + 2, 10), b)) {
          auto d = determinize_minimize(control_language(cg, CgState::down(a), CgState::up(a)), b);
          for (const auto& x : lang)
            if (!x.empty() && !d.accepts(x)) return std::pair{false, a + ": " + show(x)};
        }
        return std::pair{true, std::string()};
      });

      add("path-language formulas match membership", [&] {
        RegularControl rc(g);
        std::map<Symbol, Recognizer> from;
        for (const auto& a : g.nonterminals) from.emplace(a, Recognizer(g, {a}));
        for (const auto& x : words)
          for (const auto& [a, rec] : from)
            if (rc.check(x, a) != rec.run(x).member) return std::pair{false, a + ": " + show(x)};
        return std::pair{true, scope};
      });

      auto p = run_pipeline(g, b);
      add("pipeline path languages are aperiodic", [&] {
        auto fails = check_bar_paths(p.bar, p.bdr.nonterminals, b);
        return std::pair{fails.empty(), fails.empty() ? std::string() : fails.front().from + " to " + fails.front().to};
      });

      auto gp = build_gprime(p.bdr, p.bar, b);
      add("pair grammar control languages are aperiodic", [&] {
        auto fails = check_gprime_control(gp, b);
        return std::pair{fails.empty(), fails.empty() ? std::string() : fails.front().from + " to " + fails.front().to};
      });
      const int plen = maxlen_or(o_, 12);
      add("pair grammar is structurally equivalent", [&] {
        bool same = enumerate_parenthesized(gp.grammar, plen, b) == enumerate_parenthesized(p.bdr, plen, b);
        return std::pair{same, "length " + std::to_string(plen)};
      });

      add("noncounting verdict is decided", [&] {
        auto v = is_noncounting_opl(g, b);
        return std::pair{v.status != NcStatus::Unknown, std::string(to_string(v.status)) + (v.note.empty() ? "" : "; " + v.note)};
      });
    }

    bool all = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
    if (o_.json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : checks) arr.push_back({{"check", c.name}, {"ok", c.ok}, {"detail", c.detail}});
      emit({{"ok", all}, {"checks", arr}});
    } else {
      for (const auto& c : checks) out_ << (c.ok ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    }
    return all ? kHolds : kFails;
  }

  std::ostream& out_;
  std::ostream& err_;
  Options o_;
  Args a_;
};

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) { return Driver(out, err).run(args); }

}  // namespace opal::cli
