#pragma once
// Operator grammars: text format, validation, cleaning, parenthesized
// version and backward-deterministic reduced normal form.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "opal/core.hpp"

namespace opal {

struct Production {
  Symbol lhs;
  Word rhs;
  auto operator<=>(const Production&) const = default;
};

struct Grammar {
  SymbolSet terminals;
  SymbolSet nonterminals;
  std::vector<Production> productions;
  SymbolSet axioms;

  bool is_terminal(const Symbol& s) const { return terminals.count(s) > 0; }
  bool is_nonterminal(const Symbol& s) const { return nonterminals.count(s) > 0; }

  std::vector<const Production*> rules_of(const Symbol& a) const {
    std::vector<const Production*> out;
    for (const auto& p : productions)
      if (p.lhs == a) out.push_back(&p);
    return out;
  }

  // Sort productions and drop duplicates for canonical output.
  void canonicalize() {
    std::sort(productions.begin(), productions.end());
    productions.erase(std::unique(productions.begin(), productions.end()), productions.end());
  }
};

enum class ViolationKind { OperatorFormViolation, RenamingRule, EmptyRule, UnknownSymbol, NoAxiom };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::OperatorFormViolation: return "OperatorFormViolation";
    case ViolationKind::RenamingRule: return "RenamingRule";
    case ViolationKind::EmptyRule: return "EmptyRule";
    case ViolationKind::UnknownSymbol: return "UnknownSymbol";
    case ViolationKind::NoAxiom: return "NoAxiom";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::optional<Production> production;
  std::string note;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const {
    std::ostringstream os;
    for (const auto& v : violations) {
      os << to_string(v.kind);
      if (v.production) os << " in " << v.production->lhs << " -> " << join(v.production->rhs, " ");
      if (!v.note.empty()) os << ": " << v.note;
      os << "\n";
    }
    return os.str();
  }
};

class EmptyLanguage : public Error {
 public:
  EmptyLanguage() : Error("no axiom is productive") {}
};

inline ValidationReport validate(const Grammar& g) {
  ValidationReport rep;
  auto add = [&](ViolationKind k, const Production* p, std::string note) {
    rep.violations.push_back({k, p ? std::optional<Production>(*p) : std::nullopt, std::move(note)});
  };
  for (const auto& t : g.terminals) {
    if (is_reserved(t)) add(ViolationKind::UnknownSymbol, nullptr, "reserved symbol '" + t + "' used as terminal");
    if (g.nonterminals.count(t)) add(ViolationKind::UnknownSymbol, nullptr, "'" + t + "' is both terminal and nonterminal");
  }
  if (g.axioms.empty()) add(ViolationKind::NoAxiom, nullptr, "no axiom declared");
  for (const auto& a : g.axioms)
    if (!g.is_nonterminal(a)) add(ViolationKind::UnknownSymbol, nullptr, "axiom '" + a + "' is not a nonterminal");

  SymbolSet in_rhs;
  for (const auto& p : g.productions)
    for (const auto& s : p.rhs)
      if (g.is_nonterminal(s)) in_rhs.insert(s);

  int empties = 0;
  for (const auto& p : g.productions) {
    if (!g.is_nonterminal(p.lhs)) add(ViolationKind::UnknownSymbol, &p, "lhs '" + p.lhs + "' is not a nonterminal");
    for (const auto& s : p.rhs)
      if (!g.is_terminal(s) && !g.is_nonterminal(s)) add(ViolationKind::UnknownSymbol, &p, "symbol '" + s + "'");
    if (p.rhs.empty()) {
      ++empties;
      if (!g.axioms.count(p.lhs) || in_rhs.count(p.lhs))
        add(ViolationKind::EmptyRule, &p, "empty rule allowed only for an axiom absent from every rhs");
      else if (empties > 1)
        add(ViolationKind::EmptyRule, &p, "at most one empty rule");
      continue;
    }
    if (p.rhs.size() == 1 && g.is_nonterminal(p.rhs[0])) add(ViolationKind::RenamingRule, &p, "");
    for (std::size_t i = 0; i + 1 < p.rhs.size(); ++i)
      if (g.is_nonterminal(p.rhs[i]) && g.is_nonterminal(p.rhs[i + 1]))
        add(ViolationKind::OperatorFormViolation, &p, p.rhs[i] + " " + p.rhs[i + 1]);
  }
  return rep;
}

namespace detail {

struct Token {
  std::string text;
  int line;
  int col;
};

inline bool upper_initial(const Symbol& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

}  // namespace detail

// Parse grammar text. Throws SyntaxError on malformed input; returns the
// exhaustive report when the grammar breaks an invariant.
inline std::variant<Grammar, ValidationReport> load_grammar(std::string_view source) {
  Grammar g;
  std::optional<SymbolSet> declared_t, declared_n;
  std::vector<detail::Token> body;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t nl = source.find('\n', pos);
    if (nl == std::string_view::npos) nl = source.size();
    std::string line(source.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto header = [&](std::string_view key) { return line.compare(first, key.size(), key) == 0; };
    if (header("terminals:") || header("nonterminals:") || header("axioms:")) {
      auto colon = line.find(':', first);
      auto key = line.substr(first, colon - first);
      auto syms = split_ws(std::string_view(line).substr(colon + 1));
      SymbolSet set(syms.begin(), syms.end());
      if (key == "terminals") declared_t = set;
      else if (key == "nonterminals") declared_n = set;
      else g.axioms.insert(set.begin(), set.end());
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      std::string tok = line.substr(i, j - i);
      int col = static_cast<int>(i) + 1;
      if (tok.size() > 1 && tok.back() == ';') {
        body.push_back({tok.substr(0, tok.size() - 1), lineno, col});
        body.push_back({";", lineno, col + static_cast<int>(tok.size()) - 1});
      } else {
        body.push_back({tok, lineno, col});
      }
      i = j;
    }
  }

  struct RawRule {
    Symbol lhs;
    std::vector<Word> alts;
  };
  std::vector<RawRule> raw;
  std::size_t k = 0;
  while (k < body.size()) {
    const auto& lhs = body[k];
    if (lhs.text == "->" || lhs.text == "|" || lhs.text == ";")
      throw SyntaxError("expected nonterminal, found '" + lhs.text + "'", lhs.line, lhs.col);
    if (k + 1 >= body.size() || body[k + 1].text != "->")
      throw SyntaxError("expected '->' after '" + lhs.text + "'", lhs.line, lhs.col + static_cast<int>(lhs.text.size()));
    k += 2;
    RawRule r{lhs.text, {Word{}}};
    bool closed = false;
    while (k < body.size()) {
      const auto& t = body[k++];
      if (t.text == ";") {
        closed = true;
        break;
      }
      if (t.text == "|") {
        r.alts.emplace_back();
        continue;
      }
      if (t.text == "->") throw SyntaxError("unexpected '->'", t.line, t.col);
      if (t.text != "eps") r.alts.back().push_back(t.text);
    }
    if (!closed) throw SyntaxError("missing ';' after rule for " + lhs.text, lhs.line, lhs.col);
    raw.push_back(std::move(r));
  }

  SymbolSet lhs_set;
  for (const auto& r : raw) lhs_set.insert(r.lhs);
  auto classify_nt = [&](const Symbol& s) {
    if (declared_t && declared_t->count(s)) return false;
    if (declared_n && declared_n->count(s)) return true;
    return lhs_set.count(s) > 0 || detail::upper_initial(s);
  };
  ValidationReport rep;
  for (const auto& r : raw) {
    g.nonterminals.insert(r.lhs);
    for (const auto& alt : r.alts) {
      g.productions.push_back({r.lhs, alt});
      for (const auto& s : alt) {
        if (classify_nt(s)) g.nonterminals.insert(s);
        else if (!declared_t || declared_t->count(s)) g.terminals.insert(s);
        else rep.violations.push_back({ViolationKind::UnknownSymbol, g.productions.back(), "undeclared terminal '" + s + "'"});
      }
    }
  }
  if (declared_t) g.terminals.insert(declared_t->begin(), declared_t->end());
  if (declared_n) g.nonterminals.insert(declared_n->begin(), declared_n->end());
  auto rest = validate(g);
  rep.violations.insert(rep.violations.end(), rest.violations.begin(), rest.violations.end());
  if (!rep.ok()) return rep;
  return g;
}

// Load or throw with the full report as message.
inline Grammar load_grammar_or_throw(std::string_view source) {
  auto r = load_grammar(source);
  if (auto* rep = std::get_if<ValidationReport>(&r)) throw Error("invalid grammar:\n" + rep->str());
  return std::get<Grammar>(r);
}

inline std::string to_text(const Grammar& g) {
  std::ostringstream os;
  os << "terminals:";
  for (const auto& t : g.terminals) os << " " << t;
  os << "\nnonterminals:";
  for (const auto& n : g.nonterminals) os << " " << n;
  os << "\naxioms:";
  for (const auto& a : g.axioms) os << " " << a;
  os << "\n";
  std::vector<Symbol> order;
  for (const auto& p : g.productions)
    if (std::find(order.begin(), order.end(), p.lhs) == order.end()) order.push_back(p.lhs);
  for (const auto& a : order) {
    os << a << " ->";
    bool first = true;
    for (const auto& p : g.productions) {
      if (p.lhs != a) continue;
      os << (first ? " " : " | ") << (p.rhs.empty() ? "eps" : join(p.rhs, " "));
      first = false;
    }
    os << " ;\n";
  }
  return os.str();
}

inline nlohmann::json to_json(const Grammar& g) {
  nlohmann::json prods = nlohmann::json::array();
  for (const auto& p : g.productions) prods.push_back({{"lhs", p.lhs}, {"rhs", p.rhs}});
  return {{"terminals", g.terminals}, {"nonterminals", g.nonterminals}, {"productions", prods}, {"axioms", g.axioms}};
}

inline Grammar grammar_from_json(const nlohmann::json& j) {
  Grammar g;
  g.terminals = j.at("terminals").get<SymbolSet>();
  g.nonterminals = j.at("nonterminals").get<SymbolSet>();
  g.axioms = j.at("axioms").get<SymbolSet>();
  for (const auto& p : j.at("productions")) g.productions.push_back({p.at("lhs").get<Symbol>(), p.at("rhs").get<Word>()});
  return g;
}

// Nonterminals deriving at least one terminal string.
inline SymbolSet productive_nonterminals(const Grammar& g) {
  SymbolSet prod;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (prod.count(p.lhs)) continue;
      bool ok = std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Symbol& s) { return g.is_terminal(s) || prod.count(s); });
      if (ok) prod.insert(p.lhs), changed = true;
    }
  }
  return prod;
}

// Remove unproductive and unreachable nonterminals and unused terminals.
inline Grammar clean(const Grammar& g) {
  SymbolSet prod = productive_nonterminals(g);
  SymbolSet axioms;
  for (const auto& a : g.axioms)
    if (prod.count(a)) axioms.insert(a);
  if (axioms.empty()) throw EmptyLanguage();
  std::vector<Production> kept;
  for (const auto& p : g.productions)
    if (prod.count(p.lhs) && std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Symbol& s) { return g.is_terminal(s) || prod.count(s); }))
      kept.push_back(p);
  SymbolSet reach = axioms;
  std::vector<Symbol> todo(axioms.begin(), axioms.end());
  while (!todo.empty()) {
    Symbol a = todo.back();
    todo.pop_back();
    for (const auto& p : kept)
      if (p.lhs == a)
        for (const auto& s : p.rhs)
          if (g.is_nonterminal(s) && reach.insert(s).second) todo.push_back(s);
  }
  Grammar out;
  out.axioms = axioms;
  for (const auto& p : kept) {
    if (!reach.count(p.lhs)) continue;
    out.productions.push_back(p);
    out.nonterminals.insert(p.lhs);
    for (const auto& s : p.rhs)
      if (g.is_terminal(s)) out.terminals.insert(s);
  }
  return out;
}

// Wrap every rhs in the open/close markers.
inline Grammar parenthesize_grammar(const Grammar& g) {
  Grammar out = g;
  for (auto& p : out.productions) {
    Word w{kOpen};
    w.insert(w.end(), p.rhs.begin(), p.rhs.end());
    w.push_back(kClose);
    p.rhs = std::move(w);
  }
  out.terminals.insert(kOpen);
  out.terminals.insert(kClose);
  return out;
}

namespace detail {

// Rhs with nonterminal slots blanked out; productions sharing a skeleton
// differ only in the nonterminals they hold.
inline Word skeleton(const Grammar& g, const Word& rhs) {
  Word sk = rhs;
  for (auto& s : sk)
    if (g.is_nonterminal(s)) s.clear();
  return sk;
}

inline std::vector<std::size_t> slots(const Word& sk) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sk.size(); ++i)
    if (sk[i].empty()) out.push_back(i);
  return out;
}

inline std::string set_name(const SymbolSet& s) {
  if (s.size() == 1) return *s.begin();
  std::string out = "{";
  bool first = true;
  for (const auto& x : s) {
    if (!first) out += ",";
    out += x;
    first = false;
  }
  return out + "}";
}

}  // namespace detail

// Backward-deterministic reduced form: subset construction over lhs sets,
// then minimization of the induced bottom-up tree recognizer.
inline Grammar normalize_bdr(const Grammar& input) {
  Grammar g = clean(input);
  std::optional<Production> empty_rule;
  std::map<Word, std::vector<const Production*>> groups;
  for (const auto& p : g.productions) {
    if (p.rhs.empty()) {
      empty_rule = p;
      continue;
    }
    groups[detail::skeleton(g, p.rhs)].push_back(&p);
  }

  std::vector<SymbolSet> sets;
  std::map<SymbolSet, int> set_id;
  struct Rule {
    Word skel;
    std::vector<int> kids;
    int lhs;
    auto operator<=>(const Rule&) const = default;
  };
  std::set<Rule> rules;
  auto intern = [&](const SymbolSet& s) {
    auto [it, fresh] = set_id.emplace(s, static_cast<int>(sets.size()));
    if (fresh) sets.push_back(s);
    return std::pair{it->second, fresh};
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [sk, prods] : groups) {
      auto sl = detail::slots(sk);
      std::vector<int> pick(sl.size(), 0);
      int n = static_cast<int>(sets.size());
      if (!sl.empty() && n == 0) continue;
      while (true) {
        SymbolSet lhs;
        for (const auto* p : prods) {
          bool ok = true;
          for (std::size_t i = 0; i < sl.size() && ok; ++i) ok = sets[pick[i]].count(p->rhs[sl[i]]) > 0;
          if (ok) lhs.insert(p->lhs);
        }
        if (!lhs.empty()) {
          auto [id, fresh] = intern(lhs);
          if (rules.insert({sk, pick, id}).second) changed = true;
          changed |= fresh;
        }
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == n) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
  }

  // Keep states usable from an axiom set.
  std::set<int> finals;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (const auto& a : g.axioms)
      if (sets[i].count(a)) finals.insert(static_cast<int>(i));
  std::set<int> live = finals;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& r : rules)
      if (live.count(r.lhs))
        for (int k : r.kids) grew |= live.insert(k).second;
  }

  // Partition refinement on live states.
  std::map<int, int> cls;
  for (int q : live) cls[q] = finals.count(q) ? 1 : 0;
  std::size_t nclasses = 0;
  while (true) {
    using Sig = std::tuple<Word, std::size_t, std::vector<int>, int>;
    std::map<int, std::pair<int, std::set<Sig>>> sig;
    for (int q : live) sig[q].first = cls[q];
    for (const auto& r : rules) {
      if (!live.count(r.lhs)) continue;
      for (std::size_t i = 0; i < r.kids.size(); ++i) {
        std::vector<int> others;
        for (std::size_t j = 0; j < r.kids.size(); ++j) others.push_back(j == i ? -1 : cls[r.kids[j]]);
        sig[r.kids[i]].second.insert({r.skel, i, others, cls[r.lhs]});
      }
    }
    std::map<std::pair<int, std::set<Sig>>, int> ids;
    std::map<int, int> next;
    for (int q : live) next[q] = ids.emplace(sig[q], static_cast<int>(ids.size())).first->second;
    cls = std::move(next);
    if (ids.size() == nclasses) break;
    nclasses = ids.size();
  }

  std::map<int, SymbolSet> members;
  for (int q : live) members[cls[q]].insert(sets[q].begin(), sets[q].end());
  std::map<int, Symbol> name;
  std::set<Symbol> used;
  for (const auto& [c, m] : members) {
    Symbol base = detail::set_name(m);
    Symbol nm = base;
    for (int k = 2; used.count(nm); ++k) nm = base + "_" + std::to_string(k);
    used.insert(nm);
    name[c] = nm;
  }

  Grammar out;
  out.terminals = g.terminals;
  for (const auto& r : rules) {
    if (!live.count(r.lhs)) continue;
    Production p{name[cls[r.lhs]], r.skel};
    auto sl = detail::slots(r.skel);
    for (std::size_t i = 0; i < sl.size(); ++i) p.rhs[sl[i]] = name[cls[r.kids[i]]];
    out.productions.push_back(std::move(p));
  }
  for (const auto& [c, nm] : name) out.nonterminals.insert(nm);
  for (int q : finals) out.axioms.insert(name[cls[q]]);
  if (empty_rule) {
    auto it = set_id.find(SymbolSet{empty_rule->lhs});
    Symbol a = it != set_id.end() && live.count(it->second) ? name[cls[it->second]] : empty_rule->lhs;
    out.nonterminals.insert(a);
    out.axioms.insert(a);
    out.productions.push_back({a, {}});
  }
  out.canonicalize();
  return out;
}

}  // namespace opal
