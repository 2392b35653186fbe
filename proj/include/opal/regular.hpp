#pragma once
// Finite automata, transition monoids, and pumping oracles for plain and
// parenthesized languages.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "opal/core.hpp"
#include "opal/grammar.hpp"
#include "opal/parser.hpp"

namespace opal {

class StateBudgetExceeded : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

// Nondeterministic automaton over symbols; the empty symbol marks an
// epsilon move.
struct Nfa {
  int size = 0;
  SymbolSet alphabet;
  std::vector<std::tuple<int, Symbol, int>> edges;
  std::set<int> initial;
  std::set<int> finals;

  int add_state() { return size++; }
  void add_edge(int from, const Symbol& s, int to) {
    if (!s.empty()) alphabet.insert(s);
    edges.emplace_back(from, s, to);
  }
  // A macro edge becomes a chain through fresh states.
  void add_word_edge(int from, const Word& w, int to) {
    if (w.empty()) {
      add_edge(from, "", to);
      return;
    }
    int cur = from;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int nxt = i + 1 == w.size() ? to : add_state();
      add_edge(cur, w[i], nxt);
      cur = nxt;
    }
  }

  std::set<int> closure(std::set<int> s) const {
    std::vector<int> todo(s.begin(), s.end());
    while (!todo.empty()) {
      int q = todo.back();
      todo.pop_back();
      for (const auto& [a, x, b] : edges)
        if (a == q && x.empty() && s.insert(b).second) todo.push_back(b);
    }
    return s;
  }
  std::set<int> step(const std::set<int>& s, const Symbol& c) const {
    std::set<int> out;
    for (const auto& [a, x, b] : edges)
      if (x == c && s.count(a)) out.insert(b);
    return closure(out);
  }
  bool accepts(const Word& w) const {
    auto cur = closure(initial);
    for (const auto& c : w) {
      cur = step(cur, c);
      if (cur.empty()) return false;
    }
    return std::any_of(cur.begin(), cur.end(), [&](int q) { return finals.count(q) > 0; });
  }
};

inline nlohmann::json to_json(const Nfa& n) {
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& [a, x, b] : n.edges) tr.push_back({a, x, b});
  return {{"states", n.size}, {"alphabet", n.alphabet}, {"transitions", tr}, {"initial", n.initial}, {"final", n.finals}};
}

inline Nfa nfa_from_json(const nlohmann::json& j) {
  Nfa n;
  n.size = j.at("states").get<int>();
  n.alphabet = j.at("alphabet").get<SymbolSet>();
  for (const auto& t : j.at("transitions")) n.edges.emplace_back(t.at(0).get<int>(), t.at(1).get<Symbol>(), t.at(2).get<int>());
  n.initial = j.at("initial").get<std::set<int>>();
  n.finals = j.at("final").get<std::set<int>>();
  return n;
}

// Complete deterministic automaton.
struct Dfa {
  std::vector<Symbol> alphabet;
  std::vector<std::vector<int>> delta;  // delta[state][letter]
  int initial = 0;
  std::vector<bool> finals;

  int size() const { return static_cast<int>(delta.size()); }
  int letter(const Symbol& s) const {
    auto it = std::find(alphabet.begin(), alphabet.end(), s);
    return it == alphabet.end() ? -1 : static_cast<int>(it - alphabet.begin());
  }
  int run(int q, const Word& w) const {
    for (const auto& c : w) {
      int l = letter(c);
      if (l < 0) return -1;
      q = delta[q][l];
    }
    return q;
  }
  bool accepts(const Word& w) const {
    int q = run(initial, w);
    return q >= 0 && finals[q];
  }
};

inline Dfa determinize(const Nfa& n, const Budget& budget = Budget{}) {
  Dfa d;
  d.alphabet.assign(n.alphabet.begin(), n.alphabet.end());
  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> sets;
  auto intern = [&](const std::set<int>& s) {
    auto [it, fresh] = ids.emplace(s, static_cast<int>(sets.size()));
    if (fresh) {
      if (sets.size() >= budget.dfa_states) throw StateBudgetExceeded("subset construction exceeded the state budget");
      sets.push_back(s);
      d.delta.emplace_back(d.alphabet.size(), -1);
    }
    return it->second;
  };
  d.initial = intern(n.closure(n.initial));
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
      int t = intern(n.step(sets[i], d.alphabet[l]));
      d.delta[i][l] = t;
    }
  for (const auto& s : sets) d.finals.push_back(std::any_of(s.begin(), s.end(), [&](int q) { return n.finals.count(q) > 0; }));
  return d;
}

// Moore partition refinement over reachable states.
inline Dfa minimize(const Dfa& d) {
  std::vector<int> order{d.initial};
  std::vector<int> seen(d.size(), -1);
  seen[d.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int t : d.delta[order[i]])
      if (seen[t] < 0) seen[t] = static_cast<int>(order.size()), order.push_back(t);
  std::vector<int> cls(d.size(), 0);
  for (int q : order) cls[q] = d.finals[q] ? 1 : 0;
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(d.size(), 0);
    for (int q : order) {
      std::vector<int> sig{cls[q]};
      for (int t : d.delta[q]) sig.push_back(cls[t]);
      next[q] = ids.emplace(sig, static_cast<int>(ids.size())).first->second;
    }
    cls = std::move(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  // Renumber classes in breadth-first order from the initial state.
  std::map<int, int> renum;
  for (int q : order) renum.emplace(cls[q], static_cast<int>(renum.size()));
  Dfa m;
  m.alphabet = d.alphabet;
  m.delta.assign(renum.size(), std::vector<int>(d.alphabet.size(), 0));
  m.finals.assign(renum.size(), false);
  m.initial = renum[cls[d.initial]];
  for (int q : order) {
    int c = renum[cls[q]];
    m.finals[c] = d.finals[q];
    for (std::size_t l = 0; l < d.alphabet.size(); ++l) m.delta[c][l] = renum[cls[d.delta[q][l]]];
  }
  return m;
}

inline Dfa determinize_minimize(const Nfa& n, const Budget& budget = Budget{}) { return minimize(determinize(n, budget)); }

// The same language minus the empty word.
inline Dfa drop_empty(const Dfa& d) {
  if (!d.finals[d.initial]) return d;
  Dfa out = d;
  int fresh = out.size();
  out.delta.push_back(d.delta[d.initial]);
  out.finals.push_back(false);
  out.initial = fresh;
  return out;
}

inline std::set<Word> enumerate(const Dfa& d, int maxlen) {
  std::set<Word> out;
  std::function<void(int, Word&)> go = [&](int q, Word& w) {
    if (d.finals[q]) out.insert(w);
    if (static_cast<int>(w.size()) == maxlen) return;
    for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
      w.push_back(d.alphabet[l]);
      go(d.delta[q][l], w);
      w.pop_back();
    }
  };
  Word w;
  go(d.initial, w);
  return out;
}

inline std::set<Word> enumerate(const Nfa& n, int maxlen) { return enumerate(determinize(n), maxlen); }

struct MonoidReport {
  bool aperiodic = true;
  std::size_t size = 0;
  // When periodic: a word whose powers cycle with period > 1.
  std::optional<Word> witness;
  int period = 1;
};

// Transition monoid of d, generated breadth first; aperiodic iff every
// element's power sequence ends in a fixed point.
inline MonoidReport transition_monoid(const Dfa& d, const Budget& budget = Budget{}) {
  using Fn = std::vector<int>;
  const int n = d.size();
  auto compose = [&](const Fn& f, const Fn& g) {  // first f, then g
    Fn h(n);
    for (int q = 0; q < n; ++q) h[q] = g[f[q]];
    return h;
  };
  std::vector<Fn> gens;
  for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
    Fn f(n);
    for (int q = 0; q < n; ++q) f[q] = d.delta[q][l];
    gens.push_back(std::move(f));
  }
  std::map<Fn, Word> elems;
  std::deque<Fn> todo;
  Fn id(n);
  for (int q = 0; q < n; ++q) id[q] = q;
  elems.emplace(id, Word{});
  todo.push_back(id);
  while (!todo.empty()) {
    Fn f = todo.front();
    todo.pop_front();
    const Word& wf = elems[f];
    for (std::size_t l = 0; l < gens.size(); ++l) {
      Fn h = compose(f, gens[l]);
      if (elems.count(h)) continue;
      if (elems.size() >= budget.monoid_cap) throw BudgetExceeded("transition monoid exceeded the size cap");
      Word wh = wf;
      wh.push_back(d.alphabet[l]);
      elems.emplace(h, std::move(wh));
      todo.push_back(std::move(h));
    }
  }
  MonoidReport rep;
  rep.size = elems.size();
  for (const auto& [f, w] : elems) {
    // Powers f, f^2, ... until a repeat; the cycle length is the period.
    std::map<Fn, int> at;
    Fn p = f;
    for (int k = 1;; ++k) {
      auto [it, fresh] = at.emplace(p, k);
      if (!fresh) {
        int period = k - it->second;
        if (period > 1 && (!rep.witness || w.size() < rep.witness->size())) {
          rep.aperiodic = false;
          rep.witness = w;
          rep.period = period;
        }
        break;
      }
      p = compose(p, f);
    }
  }
  return rep;
}

inline bool is_aperiodic_regular(const Dfa& d, const Budget& budget = Budget{}) { return transition_monoid(minimize(d), budget).aperiodic; }
inline bool is_aperiodic_regular(const Nfa& n, const Budget& budget = Budget{}) { return is_aperiodic_regular(determinize(n, budget), budget); }

// A counter in a deterministic automaton: distinct states q0..q(k-1), k >= 2,
// with q_i reading u into q_(i+1 mod k). Searched over words up to maxlen.
inline std::optional<std::pair<Word, std::vector<int>>> find_dfa_counter(const Dfa& d, int maxlen) {
  std::optional<std::pair<Word, std::vector<int>>> found;
  std::function<bool(Word&)> go = [&](Word& u) {
    if (!u.empty())
      for (int q = 0; q < d.size(); ++q) {
        std::vector<int> cyc{q};
        int p = d.run(q, u);
        while (p != q && cyc.size() <= static_cast<std::size_t>(d.size())) {
          if (std::find(cyc.begin(), cyc.end(), p) != cyc.end()) break;
          cyc.push_back(p);
          p = d.run(p, u);
        }
        if (p == q && cyc.size() >= 2) {
          found = {{u, cyc}};
          return true;
        }
      }
    if (static_cast<int>(u.size()) == maxlen) return false;
    for (const auto& s : d.alphabet) {
      u.push_back(s);
      if (go(u)) return true;
      u.pop_back();
    }
    return false;
  };
  Word u;
  go(u);
  return found;
}

// Definitional check x y^n z in L <=> x y^(n+1) z in L over bounded x, y, z.
// Returns a counterexample (x, y, z) if one exists.
inline std::optional<std::tuple<Word, Word, Word>> regular_pump_counterexample(const std::function<bool(const Word&)>& member, const SymbolSet& alphabet, int n, int bound) {
  auto words = all_words(alphabet, bound);
  for (const auto& y : words) {
    if (y.empty()) continue;
    for (const auto& x : words)
      for (const auto& z : words) {
        Word a = x, b;
        for (int i = 0; i < n; ++i) a.insert(a.end(), y.begin(), y.end());
        b = a;
        b.insert(b.end(), y.begin(), y.end());
        a.insert(a.end(), z.begin(), z.end());
        b.insert(b.end(), z.begin(), z.end());
        if (member(a) != member(b)) return {{x, y, z}};
      }
  }
  return std::nullopt;
}

enum class NcStatus { Noncounting, Counting, Unknown };

inline const char* to_string(NcStatus s) {
  switch (s) {
    case NcStatus::Noncounting: return "noncounting";
    case NcStatus::Counting: return "counting";
    case NcStatus::Unknown: return "unknown";
  }
  return "?";
}

struct PumpWitness {
  Word x, u, z, v, y;
  int n = 0;
  bool member_n = false;   // x u^n z v^n y in L
  bool member_n1 = false;  // x u^(n+1) z v^(n+1) y in L

  Word pumped(int m) const {
    Word out = x;
    for (int i = 0; i < m; ++i) out.insert(out.end(), u.begin(), u.end());
    out.insert(out.end(), z.begin(), z.end());
    for (int i = 0; i < m; ++i) out.insert(out.end(), v.begin(), v.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
  }
};

struct NcVerdict {
  NcStatus status = NcStatus::Unknown;
  std::optional<PumpWitness> witness;
  int pump_n = 0;
  int maxlen = 0;
  std::size_t sentences = 0;
  std::string note;
};

inline nlohmann::json to_json(const NcVerdict& v) {
  nlohmann::json j = {{"status", to_string(v.status)},
                      {"bounds", {{"pumpN", v.pump_n}, {"maxlen", v.maxlen}, {"sentences", v.sentences}}}};
  if (!v.note.empty()) j["note"] = v.note;
  if (v.witness) {
    const auto& w = *v.witness;
    j["witness"] = {{"x", w.x}, {"u", w.u}, {"z", w.z}, {"v", w.v}, {"y", w.y}, {"n", w.n}, {"member_n", w.member_n}, {"member_n1", w.member_n1}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline NcVerdict verdict_from_json(const nlohmann::json& j) {
  NcVerdict v;
  auto s = j.at("status").get<std::string>();
  v.status = s == "counting" ? NcStatus::Counting : s == "noncounting" ? NcStatus::Noncounting : NcStatus::Unknown;
  v.pump_n = j.at("bounds").at("pumpN").get<int>();
  v.maxlen = j.at("bounds").at("maxlen").get<int>();
  v.sentences = j.at("bounds").at("sentences").get<std::size_t>();
  if (j.contains("note")) v.note = j.at("note").get<std::string>();
  if (!j.at("witness").is_null()) {
    const auto& w = j.at("witness");
    v.witness = PumpWitness{w.at("x").get<Word>(), w.at("u").get<Word>(), w.at("z").get<Word>(), w.at("v").get<Word>(), w.at("y").get<Word>(),
                            w.at("n").get<int>(), w.at("member_n").get<bool>(), w.at("member_n1").get<bool>()};
  }
  return v;
}

namespace detail {

inline bool balanced(const Word& w) {
  int depth = 0;
  for (const auto& s : w) {
    depth += s == kOpen ? 1 : s == kClose ? -1 : 0;
    if (depth < 0) return false;
  }
  return depth == 0;
}

inline Word slice(const Word& w, std::size_t from, std::size_t to) { return Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(to)); }

// Shortest r-th root: u = p^r.
inline std::optional<Word> root(const Word& u, std::size_t r) {
  if (u.size() % r) return std::nullopt;
  std::size_t k = u.size() / r;
  for (std::size_t i = k; i < u.size(); ++i)
    if (u[i] != u[i - k]) return std::nullopt;
  return slice(u, 0, k);
}

// Try every factorization family (x, p, z, q, y) with u = p^r, v = q^r for
// the given occurrence and report the first membership flip between
// exponents n and n+1.
inline std::optional<PumpWitness> try_family(const Word& x, const Word& u, const Word& z, const Word& v, const Word& y, int n,
                                             const std::function<bool(const Word&)>& member, bool need_balance,
                                             std::set<std::tuple<Word, Word, Word, Word, Word>>& tried) {
  std::size_t top = std::max(u.size(), v.size());
  for (std::size_t r = 1; r <= top; ++r) {
    if ((!u.empty() && u.size() % r) || (!v.empty() && v.size() % r)) continue;
    auto p = u.empty() ? Word{} : root(u, r);
    auto q = v.empty() ? Word{} : root(v, r);
    if (!p || !q) continue;
    if (need_balance) {
      Word pzq = *p;
      pzq.insert(pzq.end(), z.begin(), z.end());
      pzq.insert(pzq.end(), q->begin(), q->end());
      if (!balanced(pzq)) continue;
    }
    if (!tried.insert({x, *p, z, *q, y}).second) continue;
    PumpWitness w{x, *p, z, *q, y, n, false, false};
    w.member_n = member(w.pumped(n));
    w.member_n1 = member(w.pumped(n + 1));
    if (w.member_n != w.member_n1) return w;
  }
  return std::nullopt;
}

}  // namespace detail

// Pumping search on a parenthesized language: for every sample sentence and
// every pair of nested subtrees (outer = u z v, inner = z), pump u and v
// together and compare membership at exponents n and n+1.
inline NcVerdict pump_oracle(const std::set<Word>& sentences, const std::function<bool(const Word&)>& member, int pump_n, int maxlen) {
  NcVerdict out;
  out.pump_n = pump_n;
  out.maxlen = maxlen;
  out.sentences = sentences.size();
  std::set<std::tuple<Word, Word, Word, Word, Word>> tried;
  for (const auto& s : sentences) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // [open, close]
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == kOpen) stack.push_back(i);
      else if (s[i] == kClose) spans.push_back({stack.back(), i}), stack.pop_back();
    }
    for (const auto& [o1, c1] : spans)
      for (const auto& [o2, c2] : spans) {
        if (!(o1 < o2 && c2 < c1)) continue;
        auto x = detail::slice(s, 0, o1), u = detail::slice(s, o1, o2), z = detail::slice(s, o2, c2 + 1);
        auto v = detail::slice(s, c2 + 1, c1 + 1), y = detail::slice(s, c1 + 1, s.size());
        if (auto w = detail::try_family(x, u, z, v, y, pump_n, member, true, tried)) {
          out.status = NcStatus::Counting;
          out.witness = w;
          return out;
        }
      }
  }
  out.status = NcStatus::Noncounting;
  out.note = "no membership flip within bounds";
  return out;
}

// The same search ignoring structure: every factorization x u z v y of
// every sample sentence.
inline NcVerdict naive_pump_oracle(const std::set<Word>& sentences, const std::function<bool(const Word&)>& member, int pump_n, int maxlen) {
  NcVerdict out;
  out.pump_n = pump_n;
  out.maxlen = maxlen;
  out.sentences = sentences.size();
  std::set<std::tuple<Word, Word, Word, Word, Word>> tried;
  for (const auto& s : sentences) {
    const std::size_t L = s.size();
    for (std::size_t i = 0; i <= L; ++i)
      for (std::size_t j = i; j <= L; ++j)
        for (std::size_t k = j; k <= L; ++k)
          for (std::size_t l = k; l <= L; ++l) {
            if (i == j && k == l) continue;
            auto w = detail::try_family(detail::slice(s, 0, i), detail::slice(s, i, j), detail::slice(s, j, k), detail::slice(s, k, l),
                                        detail::slice(s, l, L), pump_n, member, false, tried);
            if (w) {
              out.status = NcStatus::Counting;
              out.witness = w;
              return out;
            }
          }
  }
  out.status = NcStatus::Noncounting;
  out.note = "no membership flip within bounds";
  return out;
}

// Membership in the parenthesized language of any grammar: the markers
// fix the tree, so label it bottom-up.
class ParenthesizedRecognizer {
 public:
  explicit ParenthesizedRecognizer(Grammar g) : g_(std::move(g)) {
    for (const auto& p : g_.productions) by_len_[p.rhs.size()].push_back(&p);
  }

  bool accepts(const Word& w) const {
    struct Child {
      Symbol terminal;
      SymbolSet labels;
      bool node;
    };
    std::vector<std::vector<Child>> stack;
    std::optional<SymbolSet> root;
    for (const auto& s : w) {
      if (root) return false;
      if (s == kOpen) {
        stack.emplace_back();
      } else if (s == kClose) {
        if (stack.empty()) return false;
        auto kids = std::move(stack.back());
        stack.pop_back();
        SymbolSet lab;
        auto it = by_len_.find(kids.size());
        if (it != by_len_.end())
          for (const auto* p : it->second) {
            bool ok = true;
            for (std::size_t k = 0; k < kids.size() && ok; ++k)
              ok = kids[k].node ? kids[k].labels.count(p->rhs[k]) > 0 : p->rhs[k] == kids[k].terminal;
            if (ok) lab.insert(p->lhs);
          }
        if (lab.empty()) return false;
        if (stack.empty()) root = std::move(lab);
        else stack.back().push_back({"", std::move(lab), true});
      } else {
        if (stack.empty() || !g_.is_terminal(s)) return false;
        stack.back().push_back({s, {}, false});
      }
    }
    if (!root) return false;
    return std::any_of(root->begin(), root->end(), [&](const Symbol& a) { return g_.axioms.count(a) > 0; });
  }

 private:
  Grammar g_;
  std::map<std::size_t, std::vector<const Production*>> by_len_;
};

inline NcVerdict pump_oracle_parenthesized(const Grammar& g, int pump_n, int maxlen, const Budget& budget = Budget{}) {
  ParenthesizedRecognizer rec(g);
  std::set<Word> sample;
  try {
    sample = enumerate_parenthesized(g, maxlen, budget);
  } catch (const BudgetExceeded& e) {
    NcVerdict v;
    v.pump_n = pump_n;
    v.maxlen = maxlen;
    v.note = e.what();
    return v;
  }
  return pump_oracle(sample, [&](const Word& p) { return rec.accepts(p); }, pump_n, maxlen);
}

// Re-check a counting witness against a membership predicate.
inline bool witness_holds(const PumpWitness& w, const std::function<bool(const Word&)>& member) {
  return member(w.pumped(w.n)) == w.member_n && member(w.pumped(w.n + 1)) == w.member_n1 && w.member_n != w.member_n1;
}

// A parenthesized language as a bounded sample plus a membership test, so
// that Boolean combinations need no grammar construction.
struct ParenLanguage {
  std::set<Word> sample;
  std::function<bool(const Word&)> member;
};

inline ParenLanguage paren_language(const Grammar& g, int maxlen, const Budget& budget = Budget{}) {
  auto rec = std::make_shared<ParenthesizedRecognizer>(g);
  return {enumerate_parenthesized(g, maxlen, budget), [rec](const Word& p) { return rec->accepts(p); }};
}

// Every nonempty word with a complete parse, structured by that parse.
inline ParenLanguage max_language(const OpMatrix& m, int maxlen) {
  ParenLanguage out;
  for (const auto& w : all_words(m.alphabet(), maxlen, 1)) {
    auto r = parse_max(w, m);
    if (r.ok()) out.sample.insert(r.tree().parenthesization());
  }
  out.member = [m](const Word& p) {
    auto r = parse_max(erase_markers(p), m);
    return r.ok() && r.tree().parenthesization() == p;
  };
  return out;
}

inline ParenLanguage paren_complement(const ParenLanguage& universe, const ParenLanguage& l) {
  ParenLanguage out;
  for (const auto& p : universe.sample)
    if (!l.member(p)) out.sample.insert(p);
  out.member = [u = universe.member, in = l.member](const Word& p) { return u(p) && !in(p); };
  return out;
}

inline ParenLanguage paren_union(const ParenLanguage& x, const ParenLanguage& y) {
  ParenLanguage out{x.sample, nullptr};
  out.sample.insert(y.sample.begin(), y.sample.end());
  out.member = [a = x.member, b = y.member](const Word& p) { return a(p) || b(p); };
  return out;
}

inline ParenLanguage paren_intersection(const ParenLanguage& x, const ParenLanguage& y) {
  ParenLanguage out;
  for (const auto& p : x.sample)
    if (y.member(p)) out.sample.insert(p);
  out.member = [a = x.member, b = y.member](const Word& p) { return a(p) && b(p); };
  return out;
}

inline NcVerdict pump_oracle_parenthesized(const ParenLanguage& l, int pump_n, int maxlen) { return pump_oracle(l.sample, l.member, pump_n, maxlen); }

}  // namespace opal
