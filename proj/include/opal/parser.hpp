#pragma once
// Structure-assigning operator-precedence parsing, chords, grammar
// membership and bounded language enumeration.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "opal/core.hpp"
#include "opal/grammar.hpp"
#include "opal/opm.hpp"

namespace opal {

struct Chord {
  int left;
  int right;
  auto operator<=>(const Chord&) const = default;
};
using ChordSet = std::set<Chord>;

struct ParseNode {
  // Children: a terminal leaf (its delimited position, >= 1) or a node id
  // stored as -(id + 1).
  std::vector<int> children;
  Chord span;
  static bool is_node(int c) { return c < 0; }
  static int node_id(int c) { return -c - 1; }
};

struct ParseTree {
  Word leaves;
  std::vector<ParseNode> nodes;  // reduction order, root last

  int root() const { return static_cast<int>(nodes.size()) - 1; }

  // Parenthesization with the open/close markers.
  Word parenthesization() const {
    Word out;
    if (!nodes.empty()) render(root(), out);
    return out;
  }

  std::string dot() const {
    std::ostringstream os;
    os << "digraph parse {\n  node [shape=plaintext];\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      os << "  n" << i << " [label=\"N\"];\n";
      for (int c : nodes[i].children) {
        if (ParseNode::is_node(c)) {
          os << "  n" << i << " -> n" << ParseNode::node_id(c) << ";\n";
        } else {
          os << "  l" << c << " [label=\"" << leaves[c - 1] << "\", shape=box];\n";
          os << "  n" << i << " -> l" << c << ";\n";
        }
      }
    }
    os << "}\n";
    return os.str();
  }

 private:
  void render(int id, Word& out) const {
    out.push_back(kOpen);
    for (int c : nodes[id].children) {
      if (ParseNode::is_node(c)) render(ParseNode::node_id(c), out);
      else out.push_back(leaves[c - 1]);
    }
    out.push_back(kClose);
  }
};

inline ChordSet chords(const ParseTree& t) {
  ChordSet s;
  for (const auto& n : t.nodes) s.insert(n.span);
  return s;
}

struct NoRelation {
  Symbol left, right;
  int pos;  // delimited position of the left symbol
};
struct Stuck {
  std::string configuration;
};
using Reject = std::variant<NoRelation, Stuck>;

inline std::string describe(const Reject& r) {
  if (auto* n = std::get_if<NoRelation>(&r))
    return "no relation (" + n->left + "," + n->right + ") at " + std::to_string(n->pos);
  return "stuck at " + std::get<Stuck>(r).configuration;
}

struct ParseResult {
  std::variant<ParseTree, Reject> value;
  bool ok() const { return std::holds_alternative<ParseTree>(value); }
  const ParseTree& tree() const { return std::get<ParseTree>(value); }
  const Reject& reject() const { return std::get<Reject>(value); }
};

class MatrixConflict : public Error {
 public:
  MatrixConflict(const Symbol& a, const Symbol& b) : Error("conflicting cell (" + a + "," + b + ")") {}
};

// Shift-reduce operator-precedence parse of w (without delimiters).
inline ParseResult parse_max(const Word& w, const OpMatrix& m) {
  struct Item {
    bool terminal;
    int pos;                 // delimited position for terminals
    int node;                // node id for nonterminals
    Rel pred = Rel::Yields;  // relation with the previous terminal
  };
  ParseTree tree{w, {}};
  std::vector<Item> st{{true, 0, -1, Rel::Yields}};
  auto sym = [&](int pos) -> const Symbol& { return pos == 0 || pos == static_cast<int>(w.size()) + 1 ? kDelim : w[pos - 1]; };
  auto config = [&](int look) {
    std::string s;
    for (const auto& it : st) s += it.terminal ? sym(it.pos) : std::string("N");
    s += " | ";
    for (int p = look; p <= static_cast<int>(w.size()) + 1; ++p) s += sym(p);
    return s;
  };
  int look = 1;
  const int end = static_cast<int>(w.size()) + 1;
  while (true) {
    int top = static_cast<int>(st.size()) - 1;
    while (!st[top].terminal) --top;
    const Symbol& a = sym(st[top].pos);
    const Symbol& b = sym(look);
    if (a == kDelim && b == kDelim && st[top].pos == 0) {
      if (st.size() == 2 && !st[1].terminal) return {tree};
      return {Reject{Stuck{config(look)}}};
    }
    RelSet rs = m.at(a, b);
    if (rs.empty()) return {Reject{NoRelation{a, b, st[top].pos}}};
    auto r = rs.single();
    if (!r) throw MatrixConflict(a, b);
    if (*r != Rel::Takes) {
      if (look == end) return {Reject{Stuck{config(look)}}};
      st.push_back({true, look, -1, *r});
      ++look;
      continue;
    }
    if (st[top].pos == 0) return {Reject{Stuck{config(look)}}};
    // Pop the handle: back to the terminal that yields to its successor.
    std::vector<Item> handle;
    while (true) {
      Item it = st.back();
      st.pop_back();
      handle.push_back(it);
      if (it.terminal && it.pred == Rel::Yields) break;
    }
    if (!st.empty() && !st.back().terminal) handle.push_back(st.back()), st.pop_back();
    int left_pos = st.back().pos;
    ParseNode node;
    node.span = {left_pos, look};
    for (auto it = handle.rbegin(); it != handle.rend(); ++it)
      node.children.push_back(it->terminal ? it->pos : -(it->node + 1));
    tree.nodes.push_back(std::move(node));
    st.push_back({false, -1, static_cast<int>(tree.nodes.size()) - 1});
  }
}

// Literal rewriting of every handle at once; kept as a slow reference
// implementation for differential tests.
inline ParseResult parse_by_rewriting(const Word& w, const OpMatrix& m) {
  struct Item {
    bool terminal;
    int pos;
    int node;
  };
  ParseTree tree{w, {}};
  const int end = static_cast<int>(w.size()) + 1;
  auto sym = [&](int pos) -> const Symbol& { return pos == 0 || pos == end ? kDelim : w[pos - 1]; };
  std::vector<Item> form{{true, 0, -1}};
  for (int p = 1; p <= end; ++p) form.push_back({true, p, -1});
  while (true) {
    if (form.size() == 3 && !form[1].terminal) return {tree};
    std::vector<int> ts;
    for (std::size_t i = 0; i < form.size(); ++i)
      if (form[i].terminal) ts.push_back(static_cast<int>(i));
    std::vector<Rel> rel;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const Symbol& a = sym(form[ts[k]].pos);
      const Symbol& b = sym(form[ts[k + 1]].pos);
      RelSet rs = m.at(a, b);
      if (rs.empty()) return {Reject{NoRelation{a, b, form[ts[k]].pos}}};
      if (!rs.single()) throw MatrixConflict(a, b);
      rel.push_back(*rs.single());
    }
    // Handle: terminals k+1..j with rel[k] yields, rel[k+1..j-1] equal, rel[j] takes.
    std::vector<std::pair<int, int>> handles;
    for (std::size_t k = 0; k < rel.size(); ++k) {
      if (rel[k] != Rel::Yields) continue;
      std::size_t j = k + 1;
      while (j < rel.size() && rel[j] == Rel::Equal) ++j;
      if (j < rel.size() && rel[j] == Rel::Takes) handles.push_back({ts[k], ts[j + 1]});
    }
    if (handles.empty()) {
      std::string c;
      for (const auto& it : form) c += it.terminal ? sym(it.pos) : std::string("N");
      return {Reject{Stuck{c}}};
    }
    std::vector<Item> next;
    std::size_t i = 0;
    for (auto [lo, hi] : handles) {
      while (static_cast<int>(i) <= lo) next.push_back(form[i++]);
      ParseNode node;
      node.span = {form[lo].pos, form[hi].pos};
      for (int q = lo + 1; q < hi; ++q) node.children.push_back(form[q].terminal ? form[q].pos : -(form[q].node + 1));
      tree.nodes.push_back(std::move(node));
      next.push_back({false, -1, static_cast<int>(tree.nodes.size()) - 1});
      i = static_cast<std::size_t>(hi);
    }
    while (i < form.size()) next.push_back(form[i++]);
    form = std::move(next);
  }
}

struct Membership {
  bool member = false;
  std::string reason;
  std::optional<ParseTree> tree;
  std::vector<Symbol> labels;  // per node, when member
};

// Label a parse tree bottom-up with the set of nonterminals deriving each
// subtree; a lhs-set labeling is deterministic even when g is not
// backward deterministic.
inline std::vector<SymbolSet> label_sets(const ParseTree& t, const Grammar& g) {
  std::vector<SymbolSet> lab(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& ch = t.nodes[i].children;
    for (const auto& p : g.productions) {
      if (p.rhs.size() != ch.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < ch.size() && ok; ++k) {
        if (ParseNode::is_node(ch[k])) ok = g.is_nonterminal(p.rhs[k]) && lab[ParseNode::node_id(ch[k])].count(p.rhs[k]);
        else ok = p.rhs[k] == t.leaves[ch[k] - 1];
      }
      if (ok) lab[i].insert(p.lhs);
    }
  }
  return lab;
}

// Membership in the language of the nonterminals in `starts`, with the
// matrix computed once.
class Recognizer {
 public:
  Recognizer(Grammar g, SymbolSet starts) : g_(std::move(g)), starts_(std::move(starts)) {
    Grammar h = g_;
    h.axioms = starts_;
    m_ = compute_opm(h);
    if (!m_.conflict_free()) throw Error("grammar is not an operator precedence grammar");
  }
  explicit Recognizer(const Grammar& g) : Recognizer(g, g.axioms) {}

  const OpMatrix& matrix() const { return m_; }

  Membership run(const Word& w) const {
    Membership res;
    if (w.empty()) {
      for (const auto& p : g_.productions)
        if (p.rhs.empty() && starts_.count(p.lhs)) res.member = true;
      if (!res.member) res.reason = "empty word";
      return res;
    }
    for (const auto& s : w)
      if (!g_.is_terminal(s)) {
        res.reason = "symbol '" + s + "' outside the alphabet";
        return res;
      }
    auto pr = parse_max(w, m_);
    if (!pr.ok()) {
      res.reason = describe(pr.reject());
      return res;
    }
    const ParseTree& t = pr.tree();
    auto lab = label_sets(t, g_);
    std::optional<Symbol> top;
    for (const auto& a : lab.back())
      if (starts_.count(a)) {
        top = a;
        break;
      }
    if (!top) {
      res.reason = "no derivation";
      return res;
    }
    res.member = true;
    res.labels.assign(t.nodes.size(), "");
    res.labels.back() = *top;
    for (int i = t.root(); i >= 0; --i) {
      const auto& ch = t.nodes[i].children;
      for (const auto& p : g_.productions) {
        if (p.lhs != res.labels[i] || p.rhs.size() != ch.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < ch.size() && ok; ++k) {
          if (ParseNode::is_node(ch[k])) ok = g_.is_nonterminal(p.rhs[k]) && lab[ParseNode::node_id(ch[k])].count(p.rhs[k]);
          else ok = p.rhs[k] == t.leaves[ch[k] - 1];
        }
        if (!ok) continue;
        for (std::size_t k = 0; k < ch.size(); ++k)
          if (ParseNode::is_node(ch[k])) res.labels[ParseNode::node_id(ch[k])] = p.rhs[k];
        break;
      }
    }
    res.tree = t;
    return res;
  }

  bool accepts(const Word& w) const { return run(w).member; }

  // A parenthesized word is accepted when its plain projection is and the
  // parse assigns exactly its parentheses.
  bool accepts_parenthesized(const Word& p) const {
    Word w = erase_markers(p);
    if (w.empty()) return false;
    auto r = run(w);
    return r.member && r.tree->parenthesization() == p;
  }

 private:
  Grammar g_;
  SymbolSet starts_;
  OpMatrix m_;
};

inline Membership member_from(const Word& w, const Grammar& g, const SymbolSet& starts) { return Recognizer(g, starts).run(w); }

inline Membership member_grammar(const Word& w, const Grammar& g) { return member_from(w, g, g.axioms); }

using Language = std::set<Word>;

// Words of length <= maxlen derived from each nonterminal. Markers weigh
// nothing, so a parenthesized grammar is bounded by its terminal length.
inline std::map<Symbol, Language> enumerate_nonterminals(const Grammar& g, int maxlen, const Budget& budget = Budget{}) {
  auto weight = [&](const Symbol& s) { return is_marker(s) ? 0 : 1; };
  std::map<Symbol, std::vector<Language>> by_len;
  for (const auto& n : g.nonterminals) by_len[n].resize(static_cast<std::size_t>(std::max(maxlen, 0)) + 1);
  std::size_t count = 0;
  for (int len = 1; len <= maxlen; ++len) {
    for (const auto& p : g.productions) {
      int fixed = 0;
      std::vector<std::size_t> slot;
      for (std::size_t i = 0; i < p.rhs.size(); ++i) {
        if (g.is_nonterminal(p.rhs[i])) slot.push_back(i);
        else fixed += weight(p.rhs[i]);
      }
      if (p.rhs.empty() || fixed > len || (fixed == 0 && !slot.empty())) continue;
      int rest = len - fixed;
      if (slot.empty()) {
        if (rest == 0) by_len[p.lhs][len].insert(p.rhs);
        continue;
      }
      if (rest < static_cast<int>(slot.size())) continue;
      // Walk the rhs, splitting `rest` among the slots (each at least 1).
      std::function<void(std::size_t, std::size_t, int, Word&)> build = [&](std::size_t pos, std::size_t slots_left, int remaining, Word& cur) {
        if (pos == p.rhs.size()) {
          if (remaining != 0) return;
          if (++count > budget.enum_nodes) throw BudgetExceeded("language enumeration budget exceeded");
          by_len[p.lhs][len].insert(cur);
          return;
        }
        const Symbol& s = p.rhs[pos];
        if (!g.is_nonterminal(s)) {
          cur.push_back(s);
          build(pos + 1, slots_left, remaining, cur);
          cur.pop_back();
          return;
        }
        int lo = slots_left == 1 ? remaining : 1;
        int hi = remaining - static_cast<int>(slots_left) + 1;
        for (int l = lo; l <= hi; ++l)
          for (const auto& sub : by_len[s][l]) {
            cur.insert(cur.end(), sub.begin(), sub.end());
            build(pos + 1, slots_left - 1, remaining - l, cur);
            cur.resize(cur.size() - sub.size());
          }
      };
      Word acc;
      build(0, slot.size(), rest, acc);
    }
  }
  std::map<Symbol, Language> out;
  for (auto& [n, v] : by_len) {
    auto& lang = out[n];
    for (auto& l : v) lang.insert(l.begin(), l.end());
  }
  for (const auto& p : g.productions)
    if (p.rhs.empty()) out[p.lhs].insert(Word{});
  return out;
}

inline Language enumerate_language(const Grammar& g, int maxlen, const Budget& budget = Budget{}) {
  auto all = enumerate_nonterminals(g, maxlen, budget);
  Language out;
  for (const auto& a : g.axioms) out.insert(all[a].begin(), all[a].end());
  return out;
}

inline Language enumerate_parenthesized(const Grammar& g, int maxlen, const Budget& budget = Budget{}) {
  return enumerate_language(parenthesize_grammar(g), maxlen, budget);
}

}  // namespace opal
