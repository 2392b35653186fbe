#pragma once
// Control graphs over descending and ascending states, their macro edges,
// and the regular path languages between states.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "opal/core.hpp"
#include "opal/grammar.hpp"
#include "opal/regular.hpp"

namespace opal {

enum class Dir { Down, Up };

// A control-graph state. Plain states carry only a direction and a
// nonterminal; split graphs add a table index, and pipeline graphs a grid
// cell and position, or a column for counter-sequence states.
struct CgState {
  Dir dir = Dir::Down;
  Symbol base;
  int table = -1;   // 1-based table index, -1 when unsplit
  int cell = -1;    // grid cell of a pipeline state
  int pos = -1;     // pipeline position of a pipeline state
  int column = -1;  // >= 0 for a counter-sequence state
  std::vector<Symbol> members;  // counter-sequence member nonterminals
  int occurrence = 0;           // > 0 when the base recurs in its table grid

  static CgState make(Dir d, Symbol a) {
    CgState s;
    s.dir = d;
    s.base = std::move(a);
    return s;
  }
  static CgState down(Symbol a) { return make(Dir::Down, std::move(a)); }
  static CgState up(Symbol a) { return make(Dir::Up, std::move(a)); }

  bool counter_sequence() const { return column >= 0; }
  bool pipeline() const { return cell >= 0; }
  bool entry() const { return pipeline() && pos == 0; }

  std::string name() const {
    std::string s = dir == Dir::Down ? "d" : "u";
    if (counter_sequence()) {
      for (const auto& m : members) s += m;
      return s + "[" + std::to_string(table) + "]";
    }
    s += base;
    if (pipeline()) {
      s += "[" + std::to_string(table) + "," + std::to_string(pos) + "]";
      if (occurrence > 0) s += "~" + std::to_string(occurrence);
    } else if (table > 0) {
      s += "[" + std::to_string(table) + "]";
    }
    return s;
  }

  // Drop every index, keeping the nonterminal.
  CgState plain() const { return make(dir, base); }

  auto operator<=>(const CgState&) const = default;
};

struct CgEdge {
  int from;
  Word label;
  int to;
  std::string provenance;
};

class ControlGraph {
 public:
  int add_state(const CgState& s) {
    auto [it, fresh] = index_.emplace(s, static_cast<int>(states_.size()));
    if (fresh) states_.push_back(s);
    return it->second;
  }
  std::optional<int> find(const CgState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int at(const CgState& s) const {
    auto i = find(s);
    if (!i) throw Error("no state " + s.name());
    return *i;
  }
  // Parallel duplicates of (from, label, to) are kept once, with the
  // provenance of the first.
  void add_edge(int from, const Word& label, int to, std::string provenance) {
    if (keys_.insert({from, label, to}).second) edges_.push_back({from, label, to, std::move(provenance)});
  }
  void add_edge(const CgState& a, const Word& label, const CgState& b, std::string provenance) {
    add_edge(add_state(a), label, add_state(b), std::move(provenance));
  }

  const std::vector<CgState>& states() const { return states_; }
  const std::vector<CgEdge>& edges() const { return edges_; }
  const CgState& state(int i) const { return states_[i]; }
  int size() const { return static_cast<int>(states_.size()); }

  std::vector<const CgEdge*> out(int s) const {
    std::vector<const CgEdge*> v;
    for (const auto& e : edges_)
      if (e.from == s) v.push_back(&e);
    return v;
  }

 private:
  std::vector<CgState> states_;
  std::map<CgState, int> index_;
  std::vector<CgEdge> edges_;
  std::set<std::tuple<int, Word, int>> keys_;
};

// Maximal terminal factors of right-hand sides.
inline std::set<Word> extract_w(const Grammar& g) {
  std::set<Word> out;
  for (const auto& p : g.productions) {
    Word cur;
    for (const auto& s : p.rhs) {
      if (g.is_nonterminal(s)) {
        if (!cur.empty()) out.insert(cur);
        cur.clear();
      } else {
        cur.push_back(s);
      }
    }
    if (!cur.empty()) out.insert(cur);
  }
  return out;
}

// Descending and ascending state of each nonterminal; transformed grammars
// map their pair nonterminals onto the two components.
using StateMap = std::function<std::pair<CgState, CgState>(const Symbol&)>;

inline std::pair<CgState, CgState> identity_states(const Symbol& a) { return {CgState::down(a), CgState::up(a)}; }

inline std::string production_text(const Production& p) { return p.lhs + " -> " + (p.rhs.empty() ? std::string("eps") : join(p.rhs, " ")); }

inline ControlGraph build_control_graph(const Grammar& g, const StateMap& states = identity_states) {
  ControlGraph cg;
  for (const auto& a : g.nonterminals) {
    auto [d, u] = states(a);
    cg.add_state(d);
    cg.add_state(u);
  }
  for (const auto& p : g.productions) {
    const Word& r = p.rhs;
    if (r.empty()) continue;
    auto [dA, uA] = states(p.lhs);
    std::string prov = production_text(p);
    std::vector<std::size_t> nts;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (g.is_nonterminal(r[i])) nts.push_back(i);
    if (nts.empty()) {
      cg.add_edge(dA, r, uA, "terminal: " + prov);
      continue;
    }
    auto segment = [&](std::size_t from, std::size_t to) { return Word(r.begin() + static_cast<long>(from), r.begin() + static_cast<long>(to)); };
    // Descending into the first nonterminal, with the prefix before it.
    cg.add_edge(dA, segment(0, nts.front()), states(r[nts.front()]).first, "descend: " + prov);
    // Between consecutive nonterminals.
    for (std::size_t k = 0; k + 1 < nts.size(); ++k)
      cg.add_edge(states(r[nts[k]]).second, segment(nts[k] + 1, nts[k + 1]), states(r[nts[k + 1]]).first, "sibling: " + prov);
    // Ascending from the last nonterminal, with the suffix after it.
    cg.add_edge(states(r[nts.back()]).second, segment(nts.back() + 1, r.size()), uA, "ascend: " + prov);
  }
  return cg;
}

// Edges with a nonempty label, each preceded by any number of epsilon
// edges; counters are defined on this graph.
inline std::vector<CgEdge> macro_edges(const ControlGraph& cg) {
  std::vector<std::set<int>> eps(cg.size());
  for (int s = 0; s < cg.size(); ++s) {
    eps[s].insert(s);
    std::vector<int> todo{s};
    while (!todo.empty()) {
      int q = todo.back();
      todo.pop_back();
      for (const auto& e : cg.edges())
        if (e.from == q && e.label.empty() && eps[s].insert(e.to).second) todo.push_back(e.to);
    }
  }
  std::vector<CgEdge> out;
  std::set<std::tuple<int, Word, int>> seen;
  for (int s = 0; s < cg.size(); ++s)
    for (int m : eps[s])
      for (const auto& e : cg.edges())
        if (e.from == m && !e.label.empty() && seen.insert({s, e.label, e.to}).second) out.push_back({s, e.label, e.to, e.provenance});
  return out;
}

// Labels of walks from `from` to `to` that read at least one symbol.
inline Nfa control_language(const ControlGraph& cg, int from, int to) {
  Nfa n;
  const int k = cg.size();
  n.size = 2 * k;  // state q with flag f at index 2q+f
  for (const auto& e : cg.edges()) {
    if (e.label.empty()) {
      n.add_edge(2 * e.from, "", 2 * e.to);
      n.add_edge(2 * e.from + 1, "", 2 * e.to + 1);
    } else {
      n.add_word_edge(2 * e.from, e.label, 2 * e.to + 1);
      n.add_word_edge(2 * e.from + 1, e.label, 2 * e.to + 1);
    }
  }
  n.initial = {2 * from};
  n.finals = {2 * to + 1};
  return n;
}

inline Nfa control_language(const ControlGraph& cg, const CgState& from, const CgState& to) { return control_language(cg, cg.at(from), cg.at(to)); }

// Barred symbols render as "A_bar"; padding markers as "epsL"/"epsR".
inline std::string dot_label(const Word& w) {
  if (w.empty()) return "eps";
  return join(w, " ");
}

inline std::string to_dot(const ControlGraph& cg, const std::string& name = "control") {
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n";
  for (int i = 0; i < cg.size(); ++i) {
    const auto& s = cg.state(i);
    os << "  s" << i << " [label=\"" << s.name() << "\", shape=" << (s.dir == Dir::Down ? "box" : "ellipse");
    if (s.counter_sequence()) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : cg.edges()) os << "  s" << e.from << " -> s" << e.to << " [label=\"" << dot_label(e.label) << "\"];\n";
  os << "}\n";
  return os.str();
}

inline nlohmann::json to_json(const ControlGraph& cg) {
  nlohmann::json st = nlohmann::json::array(), ed = nlohmann::json::array();
  for (const auto& s : cg.states()) st.push_back(s.name());
  for (const auto& e : cg.edges()) ed.push_back({{"from", cg.state(e.from).name()}, {"label", e.label}, {"to", cg.state(e.to).name()}, {"provenance", e.provenance}});
  return {{"states", st}, {"edges", ed}};
}

}  // namespace opal
