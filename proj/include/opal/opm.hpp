#pragma once
// Precedence relations, matrices, left/right terminal sets.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "opal/core.hpp"
#include "opal/grammar.hpp"

namespace opal {

enum class Rel : std::uint8_t { Yields = 1, Equal = 2, Takes = 4 };

// A cell holds any subset of the three relations.
class RelSet {
 public:
  constexpr RelSet() = default;
  constexpr RelSet(Rel r) : bits_(static_cast<std::uint8_t>(r)) {}
  bool has(Rel r) const { return bits_ & static_cast<std::uint8_t>(r); }
  void add(Rel r) { bits_ |= static_cast<std::uint8_t>(r); }
  void add(RelSet o) { bits_ |= o.bits_; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  std::optional<Rel> single() const {
    if (size() != 1) return std::nullopt;
    return static_cast<Rel>(bits_);
  }
  std::uint8_t bits() const { return bits_; }
  auto operator<=>(const RelSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

inline char rel_char(Rel r) { return r == Rel::Yields ? '<' : r == Rel::Equal ? '=' : '>'; }

inline Rel rel_from(std::string_view s) {
  if (s == "<") return Rel::Yields;
  if (s == "=") return Rel::Equal;
  if (s == ">") return Rel::Takes;
  throw Error("bad relation token '" + std::string(s) + "'");
}

inline std::string to_string(RelSet r) {
  if (r.empty()) return "-";
  std::string s;
  for (Rel x : {Rel::Yields, Rel::Equal, Rel::Takes})
    if (r.has(x)) s += rel_char(x);
  return s;
}

class OpMatrix {
 public:
  OpMatrix() = default;
  explicit OpMatrix(SymbolSet alphabet) : alphabet_(std::move(alphabet)) {}

  const SymbolSet& alphabet() const { return alphabet_; }
  // Alphabet plus the delimiter, delimiter last.
  std::vector<Symbol> axis() const {
    std::vector<Symbol> v(alphabet_.begin(), alphabet_.end());
    v.push_back(kDelim);
    return v;
  }

  RelSet at(const Symbol& a, const Symbol& b) const {
    auto it = cells_.find({a, b});
    return it == cells_.end() ? RelSet{} : it->second;
  }
  void add(const Symbol& a, const Symbol& b, Rel r) { cells_[{a, b}].add(r); }
  void set(const Symbol& a, const Symbol& b, RelSet r) {
    if (r.empty()) cells_.erase({a, b});
    else cells_[{a, b}] = r;
  }
  const std::map<std::pair<Symbol, Symbol>, RelSet>& cells() const { return cells_; }

  bool conflict_free() const {
    for (const auto& [k, v] : cells_)
      if (v.size() > 1) return false;
    return true;
  }
  std::vector<std::pair<Symbol, Symbol>> conflicts() const {
    std::vector<std::pair<Symbol, Symbol>> out;
    for (const auto& [k, v] : cells_)
      if (v.size() > 1) out.push_back(k);
    return out;
  }
  // Every cell holds exactly one relation; (#,#) may stay empty or be '='.
  bool complete() const {
    for (const auto& a : axis())
      for (const auto& b : axis()) {
        RelSet r = at(a, b);
        if (a == kDelim && b == kDelim) {
          if (!r.empty() && r != RelSet(Rel::Equal)) return false;
        } else if (r.size() != 1) {
          return false;
        }
      }
    return true;
  }

  bool operator==(const OpMatrix&) const = default;

 private:
  SymbolSet alphabet_;
  std::map<std::pair<Symbol, Symbol>, RelSet> cells_;
};

inline nlohmann::json to_json(const OpMatrix& m) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [k, v] : m.cells())
    for (Rel r : {Rel::Yields, Rel::Equal, Rel::Takes})
      if (v.has(r)) cells.push_back({k.first, k.second, std::string(1, rel_char(r))});
  return {{"alphabet", m.alphabet()}, {"cells", cells}};
}

inline OpMatrix matrix_from_json(const nlohmann::json& j) {
  OpMatrix m(j.at("alphabet").get<SymbolSet>());
  for (const auto& c : j.at("cells")) {
    auto a = c.at(0).get<Symbol>(), b = c.at(1).get<Symbol>();
    for (const auto& s : {a, b})
      if (s != kDelim && !m.alphabet().count(s)) throw Error("cell symbol '" + s + "' outside alphabet");
    m.add(a, b, rel_from(c.at(2).get<std::string>()));
  }
  return m;
}

// Table with rows/columns in alphabet order, delimiter last.
inline std::string pretty(const OpMatrix& m) {
  auto ax = m.axis();
  std::size_t w = 1;
  for (const auto& s : ax) w = std::max(w, s.size());
  for (const auto& a : ax)
    for (const auto& b : ax) w = std::max(w, to_string(m.at(a, b)).size());
  auto pad = [w](const std::string& s) { return s + std::string(w + 1 - s.size(), ' '); };
  std::ostringstream os;
  os << pad("");
  for (const auto& b : ax) os << pad(b);
  os << "\n";
  for (const auto& a : ax) {
    os << pad(a);
    for (const auto& b : ax) os << pad(to_string(m.at(a, b)));
    os << "\n";
  }
  return os.str();
}

// Text table as printed by pretty(): a header of column symbols ending in
// '#', then one row per symbol; '-' marks an empty cell, and a cell may
// hold several relations such as "<=". Lines starting with "//" are skipped.
inline OpMatrix load_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Symbol> cols;
  OpMatrix m;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_ws(line);
    if (f.empty() || f[0].rfind("//", 0) == 0) continue;
    if (cols.empty()) {
      cols = f;
      if (std::find(cols.begin(), cols.end(), kDelim) == cols.end()) throw SyntaxError("header must list '#'", lineno, 1);
      SymbolSet sigma;
      for (const auto& c : cols)
        if (c != kDelim) sigma.insert(c);
      m = OpMatrix(sigma);
      continue;
    }
    if (f.size() != cols.size() + 1) throw SyntaxError("row '" + f[0] + "' needs " + std::to_string(cols.size()) + " cells", lineno, 1);
    if (f[0] != kDelim && !m.alphabet().count(f[0])) throw SyntaxError("unknown row symbol '" + f[0] + "'", lineno, 1);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (f[i + 1] == "-") continue;
      for (char c : f[i + 1]) m.add(f[0], cols[i], rel_from(std::string(1, c)));
    }
  }
  if (cols.empty()) throw SyntaxError("empty matrix", lineno, 1);
  return m;
}

struct LRSets {
  std::map<Symbol, SymbolSet> left;
  std::map<Symbol, SymbolSet> right;
};

// Least fixpoint of the left/right terminal set equations.
inline LRSets left_right_sets(const Grammar& g) {
  LRSets s;
  for (const auto& n : g.nonterminals) s.left[n], s.right[n];
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      if (p.rhs.empty()) continue;
      auto grow = [&](SymbolSet& into, const SymbolSet& from) {
        for (const auto& x : from) changed |= into.insert(x).second;
      };
      // Left: first terminal after at most one leading nonterminal.
      const Word& r = p.rhs;
      if (g.is_nonterminal(r.front())) {
        grow(s.left[p.lhs], s.left[r.front()]);
        if (r.size() > 1) changed |= s.left[p.lhs].insert(r[1]).second;
      } else {
        changed |= s.left[p.lhs].insert(r.front()).second;
      }
      if (g.is_nonterminal(r.back())) {
        grow(s.right[p.lhs], s.right[r.back()]);
        if (r.size() > 1) changed |= s.right[p.lhs].insert(r[r.size() - 2]).second;
      } else {
        changed |= s.right[p.lhs].insert(r.back()).second;
      }
    }
  }
  return s;
}

struct OpmResult {
  OpMatrix matrix;
  // Witnessing productions per (cell, relation), for diagnostics.
  std::map<std::tuple<Symbol, Symbol, Rel>, std::set<Production>> witnesses;
  std::vector<std::pair<Symbol, Symbol>> conflicts() const { return matrix.conflicts(); }
};

inline OpmResult compute_opm_detailed(const Grammar& g) {
  LRSets lr = left_right_sets(g);
  OpmResult res{OpMatrix(g.terminals), {}};
  auto put = [&](const Symbol& a, const Symbol& b, Rel r, const Production* p) {
    res.matrix.add(a, b, r);
    if (p) res.witnesses[{a, b, r}].insert(*p);
  };
  for (const auto& p : g.productions) {
    const Word& r = p.rhs;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!g.is_terminal(r[i])) continue;
      if (i + 1 < r.size() && g.is_terminal(r[i + 1])) put(r[i], r[i + 1], Rel::Equal, &p);
      if (i + 2 < r.size() && g.is_nonterminal(r[i + 1]) && g.is_terminal(r[i + 2])) put(r[i], r[i + 2], Rel::Equal, &p);
      if (i + 1 < r.size() && g.is_nonterminal(r[i + 1]))
        for (const auto& b : lr.left[r[i + 1]]) put(r[i], b, Rel::Yields, &p);
      if (i >= 1 && g.is_nonterminal(r[i - 1]))
        for (const auto& a : lr.right[r[i - 1]]) put(a, r[i], Rel::Takes, &p);
    }
  }
  for (const auto& ax : g.axioms) {
    for (const auto& b : lr.left[ax]) put(kDelim, b, Rel::Yields, nullptr);
    for (const auto& a : lr.right[ax]) put(a, kDelim, Rel::Takes, nullptr);
  }
  return res;
}

inline OpMatrix compute_opm(const Grammar& g) { return compute_opm_detailed(g).matrix; }

struct EqAcyclicity {
  bool acyclic = true;
  std::vector<Symbol> cycle;
};

// The equal relation restricted to the alphabet must have no cycle.
inline EqAcyclicity check_eq_acyclic(const OpMatrix& m) {
  std::map<Symbol, int> color;
  std::vector<Symbol> path;
  EqAcyclicity out;
  std::function<bool(const Symbol&)> dfs = [&](const Symbol& a) {
    color[a] = 1;
    path.push_back(a);
    for (const auto& b : m.alphabet()) {
      if (!m.at(a, b).has(Rel::Equal)) continue;
      if (color[b] == 1) {
        auto it = std::find(path.begin(), path.end(), b);
        out.cycle.assign(it, path.end());
        return true;
      }
      if (color[b] == 0 && dfs(b)) return true;
    }
    path.pop_back();
    color[a] = 2;
    return false;
  };
  for (const auto& a : m.alphabet())
    if (color[a] == 0 && dfs(a)) {
      out.acyclic = false;
      break;
    }
  return out;
}

class ConflictError : public Error {
 public:
  explicit ConflictError(std::vector<std::pair<Symbol, Symbol>> cells)
      : Error(describe(cells)), cells_(std::move(cells)) {}
  const std::vector<std::pair<Symbol, Symbol>>& cells() const { return cells_; }

 private:
  static std::string describe(const std::vector<std::pair<Symbol, Symbol>>& c) {
    std::string s = "conflicting cells:";
    for (const auto& [a, b] : c) s += " (" + a + "," + b + ")";
    return s;
  }
  std::vector<std::pair<Symbol, Symbol>> cells_;
};

inline OpMatrix union_matrices(const OpMatrix& m1, const OpMatrix& m2) {
  SymbolSet sigma = m1.alphabet();
  sigma.insert(m2.alphabet().begin(), m2.alphabet().end());
  OpMatrix out(sigma);
  for (const auto& [k, v] : m1.cells()) out.set(k.first, k.second, v);
  for (const auto& [k, v] : m2.cells()) {
    RelSet r = out.at(k.first, k.second);
    r.add(v);
    out.set(k.first, k.second, r);
  }
  if (!out.conflict_free()) throw ConflictError(out.conflicts());
  return out;
}

}  // namespace opal
