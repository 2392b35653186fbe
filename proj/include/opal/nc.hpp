#pragma once
// Linearization, counter tables, paired counters, the split and pipeline
// control graphs, and the pair grammar whose control languages avoid
// counting.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "opal/control_graph.hpp"
#include "opal/core.hpp"
#include "opal/grammar.hpp"
#include "opal/parser.hpp"
#include "opal/regular.hpp"

namespace opal {

inline const Symbol kPadLeft = "epsL";
inline const Symbol kPadRight = "epsR";

inline Symbol barred(const Symbol& a) { return a + "_bar"; }

// One linear production per nonterminal occurrence: the kept nonterminal,
// the barred left flank and the barred right flank.
struct LinearPiece {
  std::size_t slot;
  Word left;
  Word right;
};

inline std::vector<LinearPiece> linear_pieces(const Grammar& g, const Production& p) {
  std::vector<LinearPiece> out;
  for (std::size_t i = 0; i < p.rhs.size(); ++i) {
    if (!g.is_nonterminal(p.rhs[i])) continue;
    LinearPiece piece{i, {}, {}};
    for (std::size_t k = 0; k < p.rhs.size(); ++k) {
      if (k == i) continue;
      Symbol s = g.is_nonterminal(p.rhs[k]) ? barred(p.rhs[k]) : p.rhs[k];
      (k < i ? piece.left : piece.right).push_back(s);
    }
    if (piece.left.empty()) piece.left.push_back(kPadLeft);
    if (piece.right.empty()) piece.right.push_back(kPadRight);
    out.push_back(std::move(piece));
  }
  return out;
}

inline Grammar linearize(const Grammar& g) {
  Grammar out;
  out.terminals = g.terminals;
  out.nonterminals = g.nonterminals;
  out.axioms = g.axioms;
  out.terminals.insert(kPadLeft);
  out.terminals.insert(kPadRight);
  for (const auto& p : g.productions) {
    auto pieces = linear_pieces(g, p);
    if (pieces.empty()) {
      out.productions.push_back(p);
      continue;
    }
    for (const auto& pc : pieces) {
      Word rhs = pc.left;
      rhs.push_back(p.rhs[pc.slot]);
      rhs.insert(rhs.end(), pc.right.begin(), pc.right.end());
      for (const auto& s : rhs)
        if (!out.is_nonterminal(s)) out.terminals.insert(s);
      out.productions.push_back({p.lhs, rhs});
    }
  }
  out.canonicalize();
  return out;
}

class CycleBudgetExceeded : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

// A k x j grid of states read row by row: cell c = row * j + column steps
// to cell c + 1 (mod k*j) reading the label of its column.
struct CounterTable {
  int index = 0;  // 1-based
  Dir dir = Dir::Down;
  int rows = 0;
  int cols = 0;
  std::vector<CgState> cells;
  std::vector<Word> labels;  // per column

  int size() const { return rows * cols; }
  int wrap(int c) const { return ((c % size()) + size()) % size(); }
  const CgState& state(int c) const { return cells[wrap(c)]; }
  const Word& label(int c) const { return labels[((c % cols) + cols) % cols]; }
  int column(int c) const { return wrap(c) % cols; }
  std::vector<int> cells_of(const Symbol& base) const {
    std::vector<int> out;
    for (int c = 0; c < size(); ++c)
      if (cells[c].base == base) out.push_back(c);
    return out;
  }
  bool contains(const Symbol& base) const { return !cells_of(base).empty(); }
  Word word() const {
    Word u;
    for (const auto& l : labels) u.insert(u.end(), l.begin(), l.end());
    return u;
  }

  // "(dA dB, a)": the reference counter's states and its string.
  std::string name() const {
    std::string s = "(";
    for (int r = 0; r < rows; ++r) s += (r ? " " : "") + cells[r * cols].name();
    std::string u;
    for (const auto& l : labels) u += (u.empty() ? "" : " ") + dot_label(l);
    return s + ", " + u + ")";
  }

  bool operator==(const CounterTable& o) const { return dir == o.dir && rows == o.rows && cols == o.cols && cells == o.cells && labels == o.labels; }
};

namespace detail {

template <class T>
bool is_proper_power(const std::vector<T>& v) {
  const std::size_t n = v.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = v[i] == v[i - p];
    if (periodic) return true;
  }
  return false;
}

// Smallest rotation of the (state name, label) cycle; the table is
// re-anchored there.
inline CounterTable canonical_table(Dir dir, const std::vector<CgState>& st, const std::vector<Word>& lab, int j) {
  const int L = static_cast<int>(st.size());
  using Key = std::vector<std::pair<std::string, Word>>;
  auto key = [&](int r) {
    Key k;
    for (int t = 0; t < L; ++t) k.push_back({st[(r + t) % L].name(), lab[(r + t) % L]});
    return k;
  };
  int best = 0;
  Key bk = key(0);
  for (int r = 1; r < L; ++r) {
    Key k = key(r);
    if (k < bk) bk = std::move(k), best = r;
  }
  CounterTable t;
  t.dir = dir;
  t.cols = j;
  t.rows = L / j;
  for (int c = 0; c < L; ++c) t.cells.push_back(st[(best + c) % L]);
  for (int m = 0; m < j; ++m) t.labels.push_back(lab[(best + m) % L]);
  return t;
}

inline std::string table_key(const CounterTable& t) {
  std::string k = t.dir == Dir::Down ? "0" : "1";
  for (int c = 0; c < t.size(); ++c) k += "|" + t.cells[c].name() + ":" + join(t.label(c), " ");
  return k;
}

}  // namespace detail

// All counter tables of the macro-edge graph: elementary cycles of
// k*j >= 2*j steps inside one direction whose labels repeat with
// primitive period j. Periods run up to max_period, or half the number of
// same-direction states when 0.
inline std::vector<CounterTable> find_counter_tables(const ControlGraph& cg, const Budget& budget = Budget{}, int max_period = 0) {
  auto macro = macro_edges(cg);
  std::vector<CounterTable> found;
  std::set<std::string> seen;
  std::size_t work = 0;
  for (Dir dir : {Dir::Down, Dir::Up}) {
    std::vector<std::vector<const CgEdge*>> adj(cg.size());
    int nstates = 0;
    for (int s = 0; s < cg.size(); ++s) nstates += cg.state(s).dir == dir;
    for (const auto& e : macro)
      if (cg.state(e.from).dir == dir && cg.state(e.to).dir == dir) adj[e.from].push_back(&e);
    int top = max_period > 0 ? max_period : nstates / 2;
    for (int j = 1; j <= top; ++j) {
      for (int s0 = 0; s0 < cg.size(); ++s0) {
        if (cg.state(s0).dir != dir || adj[s0].empty()) continue;
        std::vector<int> path{s0};
        std::vector<Word> labels;
        std::set<int> used;
        std::function<void(int)> go = [&](int q) {
          if (++work > budget.cycle_cap) throw CycleBudgetExceeded("counter-table search exceeded the cycle budget");
          const int t = static_cast<int>(labels.size());
          if (t == j && detail::is_proper_power(labels)) return;
          if (t > 0 && q == s0) {
            if (t % j == 0 && t / j >= 2) {
              std::vector<CgState> st;
              for (int i = 0; i < t; ++i) st.push_back(cg.state(path[i]));
              auto tab = detail::canonical_table(dir, st, labels, j);
              if (seen.insert(detail::table_key(tab)).second) found.push_back(std::move(tab));
            }
            return;
          }
          if (!used.insert(q).second) return;
          for (const CgEdge* e : adj[q]) {
            if (t >= j && e->label != labels[t % j]) continue;
            path.push_back(e->to);
            labels.push_back(e->label);
            go(e->to);
            path.pop_back();
            labels.pop_back();
          }
          used.erase(q);
        };
        go(s0);
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const CounterTable& a, const CounterTable& b) {
    if (a.dir != b.dir) return a.dir < b.dir;
    return detail::table_key(a) < detail::table_key(b);
  });
  for (std::size_t i = 0; i < found.size(); ++i) found[i].index = static_cast<int>(i) + 1;
  return found;
}

// The rotation-invariant shape of a table projected to plain states, with
// repetitions folded back to the shortest period.
inline CounterTable project_table(const CounterTable& t) {
  std::vector<CgState> st;
  std::vector<Word> lab;
  for (int c = 0; c < t.size(); ++c) st.push_back(t.state(c).plain()), lab.push_back(t.label(c));
  const int L = t.size();
  int p = L;
  for (int d = 1; d < L; ++d) {
    if (L % d) continue;
    bool ok = true;
    for (int c = d; c < L && ok; ++c) ok = st[c] == st[c - d] && lab[c] == lab[c - d];
    if (ok) {
      p = d;
      break;
    }
  }
  st.resize(p);
  lab.resize(p);
  // The label period may shrink as well.
  int j = t.cols;
  for (int d = 1; d < j; ++d) {
    if (j % d) continue;
    bool ok = true;
    for (int c = d; c < p && ok; ++c) ok = lab[c] == lab[c - d];
    if (ok) {
      j = d;
      break;
    }
  }
  if (p % j) j = p;
  return detail::canonical_table(t.dir, st, lab, j);
}

inline std::string format_table(const CounterTable& t) {
  std::ostringstream os;
  os << "table " << t.index << " " << (t.dir == Dir::Down ? "descending" : "ascending") << " k=" << t.rows << " j=" << t.cols << " " << t.name() << "\n";
  for (int r = 0; r < t.rows; ++r) {
    os << " ";
    for (int m = 0; m < t.cols; ++m) os << " " << t.state(r * t.cols + m).name() << " -" << dot_label(t.labels[m]) << "->";
    os << " " << t.state((r + 1) * t.cols).name() << "\n";
  }
  return os.str();
}

inline nlohmann::json to_json(const CounterTable& t) {
  nlohmann::json grid = nlohmann::json::array();
  for (int r = 0; r < t.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int m = 0; m < t.cols; ++m) row.push_back(t.state(r * t.cols + m).name());
    grid.push_back(row);
  }
  return {{"index", t.index}, {"direction", t.dir == Dir::Down ? "descending" : "ascending"}, {"k", t.rows}, {"j", t.cols}, {"name", t.name()}, {"grid", grid}, {"labels", t.labels}};
}

struct PairedCounters {
  int desc = 0;  // table indices
  int asc = 0;
  int desc_order = 0;
  int asc_order = 0;
  std::vector<Production> evidence;  // one joint cycle of linear productions
  bool coprime() const { return std::gcd(desc_order, asc_order) == 1; }
};

// A descending and an ascending table are paired when some linear
// production chain walks the first forwards and the second backwards at
// once: A_t -> alpha_t A_(t+1) beta_t for one joint period.
inline std::vector<PairedCounters> find_paired_counters(const Grammar& linear, const std::vector<CounterTable>& tables) {
  std::set<Production> prods(linear.productions.begin(), linear.productions.end());
  std::vector<PairedCounters> out;
  for (const auto& d : tables) {
    if (d.dir != Dir::Down) continue;
    for (const auto& a : tables) {
      if (a.dir != Dir::Up) continue;
      const int L = std::lcm(d.size(), a.size());
      std::optional<std::vector<Production>> ev;
      for (int c0 = 0; c0 < d.size() && !ev; ++c0)
        for (int e0 = 0; e0 < a.size() && !ev; ++e0) {
          if (d.state(c0).base != a.state(e0).base) continue;
          std::vector<Production> chain;
          bool ok = true;
          for (int t = 0; t < L && ok; ++t) {
            const Symbol& from = d.state(c0 + t).base;
            const Symbol& to = d.state(c0 + t + 1).base;
            if (a.state(e0 - t).base != from || a.state(e0 - t - 1).base != to) {
              ok = false;
              break;
            }
            Production p{from, d.label(c0 + t)};
            p.rhs.push_back(to);
            const Word& beta = a.label(e0 - t - 1);
            p.rhs.insert(p.rhs.end(), beta.begin(), beta.end());
            ok = prods.count(p) > 0;
            chain.push_back(std::move(p));
          }
          if (ok) ev = std::move(chain);
        }
      if (ev) out.push_back({d.index, a.index, d.rows, a.rows, std::move(*ev)});
    }
  }
  return out;
}

// Split every state lying on tables i1..im into copies [i1]..[im].
// Edges are replicated over all copy combinations, except loops, which
// stay on their own copy.
inline ControlGraph build_hat(const ControlGraph& cg, const std::vector<CounterTable>& tables) {
  std::map<CgState, std::vector<CgState>> copies;
  for (const auto& s : cg.states()) {
    auto& v = copies[s];
    for (const auto& t : tables)
      if (t.dir == s.dir && t.contains(s.base)) {
        CgState c = s;
        c.table = t.index;
        v.push_back(c);
      }
    if (v.empty()) v.push_back(s);
  }
  ControlGraph out;
  for (const auto& s : cg.states())
    for (const auto& c : copies[s]) out.add_state(c);
  for (const auto& e : cg.edges()) {
    const auto& src = copies[cg.state(e.from)];
    const auto& dst = copies[cg.state(e.to)];
    if (e.from == e.to) {
      for (const auto& c : src) out.add_edge(c, e.label, c, e.provenance);
      continue;
    }
    for (const auto& a : src)
      for (const auto& b : dst) out.add_edge(a, e.label, b, e.provenance);
  }
  return out;
}

// The same tables with states renamed to their copies in the split graph.
inline std::vector<CounterTable> hat_tables(const std::vector<CounterTable>& tables) {
  auto out = tables;
  for (auto& t : out)
    for (auto& c : t.cells) c.table = t.index;
  return out;
}

namespace detail {

inline const CounterTable& table_at(const std::vector<CounterTable>& tables, int index) {
  for (const auto& t : tables)
    if (t.index == index) return t;
  throw Error("no counter table " + std::to_string(index));
}

inline CgState pipeline_state(const CounterTable& t, int c, int r) {
  CgState s = t.state(c).plain();
  s.table = t.index;
  s.cell = t.wrap(c);
  s.pos = r;
  auto same = t.cells_of(s.base);
  if (same.size() > 1) s.occurrence = static_cast<int>(std::find(same.begin(), same.end(), s.cell) - same.begin()) + 1;
  return s;
}

inline CgState sequence_state(const CounterTable& t, int m) {
  CgState s;
  s.dir = t.dir;
  s.table = t.index;
  s.column = ((m % t.cols) + t.cols) % t.cols;
  for (int r = 0; r < t.rows; ++r) s.members.push_back(t.state(r * t.cols + s.column).base);
  return s;
}

}  // namespace detail

// Pipelines and counter-sequence states. Every table cell c gets a chain
// of k*j positions; the last one steps into the counter-sequence state of
// the next column, and those states loop on u. Edges that leave a table
// are replicated from every pipeline position and from the
// counter-sequence states, and tables are entered only at position 0.
inline ControlGraph build_bar(const ControlGraph& hat, const std::vector<CounterTable>& tables) {
  ControlGraph out;
  for (const auto& s : hat.states())
    if (s.table < 0) out.add_state(s);
  for (const auto& t : tables) {
    for (int c = 0; c < t.size(); ++c)
      for (int r = 0; r < t.size(); ++r) out.add_state(detail::pipeline_state(t, c, r));
    for (int m = 0; m < t.cols; ++m) out.add_state(detail::sequence_state(t, m));
  }
  for (const auto& t : tables) {
    const int L = t.size();
    for (int c = 0; c < L; ++c)
      for (int r = 0; r < L; ++r) {
        CgState to = r + 1 < L ? detail::pipeline_state(t, c + 1, r + 1) : detail::sequence_state(t, c + 1);
        out.add_edge(detail::pipeline_state(t, c, r), t.label(c), to, "pipeline");
      }
    for (int m = 0; m < t.cols; ++m) out.add_edge(detail::sequence_state(t, m), t.labels[m], detail::sequence_state(t, m + 1), "counter sequence");
  }
  auto targets = [&](const CgState& s) {
    std::vector<CgState> v;
    if (s.table < 0) {
      v.push_back(s);
      return v;
    }
    const auto& t = detail::table_at(tables, s.table);
    for (int c : t.cells_of(s.base)) v.push_back(detail::pipeline_state(t, c, 0));
    return v;
  };
  for (const auto& e : hat.edges()) {
    const CgState& s = hat.state(e.from);
    const CgState& d = hat.state(e.to);
    auto dst = targets(d);
    if (s.table < 0) {
      for (const auto& b : dst) out.add_edge(s, e.label, b, e.provenance);
      continue;
    }
    const auto& t = detail::table_at(tables, s.table);
    for (int c : t.cells_of(s.base)) {
      bool step = d.table == t.index && d.base == t.state(c + 1).base && e.label == t.label(c);
      if (step) continue;
      std::vector<CgState> src{detail::sequence_state(t, t.column(c))};
      for (int r = 0; r < t.size(); ++r) src.push_back(detail::pipeline_state(t, c, r));
      for (const auto& a : src)
        for (const auto& b : dst) out.add_edge(a, e.label, b, "exit: " + e.provenance);
    }
  }
  return out;
}

// Variants of a nonterminal in the pipeline graph.
inline std::vector<CgState> variants(const ControlGraph& bar, Dir dir, const Symbol& a) {
  std::vector<CgState> v;
  for (const auto& s : bar.states()) {
    if (s.dir != dir) continue;
    if (s.counter_sequence() ? std::find(s.members.begin(), s.members.end(), a) != s.members.end() : s.base == a) v.push_back(s);
  }
  return v;
}

struct GPrime {
  Grammar grammar;
  // Pair nonterminal -> its descending and ascending components.
  std::map<Symbol, std::pair<CgState, CgState>> components;
  // Pair nonterminal -> the nonterminal of the source grammar.
  std::map<Symbol, Symbol> origin;
};

// Pair grammar over (descending, ascending) pipeline-graph states. Every
// child's descending component follows a pipeline edge from the parent's
// descending component; the parent's ascending component is reached from
// the ascending component of at least one child.
inline GPrime build_gprime(const Grammar& g, const ControlGraph& bar, const Budget& budget = Budget{}) {
  std::map<std::pair<int, Word>, std::set<int>> next;
  for (const auto& e : bar.edges()) next[{e.from, e.label}].insert(e.to);
  auto has_edge = [&](const CgState& a, const Word& l, const CgState& b) {
    auto it = next.find({bar.at(a), l});
    return it != next.end() && it->second.count(bar.at(b)) > 0;
  };
  std::map<Symbol, std::vector<CgState>> down, up;
  for (const auto& a : g.nonterminals) down[a] = variants(bar, Dir::Down, a), up[a] = variants(bar, Dir::Up, a);

  struct Triple {
    Symbol a;
    CgState d, u;
    auto operator<=>(const Triple&) const = default;
  };
  std::map<std::string, std::set<Symbol>> owners;
  for (const auto& a : g.nonterminals)
    for (const auto& d : down[a])
      for (const auto& u : up[a]) owners["(" + d.name() + "," + u.name() + ")"].insert(a);
  GPrime out;
  auto name = [&](const Triple& t) {
    std::string n = "(" + t.d.name() + "," + t.u.name() + ")";
    if (owners[n].size() > 1) n += "@" + t.a;
    if (!out.components.count(n)) {
      out.components.emplace(n, std::pair{t.d, t.u});
      out.origin.emplace(n, t.a);
      out.grammar.nonterminals.insert(n);
    }
    return n;
  };

  Grammar& gp = out.grammar;
  gp.terminals = g.terminals;
  std::size_t work = 0;
  for (const auto& p : g.productions) {
    auto pieces = linear_pieces(g, p);
    for (const auto& d : down[p.lhs])
      for (const auto& u : up[p.lhs]) {
        if (pieces.empty()) {
          if (!p.rhs.empty() && has_edge(d, p.rhs, u)) gp.productions.push_back({name({p.lhs, d, u}), p.rhs});
          continue;
        }
        // Options per child: descending successors times ascending variants.
        std::vector<std::vector<Triple>> opts;
        for (const auto& pc : pieces) {
          const Symbol& b = p.rhs[pc.slot];
          std::vector<Triple> o;
          for (const auto& db : down[b])
            if (has_edge(d, pc.left, db))
              for (const auto& ub : up[b]) o.push_back({b, db, ub});
          opts.push_back(std::move(o));
        }
        if (std::any_of(opts.begin(), opts.end(), [](const auto& o) { return o.empty(); })) continue;
        std::vector<std::size_t> pick(opts.size(), 0);
        while (true) {
          if (++work > budget.enum_nodes) throw BudgetExceeded("pair grammar construction exceeded the budget");
          bool threaded = false;
          for (std::size_t h = 0; h < pieces.size() && !threaded; ++h) threaded = has_edge(opts[h][pick[h]].u, pieces[h].right, u);
          if (threaded) {
            Production q{name({p.lhs, d, u}), p.rhs};
            for (std::size_t h = 0; h < pieces.size(); ++h) q.rhs[pieces[h].slot] = name(opts[h][pick[h]]);
            gp.productions.push_back(std::move(q));
          }
          std::size_t i = 0;
          while (i < pick.size() && ++pick[i] == opts[i].size()) pick[i++] = 0;
          if (i == pick.size()) break;
        }
      }
  }
  for (const auto& a : g.axioms)
    for (const auto& d : down[a]) {
      if (d.counter_sequence() || (d.pipeline() && !d.entry())) continue;
      for (const auto& u : up[a]) gp.axioms.insert(name({a, d, u}));
    }
  for (const auto& p : g.productions)
    if (p.rhs.empty() && g.axioms.count(p.lhs)) {
      // The empty rule has no control path; keep it on the plain pair.
      Triple t{p.lhs, CgState::down(p.lhs), CgState::up(p.lhs)};
      Symbol n = "(" + t.d.name() + "," + t.u.name() + ")";
      out.components.emplace(n, std::pair{t.d, t.u});
      out.origin.emplace(n, p.lhs);
      gp.nonterminals.insert(n);
      gp.axioms.insert(n);
      gp.productions.push_back({n, {}});
    }
  gp.canonicalize();
  Grammar cleaned = clean(gp);
  std::erase_if(out.components, [&](const auto& kv) { return !cleaned.nonterminals.count(kv.first); });
  std::erase_if(out.origin, [&](const auto& kv) { return !cleaned.nonterminals.count(kv.first); });
  out.grammar = std::move(cleaned);
  return out;
}

inline ControlGraph gprime_control_graph(const GPrime& gp) {
  return build_control_graph(gp.grammar, [&](const Symbol& n) { return gp.components.at(n); });
}

// Projection of a pair grammar back to the source nonterminals.
inline Grammar project_gprime(const GPrime& gp) {
  Grammar g;
  g.terminals = gp.grammar.terminals;
  for (const auto& [n, a] : gp.origin) g.nonterminals.insert(a);
  for (const auto& a : gp.grammar.axioms) g.axioms.insert(gp.origin.at(a));
  for (const auto& p : gp.grammar.productions) {
    Production q{gp.origin.at(p.lhs), p.rhs};
    for (auto& s : q.rhs)
      if (gp.grammar.is_nonterminal(s)) s = gp.origin.at(s);
    g.productions.push_back(std::move(q));
  }
  g.canonicalize();
  return g;
}

// Everything the transformation builds, in order.
struct NcPipeline {
  Grammar bdr;
  Grammar linear;
  ControlGraph control;
  std::vector<CounterTable> tables;
  std::vector<PairedCounters> paired;
  ControlGraph hat;
  ControlGraph bar;
};

inline NcPipeline run_pipeline(const Grammar& g, const Budget& budget = Budget{}) {
  NcPipeline p;
  p.bdr = normalize_bdr(g);
  p.linear = linearize(p.bdr);
  p.control = build_control_graph(p.linear);
  p.tables = find_counter_tables(p.control, budget);
  p.paired = find_paired_counters(p.linear, p.tables);
  p.hat = build_hat(p.control, p.tables);
  p.bar = build_bar(p.hat, hat_tables(p.tables));
  return p;
}

struct AperiodicityFailure {
  std::string from;
  std::string to;
  Word witness;
};

inline std::optional<AperiodicityFailure> aperiodic_between(const ControlGraph& cg, int from, int to, const Budget& budget) {
  auto rep = transition_monoid(determinize_minimize(control_language(cg, from, to), budget), budget);
  if (rep.aperiodic) return std::nullopt;
  return AperiodicityFailure{cg.state(from).name(), cg.state(to).name(), rep.witness.value_or(Word{})};
}

// Every path language of the pipeline graph from a descending variant of
// A to an ascending variant of A.
inline std::vector<AperiodicityFailure> check_bar_paths(const ControlGraph& bar, const SymbolSet& nonterminals, const Budget& budget = Budget{}) {
  std::vector<AperiodicityFailure> out;
  for (const auto& a : nonterminals)
    for (const auto& d : variants(bar, Dir::Down, a))
      for (const auto& u : variants(bar, Dir::Up, a))
        if (auto f = aperiodic_between(bar, bar.at(d), bar.at(u), budget)) out.push_back(*f);
  return out;
}

// Control language of every pair nonterminal between its two components.
inline std::vector<AperiodicityFailure> check_gprime_control(const GPrime& gp, const Budget& budget = Budget{}) {
  auto cg = gprime_control_graph(gp);
  std::vector<AperiodicityFailure> out;
  for (const auto& [n, c] : gp.components)
    if (auto f = aperiodic_between(cg, cg.at(c.first), cg.at(c.second), budget)) out.push_back(*f);
  return out;
}

// Index-erasing projection of the split graph's tables.
inline std::set<std::string> projected_table_keys(const std::vector<CounterTable>& tables) {
  std::set<std::string> out;
  for (const auto& t : tables) out.insert(detail::table_key(project_table(t)));
  return out;
}

inline std::set<std::string> table_keys(const std::vector<CounterTable>& tables) {
  std::set<std::string> out;
  for (const auto& t : tables) out.insert(detail::table_key(t));
  return out;
}

inline int max_period(const std::vector<CounterTable>& tables) {
  int j = 1;
  for (const auto& t : tables) j = std::max(j, t.cols);
  return j;
}

// Noncounting verdict: structural counters of the linearized control graph
// first, the parenthesized pump search for witnesses and for everything
// the structure leaves open.
inline NcVerdict is_noncounting_opl(const Grammar& g, const Budget& budget = Budget{}) {
  Grammar bdr = normalize_bdr(g);
  if (!compute_opm(bdr).conflict_free()) throw Error("grammar is not an operator precedence grammar");
  Grammar lin = linearize(bdr);
  std::optional<std::vector<CounterTable>> tables;
  std::string structural;
  try {
    tables = find_counter_tables(build_control_graph(lin), budget);
  } catch (const CycleBudgetExceeded& e) {
    structural = e.what();
  }
  auto oracle = [&] { return pump_oracle_parenthesized(bdr, budget.pump_n, budget.maxlen, budget); };
  if (tables && tables->empty()) {
    NcVerdict v;
    v.status = NcStatus::Noncounting;
    v.pump_n = budget.pump_n;
    v.maxlen = budget.maxlen;
    v.note = "exact: the linearized control graph has no counters";
    return v;
  }
  std::optional<PairedCounters> bad;
  if (tables)
    for (const auto& p : find_paired_counters(lin, *tables))
      if (!p.coprime()) {
        bad = p;
        break;
      }
  NcVerdict v = oracle();
  if (bad) {
    std::string why = "paired counters of orders " + std::to_string(bad->desc_order) + " and " + std::to_string(bad->asc_order) + " (tables " +
                      std::to_string(bad->desc) + ", " + std::to_string(bad->asc) + ")";
    if (v.status == NcStatus::Counting) {
      v.note = why;
    } else {
      v.status = NcStatus::Unknown;
      v.note = why + " but no pumping witness within bounds";
    }
    return v;
  }
  if (v.status == NcStatus::Counting) {
    v.note = "pumping witness" + std::string(tables ? "; structural criterion silent" : "; " + structural);
  } else if (v.status == NcStatus::Noncounting) {
    v.note = tables ? "paired counters all have coprime orders; no pumping witness within bounds" : structural + "; no pumping witness within bounds";
  }
  return v;
}

}  // namespace opal
