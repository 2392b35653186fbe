#pragma once
// First- and monadic second-order formulas over delimited words with the
// chord relation: syntax, text format, evaluation, and the tree-shape
// formulas used to check grammar membership from the control graph.

#include <cctype>
#include <map>
#include <mutex>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "opal/control_graph.hpp"
#include "opal/core.hpp"
#include "opal/grammar.hpp"
#include "opal/opm.hpp"
#include "opal/parser.hpp"
#include "opal/regular.hpp"

namespace opal {

class IncompatibleString : public Error {
 public:
  using Error::Error;
};
class WordTooLongForMSO : public Error {
 public:
  using Error::Error;
};

// A position term: variable plus offset, or a constant when var is empty.
struct Term {
  std::string var;
  int offset = 0;

  static Term at(std::string v, int k = 0) { return {std::move(v), k}; }
  static Term constant(int k) { return {"", k}; }
  bool is_constant() const { return var.empty(); }
  Term plus(int k) const { return {var, offset + k}; }
  std::string text() const {
    if (is_constant()) return std::to_string(offset);
    if (offset == 0) return var;
    return var + (offset > 0 ? "+" : "-") + std::to_string(offset > 0 ? offset : -offset);
  }
  auto operator<=>(const Term&) const = default;
};

enum class FKind { True, False, Pred, In, Less, Chord, Eq, Not, Or, And, Implies, Exists, Forall, ExistsSet, Segment };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind = FKind::True;
  Symbol pred;               // Pred: terminal or '#'; Segment: display name
  Term x, y;                 // atom arguments
  std::string var;           // bound variable, or set variable of In
  std::vector<FormulaPtr> kids;
  std::shared_ptr<const Dfa> segment;  // Segment: language of the open span (x, y)
  std::vector<std::string> free1, free2;

  bool first_order() const { return fo_; }

 private:
  bool fo_ = true;
  friend FormulaPtr finish(Formula f);
};

inline FormulaPtr finish(Formula f) {
  std::set<std::string> f1, f2;
  bool atomic = f.kind != FKind::True && f.kind != FKind::False && (f.kind < FKind::Not || f.kind == FKind::Segment);
  for (const Term* t : {&f.x, &f.y})
    if (atomic && !t->var.empty()) f1.insert(t->var);
  if (f.kind == FKind::In) f2.insert(f.var);
  bool fo = f.kind != FKind::In && f.kind != FKind::ExistsSet;
  for (const auto& k : f.kids) {
    f1.insert(k->free1.begin(), k->free1.end());
    f2.insert(k->free2.begin(), k->free2.end());
    fo = fo && k->first_order();
  }
  if (f.kind == FKind::Exists || f.kind == FKind::Forall) f1.erase(f.var);
  if (f.kind == FKind::ExistsSet) f2.erase(f.var);
  f.free1.assign(f1.begin(), f1.end());
  f.free2.assign(f2.begin(), f2.end());
  f.fo_ = fo;
  return std::make_shared<const Formula>(std::move(f));
}

namespace fo {

inline FormulaPtr truth(bool v) {
  Formula f;
  f.kind = v ? FKind::True : FKind::False;
  return finish(std::move(f));
}
inline FormulaPtr atom(FKind k, Term x, Term y = {}) {
  Formula f;
  f.kind = k;
  f.x = std::move(x);
  f.y = std::move(y);
  return finish(std::move(f));
}
inline FormulaPtr pred(Symbol c, Term x) {
  Formula f;
  f.kind = FKind::Pred;
  f.pred = std::move(c);
  f.x = std::move(x);
  return finish(std::move(f));
}
inline FormulaPtr in(Term x, std::string set) {
  Formula f;
  f.kind = FKind::In;
  f.x = std::move(x);
  f.var = std::move(set);
  return finish(std::move(f));
}
inline FormulaPtr less(Term x, Term y) { return atom(FKind::Less, std::move(x), std::move(y)); }
inline FormulaPtr chord(Term x, Term y) { return atom(FKind::Chord, std::move(x), std::move(y)); }
inline FormulaPtr eq(Term x, Term y) { return atom(FKind::Eq, std::move(x), std::move(y)); }
inline FormulaPtr succ(const Term& x, Term y) { return eq(x.plus(1), std::move(y)); }

inline FormulaPtr node(FKind k, std::vector<FormulaPtr> kids, std::string var = "") {
  Formula f;
  f.kind = k;
  f.kids = std::move(kids);
  f.var = std::move(var);
  return finish(std::move(f));
}
inline FormulaPtr neg(FormulaPtr a) {
  if (a->kind == FKind::True) return truth(false);
  if (a->kind == FKind::False) return truth(true);
  return node(FKind::Not, {std::move(a)});
}
inline FormulaPtr lor(FormulaPtr a, FormulaPtr b) { return node(FKind::Or, {std::move(a), std::move(b)}); }
inline FormulaPtr land(FormulaPtr a, FormulaPtr b) { return node(FKind::And, {std::move(a), std::move(b)}); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return node(FKind::Implies, {std::move(a), std::move(b)}); }
inline FormulaPtr exists(std::string x, FormulaPtr body) { return node(FKind::Exists, {std::move(body)}, std::move(x)); }
inline FormulaPtr forall(std::string x, FormulaPtr body) { return node(FKind::Forall, {std::move(body)}, std::move(x)); }
inline FormulaPtr exists_set(std::string x, FormulaPtr body) { return node(FKind::ExistsSet, {std::move(body)}, std::move(x)); }

// Conjunction and disjunction of a list, with the neutral element when empty.
inline FormulaPtr all(const std::vector<FormulaPtr>& v) {
  if (v.empty()) return truth(true);
  FormulaPtr out = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) out = land(out, v[i]);
  return out;
}
inline FormulaPtr any(const std::vector<FormulaPtr>& v) {
  if (v.empty()) return truth(false);
  FormulaPtr out = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) out = lor(out, v[i]);
  return out;
}

// Membership of the open span (x, y) in a regular language.
inline FormulaPtr segment(std::string name, std::shared_ptr<const Dfa> d, Term x, Term y) {
  Formula f;
  f.kind = FKind::Segment;
  f.pred = std::move(name);
  f.segment = std::move(d);
  f.x = std::move(x);
  f.y = std::move(y);
  return finish(std::move(f));
}

}  // namespace fo

// Parseable text; Segment atoms render as "Name(x,y)" and are not parseable.
inline std::string to_text(const FormulaPtr& f) {
  auto wrap = [](const FormulaPtr& k) {
    std::string s = to_text(k);
    bool atomic = k->kind < FKind::Not || k->kind == FKind::Not || k->kind == FKind::Segment;
    return atomic ? s : "(" + s + ")";
  };
  switch (f->kind) {
    case FKind::True: return "true";
    case FKind::False: return "false";
    case FKind::Pred: return f->pred + "(" + f->x.text() + ")";
    case FKind::In: return f->x.text() + " in " + f->var;
    case FKind::Less: return f->x.text() + " < " + f->y.text();
    case FKind::Chord: return f->x.text() + " -> " + f->y.text();
    case FKind::Eq: return f->x.text() + " = " + f->y.text();
    case FKind::Segment: return f->pred + "(" + f->x.text() + "," + f->y.text() + ")";
    case FKind::Not: return "!" + wrap(f->kids[0]);
    case FKind::Or: return wrap(f->kids[0]) + " | " + wrap(f->kids[1]);
    case FKind::And: return wrap(f->kids[0]) + " & " + wrap(f->kids[1]);
    case FKind::Implies: return wrap(f->kids[0]) + " => " + wrap(f->kids[1]);
    case FKind::Exists: return "Ex " + f->var + " . " + to_text(f->kids[0]);
    case FKind::Forall: return "All " + f->var + " . " + to_text(f->kids[0]);
    case FKind::ExistsSet: return "EX " + f->var + " . " + to_text(f->kids[0]);
  }
  return "";
}

// Recursive-descent parser for the formula text syntax.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view src) : src_(src) { lex(); }

  FormulaPtr parse() {
    auto f = implication();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  enum class Tok { Ident, Int, Op, End };
  struct Token {
    Tok kind;
    std::string text;
    int col;
  };

  void lex() {
    std::size_t i = 0;
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
    while (i < src_.size()) {
      char c = src_[i];
      int col = static_cast<int>(i) + 1;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        toks_.push_back({Tok::Int, std::string(src_.substr(i, j - i)), col});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() && ident_char(src_[j])) ++j;
        toks_.push_back({Tok::Ident, std::string(src_.substr(i, j - i)), col});
        i = j;
      } else {
        static const char* ops[] = {"=>", "->", "<=", "<", "=", "!", "&", "|", "(", ")", ".", "+", "-", "#", ","};
        bool hit = false;
        for (const char* op : ops) {
          std::string_view o(op);
          if (src_.substr(i, o.size()) == o) {
            toks_.push_back({Tok::Op, std::string(o), col});
            i += o.size();
            hit = true;
            break;
          }
        }
        if (!hit) throw SyntaxError(std::string("unexpected character '") + c + "'", 1, col);
      }
    }
    toks_.push_back({Tok::End, "", static_cast<int>(src_.size()) + 1});
  }

  const Token& peek(int k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(const std::string& op) {
    if (peek().kind == Tok::Op && peek().text == op) return ++pos_, true;
    return false;
  }
  void expect(const std::string& op) {
    if (!accept(op)) fail("expected '" + op + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, 1, peek().col); }

  bool quantifier() const { return peek().kind == Tok::Ident && (peek().text == "Ex" || peek().text == "All" || peek().text == "EX"); }

  FormulaPtr implication() {
    auto a = disjunction();
    if (accept("=>")) return fo::implies(a, implication());
    return a;
  }
  FormulaPtr disjunction() {
    auto a = conjunction();
    while (accept("|")) a = fo::lor(a, conjunction());
    return a;
  }
  FormulaPtr conjunction() {
    auto a = unary();
    while (accept("&")) a = fo::land(a, unary());
    return a;
  }
  FormulaPtr unary() {
    if (accept("!")) return fo::neg(unary());
    if (quantifier()) {
      std::string q = next().text;
      if (peek().kind != Tok::Ident) fail("expected a variable");
      std::string v = next().text;
      expect(".");
      auto body = implication();
      if (q == "Ex") return fo::exists(v, body);
      if (q == "All") return fo::forall(v, body);
      return fo::exists_set(v, body);
    }
    if (accept("(")) {
      auto f = implication();
      expect(")");
      return f;
    }
    if (peek().kind == Tok::Ident && (peek().text == "true" || peek().text == "false")) return fo::truth(next().text == "true");
    // Predicate c(t), with c a terminal name or '#'.
    bool hash = peek().kind == Tok::Op && peek().text == "#";
    if ((peek().kind == Tok::Ident || hash) && peek(1).kind == Tok::Op && peek(1).text == "(") {
      std::string c = next().text;
      expect("(");
      Term t = term();
      expect(")");
      return fo::pred(c, t);
    }
    Term a = term();
    if (peek().kind == Tok::Ident && peek().text == "in") {
      next();
      if (peek().kind != Tok::Ident) fail("expected a set variable");
      return fo::in(a, next().text);
    }
    if (accept("<")) return fo::less(a, term());
    if (accept("<=")) return fo::neg(fo::less(term(), a));
    if (accept("->")) return fo::chord(a, term());
    if (accept("=")) return fo::eq(a, term());
    fail("expected a relation");
  }
  Term term() {
    Term t;
    if (peek().kind == Tok::Int) {
      t = Term::constant(std::stoi(next().text));
    } else if (peek().kind == Tok::Ident) {
      t = Term::at(next().text);
    } else {
      fail("expected a position term");
    }
    while (peek().kind == Tok::Op && (peek().text == "+" || peek().text == "-") && peek(1).kind == Tok::Int) {
      int sign = next().text == "+" ? 1 : -1;
      t.offset += sign * std::stoi(next().text);
    }
    return t;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline FormulaPtr parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

// A delimited word with its chord relation.
struct WordModel {
  Word word;
  ChordSet chord_set;

  WordModel(Word w, const OpMatrix& m) : word(std::move(w)) {
    auto r = parse_max(word, m);
    if (!r.ok()) throw IncompatibleString("incompatible string: " + describe(r.reject()));
    chord_set = chords(r.tree());
  }
  int last() const { return static_cast<int>(word.size()) + 1; }
  const Symbol& at(int p) const { return p == 0 || p == last() ? kDelim : word[p - 1]; }
  bool chord(int x, int y) const { return chord_set.count({x, y}) > 0; }
  Word span(int x, int y) const { return Word(word.begin() + x, word.begin() + (y - 1)); }
};

class Evaluator {
 public:
  Evaluator(const WordModel& m, int mso_max_len) : m_(m), mso_max_len_(mso_max_len) {}

  bool eval(const FormulaPtr& f, std::map<std::string, int> env1 = {}, std::map<std::string, std::uint64_t> env2 = {}) {
    if (!f->first_order() && static_cast<int>(m_.word.size()) > mso_max_len_)
      throw WordTooLongForMSO("second-order evaluation limited to length " + std::to_string(mso_max_len_));
    for (const auto& v : f->free1)
      if (!env1.count(v)) throw Error("unassigned variable " + v);
    for (const auto& v : f->free2)
      if (!env2.count(v)) throw Error("unassigned set variable " + v);
    env1_ = std::move(env1);
    env2_ = std::move(env2);
    return go(f.get());
  }

 private:
  std::optional<int> value(const Term& t) const {
    int v = t.offset;
    if (!t.is_constant()) v += env1_.at(t.var);
    if (v < 0 || v > m_.last()) return std::nullopt;
    return v;
  }

  bool go(const Formula* f) {
    switch (f->kind) {
      case FKind::True: return true;
      case FKind::False: return false;
      case FKind::Pred: {
        auto x = value(f->x);
        return x && m_.at(*x) == f->pred;
      }
      case FKind::In: {
        auto x = value(f->x);
        return x && ((env2_.at(f->var) >> *x) & 1u);
      }
      case FKind::Less:
      case FKind::Chord:
      case FKind::Eq:
      case FKind::Segment: {
        auto x = value(f->x), y = value(f->y);
        if (!x || !y) return false;
        if (f->kind == FKind::Less) return *x < *y;
        if (f->kind == FKind::Eq) return *x == *y;
        if (f->kind == FKind::Chord) return m_.chord(*x, *y);
        return *x < *y && f->segment->accepts(m_.span(*x, *y));
      }
      case FKind::Not: return !go(f->kids[0].get());
      case FKind::Or: return go(f->kids[0].get()) || go(f->kids[1].get());
      case FKind::And: return go(f->kids[0].get()) && go(f->kids[1].get());
      case FKind::Implies: return !go(f->kids[0].get()) || go(f->kids[1].get());
      default: break;
    }
    // Quantifiers, memoized on the values of their free variables.
    Key key{f, 0, {}};
    for (const auto& v : f->free1) key.v1 = key.v1 * 64 + static_cast<std::uint64_t>(env1_.at(v));
    for (const auto& v : f->free2) key.v2.push_back(env2_.at(v));
    if (auto it = memo_.find(key); f->free1.size() <= 10 && m_.last() < 64 && it != memo_.end()) return it->second;
    bool out;
    const Formula* body = f->kids[0].get();
    if (f->kind == FKind::ExistsSet) {
      auto saved = env2_.count(f->var) ? std::optional<std::uint64_t>(env2_[f->var]) : std::nullopt;
      out = false;
      const std::uint64_t limit = std::uint64_t{1} << (m_.last() + 1);
      for (std::uint64_t s = 0; s < limit && !out; ++s) {
        env2_[f->var] = s;
        out = go(body);
      }
      if (saved) env2_[f->var] = *saved;
      else env2_.erase(f->var);
    } else {
      bool want = f->kind == FKind::Exists;
      auto saved = env1_.count(f->var) ? std::optional<int>(env1_[f->var]) : std::nullopt;
      out = !want;
      for (int p = 0; p <= m_.last(); ++p) {
        env1_[f->var] = p;
        if (go(body) == want) {
          out = want;
          break;
        }
      }
      if (saved) env1_[f->var] = *saved;
      else env1_.erase(f->var);
    }
    if (f->free1.size() <= 10 && m_.last() < 64) memo_.emplace(std::move(key), out);
    return out;
  }

  // First-order values are packed six bits each; formulas with more than
  // ten free variables are not memoized.
  struct Key {
    const Formula* f;
    std::uint64_t v1;
    std::vector<std::uint64_t> v2;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<const void*>()(k.f) ^ (std::hash<std::uint64_t>()(k.v1) * 0x9e3779b97f4a7c15ULL);
      for (auto x : k.v2) h = h * 31 + std::hash<std::uint64_t>()(x);
      return h;
    }
  };

  const WordModel& m_;
  int mso_max_len_;
  std::map<std::string, int> env1_;
  std::map<std::string, std::uint64_t> env2_;
  std::unordered_map<Key, bool, KeyHash> memo_;
};

inline bool eval_formula(const FormulaPtr& f, const WordModel& m, int mso_max_len = Budget{}.mso_max_len) { return Evaluator(m, mso_max_len).eval(f); }

inline bool eval_formula(const FormulaPtr& f, const Word& w, const OpMatrix& m, int mso_max_len = Budget{}.mso_max_len) {
  if (w.empty()) throw Error("logic-defined languages exclude the empty word");
  return eval_formula(f, WordModel(w, m), mso_max_len);
}

// Positions of the terminals of one right-hand side, framed by the context
// positions x0 and x_{n+1}.
inline bool check_treec(const WordModel& m, const std::vector<int>& xs) {
  const std::size_t k = xs.size();
  if (k < 3) return false;
  if (!m.chord(xs.front(), xs.back())) return false;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (xs[i] + 1 != xs[i + 1] && !m.chord(xs[i], xs[i + 1])) return false;
    for (std::size_t j = i + 2; j + 1 < k; ++j)
      if (m.chord(xs[i], xs[j])) return false;
  }
  return true;
}

// Formula text of TreeC over the given variable names.
inline FormulaPtr treec_formula(const std::vector<std::string>& xs) {
  std::vector<FormulaPtr> parts{fo::chord(Term::at(xs.front()), Term::at(xs.back()))};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    parts.push_back(fo::lor(fo::succ(Term::at(xs[i]), Term::at(xs[i + 1])), fo::chord(Term::at(xs[i]), Term::at(xs[i + 1]))));
    for (std::size_t j = i + 2; j + 1 < xs.size(); ++j) parts.push_back(fo::neg(fo::chord(Term::at(xs[i]), Term::at(xs[j]))));
  }
  return fo::all(parts);
}

// Path-language automata of every nonterminal, one per control-graph pair.
class RegularControl {
 public:
  // Every nonterminal acts as an axiom for the matrix, so that subtree words
  // of non-axioms get delimiter relations too; inner relations are unchanged.
  explicit RegularControl(Grammar g) : g_(std::move(g)), m_(compute_opm(all_axioms(g_))) {
    if (!m_.conflict_free()) throw ConflictError(m_.conflicts());
    ControlGraph cg = build_control_graph(g_);
    for (const auto& a : g_.nonterminals)
      dfa_[a] = std::make_shared<const Dfa>(determinize_minimize(control_language(cg, CgState::down(a), CgState::up(a))));
  }

  const Grammar& grammar() const { return g_; }
  const OpMatrix& matrix() const { return m_; }
  std::shared_ptr<const Dfa> path_language(const Symbol& a) const { return dfa_.at(a); }

  FormulaPtr phi(const Symbol& a, const Term& x, const Term& y) const { return fo::segment("R_" + a, dfa_.at(a), x, y); }

  // For every chord (x, y) whose span is on a path of A, some rule of A
  // matches the top level of the subtree.
  FormulaPtr psi(const Symbol& a) const {
    std::lock_guard lock(cache_mutex_);
    auto& f = psi_[a];
    if (!f) f = build_psi(a);
    return f;
  }

  FormulaPtr build_psi(const Symbol& a) const {
    std::vector<FormulaPtr> rules;
    for (const auto* p : g_.rules_of(a)) {
      if (p->rhs.empty()) continue;
      std::vector<Symbol> term;
      std::vector<std::optional<Symbol>> slot(1);
      for (const auto& s : p->rhs) {
        if (g_.is_nonterminal(s)) {
          slot.back() = s;
        } else {
          term.push_back(s);
          slot.emplace_back();
        }
      }
      std::vector<std::string> xs{"x"};
      for (std::size_t i = 1; i <= term.size(); ++i) xs.push_back("x" + std::to_string(i));
      xs.push_back("y");
      std::vector<FormulaPtr> body{treec_formula(xs)};
      for (std::size_t i = 0; i < term.size(); ++i) body.push_back(fo::pred(term[i], Term::at(xs[i + 1])));
      for (std::size_t j = 0; j < slot.size(); ++j) {
        Term l = Term::at(xs[j]), r = Term::at(xs[j + 1]);
        body.push_back(slot[j] ? phi(*slot[j], l, r) : fo::succ(l, r));
      }
      FormulaPtr f = fo::all(body);
      for (std::size_t i = term.size(); i >= 1; --i) f = fo::exists(xs[i], f);
      rules.push_back(f);
    }
    auto guard = fo::land(phi(a, Term::at("x"), Term::at("y")), fo::chord(Term::at("x"), Term::at("y")));
    return fo::forall("x", fo::forall("y", fo::implies(guard, fo::any(rules))));
  }

  // Sentence predicate: some axiom whose path language covers the word and
  // whose psi holds. Conjoining psi over every nonterminal would reject
  // valid words, since a path language may leave its own subtree.
  FormulaPtr chi() const {
    std::vector<FormulaPtr> ax;
    for (const auto& a : g_.axioms) ax.push_back(fo::land(phi(a, Term::constant(0), Term::at("e")), psi(a)));
    auto end = fo::land(fo::pred(kDelim, Term::at("e")), fo::neg(fo::exists("y", fo::less(Term::at("e"), Term::at("y")))));
    return fo::exists("e", fo::land(end, fo::any(ax)));
  }

  bool check(const Word& w, const Symbol& a) const {
    if (w.empty()) throw Error("logic-defined languages exclude the empty word");
    if (!parse_max(w, m_).ok()) return false;
    WordModel model(w, m_);
    auto f = fo::land(phi(a, Term::constant(0), Term::constant(model.last())), psi(a));
    return eval_formula(f, model);
  }

  bool sentence(const Word& w) const {
    if (w.empty()) throw Error("logic-defined languages exclude the empty word");
    auto r = parse_max(w, m_);
    if (!r.ok()) return false;
    return eval_formula(chi(), WordModel(w, m_));
  }

 private:
  static Grammar all_axioms(Grammar g) {
    g.axioms = g.nonterminals;
    return g;
  }

  Grammar g_;
  OpMatrix m_;
  std::map<Symbol, std::shared_ptr<const Dfa>> dfa_;
  mutable std::map<Symbol, FormulaPtr> psi_;
  mutable std::mutex cache_mutex_;
};

inline bool check_regular_control(const Word& w, const Symbol& a, const Grammar& g) { return RegularControl(g).check(w, a); }

inline FormulaPtr build_chi(const Grammar& g) { return RegularControl(g).chi(); }

}  // namespace opal
