#pragma once
// Operator-precedence expressions: syntax, membership, derived operators,
// flat normal form and translation to first-order formulas.

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opal/core.hpp"
#include "opal/logic.hpp"
#include "opal/opm.hpp"
#include "opal/parser.hpp"

namespace opal {

class OpeError : public Error {
 public:
  using Error::Error;
};
class NotStarFree : public Error {
 public:
  using Error::Error;
};

enum class OKind { Atom, Epsilon, Any, Union, Inter, Diff, Neg, Concat, Star, Plus, Fence, Delta, Nabla, Hole };

struct Ope;
using OpePtr = std::shared_ptr<const Ope>;

struct Ope {
  OKind kind;
  Symbol a, b;  // Atom symbol in a; borders of Fence/Delta/Nabla/Hole
  std::vector<OpePtr> kids;
};

namespace ope {

inline OpePtr make(OKind k, std::vector<OpePtr> kids = {}, Symbol a = "", Symbol b = "") { return std::make_shared<const Ope>(Ope{k, std::move(a), std::move(b), std::move(kids)}); }
inline OpePtr atom(Symbol a) { return make(OKind::Atom, {}, std::move(a)); }
inline OpePtr eps() { return make(OKind::Epsilon); }
inline OpePtr any() { return make(OKind::Any); }
inline OpePtr uni(OpePtr x, OpePtr y) { return make(OKind::Union, {std::move(x), std::move(y)}); }
inline OpePtr inter(OpePtr x, OpePtr y) { return make(OKind::Inter, {std::move(x), std::move(y)}); }
inline OpePtr diff(OpePtr x, OpePtr y) { return make(OKind::Diff, {std::move(x), std::move(y)}); }
inline OpePtr neg(OpePtr x) { return make(OKind::Neg, {std::move(x)}); }
inline OpePtr star(OpePtr x) { return make(OKind::Star, {std::move(x)}); }
inline OpePtr plus(OpePtr x) { return make(OKind::Plus, {std::move(x)}); }
inline OpePtr fence(Symbol a, OpePtr body, Symbol b) { return make(OKind::Fence, {std::move(body)}, std::move(a), std::move(b)); }
inline OpePtr delta(Symbol a, Symbol b) { return make(OKind::Delta, {}, std::move(a), std::move(b)); }
inline OpePtr nabla(Symbol a, Symbol b) { return make(OKind::Nabla, {}, std::move(a), std::move(b)); }
inline OpePtr hole(Symbol a, Symbol b) { return make(OKind::Hole, {}, std::move(a), std::move(b)); }
inline OpePtr all() { return star(any()); }
inline OpePtr some() { return plus(any()); }
inline OpePtr nothing() { return neg(all()); }

inline OpePtr cat(OpePtr x, OpePtr y) {
  if (x->kind == OKind::Epsilon) return y;
  if (y->kind == OKind::Epsilon) return x;
  return make(OKind::Concat, {std::move(x), std::move(y)});
}
// Concatenation of a list; a '#' border stands for the empty word.
inline OpePtr cat(const std::vector<OpePtr>& parts) {
  OpePtr out = eps();
  for (const auto& p : parts)
    if (!(p->kind == OKind::Atom && p->a == kDelim)) out = cat(out, p);
  return out;
}
inline OpePtr unions(const std::vector<OpePtr>& v) {
  if (v.empty()) return nothing();
  OpePtr out = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) out = uni(out, v[i]);
  return out;
}
inline OpePtr inters(const std::vector<OpePtr>& v) {
  if (v.empty()) return all();
  OpePtr out = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) out = inter(out, v[i]);
  return out;
}

// Words a.x.b with x nonempty, borders '#' contributing nothing.
inline OpePtr envelope(const Symbol& a, const Symbol& b) { return cat({atom(a), some(), atom(b)}); }

// One-level rewriting of a derived operator into core constructors.
inline OpePtr expand(const Ope& e) {
  switch (e.kind) {
    case OKind::Delta: return fence(e.a, some(), e.b);
    case OKind::Nabla: return inter(neg(delta(e.a, e.b)), envelope(e.a, e.b));
    case OKind::Hole: {
      // Adjacency is excluded for the delimiter variants as well.
      if (e.a == kDelim) return neg(cat(uni(atom(e.b), delta(e.a, e.b)), all()));
      if (e.b == kDelim) return neg(cat(all(), uni(atom(e.a), delta(e.a, e.b))));
      return neg(cat({all(), uni(cat(atom(e.a), atom(e.b)), delta(e.a, e.b)), all()}));
    }
    default: throw Error("not a derived operator");
  }
}

}  // namespace ope

inline bool is_derived(OKind k) { return k == OKind::Delta || k == OKind::Nabla || k == OKind::Hole; }

// Full expansion of derived operators.
inline OpePtr expand_all(const OpePtr& e) {
  if (is_derived(e->kind)) return expand_all(ope::expand(*e));
  if (e->kids.empty()) return e;
  std::vector<OpePtr> kids;
  for (const auto& k : e->kids) kids.push_back(expand_all(k));
  return ope::make(e->kind, std::move(kids), e->a, e->b);
}

// Star and plus are allowed only over Any: the universal languages are
// star-free as complements of the empty language.
inline bool star_free(const OpePtr& e) {
  if ((e->kind == OKind::Star || e->kind == OKind::Plus) && e->kids[0]->kind != OKind::Any) return false;
  for (const auto& k : e->kids)
    if (!star_free(k)) return false;
  return true;
}

// Whether the empty word belongs to the language; fences never match it.
inline bool nullable(const OpePtr& e) {
  const auto& k = e->kids;
  switch (e->kind) {
    case OKind::Epsilon:
    case OKind::Star: return true;
    case OKind::Union: return nullable(k[0]) || nullable(k[1]);
    case OKind::Inter: return nullable(k[0]) && nullable(k[1]);
    case OKind::Diff: return nullable(k[0]) && !nullable(k[1]);
    case OKind::Neg: return !nullable(k[0]);
    case OKind::Concat: return nullable(k[0]) && nullable(k[1]);
    case OKind::Plus: return nullable(k[0]);
    case OKind::Hole: return true;
    default: return false;
  }
}

inline bool has_fence(const OpePtr& e) {
  if (e->kind == OKind::Fence || is_derived(e->kind)) return true;
  for (const auto& k : e->kids)
    if (has_fence(k)) return true;
  return false;
}

namespace detail {

inline bool has_border(const OpePtr& e, bool left) {
  bool self = (e->kind == OKind::Fence || is_derived(e->kind)) && (left ? e->a : e->b) == kDelim;
  if (self) return true;
  for (const auto& k : e->kids)
    if (has_border(k, left)) return true;
  return false;
}

inline int precedence(OKind k) {
  switch (k) {
    case OKind::Union: return 1;
    case OKind::Inter:
    case OKind::Diff: return 2;
    case OKind::Neg: return 3;
    case OKind::Concat: return 4;
    case OKind::Star:
    case OKind::Plus: return 5;
    default: return 6;
  }
}

}  // namespace detail

// Invariants: no '#' inside a fence body, borders not both '#', no
// right '#' border in a left factor and no left '#' border in a right one.
inline void validate(const OpePtr& e) {
  using detail::has_border;
  switch (e->kind) {
    case OKind::Fence:
    case OKind::Delta:
    case OKind::Nabla:
    case OKind::Hole:
      if (e->a == kDelim && e->b == kDelim) throw OpeError("fence undefined with '#' on both sides");
      if (e->kind == OKind::Fence && (has_border(e->kids[0], true) || has_border(e->kids[0], false))) throw OpeError("'#' inside a fence body");
      break;
    case OKind::Concat:
      if (has_border(e->kids[0], false)) throw OpeError("right '#' border in the left factor of a concatenation");
      if (has_border(e->kids[1], true)) throw OpeError("left '#' border in the right factor of a concatenation");
      break;
    case OKind::Star:
    case OKind::Plus:
      if (has_border(e->kids[0], true) || has_border(e->kids[0], false)) throw OpeError("'#' border under iteration");
      break;
    default: break;
  }
  for (const auto& k : e->kids) validate(k);
}

inline std::string to_text(const OpePtr& e, int need = 0) {
  using detail::precedence;
  std::string s;
  auto sub = [](const OpePtr& k, int p) { return to_text(k, p); };
  switch (e->kind) {
    case OKind::Atom: s = e->a; break;
    case OKind::Epsilon: s = "eps"; break;
    case OKind::Any: s = "."; break;
    case OKind::Union: s = sub(e->kids[0], 1) + " | " + sub(e->kids[1], 2); break;
    case OKind::Inter: s = sub(e->kids[0], 2) + " & " + sub(e->kids[1], 3); break;
    case OKind::Diff: s = sub(e->kids[0], 2) + " - " + sub(e->kids[1], 3); break;
    case OKind::Neg: s = "~" + sub(e->kids[0], 3); break;
    case OKind::Concat: s = sub(e->kids[0], 4) + " " + sub(e->kids[1], 5); break;
    case OKind::Star: s = sub(e->kids[0], 5) + "*"; break;
    case OKind::Plus: s = sub(e->kids[0], 5) + "+"; break;
    case OKind::Fence: s = e->a + "[" + sub(e->kids[0], 0) + "]" + e->b; break;
    case OKind::Delta: s = "delta(" + e->a + "," + e->b + ")"; break;
    case OKind::Nabla: s = "nabla(" + e->a + "," + e->b + ")"; break;
    case OKind::Hole: s = "hole(" + e->a + "," + e->b + ")"; break;
  }
  return precedence(e->kind) < need ? "(" + s + ")" : s;
}

inline bool same(const OpePtr& x, const OpePtr& y) {
  if (x->kind != y->kind || x->a != y->a || x->b != y->b || x->kids.size() != y->kids.size()) return false;
  for (std::size_t i = 0; i < x->kids.size(); ++i)
    if (!same(x->kids[i], y->kids[i])) return false;
  return true;
}

class OpeParser {
 public:
  OpeParser(std::string_view src, const SymbolSet& alphabet) : src_(src), alphabet_(alphabet) {}

  OpePtr parse() {
    auto e = alternation();
    skip();
    if (i_ < src_.size()) fail("unexpected '" + std::string(1, src_[i_]) + "'");
    validate(e);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, 1, static_cast<int>(i_) + 1); }
  void skip() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }
  bool at(char c) {
    skip();
    return i_ < src_.size() && src_[i_] == c;
  }
  bool accept(char c) {
    if (!at(c)) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::size_t symbol_length() {
    skip();
    std::size_t best = 0;
    for (const auto& s : alphabet_)
      if (s.size() > best && src_.substr(i_, s.size()) == s) best = s.size();
    return best;
  }
  // A keyword wins over a shorter alphabet symbol.
  bool keyword(std::string_view k, bool call) {
    skip();
    if (src_.substr(i_, k.size()) != k || symbol_length() > k.size()) return false;
    std::size_t j = i_ + k.size();
    if (call) {
      while (j < src_.size() && std::isspace(static_cast<unsigned char>(src_[j]))) ++j;
      if (j >= src_.size() || src_[j] != '(') return false;
    }
    i_ += k.size();
    return true;
  }
  Symbol border() {
    if (accept('#')) return kDelim;
    std::size_t n = symbol_length();
    if (!n) fail("expected a terminal or '#'");
    Symbol s(src_.substr(i_, n));
    i_ += n;
    return s;
  }

  OpePtr alternation() {
    auto e = intersection();
    while (accept('|')) e = ope::uni(e, intersection());
    return e;
  }
  OpePtr intersection() {
    auto e = negation();
    while (true) {
      if (accept('&')) e = ope::inter(e, negation());
      else if (accept('-')) e = ope::diff(e, negation());
      else return e;
    }
  }
  OpePtr negation() {
    if (accept('~')) return ope::neg(negation());
    return concatenation();
  }
  bool starts_primary() {
    skip();
    if (i_ >= src_.size()) return false;
    char c = src_[i_];
    if (c == '(' || c == '.' || c == '#' || symbol_length() > 0) return true;
    std::string_view rest = src_.substr(i_);
    for (std::string_view k : {"eps", "delta", "nabla", "hole"})
      if (rest.starts_with(k)) return true;
    return false;
  }
  OpePtr concatenation() {
    auto e = postfix();
    while (starts_primary()) e = ope::make(OKind::Concat, {e, postfix()});
    return e;
  }
  OpePtr postfix() {
    auto e = primary();
    while (true) {
      if (accept('*')) e = ope::star(e);
      else if (accept('+')) e = ope::plus(e);
      else return e;
    }
  }
  OpePtr primary() {
    skip();
    if (accept('(')) {
      auto e = alternation();
      expect(')');
      return e;
    }
    if (accept('.')) return ope::any();
    for (auto [name, kind] : {std::pair{"delta", OKind::Delta}, {"nabla", OKind::Nabla}, {"hole", OKind::Hole}}) {
      if (!keyword(name, true)) continue;
      expect('(');
      Symbol a = border();
      expect(',');
      Symbol b = border();
      expect(')');
      return ope::make(kind, {}, a, b);
    }
    if (keyword("eps", false)) return ope::eps();
    std::size_t start = i_;
    if (!at('#') && !symbol_length()) fail("expected an expression");
    Symbol s = border();
    if (accept('[')) {
      auto body = alternation();
      expect(']');
      Symbol b = border();
      return ope::fence(s, body, b);
    }
    if (s == kDelim) {
      i_ = start;
      fail("'#' is allowed only as a fence border");
    }
    return ope::atom(s);
  }

  std::string_view src_;
  const SymbolSet& alphabet_;
  std::size_t i_ = 0;
};

inline OpePtr parse_ope(std::string_view text, const SymbolSet& alphabet) { return OpeParser(text, alphabet).parse(); }

// How the structural condition of a fence is decided: on the standalone
// delimited factor, or by chord lookup in the parse of the whole word.
enum class FenceRoute { Standalone, Global };

class OpeContext {
 public:
  explicit OpeContext(OpMatrix m, FenceRoute route = FenceRoute::Standalone) : m_(std::move(m)), route_(route) {
    if (!m_.conflict_free()) throw ConflictError(m_.conflicts());
    if (!m_.complete()) throw Error("expressions need a complete precedence matrix");
  }
  const OpMatrix& matrix() const { return m_; }
  const SymbolSet& alphabet() const { return m_.alphabet(); }
  FenceRoute route() const { return route_; }

 private:
  OpMatrix m_;
  FenceRoute route_;
};

// An expression compiled for repeated membership queries: nodes and the
// expansions of derived operators are numbered once, and each word gets a
// dense memo indexed by (node, start, end).
class OpeMatcher {
 public:
  OpeMatcher(const OpePtr& e, const OpeContext& ctx) : ctx_(&ctx) { root_ = add(e); }

  bool operator()(const Word& w) const {
    Run r{*this, w};
    return r.go(root_, 0, r.n);
  }

 private:
  struct Node {
    OKind kind;
    Symbol a, b;
    std::vector<int> kids;
  };

  int add(const OpePtr& e) {
    if (auto it = ids_.find(e.get()); it != ids_.end()) return it->second;
    keep_.push_back(e);
    Node n{e->kind, e->a, e->b, {}};
    if (is_derived(e->kind)) n.kids.push_back(add(ope::expand(*e)));
    for (const auto& k : e->kids) n.kids.push_back(add(k));
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size()) - 1;
    ids_.emplace(e.get(), id);
    return id;
  }

  struct Run {
    const OpeMatcher& m;
    const Word& w;
    int n = static_cast<int>(w.size());
    int width = n + 1;
    std::vector<std::int8_t> memo = std::vector<std::int8_t>(m.nodes_.size() * static_cast<std::size_t>(width * width), -1);
    std::vector<std::int8_t> rest = std::vector<std::int8_t>(m.nodes_.size() * static_cast<std::size_t>(width * width), -1);
    std::map<std::pair<int, int>, std::optional<ChordSet>> parses = {};

    std::size_t slot(int id, int i, int j) const { return (static_cast<std::size_t>(id) * width + i) * width + j; }

    // Chords of the factor [i, j) parsed on its own.
    const ChordSet* chords_of(int i, int j) {
      auto it = parses.find({i, j});
      if (it == parses.end()) {
        auto r = parse_max(Word(w.begin() + i, w.begin() + j), m.ctx_->matrix());
        it = parses.emplace(std::pair{i, j}, r.ok() ? std::optional<ChordSet>(chords(r.tree())) : std::nullopt).first;
      }
      return it->second ? &*it->second : nullptr;
    }

    bool structural(const Symbol& a, const Symbol& b, int i, int j) {
      bool lhash = a == kDelim, rhash = b == kDelim;
      int inner = (j - i) - !lhash - !rhash;
      if (inner == 0) return lhash || rhash || m.ctx_->matrix().at(a, b) == RelSet(Rel::Equal);
      if (m.ctx_->route() == FenceRoute::Global) {
        if ((lhash && i != 0) || (rhash && j != n)) return false;
        const ChordSet* c = chords_of(0, n);
        return c && c->count({lhash ? 0 : i + 1, rhash ? n + 1 : j});
      }
      const ChordSet* c = chords_of(i, j);
      int len = j - i;
      return c && c->count({lhash ? 0 : 1, rhash ? len + 1 : len});
    }

    bool go(int id, int i, int j) {
      const Node& e = m.nodes_[id];
      switch (e.kind) {
        case OKind::Atom: return j - i == 1 && w[i] == e.a;
        case OKind::Epsilon: return i == j;
        case OKind::Any: return j - i == 1;
        default: break;
      }
      auto& cell = memo[slot(id, i, j)];
      if (cell >= 0) return cell;
      bool out = false;
      const auto& k = e.kids;
      switch (e.kind) {
        case OKind::Union: out = go(k[0], i, j) || go(k[1], i, j); break;
        case OKind::Inter: out = go(k[0], i, j) && go(k[1], i, j); break;
        case OKind::Diff: out = go(k[0], i, j) && !go(k[1], i, j); break;
        case OKind::Neg: out = !go(k[0], i, j); break;
        case OKind::Concat:
          for (int x = i; x <= j && !out; ++x) out = go(k[0], i, x) && go(k[1], x, j);
          break;
        case OKind::Star:
        case OKind::Plus: out = (e.kind == OKind::Star && i == j) || iterate(id, i, j); break;
        case OKind::Fence: {
          bool lhash = e.a == kDelim, rhash = e.b == kDelim;
          int lo = i + !lhash, hi = j - !rhash;
          if (lo > hi || (!lhash && w[i] != e.a) || (!rhash && w[j - 1] != e.b)) break;
          out = go(k[0], lo, hi) && structural(e.a, e.b, i, j);
          break;
        }
        default: out = go(k[0], i, j); break;  // derived: its expansion
      }
      memo[slot(id, i, j)] = out;
      return out;
    }

    // [i, j) split into one or more nonempty factors of the iterated body.
    bool iterate(int id, int i, int j) {
      auto& cell = rest[slot(id, i, j)];
      if (cell >= 0) return cell;
      bool out = false;
      for (int x = i + 1; x <= j && !out; ++x) out = go(m.nodes_[id].kids[0], i, x) && (x == j || iterate(id, x, j));
      rest[slot(id, i, j)] = out;
      return out;
    }
  };

  const OpeContext* ctx_;
  std::vector<Node> nodes_;
  std::map<const Ope*, int> ids_;
  std::vector<OpePtr> keep_;
  int root_ = 0;
};

inline bool ope_member(const Word& w, const OpePtr& e, const OpeContext& ctx) { return OpeMatcher(e, ctx)(w); }

inline std::set<Word> ope_enumerate(const OpePtr& e, const OpeContext& ctx, int maxlen) {
  std::set<Word> out;
  OpeMatcher match(e, ctx);
  for (const auto& w : all_words(ctx.alphabet(), maxlen))
    if (match(w)) out.insert(w);
  return out;
}

// Flat normal form: a union of intersections of terms L.aDb.R, L.aNb.R
// (D chord, N non-chord) or regular H.
struct FnfTerm {
  enum Kind { Regular, Chord, NonChord } kind = Regular;
  OpePtr left, right, regular;
  Symbol a, b;

  OpePtr to_ope() const {
    if (kind == Regular) return regular;
    return ope::cat({left, kind == Chord ? ope::delta(a, b) : ope::nabla(a, b), right});
  }
  // Same words, either structure.
  OpePtr envelope() const { return ope::cat({left, ope::envelope(a, b), right}); }
};
using FnfConj = std::vector<FnfTerm>;
using Fnf = std::vector<FnfConj>;

namespace detail {

inline FnfTerm regular_term(OpePtr h) { return {FnfTerm::Regular, nullptr, nullptr, std::move(h), "", ""}; }
inline FnfTerm fence_term(FnfTerm::Kind k, OpePtr l, Symbol a, Symbol b, OpePtr r) { return {k, std::move(l), std::move(r), nullptr, std::move(a), std::move(b)}; }

inline Fnf product(const Fnf& x, const Fnf& y) {
  Fnf out;
  for (const auto& c : x)
    for (const auto& d : y) {
      FnfConj e = c;
      e.insert(e.end(), d.begin(), d.end());
      out.push_back(std::move(e));
    }
  return out;
}

// Complement of a single term: the structural swap plus the words outside
// its envelope.
inline Fnf negate_term(const FnfTerm& t) {
  if (t.kind == FnfTerm::Regular) return {{regular_term(ope::neg(t.regular))}};
  auto swapped = t;
  swapped.kind = t.kind == FnfTerm::Chord ? FnfTerm::NonChord : FnfTerm::Chord;
  return {{swapped}, {regular_term(ope::neg(t.envelope()))}};
}

inline Fnf negate(const Fnf& f) {
  Fnf out{{}};
  for (const auto& c : f) {
    Fnf alt;
    for (const auto& t : c) {
      auto n = negate_term(t);
      alt.insert(alt.end(), n.begin(), n.end());
    }
    out = product(out, alt);
  }
  return out;
}

// Regular terms of a conjunction merged into one.
inline FnfConj merge_regular(const FnfConj& c) {
  FnfConj out;
  std::vector<OpePtr> regs;
  for (const auto& t : c) {
    if (t.kind == FnfTerm::Regular) regs.push_back(t.regular);
    else out.push_back(t);
  }
  if (!regs.empty() || out.empty()) out.insert(out.begin(), regular_term(ope::inters(regs)));
  return out;
}

inline FnfConj concat_terms(const FnfTerm& x, const FnfTerm& y) {
  using ope::cat;
  if (x.kind == FnfTerm::Regular && y.kind == FnfTerm::Regular) return {regular_term(cat(x.regular, y.regular))};
  if (x.kind == FnfTerm::Regular) return {fence_term(y.kind, cat(x.regular, y.left), y.a, y.b, y.right)};
  if (y.kind == FnfTerm::Regular) return {fence_term(x.kind, x.left, x.a, x.b, cat(x.right, y.regular))};
  // Two structured pairs: each keeps its structure, the other its envelope.
  return {fence_term(x.kind, x.left, x.a, x.b, cat({x.right, y.envelope()})), fence_term(y.kind, cat({x.envelope(), y.left}), y.a, y.b, y.right)};
}

inline Fnf concat_conj(const FnfConj& c0, const FnfConj& d0) {
  FnfConj c = merge_regular(c0), d = merge_regular(d0);
  FnfConj out;
  if (c.size() == 1 && d.size() == 1) return {concat_terms(c[0], d[0])};
  // Distribute the concatenation over the conjunction terms.
  for (const auto& t : c)
    for (const auto& s : d) {
      auto r = concat_terms(t, s);
      out.insert(out.end(), r.begin(), r.end());
    }
  return {out};
}

inline Fnf flatten(const OpePtr& e, const OpMatrix& m) {
  if (!has_fence(e)) return {{regular_term(e)}};
  const auto& k = e->kids;
  switch (e->kind) {
    case OKind::Union: {
      Fnf x = flatten(k[0], m), y = flatten(k[1], m);
      x.insert(x.end(), y.begin(), y.end());
      return x;
    }
    case OKind::Inter: return product(flatten(k[0], m), flatten(k[1], m));
    case OKind::Diff: return product(flatten(k[0], m), negate(flatten(k[1], m)));
    case OKind::Neg: return negate(flatten(k[0], m));
    case OKind::Concat: {
      Fnf x = flatten(k[0], m), y = flatten(k[1], m), out;
      for (const auto& c : x)
        for (const auto& d : y) {
          auto r = concat_conj(c, d);
          out.insert(out.end(), r.begin(), r.end());
        }
      return out;
    }
    case OKind::Fence: {
      Fnf out = product({{fence_term(FnfTerm::Chord, ope::eps(), e->a, e->b, ope::eps())}}, flatten(ope::cat({ope::atom(e->a), k[0], ope::atom(e->b)}), m));
      // The empty interior is not covered by the chord term.
      bool adjacent = e->a == kDelim || e->b == kDelim || m.at(e->a, e->b) == RelSet(Rel::Equal);
      if (nullable(k[0]) && adjacent) out.push_back({regular_term(ope::cat({ope::atom(e->a), ope::atom(e->b)}))});
      return out;
    }
    case OKind::Delta: return {{fence_term(FnfTerm::Chord, ope::eps(), e->a, e->b, ope::eps())}};
    case OKind::Nabla: return {{fence_term(FnfTerm::NonChord, ope::eps(), e->a, e->b, ope::eps())}};
    case OKind::Hole: return flatten(ope::expand(*e), m);
    default: throw Error("unexpected expression in flattening");
  }
}

// Already a union of intersections of terms.
inline bool flat_term(const OpePtr& e) {
  if (!has_fence(e)) return true;
  if (e->kind == OKind::Delta || e->kind == OKind::Nabla) return true;
  if (e->kind != OKind::Concat) return false;
  int structured = 0;
  std::function<bool(const OpePtr&)> walk = [&](const OpePtr& x) {
    if (x->kind == OKind::Concat) return walk(x->kids[0]) && walk(x->kids[1]);
    if (x->kind == OKind::Delta || x->kind == OKind::Nabla) return ++structured, true;
    return !has_fence(x);
  };
  return walk(e) && structured == 1;
}
inline bool flat_conj(const OpePtr& e) {
  if (e->kind == OKind::Inter) return flat_conj(e->kids[0]) && flat_conj(e->kids[1]);
  return flat_term(e);
}
inline bool flat(const OpePtr& e) {
  if (e->kind == OKind::Union) return flat(e->kids[0]) && flat(e->kids[1]);
  return flat_conj(e);
}

}  // namespace detail

inline Fnf flat_terms(const OpePtr& e, const OpeContext& ctx) {
  if (!star_free(e)) throw NotStarFree("expression is not star-free: " + to_text(e));
  return detail::flatten(e, ctx.matrix());
}

inline OpePtr to_ope(const Fnf& f) {
  std::vector<OpePtr> alts;
  for (const auto& c : f) {
    std::vector<OpePtr> parts;
    for (const auto& t : c) parts.push_back(t.to_ope());
    alts.push_back(ope::inters(parts));
  }
  return ope::unions(alts);
}

// Union of intersections of flat terms.
inline bool is_flat(const OpePtr& e) { return detail::flat(e); }

inline OpePtr flat_normal_form(const OpePtr& e, const OpeContext& ctx) {
  if (!star_free(e)) throw NotStarFree("expression is not star-free: " + to_text(e));
  if (detail::flat(e)) return e;
  return to_ope(detail::flatten(e, ctx.matrix()));
}

// First-order translation. Each subexpression is compiled relative to the
// open span (l, r) of positions strictly between two bounds.
class FoCompiler {
 public:
  explicit FoCompiler(const OpeContext& ctx) : ctx_(ctx) {}

  FormulaPtr sentence(const OpePtr& e) {
    if (!star_free(e)) throw NotStarFree("expression is not star-free: " + to_text(e));
    Term l = Term::constant(0), r = Term::at("r");
    return fo::exists("r", fo::land(fo::pred(kDelim, r), fo::land(fo::less(l, r), compile(e, l, r))));
  }

  FormulaPtr compile(const OpePtr& e, const Term& l, const Term& r) {
    using namespace fo;
    const auto& k = e->kids;
    switch (e->kind) {
      case OKind::Epsilon: return succ(l, r);
      case OKind::Atom: return land(eq(l.plus(2), r), pred(e->a, l.plus(1)));
      case OKind::Any: return eq(l.plus(2), r);
      case OKind::Star: return truth(true);
      case OKind::Plus: return less(l.plus(1), r);
      case OKind::Union: return lor(compile(k[0], l, r), compile(k[1], l, r));
      case OKind::Inter: return land(compile(k[0], l, r), compile(k[1], l, r));
      case OKind::Diff: return land(compile(k[0], l, r), neg(compile(k[1], l, r)));
      case OKind::Neg: return neg(compile(k[0], l, r));
      case OKind::Concat: {
        // m is the first position of the right factor.
        Term m = Term::at(fresh());
        return exists(m.var, all({less(l, m), neg(less(r, m)), compile(k[0], l, m), compile(k[1], m.plus(-1), r)}));
      }
      case OKind::Fence: {
        bool lhash = e->a == kDelim, rhash = e->b == kDelim;
        Term x = lhash ? l : l.plus(1), y = rhash ? r : r.plus(-1);
        std::vector<FormulaPtr> parts{pred(e->a, x), pred(e->b, y)};
        auto nonempty = land(chord(x, y), compile(k[0], x, y));
        bool eps_ok = ope_member(Word{}, k[0], ctx_) && (lhash || rhash || ctx_.matrix().at(e->a, e->b) == RelSet(Rel::Equal));
        parts.push_back(eps_ok ? lor(nonempty, succ(x, y)) : nonempty);
        return all(parts);
      }
      case OKind::Delta:
      case OKind::Nabla:
      case OKind::Hole: return compile(ope::expand(*e), l, r);
    }
    return truth(false);
  }

 private:
  std::string fresh() { return "v" + std::to_string(++counter_); }
  const OpeContext& ctx_;
  int counter_ = 0;
};

inline FormulaPtr ope_to_fo(const OpePtr& e, const OpeContext& ctx) { return FoCompiler(ctx).sentence(e); }

}  // namespace opal
