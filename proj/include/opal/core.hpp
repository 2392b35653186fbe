#pragma once
// Shared vocabulary: symbols, words, errors, budgets.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opal {

using Symbol = std::string;
using Word = std::vector<Symbol>;
using SymbolSet = std::set<Symbol>;

inline const Symbol kDelim = "#";
inline const Symbol kOpen = "(";
inline const Symbol kClose = ")";

inline bool is_marker(const Symbol& s) { return s == kOpen || s == kClose; }
inline bool is_reserved(const Symbol& s) { return s == kDelim || is_marker(s); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int line, int col)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(col)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Work budgets. OPAL_BUDGET scales every cap by a positive factor.
struct Budget {
  std::size_t enum_nodes = 20'000'000;
  std::size_t monoid_cap = 1'000'000;
  std::size_t dfa_states = 200'000;
  std::size_t cycle_cap = 2'000'000;
  int mso_max_len = 12;
  int pump_n = 3;
  int maxlen = 14;

  static Budget from_env() {
    Budget b;
    if (const char* env = std::getenv("OPAL_BUDGET")) {
      char* end = nullptr;
      double f = std::strtod(env, &end);
      if (end != env && f > 0) b.scale(f);
    }
    return b;
  }
  void scale(double f) {
    auto s = [f](std::size_t& v) { v = static_cast<std::size_t>(static_cast<double>(v) * f); };
    s(enum_nodes);
    s(monoid_cap);
    s(dfa_states);
    s(cycle_cap);
  }
};

inline std::string join(const Word& w, std::string_view sep = "") {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += w[i];
  }
  return out;
}

// Split text into alphabet symbols, longest match first; whitespace only
// separates.
inline Word read_word(std::string_view text, const SymbolSet& alphabet) {
  Word out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t best = 0;
    for (const auto& s : alphabet)
      if (s.size() > best && text.substr(i, s.size()) == s) best = s.size();
    if (best == 0) throw SyntaxError("unknown symbol '" + std::string(text.substr(i, 1)) + "'", 1, static_cast<int>(i) + 1);
    out.emplace_back(text.substr(i, best));
    i += best;
  }
  return out;
}

// Render a word: plain concatenation when every symbol is one character,
// space separated otherwise.
inline std::string show(const Word& w) {
  bool single = true;
  for (const auto& s : w)
    if (s.size() != 1) single = false;
  return join(w, single ? "" : " ");
}

inline std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Split text into alphabet symbols: whitespace separated if it has spaces,
// otherwise greedy longest match.
inline Word tokenize(std::string_view text, const SymbolSet& alphabet) {
  if (text.find_first_of(" \t\n") != std::string_view::npos) {
    Word w = split_ws(text);
    for (const auto& s : w)
      if (!alphabet.count(s)) throw Error("unknown symbol '" + s + "'");
    return w;
  }
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t best = 0;
    for (const auto& s : alphabet)
      if (s.size() > best && text.substr(i, s.size()) == s) best = s.size();
    if (!best) throw Error("cannot tokenize '" + std::string(text) + "' at offset " + std::to_string(i));
    w.emplace_back(text.substr(i, best));
    i += best;
  }
  return w;
}

// All words over an alphabet with length in [minlen, maxlen], shortlex order.
inline std::vector<Word> all_words(const SymbolSet& alphabet, int maxlen, int minlen = 0) {
  std::vector<Symbol> sig(alphabet.begin(), alphabet.end());
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (int len = 0; len <= maxlen; ++len) {
    if (len >= minlen) out.insert(out.end(), layer.begin(), layer.end());
    if (len == maxlen) break;
    std::vector<Word> next;
    next.reserve(layer.size() * sig.size());
    for (const auto& w : layer)
      for (const auto& s : sig) {
        Word x = w;
        x.push_back(s);
        next.push_back(std::move(x));
      }
    layer = std::move(next);
  }
  return out;
}

inline Word erase_markers(const Word& w) {
  Word out;
  for (const auto& s : w)
    if (!is_marker(s)) out.push_back(s);
  return out;
}

}  // namespace opal
