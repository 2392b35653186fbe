#pragma once
// Star-free expressions used by the normal-form and first-order suites,
// each paired with the matrix it is evaluated against.

#include <string>
#include <vector>

namespace opal::test {

struct OpeCase {
  std::string matrix;
  std::string source;
};

inline const std::vector<OpeCase>& star_free_corpus() {
  static const std::vector<OpeCase> cases = {
      {"abc", "a[.*]b"},
      {"abc", "a[~(.* c .*)]b"},
      {"abc", "delta(a,b)"},
      {"abc", "nabla(a,b)"},
      {"abc", "~delta(a,b)"},
      {"abc", "~nabla(a,c)"},
      {"abc", "c delta(a,b) c"},
      {"abc", "~(c delta(a,b) .*)"},
      {"abc", "~(.* nabla(a,c) c)"},
      {"abc", "delta(a,b) delta(a,c)"},
      {"abc", ".* delta(a,b) .* delta(a,c) .*"},
      {"abc", "hole(a,b)"},
      {"abc", "hole(#,b)"},
      {"abc", "hole(a,#)"},
      {"abc", "#[a .*]b"},
      {"abc", "a[b .*]#"},
      {"abc", "(a[.*]b | c) & ~(.* c c .*)"},
      {"abc", "a[c delta(a,b) .*]b"},
      {"abc", "delta(a,b) - a b .*"},
      {"abc", "~(a[.*]b c)"},
      {"abc", "(delta(a,b) & .* b b) .*"},
      {"abc", "eps | a b"},
      {"dyck", "hole(a,b') & hole(b,a') & hole(#,a') & hole(#,b') & hole(a,#) & hole(b,#)"},
      {"anbn", "a[.*]b"},
      {"anbn", "a[.*]#"},
      {"anbn", "~(.* delta(a,b) .*)"},
  };
  return cases;
}

}  // namespace opal::test
