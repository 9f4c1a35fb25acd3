#pragma once

#include "forestalg/algebra.hpp"

#include <optional>

namespace forestalg {
namespace fixtures {

/// Catalog entry: a named algebra, usually with a letter map and an
/// accepting set so it recognizes one of the example languages. Flags are
/// verified by the checkers when the catalog is built.
struct CatalogEntry {
  std::string name;
  std::string description;
  FiniteForestAlgebra algebra;
  LetterMap letter_map;
  std::vector<int> accept;  // empty when the entry recognizes no language
  bool distributive = false;
  std::optional<bool> two_distributive;  // left unset where the check is skipped
};

const std::vector<CatalogEntry>& builtin_algebras();
const CatalogEntry& builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Membership predicates for the example languages over {a,b,c} / {a,b,c,d}:
///   l_basic: every maximal path is a*b or a*c, every b has a c sibling and
///            every c a b sibling (empty forest included)
///   l1:      l_basic restricted to nonempty forests
///   l2:      every maximal path is a*b or a+c, every b has an a sibling
///            with a c child, every a node with a c child has a b sibling
///            (nonempty)
///   l3a/l3b: mutual recursion of d-rooted trees over l1/l2 parts
///   l:       sums of l3a and l3b trees
///   bc_child: every b node has a c-rooted child
///   d_gate:  every d node has an a child that has both a b and a c child
bool membership(const std::string& language, const Forest& f);
std::vector<std::string> language_names();

/// Appendix-style compatibility predicates: the largest n with a^n b a path
/// equals (resp. is one less than) the largest n with a^n c a path.
bool compatible_l1(const Forest& f);
bool compatible_l2(const Forest& f);

struct Recognizer {
  FiniteForestAlgebra algebra;
  LetterMap letter_map;
  std::vector<int> accept;
};

/// Hand-built finite recognizers for l_basic, l1 and l2; agreement with the
/// membership predicates is established by the test suites.
Recognizer recognizer_for(const std::string& language);

}  // namespace fixtures
}  // namespace forestalg
