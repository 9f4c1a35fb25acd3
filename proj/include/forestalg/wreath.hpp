#pragma once

#include "forestalg/algebra.hpp"

namespace forestalg {

/// Wreath product of two finite forest algebras. H is the product of the
/// factor H's; a V element is a function from the right H into the left V,
/// paired with a right V element. The action cascades:
///   (f,v)(h1,h2) = (f(h2)h1, vh2),   (f,v)(f',v') = (h -> f(v'h)f'(h), vv').
struct WreathAlgebra {
  FiniteForestAlgebra algebra;
  FiniteForestAlgebra left;    // factor copies, for projections and checks
  FiniteForestAlgebra right;
  std::vector<std::pair<int, int>> h_pair;          // H index -> (h1, h2)
  std::vector<std::vector<int>> v_func;             // V index -> row over right H into left V
  std::vector<int> v_right;                         // V index -> right V element

  int h_index(int h1, int h2) const;
};

/// Full product; the function component ranges over all |V1|^|H2| rows.
/// Throws ResourceLimitError when |V1|^|H2| * |V2| exceeds the cap.
WreathAlgebra wreath_product(const FiniteForestAlgebra& left,
                             const FiniteForestAlgebra& right,
                             long long cap = 100000);

struct GeneratedWreath {
  WreathAlgebra wreath;
  LetterMap letter_map;
};

/// Letters map to pairs (g(alpha, .), l2(alpha)); builds the subalgebra they
/// generate without materializing the full function space. The V part is
/// quotiented to stay faithful relative to the generated H. `g` assigns to
/// each letter a row over the right H with values in the left V.
GeneratedWreath wreath_generated(const FiniteForestAlgebra& left,
                                 const FiniteForestAlgebra& right,
                                 const LetterMap& l2,
                                 const std::map<Label, std::vector<int>>& g,
                                 long long cap = 100000);

/// Componentwise projection onto the right factor, as a morphism; verify
/// with check_morphism, which holds on every table entry.
Morphism project_right(const WreathAlgebra& w);

/// Backtracking search for a forest-algebra isomorphism (pair of bijections
/// preserving all operations); the V bijection is induced from the H one by
/// matching action rows. Intended for tiny algebras.
std::optional<std::pair<std::vector<int>, std::vector<int>>> find_isomorphism(
    const FiniteForestAlgebra& a, const FiniteForestAlgebra& b);

}  // namespace forestalg
