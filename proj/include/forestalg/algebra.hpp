#pragma once

#include "forestalg/forest.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace forestalg {

/// A finite forest algebra as dense operation tables over element indices.
/// H is the horizontal monoid (forest types, operation +), V the vertical
/// monoid (context types, operation ·) acting on H; ins[h] is the index of
/// the insertion context I_h with I_h·h' = h+h'.
struct FiniteForestAlgebra {
  int h_size = 0;
  int v_size = 0;
  int zero_h = 0;
  int one_v = 0;
  std::vector<std::vector<int>> add;  // add[h][h']
  std::vector<std::vector<int>> mul;  // mul[v][v']
  std::vector<std::vector<int>> act;  // act[v][h]
  std::vector<int> ins;               // ins[h] = index in V
  std::vector<std::string> h_names;   // optional; empty or h_size entries
  std::vector<std::string> v_names;   // optional; empty or v_size entries

  int plus(int a, int b) const { return add[a][b]; }
  int times(int v, int w) const { return mul[v][w]; }
  int action(int v, int h) const { return act[v][h]; }

  std::string h_name(int h) const;
  std::string v_name(int v) const;
};

struct AxiomCheck {
  std::string axiom;           // short identifier, e.g. "action-law"
  bool pass = true;
  std::string counterexample;  // empty when pass
};

struct ValidationReport {
  std::vector<AxiomCheck> axioms;
  bool ok() const;
  std::string to_string() const;
};

struct TableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checks the seven forest-algebra axioms exhaustively:
/// h-monoid, v-monoid, action totality, action law (incl. identity action),
/// faithfulness, insertion law, and reachability of H from 0_H under V.
/// Malformed tables (wrong sizes, out-of-range indices) throw TableError.
ValidationReport validate_algebra(const FiniteForestAlgebra& a);

struct HorizontalVerdict {
  bool idempotent = true;
  bool commutative = true;
  std::string counterexample;  // first violation, if any
  bool ok() const { return idempotent && commutative; }
};

HorizontalVerdict check_horizontal(const FiniteForestAlgebra& a);

struct DistributivityVerdict {
  bool distributive = true;
  int v = -1, h1 = -1, h2 = -1;  // first counterexample when not distributive
  std::string to_string(const FiniteForestAlgebra& a) const;
};

/// Exhaustive check of v(h1+h2) = vh1 + vh2 over V x H x H.
DistributivityVerdict is_distributive(const FiniteForestAlgebra& a);

/// Assignment of a V element to each letter; induces the unique morphism
/// from the free forest algebra over that alphabet.
struct LetterMap {
  std::vector<Label> letters;   // sorted, unique
  std::map<Label, int> to_v;

  static LetterMap of(const std::map<Label, int>& assignment);
  int at(const Label& l) const;
  bool has(const Label& l) const { return to_v.count(l) > 0; }
};

int eval_forest(const FiniteForestAlgebra& a, const LetterMap& lm, const Forest& f);
int eval_context(const FiniteForestAlgebra& a, const LetterMap& lm, const Context& c);

/// H-indices reachable as eval_forest of some forest: the least set with
/// 0_H, closed under + and under h -> l(letter)·h.
std::vector<int> realizable_h(const FiniteForestAlgebra& a, const LetterMap& lm);

// ---------------------------------------------------------------------------
// Constructions

/// Componentwise product followed by faithful_quotient.
FiniteForestAlgebra direct_product(const FiniteForestAlgebra& a,
                                   const FiniteForestAlgebra& b);

/// Same, keeping the index maps from factor pairs into the result (H is
/// untouched by the faithfulness merge; V pairs may collapse).
struct ProductWithMaps {
  FiniteForestAlgebra algebra;
  int right_h_size = 0;
  int right_v_size = 0;
  std::vector<int> v_map;  // x * right_v_size + y -> merged V index
  int h_index(int x, int y) const { return x * right_h_size + y; }
  int v_index(int x, int y) const { return v_map[x * right_v_size + y]; }
};

ProductWithMaps direct_product_with_maps(const FiniteForestAlgebra& a,
                                         const FiniteForestAlgebra& b);

/// Merges V elements with identical action rows. Requires all axioms except
/// possibly faithfulness.
FiniteForestAlgebra faithful_quotient(const FiniteForestAlgebra& a);

struct Subalgebra {
  FiniteForestAlgebra algebra;
  std::vector<int> h_map;  // old H index -> new index, -1 if not in subalgebra
  std::vector<int> v_map;  // old V index -> new index, -1 if not in subalgebra
  LetterMap letter_map;    // original letters, re-indexed
};

/// Least subalgebra containing 0_H, 1_V and all letter images, closed under
/// +, ·, the action and insertion; the V part is then made faithful relative
/// to the generated H by merging equal action rows.
Subalgebra generated_subalgebra(const FiniteForestAlgebra& a, const LetterMap& lm);

struct Morphism {
  FiniteForestAlgebra target;
  std::vector<int> h_map;  // source H index -> target H index
  std::vector<int> v_map;  // source V index -> target V index
};

/// The finest distributive quotient: the quotient by the smallest congruence
/// collapsing v(h1+h2) with vh1+vh2. Every morphism onto a distributive
/// algebra factors through it, so h-classes that it separates have disjoint
/// path images.
Morphism distributive_reflection(const FiniteForestAlgebra& a);

/// Checks that the maps preserve +, ·, the action, insertion and the two
/// identities; returns the first violated law, or empty.
std::string check_morphism(const FiniteForestAlgebra& src, const Morphism& m);

// ---------------------------------------------------------------------------
// Rules and traces

/// One bottom-up evaluation step: result = l(label) · sum(children).
struct Rule {
  int result = 0;
  Label label;
  std::vector<int> children;  // sorted unique H indices

  bool operator==(const Rule& o) const = default;
  bool operator<(const Rule& o) const {
    return std::tie(result, label, children) < std::tie(o.result, o.label, o.children);
  }
};

/// All |Sigma| * 2^|H| rules. Guarded: throws ResourceLimitError when the
/// rule count would exceed the cap.
std::vector<Rule> enumerate_rules(const FiniteForestAlgebra& a, const LetterMap& lm,
                                  long long cap = 1'000'000);

/// True iff each consecutive pair is compatible: the result of the next rule
/// occurs among the children of the previous one.
bool is_trace(const std::vector<Rule>& seq);

// ---------------------------------------------------------------------------
// File formats

/// Line-based format, '#' starts a comment:
///   FA 1 / H m / V n / ZERO i / ONE j
///   ADDROW i: k0 ... k_{m-1}       (m lines)
///   MULROW i: ...                  (n lines)
///   ACTROW v: h0 ... h_{m-1}       (n lines)
///   INS h v                        (m lines)
///   HNAME i name / VNAME j name    (optional)
std::string write_algebra(const FiniteForestAlgebra& a);
FiniteForestAlgebra read_algebra(std::istream& in);
FiniteForestAlgebra load_algebra(const std::string& path);
void save_algebra(const FiniteForestAlgebra& a, const std::string& path);

/// Letter-map format: lines `LETTER alpha v-index`.
std::string write_letter_map(const LetterMap& lm);
LetterMap read_letter_map(std::istream& in);
LetterMap load_letter_map(const std::string& path);
void save_letter_map(const LetterMap& lm, const std::string& path);

struct FileFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Row-generated algebras (used by fixtures and tests)

/// Builds a forest algebra from an H monoid table and a set of generator
/// action rows (maps H -> H); V is the closure of the generators together
/// with all insertions I_h and the identity row under composition. Rows are
/// extensional, so the result is faithful by construction. Optionally
/// restricts H to the part reachable from 0 under the named letter rows
/// before closing V.
struct RowAlgebraSpec {
  int h_size = 0;
  int zero_h = 0;
  std::vector<std::vector<int>> add;
  std::vector<std::pair<Label, std::vector<int>>> letter_rows;
  bool restrict_to_reachable = true;
};

struct RowAlgebra {
  FiniteForestAlgebra algebra;
  LetterMap letter_map;
  std::vector<int> h_map;  // spec H index -> algebra index (-1 if dropped)
};

RowAlgebra build_row_algebra(const RowAlgebraSpec& spec);

}  // namespace forestalg
