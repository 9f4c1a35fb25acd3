#pragma once

#include "forestalg/pathlang.hpp"

namespace forestalg {

/// Alphabet with one letter per context type ("v0", "v1", ...) and the
/// identity assignment; the induced morphism is onto H (axiom 7) and V.
LetterMap canonical_self_morphism(const FiniteForestAlgebra& a);

enum class TwoDistAnswer { kYes, kNo, kInconclusive };

struct TwoDistVerdict {
  TwoDistAnswer answer = TwoDistAnswer::kInconclusive;

  // On "no": a triple with v(h1+h2) != vh1+vh2 whose pair has intersecting
  // path images, plus (when requested) path-equal witness forests over the
  // canonical alphabet evaluating to h1 and h2.
  int v = -1, h1 = -1, h2 = -1;
  std::optional<std::pair<Forest, Forest>> witness;

  // Set when the horizontal precondition already fails.
  std::string horizontal_failure;

  // On "yes": pairs with intersecting path images (all of which satisfied
  // the law). Best effort; left empty when listing was skipped.
  std::vector<std::pair<int, int>> intersecting_pairs;
  bool pairs_listed = false;

  std::string note;
  std::string to_string(const FiniteForestAlgebra& a) const;
};

struct TwoDistOptions {
  PsiEngineLimits limits;
  bool want_witness = true;
  bool list_intersecting_pairs = true;
  int pair_listing_h_limit = 8;  // skip the yes-certificate listing beyond this
};

/// Decides the path-conditioned distributive law: for every pair (h1,h2)
/// whose preimage path sets intersect under the canonical self-morphism,
/// v(h1+h2) = vh1 + vh2 must hold for all v. Only law-violating pairs need
/// an intersection decision; each gets the finest-distributive-quotient
/// certificate first and the image engine after that. Inconclusive only
/// when an engine cap fired on a pair that could not be certified.
TwoDistVerdict is_2_distributive(const FiniteForestAlgebra& a,
                                 const TwoDistOptions& opt = {});

/// Replays a "no" certificate against the tables: checks the law violation
/// and, when a witness is present, path equality, the evaluations, and the
/// one-letter context realization in the free algebra. Returns an empty
/// string when everything checks out.
std::string replay_certificate(const FiniteForestAlgebra& a, const TwoDistVerdict& verdict);

enum class SimkAnswer { kProvenEquivalent, kNotProven };

/// Bounded oracle for the k-fold congruence. k = 1 is exact (path-set
/// equality); k = 2 explores the rewrite closure that merges or splits
/// same-label siblings whose child forests have equal path sets, both
/// directions, bounded by the number of distinct forests generated.
/// "Proven" is sound; "not proven" is not a refutation.
SimkAnswer simk_oracle(const Forest& f, const Forest& g, int k, long long budget);

}  // namespace forestalg
