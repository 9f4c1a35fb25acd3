#pragma once

#include "forestalg/algebra.hpp"

#include <cstdint>
#include <optional>
#include <set>

namespace forestalg {

/// Deterministic word automaton from the subset construction over V; each
/// state is tagged with the subset of V it represents.
struct WordDFA {
  std::vector<Label> alphabet;                // sorted
  std::vector<std::vector<int>> state_tags;   // sorted V subsets
  int start = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<int>> trans;        // [state][letter index]

  int state_count() const { return static_cast<int>(state_tags.size()); }
  int letter_index(const Label& l) const;
  bool accepts(const Word& w) const;
  std::string to_text() const;
  std::string to_dot() const;
};

/// DFA for the set of words occurring as a path of some forest whose value
/// lies in `accept`. States track the possible context values along the
/// spine read so far, with sibling values ranging over the realizable part
/// of H; a state accepts when one of its context values can be completed,
/// possibly with realizable top-level siblings, into an accepted value.
WordDFA pi_automaton(const FiniteForestAlgebra& a, const LetterMap& lm,
                     const std::vector<int>& accept);

/// Exact union of paths(f) over enumerated forests with eval in `accept`.
std::set<Word> bounded_pi_oracle(const FiniteForestAlgebra& a, const LetterMap& lm,
                                 const std::vector<int>& accept, int max_height,
                                 int max_nodes, long long cap = 10'000'000);

// ---------------------------------------------------------------------------
// The normal-form image engine

/// Element of the image algebra used to recognize normal forms of forest
/// languages: bottom, or a per-letter family of subsets of H. Subsets are
/// 64-bit masks, so the engine requires |H| <= 64; families are sorted.
struct PsiValue {
  bool bottom = false;
  std::vector<std::vector<std::uint64_t>> fam;  // per letter index

  bool is_identity() const;
  bool operator==(const PsiValue& o) const { return bottom == o.bottom && fam == o.fam; }
  bool operator<(const PsiValue& o) const {
    if (bottom != o.bottom) return !bottom;
    return fam < o.fam;
  }
};

/// True iff some component is nonempty and one value set can be picked from
/// each nonempty component's family so that their sums add up to h. Bottom
/// never accepts. (When every nonempty family contains the singleton {h}
/// this holds by idempotency; the general form is what exact agreement with
/// the brute-force normal-form membership requires.)
bool psi_accepts(const FiniteForestAlgebra& a, const PsiValue& x, int h);

struct PsiEngineLimits {
  int max_values = 50000;      // reachable-set cap
  int max_union_bits = 22;     // widest U whose subsets are enumerated
  int max_value_bits = 18;     // widest achievable-value set per U
  long long max_pick_products = 2'000'000;  // per letter application
};

struct EngineCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluates forests into the image algebra and computes the reachable
/// value set with predecessor links, for membership tests, intersection
/// decisions and witness extraction.
class PsiEngine {
 public:
  PsiEngine(FiniteForestAlgebra a, LetterMap lm, PsiEngineLimits limits = {});

  const FiniteForestAlgebra& algebra() const { return algebra_; }
  const std::vector<Label>& letters() const { return letters_; }
  int letter_index(const Label& l) const;

  PsiValue identity_value() const;
  PsiValue bottom_value() const;
  PsiValue apply_letter(const Label& l, const PsiValue& x) const;
  PsiValue value_sum(const PsiValue& x, const PsiValue& y) const;
  PsiValue eval(const Forest& f) const;

  /// Worklist closure of {identity} under letter application and sums.
  /// Throws EngineCapError beyond the caps. Deterministic order.
  const std::vector<PsiValue>& reachable();

  /// Index of a reachable value accepting both h1 and h2, or -1. Runs the
  /// closure incrementally and stops at the first witness.
  int find_common_acceptor(int h1, int h2);

  /// Witness forests with equal path sets evaluating to h1 and h2, rebuilt
  /// from the derivation of the given reachable value (which must accept
  /// both). The caller is expected to re-verify the result.
  std::pair<Forest, Forest> extract_witnesses(int value_index, int h1, int h2);

  /// A forest with the value class of the given reachable value and
  /// evaluation h (which the value must accept).
  Forest realize(int value_index, int h);

 private:
  struct Node {
    PsiValue value;
    enum Kind { kIdentity, kLetter, kSum } kind = kIdentity;
    int letter = -1;  // for kLetter
    int pred1 = -1, pred2 = -1;
  };

  int intern(PsiValue v, Node::Kind kind, int letter, int p1, int p2);
  void step(std::size_t i);  // expand node i against everything older
  Forest reconstruct(int letter, int pred_index, std::uint64_t target_q);
  std::map<int, int> components(int value_index);  // letter -> pred index

  FiniteForestAlgebra algebra_;
  LetterMap letter_map_;
  std::vector<Label> letters_;
  PsiEngineLimits limits_;
  std::vector<Node> nodes_;
  std::map<PsiValue, int> index_;
  std::size_t expanded_ = 0;
  std::vector<PsiValue> values_;  // mirrors nodes_, for reachable()
};

// ---------------------------------------------------------------------------
// The realized pair relation

/// Fixpoint of the relation {(tree-value set of f1, tree-value set of f2) :
/// paths(f1) = paths(f2)} over subsets of H as 64-bit masks. Closed under
/// componentwise union (disjoint forests concatenate) and, per letter, under
/// taking pairs of achievable value sets over covers of the child unions.
/// Decides path-image intersection in one closure per algebra: the images of
/// h1 and h2 meet iff some pair has componentwise sums (h1, h2). Scales with
/// the number of realized value-set pairs, not with the alphabet.
class PairRelation {
 public:
  PairRelation(FiniteForestAlgebra a, LetterMap lm, PsiEngineLimits limits = {});

  /// Index of a pair whose sums are (h1, h2), or -1 if none exists among
  /// the pairs found so far; extends the closure on demand and stops early.
  /// Throws EngineCapError when a cap fires before an answer is certain.
  int find_pair(int h1, int h2);

  /// First pair whose sums match any target, or -1 when the closure
  /// completes without one. One shared expansion serves all targets, so a
  /// positive answer does not depend on target order.
  int find_any(const std::vector<std::pair<int, int>>& targets);

  /// Runs the closure to the fixpoint. Throws EngineCapError on a cap.
  void close();
  bool complete() const { return complete_; }
  std::size_t size() const { return nodes_.size(); }

  /// Path-equal witness forests with evaluations sum(u1), sum(u2).
  std::pair<Forest, Forest> extract(int index);

 private:
  struct Node {
    std::uint64_t u1, u2;
    int sum1, sum2;
    enum Kind { kEmpty, kUnion, kLetter } kind;
    int pred1 = -1, pred2 = -1;   // union parts, or pred for letter nodes
    int letter = -1;
  };

  int intern(std::uint64_t u1, std::uint64_t u2, Node::Kind kind, int p1, int p2,
             int letter);
  const std::vector<std::uint64_t>& achieve(int v, std::uint64_t w);
  bool expand_next();  // expands the lightest unexpanded pair, if any

  FiniteForestAlgebra algebra_;
  LetterMap letter_map_;
  PsiEngineLimits limits_;
  std::vector<std::pair<int, int>> scan_letters_;  // (v, letter index), distinct v
  std::vector<Node> nodes_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> index_;
  std::map<std::pair<int, std::uint64_t>, std::vector<std::uint64_t>> achieve_memo_;
  std::set<std::pair<int, int>> frontier_;  // (popcount weight, node index)
  bool complete_ = false;
};

// ---------------------------------------------------------------------------
// Path-image intersection

enum class Ternary { kFalse, kTrue, kInconclusive };

struct IntersectResult {
  Ternary verdict = Ternary::kInconclusive;
  std::string note;
  std::optional<std::pair<Forest, Forest>> witness;  // path-equal, values h1/h2
};

struct PathIntersectOptions {
  bool use_reflection = true;   // certify disjointness via the finest
                               // distributive quotient before running the engine
  bool want_witness = false;
  PsiEngineLimits limits;
};

/// Decides whether the path images of eval^-1(h1) and eval^-1(h2) meet.
/// Inconclusive only when an engine cap fired.
IntersectResult paths_intersect(const FiniteForestAlgebra& a, const LetterMap& lm,
                                int h1, int h2, const PathIntersectOptions& opt = {});

/// Same decision for unions of value classes, sharing one engine run:
/// whether the path images of eval^-1(hs1) and eval^-1(hs2) meet.
IntersectResult paths_intersect_sets(const FiniteForestAlgebra& a, const LetterMap& lm,
                                     const std::vector<int>& hs1,
                                     const std::vector<int>& hs2,
                                     const PathIntersectOptions& opt = {});

// ---------------------------------------------------------------------------
// Bounded common path sets for rule languages

/// Path sets d with witnesses f1, f2 within the bounds such that
/// pi(f1) = pi(f2) = d, f1 a nonempty sum of forests matching rules in R and
/// f2 one matching rules in S (every member tree's top rule is in the set).
std::set<PathSet> bounded_common_pathsets(const FiniteForestAlgebra& a,
                                          const LetterMap& lm,
                                          const std::vector<Rule>& r_rules,
                                          const std::vector<Rule>& s_rules,
                                          int max_height, int max_nodes,
                                          long long cap = 10'000'000);

}  // namespace forestalg
