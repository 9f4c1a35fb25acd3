#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace forestalg {

using Label = std::string;
using Alphabet = std::set<Label>;

class Tree;

/// An unordered, duplicate-free forest: the canonical representation keeps
/// member trees sorted by the structural order, so structural equality is
/// plain equality and sum is set union.
class Forest {
 public:
  Forest() = default;

  /// Canonicalizes: sorts by the structural order and drops duplicates.
  static Forest of(std::vector<Tree> trees);

  const std::vector<Tree>& trees() const { return trees_; }
  bool empty() const { return trees_.empty(); }
  int tree_count() const { return static_cast<int>(trees_.size()); }
  int node_count() const;
  int height() const;

  bool operator==(const Forest& o) const;
  bool operator!=(const Forest& o) const { return !(*this == o); }
  bool operator<(const Forest& o) const;

 private:
  std::vector<Tree> trees_;  // sorted, unique
};

class Tree {
 public:
  explicit Tree(Label label) : label_(std::move(label)) {}
  Tree(Label label, Forest children)
      : label_(std::move(label)), children_(std::move(children)) {}

  const Label& label() const { return label_; }
  const Forest& children() const { return children_; }
  int node_count() const { return 1 + children_.node_count(); }
  int height() const { return 1 + children_.height(); }

 private:
  Label label_;
  Forest children_;
};

// Structural order: label first, then children, recursively.
int compare(const Tree& a, const Tree& b);
int compare(const Forest& a, const Forest& b);

/// A context: a forest with exactly one hole. Stored as the chain of frames
/// from the outermost level down to the hole, plus the forest of siblings
/// sitting next to the hole itself. The hole of `siblings + label[inner]`
/// lives in `inner`.
class Context {
 public:
  struct Frame {
    Forest siblings;
    Label label;
  };

  Context() = default;  // the identity context (bare hole)

  Context(std::vector<Frame> frames, Forest hole_siblings)
      : frames_(std::move(frames)), hole_siblings_(std::move(hole_siblings)) {}

  bool is_hole() const { return frames_.empty() && hole_siblings_.empty(); }
  const std::vector<Frame>& frames() const { return frames_; }
  const Forest& hole_siblings() const { return hole_siblings_; }

  bool operator==(const Context& o) const;

 private:
  std::vector<Frame> frames_;
  Forest hole_siblings_;
};

Forest sum_forests(const Forest& f, const Forest& g);
Forest apply_context(const Context& c, const Forest& f);
Context compose_contexts(const Context& outer, const Context& inner);

using Word = std::vector<Label>;

/// Prefix-closed finite set of words; always contains the empty word.
class PathSet {
 public:
  PathSet() { words_.insert(Word{}); }

  /// Prefix-closes the given words (and adds the empty word).
  static PathSet of(const std::set<Word>& words);

  const std::set<Word>& words() const { return words_; }
  int max_length() const;

  bool operator==(const PathSet& o) const { return words_ == o.words_; }
  bool operator!=(const PathSet& o) const { return !(*this == o); }
  bool operator<(const PathSet& o) const { return words_ < o.words_; }
  bool contains(const Word& w) const { return words_.count(w) > 0; }

 private:
  std::set<Word> words_;
};

PathSet paths(const Forest& f);
PathSet paths_union(const PathSet& a, const PathSet& b);

/// Distributive normal form: merges sibling trees that share a root label,
/// recursively, so no two distinct siblings carry the same label. Preserves
/// the path set and is idempotent.
Forest psi(const Forest& f);

int height(const Forest& f);
int node_count(const Forest& f);

/// All trees occurring below roots labeled `alpha`, as one forest.
Forest label_quotient(const Label& alpha, const Forest& f);

// ---------------------------------------------------------------------------
// Text format

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)),
        position(position) {}
  std::size_t position;
};

/// Grammar (whitespace-insensitive):
///   forest := "{}" | tree ("," tree)*
///   tree   := label ("[" forest-body "]")?
///   forest-body := tree ("," tree)* | empty
/// Labels are nonempty strings of letters, digits and underscore.
Forest parse_forest(const std::string& text);
Forest parse_forest(const std::string& text, const Alphabet& alphabet);

/// A context is a forest text with exactly one `_` token as a leaf.
Context parse_context(const std::string& text);
Context parse_context(const std::string& text, const Alphabet& alphabet);

std::string render(const Forest& f);
std::string render(const Tree& t);
std::string render(const Context& c);
std::string render(const Word& w);     // labels joined by '.', "ε" if empty
std::string render(const PathSet& p);  // words joined by ','

Alphabet collect_alphabet(const Forest& f);

// ---------------------------------------------------------------------------
// Bounded enumeration (oracle substrate)

struct EnumBounds {
  int max_height = 0;
  int max_nodes = 0;
  long long cap = 10'000'000;  // resource limit on emitted forests
};

struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Emits every canonical forest with height <= max_height and node count
/// <= max_nodes exactly once, ordered by node count and then by the
/// structural order. Includes the empty forest. Throws ResourceLimitError
/// when more than `cap` forests would be emitted.
void enumerate_forests(const std::vector<Label>& alphabet, const EnumBounds& bounds,
                       const std::function<void(const Forest&)>& visit);

std::vector<Forest> enumerate_forests_vec(const std::vector<Label>& alphabet,
                                          const EnumBounds& bounds);

/// Seeded random canonical forest with height <= max_height; each node gets
/// between 0 and max_width children before canonicalization.
Forest random_forest(std::mt19937_64& rng, const std::vector<Label>& alphabet,
                     int max_height, int max_width);

}  // namespace forestalg
