#include "forestalg/forest.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace forestalg {

int compare(const Forest& a, const Forest& b);

int compare(const Tree& a, const Tree& b) {
  if (a.label() != b.label()) return a.label() < b.label() ? -1 : 1;
  return compare(a.children(), b.children());
}

int compare(const Forest& a, const Forest& b) {
  const auto& x = a.trees();
  const auto& y = b.trees();
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    int c = compare(x[i], y[i]);
    if (c != 0) return c;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

Forest Forest::of(std::vector<Tree> trees) {
  std::sort(trees.begin(), trees.end(),
            [](const Tree& a, const Tree& b) { return compare(a, b) < 0; });
  trees.erase(std::unique(trees.begin(), trees.end(),
                          [](const Tree& a, const Tree& b) { return compare(a, b) == 0; }),
              trees.end());
  Forest f;
  f.trees_ = std::move(trees);
  return f;
}

int Forest::node_count() const {
  int n = 0;
  for (const Tree& t : trees_) n += t.node_count();
  return n;
}

int Forest::height() const {
  int h = 0;
  for (const Tree& t : trees_) h = std::max(h, t.height());
  return h;
}

bool Forest::operator==(const Forest& o) const { return compare(*this, o) == 0; }
bool Forest::operator<(const Forest& o) const { return compare(*this, o) < 0; }

bool Context::operator==(const Context& o) const {
  if (hole_siblings_ != o.hole_siblings_) return false;
  if (frames_.size() != o.frames_.size()) return false;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].label != o.frames_[i].label) return false;
    if (frames_[i].siblings != o.frames_[i].siblings) return false;
  }
  return true;
}

Forest sum_forests(const Forest& f, const Forest& g) {
  std::vector<Tree> all = f.trees();
  all.insert(all.end(), g.trees().begin(), g.trees().end());
  return Forest::of(std::move(all));
}

Forest apply_context(const Context& c, const Forest& f) {
  Forest result = sum_forests(c.hole_siblings(), f);
  const auto& frames = c.frames();
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    std::vector<Tree> level = it->siblings.trees();
    level.emplace_back(it->label, std::move(result));
    result = Forest::of(std::move(level));
  }
  return result;
}

Context compose_contexts(const Context& outer, const Context& inner) {
  std::vector<Context::Frame> frames = outer.frames();
  Forest hole_sibs;
  if (inner.frames().empty()) {
    hole_sibs = sum_forests(outer.hole_siblings(), inner.hole_siblings());
  } else {
    // The outer hole's siblings join the first level of the inner context.
    auto inner_frames = inner.frames();
    inner_frames.front().siblings =
        sum_forests(outer.hole_siblings(), inner_frames.front().siblings);
    frames.insert(frames.end(), inner_frames.begin(), inner_frames.end());
    hole_sibs = inner.hole_siblings();
  }
  return Context(std::move(frames), std::move(hole_sibs));
}

PathSet PathSet::of(const std::set<Word>& words) {
  PathSet p;
  for (const Word& w : words) {
    Word prefix;
    p.words_.insert(prefix);
    for (const Label& l : w) {
      prefix.push_back(l);
      p.words_.insert(prefix);
    }
  }
  return p;
}

int PathSet::max_length() const {
  int n = 0;
  for (const Word& w : words_) n = std::max<int>(n, static_cast<int>(w.size()));
  return n;
}

namespace {
void collect_paths(const Forest& f, Word& prefix, std::set<Word>& out) {
  out.insert(prefix);
  for (const Tree& t : f.trees()) {
    prefix.push_back(t.label());
    collect_paths(t.children(), prefix, out);
    prefix.pop_back();
  }
}
}  // namespace

PathSet paths(const Forest& f) {
  std::set<Word> out;
  Word prefix;
  collect_paths(f, prefix, out);
  return PathSet::of(out);
}

PathSet paths_union(const PathSet& a, const PathSet& b) {
  std::set<Word> all = a.words();
  all.insert(b.words().begin(), b.words().end());
  return PathSet::of(all);
}

Forest psi(const Forest& f) {
  if (f.empty()) return Forest();
  std::vector<Label> labels;
  for (const Tree& t : f.trees())
    if (labels.empty() || labels.back() != t.label()) labels.push_back(t.label());
  std::vector<Tree> out;
  for (const Label& beta : labels)
    out.emplace_back(beta, psi(label_quotient(beta, f)));
  return Forest::of(std::move(out));
}

int height(const Forest& f) { return f.height(); }
int node_count(const Forest& f) { return f.node_count(); }

Forest label_quotient(const Label& alpha, const Forest& f) {
  Forest out;
  for (const Tree& t : f.trees())
    if (t.label() == alpha) out = sum_forests(out, t.children());
  return out;
}

// ---------------------------------------------------------------------------
// Parsing / rendering

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  const Alphabet* alphabet;  // null = accept any label
  bool allow_hole;
  int holes_seen = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  static bool label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Label parse_label() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && label_char(text[pos])) ++pos;
    if (pos == start) throw ParseError("expected label", pos);
    Label l = text.substr(start, pos - start);
    if (l == "_") {
      if (!allow_hole) throw ParseError("hole not allowed here", start);
      return l;
    }
    if (alphabet && !alphabet->count(l))
      throw ParseError("unknown label '" + l + "'", start);
    return l;
  }

  Tree parse_tree() {
    Label l = parse_label();
    if (l == "_") {
      ++holes_seen;
      if (peek('[')) throw ParseError("hole must be a leaf", pos);
      return Tree(l);
    }
    if (peek('[')) {
      ++pos;
      std::vector<Tree> children;
      if (!peek(']')) {
        children.push_back(parse_tree());
        while (peek(',')) {
          ++pos;
          children.push_back(parse_tree());
        }
      }
      expect(']');
      return Tree(l, Forest::of(std::move(children)));
    }
    return Tree(l);
  }

  std::vector<Tree> parse_top() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '{' && text[pos + 1] == '}') {
      pos += 2;
      return {};
    }
    std::vector<Tree> trees;
    trees.push_back(parse_tree());
    while (peek(',')) {
      ++pos;
      trees.push_back(parse_tree());
    }
    return trees;
  }

  void expect_end() {
    skip_ws();
    if (pos != text.size()) throw ParseError("trailing input", pos);
  }
};

// Finds the hole in a parsed tree list and rebuilds the frame chain.
bool extract_hole(const std::vector<Tree>& level, std::vector<Context::Frame>& frames,
                  Forest& hole_siblings) {
  int hole_at = -1;
  for (std::size_t i = 0; i < level.size(); ++i)
    if (level[i].label() == "_") hole_at = static_cast<int>(i);
  if (hole_at >= 0) {
    std::vector<Tree> sibs;
    for (std::size_t i = 0; i < level.size(); ++i)
      if (static_cast<int>(i) != hole_at) sibs.push_back(level[i]);
    hole_siblings = Forest::of(std::move(sibs));
    return true;
  }
  for (std::size_t i = 0; i < level.size(); ++i) {
    std::vector<Context::Frame> sub_frames;
    Forest sub_hole;
    if (extract_hole(level[i].children().trees(), sub_frames, sub_hole)) {
      std::vector<Tree> sibs;
      for (std::size_t j = 0; j < level.size(); ++j)
        if (j != i) sibs.push_back(level[j]);
      frames.push_back({Forest::of(std::move(sibs)), level[i].label()});
      frames.insert(frames.end(), sub_frames.begin(), sub_frames.end());
      hole_siblings = sub_hole;
      return true;
    }
  }
  return false;
}

Forest parse_forest_impl(const std::string& text, const Alphabet* alphabet) {
  Parser p{text, 0, alphabet, /*allow_hole=*/false};
  auto trees = p.parse_top();
  p.expect_end();
  return Forest::of(std::move(trees));
}

Context parse_context_impl(const std::string& text, const Alphabet* alphabet) {
  Parser p{text, 0, alphabet, /*allow_hole=*/true};
  auto trees = p.parse_top();
  p.expect_end();
  if (p.holes_seen != 1)
    throw ParseError("context must contain exactly one '_' token", 0);
  std::vector<Context::Frame> frames;
  Forest hole_sibs;
  extract_hole(trees, frames, hole_sibs);
  return Context(std::move(frames), std::move(hole_sibs));
}

void render_tree(const Tree& t, std::string& out);

void render_body(const Forest& f, std::string& out) {
  bool first = true;
  for (const Tree& t : f.trees()) {
    if (!first) out += ',';
    first = false;
    render_tree(t, out);
  }
}

void render_tree(const Tree& t, std::string& out) {
  out += t.label();
  if (!t.children().empty()) {
    out += '[';
    render_body(t.children(), out);
    out += ']';
  }
}

}  // namespace

Forest parse_forest(const std::string& text) { return parse_forest_impl(text, nullptr); }
Forest parse_forest(const std::string& text, const Alphabet& alphabet) {
  return parse_forest_impl(text, &alphabet);
}
Context parse_context(const std::string& text) { return parse_context_impl(text, nullptr); }
Context parse_context(const std::string& text, const Alphabet& alphabet) {
  return parse_context_impl(text, &alphabet);
}

std::string render(const Forest& f) {
  if (f.empty()) return "{}";
  std::string out;
  render_body(f, out);
  return out;
}

std::string render(const Tree& t) {
  std::string out;
  render_tree(t, out);
  return out;
}

std::string render(const Context& c) {
  // Rebuild as a forest over labels plus the "_" leaf, then render that.
  Forest hole_marker = Forest::of({Tree("_")});
  return render(apply_context(c, hole_marker));
}

std::string render(const Word& w) {
  if (w.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += '.';
    out += w[i];
  }
  return out;
}

std::string render(const PathSet& p) {
  std::string out;
  bool first = true;
  for (const Word& w : p.words()) {
    if (!first) out += ',';
    first = false;
    out += render(w);
  }
  return out;
}

Alphabet collect_alphabet(const Forest& f) {
  Alphabet a;
  std::function<void(const Forest&)> walk = [&](const Forest& g) {
    for (const Tree& t : g.trees()) {
      a.insert(t.label());
      walk(t.children());
    }
  };
  walk(f);
  return a;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

// DFS over index-increasing subsets of a tree pool sorted by (node count,
// structural order), with an exact node-count target per pass. Ascending
// sizes let the scan stop at the first tree too large for the remaining
// budget. Distinct index sets give distinct forests, so emission is
// duplicate-free; the target loop makes it ordered by total node count.
struct PoolEnum {
  const std::vector<Tree>& pool;
  const std::vector<int>& sizes;  // ascending
  const std::function<void(const Forest&)>& visit;
  long long cap;
  long long emitted = 0;
  std::vector<Tree> current;

  void run(int target) {
    if (target == 0) {
      emit();
      return;
    }
    dfs(0, target);
  }

  void emit() {
    if (++emitted > cap) throw ResourceLimitError("forest enumeration exceeded cap");
    visit(Forest::of(current));
  }

  void dfs(std::size_t from, int remaining) {
    for (std::size_t i = from; i < pool.size() && sizes[i] <= remaining; ++i) {
      current.push_back(pool[i]);
      if (sizes[i] == remaining)
        emit();
      else
        dfs(i + 1, remaining - sizes[i]);
      current.pop_back();
    }
  }
};

void sort_pool(std::vector<Tree>& pool) {
  std::sort(pool.begin(), pool.end(), [](const Tree& a, const Tree& b) {
    int na = a.node_count(), nb = b.node_count();
    if (na != nb) return na < nb;
    return compare(a, b) < 0;
  });
}

}  // namespace

void enumerate_forests(const std::vector<Label>& alphabet, const EnumBounds& bounds,
                       const std::function<void(const Forest&)>& visit) {
  if (bounds.max_height < 0 || bounds.max_nodes < 0)
    throw std::invalid_argument("enumeration bounds must be nonnegative");
  std::vector<Label> letters = alphabet;
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());

  // Trees with height <= max_height and node budget, built level by level:
  // a tree of height exactly h is a letter over a child forest of height h-1.
  std::vector<Tree> pool;
  for (int h = 1; h <= bounds.max_height; ++h) {
    std::vector<int> child_sizes;
    child_sizes.reserve(pool.size());
    for (const Tree& t : pool) child_sizes.push_back(t.node_count());

    std::vector<Tree> fresh;
    auto consume = [&](const Forest& f) {
      if (f.height() != h - 1) return;  // exactly-h trees only; lower h done earlier
      for (const Label& l : letters) fresh.emplace_back(l, f);
    };
    PoolEnum pe{pool, child_sizes, consume, bounds.cap, 0, {}};
    for (int target = (h == 1 ? 0 : 1); target <= bounds.max_nodes - 1; ++target)
      pe.run(target);

    for (Tree& t : fresh) pool.push_back(std::move(t));
    sort_pool(pool);
  }

  std::vector<int> sizes;
  sizes.reserve(pool.size());
  for (const Tree& t : pool) sizes.push_back(t.node_count());

  PoolEnum pe{pool, sizes, visit, bounds.cap, 0, {}};
  for (int target = 0; target <= bounds.max_nodes; ++target) pe.run(target);
}

std::vector<Forest> enumerate_forests_vec(const std::vector<Label>& alphabet,
                                          const EnumBounds& bounds) {
  std::vector<Forest> out;
  enumerate_forests(alphabet, bounds, [&](const Forest& f) { out.push_back(f); });
  return out;
}

Forest random_forest(std::mt19937_64& rng, const std::vector<Label>& alphabet,
                     int max_height, int max_width) {
  if (max_height <= 0 || alphabet.empty()) return Forest();
  std::uniform_int_distribution<int> width(0, max_width);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  int n = width(rng);
  std::vector<Tree> trees;
  for (int i = 0; i < n; ++i) {
    Label l = alphabet[pick(rng)];
    trees.emplace_back(l, random_forest(rng, alphabet, max_height - 1, max_width));
  }
  return Forest::of(std::move(trees));
}

}  // namespace forestalg
