#include "forestalg/pathlang.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace forestalg {

int WordDFA::letter_index(const Label& l) const {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), l);
  if (it == alphabet.end() || *it != l) return -1;
  return static_cast<int>(it - alphabet.begin());
}

bool WordDFA::accepts(const Word& w) const {
  int q = start;
  for (const Label& l : w) {
    int li = letter_index(l);
    if (li < 0) return false;
    q = trans[q][li];
  }
  return accepting[q];
}

std::string WordDFA::to_text() const {
  std::ostringstream out;
  out << "DFA\n";
  out << "STATES " << state_count() << "\n";
  out << "START " << start << "\n";
  out << "ACCEPT";
  for (int q = 0; q < state_count(); ++q)
    if (accepting[q]) out << ' ' << q;
  out << "\n";
  for (int q = 0; q < state_count(); ++q) {
    out << "# state " << q << " = {";
    for (std::size_t i = 0; i < state_tags[q].size(); ++i)
      out << (i ? "," : "") << state_tags[q][i];
    out << "}\n";
  }
  for (int q = 0; q < state_count(); ++q)
    for (std::size_t li = 0; li < alphabet.size(); ++li)
      out << "TRANS " << q << " " << alphabet[li] << " " << trans[q][li] << "\n";
  return out.str();
}

std::string WordDFA::to_dot() const {
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int q = 0; q < state_count(); ++q) {
    out << "  q" << q << " [label=\"" << q << "\"";
    if (accepting[q]) out << ", shape=doublecircle";
    out << "];\n";
  }
  out << "  start [shape=point];\n  start -> q" << start << ";\n";
  for (int q = 0; q < state_count(); ++q)
    for (std::size_t li = 0; li < alphabet.size(); ++li)
      out << "  q" << q << " -> q" << trans[q][li] << " [label=\"" << alphabet[li]
          << "\"];\n";
  out << "}\n";
  return out.str();
}

WordDFA pi_automaton(const FiniteForestAlgebra& a, const LetterMap& lm,
                     const std::vector<int>& accept) {
  std::vector<bool> accept_set(a.h_size, false);
  for (int h : accept) {
    if (h < 0 || h >= a.h_size) throw std::invalid_argument("accept index out of range");
    accept_set[h] = true;
  }
  std::vector<int> realizable = realizable_h(a, lm);

  // A context value is good when some realizable top-level sibling value
  // completes it into an accepted forest value.
  std::vector<bool> good(a.v_size, false);
  for (int v = 0; v < a.v_size; ++v)
    for (int h0 : realizable)
      if (accept_set[a.plus(h0, a.action(v, a.zero_h))]) {
        good[v] = true;
        break;
      }

  WordDFA dfa;
  dfa.alphabet = lm.letters;
  std::map<std::vector<int>, int> state_index;
  auto intern = [&](std::vector<int> tag) {
    auto [it, fresh] = state_index.try_emplace(std::move(tag), dfa.state_count());
    if (fresh) {
      dfa.state_tags.push_back(it->first);
      dfa.accepting.push_back(false);
      dfa.trans.emplace_back();
    }
    return it->second;
  };
  dfa.start = intern({a.one_v});
  for (std::size_t q = 0; q < dfa.state_tags.size(); ++q) {
    std::vector<int> tag = dfa.state_tags[q];
    dfa.trans[q].assign(dfa.alphabet.size(), 0);
    for (std::size_t li = 0; li < dfa.alphabet.size(); ++li) {
      int lv = lm.at(dfa.alphabet[li]);
      std::set<int> next;
      for (int v : tag)
        for (int h : realizable) next.insert(a.times(v, a.times(lv, a.ins[h])));
      dfa.trans[q][li] = intern(std::vector<int>(next.begin(), next.end()));
    }
  }
  for (int q = 0; q < dfa.state_count(); ++q)
    for (int v : dfa.state_tags[q])
      if (good[v]) {
        dfa.accepting[q] = true;
        break;
      }
  return dfa;
}

std::set<Word> bounded_pi_oracle(const FiniteForestAlgebra& a, const LetterMap& lm,
                                 const std::vector<int>& accept, int max_height,
                                 int max_nodes, long long cap) {
  std::vector<bool> accept_set(a.h_size, false);
  for (int h : accept) accept_set[h] = true;
  std::set<Word> words;
  enumerate_forests(lm.letters, {max_height, max_nodes, cap}, [&](const Forest& f) {
    if (!accept_set[eval_forest(a, lm, f)]) return;
    const PathSet p = paths(f);
    words.insert(p.words().begin(), p.words().end());
  });
  return words;
}

// ---------------------------------------------------------------------------
// Engine

bool PsiValue::is_identity() const {
  if (bottom) return false;
  for (const auto& f : fam)
    if (!f.empty()) return false;
  return true;
}

namespace {

int mask_sum(const FiniteForestAlgebra& a, std::uint64_t mask) {
  int s = a.zero_h;
  for (int h = 0; h < a.h_size; ++h)
    if (mask & (1ULL << h)) s = a.plus(s, h);
  return s;
}

}  // namespace

bool psi_accepts(const FiniteForestAlgebra& a, const PsiValue& x, int h) {
  if (x.bottom) return false;
  bool any = false;
  std::uint64_t totals = 1ULL << a.zero_h;  // bitset of achievable value sums
  for (const auto& f : x.fam) {
    if (f.empty()) continue;
    any = true;
    std::uint64_t next = 0;
    for (int t = 0; t < a.h_size; ++t) {
      if (!(totals & (1ULL << t))) continue;
      for (std::uint64_t q : f) next |= 1ULL << a.plus(t, mask_sum(a, q));
    }
    totals = next;
  }
  return any && (totals & (1ULL << h));
}

PsiEngine::PsiEngine(FiniteForestAlgebra a, LetterMap lm, PsiEngineLimits limits)
    : algebra_(std::move(a)), letter_map_(std::move(lm)), limits_(limits) {
  if (algebra_.h_size > 64) throw EngineCapError("image engine requires |H| <= 64");
  letters_ = letter_map_.letters;
  intern(identity_value(), Node::kIdentity, -1, -1, -1);
}

int PsiEngine::letter_index(const Label& l) const {
  auto it = std::lower_bound(letters_.begin(), letters_.end(), l);
  if (it == letters_.end() || *it != l) throw std::out_of_range("unknown letter " + l);
  return static_cast<int>(it - letters_.begin());
}

PsiValue PsiEngine::identity_value() const {
  PsiValue v;
  v.fam.resize(letters_.size());
  return v;
}

PsiValue PsiEngine::bottom_value() const {
  PsiValue v;
  v.bottom = true;
  return v;
}

PsiValue PsiEngine::value_sum(const PsiValue& x, const PsiValue& y) const {
  if (x.bottom || y.bottom) return bottom_value();
  PsiValue out = identity_value();
  for (std::size_t li = 0; li < letters_.size(); ++li) {
    if (!x.fam[li].empty() && !y.fam[li].empty()) return bottom_value();
    out.fam[li] = x.fam[li].empty() ? y.fam[li] : x.fam[li];
  }
  return out;
}

PsiValue PsiEngine::apply_letter(const Label& l, const PsiValue& x) const {
  if (x.bottom) return bottom_value();
  const int li = letter_index(l);
  const int lv = letter_map_.at(l);

  // Achievable unions: one pick per nonempty component.
  std::vector<std::uint64_t> unions = {0};
  long long work = 0;
  for (const auto& f : x.fam) {
    if (f.empty()) continue;
    std::set<std::uint64_t> next;
    for (std::uint64_t u : unions)
      for (std::uint64_t p : f) {
        next.insert(u | p);
        if (++work > limits_.max_pick_products)
          throw EngineCapError("letter application exceeded pick-product cap");
      }
    unions.assign(next.begin(), next.end());
  }

  std::set<std::uint64_t> out_q;
  for (std::uint64_t u : unions) {
    const int k = std::popcount(u);
    if (k > limits_.max_union_bits)
      throw EngineCapError("letter application exceeded union-width cap");
    std::vector<int> bits;
    for (int h = 0; h < algebra_.h_size; ++h)
      if (u & (1ULL << h)) bits.push_back(h);

    // Value and expansion of every subset of u, peeling the lowest bit.
    std::vector<int> sum(1ULL << k);
    std::vector<std::uint64_t> expand(1ULL << k);
    sum[0] = algebra_.zero_h;
    expand[0] = 0;
    std::map<int, std::uint64_t> cover_union;  // value -> union of its subsets
    cover_union[algebra_.action(lv, algebra_.zero_h)] |= 0;
    for (std::uint64_t t = 1; t < (1ULL << k); ++t) {
      int low = std::countr_zero(t);
      sum[t] = algebra_.plus(bits[low], sum[t & (t - 1)]);
      expand[t] = expand[t & (t - 1)] | (1ULL << bits[low]);
      cover_union[algebra_.action(lv, sum[t])] |= expand[t];
    }

    std::vector<std::pair<int, std::uint64_t>> vals(cover_union.begin(), cover_union.end());
    if (static_cast<int>(vals.size()) > limits_.max_value_bits)
      throw EngineCapError("letter application exceeded value-width cap");
    for (std::uint64_t qm = 1; qm < (1ULL << vals.size()); ++qm) {
      std::uint64_t covered = 0, q_set = 0;
      for (std::size_t i = 0; i < vals.size(); ++i)
        if (qm & (1ULL << i)) {
          covered |= vals[i].second;
          q_set |= 1ULL << vals[i].first;
        }
      if (covered == u) out_q.insert(q_set);
    }
  }

  PsiValue out = identity_value();
  out.fam[li].assign(out_q.begin(), out_q.end());
  return out;
}

PsiValue PsiEngine::eval(const Forest& f) const {
  PsiValue v = identity_value();
  for (const Tree& t : f.trees())
    v = value_sum(v, apply_letter(t.label(), eval(t.children())));
  return v;
}

int PsiEngine::intern(PsiValue v, Node::Kind kind, int letter, int p1, int p2) {
  auto it = index_.find(v);
  if (it != index_.end()) return it->second;
  if (static_cast<int>(nodes_.size()) >= limits_.max_values)
    throw EngineCapError("reachable value cap exceeded");
  int idx = static_cast<int>(nodes_.size());
  index_.emplace(v, idx);
  values_.push_back(v);
  nodes_.push_back(Node{std::move(v), kind, letter, p1, p2});
  return idx;
}

void PsiEngine::step(std::size_t i) {
  for (std::size_t li = 0; li < letters_.size(); ++li) {
    PsiValue y = apply_letter(letters_[li], values_[i]);
    intern(std::move(y), Node::kLetter, static_cast<int>(li), static_cast<int>(i), -1);
  }
  for (std::size_t j = 0; j <= i; ++j) {
    PsiValue s = value_sum(values_[i], values_[j]);
    intern(std::move(s), Node::kSum, -1, static_cast<int>(i), static_cast<int>(j));
  }
}

const std::vector<PsiValue>& PsiEngine::reachable() {
  while (expanded_ < nodes_.size()) step(expanded_++);
  return values_;
}

int PsiEngine::find_common_acceptor(int h1, int h2) {
  std::size_t scanned = 0;
  for (;;) {
    for (; scanned < values_.size(); ++scanned)
      if (psi_accepts(algebra_, values_[scanned], h1) &&
          psi_accepts(algebra_, values_[scanned], h2))
        return static_cast<int>(scanned);
    if (expanded_ == nodes_.size()) return -1;
    step(expanded_++);
  }
}

std::map<int, int> PsiEngine::components(int value_index) {
  std::map<int, int> comp;
  std::vector<int> stack = {value_index};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    const Node& n = nodes_[v];
    switch (n.kind) {
      case Node::kIdentity:
        break;
      case Node::kLetter:
        if (comp.count(n.letter)) throw std::logic_error("duplicate letter component");
        comp[n.letter] = n.pred1;
        break;
      case Node::kSum:
        stack.push_back(n.pred1);
        stack.push_back(n.pred2);
        break;
    }
  }
  return comp;
}

Forest PsiEngine::reconstruct(int letter, int pred_index, std::uint64_t target_q) {
  const Label& alpha = letters_[letter];
  const int lv = letter_map_.at(alpha);
  const PsiValue& y = values_[pred_index];

  if (y.is_identity()) {
    std::uint64_t leaf_q = 1ULL << algebra_.action(lv, algebra_.zero_h);
    if (target_q != leaf_q) throw std::logic_error("leaf reconstruction mismatch");
    return Forest::of({Tree(alpha)});
  }

  std::map<int, int> comp = components(pred_index);
  std::vector<int> comp_letters;
  for (std::size_t li = 0; li < letters_.size(); ++li)
    if (!y.fam[li].empty()) comp_letters.push_back(static_cast<int>(li));

  // Search the pick vector whose union admits the target value set.
  std::vector<std::size_t> pick(comp_letters.size(), 0);
  for (;;) {
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < comp_letters.size(); ++i)
      u |= y.fam[comp_letters[i]][pick[i]];

    std::vector<int> bits;
    for (int h = 0; h < algebra_.h_size; ++h)
      if (u & (1ULL << h)) bits.push_back(h);
    const int k = static_cast<int>(bits.size());
    std::vector<int> sum(1ULL << k);
    std::vector<std::uint64_t> expand(1ULL << k);
    sum[0] = algebra_.zero_h;
    expand[0] = 0;
    std::map<int, std::uint64_t> cover_union;
    std::map<int, std::uint64_t> first_t;
    int leaf_value = algebra_.action(lv, algebra_.zero_h);
    cover_union[leaf_value] |= 0;
    first_t.emplace(leaf_value, 0);
    for (std::uint64_t t = 1; t < (1ULL << k); ++t) {
      int low = std::countr_zero(t);
      sum[t] = algebra_.plus(bits[low], sum[t & (t - 1)]);
      expand[t] = expand[t & (t - 1)] | (1ULL << bits[low]);
      int q = algebra_.action(lv, sum[t]);
      cover_union[q] |= expand[t];
      first_t.emplace(q, expand[t]);
    }

    bool feasible = true;
    std::uint64_t covered_max = 0;
    for (int h = 0; h < algebra_.h_size && feasible; ++h)
      if (target_q & (1ULL << h)) {
        auto it = cover_union.find(h);
        if (it == cover_union.end())
          feasible = false;
        else
          covered_max |= it->second;
      }
    if (feasible && covered_max == u) {
      // One subset per target value, then patch uncovered elements with
      // further subsets whose value stays inside the target.
      std::vector<std::uint64_t> cover;
      std::uint64_t covered = 0;
      for (int h = 0; h < algebra_.h_size; ++h)
        if (target_q & (1ULL << h)) {
          cover.push_back(first_t.at(h));
          covered |= first_t.at(h);
        }
      for (std::uint64_t t = 0; t < (1ULL << k) && covered != u; ++t) {
        int q = algebra_.action(lv, sum[t]);
        if ((target_q & (1ULL << q)) && (expand[t] & ~covered)) {
          cover.push_back(expand[t]);
          covered |= expand[t];
        }
      }
      if (covered != u) throw std::logic_error("cover patching failed");

      Forest pool;
      for (std::size_t i = 0; i < comp_letters.size(); ++i) {
        int li = comp_letters[i];
        Forest w = reconstruct(li, comp.at(li), y.fam[li][pick[i]]);
        pool = sum_forests(pool, w);
      }
      std::vector<std::pair<Tree, int>> tree_values;
      for (const Tree& t : pool.trees())
        tree_values.emplace_back(t, eval_forest(algebra_, letter_map_, Forest::of({t})));

      // Every pool tree lands in every cover element containing its value,
      // so the union of the children is the whole pool and paths are kept.
      std::vector<Tree> result;
      for (std::uint64_t tset : cover) {
        std::vector<Tree> kids;
        for (const auto& [t, hv] : tree_values)
          if (tset & (1ULL << hv)) kids.push_back(t);
        result.emplace_back(alpha, Forest::of(std::move(kids)));
      }
      return Forest::of(std::move(result));
    }

    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == y.fam[comp_letters[i]].size()) {
      pick[i] = 0;
      ++i;
    }
    if (i == pick.size()) throw std::logic_error("no pick achieves the target family");
  }
}

Forest PsiEngine::realize(int value_index, int h) {
  const PsiValue& x = values_[value_index];
  std::map<int, int> comp = components(value_index);
  std::vector<int> ls(comp.size());
  {
    std::size_t i = 0;
    for (const auto& [li, pred] : comp) {
      (void)pred;
      ls[i++] = li;
    }
  }
  // Choose one value set per component so the sums add up to h.
  struct Step {
    int prev_total;
    std::size_t pick;
  };
  std::vector<std::map<int, Step>> dp(ls.size() + 1);
  dp[0].emplace(algebra_.zero_h, Step{-1, 0});
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const auto& fam = x.fam[ls[k]];
    for (const auto& [t, _] : dp[k])
      for (std::size_t qi = 0; qi < fam.size(); ++qi)
        dp[k + 1].try_emplace(algebra_.plus(t, mask_sum(algebra_, fam[qi])), Step{t, qi});
  }
  auto it = dp[ls.size()].find(h);
  if (it == dp[ls.size()].end())
    throw std::logic_error("value does not accept the requested element");
  std::vector<std::size_t> picks(ls.size());
  int total = h;
  for (std::size_t k = ls.size(); k > 0; --k) {
    const Step& s = dp[k].at(total);
    picks[k - 1] = s.pick;
    total = s.prev_total;
  }
  Forest f;
  for (std::size_t k = 0; k < ls.size(); ++k)
    f = sum_forests(f, reconstruct(ls[k], comp.at(ls[k]), x.fam[ls[k]][picks[k]]));
  return f;
}

std::pair<Forest, Forest> PsiEngine::extract_witnesses(int value_index, int h1, int h2) {
  return {realize(value_index, h1), realize(value_index, h2)};
}

// ---------------------------------------------------------------------------
// Pair relation

namespace {

// Achievable value sets over covers of the value set w: Q is achievable iff
// every q in Q arises as lv·sum(S) for some S ⊆ w, and the union of all such
// S covers w.
std::vector<std::uint64_t> achievable_sets(const FiniteForestAlgebra& a, int lv,
                                           std::uint64_t w, const PsiEngineLimits& limits) {
  const int k = std::popcount(w);
  if (k > limits.max_union_bits)
    throw EngineCapError("cover analysis exceeded union-width cap");
  std::vector<int> bits;
  for (int h = 0; h < a.h_size; ++h)
    if (w & (1ULL << h)) bits.push_back(h);
  std::vector<int> sum(1ULL << k);
  std::vector<std::uint64_t> expand(1ULL << k);
  sum[0] = a.zero_h;
  expand[0] = 0;
  std::map<int, std::uint64_t> cover_union;
  cover_union[a.action(lv, a.zero_h)] |= 0;
  for (std::uint64_t t = 1; t < (1ULL << k); ++t) {
    int low = std::countr_zero(t);
    sum[t] = a.plus(bits[low], sum[t & (t - 1)]);
    expand[t] = expand[t & (t - 1)] | (1ULL << bits[low]);
    cover_union[a.action(lv, sum[t])] |= expand[t];
  }
  std::vector<std::pair<int, std::uint64_t>> vals(cover_union.begin(), cover_union.end());
  if (static_cast<int>(vals.size()) > limits.max_value_bits)
    throw EngineCapError("cover analysis exceeded value-width cap");
  std::vector<std::uint64_t> out;
  for (std::uint64_t qm = 1; qm < (1ULL << vals.size()); ++qm) {
    std::uint64_t covered = 0, q_set = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (qm & (1ULL << i)) {
        covered |= vals[i].second;
        q_set |= 1ULL << vals[i].first;
      }
    if (covered == w) out.push_back(q_set);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// A concrete cover of w realizing the value set target_q: one subset per
// target value, patched with further target-valued subsets until w is used up.
std::vector<std::uint64_t> build_cover(const FiniteForestAlgebra& a, int lv,
                                       std::uint64_t w, std::uint64_t target_q) {
  const int k = std::popcount(w);
  std::vector<int> bits;
  for (int h = 0; h < a.h_size; ++h)
    if (w & (1ULL << h)) bits.push_back(h);
  std::vector<int> sum(1ULL << k);
  std::vector<std::uint64_t> expand(1ULL << k);
  sum[0] = a.zero_h;
  expand[0] = 0;
  std::map<int, std::uint64_t> first_t;
  first_t.emplace(a.action(lv, a.zero_h), 0);
  for (std::uint64_t t = 1; t < (1ULL << k); ++t) {
    int low = std::countr_zero(t);
    sum[t] = a.plus(bits[low], sum[t & (t - 1)]);
    expand[t] = expand[t & (t - 1)] | (1ULL << bits[low]);
    first_t.emplace(a.action(lv, sum[t]), expand[t]);
  }
  std::vector<std::uint64_t> cover;
  std::uint64_t covered = 0;
  for (int h = 0; h < a.h_size; ++h)
    if (target_q & (1ULL << h)) {
      cover.push_back(first_t.at(h));
      covered |= first_t.at(h);
    }
  for (std::uint64_t t = 0; t < (1ULL << k) && covered != w; ++t) {
    int q = a.action(lv, sum[t]);
    if ((target_q & (1ULL << q)) && (expand[t] & ~covered)) {
      cover.push_back(expand[t]);
      covered |= expand[t];
    }
  }
  if (covered != w) throw std::logic_error("cover construction failed");
  return cover;
}

// One level of witness assembly: every tree of the pool goes below every
// cover element containing its value, so the child union is the whole pool
// and the level's paths depend only on the pool.
Forest assemble_level(const FiniteForestAlgebra& a, const LetterMap& lm,
                      const Label& alpha, const Forest& pool,
                      const std::vector<std::uint64_t>& cover) {
  std::vector<std::pair<Tree, int>> tree_values;
  for (const Tree& t : pool.trees())
    tree_values.emplace_back(t, eval_forest(a, lm, Forest::of({t})));
  std::vector<Tree> result;
  for (std::uint64_t tset : cover) {
    std::vector<Tree> kids;
    for (const auto& [t, hv] : tree_values)
      if (tset & (1ULL << hv)) kids.push_back(t);
    result.emplace_back(alpha, Forest::of(std::move(kids)));
  }
  return Forest::of(std::move(result));
}

}  // namespace

PairRelation::PairRelation(FiniteForestAlgebra a, LetterMap lm, PsiEngineLimits limits)
    : algebra_(std::move(a)), letter_map_(std::move(lm)), limits_(limits) {
  if (algebra_.h_size > 64) throw EngineCapError("pair relation requires |H| <= 64");
  // Letters sharing a context type contribute the same transitions; the
  // first letter stands in for the class when rebuilding witnesses.
  std::set<int> seen_v;
  for (std::size_t li = 0; li < letter_map_.letters.size(); ++li) {
    int v = letter_map_.at(letter_map_.letters[li]);
    if (seen_v.insert(v).second) scan_letters_.emplace_back(v, static_cast<int>(li));
  }
  intern(0, 0, Node::kEmpty, -1, -1, -1);
}

int PairRelation::intern(std::uint64_t u1, std::uint64_t u2, Node::Kind kind, int p1,
                         int p2, int letter) {
  auto it = index_.find({u1, u2});
  if (it != index_.end()) return it->second;
  if (static_cast<int>(nodes_.size()) >= limits_.max_values)
    throw EngineCapError("pair relation cap exceeded");
  int idx = static_cast<int>(nodes_.size());
  index_.emplace(std::make_pair(u1, u2), idx);
  nodes_.push_back(Node{u1, u2, mask_sum(algebra_, u1), mask_sum(algebra_, u2), kind,
                        p1, p2, letter});
  frontier_.emplace(std::popcount(u1) + std::popcount(u2), idx);
  return idx;
}

const std::vector<std::uint64_t>& PairRelation::achieve(int v, std::uint64_t w) {
  auto it = achieve_memo_.find({v, w});
  if (it != achieve_memo_.end()) return it->second;
  auto sets = achievable_sets(algebra_, v, w, limits_);
  return achieve_memo_.emplace(std::make_pair(v, w), std::move(sets)).first->second;
}

bool PairRelation::expand_next() {
  if (frontier_.empty()) {
    complete_ = true;
    return false;
  }
  // Lightest pair first, so small witnesses surface before the union
  // closure of heavy pairs piles up. Every unordered pair of nodes gets
  // unioned when its later-scanned member comes up, so the fixpoint is the
  // full union closure.
  int cur_idx = frontier_.begin()->second;
  frontier_.erase(frontier_.begin());
  const Node cur = nodes_[cur_idx];
  std::size_t present = nodes_.size();
  for (std::size_t j = 0; j < present; ++j)
    intern(nodes_[j].u1 | cur.u1, nodes_[j].u2 | cur.u2, Node::kUnion,
           static_cast<int>(j), cur_idx, -1);
  for (auto [lv, li] : scan_letters_) {
    const auto& a1 = achieve(lv, cur.u1);
    const auto& a2 = achieve(lv, cur.u2);
    if (static_cast<long long>(a1.size()) * static_cast<long long>(a2.size()) >
        limits_.max_pick_products)
      throw EngineCapError("pair relation letter step exceeded product cap");
    for (std::uint64_t q1 : a1)
      for (std::uint64_t q2 : a2)
        intern(q1, q2, Node::kLetter, cur_idx, -1, li);
  }
  return true;
}

void PairRelation::close() {
  while (expand_next()) {
  }
}

int PairRelation::find_pair(int h1, int h2) { return find_any({{h1, h2}}); }

int PairRelation::find_any(const std::vector<std::pair<int, int>>& targets) {
  std::set<std::pair<int, int>> want(targets.begin(), targets.end());
  std::size_t checked = 0;
  for (;;) {
    for (; checked < nodes_.size(); ++checked)
      if (want.count({nodes_[checked].sum1, nodes_[checked].sum2}))
        return static_cast<int>(checked);
    if (!expand_next()) return -1;
  }
}

std::pair<Forest, Forest> PairRelation::extract(int index) {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case Node::kEmpty:
      return {Forest(), Forest()};
    case Node::kUnion: {
      auto [x1, x2] = extract(n.pred1);
      auto [y1, y2] = extract(n.pred2);
      return {sum_forests(x1, y1), sum_forests(x2, y2)};
    }
    case Node::kLetter: {
      auto [g1, g2] = extract(n.pred1);
      const Label& alpha = letter_map_.letters[n.letter];
      int lv = letter_map_.at(alpha);
      auto cover1 = build_cover(algebra_, lv, nodes_[n.pred1].u1, n.u1);
      auto cover2 = build_cover(algebra_, lv, nodes_[n.pred1].u2, n.u2);
      return {assemble_level(algebra_, letter_map_, alpha, g1, cover1),
              assemble_level(algebra_, letter_map_, alpha, g2, cover2)};
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Intersection

IntersectResult paths_intersect(const FiniteForestAlgebra& a, const LetterMap& lm,
                                int h1, int h2, const PathIntersectOptions& opt) {
  if (h1 < 0 || h1 >= a.h_size || h2 < 0 || h2 >= a.h_size)
    throw std::invalid_argument("h index out of range");
  IntersectResult r;
  std::vector<int> real = realizable_h(a, lm);
  auto realized = [&](int h) { return std::binary_search(real.begin(), real.end(), h); };
  if (!realized(h1) || !realized(h2)) {
    r.verdict = Ternary::kFalse;
    r.note = "value not realized by any forest";
    return r;
  }
  if (h1 == h2 && !opt.want_witness) {
    r.verdict = Ternary::kTrue;
    r.note = "identical values share every realizing path set";
    return r;
  }
  if (opt.use_reflection) {
    Morphism refl = distributive_reflection(a);
    if (refl.h_map[h1] != refl.h_map[h2]) {
      r.verdict = Ternary::kFalse;
      r.note = "separated by the finest distributive quotient";
      return r;
    }
  }
  try {
    PairRelation rel(a, lm, opt.limits);
    int idx = rel.find_pair(h1, h2);
    if (idx < 0) {
      r.verdict = Ternary::kFalse;
      r.note = "no realized pair of equal path sets";
      return r;
    }
    r.verdict = Ternary::kTrue;
    r.note = "realized pair of equal path sets found";
    if (opt.want_witness) {
      auto [f1, f2] = rel.extract(idx);
      if (paths(f1) != paths(f2) || eval_forest(a, lm, f1) != h1 ||
          eval_forest(a, lm, f2) != h2)
        throw std::logic_error("witness extraction produced an invalid pair");
      r.witness = std::make_pair(std::move(f1), std::move(f2));
    }
    return r;
  } catch (const EngineCapError& e) {
    r.verdict = Ternary::kInconclusive;
    r.note = e.what();
    return r;
  }
}

IntersectResult paths_intersect_sets(const FiniteForestAlgebra& a, const LetterMap& lm,
                                     const std::vector<int>& hs1,
                                     const std::vector<int>& hs2,
                                     const PathIntersectOptions& opt) {
  IntersectResult r;
  std::vector<bool> s1(a.h_size, false), s2(a.h_size, false);
  for (int h : hs1) s1.at(h) = true;
  for (int h : hs2) s2.at(h) = true;
  try {
    PairRelation rel(a, lm, opt.limits);
    rel.close();
    for (int x = 0; x < a.h_size; ++x) {
      if (!s1[x]) continue;
      for (int y = 0; y < a.h_size; ++y) {
        if (!s2[y]) continue;
        int idx = rel.find_pair(x, y);
        if (idx >= 0) {
          r.verdict = Ternary::kTrue;
          r.note = "realized pair of equal path sets found";
          if (opt.want_witness) {
            auto [f1, f2] = rel.extract(idx);
            if (paths(f1) != paths(f2)) throw std::logic_error("invalid witness");
            r.witness = std::make_pair(std::move(f1), std::move(f2));
          }
          return r;
        }
      }
    }
    r.verdict = Ternary::kFalse;
    r.note = "no realized pair of equal path sets";
    return r;
  } catch (const EngineCapError& e) {
    r.verdict = Ternary::kInconclusive;
    r.note = e.what();
    return r;
  }
}

// ---------------------------------------------------------------------------
// Bounded common path sets

std::set<PathSet> bounded_common_pathsets(const FiniteForestAlgebra& a,
                                          const LetterMap& lm,
                                          const std::vector<Rule>& r_rules,
                                          const std::vector<Rule>& s_rules,
                                          int max_height, int max_nodes,
                                          long long cap) {
  std::set<Rule> r_set(r_rules.begin(), r_rules.end());
  std::set<Rule> s_set(s_rules.begin(), s_rules.end());

  auto tree_rule = [&](const Tree& t) {
    Rule rule;
    rule.label = t.label();
    std::set<int> kids;
    for (const Tree& c : t.children().trees())
      kids.insert(eval_forest(a, lm, Forest::of({c})));
    rule.children.assign(kids.begin(), kids.end());
    rule.result = eval_forest(a, lm, Forest::of({t}));
    return rule;
  };

  // Bucket by normal form; path sets realized on both sides survive.
  std::map<Forest, std::pair<bool, bool>> buckets;
  enumerate_forests(lm.letters, {max_height, max_nodes, cap}, [&](const Forest& f) {
    if (f.empty()) return;
    bool in_r = true, in_s = true;
    for (const Tree& t : f.trees()) {
      Rule rule = tree_rule(t);
      if (in_r && !r_set.count(rule)) in_r = false;
      if (in_s && !s_set.count(rule)) in_s = false;
      if (!in_r && !in_s) return;
    }
    auto& flags = buckets[psi(f)];
    flags.first |= in_r;
    flags.second |= in_s;
  });

  std::set<PathSet> out;
  for (const auto& [nf, flags] : buckets)
    if (flags.first && flags.second) out.insert(paths(nf));
  return out;
}

}  // namespace forestalg
