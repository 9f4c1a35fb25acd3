#include "forestalg/twodist.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace forestalg {

LetterMap canonical_self_morphism(const FiniteForestAlgebra& a) {
  std::map<Label, int> m;
  for (int v = 0; v < a.v_size; ++v) m["v" + std::to_string(v)] = v;
  return LetterMap::of(m);
}

std::string TwoDistVerdict::to_string(const FiniteForestAlgebra& a) const {
  std::ostringstream out;
  switch (answer) {
    case TwoDistAnswer::kYes: {
      out << "2-distributive: yes\n";
      if (pairs_listed) {
        out << "intersecting pairs checked:";
        for (const auto& [x, y] : intersecting_pairs) out << " (" << x << "," << y << ")";
        out << "\n";
      }
      break;
    }
    case TwoDistAnswer::kNo:
      out << "2-distributive: no\n";
      if (!horizontal_failure.empty()) {
        out << "horizontal precondition fails: " << horizontal_failure << "\n";
      } else {
        out << "certificate: v=" << a.v_name(v) << " h1=" << a.h_name(h1)
            << " h2=" << a.h_name(h2) << "\n";
        if (witness) {
          out << "witness f1: " << render(witness->first) << "\n";
          out << "witness f2: " << render(witness->second) << "\n";
        }
      }
      break;
    case TwoDistAnswer::kInconclusive:
      out << "2-distributive: inconclusive\n";
      break;
  }
  if (!note.empty()) out << "note: " << note << "\n";
  return out.str();
}

TwoDistVerdict is_2_distributive(const FiniteForestAlgebra& a, const TwoDistOptions& opt) {
  TwoDistVerdict verdict;
  HorizontalVerdict hv = check_horizontal(a);
  if (!hv.ok()) {
    verdict.answer = TwoDistAnswer::kNo;
    verdict.horizontal_failure = hv.counterexample;
    return verdict;
  }

  // The law only matters on pairs where it can fail.
  struct Violation {
    int h1, h2, v;
  };
  std::vector<Violation> violations;
  for (int x = 0; x < a.h_size; ++x)
    for (int y = x; y < a.h_size; ++y)
      for (int v = 0; v < a.v_size; ++v)
        if (a.action(v, a.plus(x, y)) != a.plus(a.action(v, x), a.action(v, y))) {
          violations.push_back({x, y, v});
          break;
        }

  LetterMap canon = canonical_self_morphism(a);
  Morphism refl = distributive_reflection(a);

  // Pairs the quotient certificate cannot settle share one relation run;
  // a single match ends the search, so target order does not matter.
  std::vector<Violation> pending;
  for (const Violation& vio : violations)
    if (refl.h_map[vio.h1] == refl.h_map[vio.h2]) pending.push_back(vio);

  if (!pending.empty()) {
    std::vector<std::pair<int, int>> targets;
    for (const Violation& vio : pending) targets.emplace_back(vio.h1, vio.h2);
    try {
      PairRelation rel(a, canon, opt.limits);
      int idx = rel.find_any(targets);
      if (idx >= 0) {
        auto [f1, f2] = rel.extract(idx);
        int s1 = eval_forest(a, canon, f1), s2 = eval_forest(a, canon, f2);
        const Violation* hit = nullptr;
        for (const Violation& vio : pending)
          if (vio.h1 == s1 && vio.h2 == s2) hit = &vio;
        if (!hit || paths(f1) != paths(f2))
          throw std::logic_error("witness extraction produced an invalid pair");
        verdict.answer = TwoDistAnswer::kNo;
        verdict.v = hit->v;
        verdict.h1 = hit->h1;
        verdict.h2 = hit->h2;
        if (opt.want_witness)
          verdict.witness = std::make_pair(std::move(f1), std::move(f2));
        return verdict;
      }
    } catch (const EngineCapError& e) {
      verdict.answer = TwoDistAnswer::kInconclusive;
      verdict.note = e.what();
      return verdict;
    }
  }

  verdict.answer = TwoDistAnswer::kYes;
  if (opt.list_intersecting_pairs && a.h_size <= opt.pair_listing_h_limit) {
    try {
      PairRelation rel(a, canon, opt.limits);
      rel.close();
      for (int x = 0; x < a.h_size; ++x)
        for (int y = x; y < a.h_size; ++y)
          if (rel.find_pair(x, y) >= 0) verdict.intersecting_pairs.emplace_back(x, y);
      verdict.pairs_listed = true;
    } catch (const EngineCapError&) {
      verdict.note = "intersecting-pair listing skipped (relation cap)";
    }
  }
  return verdict;
}

std::string replay_certificate(const FiniteForestAlgebra& a, const TwoDistVerdict& verdict) {
  if (verdict.answer != TwoDistAnswer::kNo) return "not a no-verdict";
  if (!verdict.horizontal_failure.empty()) {
    HorizontalVerdict hv = check_horizontal(a);
    return hv.ok() ? "horizontal failure does not replay" : "";
  }
  if (a.action(verdict.v, a.plus(verdict.h1, verdict.h2)) ==
      a.plus(a.action(verdict.v, verdict.h1), a.action(verdict.v, verdict.h2)))
    return "law violation does not replay";
  if (verdict.witness) {
    LetterMap canon = canonical_self_morphism(a);
    const Forest& f1 = verdict.witness->first;
    const Forest& f2 = verdict.witness->second;
    if (paths(f1) != paths(f2)) return "witness path sets differ";
    if (eval_forest(a, canon, f1) != verdict.h1) return "witness f1 evaluates wrongly";
    if (eval_forest(a, canon, f2) != verdict.h2) return "witness f2 evaluates wrongly";
    Context c({{Forest(), "v" + std::to_string(verdict.v)}}, Forest());
    int lhs = eval_forest(a, canon, apply_context(c, sum_forests(f1, f2)));
    int rhs = a.plus(eval_forest(a, canon, apply_context(c, f1)),
                     eval_forest(a, canon, apply_context(c, f2)));
    if (lhs == rhs) return "free-algebra realization does not separate";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Bounded congruence oracle

namespace {

constexpr int kMaxSplitChildren = 6;

// All forests one merge or split away: two same-label siblings whose child
// forests have equal path sets collapse into one node, or one node splits
// into two covering parts with equal path sets. Applied at every position.
void rewrite_neighbors(const Forest& f, std::vector<Forest>& out) {
  const auto& trees = f.trees();
  for (std::size_t i = 0; i < trees.size(); ++i)
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      if (trees[i].label() != trees[j].label()) continue;
      if (paths(trees[i].children()) != paths(trees[j].children())) continue;
      std::vector<Tree> rest;
      for (std::size_t k = 0; k < trees.size(); ++k)
        if (k != i && k != j) rest.push_back(trees[k]);
      rest.emplace_back(trees[i].label(),
                        sum_forests(trees[i].children(), trees[j].children()));
      out.push_back(Forest::of(std::move(rest)));
    }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const Forest& kids = trees[i].children();
    int n = kids.tree_count();
    if (n == 0 || n > kMaxSplitChildren) continue;
    // Each child goes left, right, or both; the parts cover the child set.
    std::vector<int> assign(n, 0);
    for (;;) {
      std::size_t pos = 0;
      while (pos < assign.size() && ++assign[pos] == 3) {
        assign[pos] = 0;
        ++pos;
      }
      if (pos == assign.size()) break;
      std::vector<Tree> left, right;
      for (int k = 0; k < n; ++k) {
        if (assign[k] != 1) left.push_back(kids.trees()[k]);
        if (assign[k] != 0) right.push_back(kids.trees()[k]);
      }
      Forest c1 = Forest::of(std::move(left));
      Forest c2 = Forest::of(std::move(right));
      if (c1 == kids && c2 == kids) continue;  // idempotent no-op
      if (paths(c1) != paths(c2)) continue;
      std::vector<Tree> rest;
      for (std::size_t k = 0; k < trees.size(); ++k)
        if (k != i) rest.push_back(trees[k]);
      rest.emplace_back(trees[i].label(), std::move(c1));
      rest.emplace_back(trees[i].label(), std::move(c2));
      out.push_back(Forest::of(std::move(rest)));
    }
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    std::vector<Forest> inner;
    rewrite_neighbors(trees[i].children(), inner);
    for (Forest& c : inner) {
      std::vector<Tree> rest;
      for (std::size_t k = 0; k < trees.size(); ++k)
        if (k != i) rest.push_back(trees[k]);
      rest.emplace_back(trees[i].label(), std::move(c));
      out.push_back(Forest::of(std::move(rest)));
    }
  }
}

}  // namespace

SimkAnswer simk_oracle(const Forest& f, const Forest& g, int k, long long budget) {
  if (k != 1 && k != 2) throw std::invalid_argument("k must be 1 or 2");
  if (k == 1)
    return paths(f) == paths(g) ? SimkAnswer::kProvenEquivalent : SimkAnswer::kNotProven;

  if (f == g) return SimkAnswer::kProvenEquivalent;
  std::set<Forest> seen = {f};
  std::deque<Forest> queue = {f};
  while (!queue.empty() && static_cast<long long>(seen.size()) < budget) {
    Forest cur = std::move(queue.front());
    queue.pop_front();
    std::vector<Forest> next;
    rewrite_neighbors(cur, next);
    for (Forest& n : next) {
      if (n == g) return SimkAnswer::kProvenEquivalent;
      if (seen.insert(n).second) {
        if (static_cast<long long>(seen.size()) >= budget) break;
        queue.push_back(std::move(n));
      }
    }
  }
  return SimkAnswer::kNotProven;
}

}  // namespace forestalg
