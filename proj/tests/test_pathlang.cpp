#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "forestalg/pathlang.hpp"
#include "test_util.hpp"

using namespace forestalg;
using fatest::make_bool_or;
using fatest::make_one_element;

namespace {

// The canonical self-morphism of bool-or: one letter per context type.
LetterMap bool_or_canonical(const fatest::RowAlgebra& bo) {
  return LetterMap::of({{"id", bo.letter_map.at("id")},
                        {"c0", bo.letter_map.at("c0")},
                        {"c1", bo.letter_map.at("c1")}});
}

std::vector<Word> all_words(const std::vector<Label>& alphabet, int max_len) {
  std::vector<Word> out = {{}};
  std::size_t from = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t upto = out.size();
    (void)upto;
    std::vector<Word> fresh;
    for (std::size_t i = from; i < out.size(); ++i)
      for (const Label& l : alphabet) {
        Word w = out[i];
        w.push_back(l);
        fresh.push_back(std::move(w));
      }
    from = out.size();
    for (auto& w : fresh) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

TEST_CASE("pi automaton: accept-all-of-H and empty accept") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);

  auto dfa_empty = pi_automaton(bo.algebra, lm, {});
  for (const Word& w : all_words(lm.letters, 3)) CHECK(!dfa_empty.accepts(w));

  // accept = {1}: every path extends to a forest that also has a c1 root.
  auto dfa_one = pi_automaton(bo.algebra, lm, {1});
  for (const Word& w : all_words(lm.letters, 4)) CHECK(dfa_one.accepts(w));
}

TEST_CASE("pi automaton for accept={0} matches the prefix condition") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  auto dfa = pi_automaton(bo.algebra, lm, {0});
  // A word survives iff it has no prefix of the form id^k c1.
  auto bad = [&](const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == "c1") return true;
      if (w[i] != "id") return false;
    }
    return false;
  };
  for (const Word& w : all_words(lm.letters, 4)) CHECK(dfa.accepts(w) == !bad(w));
}

TEST_CASE("pi automaton vs bounded oracle on small fixtures") {
  auto bo = make_bool_or();
  auto one = make_one_element();
  struct Fixture {
    const FiniteForestAlgebra& a;
    LetterMap lm;
    std::vector<int> accept;
  };
  LetterMap canon = bool_or_canonical(bo);
  std::vector<Fixture> fixtures = {
      {bo.algebra, canon, {1}},
      {bo.algebra, canon, {0}},
      {bo.algebra, canon, {0, 1}},
      {bo.algebra, LetterMap::of({{"a", bo.letter_map.at("c1")}}), {1}},
      {bo.algebra, LetterMap::of({{"a", bo.letter_map.at("c1")}, {"b", bo.letter_map.at("id")}}), {0}},
      {one.algebra, LetterMap::of({{"a", 0}}), {0}},
  };
  for (const auto& fx : fixtures) {
    auto dfa = pi_automaton(fx.a, fx.lm, fx.accept);
    auto oracle = bounded_pi_oracle(fx.a, fx.lm, fx.accept, 4, 6);
    for (const Word& w : oracle) CHECK(dfa.accepts(w));
    // Every short accepted word is realized within the oracle bounds.
    for (const Word& w : all_words(fx.lm.letters, 3))
      if (dfa.accepts(w)) CHECK(oracle.count(w) == 1);
  }
}

TEST_CASE("oracle contains the expected short words") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  auto oracle = bounded_pi_oracle(bo.algebra, lm, {1}, 2, 4);
  CHECK(oracle.count({"c1"}) == 1);
  CHECK(oracle.count({"id", "c1"}) == 1);
  CHECK(bounded_pi_oracle(bo.algebra, lm, {}, 3, 4).empty());
}

TEST_CASE("engine: letter application on the identity value") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  PsiEngine engine(bo.algebra, lm);
  PsiValue id = engine.identity_value();
  PsiValue x = engine.apply_letter("c1", id);
  int li = engine.letter_index("c1");
  for (int other = 0; other < static_cast<int>(lm.letters.size()); ++other)
    if (other != li) CHECK(x.fam[other].empty());
  // Only cover of the empty union is by empty subsets: Q = {c1·0} = {1}.
  CHECK(x.fam[li] == std::vector<std::uint64_t>{1ULL << 1});

  CHECK(engine.apply_letter("id", engine.bottom_value()).bottom);
}

TEST_CASE("engine: sums") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  PsiEngine engine(bo.algebra, lm);
  PsiValue id = engine.identity_value();
  PsiValue x = engine.apply_letter("c1", id);
  PsiValue y = engine.apply_letter("id", id);
  CHECK(engine.value_sum(id, x) == x);
  CHECK(engine.value_sum(x, id) == x);
  CHECK(engine.value_sum(x, x).bottom);  // overlapping nonempty support
  PsiValue z = engine.value_sum(x, y);
  CHECK(!z.bottom);
  CHECK(z.fam[engine.letter_index("c1")] == x.fam[engine.letter_index("c1")]);
  CHECK(z.fam[engine.letter_index("id")] == y.fam[engine.letter_index("id")]);
  CHECK(engine.value_sum(x, y) == engine.value_sum(y, x));
}

TEST_CASE("psi_accepts") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  PsiEngine engine(bo.algebra, lm);
  CHECK(!psi_accepts(bo.algebra, engine.identity_value(), 0));
  CHECK(!psi_accepts(bo.algebra, engine.bottom_value(), 1));
  PsiValue x = engine.apply_letter("c1", engine.identity_value());
  CHECK(psi_accepts(bo.algebra, x, 1));
  CHECK(!psi_accepts(bo.algebra, x, 0));
  // Mixed-letter picks: {c0, c1} reconstructs with value 0 + 1 = 1.
  PsiValue y = engine.eval(parse_forest("c0,c1"));
  CHECK(psi_accepts(bo.algebra, y, 1));
  CHECK(!psi_accepts(bo.algebra, y, 0));
}

TEST_CASE("engine membership matches direct normal-form membership") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  PsiEngine engine(bo.algebra, lm);

  // realized normal forms with their achievable values, within slack bounds
  std::map<Forest, std::set<int>> nf_values;
  for (const Forest& g : enumerate_forests_vec(lm.letters, {3, 6, 2'000'000}))
    nf_values[psi(g)].insert(eval_forest(bo.algebra, lm, g));

  for (const Forest& f : enumerate_forests_vec(lm.letters, {3, 4, 2'000'000})) {
    if (f.empty()) continue;
    PsiValue x = engine.eval(f);
    for (int h = 0; h < bo.algebra.h_size; ++h) {
      bool direct = f == psi(f) && nf_values.count(f) && nf_values[f].count(h);
      CHECK(psi_accepts(bo.algebra, x, h) == direct);
    }
  }
}

TEST_CASE("reachable set is a fixpoint") {
  auto one = make_one_element();
  LetterMap lm = LetterMap::of({{"a", 0}});
  PsiEngine engine(one.algebra, lm);
  const auto& reach = engine.reachable();
  CHECK(reach.size() >= 3);  // identity, the leaf value, bottom at least
  std::set<PsiValue> rset(reach.begin(), reach.end());
  CHECK(rset.count(engine.identity_value()) == 1);
  CHECK(rset.count(engine.bottom_value()) == 1);
  for (const PsiValue& v : reach) {
    CHECK(rset.count(engine.apply_letter("a", v)) == 1);
    for (const PsiValue& w : reach) CHECK(rset.count(engine.value_sum(v, w)) == 1);
  }
}

TEST_CASE("paths_intersect on bool-or: distinct values have disjoint images") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  auto r01 = paths_intersect(bo.algebra, lm, 0, 1);
  CHECK(r01.verdict == Ternary::kFalse);
  auto r10 = paths_intersect(bo.algebra, lm, 1, 0);
  CHECK(r10.verdict == Ternary::kFalse);
  CHECK(paths_intersect(bo.algebra, lm, 1, 1).verdict == Ternary::kTrue);
  CHECK(paths_intersect(bo.algebra, lm, 0, 0).verdict == Ternary::kTrue);

  // The engine route agrees with the reflection shortcut.
  PathIntersectOptions no_refl;
  no_refl.use_reflection = false;
  CHECK(paths_intersect(bo.algebra, lm, 0, 1, no_refl).verdict == Ternary::kFalse);
}

TEST_CASE("paths_intersect: unrealized values have empty path images") {
  auto bo = make_bool_or();
  LetterMap lm = LetterMap::of({{"a", bo.letter_map.at("c0")}});  // only 0 realizable
  auto r = paths_intersect(bo.algebra, lm, 1, 1);
  CHECK(r.verdict == Ternary::kFalse);
  CHECK(paths_intersect(bo.algebra, lm, 0, 0).verdict == Ternary::kTrue);
}

TEST_CASE("paths_intersect reports caps as inconclusive") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  PathIntersectOptions opt;
  opt.use_reflection = false;
  opt.limits.max_values = 2;
  auto r = paths_intersect(bo.algebra, lm, 0, 1, opt);
  CHECK(r.verdict == Ternary::kInconclusive);
  CHECK(!r.note.empty());
}

TEST_CASE("bounded common path sets") {
  auto bo = make_bool_or();
  int c1 = bo.letter_map.at("c1"), id = bo.letter_map.at("id");
  LetterMap lm = LetterMap::of({{"a", c1}, {"b", id}});
  auto rules = enumerate_rules(bo.algebra, lm);

  // R = S = all rules: one pathset per enumerated nonempty forest.
  auto everything = bounded_common_pathsets(bo.algebra, lm, rules, rules, 2, 4);
  std::set<PathSet> expected;
  for (const Forest& f : enumerate_forests_vec(lm.letters, {2, 4, 100000}))
    if (!f.empty()) expected.insert(paths(f));
  CHECK(everything == expected);

  // Disjoint root labels: no common pathsets.
  std::vector<Rule> only_a, only_b;
  for (const Rule& r : rules) (r.label == "a" ? only_a : only_b).push_back(r);
  CHECK(bounded_common_pathsets(bo.algebra, lm, only_a, only_b, 3, 5).empty());

  // Specific rule pair with different top labels.
  std::vector<Rule> r1 = {Rule{1, "a", {}}};
  std::vector<Rule> s1 = {Rule{1, "b", {1}}};
  CHECK(bounded_common_pathsets(bo.algebra, lm, r1, s1, 3, 5).empty());
}

TEST_CASE("dfa text and dot output") {
  auto bo = make_bool_or();
  LetterMap lm = bool_or_canonical(bo);
  auto dfa = pi_automaton(bo.algebra, lm, {0});
  std::string text = dfa.to_text();
  CHECK(text.find("DFA\n") == 0);
  CHECK(text.find("STATES") != std::string::npos);
  CHECK(text.find("TRANS") != std::string::npos);
  std::string dot = dfa.to_dot();
  CHECK(dot.find("digraph") == 0);
}
