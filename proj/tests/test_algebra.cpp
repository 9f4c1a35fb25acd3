#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "forestalg/algebra.hpp"
#include "test_util.hpp"

#include <sstream>

using namespace forestalg;
using fatest::make_bool_or;
using fatest::make_one_element;
using fatest::make_sibling_pair_detector;

TEST_CASE("bool-or validates on all seven axioms") {
  auto bo = make_bool_or();
  auto report = validate_algebra(bo.algebra);
  CHECK(report.ok());
  CHECK(report.axioms.size() == 7);
  CHECK(bo.algebra.h_size == 2);
  CHECK(bo.algebra.v_size == 3);
}

TEST_CASE("faithfulness failure carries a witness") {
  auto bo = make_bool_or();
  FiniteForestAlgebra a = bo.algebra;
  int c0 = bo.letter_map.at("c0"), c1 = bo.letter_map.at("c1");
  a.act[c1] = a.act[c0];  // duplicate the action row
  auto report = validate_algebra(a);
  CHECK(!report.ok());
  bool found = false;
  for (const auto& ax : report.axioms)
    if (ax.axiom == "faithful") {
      found = true;
      CHECK(!ax.pass);
      CHECK(!ax.counterexample.empty());
    }
  CHECK(found);
}

TEST_CASE("action-law break is detected with a triple witness") {
  auto bo = make_bool_or();
  FiniteForestAlgebra a = bo.algebra;
  int c1 = bo.letter_map.at("c1");
  a.act[c1][0] = 0;  // now c1 is inconsistent with mul
  auto report = validate_algebra(a);
  CHECK(!report.ok());
  bool action_failed = false;
  for (const auto& ax : report.axioms)
    if (!ax.pass && (ax.axiom == "action-law" || ax.axiom == "insertion" ||
                     ax.axiom == "faithful"))
      action_failed = true;
  CHECK(action_failed);
}

TEST_CASE("malformed tables throw TableError, distinct from axiom failure") {
  auto bo = make_bool_or();
  FiniteForestAlgebra a = bo.algebra;
  a.add[0][0] = 99;
  CHECK_THROWS_AS(validate_algebra(a), TableError);
  FiniteForestAlgebra b = bo.algebra;
  b.act.pop_back();
  CHECK_THROWS_AS(validate_algebra(b), TableError);
}

TEST_CASE("check_horizontal") {
  CHECK(check_horizontal(make_bool_or().algebra).ok());
  CHECK(check_horizontal(make_one_element().algebra).ok());

  // Z/2 under xor: not idempotent.
  RowAlgebraSpec z2;
  z2.h_size = 2;
  z2.zero_h = 0;
  z2.add = {{0, 1}, {1, 0}};
  z2.restrict_to_reachable = false;
  auto a = build_row_algebra(z2);
  CHECK(validate_algebra(a.algebra).ok());
  auto verdict = check_horizontal(a.algebra);
  CHECK(!verdict.idempotent);
  CHECK(verdict.counterexample == "h+h != h at h=1");
}

TEST_CASE("evaluation of forests and contexts") {
  auto bo = make_bool_or();
  const auto& a = bo.algebra;
  LetterMap lm = LetterMap::of({{"a", bo.letter_map.at("c1")}, {"b", bo.letter_map.at("id")}});
  CHECK(eval_forest(a, lm, parse_forest("b[a]")) == 1);
  CHECK(eval_forest(a, lm, parse_forest("{}")) == 0);
  CHECK(eval_context(a, lm, parse_context("_")) == a.one_v);
  CHECK(eval_forest(a, lm, parse_forest("b")) == 0);
  CHECK(eval_forest(a, lm, parse_forest("b,a")) == 1);
}

TEST_CASE("morphism laws hold on random forests and contexts") {
  auto bo = make_bool_or();
  const auto& a = bo.algebra;
  LetterMap lm = LetterMap::of({{"a", bo.letter_map.at("c1")},
                                {"b", bo.letter_map.at("id")},
                                {"c", bo.letter_map.at("c0")}});
  std::vector<Label> alphabet = {"a", "b", "c"};
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    Forest f = random_forest(rng, alphabet, 3, 3);
    Forest g = random_forest(rng, alphabet, 3, 3);
    Context c = fatest::random_context(rng, alphabet, 2);
    CHECK(eval_forest(a, lm, sum_forests(f, g)) ==
          a.plus(eval_forest(a, lm, f), eval_forest(a, lm, g)));
    CHECK(eval_forest(a, lm, apply_context(c, f)) ==
          a.action(eval_context(a, lm, c), eval_forest(a, lm, f)));
    Context d = fatest::random_context(rng, alphabet, 1);
    CHECK(eval_context(a, lm, compose_contexts(c, d)) ==
          a.times(eval_context(a, lm, c), eval_context(a, lm, d)));
  }
}

TEST_CASE("distributivity checks") {
  CHECK(is_distributive(make_bool_or().algebra).distributive);
  CHECK(is_distributive(make_one_element().algebra).distributive);

  auto det = make_sibling_pair_detector();
  CHECK(validate_algebra(det.algebra).ok());
  auto d = is_distributive(det.algebra);
  CHECK(!d.distributive);
  CHECK(d.v == det.letter_map.at("vstar"));
  CHECK(d.h1 == 1);  // a
  CHECK(d.h2 == 2);  // b
  // The counterexample replays against the tables.
  const auto& a = det.algebra;
  CHECK(a.action(d.v, a.plus(d.h1, d.h2)) != a.plus(a.action(d.v, d.h1), a.action(d.v, d.h2)));
}

TEST_CASE("direct products") {
  auto bo = make_bool_or().algebra;
  auto one = make_one_element().algebra;
  auto p1 = direct_product(bo, one);
  CHECK(p1.h_size == bo.h_size);
  CHECK(p1.v_size == bo.v_size);
  CHECK(validate_algebra(p1).ok());

  auto p2 = direct_product(bo, bo);
  CHECK(p2.h_size == 4);
  CHECK(p2.v_size <= 9);
  CHECK(validate_algebra(p2).ok());
  CHECK(is_distributive(p2).distributive);
}

TEST_CASE("faithful quotient") {
  auto bo = make_bool_or().algebra;
  CHECK(faithful_quotient(bo).v_size == bo.v_size);

  // Append a redundant duplicate of c0.
  FiniteForestAlgebra a = bo;
  int c0 = 1;
  for (int v = 0; v < a.v_size; ++v)
    if (a.act[v] == std::vector<int>{0, 0}) c0 = v;
  a.v_size += 1;
  a.act.push_back(a.act[c0]);
  for (auto& row : a.mul) row.push_back(row[c0]);
  a.mul.push_back(a.mul[c0]);  // widened above, so already the right width
  auto q = faithful_quotient(a);
  CHECK(q.v_size == bo.v_size);
  CHECK(q.act == bo.act);
  CHECK(validate_algebra(q).ok());
}

TEST_CASE("generated subalgebras") {
  auto bo = make_bool_or();
  int id = bo.letter_map.at("id"), c1 = bo.letter_map.at("c1");

  auto s1 = generated_subalgebra(bo.algebra, LetterMap::of({{"a", id}}));
  CHECK(s1.algebra.h_size == 1);
  CHECK(s1.algebra.v_size == 1);
  CHECK(validate_algebra(s1.algebra).ok());

  auto s2 = generated_subalgebra(bo.algebra, LetterMap::of({{"a", c1}}));
  CHECK(s2.algebra.h_size == 2);
  CHECK(s2.algebra.v_size == 2);  // id and c1; c0 is not generated
  CHECK(validate_algebra(s2.algebra).ok());

  // Whole algebra when letters cover all of V.
  auto s3 = generated_subalgebra(
      bo.algebra, LetterMap::of({{"x", 0}, {"y", 1}, {"z", 2}}));
  CHECK(s3.algebra.h_size == bo.algebra.h_size);
  CHECK(s3.algebra.v_size == bo.algebra.v_size);

  // Oracle equivalence: generated H = eval values over enumerated forests.
  LetterMap lm = LetterMap::of({{"a", c1}});
  auto reach = realizable_h(bo.algebra, lm);
  std::set<int> seen;
  for (const Forest& f : enumerate_forests_vec({"a"}, {4, 6, 100000}))
    seen.insert(eval_forest(bo.algebra, lm, f));
  CHECK(std::vector<int>(seen.begin(), seen.end()) == reach);
}

TEST_CASE("distributive reflection") {
  auto bo = make_bool_or().algebra;
  auto m = distributive_reflection(bo);
  CHECK(m.target.h_size == bo.h_size);  // already distributive: nothing merges
  CHECK(check_morphism(bo, m).empty());
  CHECK(is_distributive(m.target).distributive);
  CHECK(validate_algebra(m.target).ok());

  auto det = make_sibling_pair_detector().algebra;
  auto md = distributive_reflection(det);
  CHECK(is_distributive(md.target).distributive);
  CHECK(validate_algebra(md.target).ok());
  CHECK(check_morphism(det, md).empty());
  // Collapsing t with 0 propagates through the insertions: all of H merges.
  CHECK(md.target.h_size == 1);
}

TEST_CASE("rules") {
  auto bo = make_bool_or();
  int id = bo.letter_map.at("id"), c1 = bo.letter_map.at("c1");
  LetterMap lm = LetterMap::of({{"a", c1}, {"b", id}});
  auto rules = enumerate_rules(bo.algebra, lm);
  CHECK(rules.size() == 8);  // |Sigma| * 2^|H|
  auto has = [&](int result, const Label& l, std::vector<int> kids) {
    Rule r{result, l, std::move(kids)};
    return std::binary_search(rules.begin(), rules.end(), r);
  };
  CHECK(has(1, "a", {}));
  CHECK(has(0, "b", {}));
  CHECK(has(1, "b", {1}));
  CHECK(has(1, "a", {0, 1}));

  auto one = make_one_element();
  CHECK(enumerate_rules(one.algebra, LetterMap::of({{"a", 0}})).size() == 2);

  // Every bottom-up step of an enumerated forest appears as a rule.
  std::set<Rule> rule_set(rules.begin(), rules.end());
  for (const Forest& f : enumerate_forests_vec({"a", "b"}, {3, 4, 100000})) {
    std::function<void(const Forest&)> walk = [&](const Forest& g) {
      for (const Tree& t : g.trees()) {
        std::set<int> kids;
        for (const Tree& child : t.children().trees())
          kids.insert(eval_forest(bo.algebra, lm,
                                  Forest::of({child})));
        Rule r{eval_forest(bo.algebra, lm, Forest::of({t})), t.label(),
               std::vector<int>(kids.begin(), kids.end())};
        CHECK(rule_set.count(r) == 1);
        walk(t.children());
      }
    };
    walk(f);
  }
}

TEST_CASE("traces") {
  Rule r1{1, "a", {1}};
  Rule r2{1, "b", {1}};
  Rule r3{0, "b", {0}};
  Rule r4{1, "a", {0}};
  CHECK(is_trace({r1, r2}));
  CHECK(!is_trace({r3, r4}));
  CHECK(is_trace({r4}));
  CHECK(is_trace({}));
}

TEST_CASE("algebra file round-trip") {
  auto bo = make_bool_or();
  FiniteForestAlgebra a = bo.algebra;
  a.v_names = {"id", "c0", "c1"};
  std::string text = write_algebra(a);
  std::istringstream in(text);
  FiniteForestAlgebra b = read_algebra(in);
  CHECK(b.h_size == a.h_size);
  CHECK(b.v_size == a.v_size);
  CHECK(b.add == a.add);
  CHECK(b.mul == a.mul);
  CHECK(b.act == a.act);
  CHECK(b.ins == a.ins);
  CHECK(b.v_names == a.v_names);
  CHECK(write_algebra(b) == text);

  std::istringstream bad1("H 2\nV 1\n");
  CHECK_THROWS_AS(read_algebra(bad1), FileFormatError);
  std::istringstream bad2("FA 1\nH 1\nV 1\nADDROW 0: 0\nMULROW 0: 0\nACTROW 0: 0\n");
  CHECK_THROWS_AS(read_algebra(bad2), FileFormatError);  // missing INS
}

TEST_CASE("letter map round-trip") {
  LetterMap lm = LetterMap::of({{"a", 2}, {"b", 0}});
  std::string text = write_letter_map(lm);
  std::istringstream in(text);
  LetterMap back = read_letter_map(in);
  CHECK(back.letters == lm.letters);
  CHECK(back.to_v == lm.to_v);
  std::istringstream bad("LETTER a\n");
  CHECK_THROWS_AS(read_letter_map(bad), FileFormatError);
}

TEST_CASE("realizable_h") {
  auto bo = make_bool_or();
  LetterMap lm = LetterMap::of({{"a", bo.letter_map.at("c0")}});
  auto reach = realizable_h(bo.algebra, lm);
  CHECK(reach == std::vector<int>{0});
  LetterMap lm2 = LetterMap::of({{"a", bo.letter_map.at("c1")}});
  CHECK(realizable_h(bo.algebra, lm2) == std::vector<int>{0, 1});
}
