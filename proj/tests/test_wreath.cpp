#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "forestalg/wreath.hpp"
#include "test_util.hpp"

using namespace forestalg;
using fatest::make_bool_or;
using fatest::make_one_element;

namespace {

// H = {0,1} with OR; V = {id, c1}. Smallest nontrivial distributive algebra.
RowAlgebra make_u1() {
  RowAlgebraSpec spec;
  spec.h_size = 2;
  spec.zero_h = 0;
  spec.add = {{0, 1}, {1, 1}};
  spec.letter_rows = {{"c1", {1, 1}}};
  return build_row_algebra(spec);
}

}  // namespace

TEST_CASE("full wreath product: sizes and validity") {
  auto bo = make_bool_or().algebra;
  auto one = make_one_element().algebra;

  auto w1 = wreath_product(one, bo);
  CHECK(w1.algebra.h_size == bo.h_size);
  CHECK(w1.algebra.v_size == bo.v_size);  // 1^2 * 3
  CHECK(validate_algebra(w1.algebra).ok());

  auto w2 = wreath_product(bo, bo);
  CHECK(w2.algebra.h_size == 4);
  CHECK(w2.algebra.v_size == 27);  // 3^2 * 3
  CHECK(validate_algebra(w2.algebra).ok());

  CHECK_THROWS_AS(wreath_product(bo, bo, 10), ResourceLimitError);
}

TEST_CASE("wreath action matches the cascade formula") {
  auto bo = make_bool_or();
  auto w = wreath_product(bo.algebra, bo.algebra);
  int id = bo.letter_map.at("id"), c1 = bo.letter_map.at("c1");
  // f = (0 -> id, 1 -> c1), v = id applied to (1,1): (f(1)·1, id·1) = (1,1).
  int v = -1;
  for (int i = 0; i < w.algebra.v_size; ++i)
    if (w.v_func[i] == std::vector<int>{id, c1} && w.v_right[i] == id) v = i;
  REQUIRE(v >= 0);
  int h11 = w.h_index(1, 1);
  CHECK(w.algebra.action(v, h11) == h11);
  // And on (1,0): (f(0)·1, id·0) = (id·1, 0) = (1,0).
  CHECK(w.algebra.action(v, w.h_index(1, 0)) == w.h_index(1, 0));
}

TEST_CASE("project_right is a verified homomorphism") {
  auto bo = make_bool_or().algebra;
  auto w = wreath_product(bo, bo);
  auto proj = project_right(w);
  CHECK(check_morphism(w.algebra, proj).empty());
  CHECK(proj.h_map[w.h_index(1, 0)] == 0);
  CHECK(proj.h_map[w.h_index(1, 1)] == 1);
}

TEST_CASE("generated wreath: degenerate g reproduces the right factor") {
  auto bo = make_bool_or();
  LetterMap l2 = LetterMap::of(
      {{"a", bo.letter_map.at("c1")}, {"b", bo.letter_map.at("id")}});
  std::map<Label, std::vector<int>> g;
  int one_v = bo.algebra.one_v;
  g["a"] = {one_v, one_v};
  g["b"] = {one_v, one_v};
  auto gw = wreath_generated(bo.algebra, bo.algebra, l2, g);
  CHECK(validate_algebra(gw.wreath.algebra).ok());
  // Left components stay trivial, so the result mirrors the generated part
  // of the right factor.
  auto proj = project_right(gw.wreath);
  CHECK(check_morphism(gw.wreath.algebra, proj).empty());
  for (int h = 0; h < gw.wreath.algebra.h_size; ++h)
    CHECK(gw.wreath.h_pair[h].first == bo.algebra.zero_h);
}

TEST_CASE("generated wreath with a letter table stays small and valid") {
  auto bo = make_bool_or();
  int id = bo.letter_map.at("id"), c0 = bo.letter_map.at("c0"), c1 = bo.letter_map.at("c1");
  // Right factor tracks "has a c at top level"; the left letter rows react
  // to that bit, flagging b-nodes whose children have no top-level c.
  LetterMap l2 = LetterMap::of({{"a", c0}, {"b", c0}, {"c", c1}});
  std::map<Label, std::vector<int>> g;
  g["a"] = {id, id};
  g["b"] = {c1, id};  // b over c-less children raises the left flag
  g["c"] = {id, id};
  auto gw = wreath_generated(bo.algebra, bo.algebra, l2, g);
  CHECK(validate_algebra(gw.wreath.algebra).ok());
  CHECK(gw.wreath.algebra.h_size <= 8);
  CHECK(check_morphism(gw.wreath.algebra, project_right(gw.wreath)).empty());

  // Generated fragment agrees with evaluation in the full product.
  auto full = wreath_product(bo.algebra, bo.algebra);
  std::map<Label, int> full_letters;
  for (const Label& l : l2.letters) {
    for (int v = 0; v < full.algebra.v_size; ++v)
      if (full.v_func[v] == g[l] && full.v_right[v] == l2.at(l)) full_letters[l] = v;
  }
  LetterMap full_lm = LetterMap::of(full_letters);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Forest f = random_forest(rng, {"a", "b", "c"}, 3, 3);
    int hg = eval_forest(gw.wreath.algebra, gw.letter_map, f);
    int hf = eval_forest(full.algebra, full_lm, f);
    CHECK(gw.wreath.h_pair[hg] == full.h_pair[hf]);
  }
}

TEST_CASE("project_right commutes with evaluation") {
  auto bo = make_bool_or();
  int id = bo.letter_map.at("id"), c1 = bo.letter_map.at("c1");
  LetterMap l2 = LetterMap::of({{"a", c1}, {"b", id}});
  std::map<Label, std::vector<int>> g;
  g["a"] = {id, c1};
  g["b"] = {c1, id};
  auto gw = wreath_generated(bo.algebra, bo.algebra, l2, g);
  auto proj = project_right(gw.wreath);
  std::map<Label, int> right_letters;
  for (const Label& l : l2.letters) right_letters[l] = l2.at(l);
  LetterMap rlm = LetterMap::of(right_letters);
  for (const Forest& f : enumerate_forests_vec({"a", "b"}, {3, 5, 100000}))
    CHECK(proj.h_map[eval_forest(gw.wreath.algebra, gw.letter_map, f)] ==
          eval_forest(bo.algebra, rlm, f));
}

TEST_CASE("associativity up to isomorphism at tiny scale") {
  auto u1 = make_u1().algebra;
  auto one = make_one_element().algebra;

  SUBCASE("u1 with trivial factors") {
    auto ab = wreath_product(u1, one);
    auto bc = wreath_product(one, u1);
    auto left = wreath_product(ab.algebra, u1);
    auto right = wreath_product(u1, bc.algebra);
    auto iso = find_isomorphism(left.algebra, right.algebra);
    REQUIRE(iso.has_value());
  }

  SUBCASE("three copies of u1") {
    auto ab = wreath_product(u1, u1);
    auto bc = wreath_product(u1, u1);
    auto left = wreath_product(ab.algebra, u1);
    auto right = wreath_product(u1, bc.algebra);
    REQUIRE(left.algebra.h_size == right.algebra.h_size);
    REQUIRE(left.algebra.v_size == right.algebra.v_size);
    auto iso = find_isomorphism(left.algebra, right.algebra);
    REQUIRE(iso.has_value());
    // Spot-check the found maps preserve the action.
    auto [hm, vm] = *iso;
    for (int v = 0; v < left.algebra.v_size; ++v)
      for (int h = 0; h < left.algebra.h_size; ++h)
        CHECK(hm[left.algebra.action(v, h)] == right.algebra.action(vm[v], hm[h]));
  }
}

TEST_CASE("find_isomorphism rejects non-isomorphic algebras") {
  auto bo = make_bool_or().algebra;
  auto u1 = make_u1().algebra;
  CHECK(!find_isomorphism(bo, u1).has_value());

  RowAlgebraSpec z2;
  z2.h_size = 2;
  z2.zero_h = 0;
  z2.add = {{0, 1}, {1, 0}};
  z2.restrict_to_reachable = false;
  auto z = build_row_algebra(z2).algebra;
  CHECK(z.v_size == 2);
  CHECK(!find_isomorphism(z, u1).has_value());
}
