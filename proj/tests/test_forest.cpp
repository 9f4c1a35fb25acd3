#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "forestalg/forest.hpp"

#include <random>

using namespace forestalg;

namespace {

Forest F(const std::string& s) { return parse_forest(s); }

bool no_equal_label_siblings(const Forest& f) {
  for (std::size_t i = 0; i + 1 < f.trees().size(); ++i)
    if (f.trees()[i].label() == f.trees()[i + 1].label()) return false;
  for (const Tree& t : f.trees())
    if (!no_equal_label_siblings(t.children())) return false;
  return true;
}

std::vector<Label> abc() { return {"a", "b", "c"}; }

}  // namespace

TEST_CASE("parse and render round-trip") {
  CHECK(render(F("{}")) == "{}");
  CHECK(render(F("a[b,c]")) == "a[b,c]");
  CHECK(render(F("a [ c , b ]")) == "a[b,c]");
  CHECK(render(F("a[b,b]")) == "a[b]");  // duplicates collapse
  CHECK(F("b,a") == F("a,b"));
  CHECK(render(F("b,a")) == "a,b");
  CHECK_THROWS_AS(F("a[b"), ParseError);
  CHECK_THROWS_AS(F(""), ParseError);
  CHECK_THROWS_AS(F("a,,b"), ParseError);
  Alphabet ab{"a", "b"};
  CHECK_THROWS_AS(parse_forest("a[c]", ab), ParseError);
  CHECK(render(parse_forest("a[b]", ab)) == "a[b]");
}

TEST_CASE("render-parse identity on random forests") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Forest f = random_forest(rng, abc(), 4, 3);
    CHECK(parse_forest(render(f)) == f);
  }
}

TEST_CASE("sum is a commutative idempotent monoid operation") {
  CHECK(sum_forests(F("a"), F("b")) == F("a,b"));
  CHECK(sum_forests(F("a"), F("a")) == F("a"));
  CHECK(sum_forests(F("a[b]"), F("{}")) == F("a[b]"));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Forest f = random_forest(rng, abc(), 3, 3);
    Forest g = random_forest(rng, abc(), 3, 3);
    Forest h = random_forest(rng, abc(), 3, 3);
    CHECK(sum_forests(f, g) == sum_forests(g, f));
    CHECK(sum_forests(f, f) == f);
    CHECK(sum_forests(sum_forests(f, g), h) == sum_forests(f, sum_forests(g, h)));
  }
}

TEST_CASE("contexts: parse, apply, compose") {
  Context hole = parse_context("_");
  CHECK(hole.is_hole());
  CHECK(apply_context(hole, F("a,b")) == F("a,b"));

  Context c = parse_context("b,a[_]");
  CHECK(apply_context(c, F("c")) == F("b,a[c]"));
  CHECK(apply_context(parse_context("a[_]"), F("{}")) == F("a"));

  CHECK(compose_contexts(hole, c) == c);
  CHECK(compose_contexts(c, hole) == c);
  Context ab = compose_contexts(parse_context("a[_]"), parse_context("b[_]"));
  CHECK(render(ab) == "a[b[_]]");
  Context big = compose_contexts(parse_context("x_1,a[_]"), parse_context("y_1,b[_]"));
  CHECK(render(big) == "a[b[_],y_1],x_1");
  CHECK(big == parse_context("x_1, a[y_1, b[_]]"));

  // hole with top-level siblings
  Context s = parse_context("b,_");
  CHECK(apply_context(s, F("a")) == F("a,b"));
  CHECK_THROWS_AS(parse_context("a,b"), ParseError);
  CHECK_THROWS_AS(parse_context("_,_"), ParseError);
  CHECK_THROWS_AS(parse_context("_[a]"), ParseError);
}

TEST_CASE("context application is a monoid action") {
  std::mt19937_64 rng(13);
  auto random_context = [&](int depth) {
    Context c;
    for (int d = 0; d < depth; ++d) {
      std::vector<Context::Frame> fr = {{random_forest(rng, abc(), 2, 2), "a"}};
      c = compose_contexts(c, Context(fr, random_forest(rng, abc(), 2, 2)));
    }
    return c;
  };
  for (int i = 0; i < 100; ++i) {
    Context c = random_context(2);
    Context d = random_context(2);
    Forest f = random_forest(rng, abc(), 3, 3);
    CHECK(apply_context(compose_contexts(c, d), f) == apply_context(c, apply_context(d, f)));
  }
  Context c1 = random_context(1), c2 = random_context(2), c3 = random_context(1);
  CHECK(compose_contexts(compose_contexts(c1, c2), c3) ==
        compose_contexts(c1, compose_contexts(c2, c3)));
}

TEST_CASE("paths") {
  CHECK(render(paths(F("{}"))) == "ε");
  PathSet p = paths(F("a[b]"));
  CHECK(p.words().size() == 3);  // ε, a, ab
  CHECK(p.contains({}));
  CHECK(p.contains({"a"}));
  CHECK(p.contains({"a", "b"}));
  CHECK(paths(F("a[b],a[c]")) == paths(F("a[b,c]")));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    Forest f = random_forest(rng, abc(), 3, 3);
    Forest g = random_forest(rng, abc(), 3, 3);
    CHECK(paths(sum_forests(f, g)) == paths_union(paths(f), paths(g)));
  }
}

TEST_CASE("psi: figure example and basic cases") {
  Forest in = F("a[b[b,c], c[a[b,c], a[a]], b[c[d]]]");
  Forest expect = F("a[b[b, c[d]], c[a[b,c,a]]]");
  CHECK(psi(in) == expect);
  CHECK(psi(F("{}")) == F("{}"));
  CHECK(psi(F("a,a[b]")) == F("a[b]"));
}

TEST_CASE("psi properties on random forests") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 300; ++i) {
    Forest f = random_forest(rng, abc(), 4, 3);
    Forest pf = psi(f);
    CHECK(paths(pf) == paths(f));
    CHECK(psi(pf) == pf);
    CHECK(no_equal_label_siblings(pf));
  }
  // paths(f) == paths(g) iff psi(f) == psi(g)
  for (int i = 0; i < 200; ++i) {
    Forest f = random_forest(rng, abc(), 3, 3);
    Forest g = random_forest(rng, abc(), 3, 3);
    CHECK((paths(f) == paths(g)) == (psi(f) == psi(g)));
  }
}

TEST_CASE("height and quotients") {
  CHECK(height(F("{}")) == 0);
  CHECK(height(F("a")) == 1);
  CHECK(height(F("a[b]")) == 2);
  CHECK(height(F("a[b]")) == paths(F("a[b]")).max_length());
  CHECK(label_quotient("a", F("a[b],a[c],b[d]")) == F("b,c"));
  CHECK(label_quotient("a", F("{}")) == F("{}"));
  CHECK(label_quotient("a", F("b")) == F("{}"));
}

TEST_CASE("enumeration: counts, bounds, determinism") {
  auto e1 = enumerate_forests_vec({"a"}, {1, 3, 1000});
  REQUIRE(e1.size() == 2);
  CHECK(e1[0] == F("{}"));
  CHECK(e1[1] == F("a"));

  auto e2 = enumerate_forests_vec({"a"}, {2, 3, 1000});
  REQUIRE(e2.size() == 4);
  CHECK(e2[0] == F("{}"));
  CHECK(e2[1] == F("a"));
  CHECK(e2[2] == F("a[a]"));
  CHECK(e2[3] == F("a,a[a]"));

  CHECK(enumerate_forests_vec({"a", "b"}, {0, 5, 1000}).size() == 1);

  auto e3 = enumerate_forests_vec(abc(), {3, 4, 100000});
  std::set<Forest> seen;
  int prev_nodes = 0;
  for (const Forest& f : e3) {
    CHECK(f.height() <= 3);
    CHECK(f.node_count() <= 4);
    CHECK(f.node_count() >= prev_nodes);
    prev_nodes = f.node_count();
    CHECK(seen.insert(f).second);  // no duplicates
  }
  CHECK(enumerate_forests_vec(abc(), {3, 4, 100000}).size() == e3.size());
  CHECK_THROWS_AS(enumerate_forests_vec(abc(), {3, 4, 10}), ResourceLimitError);
}

TEST_CASE("enumeration covers every bounded forest") {
  // Every random forest within bounds appears in the enumeration.
  auto all = enumerate_forests_vec(abc(), {2, 4, 1000000});
  std::set<Forest> index(all.begin(), all.end());
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    Forest f = random_forest(rng, abc(), 2, 2);
    if (f.node_count() <= 4) CHECK(index.count(f) == 1);
  }
}

TEST_CASE("random forests are canonical and seeded") {
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    Forest f = random_forest(a, abc(), 4, 3);
    Forest g = random_forest(b, abc(), 4, 3);
    CHECK(f == g);
    CHECK(parse_forest(render(f)) == f);
  }
}
