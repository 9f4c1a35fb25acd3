#include "forestalg/fixtures.hpp"

#include "forestalg/twodist.hpp"
#include "forestalg/wreath.hpp"

#include <algorithm>

namespace forestalg {
namespace fixtures {

namespace {

RowAlgebra make_bool_or_impl() {
  RowAlgebraSpec spec;
  spec.h_size = 2;
  spec.zero_h = 0;
  spec.add = {{0, 1}, {1, 1}};
  spec.letter_rows = {{"id", {0, 1}}, {"c0", {0, 0}}, {"c1", {1, 1}}};
  RowAlgebra r = build_row_algebra(spec);
  r.algebra.h_names = {"0", "1"};
  return r;
}

RowAlgebra make_one_element_impl() {
  RowAlgebraSpec spec;
  spec.h_size = 1;
  spec.zero_h = 0;
  spec.add = {{0}};
  spec.letter_rows = {{"a", {0}}};
  return build_row_algebra(spec);
}

RowAlgebra make_sibling_pair_impl() {
  RowAlgebraSpec spec;
  spec.h_size = 4;  // 0 < a,b < t, a+b = t
  spec.zero_h = 0;
  spec.add = {
      {0, 1, 2, 3},
      {1, 1, 3, 3},
      {2, 3, 2, 3},
      {3, 3, 3, 3},
  };
  spec.letter_rows = {{"vstar", {0, 0, 0, 3}}};
  spec.restrict_to_reachable = false;
  RowAlgebra r = build_row_algebra(spec);
  r.algebra.h_names = {"0", "a", "b", "t"};
  return r;
}

// States of the l1 / l_basic recognizer: 0 empty, 1..4 = valid-inside with
// (top b, top c) flags, 5 dead.
constexpr int kL1E = 0, kL1V00 = 1, kL1V10 = 2, kL1V01 = 3, kL1V11 = 4, kL1D = 5;

RowAlgebra make_l1_impl() {
  RowAlgebraSpec spec;
  spec.h_size = 6;
  spec.zero_h = kL1E;
  // Encoding: V00=1, V10=2, V01=3, V11=4.
  auto enc = [](int b, int c) { return b ? (c ? kL1V11 : kL1V10) : (c ? kL1V01 : kL1V00); };
  spec.add.assign(6, std::vector<int>(6));
  auto flags = [&](int s, int& b, int& c) {
    b = (s == kL1V10 || s == kL1V11);
    c = (s == kL1V01 || s == kL1V11);
  };
  for (int s = 0; s < 6; ++s)
    for (int t = 0; t < 6; ++t) {
      if (s == kL1E) {
        spec.add[s][t] = t;
      } else if (t == kL1E) {
        spec.add[s][t] = s;
      } else if (s == kL1D || t == kL1D) {
        spec.add[s][t] = kL1D;
      } else {
        int b1, c1, b2, c2;
        flags(s, b1, c1);
        flags(t, b2, c2);
        spec.add[s][t] = enc(b1 | b2, c1 | c2);
      }
    }
  std::vector<int> row_a(6), row_b(6), row_c(6);
  for (int s = 0; s < 6; ++s) {
    // a over a valid, b/c-balanced, nonempty level; b and c are leaves.
    row_a[s] = (s == kL1V00 || s == kL1V11) ? kL1V00 : kL1D;
    row_b[s] = s == kL1E ? kL1V10 : kL1D;
    row_c[s] = s == kL1E ? kL1V01 : kL1D;
  }
  spec.letter_rows = {{"a", row_a}, {"b", row_b}, {"c", row_c}};
  RowAlgebra r = build_row_algebra(spec);
  r.algebra.h_names = {"E", "V00", "V10", "V01", "V11", "D"};
  return r;
}

// States of the l2 recognizer: 0 empty, 1..8 = valid-inside with flags
// (top b leaf, top c leaf, top a-node-with-c-child), 9 dead.
constexpr int kL2E = 0, kL2D = 9;
int l2_enc(int b, int ct, int ac) { return 1 + b * 4 + ct * 2 + ac; }

RowAlgebra make_l2_impl() {
  RowAlgebraSpec spec;
  spec.h_size = 10;
  spec.zero_h = kL2E;
  spec.add.assign(10, std::vector<int>(10));
  auto flags = [](int s, int& b, int& ct, int& ac) {
    int x = s - 1;
    b = (x >> 2) & 1;
    ct = (x >> 1) & 1;
    ac = x & 1;
  };
  for (int s = 0; s < 10; ++s)
    for (int t = 0; t < 10; ++t) {
      if (s == kL2E) {
        spec.add[s][t] = t;
      } else if (t == kL2E) {
        spec.add[s][t] = s;
      } else if (s == kL2D || t == kL2D) {
        spec.add[s][t] = kL2D;
      } else {
        int b1, ct1, ac1, b2, ct2, ac2;
        flags(s, b1, ct1, ac1);
        flags(t, b2, ct2, ac2);
        spec.add[s][t] = l2_enc(b1 | b2, ct1 | ct2, ac1 | ac2);
      }
    }
  std::vector<int> row_a(10), row_b(10), row_c(10);
  for (int s = 0; s < 10; ++s) {
    if (s == kL2E || s == kL2D) {
      row_a[s] = kL2D;  // bare a leaves are dead; dead stays dead
    } else {
      int b, ct, ac;
      flags(s, b, ct, ac);
      // Level condition below the new a node: b nodes and a-with-c nodes pair up.
      row_a[s] = (b == ac) ? l2_enc(0, 0, ct) : kL2D;
    }
    row_b[s] = s == kL2E ? l2_enc(1, 0, 0) : kL2D;
    row_c[s] = s == kL2E ? l2_enc(0, 1, 0) : kL2D;
  }
  spec.letter_rows = {{"a", row_a}, {"b", row_b}, {"c", row_c}};
  RowAlgebra r = build_row_algebra(spec);
  r.algebra.h_names = {"E",    "V000", "V001", "V010", "V011",
                       "V100", "V101", "V110", "V111", "D"};
  return r;
}

// d-gate: tracks (all d nodes satisfied so far, which root kinds are at the
// top level). Root kinds: gA = a node with both b and c children, plain a,
// b, c; d-rooted trees contribute nothing to the kind set.
RowAlgebra make_d_gate_impl() {
  constexpr int kGA = 1, kA = 2, kB = 4, kC = 8;
  RowAlgebraSpec spec;
  spec.h_size = 32;  // ok flag * 16 kind sets
  auto enc = [](int ok, int s) { return ok * 16 + s; };
  spec.zero_h = enc(1, 0);
  spec.add.assign(32, std::vector<int>(32));
  for (int x = 0; x < 32; ++x)
    for (int y = 0; y < 32; ++y)
      spec.add[x][y] = enc((x >> 4) & (y >> 4), (x | y) & 15);
  std::vector<int> row_a(32), row_b(32), row_c(32), row_d(32);
  for (int x = 0; x < 32; ++x) {
    int ok = x >> 4, s = x & 15;
    row_a[x] = enc(ok, ((s & kB) && (s & kC)) ? kGA : kA);
    row_b[x] = enc(ok, kB);
    row_c[x] = enc(ok, kC);
    row_d[x] = enc(ok & ((s & kGA) ? 1 : 0), 0);
  }
  spec.letter_rows = {{"a", row_a}, {"b", row_b}, {"c", row_c}, {"d", row_d}};
  RowAlgebra r = build_row_algebra(spec);
  return r;
}

// Generated wreath in the style of the basic example: the right factor
// tracks "some c-rooted tree at top level", the left flags b nodes whose
// children have none.
GeneratedWreath make_bc_child_wreath_impl(const RowAlgebra& bo) {
  int id = bo.letter_map.at("id"), c0 = bo.letter_map.at("c0"), c1 = bo.letter_map.at("c1");
  LetterMap l2 = LetterMap::of({{"a", c0}, {"b", c0}, {"c", c1}});
  std::map<Label, std::vector<int>> g;
  g["a"] = {id, id};
  g["b"] = {c1, id};
  g["c"] = {id, id};
  return wreath_generated(bo.algebra, bo.algebra, l2, g);
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> catalog;
  auto add = [&](std::string name, std::string description, FiniteForestAlgebra a,
                 LetterMap lm, std::vector<int> accept, bool check_two_dist) {
    CatalogEntry e;
    e.name = std::move(name);
    e.description = std::move(description);
    e.algebra = std::move(a);
    e.letter_map = std::move(lm);
    e.accept = std::move(accept);
    if (!validate_algebra(e.algebra).ok())
      throw std::logic_error("builtin algebra " + e.name + " fails validation");
    e.distributive = is_distributive(e.algebra).distributive;
    if (check_two_dist) {
      TwoDistOptions opt;
      opt.want_witness = false;
      opt.list_intersecting_pairs = false;
      TwoDistVerdict v = is_2_distributive(e.algebra, opt);
      if (v.answer != TwoDistAnswer::kInconclusive)
        e.two_distributive = v.answer == TwoDistAnswer::kYes;
    }
    catalog.push_back(std::move(e));
  };

  auto bo = make_bool_or_impl();
  add("bool_or", "two-element join semilattice with constants", bo.algebra,
      bo.letter_map, {1}, true);
  auto one = make_one_element_impl();
  add("one_element", "trivial one-element algebra", one.algebra, one.letter_map, {0},
      true);
  auto det = make_sibling_pair_impl();
  add("sibling_pair", "join semilattice with a top-detector context", det.algebra,
      det.letter_map, {3}, true);
  auto dg = make_d_gate_impl();
  std::vector<int> dg_accept;
  for (int s = 0; s < 16; ++s)
    if (dg.h_map[16 + s] >= 0) dg_accept.push_back(dg.h_map[16 + s]);
  std::sort(dg_accept.begin(), dg_accept.end());
  add("d_gate", "every d node needs an a child with both b and c children",
      dg.algebra, dg.letter_map, dg_accept, true);
  auto l1 = make_l1_impl();
  add("l1", "recognizer for the paired-leaf language (nonempty)", l1.algebra,
      l1.letter_map, {kL1V00, kL1V11}, true);
  add("l_basic", "recognizer for the paired-leaf language (with empty forest)",
      l1.algebra, l1.letter_map, {kL1E, kL1V00, kL1V11}, false);
  auto l2 = make_l2_impl();
  add("l2", "recognizer for the shifted paired-leaf language (nonempty)", l2.algebra,
      l2.letter_map, {l2_enc(0, 0, 0), l2_enc(1, 0, 1)}, false);
  auto wbc = make_bc_child_wreath_impl(bo);
  std::vector<int> wbc_accept;
  for (int h = 0; h < wbc.wreath.algebra.h_size; ++h)
    if (wbc.wreath.h_pair[h].first == 0) wbc_accept.push_back(h);
  add("bc_child_wreath", "generated wreath flagging b nodes without a c-rooted child",
      wbc.wreath.algebra, wbc.letter_map, wbc_accept, true);
  return catalog;
}

}  // namespace

const std::vector<CatalogEntry>& builtin_algebras() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

const CatalogEntry& builtin(const std::string& name) {
  for (const CatalogEntry& e : builtin_algebras())
    if (e.name == name) return e;
  throw std::out_of_range("unknown builtin algebra: " + name);
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const CatalogEntry& e : builtin_algebras()) names.push_back(e.name);
  return names;
}

// ---------------------------------------------------------------------------
// Membership predicates

namespace {

// Shared level check for l_basic / l1: b and c occur as leaves and pair up,
// a nodes carry nonempty valid levels.
bool l1_level(const Forest& f) {
  bool has_b = false, has_c = false;
  for (const Tree& t : f.trees()) {
    if (t.label() == "b") {
      if (!t.children().empty()) return false;
      has_b = true;
    } else if (t.label() == "c") {
      if (!t.children().empty()) return false;
      has_c = true;
    } else if (t.label() == "a") {
      if (t.children().empty()) return false;
      if (!l1_level(t.children())) return false;
    } else {
      return false;
    }
  }
  return has_b == has_c;
}

// Level check for l2: returns validity; tracks whether the level has a b
// leaf, a top c leaf, and an a node with a c child.
bool l2_level(const Forest& f, bool top, bool& has_b, bool& has_ac) {
  has_b = false;
  has_ac = false;
  for (const Tree& t : f.trees()) {
    if (t.label() == "b") {
      if (!t.children().empty()) return false;
      has_b = true;
    } else if (t.label() == "c") {
      if (!t.children().empty()) return false;
      if (top) return false;  // a maximal path may not start with c
    } else if (t.label() == "a") {
      if (t.children().empty()) return false;
      bool sub_b, sub_ac;
      if (!l2_level(t.children(), false, sub_b, sub_ac)) return false;
      if (sub_b != sub_ac) return false;
      for (const Tree& c : t.children().trees())
        if (c.label() == "c") has_ac = true;
    } else {
      return false;
    }
  }
  return true;
}

bool l2_member(const Forest& f) {
  if (f.empty()) return false;
  bool has_b, has_ac;
  if (!l2_level(f, true, has_b, has_ac)) return false;
  return has_b == has_ac;
}

bool l3a_member(const Forest& f);
bool l3b_member(const Forest& f);

std::pair<Forest, Forest> split_by_d(const Forest& f) {
  std::vector<Tree> dpart, rest;
  for (const Tree& t : f.trees())
    (t.label() == "d" ? dpart : rest).push_back(t);
  return {Forest::of(std::move(dpart)), Forest::of(std::move(rest))};
}

bool l3a_member(const Forest& f) {
  for (const Tree& t : f.trees()) {
    if (t.label() != "d") return false;
    auto [dpart, rest] = split_by_d(t.children());
    if (!l3b_member(dpart)) return false;
    if (rest.empty() || !l1_level(rest)) return false;
  }
  return true;
}

bool l3b_member(const Forest& f) {
  for (const Tree& t : f.trees()) {
    if (t.label() != "d") return false;
    auto [dpart, rest] = split_by_d(t.children());
    if (!l3a_member(dpart)) return false;
    if (!l2_member(rest)) return false;
  }
  return true;
}

bool l_member(const Forest& f) {
  for (const Tree& t : f.trees()) {
    Forest single = Forest::of({t});
    if (!l3a_member(single) && !l3b_member(single)) return false;
  }
  return true;
}

bool bc_child_member(const Forest& f) {
  for (const Tree& t : f.trees()) {
    if (t.label() == "b") {
      bool has_c = false;
      for (const Tree& c : t.children().trees())
        if (c.label() == "c") has_c = true;
      if (!has_c) return false;
    }
    if (!bc_child_member(t.children())) return false;
  }
  return true;
}

bool d_gate_member(const Forest& f) {
  for (const Tree& t : f.trees()) {
    if (t.label() == "d") {
      bool good = false;
      for (const Tree& c : t.children().trees()) {
        if (c.label() != "a") continue;
        bool has_b = false, has_c = false;
        for (const Tree& g : c.children().trees()) {
          if (g.label() == "b") has_b = true;
          if (g.label() == "c") has_c = true;
        }
        if (has_b && has_c) good = true;
      }
      if (!good) return false;
    }
    if (!d_gate_member(t.children())) return false;
  }
  return true;
}

int max_ab_path(const Forest& f, const Label& leaf) {
  // Largest n with a^n leaf in paths(f), or -1.
  int best = -1;
  for (const Word& w : paths(f).words()) {
    if (w.empty() || w.back() != leaf) continue;
    bool all_a = true;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] != "a") all_a = false;
    if (all_a) best = std::max(best, static_cast<int>(w.size()) - 1);
  }
  return best;
}

}  // namespace

bool membership(const std::string& language, const Forest& f) {
  if (language == "l_basic") return l1_level(f);
  if (language == "l1") return !f.empty() && l1_level(f);
  if (language == "l2") return l2_member(f);
  if (language == "l3a") return l3a_member(f);
  if (language == "l3b") return l3b_member(f);
  if (language == "l") return l_member(f);
  if (language == "bc_child") return bc_child_member(f);
  if (language == "d_gate") return d_gate_member(f);
  throw std::out_of_range("unknown language: " + language);
}

std::vector<std::string> language_names() {
  return {"l_basic", "l1", "l2", "l3a", "l3b", "l", "bc_child", "d_gate"};
}

bool compatible_l1(const Forest& f) {
  return max_ab_path(f, "b") == max_ab_path(f, "c");
}

bool compatible_l2(const Forest& f) {
  return 1 + max_ab_path(f, "b") == max_ab_path(f, "c");
}

Recognizer recognizer_for(const std::string& language) {
  const CatalogEntry* entry = nullptr;
  if (language == "l_basic") entry = &builtin("l_basic");
  if (language == "l1") entry = &builtin("l1");
  if (language == "l2") entry = &builtin("l2");
  if (!entry) throw std::out_of_range("no recognizer for language: " + language);
  return {entry->algebra, entry->letter_map, entry->accept};
}

}  // namespace fixtures
}  // namespace forestalg
