#include "forestalg/algebra.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace forestalg {

std::string FiniteForestAlgebra::h_name(int h) const {
  if (!h_names.empty() && !h_names[h].empty()) return h_names[h];
  return "h" + std::to_string(h);
}

std::string FiniteForestAlgebra::v_name(int v) const {
  if (!v_names.empty() && !v_names[v].empty()) return v_names[v];
  return "v" + std::to_string(v);
}

bool ValidationReport::ok() const {
  for (const auto& a : axioms)
    if (!a.pass) return false;
  return true;
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& a : axioms) {
    out += a.axiom;
    out += a.pass ? ": PASS" : ": FAIL (" + a.counterexample + ")";
    out += '\n';
  }
  return out;
}

namespace {

void check_shape(const FiniteForestAlgebra& a) {
  const int m = a.h_size, n = a.v_size;
  if (m <= 0 || n <= 0) throw TableError("empty H or V");
  if (a.zero_h < 0 || a.zero_h >= m || a.one_v < 0 || a.one_v >= n)
    throw TableError("identity index out of range");
  auto check_table = [](const std::vector<std::vector<int>>& t, int rows, int cols,
                        int range, const char* name) {
    if (static_cast<int>(t.size()) != rows)
      throw TableError(std::string(name) + ": wrong row count");
    for (const auto& row : t) {
      if (static_cast<int>(row.size()) != cols)
        throw TableError(std::string(name) + ": wrong column count");
      for (int x : row)
        if (x < 0 || x >= range) throw TableError(std::string(name) + ": index out of range");
    }
  };
  check_table(a.add, m, m, m, "ADD");
  check_table(a.mul, n, n, n, "MUL");
  check_table(a.act, n, m, m, "ACT");
  if (static_cast<int>(a.ins.size()) != m) throw TableError("INS: wrong length");
  for (int v : a.ins)
    if (v < 0 || v >= n) throw TableError("INS: index out of range");
}

}  // namespace

ValidationReport validate_algebra(const FiniteForestAlgebra& a) {
  check_shape(a);
  const int m = a.h_size, n = a.v_size;
  ValidationReport r;
  auto record = [&](const std::string& axiom, bool pass, const std::string& cex) {
    r.axioms.push_back({axiom, pass, pass ? "" : cex});
  };

  {
    bool ok = true;
    std::string cex;
    for (int h = 0; h < m && ok; ++h)
      if (a.plus(a.zero_h, h) != h || a.plus(h, a.zero_h) != h) {
        ok = false;
        cex = "identity fails at h=" + std::to_string(h);
      }
    for (int x = 0; x < m && ok; ++x)
      for (int y = 0; y < m && ok; ++y)
        for (int z = 0; z < m && ok; ++z)
          if (a.plus(a.plus(x, y), z) != a.plus(x, a.plus(y, z))) {
            ok = false;
            cex = "associativity fails at (" + std::to_string(x) + "," + std::to_string(y) +
                  "," + std::to_string(z) + ")";
          }
    record("h-monoid", ok, cex);
  }

  {
    bool ok = true;
    std::string cex;
    for (int v = 0; v < n && ok; ++v)
      if (a.times(a.one_v, v) != v || a.times(v, a.one_v) != v) {
        ok = false;
        cex = "identity fails at v=" + std::to_string(v);
      }
    for (int x = 0; x < n && ok; ++x)
      for (int y = 0; y < n && ok; ++y)
        for (int z = 0; z < n && ok; ++z)
          if (a.times(a.times(x, y), z) != a.times(x, a.times(y, z))) {
            ok = false;
            cex = "associativity fails at (" + std::to_string(x) + "," + std::to_string(y) +
                  "," + std::to_string(z) + ")";
          }
    record("v-monoid", ok, cex);
  }

  // Totality of the action is a shape property; reaching here means it holds.
  record("action-total", true, "");

  {
    bool ok = true;
    std::string cex;
    for (int h = 0; h < m && ok; ++h)
      if (a.action(a.one_v, h) != h) {
        ok = false;
        cex = "identity action fails at h=" + std::to_string(h);
      }
    for (int v = 0; v < n && ok; ++v)
      for (int w = 0; w < n && ok; ++w)
        for (int h = 0; h < m && ok; ++h)
          if (a.action(v, a.action(w, h)) != a.action(a.times(v, w), h)) {
            ok = false;
            cex = "(v,v',h)=(" + std::to_string(v) + "," + std::to_string(w) + "," +
                  std::to_string(h) + ")";
          }
    record("action-law", ok, cex);
  }

  {
    bool ok = true;
    std::string cex;
    for (int v = 0; v < n && ok; ++v)
      for (int w = v + 1; w < n && ok; ++w)
        if (a.act[v] == a.act[w]) {
          ok = false;
          cex = "(v,v')=(" + std::to_string(v) + "," + std::to_string(w) + ")";
        }
    record("faithful", ok, cex);
  }

  {
    bool ok = true;
    std::string cex;
    for (int h = 0; h < m && ok; ++h)
      for (int x = 0; x < m && ok; ++x)
        if (a.action(a.ins[h], x) != a.plus(h, x)) {
          ok = false;
          cex = "(h,h')=(" + std::to_string(h) + "," + std::to_string(x) + ")";
        }
    record("insertion", ok, cex);
  }

  {
    bool ok = true;
    std::string cex;
    for (int h = 0; h < m && ok; ++h) {
      bool found = false;
      for (int v = 0; v < n && !found; ++v)
        if (a.action(v, a.zero_h) == h) found = true;
      if (!found) {
        ok = false;
        cex = "h=" + std::to_string(h);
      }
    }
    record("onto-from-zero", ok, cex);
  }

  return r;
}

HorizontalVerdict check_horizontal(const FiniteForestAlgebra& a) {
  check_shape(a);
  HorizontalVerdict v;
  for (int h = 0; h < a.h_size; ++h)
    if (a.plus(h, h) != h) {
      v.idempotent = false;
      v.counterexample = "h+h != h at h=" + std::to_string(h);
      return v;
    }
  for (int x = 0; x < a.h_size; ++x)
    for (int y = 0; y < a.h_size; ++y)
      if (a.plus(x, y) != a.plus(y, x)) {
        v.commutative = false;
        v.counterexample =
            "h1+h2 != h2+h1 at (" + std::to_string(x) + "," + std::to_string(y) + ")";
        return v;
      }
  return v;
}

DistributivityVerdict is_distributive(const FiniteForestAlgebra& a) {
  check_shape(a);
  DistributivityVerdict d;
  for (int v = 0; v < a.v_size; ++v)
    for (int x = 0; x < a.h_size; ++x)
      for (int y = 0; y < a.h_size; ++y)
        if (a.action(v, a.plus(x, y)) != a.plus(a.action(v, x), a.action(v, y))) {
          d.distributive = false;
          d.v = v;
          d.h1 = x;
          d.h2 = y;
          return d;
        }
  return d;
}

std::string DistributivityVerdict::to_string(const FiniteForestAlgebra& a) const {
  if (distributive) return "distributive";
  return "not distributive: v=" + a.v_name(v) + " h1=" + a.h_name(h1) +
         " h2=" + a.h_name(h2);
}

LetterMap LetterMap::of(const std::map<Label, int>& assignment) {
  LetterMap lm;
  lm.to_v = assignment;
  for (const auto& [l, _] : assignment) lm.letters.push_back(l);
  return lm;
}

int LetterMap::at(const Label& l) const {
  auto it = to_v.find(l);
  if (it == to_v.end()) throw std::out_of_range("letter not in map: " + l);
  return it->second;
}

int eval_forest(const FiniteForestAlgebra& a, const LetterMap& lm, const Forest& f) {
  int h = a.zero_h;
  for (const Tree& t : f.trees()) {
    int child = eval_forest(a, lm, t.children());
    h = a.plus(h, a.action(lm.at(t.label()), child));
  }
  return h;
}

int eval_context(const FiniteForestAlgebra& a, const LetterMap& lm, const Context& c) {
  int v = a.one_v;
  for (const auto& frame : c.frames()) {
    int s = eval_forest(a, lm, frame.siblings);
    v = a.times(v, a.times(a.ins[s], lm.at(frame.label)));
  }
  int s = eval_forest(a, lm, c.hole_siblings());
  return a.times(v, a.ins[s]);
}

std::vector<int> realizable_h(const FiniteForestAlgebra& a, const LetterMap& lm) {
  std::vector<bool> in(a.h_size, false);
  in[a.zero_h] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < a.h_size; ++x) {
      if (!in[x]) continue;
      for (int y = 0; y < a.h_size; ++y) {
        if (!in[y]) continue;
        if (!in[a.plus(x, y)]) {
          in[a.plus(x, y)] = true;
          changed = true;
        }
      }
      for (const Label& l : lm.letters) {
        int h = a.action(lm.at(l), x);
        if (!in[h]) {
          in[h] = true;
          changed = true;
        }
      }
    }
  }
  std::vector<int> out;
  for (int h = 0; h < a.h_size; ++h)
    if (in[h]) out.push_back(h);
  return out;
}

// ---------------------------------------------------------------------------
// Constructions

FiniteForestAlgebra faithful_quotient(const FiniteForestAlgebra& a) {
  check_shape(a);
  std::map<std::vector<int>, int> row_class;
  std::vector<int> v_map(a.v_size);
  std::vector<int> reps;
  for (int v = 0; v < a.v_size; ++v) {
    auto [it, fresh] = row_class.try_emplace(a.act[v], static_cast<int>(reps.size()));
    if (fresh) reps.push_back(v);
    v_map[v] = it->second;
  }
  FiniteForestAlgebra q;
  q.h_size = a.h_size;
  q.v_size = static_cast<int>(reps.size());
  q.zero_h = a.zero_h;
  q.one_v = v_map[a.one_v];
  q.add = a.add;
  q.h_names = a.h_names;
  q.mul.assign(q.v_size, std::vector<int>(q.v_size));
  q.act.assign(q.v_size, std::vector<int>(q.h_size));
  for (int i = 0; i < q.v_size; ++i) {
    q.act[i] = a.act[reps[i]];
    for (int j = 0; j < q.v_size; ++j) q.mul[i][j] = v_map[a.times(reps[i], reps[j])];
  }
  q.ins.resize(q.h_size);
  for (int h = 0; h < q.h_size; ++h) q.ins[h] = v_map[a.ins[h]];
  if (!a.v_names.empty()) {
    q.v_names.resize(q.v_size);
    for (int i = 0; i < q.v_size; ++i) q.v_names[i] = a.v_names[reps[i]];
  }
  return q;
}

FiniteForestAlgebra direct_product(const FiniteForestAlgebra& a,
                                   const FiniteForestAlgebra& b) {
  return direct_product_with_maps(a, b).algebra;
}

ProductWithMaps direct_product_with_maps(const FiniteForestAlgebra& a,
                                         const FiniteForestAlgebra& b) {
  check_shape(a);
  check_shape(b);
  FiniteForestAlgebra p;
  p.h_size = a.h_size * b.h_size;
  p.v_size = a.v_size * b.v_size;
  auto hid = [&](int x, int y) { return x * b.h_size + y; };
  auto vid = [&](int x, int y) { return x * b.v_size + y; };
  p.zero_h = hid(a.zero_h, b.zero_h);
  p.one_v = vid(a.one_v, b.one_v);
  p.add.assign(p.h_size, std::vector<int>(p.h_size));
  for (int x1 = 0; x1 < a.h_size; ++x1)
    for (int y1 = 0; y1 < b.h_size; ++y1)
      for (int x2 = 0; x2 < a.h_size; ++x2)
        for (int y2 = 0; y2 < b.h_size; ++y2)
          p.add[hid(x1, y1)][hid(x2, y2)] = hid(a.plus(x1, x2), b.plus(y1, y2));
  p.mul.assign(p.v_size, std::vector<int>(p.v_size));
  p.act.assign(p.v_size, std::vector<int>(p.h_size));
  for (int x1 = 0; x1 < a.v_size; ++x1)
    for (int y1 = 0; y1 < b.v_size; ++y1) {
      for (int x2 = 0; x2 < a.v_size; ++x2)
        for (int y2 = 0; y2 < b.v_size; ++y2)
          p.mul[vid(x1, y1)][vid(x2, y2)] = vid(a.times(x1, x2), b.times(y1, y2));
      for (int x2 = 0; x2 < a.h_size; ++x2)
        for (int y2 = 0; y2 < b.h_size; ++y2)
          p.act[vid(x1, y1)][hid(x2, y2)] = hid(a.action(x1, x2), b.action(y1, y2));
    }
  p.ins.resize(p.h_size);
  for (int x = 0; x < a.h_size; ++x)
    for (int y = 0; y < b.h_size; ++y) p.ins[hid(x, y)] = vid(a.ins[x], b.ins[y]);

  ProductWithMaps out;
  out.right_h_size = b.h_size;
  out.right_v_size = b.v_size;
  std::map<std::vector<int>, int> row_class;
  out.v_map.resize(p.v_size);
  int classes = 0;
  for (int v = 0; v < p.v_size; ++v) {
    auto [it, fresh] = row_class.try_emplace(p.act[v], classes);
    if (fresh) ++classes;
    out.v_map[v] = it->second;
  }
  out.algebra = faithful_quotient(p);
  return out;
}

Subalgebra generated_subalgebra(const FiniteForestAlgebra& a, const LetterMap& lm) {
  check_shape(a);
  std::vector<bool> in_h(a.h_size, false), in_v(a.v_size, false);
  in_h[a.zero_h] = true;
  in_v[a.one_v] = true;
  for (const Label& l : lm.letters) in_v[lm.at(l)] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    auto add_h = [&](int h) {
      if (!in_h[h]) in_h[h] = changed = true;
    };
    auto add_v = [&](int v) {
      if (!in_v[v]) in_v[v] = changed = true;
    };
    for (int x = 0; x < a.h_size; ++x) {
      if (!in_h[x]) continue;
      add_v(a.ins[x]);
      for (int y = 0; y < a.h_size; ++y)
        if (in_h[y]) add_h(a.plus(x, y));
    }
    for (int v = 0; v < a.v_size; ++v) {
      if (!in_v[v]) continue;
      for (int w = 0; w < a.v_size; ++w)
        if (in_v[w]) add_v(a.times(v, w));
      for (int x = 0; x < a.h_size; ++x)
        if (in_h[x]) add_h(a.action(v, x));
    }
  }

  std::vector<int> h_map(a.h_size, -1), v_map(a.v_size, -1);
  std::vector<int> h_elems, v_elems;
  for (int h = 0; h < a.h_size; ++h)
    if (in_h[h]) {
      h_map[h] = static_cast<int>(h_elems.size());
      h_elems.push_back(h);
    }
  for (int v = 0; v < a.v_size; ++v)
    if (in_v[v]) {
      v_map[v] = static_cast<int>(v_elems.size());
      v_elems.push_back(v);
    }

  FiniteForestAlgebra s;
  s.h_size = static_cast<int>(h_elems.size());
  s.v_size = static_cast<int>(v_elems.size());
  s.zero_h = h_map[a.zero_h];
  s.one_v = v_map[a.one_v];
  s.add.assign(s.h_size, std::vector<int>(s.h_size));
  for (int i = 0; i < s.h_size; ++i)
    for (int j = 0; j < s.h_size; ++j) s.add[i][j] = h_map[a.plus(h_elems[i], h_elems[j])];
  s.mul.assign(s.v_size, std::vector<int>(s.v_size));
  s.act.assign(s.v_size, std::vector<int>(s.h_size));
  for (int i = 0; i < s.v_size; ++i) {
    for (int j = 0; j < s.v_size; ++j) s.mul[i][j] = v_map[a.times(v_elems[i], v_elems[j])];
    for (int j = 0; j < s.h_size; ++j) s.act[i][j] = h_map[a.action(v_elems[i], h_elems[j])];
  }
  s.ins.resize(s.h_size);
  for (int i = 0; i < s.h_size; ++i) s.ins[i] = v_map[a.ins[h_elems[i]]];
  if (!a.h_names.empty()) {
    s.h_names.resize(s.h_size);
    for (int i = 0; i < s.h_size; ++i) s.h_names[i] = a.h_names[h_elems[i]];
  }
  if (!a.v_names.empty()) {
    s.v_names.resize(s.v_size);
    for (int i = 0; i < s.v_size; ++i) s.v_names[i] = a.v_names[v_elems[i]];
  }

  // V may no longer be faithful relative to the generated H; merge rows.
  std::map<std::vector<int>, int> row_class;
  std::vector<int> merge(s.v_size);
  std::vector<int> reps;
  for (int v = 0; v < s.v_size; ++v) {
    auto [it, fresh] = row_class.try_emplace(s.act[v], static_cast<int>(reps.size()));
    if (fresh) reps.push_back(v);
    merge[v] = it->second;
  }
  Subalgebra out;
  if (static_cast<int>(reps.size()) != s.v_size) {
    out.algebra = faithful_quotient(s);
    for (int v = 0; v < a.v_size; ++v)
      if (v_map[v] >= 0) v_map[v] = merge[v_map[v]];
  } else {
    out.algebra = std::move(s);
  }
  out.h_map = std::move(h_map);
  out.v_map = std::move(v_map);
  std::map<Label, int> letters;
  for (const Label& l : lm.letters) letters[l] = out.v_map[lm.at(l)];
  out.letter_map = LetterMap::of(letters);
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (x > y) std::swap(x, y);  // smaller index stays the representative
    parent[y] = x;
    return true;
  }
};

}  // namespace

Morphism distributive_reflection(const FiniteForestAlgebra& a) {
  check_shape(a);
  UnionFind uf(a.h_size);
  for (int v = 0; v < a.v_size; ++v)
    for (int x = 0; x < a.h_size; ++x)
      for (int y = 0; y < a.h_size; ++y)
        uf.unite(a.action(v, a.plus(x, y)), a.plus(a.action(v, x), a.action(v, y)));
  // Close into a congruence compatible with + and the action.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < a.h_size; ++x)
      for (int y = x + 1; y < a.h_size; ++y) {
        if (uf.find(x) != uf.find(y)) continue;
        for (int v = 0; v < a.v_size; ++v)
          changed |= uf.unite(a.action(v, x), a.action(v, y));
        for (int z = 0; z < a.h_size; ++z) {
          changed |= uf.unite(a.plus(x, z), a.plus(y, z));
          changed |= uf.unite(a.plus(z, x), a.plus(z, y));
        }
      }
  }

  std::vector<int> h_map(a.h_size, -1);
  std::vector<int> h_reps;
  for (int h = 0; h < a.h_size; ++h)
    if (uf.find(h) == h) {
      h_map[h] = static_cast<int>(h_reps.size());
      h_reps.push_back(h);
    }
  for (int h = 0; h < a.h_size; ++h) h_map[h] = h_map[uf.find(h)];

  std::map<std::vector<int>, int> row_class;
  std::vector<int> v_map(a.v_size);
  std::vector<int> v_reps;
  for (int v = 0; v < a.v_size; ++v) {
    std::vector<int> row(a.h_size);
    for (int h = 0; h < a.h_size; ++h) row[h] = h_map[a.action(v, h)];
    auto [it, fresh] = row_class.try_emplace(row, static_cast<int>(v_reps.size()));
    if (fresh) v_reps.push_back(v);
    v_map[v] = it->second;
  }

  FiniteForestAlgebra q;
  q.h_size = static_cast<int>(h_reps.size());
  q.v_size = static_cast<int>(v_reps.size());
  q.zero_h = h_map[a.zero_h];
  q.one_v = v_map[a.one_v];
  q.add.assign(q.h_size, std::vector<int>(q.h_size));
  for (int i = 0; i < q.h_size; ++i)
    for (int j = 0; j < q.h_size; ++j) q.add[i][j] = h_map[a.plus(h_reps[i], h_reps[j])];
  q.mul.assign(q.v_size, std::vector<int>(q.v_size));
  q.act.assign(q.v_size, std::vector<int>(q.h_size));
  for (int i = 0; i < q.v_size; ++i) {
    for (int j = 0; j < q.v_size; ++j) q.mul[i][j] = v_map[a.times(v_reps[i], v_reps[j])];
    for (int j = 0; j < q.h_size; ++j) q.act[i][j] = h_map[a.action(v_reps[i], h_reps[j])];
  }
  q.ins.resize(q.h_size);
  for (int i = 0; i < q.h_size; ++i) q.ins[i] = v_map[a.ins[h_reps[i]]];

  Morphism m;
  m.target = std::move(q);
  m.h_map = std::move(h_map);
  m.v_map = std::move(v_map);
  return m;
}

std::string check_morphism(const FiniteForestAlgebra& src, const Morphism& m) {
  const FiniteForestAlgebra& t = m.target;
  if (m.h_map[src.zero_h] != t.zero_h) return "zero not preserved";
  if (m.v_map[src.one_v] != t.one_v) return "one not preserved";
  for (int x = 0; x < src.h_size; ++x)
    for (int y = 0; y < src.h_size; ++y)
      if (m.h_map[src.plus(x, y)] != t.plus(m.h_map[x], m.h_map[y]))
        return "+ not preserved at (" + std::to_string(x) + "," + std::to_string(y) + ")";
  for (int v = 0; v < src.v_size; ++v)
    for (int w = 0; w < src.v_size; ++w)
      if (m.v_map[src.times(v, w)] != t.times(m.v_map[v], m.v_map[w]))
        return "mul not preserved at (" + std::to_string(v) + "," + std::to_string(w) + ")";
  for (int v = 0; v < src.v_size; ++v)
    for (int h = 0; h < src.h_size; ++h)
      if (m.h_map[src.action(v, h)] != t.action(m.v_map[v], m.h_map[h]))
        return "action not preserved at (" + std::to_string(v) + "," + std::to_string(h) + ")";
  for (int h = 0; h < src.h_size; ++h)
    if (m.v_map[src.ins[h]] != t.ins[m.h_map[h]])
      return "insertion not preserved at h=" + std::to_string(h);
  return "";
}

// ---------------------------------------------------------------------------
// Rules and traces

std::vector<Rule> enumerate_rules(const FiniteForestAlgebra& a, const LetterMap& lm,
                                  long long cap) {
  if (a.h_size > 60) throw ResourceLimitError("rule enumeration: H too large");
  long long count = static_cast<long long>(lm.letters.size()) * (1LL << a.h_size);
  if (count > cap) throw ResourceLimitError("rule enumeration exceeds cap");
  std::vector<Rule> rules;
  rules.reserve(count);
  for (const Label& l : lm.letters) {
    int lv = lm.at(l);
    for (std::uint64_t mask = 0; mask < (1ULL << a.h_size); ++mask) {
      Rule r;
      r.label = l;
      int sum = a.zero_h;
      for (int h = 0; h < a.h_size; ++h)
        if (mask & (1ULL << h)) {
          r.children.push_back(h);
          sum = a.plus(sum, h);
        }
      r.result = a.action(lv, sum);
      rules.push_back(std::move(r));
    }
  }
  std::sort(rules.begin(), rules.end());
  return rules;
}

bool is_trace(const std::vector<Rule>& seq) {
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const auto& kids = seq[i].children;
    if (!std::binary_search(kids.begin(), kids.end(), seq[i + 1].result)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// File formats

std::string write_algebra(const FiniteForestAlgebra& a) {
  std::ostringstream out;
  out << "FA 1\n";
  out << "H " << a.h_size << "\n";
  out << "V " << a.v_size << "\n";
  out << "ZERO " << a.zero_h << "\n";
  out << "ONE " << a.one_v << "\n";
  for (int i = 0; i < a.h_size; ++i) {
    out << "ADDROW " << i << ":";
    for (int x : a.add[i]) out << ' ' << x;
    out << "\n";
  }
  for (int i = 0; i < a.v_size; ++i) {
    out << "MULROW " << i << ":";
    for (int x : a.mul[i]) out << ' ' << x;
    out << "\n";
  }
  for (int i = 0; i < a.v_size; ++i) {
    out << "ACTROW " << i << ":";
    for (int x : a.act[i]) out << ' ' << x;
    out << "\n";
  }
  for (int i = 0; i < a.h_size; ++i) out << "INS " << i << " " << a.ins[i] << "\n";
  if (!a.h_names.empty())
    for (int i = 0; i < a.h_size; ++i)
      if (!a.h_names[i].empty()) out << "HNAME " << i << " " << a.h_names[i] << "\n";
  if (!a.v_names.empty())
    for (int i = 0; i < a.v_size; ++i)
      if (!a.v_names[i].empty()) out << "VNAME " << i << " " << a.v_names[i] << "\n";
  return out.str();
}

namespace {

std::vector<std::string> tokenize_line(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':') {
      if (!cur.empty()) toks.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

int parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FileFormatError(where + ": expected integer, got '" + s + "'");
  }
}

}  // namespace

FiniteForestAlgebra read_algebra(std::istream& in) {
  FiniteForestAlgebra a;
  bool header = false, have_h = false, have_v = false;
  std::string line;
  int lineno = 0;
  auto where = [&]() { return "line " + std::to_string(lineno); };
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    auto need = [&](std::size_t n) {
      if (toks.size() != n) throw FileFormatError(where() + ": malformed " + kw + " line");
    };
    if (kw == "FA") {
      need(2);
      if (toks[1] != "1") throw FileFormatError(where() + ": unsupported format version");
      header = true;
    } else if (kw == "H") {
      need(2);
      a.h_size = parse_int(toks[1], where());
      a.add.assign(a.h_size, {});
      a.ins.assign(a.h_size, -1);
      have_h = true;
    } else if (kw == "V") {
      need(2);
      a.v_size = parse_int(toks[1], where());
      a.mul.assign(a.v_size, {});
      a.act.assign(a.v_size, {});
      have_v = true;
    } else if (kw == "ZERO") {
      need(2);
      a.zero_h = parse_int(toks[1], where());
    } else if (kw == "ONE") {
      need(2);
      a.one_v = parse_int(toks[1], where());
    } else if (kw == "ADDROW" || kw == "MULROW" || kw == "ACTROW") {
      if (!have_h || !have_v) throw FileFormatError(where() + ": row before H/V sizes");
      if (toks.size() < 2) throw FileFormatError(where() + ": malformed row");
      int idx = parse_int(toks[1], where());
      std::vector<int> row;
      for (std::size_t i = 2; i < toks.size(); ++i) row.push_back(parse_int(toks[i], where()));
      auto store = [&](std::vector<std::vector<int>>& table, int n, std::size_t width) {
        if (idx < 0 || idx >= n) throw FileFormatError(where() + ": row index out of range");
        if (row.size() != width) throw FileFormatError(where() + ": wrong row width");
        table[idx] = row;
      };
      if (kw == "ADDROW") store(a.add, a.h_size, a.h_size);
      if (kw == "MULROW") store(a.mul, a.v_size, a.v_size);
      if (kw == "ACTROW") store(a.act, a.v_size, a.h_size);
    } else if (kw == "INS") {
      need(3);
      int h = parse_int(toks[1], where());
      if (h < 0 || h >= a.h_size) throw FileFormatError(where() + ": INS index out of range");
      a.ins[h] = parse_int(toks[2], where());
    } else if (kw == "HNAME") {
      need(3);
      int h = parse_int(toks[1], where());
      if (h < 0 || h >= a.h_size) throw FileFormatError(where() + ": HNAME out of range");
      a.h_names.resize(a.h_size);
      a.h_names[h] = toks[2];
    } else if (kw == "VNAME") {
      need(3);
      int v = parse_int(toks[1], where());
      if (v < 0 || v >= a.v_size) throw FileFormatError(where() + ": VNAME out of range");
      a.v_names.resize(a.v_size);
      a.v_names[v] = toks[2];
    } else {
      throw FileFormatError(where() + ": unknown keyword '" + kw + "'");
    }
  }
  if (!header) throw FileFormatError("missing FA header");
  for (int h = 0; h < a.h_size; ++h) {
    if (a.add[h].empty()) throw FileFormatError("missing ADDROW " + std::to_string(h));
    if (a.ins[h] < 0) throw FileFormatError("missing INS " + std::to_string(h));
  }
  for (int v = 0; v < a.v_size; ++v) {
    if (a.mul[v].empty()) throw FileFormatError("missing MULROW " + std::to_string(v));
    if (a.act[v].empty()) throw FileFormatError("missing ACTROW " + std::to_string(v));
  }
  check_shape(a);
  return a;
}

FiniteForestAlgebra load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open " + path);
  try {
    return read_algebra(in);
  } catch (const FileFormatError& e) {
    throw FileFormatError(path + ": " + e.what());
  }
}

void save_algebra(const FiniteForestAlgebra& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  out << write_algebra(a);
}

std::string write_letter_map(const LetterMap& lm) {
  std::ostringstream out;
  for (const Label& l : lm.letters) out << "LETTER " << l << " " << lm.at(l) << "\n";
  return out.str();
}

LetterMap read_letter_map(std::istream& in) {
  std::map<Label, int> assignment;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (toks[0] != "LETTER" || toks.size() != 3)
      throw FileFormatError("line " + std::to_string(lineno) + ": expected LETTER alpha v");
    assignment[toks[1]] = parse_int(toks[2], "line " + std::to_string(lineno));
  }
  return LetterMap::of(assignment);
}

LetterMap load_letter_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open " + path);
  try {
    return read_letter_map(in);
  } catch (const FileFormatError& e) {
    throw FileFormatError(path + ": " + e.what());
  }
}

void save_letter_map(const LetterMap& lm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot open " + path + " for writing");
  out << write_letter_map(lm);
}

// ---------------------------------------------------------------------------
// Row-generated algebras

RowAlgebra build_row_algebra(const RowAlgebraSpec& spec) {
  const int m0 = spec.h_size;
  if (m0 <= 0) throw std::invalid_argument("row algebra needs a nonempty H");

  std::vector<int> keep(m0, -1);
  std::vector<int> elems;
  if (spec.restrict_to_reachable) {
    std::vector<bool> in(m0, false);
    in[spec.zero_h] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int x = 0; x < m0; ++x) {
        if (!in[x]) continue;
        for (int y = 0; y < m0; ++y)
          if (in[y] && !in[spec.add[x][y]]) in[spec.add[x][y]] = changed = true;
        for (const auto& [label, row] : spec.letter_rows) {
          (void)label;
          if (!in[row[x]]) in[row[x]] = changed = true;
        }
      }
    }
    for (int h = 0; h < m0; ++h)
      if (in[h]) {
        keep[h] = static_cast<int>(elems.size());
        elems.push_back(h);
      }
  } else {
    for (int h = 0; h < m0; ++h) {
      keep[h] = h;
      elems.push_back(h);
    }
  }
  const int m = static_cast<int>(elems.size());

  FiniteForestAlgebra a;
  a.h_size = m;
  a.zero_h = keep[spec.zero_h];
  a.add.assign(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      int s = spec.add[elems[i]][elems[j]];
      if (keep[s] < 0) throw std::invalid_argument("H not closed under + on reachable part");
      a.add[i][j] = keep[s];
    }

  auto restrict_row = [&](const std::vector<int>& row) {
    std::vector<int> r(m);
    for (int i = 0; i < m; ++i) {
      if (keep[row[elems[i]]] < 0)
        throw std::invalid_argument("generator row leaves the reachable part");
      r[i] = keep[row[elems[i]]];
    }
    return r;
  };

  std::map<std::vector<int>, int> v_index;
  std::vector<std::vector<int>> rows;
  auto intern = [&](const std::vector<int>& row) {
    auto [it, fresh] = v_index.try_emplace(row, static_cast<int>(rows.size()));
    if (fresh) rows.push_back(row);
    return it->second;
  };
  std::vector<int> identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  a.one_v = intern(identity);
  std::map<Label, int> letters;
  for (const auto& [label, row] : spec.letter_rows) letters[label] = intern(restrict_row(row));
  a.ins.resize(m);
  for (int h = 0; h < m; ++h) a.ins[h] = intern(a.add[h]);

  // Close under composition, both orders per pair; every element pairs with
  // all elements older than itself when its turn comes, so the closure is
  // complete once the loop catches up with the growth.
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      std::vector<int> comp(m);
      for (int x = 0; x < m; ++x) comp[x] = rows[i][rows[j][x]];
      intern(comp);
      for (int x = 0; x < m; ++x) comp[x] = rows[j][rows[i][x]];
      intern(comp);
    }

  a.v_size = static_cast<int>(rows.size());
  a.act.assign(a.v_size, std::vector<int>(m));
  a.mul.assign(a.v_size, std::vector<int>(a.v_size));
  for (int v = 0; v < a.v_size; ++v) {
    a.act[v] = rows[v];
    for (int w = 0; w < a.v_size; ++w) {
      std::vector<int> comp(m);
      for (int x = 0; x < m; ++x) comp[x] = rows[v][rows[w][x]];
      auto it = v_index.find(comp);
      if (it == v_index.end()) throw std::logic_error("row closure not closed");
      a.mul[v][w] = it->second;
    }
  }

  RowAlgebra out;
  out.algebra = std::move(a);
  out.letter_map = LetterMap::of(letters);
  out.h_map = std::move(keep);
  return out;
}

}  // namespace forestalg
