#include "forestalg/wreath.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace forestalg {

int WreathAlgebra::h_index(int h1, int h2) const {
  return h1 * right.h_size + h2;
}

namespace {

using VElem = std::pair<std::vector<int>, int>;  // (row over right H, right V)

VElem wreath_mul(const FiniteForestAlgebra& left, const FiniteForestAlgebra& right,
                 const VElem& a, const VElem& b) {
  std::vector<int> row(right.h_size);
  for (int h = 0; h < right.h_size; ++h)
    row[h] = left.times(a.first[right.action(b.second, h)], b.first[h]);
  return {std::move(row), right.times(a.second, b.second)};
}

std::pair<int, int> wreath_act(const FiniteForestAlgebra& left,
                               const FiniteForestAlgebra& right, const VElem& v,
                               std::pair<int, int> h) {
  return {left.action(v.first[h.second], h.first), right.action(v.second, h.second)};
}

VElem wreath_ins(const FiniteForestAlgebra& left, const FiniteForestAlgebra& right,
                 std::pair<int, int> h) {
  return {std::vector<int>(right.h_size, left.ins[h.first]), right.ins[h.second]};
}

}  // namespace

WreathAlgebra wreath_product(const FiniteForestAlgebra& left,
                             const FiniteForestAlgebra& right, long long cap) {
  double size = std::pow(static_cast<double>(left.v_size), right.h_size) *
                right.v_size;
  if (size > static_cast<double>(cap))
    throw ResourceLimitError("full wreath product exceeds cap");

  WreathAlgebra w;
  w.left = left;
  w.right = right;

  const int m1 = left.h_size, m2 = right.h_size;
  const int n1 = left.v_size, n2 = right.v_size;
  long long funcs = 1;
  for (int i = 0; i < m2; ++i) funcs *= n1;

  FiniteForestAlgebra& a = w.algebra;
  a.h_size = m1 * m2;
  a.v_size = static_cast<int>(funcs * n2);
  w.h_pair.resize(a.h_size);
  for (int x = 0; x < m1; ++x)
    for (int y = 0; y < m2; ++y) w.h_pair[x * m2 + y] = {x, y};
  a.zero_h = left.zero_h * m2 + right.zero_h;

  // Function rows in lexicographic order, first coordinate most significant.
  w.v_func.reserve(a.v_size);
  w.v_right.reserve(a.v_size);
  std::map<VElem, int> v_index;
  std::vector<int> row(m2, 0);
  for (long long fi = 0; fi < funcs; ++fi) {
    long long rest = fi;
    for (int h = m2 - 1; h >= 0; --h) {
      row[h] = static_cast<int>(rest % n1);
      rest /= n1;
    }
    for (int v2 = 0; v2 < n2; ++v2) {
      v_index[{row, v2}] = static_cast<int>(w.v_func.size());
      w.v_func.push_back(row);
      w.v_right.push_back(v2);
    }
  }

  a.one_v = v_index.at({std::vector<int>(m2, left.one_v), right.one_v});
  a.add.assign(a.h_size, std::vector<int>(a.h_size));
  for (int i = 0; i < a.h_size; ++i)
    for (int j = 0; j < a.h_size; ++j) {
      auto [x1, y1] = w.h_pair[i];
      auto [x2, y2] = w.h_pair[j];
      a.add[i][j] = left.plus(x1, x2) * m2 + right.plus(y1, y2);
    }
  a.mul.assign(a.v_size, std::vector<int>(a.v_size));
  a.act.assign(a.v_size, std::vector<int>(a.h_size));
  for (int v = 0; v < a.v_size; ++v) {
    VElem ve{w.v_func[v], w.v_right[v]};
    for (int u = 0; u < a.v_size; ++u)
      a.mul[v][u] = v_index.at(wreath_mul(left, right, ve, {w.v_func[u], w.v_right[u]}));
    for (int h = 0; h < a.h_size; ++h) {
      auto r = wreath_act(left, right, ve, w.h_pair[h]);
      a.act[v][h] = r.first * m2 + r.second;
    }
  }
  a.ins.resize(a.h_size);
  for (int h = 0; h < a.h_size; ++h)
    a.ins[h] = v_index.at(wreath_ins(left, right, w.h_pair[h]));
  return w;
}

GeneratedWreath wreath_generated(const FiniteForestAlgebra& left,
                                 const FiniteForestAlgebra& right,
                                 const LetterMap& l2,
                                 const std::map<Label, std::vector<int>>& g,
                                 long long cap) {
  using HElem = std::pair<int, int>;
  std::map<HElem, int> h_index;
  std::vector<HElem> h_elems;
  std::map<VElem, int> v_index;
  std::vector<VElem> v_elems;
  auto intern_h = [&](const HElem& h) {
    auto [it, fresh] = h_index.try_emplace(h, static_cast<int>(h_elems.size()));
    if (fresh) {
      if (static_cast<long long>(h_elems.size() + v_elems.size()) >= cap)
        throw ResourceLimitError("generated wreath closure exceeds cap");
      h_elems.push_back(h);
    }
    return it->second;
  };
  auto intern_v = [&](const VElem& v) {
    auto [it, fresh] = v_index.try_emplace(v, static_cast<int>(v_elems.size()));
    if (fresh) {
      if (static_cast<long long>(h_elems.size() + v_elems.size()) >= cap)
        throw ResourceLimitError("generated wreath closure exceeds cap");
      v_elems.push_back(v);
    }
    return it->second;
  };

  intern_h({left.zero_h, right.zero_h});
  intern_v({std::vector<int>(right.h_size, left.one_v), right.one_v});
  std::map<Label, VElem> letter_elems;
  for (const Label& l : l2.letters) {
    auto it = g.find(l);
    if (it == g.end()) throw std::invalid_argument("missing g row for letter " + l);
    if (static_cast<int>(it->second.size()) != right.h_size)
      throw std::invalid_argument("g row has wrong width for letter " + l);
    for (int v1 : it->second)
      if (v1 < 0 || v1 >= left.v_size) throw std::invalid_argument("g row value out of range");
    VElem ve{it->second, l2.at(l)};
    letter_elems[l] = ve;
    intern_v(ve);
  }

  // Round-based closure; element lists only grow, so rescanning up to the
  // sizes captured at the top of each round reaches the fixpoint.
  std::size_t done_h = 0, done_v = 0;
  while (done_h < h_elems.size() || done_v < v_elems.size()) {
    std::size_t nh = h_elems.size(), nv = v_elems.size();
    for (std::size_t i = 0; i < nh; ++i)
      for (std::size_t j = (i < done_h ? done_h : 0); j < nh; ++j) {
        HElem x = h_elems[i], y = h_elems[j];
        intern_h({left.plus(x.first, y.first), right.plus(x.second, y.second)});
        intern_h({left.plus(y.first, x.first), right.plus(y.second, x.second)});
      }
    for (std::size_t i = done_h; i < nh; ++i)
      intern_v(wreath_ins(left, right, h_elems[i]));
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t j = (i < done_v ? done_v : 0); j < nv; ++j) {
        intern_v(wreath_mul(left, right, v_elems[i], v_elems[j]));
        intern_v(wreath_mul(left, right, v_elems[j], v_elems[i]));
      }
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t j = 0; j < nh; ++j) {
        if (i < done_v && j < done_h) continue;
        intern_h(wreath_act(left, right, v_elems[i], h_elems[j]));
      }
    done_h = nh;
    done_v = nv;
  }

  WreathAlgebra w;
  w.left = left;
  w.right = right;
  w.h_pair = h_elems;
  FiniteForestAlgebra& a = w.algebra;
  a.h_size = static_cast<int>(h_elems.size());
  a.v_size = static_cast<int>(v_elems.size());
  a.zero_h = h_index.at({left.zero_h, right.zero_h});
  a.one_v = v_index.at({std::vector<int>(right.h_size, left.one_v), right.one_v});
  a.add.assign(a.h_size, std::vector<int>(a.h_size));
  for (int i = 0; i < a.h_size; ++i)
    for (int j = 0; j < a.h_size; ++j)
      a.add[i][j] = h_index.at({left.plus(h_elems[i].first, h_elems[j].first),
                                right.plus(h_elems[i].second, h_elems[j].second)});
  a.mul.assign(a.v_size, std::vector<int>(a.v_size));
  a.act.assign(a.v_size, std::vector<int>(a.h_size));
  for (int v = 0; v < a.v_size; ++v) {
    for (int u = 0; u < a.v_size; ++u)
      a.mul[v][u] = v_index.at(wreath_mul(left, right, v_elems[v], v_elems[u]));
    for (int h = 0; h < a.h_size; ++h)
      a.act[v][h] = h_index.at(wreath_act(left, right, v_elems[v], h_elems[h]));
  }
  a.ins.resize(a.h_size);
  for (int h = 0; h < a.h_size; ++h)
    a.ins[h] = v_index.at(wreath_ins(left, right, h_elems[h]));

  // Merge V elements that act equally on the generated H.
  std::map<std::vector<int>, int> row_class;
  std::vector<int> merge(a.v_size);
  std::vector<int> reps;
  for (int v = 0; v < a.v_size; ++v) {
    auto [it, fresh] = row_class.try_emplace(a.act[v], static_cast<int>(reps.size()));
    if (fresh) reps.push_back(v);
    merge[v] = it->second;
  }
  if (static_cast<int>(reps.size()) != a.v_size) {
    a = faithful_quotient(a);
    for (int r : reps) {
      w.v_func.push_back(v_elems[r].first);
      w.v_right.push_back(v_elems[r].second);
    }
  } else {
    for (const auto& ve : v_elems) {
      w.v_func.push_back(ve.first);
      w.v_right.push_back(ve.second);
    }
  }

  GeneratedWreath out;
  std::map<Label, int> letters;
  for (const Label& l : l2.letters) letters[l] = merge[v_index.at(letter_elems[l])];
  out.letter_map = LetterMap::of(letters);
  out.wreath = std::move(w);
  return out;
}

Morphism project_right(const WreathAlgebra& w) {
  Morphism m;
  m.target = w.right;
  m.h_map.resize(w.algebra.h_size);
  for (int h = 0; h < w.algebra.h_size; ++h) m.h_map[h] = w.h_pair[h].second;
  m.v_map = w.v_right;
  return m;
}

namespace {

struct IsoSearch {
  const FiniteForestAlgebra& a;
  const FiniteForestAlgebra& b;
  std::vector<int> h_map;  // a.H -> b.H, -1 unassigned
  std::vector<bool> used;
  std::vector<int> v_map;

  bool consistent(int x) {
    for (int y = 0; y < a.h_size; ++y) {
      if (h_map[y] < 0) continue;
      if (h_map[a.plus(x, y)] >= 0 && h_map[a.plus(x, y)] != b.plus(h_map[x], h_map[y]))
        return false;
      if (h_map[a.plus(y, x)] >= 0 && h_map[a.plus(y, x)] != b.plus(h_map[y], h_map[x]))
        return false;
    }
    return true;
  }

  bool extend(int x) {
    if (x == a.h_size) return finish();
    if (h_map[x] >= 0) return consistent(x) && extend(x + 1);
    for (int y = 0; y < b.h_size; ++y) {
      if (used[y]) continue;
      h_map[x] = y;
      used[y] = true;
      if (consistent(x) && extend(x + 1)) return true;
      h_map[x] = -1;
      used[y] = false;
    }
    return false;
  }

  bool finish() {
    // The V bijection is forced by faithfulness: match action rows.
    std::map<std::vector<int>, int> b_rows;
    for (int v = 0; v < b.v_size; ++v) b_rows[b.act[v]] = v;
    v_map.assign(a.v_size, -1);
    std::vector<bool> v_used(b.v_size, false);
    for (int v = 0; v < a.v_size; ++v) {
      std::vector<int> row(b.h_size);
      for (int h = 0; h < a.h_size; ++h) row[h_map[h]] = h_map[a.action(v, h)];
      auto it = b_rows.find(row);
      if (it == b_rows.end() || v_used[it->second]) return false;
      v_map[v] = it->second;
      v_used[it->second] = true;
    }
    for (bool u : v_used)
      if (!u) return false;
    if (v_map[a.one_v] != b.one_v) return false;
    for (int v = 0; v < a.v_size; ++v)
      for (int u = 0; u < a.v_size; ++u)
        if (v_map[a.times(v, u)] != b.times(v_map[v], v_map[u])) return false;
    for (int h = 0; h < a.h_size; ++h)
      if (v_map[a.ins[h]] != b.ins[h_map[h]]) return false;
    return true;
  }
};

}  // namespace

std::optional<std::pair<std::vector<int>, std::vector<int>>> find_isomorphism(
    const FiniteForestAlgebra& a, const FiniteForestAlgebra& b) {
  if (a.h_size != b.h_size || a.v_size != b.v_size) return std::nullopt;
  IsoSearch s{a, b, std::vector<int>(a.h_size, -1), std::vector<bool>(b.h_size, false), {}};
  s.h_map[a.zero_h] = b.zero_h;
  s.used[b.zero_h] = true;
  if (!s.extend(0)) return std::nullopt;
  return std::make_pair(s.h_map, s.v_map);
}

}  // namespace forestalg
