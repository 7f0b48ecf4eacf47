#include "partition.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fp {

std::string show_table_letter(const TableLetter& l) {
  std::ostringstream os;
  if (l.is_t)
    os << 't' << l.factor << '.' << l.tri << '.' << l.edge;
  else {
    os << 'z' << l.z;
    if (l.sign < 0) os << '-';
  }
  return os.str();
}

std::string PartitionTable::serialize() const {
  std::ostringstream os;
  os << 'm' << m << ';';
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < 3; ++j) {
      for (size_t k = 0; k < cell[i][j].size(); ++k) {
        if (k) os << ' ';
        os << show_table_letter(cell[i][j][k]);
      }
      os << (j == 2 ? ';' : '|');
    }
  return os.str();
}

namespace {

bool inverse_z_pair(const TableLetter& a, const TableLetter& b) {
  return !a.is_t && !b.is_t && a.z == b.z && a.sign == -b.sign;
}

} // namespace

std::string validate_table(const TriangularSystem& S, const PartitionTable& T) {
  if (T.m != (int)S.eqs.size() || (int)T.cell.size() != T.m)
    return "table size does not match the system";
  if (T.p > 3 * T.m) return "more than 3m block letters";

  std::set<std::pair<int, int>> zseen;          // (id, sign)
  std::set<std::tuple<int, int, int>> tseen;    // (factor, tri, edge)
  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j) {
      const TableWord& w = T.cell[i][j];
      std::set<int> zpos, zneg;
      for (size_t k = 0; k < w.size(); ++k) {
        const TableLetter& l = w[k];
        if (l.is_t) {
          if (l.sign < 0) return "inverted t letter";
          if (l.factor != 1 && l.factor != 2) return "t letter factor out of range";
          if (l.edge < 1 || l.edge > 3) return "t letter edge out of range";
          if (!tseen.insert({l.factor, l.tri, l.edge}).second) return "t letter repeated";
        } else {
          if (l.z < 1 || l.z > T.p) return "block letter out of range";
          if (!zseen.insert({l.z, l.sign}).second) return "block letter repeated";
          (l.sign > 0 ? zpos : zneg).insert(l.z);
        }
        if (k && inverse_z_pair(w[k - 1], l)) return "cell word not reduced";
        if (k && w[k - 1].is_t && l.is_t && w[k - 1].factor == l.factor)
          return "adjacent t letters of one factor inside a cell";
      }
      for (int z : zpos)
        if (zneg.count(z)) return "block letter and its inverse share a cell";
    }

  for (int i = 0; i < T.m; ++i) {
    TableWord flat;
    for (int j = 0; j < 3; ++j)
      flat.insert(flat.end(), T.cell[i][j].begin(), T.cell[i][j].end());
    // consecutive t letters: the block word between them reduces to the
    // empty word exactly when they belong to the same central cycle
    int last = -1;
    for (size_t k = 0; k < flat.size(); ++k) {
      if (!flat[k].is_t) continue;
      if (last >= 0) {
        std::vector<TableLetter> gap;
        for (size_t g = last + 1; g < k; ++g) {
          if (!gap.empty() && inverse_z_pair(gap.back(), flat[g]))
            gap.pop_back();
          else
            gap.push_back(flat[g]);
        }
        bool same_cycle =
            flat[last].factor == flat[k].factor && flat[last].tri == flat[k].tri;
        if (gap.empty() != same_cycle) return "t separation violated";
      }
      last = (int)k;
    }
    // the triangle word must collapse once t letters are killed
    std::vector<TableLetter> st;
    for (const TableLetter& l : flat) {
      if (l.is_t) continue;
      if (!st.empty() && inverse_z_pair(st.back(), l))
        st.pop_back();
      else
        st.push_back(l);
    }
    if (!st.empty()) return "triangle word does not collapse";
  }

  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j)
      if (!S.eqs[i].r[j].is_var && T.cell[i][j].size() != 1)
        return "constant cell is not a single letter";
  return "";
}

int TriangleScheme::shape() const {
  if (triple_factor != 0) return 5;
  int nc = (corner[0] ? 1 : 0) + (corner[1] ? 1 : 0) + (corner[2] ? 1 : 0);
  return 4 - nc; // 1 full tripod .. 4 all cells empty
}

namespace {

// Cell words of one scheme with triangle-local block ids 1=A, 2=B, 3=C; the
// global renumbering happens in assemble(). Layout (A outermost):
//   cell 1 = [A][t1][B], cell 2 = [B^-1][t2][C], cell 3 = [C^-1][t3][A^-1].
std::array<TableWord, 3> scheme_cells(const TriangleScheme& sc, int tri1) {
  auto z = [](int id, int sign) {
    TableLetter l;
    l.z = id;
    l.sign = sign;
    return l;
  };
  auto t = [&](int edge) {
    TableLetter l;
    l.is_t = true;
    l.factor = sc.triple_factor;
    l.tri = tri1;
    l.edge = edge;
    return l;
  };
  const bool hast = sc.triple_factor != 0;
  std::array<TableWord, 3> c;
  if (sc.corner[0]) c[0].push_back(z(1, +1));
  if (hast) c[0].push_back(t(1));
  if (sc.corner[1]) c[0].push_back(z(2, +1));
  if (sc.corner[1]) c[1].push_back(z(2, -1));
  if (hast) c[1].push_back(t(2));
  if (sc.corner[2]) c[1].push_back(z(3, +1));
  if (sc.corner[2]) c[2].push_back(z(3, -1));
  if (hast) c[2].push_back(t(3));
  if (sc.corner[0]) c[2].push_back(z(1, -1));
  return c;
}

int scheme_cell_len(const TriangleScheme& sc, int j) {
  int t = sc.triple_factor != 0 ? 1 : 0;
  if (j == 0) return (sc.corner[0] ? 1 : 0) + t + (sc.corner[1] ? 1 : 0);
  if (j == 1) return (sc.corner[1] ? 1 : 0) + t + (sc.corner[2] ? 1 : 0);
  return (sc.corner[2] ? 1 : 0) + t + (sc.corner[0] ? 1 : 0);
}

// Block ids become z_1, z_2, ... in order of first occurrence, first
// occurrence positive; this is the canonical naming shared by enumeration
// and by solution extraction.
PartitionTable assemble(const std::vector<TriangleScheme>& picks) {
  PartitionTable T;
  T.m = (int)picks.size();
  T.cell.resize(T.m);
  int next = 0;
  for (int i = 0; i < T.m; ++i) {
    auto cells = scheme_cells(picks[i], i + 1);
    std::array<int, 4> remap = {0, 0, 0, 0};
    for (int j = 0; j < 3; ++j) {
      for (TableLetter& l : cells[j])
        if (!l.is_t) {
          if (remap[l.z] == 0) remap[l.z] = ++next;
          l.z = remap[l.z];
        }
      T.cell[i][j] = std::move(cells[j]);
    }
  }
  T.p = next;
  return T;
}

} // namespace

std::vector<PartitionTable> enumerate_partition_tables(const TriangularSystem& S) {
  const int m = (int)S.eqs.size();
  // per-triangle choices compatible with the constant cells
  std::vector<std::vector<TriangleScheme>> opts(m);
  for (int i = 0; i < m; ++i)
    for (int tf = 0; tf <= 2; ++tf)
      for (int mask = 0; mask < 8; ++mask) {
        TriangleScheme sc;
        sc.triple_factor = tf;
        sc.corner = {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
        bool ok = true;
        for (int j = 0; j < 3 && ok; ++j) {
          const Sym& r = S.eqs[i].r[j];
          if (r.is_var) continue;
          if (scheme_cell_len(sc, j) != 1) ok = false;
          // a constant carried by the central cycle must lie in its factor
          else if (tf != 0 && tf != r.c.factor)
            ok = false;
        }
        if (ok) opts[i].push_back(sc);
      }

  const int nv = (int)S.vars.size();
  std::vector<PartitionTable> out;
  std::vector<TriangleScheme> pick(m);
  std::vector<int> vstate(nv, -1); // -1 unknown, 0 all cells empty, 1 all nonempty

  auto rec = [&](auto&& self, int i) -> void {
    if (i == m) {
      PartitionTable T = assemble(pick);
      if (validate_table(S, T).empty()) out.push_back(std::move(T));
      return;
    }
    for (const TriangleScheme& sc : opts[i]) {
      std::vector<std::pair<int, int>> undo;
      bool ok = true;
      for (int j = 0; j < 3 && ok; ++j) {
        const Sym& r = S.eqs[i].r[j];
        if (!r.is_var) continue;
        int st = scheme_cell_len(sc, j) > 0 ? 1 : 0;
        if (vstate[r.var] == -1) {
          undo.push_back({r.var, -1});
          vstate[r.var] = st;
        } else if (vstate[r.var] != st)
          ok = false;
      }
      if (ok) {
        pick[i] = sc;
        self(self, i + 1);
      }
      for (auto& [v, s] : undo) vstate[v] = s;
    }
  };
  rec(rec, 0);

  std::sort(out.begin(), out.end(), [](const PartitionTable& a, const PartitionTable& b) {
    return a.serialize() < b.serialize();
  });
  return out;
}

namespace {

// Derives forced item values from the coefficient pins through the induced
// equations. A contradiction proves the generalised equation has no solution
// at all, so the table can be dropped without losing any solution of S.
std::string pinned_value_closure(const FreeProduct& G, const GenEq& W) {
  InducedSystem I = induced_system(W);
  std::vector<std::optional<Word>> pin(W.rho + 1);
  std::string err;
  bool changed = true;

  auto put = [&](int item, const Word& w) {
    if (!err.empty()) return;
    if (w.empty()) {
      err = "item " + std::to_string(item) + " forced trivial";
      return;
    }
    if (W.iterm[item] != 0 && itype(w) != W.iterm[item]) {
      err = "item " + std::to_string(item) + " pinned against its initial type";
      return;
    }
    if (W.tterm[item + 1] != 0 && ttype(w) != W.tterm[item + 1]) {
      err = "item " + std::to_string(item) + " pinned against its terminal type";
      return;
    }
    if (pin[item]) {
      if (!(*pin[item] == w))
        err = "item " + std::to_string(item) + " pinned to two different values";
      return;
    }
    pin[item] = w;
    changed = true;
  };

  // product of the items of a side when all are pinned, nullopt otherwise;
  // a collapsing concatenation is a contradiction (sides must be graphical)
  auto side_product = [&](const SideRef& s) -> std::optional<Word> {
    Word acc;
    for (int i = s.lo; i < s.hi; ++i) {
      if (!pin[i]) return std::nullopt;
      bool g = true;
      acc = G.concat(acc, *pin[i], &g);
      if (!g) {
        err = "pinned side collapses";
        return std::nullopt;
      }
    }
    return acc;
  };

  // target = required product of the side's items (side eps already folded
  // out by the caller); fills at most one unpinned item by segment lengths
  auto match_side = [&](const SideRef& s, const Word& target) {
    int hole = -1, pinned_len = 0;
    for (int i = s.lo; i < s.hi; ++i) {
      if (pin[i])
        pinned_len += pin[i]->len();
      else if (hole >= 0)
        return; // two unknowns, nothing to infer
      else
        hole = i;
    }
    if (hole < 0) return; // fully pinned; the caller compares values
    int hole_len = target.len() - pinned_len;
    if (hole_len <= 0) {
      err = "pinned side leaves no room for item " + std::to_string(hole);
      return;
    }
    int pos = 0;
    for (int i = s.lo; i < s.hi && err.empty(); ++i) {
      int n = i == hole ? hole_len : pin[i]->len();
      Word seg;
      seg.ls.assign(target.ls.begin() + pos, target.ls.begin() + pos + n);
      if (i == hole)
        put(i, seg);
      else if (!(*pin[i] == seg))
        err = "pinned item " + std::to_string(i) + " off its segment";
      pos += n;
    }
  };

  auto handle_pair = [&](const BasicEq& e) {
    if (!err.empty()) return;
    std::optional<Word> L = side_product(e.left);
    if (!err.empty()) return;
    std::optional<Word> R = side_product(e.right);
    if (!err.empty()) return;
    if (L && R) {
      Word lv = e.left.eps < 0 ? G.invert(*L) : *L;
      Word rv = e.right.eps < 0 ? G.invert(*R) : *R;
      if (!(lv == rv)) err = "pinned sides of a dual pair differ";
      return;
    }
    if (L) {
      Word t = e.left.eps * e.right.eps < 0 ? G.invert(*L) : *L;
      match_side(e.right, t);
    } else if (R) {
      Word t = e.left.eps * e.right.eps < 0 ? G.invert(*R) : *R;
      match_side(e.left, t);
    }
  };

  for (const CoeffEq& c : I.coeff) {
    Word w;
    w.ls.push_back(c.a);
    put(c.item, w);
  }

  while (changed && err.empty()) {
    changed = false;
    for (const Base& b : W.bases) {
      if (b.kind != BaseKind::Factor) continue;
      if (pin[b.alpha] && (pin[b.alpha]->len() != 1 || pin[b.alpha]->ls[0].factor != b.factor)) {
        err = "factor base item " + std::to_string(b.alpha) + " is not a letter of its factor";
        break;
      }
    }
    for (const FactorEq& f : I.factor) {
      if (!err.empty()) break;
      const FactorGroup& F = G.factor(f.factor);
      int hole = -1, nknown = 0;
      for (int k = 0; k < 3; ++k)
        if (pin[f.item[k]])
          ++nknown;
        else
          hole = k;
      if (nknown < 2) continue;
      // elements with the equation's signs applied; factor-base item shape
      // was checked above
      std::array<int, 3> el = {F.identity, F.identity, F.identity};
      for (int k = 0; k < 3; ++k)
        if (pin[f.item[k]]) {
          int e = pin[f.item[k]]->ls[0].elem;
          el[k] = f.eps[k] < 0 ? F.inv[e] : e;
        }
      if (nknown == 3) {
        if (F.mul_of(F.mul_of(el[0], el[1]), el[2]) != F.identity)
          err = "factor equation cannot vanish";
        continue;
      }
      // x0 x1 x2 = 1 with one unknown
      int before = F.identity, after = F.identity;
      for (int k = 0; k < hole; ++k) before = F.mul_of(before, el[k]);
      for (int k = hole + 1; k < 3; ++k) after = F.mul_of(after, el[k]);
      int v = F.mul_of(F.inv[before], F.inv[after]); // before * v * after = 1
      if (f.eps[hole] < 0) v = F.inv[v];
      if (v == F.identity) {
        err = "factor equation forces a trivial item";
        continue;
      }
      Word w;
      w.ls.push_back(Letter{f.factor, v});
      put(f.item[hole], w);
    }
    for (const BasicEq& e : I.basic) handle_pair(e);
    for (const BasicEq& e : I.boundary) handle_pair(e);
    if (!err.empty()) break;
  }
  return err;
}

} // namespace

std::optional<GEEntry> table_to_generalised_equation(const FreeProduct& G,
                                                     const TriangularSystem& S,
                                                     const PartitionTable& T,
                                                     std::string* why) {
  auto fail = [&](const std::string& e) -> std::optional<GEEntry> {
    if (why) *why = e;
    return std::nullopt;
  };
  {
    std::string e = validate_table(S, T);
    if (!e.empty()) return fail("invalid table: " + e);
  }

  struct PosInfo {
    TableLetter l;
    int lo = 0, hi = 0; // item range of the containing cell
  };
  std::vector<PosInfo> pos(1); // items are 1-based
  std::vector<std::array<std::pair<int, int>, 3>> span(T.m);
  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j) {
      int lo = (int)pos.size();
      for (const TableLetter& l : T.cell[i][j]) pos.push_back(PosInfo{l, 0, 0});
      int hi = (int)pos.size();
      for (int k = lo; k < hi; ++k) {
        pos[k].lo = lo;
        pos[k].hi = hi;
      }
      span[i][j] = {lo, hi};
    }
  const int rho = (int)pos.size() - 1;

  GEEntry E;
  E.table = T;
  GenEq& W = E.W;
  W.rho = rho;
  W.init_terms();

  std::string conflict;
  auto put_term = [&](std::vector<int>& t, int idx, int val) {
    if (t[idx] == 0)
      t[idx] = val;
    else if (t[idx] != val && conflict.empty())
      conflict = "boundary term conflict at " + std::to_string(idx);
  };

  // dual pair per block letter
  std::map<int, std::vector<int>> zocc;
  for (int k = 1; k <= rho; ++k)
    if (!pos[k].l.is_t) zocc[pos[k].l.z].push_back(k);
  for (auto& [z, occ] : zocc) {
    if (occ.size() != 2) return fail("block letter without a mate");
    int b = (int)W.bases.size();
    W.bases.push_back(variable_base(occ[0], occ[0] + 1, pos[occ[0]].l.sign, b + 1));
    W.bases.push_back(variable_base(occ[1], occ[1] + 1, pos[occ[1]].l.sign, b));
  }

  // dual pairs for every two occurrences of a variable, occurrences ordered
  // left-lexicographically by (triangle, cell)
  const int nv = (int)S.vars.size();
  struct Occ {
    int lo, hi, eps;
  };
  std::vector<std::vector<Occ>> occs(nv);
  std::vector<int> total(nv, 0);
  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j) {
      const Sym& r = S.eqs[i].r[j];
      if (!r.is_var) continue;
      ++total[r.var];
      auto [lo, hi] = span[i][j];
      if (lo < hi) occs[r.var].push_back({lo, hi, r.eps});
    }
  for (int v = 0; v < nv; ++v) {
    if (!occs[v].empty() && (int)occs[v].size() != total[v])
      return fail("variable with both empty and nonempty cells");
    for (size_t a = 0; a < occs[v].size(); ++a)
      for (size_t c = a + 1; c < occs[v].size(); ++c) {
        int b = (int)W.bases.size();
        W.bases.push_back(variable_base(occs[v][a].lo, occs[v][a].hi, occs[v][a].eps, b + 1));
        W.bases.push_back(variable_base(occs[v][c].lo, occs[v][c].hi, occs[v][c].eps, b));
      }
  }

  // factor-base triples for the central cycles; terms at the base itself are
  // unconditional, terms spilling onto a neighbour only when the neighbour
  // item lies in the same cell (cell values are words in normal form, so the
  // adjacent letter there is forced into the other factor)
  std::map<std::pair<int, int>, std::array<int, 4>> triples;
  for (int k = 1; k <= rho; ++k)
    if (pos[k].l.is_t)
      triples[{pos[k].l.factor, pos[k].l.tri}][pos[k].l.edge] = k;
  int tid = 0;
  for (auto& [key, at] : triples) {
    int kf = key.first;
    for (int e = 1; e <= 3; ++e)
      if (at[e] == 0) return fail("incomplete central cycle");
    for (int e = 1; e <= 3; ++e) {
      int n = at[e];
      W.bases.push_back(factor_base(n, n + 1, +1, kf, tid, e));
      put_term(W.iterm, n, kf);
      put_term(W.tterm, n + 1, kf);
      if (n > pos[n].lo) put_term(W.tterm, n, 3 - kf);
      if (n + 1 < pos[n].hi) put_term(W.iterm, n + 1, 3 - kf);
    }
    ++tid;
  }

  // constant bases; their cells have exactly one item, so no neighbours
  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j) {
      const Sym& r = S.eqs[i].r[j];
      if (r.is_var) continue;
      int lo = span[i][j].first;
      W.bases.push_back(constant_base(lo, r.c));
      put_term(W.iterm, lo, r.c.factor);
      put_term(W.tterm, lo + 1, r.c.factor);
    }
  if (!conflict.empty()) return fail(conflict);

  // propagate terms across dual pairs until stable
  auto unify = [&](int& a, int& b) -> bool {
    if (a == b) return false;
    if (a == 0) {
      a = b;
      return true;
    }
    if (b == 0) {
      b = a;
      return true;
    }
    if (conflict.empty()) conflict = "boundary terms conflict across a dual pair";
    return false;
  };
  bool moved = true;
  while (moved && conflict.empty()) {
    moved = false;
    for (const Base& mu : W.bases) {
      if (mu.kind != BaseKind::Variable) continue;
      const Base& dm = W.bases[mu.dual];
      if (mu.eps * dm.eps < 0) {
        moved |= unify(W.iterm[mu.alpha], W.tterm[dm.beta]);
        moved |= unify(W.tterm[mu.beta], W.iterm[dm.alpha]);
      } else {
        moved |= unify(W.iterm[mu.alpha], W.iterm[dm.alpha]);
        moved |= unify(W.tterm[mu.beta], W.tterm[dm.beta]);
      }
    }
  }
  if (!conflict.empty()) return fail(conflict);

  for (int i = 0; i < T.m; ++i) {
    int lo = span[i][0].first, hi = span[i][2].second;
    if (lo < hi) W.sections.push_back(Section{lo, hi, SectionClass::Variable, true});
  }

  {
    std::string e = validate(W, true);
    if (!e.empty()) return fail("construction produced an invalid equation: " + e);
  }
  {
    std::string e = pinned_value_closure(G, W);
    if (!e.empty()) return fail("pinned items contradict: " + e);
  }
  E.consistency = check_formal_consistency(W);

  E.px.resize(nv);
  for (int v = 0; v < nv; ++v) {
    if (total[v] == 0)
      E.px[v].kind = PxWord::Kind::Free;
    else if (occs[v].empty())
      E.px[v].kind = PxWord::Kind::Trivial;
    else
      E.px[v] = PxWord{PxWord::Kind::Span, occs[v][0].lo, occs[v][0].hi, occs[v][0].eps};
  }
  return E;
}

GEFamily ge_family(const FreeProduct& G, const TriangularSystem& S, int jobs) {
  (void)jobs;
  std::vector<PartitionTable> tabs = enumerate_partition_tables(S);
  const int n = (int)tabs.size();
  std::vector<std::optional<GEEntry>> built(n);
  std::vector<std::string> whys(n);
#ifdef _OPENMP
  int nt = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int i = 0; i < n; ++i) built[i] = table_to_generalised_equation(G, S, tabs[i], &whys[i]);
#else
  for (int i = 0; i < n; ++i) built[i] = table_to_generalised_equation(G, S, tabs[i], &whys[i]);
#endif
  GEFamily F;
  for (int i = 0; i < n; ++i) {
    if (built[i])
      F.entries.push_back(std::move(*built[i]));
    else
      F.rejected.push_back(GEFamily::Rejected{std::move(tabs[i]), whys[i]});
  }
  return F;
}

Assignment lift_solution(const FreeProduct& G, const TriangularSystem& S, const GEEntry& e,
                         const GESolution& H) {
  Assignment U;
  U.val.resize(S.vars.size());
  for (size_t v = 0; v < S.vars.size(); ++v) {
    const PxWord& p = e.px[v];
    if (p.kind != PxWord::Kind::Span) continue;
    Word w;
    for (int k = p.lo; k < p.hi; ++k) w = G.concat(w, H.val[k]);
    if (p.eps < 0) w = G.invert(w);
    U.val[v] = w;
  }
  return U;
}

namespace {

Word slice(const Word& w, int lo, int hi) {
  Word r;
  r.ls.assign(w.ls.begin() + lo, w.ls.begin() + hi);
  return r;
}

} // namespace

std::optional<Roundtrip> solution_roundtrip(const FreeProduct& G, const TriangularSystem& S,
                                            const Assignment& U, std::string* why) {
  auto fail = [&](const std::string& e) -> std::optional<Roundtrip> {
    if (why) *why = e;
    return std::nullopt;
  };
  if (U.val.size() != S.vars.size()) return fail("assignment arity mismatch");
  for (size_t i = 0; i < S.eqs.size(); ++i)
    if (!substitute(G, triangle_word(S.eqs[i]), U).empty())
      return fail("not a solution of equation " + std::to_string(i + 1));

  Roundtrip R;
  for (const Triangle& tr : S.eqs) {
    std::array<Word, 3> d;
    for (int j = 0; j < 3; ++j)
      d[j] = substitute(G, SymWord{tr.r[j]}, U);
    // maximal strict cancellations at the three seams; a letter pair that
    // merely merges inside one factor is left for the central cycle
    int nb = 0;
    while (nb < d[0].len() && nb < d[1].len() &&
           G.inv_letter(d[0].ls[d[0].len() - 1 - nb]) == d[1].ls[nb])
      ++nb;
    int nc = 0;
    while (nc < d[1].len() - nb && nc < d[2].len() &&
           G.inv_letter(d[1].ls[d[1].len() - 1 - nc]) == d[2].ls[nc])
      ++nc;
    int na = 0;
    while (na < d[0].len() - nb && na < d[2].len() - nc &&
           G.inv_letter(d[0].ls[na]) == d[2].ls[d[2].len() - 1 - na])
      ++na;

    TriangleScheme sc;
    sc.corner = {na > 0, nb > 0, nc > 0};
    if (na > 0) sc.corner_val[0] = slice(d[0], 0, na);
    if (nb > 0) sc.corner_val[1] = slice(d[0], d[0].len() - nb, d[0].len());
    if (nc > 0) sc.corner_val[2] = slice(d[1], d[1].len() - nc, d[1].len());
    std::array<Word, 3> res = {slice(d[0], na, d[0].len() - nb),
                               slice(d[1], nb, d[1].len() - nc),
                               slice(d[2], nc, d[2].len() - na)};
    int nonempty = (res[0].empty() ? 0 : 1) + (res[1].empty() ? 0 : 1) + (res[2].empty() ? 0 : 1);
    if (nonempty == 0) {
      sc.triple_factor = 0;
    } else {
      if (nonempty != 3 || res[0].len() != 1 || res[1].len() != 1 || res[2].len() != 1)
        return fail("cancellation scheme is not tree graded");
      int f = res[0].ls[0].factor;
      if (res[1].ls[0].factor != f || res[2].ls[0].factor != f)
        return fail("central letters span two factors");
      const FactorGroup& F = G.factor(f);
      if (F.mul_of(F.mul_of(res[0].ls[0].elem, res[1].ls[0].elem), res[2].ls[0].elem) !=
          F.identity)
        return fail("central letters do not vanish");
      sc.triple_factor = f;
      sc.triple_val = res;
    }
    R.scheme.push_back(sc);
  }

  R.table = assemble(R.scheme);
  {
    std::string e = validate_table(S, R.table);
    if (!e.empty()) return fail("extracted table invalid: " + e);
  }
  std::string ew;
  auto entry = table_to_generalised_equation(G, S, R.table, &ew);
  if (!entry) return fail("extracted table rejected: " + ew);
  R.entry = std::move(*entry);

  // the induced solution: block letters take the block's value at the
  // positive occurrence, central letters the residual letters
  R.H.val.assign(R.entry.W.rho + 1, Word{});
  int at = 1;
  for (int i = 0; i < R.table.m; ++i) {
    const TriangleScheme& sc = R.scheme[i];
    std::array<std::vector<Word>, 3> vals;
    const bool hast = sc.triple_factor != 0;
    if (sc.corner[0]) vals[0].push_back(sc.corner_val[0]);
    if (hast) vals[0].push_back(sc.triple_val[0]);
    if (sc.corner[1]) vals[0].push_back(sc.corner_val[1]);
    if (sc.corner[1]) vals[1].push_back(G.invert(sc.corner_val[1]));
    if (hast) vals[1].push_back(sc.triple_val[1]);
    if (sc.corner[2]) vals[1].push_back(sc.corner_val[2]);
    if (sc.corner[2]) vals[2].push_back(G.invert(sc.corner_val[2]));
    if (hast) vals[2].push_back(sc.triple_val[2]);
    if (sc.corner[0]) vals[2].push_back(G.invert(sc.corner_val[0]));
    for (int j = 0; j < 3; ++j)
      for (Word& w : vals[j]) R.H.val[at++] = std::move(w);
  }
  if (at != R.entry.W.rho + 1) return fail("induced solution arity mismatch");

  std::string hw;
  if (!check_solution(G, R.entry.W, R.H, &hw))
    return fail("induced solution rejected: " + hw);
  Assignment back = lift_solution(G, S, R.entry, R.H);
  for (size_t v = 0; v < U.val.size(); ++v) {
    // a variable absent from S is unconstrained and lifts to the empty word
    if (R.entry.px[v].kind == PxWord::Kind::Free) continue;
    if (!(back.val[v] == U.val[v])) return fail("lift does not reproduce the solution");
  }
  return R;
}

bool check_331(const PartitionTable& T) {
  // Stallings folding of the subgroup generated by the cell words; a single
  // letter lies in the subgroup exactly when the folded graph has a loop
  // with its label at the base vertex.
  std::map<std::tuple<int, int, int, int>, int> ids; // (is_t, a, b, c) -> label
  auto label_of = [&](const TableLetter& l) {
    auto key = l.is_t ? std::make_tuple(1, l.factor, l.tri, l.edge)
                      : std::make_tuple(0, l.z, 0, 0);
    auto it = ids.find(key);
    if (it == ids.end()) it = ids.emplace(key, (int)ids.size()).first;
    return it->second;
  };
  struct E {
    int u, v, lab;
  };
  std::vector<E> edges;
  int nv = 1;
  for (int i = 0; i < T.m; ++i)
    for (int j = 0; j < 3; ++j) {
      const TableWord& w = T.cell[i][j];
      if (w.empty()) continue;
      int cur = 0;
      for (size_t k = 0; k < w.size(); ++k) {
        int nxt = k + 1 == w.size() ? 0 : nv++;
        int lab = label_of(w[k]);
        if (!w[k].is_t && w[k].sign < 0)
          edges.push_back({nxt, cur, lab});
        else
          edges.push_back({cur, nxt, lab});
        cur = nxt;
      }
    }

  std::vector<int> par(nv);
  for (int i = 0; i < nv; ++i) par[i] = i;
  auto find = [&](int x) {
    while (par[x] != x) x = par[x] = par[par[x]];
    return x;
  };
  bool moved = true;
  while (moved) {
    moved = false;
    std::map<std::pair<int, int>, int> out, in;
    for (const E& e : edges) {
      int u = find(e.u), v = find(e.v);
      auto [io, fo] = out.emplace(std::make_pair(u, e.lab), v);
      if (!fo && find(io->second) != v) {
        par[find(io->second)] = v;
        moved = true;
        break;
      }
      auto [ii, fi] = in.emplace(std::make_pair(v, e.lab), u);
      if (!fi && find(ii->second) != u) {
        par[find(ii->second)] = u;
        moved = true;
        break;
      }
    }
  }
  int base = find(0);
  for (const auto& kv : ids) {
    bool loop = false;
    for (const E& e : edges)
      if (e.lab == kv.second && find(e.u) == base && find(e.v) == base) {
        loop = true;
        break;
      }
    if (!loop) return false;
  }
  return true;
}

} // namespace fp
