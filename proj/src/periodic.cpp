#include "periodic.h"

#include "transforms.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace fp {

namespace {

struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    p[b] = a; // smaller index wins, keeps class ids stable
    return true;
  }
};

// index of the section whose range contains the base, -1 if none does
int section_of_base(const GenEq& W, const Base& b) {
  for (int s = 0; s < (int)W.sections.size(); ++s)
    if (W.sections[s].lo <= b.alpha && b.beta <= W.sections[s].hi) return s;
  return -1;
}

// first-occurrence renumbering of an equivalence labeling
std::vector<int> normalize_classes(const std::vector<int>& cls) {
  std::vector<int> out(cls.size(), -1);
  std::map<int, int> seen;
  for (size_t i = 0; i < cls.size(); ++i) {
    auto it = seen.find(cls[i]);
    if (it == seen.end()) it = seen.emplace(cls[i], (int)seen.size()).first;
    out[i] = it->second;
  }
  return out;
}

// slots of the chosen sections together with the owning section position;
// parallel vectors, sorted by slot
struct SlotTable {
  std::vector<BSlot> slots;
  std::vector<int> owner;               // position into the section list
  std::map<std::pair<int, int>, int> at; // (section position, boundary) -> slot row
};

SlotTable slot_table(const GenEq& W, const std::vector<int>& secs) {
  std::set<int> meet;
  for (int a : secs)
    for (int b : secs)
      if (W.sections[a].hi == W.sections[b].lo) meet.insert(W.sections[a].hi);
  struct Row {
    BSlot s;
    int owner;
  };
  std::vector<Row> rows;
  for (int pos = 0; pos < (int)secs.size(); ++pos) {
    const Section& sec = W.sections[secs[pos]];
    for (int l = sec.lo; l <= sec.hi; ++l) {
      int side = 0;
      if (l == sec.lo && meet.count(l)) side = 2;
      else if (l == sec.hi && meet.count(l)) side = 1;
      rows.push_back({{l, side}, pos});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.s < y.s; });
  SlotTable t;
  for (int i = 0; i < (int)rows.size(); ++i) {
    t.slots.push_back(rows[i].s);
    t.owner.push_back(rows[i].owner);
    t.at[{rows[i].owner, rows[i].s.l}] = i;
  }
  return t;
}

// the variable bases whose own or dual range covers one of the items
std::vector<int> closure_bases(const GenEq& W, const std::vector<int>& items) {
  auto covers = [&](const Base& b) {
    for (int k : items)
      if (item_in_base(b, k)) return true;
    return false;
  };
  std::vector<int> out;
  for (int mu = 0; mu < (int)W.bases.size(); ++mu) {
    const Base& b = W.bases[mu];
    if (b.kind != BaseKind::Variable) continue;
    if (covers(b) || covers(W.bases[b.dual])) out.push_back(mu);
  }
  return out;
}

// endpoint slots of a base inside its own section copy
std::pair<int, int> base_slots(const SlotTable& t, const std::vector<int>& secs, const GenEq& W,
                               int mu) {
  const Base& b = W.bases[mu];
  int pos = -1;
  for (int i = 0; i < (int)secs.size(); ++i) {
    const Section& sec = W.sections[secs[i]];
    if (sec.lo <= b.alpha && b.beta <= sec.hi) {
      pos = i;
      break;
    }
  }
  if (pos < 0) return {-1, -1};
  auto ia = t.at.find({pos, b.alpha});
  auto ib = t.at.find({pos, b.beta});
  if (ia == t.at.end() || ib == t.at.end()) return {-1, -1};
  return {ia->second, ib->second};
}

// orientation signs per chosen section satisfying eps(mu)eps(dual) =
// X(sec(mu)) X(sec(dual)); nullopt when the parity constraints clash.
// Components are rooted at their least section with sign flips[comp].
struct ParitySolve {
  std::vector<int> x;    // +-1 per section position
  std::vector<int> comp; // component id per position (root positions, dense)
  int ncomp = 0;
};
std::optional<ParitySolve> solve_parity(const GenEq& W, const std::vector<int>& secs,
                                        const std::vector<int>& bases) {
  int n = (int)secs.size();
  std::vector<int> par(n, 0), pup(n);
  std::iota(pup.begin(), pup.end(), 0);
  // find with parity to root
  auto find = [&](int v) {
    int sgn = 0;
    int r = v;
    while (pup[r] != r) {
      sgn ^= par[r];
      r = pup[r];
    }
    // path compress
    while (pup[v] != r) {
      int nx = pup[v];
      int ns = par[v];
      pup[v] = r;
      par[v] = sgn;
      sgn ^= ns;
      v = nx;
    }
    return std::make_pair(r, par[v]);
  };
  auto pos_of = [&](int sec) {
    for (int i = 0; i < n; ++i)
      if (secs[i] == sec) return i;
    return -1;
  };
  for (int mu : bases) {
    const Base& b = W.bases[mu];
    int s1 = pos_of(section_of_base(W, b));
    int s2 = pos_of(section_of_base(W, W.bases[b.dual]));
    if (s1 < 0 || s2 < 0) return std::nullopt;
    int want = b.eps * W.bases[b.dual].eps < 0 ? 1 : 0; // 1 = opposite signs
    auto [r1, g1] = find(s1);
    auto [r2, g2] = find(s2);
    if (r1 == r2) {
      if ((g1 ^ g2) != want) return std::nullopt;
    } else {
      // hang the larger root under the smaller
      if (r2 < r1) {
        std::swap(r1, r2);
        std::swap(g1, g2);
      }
      pup[r2] = r1;
      par[r2] = g1 ^ g2 ^ want;
    }
  }
  ParitySolve out;
  out.x.assign(n, 0);
  std::map<int, int> cid;
  out.comp.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    auto [r, g] = find(i);
    auto it = cid.find(r);
    if (it == cid.end()) it = cid.emplace(r, (int)cid.size()).first;
    out.comp[i] = it->second;
    out.x[i] = g ? -1 : +1;
  }
  out.ncomp = (int)cid.size();
  return out;
}

// the forced boundary identifications: base endpoints agree straight or
// crossed with their dual's, by the sign product
void force_pairs(DSU& d, const SlotTable& t, const GenEq& W, const std::vector<int>& secs,
                 const std::vector<int>& bases) {
  for (int mu : bases) {
    const Base& b = W.bases[mu];
    auto [a1, b1] = base_slots(t, secs, W, mu);
    auto [a2, b2] = base_slots(t, secs, W, b.dual);
    if (a1 < 0 || a2 < 0) continue;
    if (b.eps * W.bases[b.dual].eps > 0) {
      d.unite(a1, a2);
      d.unite(b1, b2);
    } else {
      d.unite(a1, b2);
      d.unite(b1, a2);
    }
  }
}

// w as a prefix of rot(P, o)^inf: the unique offset when P is primitive
std::optional<std::pair<int, int>> prefix_presentation(const Word& w, const Word& P) {
  int n = P.len();
  if (w.len() < n) return std::nullopt;
  for (int o = 0; o < n; ++o) {
    bool good = true;
    for (int i = 0; i < w.len() && good; ++i)
      if (!(w.ls[i] == P.ls[(o + i) % n])) good = false;
    if (good) return std::make_pair(o, w.len() / n);
  }
  return std::nullopt;
}

// shortest repeating shift of w, at most cap; 0 when none
int short_period_shift(const Word& w, int cap) {
  for (int l = 1; l <= std::min(cap, w.len() - 1); ++l) {
    bool good = true;
    for (int i = 0; i + l < w.len() && good; ++i)
      if (!(w.ls[i] == w.ls[i + l])) good = false;
    if (good) return l;
  }
  return 0;
}

// --- symword and genword algebra --------------------------------------------

SymWord reduce_sym(const FreeProduct& G, const SymWord& w) {
  SymWord out;
  for (const Sym& s : w) {
    if (!out.empty()) {
      const Sym& t = out.back();
      if (s.is_var && t.is_var && s.var == t.var && s.eps == -t.eps) {
        out.pop_back();
        continue;
      }
      if (!s.is_var && !t.is_var && t.c == G.inv_letter(s.c)) {
        out.pop_back();
        continue;
      }
    }
    out.push_back(s);
  }
  return out;
}

GenWord gw_reduce(const GenWord& w) {
  GenWord out;
  for (auto [g, s] : w) {
    if (!out.empty() && out.back().first == g && out.back().second == -s) out.pop_back();
    else out.emplace_back(g, s);
  }
  return out;
}

GenWord gw_inv(const GenWord& w) {
  GenWord out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.emplace_back(it->first, -it->second);
  return out;
}

GenWord gw_concat(const GenWord& a, const GenWord& b) {
  GenWord out = a;
  out.insert(out.end(), b.begin(), b.end());
  return gw_reduce(out);
}

GenWord gw_pow(const GenWord& w, i64 q) {
  GenWord out;
  GenWord unit = q >= 0 ? w : gw_inv(w);
  for (i64 i = 0; i < (q >= 0 ? q : -q); ++i) out = gw_concat(out, unit);
  return out;
}

Cycle cyc_inv(const Cycle& c) {
  Cycle out;
  for (auto it = c.rbegin(); it != c.rend(); ++it) out.emplace_back(it->first, -it->second);
  return out;
}

Cycle cyc_concat(const Cycle& a, const Cycle& b) {
  Cycle out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Cycle cyc_pow(const Cycle& c, int q) {
  Cycle out;
  Cycle unit = q >= 0 ? c : cyc_inv(c);
  for (int i = 0; i < (q >= 0 ? q : -q); ++i) out = cyc_concat(out, unit);
  return out;
}

std::vector<i64> vec_mat(const std::vector<i64>& v, const Mat& M) {
  std::vector<i64> out(M.cols, 0);
  for (int r = 0; r < M.rows; ++r)
    for (int c = 0; c < M.cols; ++c) out[c] += v[r] * M.at(r, c);
  return out;
}

std::vector<i64> abelianize(const GenWord& w, int m) {
  std::vector<i64> out(m, 0);
  for (auto [g, s] : w) out[g] += s;
  return out;
}

// --- elementary row reduction for the free lifts ------------------------------

struct ElOp {
  enum Kind { AddMul, Swap, Negate } kind = AddMul;
  int i = 0, j = 0;
  i64 q = 0;
};

// reduce a unimodular matrix to the identity; ops apply left to right
std::optional<std::vector<ElOp>> reduce_to_identity(Mat M) {
  int n = M.rows;
  std::vector<ElOp> ops;
  auto addmul = [&](int i, int j, i64 q) {
    if (q == 0) return;
    for (int c = 0; c < n; ++c) M.at(i, c) += q * M.at(j, c);
    ops.push_back({ElOp::AddMul, i, j, q});
  };
  auto swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < n; ++c) std::swap(M.at(i, c), M.at(j, c));
    ops.push_back({ElOp::Swap, i, j, 0});
  };
  auto negate = [&](int i) {
    for (int c = 0; c < n; ++c) M.at(i, c) = -M.at(i, c);
    ops.push_back({ElOp::Negate, i, i, 0});
  };
  for (int c = 0; c < n; ++c) {
    // euclid the column entries at rows >= c down to one nonzero
    for (;;) {
      int best = -1;
      for (int r = c; r < n; ++r)
        if (M.at(r, c) != 0 && (best < 0 || std::abs(M.at(r, c)) < std::abs(M.at(best, c))))
          best = r;
      if (best < 0) return std::nullopt;
      swap(best, c);
      bool clean = true;
      for (int r = c + 1; r < n; ++r)
        if (M.at(r, c) != 0) {
          addmul(r, c, -(M.at(r, c) / M.at(c, c)));
          if (M.at(r, c) != 0) clean = false;
        }
      if (clean) break;
    }
  }
  for (int c = 0; c < n; ++c) {
    if (M.at(c, c) == -1) negate(c);
    if (M.at(c, c) != 1) return std::nullopt;
  }
  for (int c = n - 1; c >= 0; --c)
    for (int r = 0; r < c; ++r) addmul(r, c, -M.at(r, c));
  return ops;
}

// phases of every slot under a solution, following the stored signs
std::optional<std::vector<int>> compute_phases(const FreeProduct& G, const GenEq& W,
                                               const PeriodicStructure& PS, const GESolution& H,
                                               const Word& P, std::string* err) {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  int n = P.len();
  SlotTable t = slot_table(W, PS.sections);
  // per section: the offset of its word inside the oriented period line
  std::vector<int> off(PS.sections.size(), 0);
  for (int pos = 0; pos < (int)PS.sections.size(); ++pos) {
    const Section& sec = W.sections[PS.sections[pos]];
    Word w;
    for (int k = sec.lo; k < sec.hi; ++k) w = G.concat(w, H.val[k]);
    Word line = PS.x_sign[pos] > 0 ? P : G.invert(P);
    auto pres = prefix_presentation(w, line);
    if (!pres) return fail("section value does not follow its stored orientation");
    off[pos] = pres->first;
  }
  std::vector<int> ph(t.slots.size(), 0);
  for (int i = 0; i < (int)t.slots.size(); ++i) {
    int pos = t.owner[i];
    const Section& sec = W.sections[PS.sections[pos]];
    int L = 0;
    for (int k = sec.lo; k < t.slots[i].l; ++k) L += H.val[k].len();
    int fwd = (off[pos] + L) % n;
    ph[i] = PS.x_sign[pos] > 0 ? fwd : (n - fwd) % n;
  }
  return ph;
}

} // namespace

// --- structure basics ---------------------------------------------------------

std::vector<BSlot> structure_slots(const GenEq& W, const std::vector<int>& sections) {
  return slot_table(W, sections).slots;
}

bool same_structure(const PeriodicStructure& A, const PeriodicStructure& B) {
  return A.items == B.items && A.sections == B.sections && A.slots == B.slots &&
         normalize_classes(A.r_class) == normalize_classes(B.r_class);
}

std::string check_structure(const GenEq& W, const PeriodicStructure& PS) {
  if (!W.conns.empty()) return "equation still carries boundary connections";
  if (PS.sections.empty()) return "structure needs at least one section";
  for (size_t i = 0; i < PS.sections.size(); ++i) {
    int s = PS.sections[i];
    if (s < 0 || s >= (int)W.sections.size()) return "section index out of range";
    if (i > 0 && PS.sections[i - 1] >= s) return "sections not strictly ascending";
    const Section& sec = W.sections[s];
    if (sec.cls != SectionClass::Variable) return "structure section must be a variable section";
    if (!section_closed(W, sec.lo, sec.hi)) return "structure section must be closed";
  }
  if (PS.x_sign.size() != PS.sections.size()) return "one sign per section required";
  for (int x : PS.x_sign)
    if (x != 1 && x != -1) return "section signs must be +-1";
  auto in_chosen = [&](int k) {
    for (int s : PS.sections)
      if (W.sections[s].lo <= k && k < W.sections[s].hi) return true;
    return false;
  };
  for (size_t i = 0; i < PS.items.size(); ++i) {
    int k = PS.items[i];
    if (k < 1 || k > W.rho) return "item index out of range";
    if (i > 0 && PS.items[i - 1] >= k) return "items not strictly ascending";
    if (!in_chosen(k)) return "item lies outside the chosen sections";
  }
  if (PS.bases != closure_bases(W, PS.items))
    return "bases must be exactly the variable bases meeting a long item, duals included";
  for (int mu : PS.bases) {
    int s = section_of_base(W, W.bases[mu]);
    if (std::find(PS.sections.begin(), PS.sections.end(), s) == PS.sections.end())
      return "a member base lives in a section outside the structure";
  }
  auto xpos = [&](int sec) {
    for (size_t i = 0; i < PS.sections.size(); ++i)
      if (PS.sections[i] == sec) return (int)i;
    return -1;
  };
  for (int mu : PS.bases) {
    const Base& b = W.bases[mu];
    int x1 = PS.x_sign[xpos(section_of_base(W, b))];
    int x2 = PS.x_sign[xpos(section_of_base(W, W.bases[b.dual]))];
    if (b.eps * W.bases[b.dual].eps != x1 * x2)
      return "section signs disagree with a base orientation product";
  }
  SlotTable t = slot_table(W, PS.sections);
  if (PS.slots != t.slots) return "slot list does not match the chosen sections";
  if (PS.r_class.size() != PS.slots.size()) return "one class per slot required";
  std::vector<int> cls = normalize_classes(PS.r_class);
  for (int mu : PS.bases) {
    const Base& b = W.bases[mu];
    auto [a1, b1] = base_slots(t, PS.sections, W, mu);
    auto [a2, b2] = base_slots(t, PS.sections, W, b.dual);
    if (a1 < 0 || a2 < 0) return "base endpoints fall outside the slot table";
    bool straight = b.eps * W.bases[b.dual].eps > 0;
    bool ok = straight ? (cls[a1] == cls[a2] && cls[b1] == cls[b2])
                       : (cls[a1] == cls[b2] && cls[b1] == cls[a2]);
    if (!ok) return "boundary classes break a base endpoint agreement";
  }
  return "";
}

// --- detection ----------------------------------------------------------------

std::optional<PeriodicStructure> detect_periodic_structure(const FreeProduct& G, const GenEq& W,
                                                           const GESolution& H, const Word& P,
                                                           std::string* err) {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  if (!W.conns.empty()) return fail("equation still carries boundary connections");
  if (H.length() != W.rho) return fail("solution length does not match the equation");
  if (!is_period(G, P)) return fail("period must be cyclically reduced, primitive, length >= 2");
  std::string why;
  if (!check_solution(G, W, H, &why)) return fail("not a solution: " + why);
  int n = P.len();
  Word Pinv = G.invert(P);

  struct SecInfo {
    int idx = 0;
    std::optional<std::pair<int, int>> pres[2]; // orientation +1 / -1
  };
  std::vector<SecInfo> psec;
  bool any_periodic = false;
  for (int s = 0; s < (int)W.sections.size(); ++s) {
    const Section& sec = W.sections[s];
    if (sec.cls != SectionClass::Variable) continue;
    if (!section_closed(W, sec.lo, sec.hi)) continue;
    Word w;
    for (int k = sec.lo; k < sec.hi; ++k) w = G.concat(w, H.val[k]);
    SecInfo si;
    si.idx = s;
    si.pres[0] = prefix_presentation(w, P);
    si.pres[1] = prefix_presentation(w, Pinv);
    bool c1 = (si.pres[0] && si.pres[0]->second >= 2) || (si.pres[1] && si.pres[1]->second >= 2);
    bool c2 = w.len() <= n;
    bool c3 = short_period_shift(w, n) > 0;
    if (!(c1 || c2 || c3)) {
      std::ostringstream os;
      os << "closed section [" << sec.lo << "," << sec.hi << "] is not shaped by the period";
      return fail(os.str());
    }
    if (c1) {
      any_periodic = true;
      psec.push_back(si);
    }
  }
  if (!any_periodic) return fail("no closed section repeats the period twice");

  std::vector<int> secs;
  for (const SecInfo& si : psec) secs.push_back(si.idx);
  std::vector<int> items;
  for (const SecInfo& si : psec) {
    const Section& sec = W.sections[si.idx];
    for (int k = sec.lo; k < sec.hi; ++k)
      if (H.val[k].len() >= 2 * n) items.push_back(k);
  }
  std::sort(items.begin(), items.end());
  std::vector<int> bases = closure_bases(W, items);
  for (int mu : bases)
    if (std::find(secs.begin(), secs.end(), section_of_base(W, W.bases[mu])) == secs.end())
      return fail("a base of a long item leaves the periodic sections");

  auto par = solve_parity(W, secs, bases);
  if (!par) return fail("no orientation signs fit the base products");

  // Orientations are canonical up to a flip per parity component; factors with
  // involutions make section words periodic both ways, so search the flips for
  // one whose phases glue the boundary classes coherently.
  SlotTable t = slot_table(W, secs);
  std::string last = "no phase assignment makes the boundary classes coherent";
  for (int mask = 0; mask < (1 << par->ncomp); ++mask) {
    std::vector<int> X(secs.size());
    bool avail = true;
    for (size_t i = 0; i < secs.size() && avail; ++i) {
      X[i] = par->x[i] * ((mask >> par->comp[i]) & 1 ? -1 : +1);
      if (!psec[i].pres[X[i] > 0 ? 0 : 1]) avail = false;
    }
    if (!avail) continue;
    PeriodicStructure PS;
    PS.items = items;
    PS.bases = bases;
    PS.sections = secs;
    PS.x_sign = X;
    PS.slots = t.slots;
    std::string perr;
    auto ph = compute_phases(G, W, PS, H, P, &perr);
    if (!ph) {
      last = perr;
      continue;
    }
    std::vector<int> raw(t.slots.size());
    for (size_t i = 0; i < t.slots.size(); ++i) raw[i] = (*ph)[i];
    PS.r_class = normalize_classes(raw);
    std::string msg = check_structure(W, PS);
    if (msg.empty()) return PS;
    last = msg;
  }
  return fail(last);
}

// --- enumeration ----------------------------------------------------------------

namespace {

// all partitions of {0..n-1} as restricted growth strings, lexicographic
void each_partition(int n, const std::function<void(const std::vector<int>&)>& body) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == n) {
      body(a);
      return;
    }
    for (int v = 0; v <= mx + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(mx, v));
    }
  };
  if (n == 0) body(a);
  else rec(0, -1);
}

bool structure_connected(const GenEq& W, const PeriodicStructure& PS) {
  SlotTable t = slot_table(W, PS.sections);
  std::vector<int> cls = normalize_classes(PS.r_class);
  int nv = 1 + *std::max_element(cls.begin(), cls.end());
  DSU d(nv);
  int parts = nv;
  for (int pos = 0; pos < (int)PS.sections.size(); ++pos) {
    const Section& sec = W.sections[PS.sections[pos]];
    for (int k = sec.lo; k < sec.hi; ++k)
      if (d.unite(cls[t.at.at({pos, k})], cls[t.at.at({pos, k + 1})])) --parts;
  }
  return parts == 1;
}

} // namespace

std::vector<PeriodicStructure> enumerate_periodic_structures(const GenEq& W) {
  std::vector<PeriodicStructure> out;
  if (!W.conns.empty()) return out;
  std::vector<int> cand;
  for (int s = 0; s < (int)W.sections.size(); ++s) {
    const Section& sec = W.sections[s];
    if (sec.cls == SectionClass::Variable && section_closed(W, sec.lo, sec.hi)) cand.push_back(s);
  }
  if (cand.empty() || cand.size() > 16) return out;

  struct Task {
    std::vector<int> secs;
    std::vector<int> items;
  };
  std::vector<Task> tasks;
  for (unsigned smask = 1; smask < (1u << cand.size()); ++smask) {
    Task base;
    std::vector<int> univ;
    for (size_t i = 0; i < cand.size(); ++i)
      if (smask >> i & 1) {
        base.secs.push_back(cand[i]);
        const Section& sec = W.sections[cand[i]];
        for (int k = sec.lo; k < sec.hi; ++k) univ.push_back(k);
      }
    if (univ.size() > 20) continue;
    for (unsigned imask = 0; imask < (1u << univ.size()); ++imask) {
      Task t = base;
      for (size_t i = 0; i < univ.size(); ++i)
        if (imask >> i & 1) t.items.push_back(univ[i]);
      std::sort(t.items.begin(), t.items.end());
      tasks.push_back(std::move(t));
    }
  }

  std::vector<std::vector<PeriodicStructure>> found(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (int ti = 0; ti < (int)tasks.size(); ++ti) {
    const Task& task = tasks[ti];
    std::vector<int> bases = closure_bases(W, task.items);
    bool ok = true;
    for (int mu : bases)
      if (std::find(task.secs.begin(), task.secs.end(), section_of_base(W, W.bases[mu])) ==
          task.secs.end())
        ok = false;
    if (!ok) continue;
    auto par = solve_parity(W, task.secs, bases);
    if (!par) continue;
    SlotTable t = slot_table(W, task.secs);
    DSU forced((int)t.slots.size());
    force_pairs(forced, t, W, task.secs, bases);
    // forced classes, listed by least slot
    std::vector<int> root(t.slots.size());
    std::map<int, int> rid;
    for (size_t i = 0; i < t.slots.size(); ++i) {
      int r = forced.find((int)i);
      auto it = rid.find(r);
      if (it == rid.end()) it = rid.emplace(r, (int)rid.size()).first;
      root[i] = it->second;
    }
    each_partition((int)rid.size(), [&](const std::vector<int>& part) {
      PeriodicStructure PS;
      PS.items = task.items;
      PS.bases = bases;
      PS.sections = task.secs;
      PS.x_sign = par->x;
      PS.slots = t.slots;
      PS.r_class.resize(t.slots.size());
      for (size_t i = 0; i < t.slots.size(); ++i) PS.r_class[i] = part[root[i]];
      PS.r_class = normalize_classes(PS.r_class);
      if (!check_structure(W, PS).empty()) return;
      if (!structure_connected(W, PS)) return;
      found[ti].push_back(std::move(PS));
    });
  }
  for (auto& v : found)
    for (auto& ps : v) out.push_back(std::move(ps));
  return out;
}

// --- boundary graph and cycle basis ---------------------------------------------

int PeriodicGraph::edge_of_item(int k) const {
  for (int e = 0; e < (int)edges.size(); ++e)
    if (edges[e].item == k) return e;
  return -1;
}

LatticeSplit split_lattice(const Mat& gens, int m) {
  LatticeSplit out;
  if (gens.rows == 0) {
    out.z1_basis = Mat(0, m);
    out.z2_basis = Mat::identity(m);
    return out;
  }
  SmithResult sm = smith_normal_form(gens);
  out.rank = sm.rank;
  out.z1_basis = Mat(sm.rank, m);
  out.z2_basis = Mat(m - sm.rank, m);
  for (int r = 0; r < sm.rank; ++r)
    for (int c = 0; c < m; ++c) out.z1_basis.at(r, c) = sm.Qinv.at(r, c);
  for (int r = sm.rank; r < m; ++r)
    for (int c = 0; c < m; ++c) out.z2_basis.at(r - sm.rank, c) = sm.Qinv.at(r, c);
  for (i64 d : sm.diag) out.index *= d;
  return out;
}

std::optional<std::vector<i64>> solve_integer(const Mat& A, const std::vector<i64>& b) {
  if (A.rows == 0) {
    for (i64 x : b)
      if (x != 0) return std::nullopt;
    return std::vector<i64>{};
  }
  SmithResult sm = smith_normal_form(A);
  std::vector<i64> c = vec_mat(b, sm.Q);
  std::vector<i64> y(A.rows, 0);
  for (int j = 0; j < (int)c.size(); ++j) {
    i64 d = j < sm.rank ? sm.diag[j] : 0;
    if (d == 0) {
      if (c[j] != 0) return std::nullopt;
    } else {
      if (c[j] % d != 0) return std::nullopt;
      if (j < A.rows) y[j] = c[j] / d;
    }
  }
  return vec_mat(y, sm.P);
}

SymWord cycle_label(const PeriodicGraph& g, const Cycle& c) {
  SymWord w;
  for (auto [e, d] : c) w.push_back(var_sym(g.edges[e].item - 1, d));
  // free reduction over the item symbols
  SymWord out;
  for (const Sym& s : w) {
    if (!out.empty() && out.back().is_var && out.back().var == s.var && out.back().eps == -s.eps)
      out.pop_back();
    else out.push_back(s);
  }
  return out;
}

Cycle cycle_of_genword(const CycleBasis& cb, const GenWord& w) {
  Cycle out;
  for (auto [g, s] : w)
    out = cyc_concat(out, s > 0 ? cb.gen_cycle[g] : cyc_inv(cb.gen_cycle[g]));
  return out;
}

Word eval_cycle(const FreeProduct& G, const PeriodicGraph& g, const Cycle& c,
                const GESolution& H) {
  Word out;
  for (auto [e, d] : c) {
    const Word& v = H.val[g.edges[e].item];
    out = G.concat(out, d > 0 ? v : G.invert(v));
  }
  return out;
}

std::vector<int> cycle_t_row(const GenEq& W, const PeriodicStructure& PS, const PeriodicGraph& g,
                             const Cycle& c) {
  std::vector<int> t(W.rho + 1, 0);
  auto xsign = [&](int item) {
    for (size_t i = 0; i < PS.sections.size(); ++i) {
      const Section& sec = W.sections[PS.sections[i]];
      if (sec.lo <= item && item < sec.hi) return PS.x_sign[i];
    }
    return 0;
  };
  for (auto [e, d] : c) t[g.edges[e].item] += d * xsign(g.edges[e].item);
  return t;
}

std::optional<std::vector<int>> slot_phases(const FreeProduct& G, const GenEq& W,
                                            const PeriodicStructure& PS, const GESolution& H,
                                            const Word& P, std::string* err) {
  return compute_phases(G, W, PS, H, P, err);
}

std::optional<GraphAndBasis> build_graph_and_basis(const GenEq& W, const PeriodicStructure& PS,
                                                   std::string* err) {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  std::string msg = check_structure(W, PS);
  if (!msg.empty()) return fail(msg);

  SlotTable t = slot_table(W, PS.sections);
  std::vector<int> cls = normalize_classes(PS.r_class);
  PeriodicGraph g;
  g.nverts = 1 + *std::max_element(cls.begin(), cls.end());
  g.vertex_slot.assign(g.nverts, BSlot{});
  std::vector<char> seen(g.nverts, 0);
  for (size_t i = 0; i < t.slots.size(); ++i)
    if (!seen[cls[i]]) {
      seen[cls[i]] = 1;
      g.vertex_slot[cls[i]] = t.slots[i];
    }
  for (int pos = 0; pos < (int)PS.sections.size(); ++pos) {
    const Section& sec = W.sections[PS.sections[pos]];
    for (int k = sec.lo; k < sec.hi; ++k)
      g.edges.push_back({k, cls[t.at.at({pos, k})], cls[t.at.at({pos, k + 1})]});
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const PGEdge& a, const PGEdge& b) { return a.item < b.item; });
  int ne = (int)g.edges.size();
  g.is_short.assign(ne, 0);
  for (int e = 0; e < ne; ++e)
    g.is_short[e] =
        !std::binary_search(PS.items.begin(), PS.items.end(), g.edges[e].item) ? 1 : 0;
  g.in_t0.assign(ne, 0);
  g.in_t.assign(ne, 0);
  DSU d(g.nverts);
  int parts = g.nverts;
  for (int e = 0; e < ne; ++e)
    if (g.is_short[e] && d.unite(g.edges[e].from, g.edges[e].to)) {
      g.in_t0[e] = g.in_t[e] = 1;
      --parts;
    }
  for (int e = 0; e < ne; ++e)
    if (!g.is_short[e] && d.unite(g.edges[e].from, g.edges[e].to)) {
      g.in_t[e] = 1;
      --parts;
    }
  if (parts != 1) return fail("structure graph is disconnected");
  for (int k = 1; k <= W.rho; ++k) {
    bool inside = false;
    for (int s : PS.sections)
      if (W.sections[s].lo <= k && k < W.sections[s].hi) inside = true;
    if (!inside) g.tbar.push_back(k);
  }
  g.base_vertex = cls[0]; // slots are sorted, the least boundary leads

  // tree paths from the base vertex
  std::vector<std::vector<std::pair<int, int>>> adj(g.nverts); // (edge, dir)
  for (int e = 0; e < ne; ++e)
    if (g.in_t[e]) {
      adj[g.edges[e].from].emplace_back(e, +1);
      adj[g.edges[e].to].emplace_back(e, -1);
    }
  g.path_from_root.assign(g.nverts, {});
  std::vector<char> vis(g.nverts, 0);
  std::queue<int> q;
  q.push(g.base_vertex);
  vis[g.base_vertex] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [e, dir] : adj[v]) {
      int u = dir > 0 ? g.edges[e].to : g.edges[e].from;
      if (vis[u]) continue;
      vis[u] = 1;
      g.path_from_root[u] = g.path_from_root[v];
      g.path_from_root[u].emplace_back(e, dir);
      q.push(u);
    }
  }

  CycleBasis cb;
  for (int e = 0; e < ne; ++e)
    if (!g.in_t[e]) cb.gen_edge.push_back(e);
  int m = (int)cb.gen_edge.size();
  std::vector<int> gen_of_edge(ne, -1);
  for (int i = 0; i < m; ++i) gen_of_edge[cb.gen_edge[i]] = i;
  for (int e : cb.gen_edge) {
    Cycle c = g.path_from_root[g.edges[e].from];
    c.emplace_back(e, +1);
    c = cyc_concat(c, cyc_inv(g.path_from_root[g.edges[e].to]));
    cb.gen_cycle.push_back(c);
  }
  auto rewrite = [&](const Cycle& c) {
    GenWord w;
    for (auto [e, d] : c)
      if (gen_of_edge[e] >= 0) w.emplace_back(gen_of_edge[e], d);
    return gw_reduce(w);
  };

  // relation rows, one per dual pair
  auto path_of = [&](int mu, int dir) {
    const Base& b = W.bases[mu];
    Cycle c;
    if (dir > 0)
      for (int k = b.alpha; k < b.beta; ++k) c.emplace_back(g.edge_of_item(k), +1);
    else
      for (int k = b.beta - 1; k >= b.alpha; --k) c.emplace_back(g.edge_of_item(k), -1);
    return c;
  };
  for (int mu : PS.bases) {
    const Base& b = W.bases[mu];
    if (mu > b.dual) continue;
    Cycle cp = cyc_concat(path_of(mu, b.eps), path_of(b.dual, -W.bases[b.dual].eps));
    Cycle c;
    if (!cp.empty()) {
      auto [e0, d0] = cp.front();
      int start = d0 > 0 ? g.edges[e0].from : g.edges[e0].to;
      c = cyc_concat(cyc_concat(g.path_from_root[start], cp),
                     cyc_inv(g.path_from_root[start]));
    }
    cb.pair_mu.push_back(mu);
    cb.b_mu.push_back(rewrite(c));
  }

  int npairs = (int)cb.b_mu.size();
  cb.bt_rows = Mat(npairs, m);
  for (int r = 0; r < npairs; ++r) {
    std::vector<i64> row = abelianize(cb.b_mu[r], m);
    for (int c = 0; c < m; ++c) cb.bt_rows.at(r, c) = row[c];
  }

  std::vector<int> shorts, longs; // generator positions by edge kind
  for (int i = 0; i < m; ++i)
    (g.is_short[cb.gen_edge[i]] ? shorts : longs).push_back(i);

  // the relation subgroup with the short units, its saturation, a complement
  Mat full(npairs + (int)shorts.size(), m);
  for (int r = 0; r < npairs; ++r)
    for (int c = 0; c < m; ++c) full.at(r, c) = cb.bt_rows.at(r, c);
  for (int i = 0; i < (int)shorts.size(); ++i) full.at(npairs + i, shorts[i]) = 1;
  LatticeSplit sp = split_lattice(full, m);
  cb.z1_rows = sp.z1_basis;
  cb.index_z1_b = sp.index;

  // C1: unit rows on short generators, then the saturated long part lifted
  // back across the short coordinates where an integer lift exists
  std::vector<std::vector<i64>> c1rows;
  for (int s : shorts) {
    std::vector<i64> r(m, 0);
    r[s] = 1;
    c1rows.push_back(r);
    cb.c1_kind.push_back(CycleBasis::ShortUnit);
    cb.c1_mult.push_back(0);
  }
  if (npairs > 0 && !longs.empty()) {
    Mat proj(npairs, (int)longs.size());
    for (int r = 0; r < npairs; ++r)
      for (int c = 0; c < (int)longs.size(); ++c) proj.at(r, c) = cb.bt_rows.at(r, longs[c]);
    LatticeSplit spl = split_lattice(proj, (int)longs.size());
    // integer right-nullspace of the relation rows
    SmithResult smb = smith_normal_form(cb.bt_rows);
    int nnull = m - smb.rank;
    Mat N(nnull, m);
    for (int r = 0; r < nnull; ++r)
      for (int c = 0; c < m; ++c) N.at(r, c) = smb.Q.at(c, smb.rank + r);
    HnfResult hb = hermite_normal_form(cb.bt_rows);
    for (int kr = 0; kr < spl.z1_basis.rows; ++kr) {
      std::vector<i64> k(m, 0);
      for (int c = 0; c < (int)longs.size(); ++c) k[longs[c]] = spl.z1_basis.at(kr, c);
      // want u supported on the short coordinates with N*(k+u) = 0
      Mat A((int)shorts.size(), nnull);
      std::vector<i64> rhs(nnull, 0);
      for (int r = 0; r < nnull; ++r) {
        i64 dot = 0;
        for (int c = 0; c < m; ++c) dot += N.at(r, c) * k[c];
        rhs[r] = -dot;
        for (int s = 0; s < (int)shorts.size(); ++s) A.at(s, r) = N.at(r, shorts[s]);
      }
      auto u = solve_integer(A, rhs);
      if (!u) {
        c1rows.push_back(k);
        cb.c1_kind.push_back(CycleBasis::Impure);
        cb.c1_mult.push_back(0);
        cb.c1_pure = false;
        continue;
      }
      for (int s = 0; s < (int)shorts.size(); ++s) k[shorts[s]] += (*u)[s];
      i64 mult = 0;
      for (i64 nmul = 1; nmul <= cb.index_z1_b; ++nmul) {
        std::vector<i64> scaled(m);
        for (int c = 0; c < m; ++c) scaled[c] = nmul * k[c];
        if (in_row_lattice(hb, scaled)) {
          mult = nmul;
          break;
        }
      }
      if (mult == 0) return fail("internal: saturated row never re-enters the relation lattice");
      c1rows.push_back(k);
      cb.c1_kind.push_back(CycleBasis::ValueOne);
      cb.c1_mult.push_back(mult);
    }
  }
  cb.c1_size = (int)c1rows.size();
  if (cb.c1_size != sp.z1_basis.rows)
    return fail("internal: short units plus the long saturation miss the full saturation");
  // same lattice as the saturation itself
  {
    Mat C(cb.c1_size, m);
    for (int r = 0; r < cb.c1_size; ++r)
      for (int c = 0; c < m; ++c) C.at(r, c) = c1rows[r][c];
    if (cb.c1_size > 0 && hermite_normal_form(C).H != hermite_normal_form(cb.z1_rows).H)
      return fail("internal: rebuilt saturation basis spans a different lattice");
  }

  cb.basis_ab = Mat(m, m);
  for (int r = 0; r < cb.c1_size; ++r)
    for (int c = 0; c < m; ++c) cb.basis_ab.at(r, c) = c1rows[r][c];
  for (int r = 0; r < sp.z2_basis.rows; ++r)
    for (int c = 0; c < m; ++c) cb.basis_ab.at(cb.c1_size + r, c) = sp.z2_basis.at(r, c);
  if (m > 0 && !is_unimodular(cb.basis_ab)) return fail("internal: cycle basis is not unimodular");

  // free lifts: elementary moves realize the basis change on actual words
  if (m > 0) {
    auto ops = reduce_to_identity(cb.basis_ab);
    if (!ops) return fail("internal: basis matrix failed to reduce");
    std::vector<GenWord> bw(m), gib(m);
    for (int i = 0; i < m; ++i) {
      bw[i] = {{i, +1}};
      gib[i] = {{i, +1}};
    }
    for (auto it = ops->rbegin(); it != ops->rend(); ++it) {
      if (it->kind == ElOp::AddMul) bw[it->i] = gw_concat(bw[it->i], gw_pow(bw[it->j], -it->q));
      else if (it->kind == ElOp::Swap) std::swap(bw[it->i], bw[it->j]);
      else bw[it->i] = gw_inv(bw[it->i]);
    }
    for (const ElOp& op : *ops) {
      if (op.kind == ElOp::AddMul) gib[op.i] = gw_concat(gib[op.i], gw_pow(gib[op.j], op.q));
      else if (op.kind == ElOp::Swap) std::swap(gib[op.i], gib[op.j]);
      else gib[op.i] = gw_inv(gib[op.i]);
    }
    cb.basis_word = bw;
    cb.gen_in_basis = gib;
    for (int i = 0; i < m; ++i) {
      std::vector<i64> row = abelianize(bw[i], m);
      for (int c = 0; c < m; ++c)
        if (row[c] != cb.basis_ab.at(i, c))
          return fail("internal: lifted basis word has the wrong abelianization");
    }
  }
  return GraphAndBasis{std::move(g), std::move(cb)};
}

// --- classification --------------------------------------------------------------

namespace {

// path inside the short forest between two vertices of one component
std::optional<Cycle> t0_path(const PeriodicGraph& g, int from, int to) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.nverts);
  for (int e = 0; e < (int)g.edges.size(); ++e)
    if (g.in_t0[e]) {
      adj[g.edges[e].from].emplace_back(e, +1);
      adj[g.edges[e].to].emplace_back(e, -1);
    }
  std::vector<int> prev_edge(g.nverts, -1), prev_dir(g.nverts, 0), prev_v(g.nverts, -1);
  std::vector<char> vis(g.nverts, 0);
  std::queue<int> q;
  q.push(from);
  vis[from] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == to) break;
    for (auto [e, dir] : adj[v]) {
      int u = dir > 0 ? g.edges[e].to : g.edges[e].from;
      if (vis[u]) continue;
      vis[u] = 1;
      prev_edge[u] = e;
      prev_dir[u] = dir;
      prev_v[u] = v;
      q.push(u);
    }
  }
  if (!vis[to]) return std::nullopt;
  Cycle rev;
  for (int v = to; v != from; v = prev_v[v]) rev.emplace_back(prev_edge[v], prev_dir[v]);
  std::reverse(rev.begin(), rev.end());
  return rev;
}

} // namespace

std::optional<Classification> classify_structure(const FreeProduct& G, const GenEq& W,
                                                 const PeriodicStructure& PS,
                                                 const SolveOptions& opt, std::string* err) {
  auto gb = build_graph_and_basis(W, PS, err);
  if (!gb) return std::nullopt;
  const PeriodicGraph& g = gb->graph;
  const CycleBasis& cb = gb->basis;
  int m = (int)cb.gen_edge.size();

  Classification out;
  out.bound = opt.max_len;
  EquationSystem sys = induced_equation_system(G, W);
  bool bounded_only = false;

  std::vector<SymWord> lab(m);
  for (int i = 0; i < m; ++i) lab[i] = cycle_label(g, cb.gen_cycle[i]);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      SymWord conc = lab[i];
      conc.insert(conc.end(), lab[j].begin(), lab[j].end());
      SymWord inv1 = word_inverse(G, lab[i]), inv2 = word_inverse(G, lab[j]);
      conc.insert(conc.end(), inv1.begin(), inv1.end());
      conc.insert(conc.end(), inv2.begin(), inv2.end());
      QIVerdict v = check_quasi_identity(G, {sys, reduce_sym(G, conc)}, opt);
      if (v.kind == QIVerdict::Fails) {
        out.kind = Classification::SingularA;
        out.certified = true;
        out.gen1 = i;
        out.gen2 = j;
        out.witness = v.witness;
        return out;
      }
      bounded_only = true;
    }

  int c2n = m - cb.c1_size;
  if (c2n > 1) {
    out.kind = Classification::SingularB;
    out.certified = true;
    return out;
  }
  if (c2n == 1) {
    for (int i = 0; i < m; ++i) {
      int e0 = cb.gen_edge[i];
      if (!g.is_short[e0]) continue;
      auto back = t0_path(g, g.edges[e0].to, g.edges[e0].from);
      if (!back) continue; // endpoints in different short components cannot happen
      Cycle c0{{e0, +1}};
      c0 = cyc_concat(c0, *back);
      QIVerdict v = check_quasi_identity(G, {sys, cycle_label(g, c0)}, opt);
      if (v.kind == QIVerdict::Fails) {
        out.kind = Classification::SingularC;
        out.certified = true;
        out.witness_edge = e0;
        out.witness = v.witness;
        return out;
      }
      bounded_only = true;
    }
  }
  out.kind = Classification::Regular;
  out.certified = !bounded_only;
  return out;
}

// --- automorphism generators --------------------------------------------------------

std::optional<std::vector<AutomorphismGen>> automorphism_generators(
    const FreeProduct& G, const GenEq& W, const PeriodicStructure& PS, const SolveOptions& opt,
    std::string* err) {
  auto cls = classify_structure(G, W, PS, opt, err);
  if (!cls) return std::nullopt;
  std::vector<AutomorphismGen> out;
  if (cls->kind == Classification::SingularA) return out; // the group degenerates
  auto gb = build_graph_and_basis(W, PS, err);
  if (!gb) return std::nullopt;
  const PeriodicGraph& g = gb->graph;
  const CycleBasis& cb = gb->basis;
  int m = (int)cb.gen_edge.size();

  auto label_path = [&](const std::vector<std::pair<int, int>>& p) {
    return cycle_label(g, p);
  };
  std::vector<SymWord> raw_cycle(m);
  for (int i = 0; i < m; ++i) raw_cycle[i] = cycle_label(g, cb.gen_cycle[i]);

  // twists of a long tree edge around a fundamental cycle
  for (int ei = 0; ei < (int)g.edges.size(); ++ei) {
    if (!g.in_t[ei] || g.in_t0[ei]) continue;
    int vi = g.edges[ei].from;
    int twisted = g.edges[ei].item;
    for (int gen = 0; gen < m; ++gen) {
      Cycle c = cyc_concat(cyc_inv(g.path_from_root[vi]),
                           cyc_concat(cb.gen_cycle[gen], g.path_from_root[vi]));
      SymWord cw = cycle_label(g, c);
      auto twist = [&](const SymWord& w) {
        SymWord o;
        for (const Sym& s : w) {
          if (s.is_var && s.var == twisted - 1) {
            if (s.eps > 0) {
              o.insert(o.end(), cw.begin(), cw.end());
              o.push_back(s);
            } else {
              o.push_back(s);
              SymWord ci = word_inverse(G, cw);
              o.insert(o.end(), ci.begin(), ci.end());
            }
          } else o.push_back(s);
        }
        return o;
      };
      Theta th = Theta::identity(W.rho);
      SymWord self = cw;
      self.push_back(var_sym(twisted - 1, +1));
      th.img[twisted] = reduce_sym(G, self);
      for (int f = 0; f < m; ++f) {
        int kf = g.edges[cb.gen_edge[f]].item;
        SymWord w = word_inverse(G, twist(label_path(g.path_from_root[g.edges[cb.gen_edge[f]].from])));
        w.insert(w.end(), raw_cycle[f].begin(), raw_cycle[f].end());
        SymWord tail = twist(label_path(g.path_from_root[g.edges[cb.gen_edge[f]].to]));
        w.insert(w.end(), tail.begin(), tail.end());
        th.img[kf] = reduce_sym(G, w);
      }
      AutomorphismGen a;
      a.kind = AutomorphismGen::EdgeTwist;
      a.ei = ei;
      a.gen = gen;
      a.sub = std::move(th);
      out.push_back(std::move(a));
    }
  }

  // twists of one complement basis cycle by another basis cycle
  for (int ci = cb.c1_size; ci < m; ++ci)
    for (int cj = 0; cj < m; ++cj) {
      if (cj == ci) continue;
      auto subst = [&](const GenWord& w) {
        GenWord o;
        for (auto [b, s] : w) {
          if (b == ci) {
            if (s > 0) {
              o.emplace_back(cj, +1);
              o.emplace_back(ci, +1);
            } else {
              o.emplace_back(ci, -1);
              o.emplace_back(cj, -1);
            }
          } else o.emplace_back(b, s);
        }
        return gw_reduce(o);
      };
      Theta th = Theta::identity(W.rho);
      for (int f = 0; f < m; ++f) {
        GenWord in_basis = subst(cb.gen_in_basis[f]);
        GenWord over_gens;
        for (auto [b, s] : in_basis) over_gens = gw_concat(over_gens, gw_pow(cb.basis_word[b], s));
        SymWord w =
            word_inverse(G, label_path(g.path_from_root[g.edges[cb.gen_edge[f]].from]));
        for (auto [gg, s] : over_gens) {
          SymWord piece = s > 0 ? raw_cycle[gg] : word_inverse(G, raw_cycle[gg]);
          w.insert(w.end(), piece.begin(), piece.end());
        }
        SymWord tail = label_path(g.path_from_root[g.edges[cb.gen_edge[f]].to]);
        w.insert(w.end(), tail.begin(), tail.end());
        th.img[g.edges[cb.gen_edge[f]].item] = reduce_sym(G, w);
      }
      AutomorphismGen a;
      a.kind = AutomorphismGen::C2Twist;
      a.c2 = ci;
      a.other = cj;
      a.sub = std::move(th);
      out.push_back(std::move(a));
    }
  return out;
}

// --- value checks ---------------------------------------------------------------

std::optional<CycleReport> cycle_value_checks(const FreeProduct& G, const GenEq& W,
                                              const PeriodicStructure& PS, const GESolution& H,
                                              const Word& P, std::string* err) {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  if (H.length() != W.rho) return fail("solution length does not match the equation");
  if (!is_period(G, P)) return fail("period must be cyclically reduced, primitive, length >= 2");
  auto gb = build_graph_and_basis(W, PS, err);
  if (!gb) return std::nullopt;
  const PeriodicGraph& g = gb->graph;
  const CycleBasis& cb = gb->basis;
  int n = P.len();
  auto ph = compute_phases(G, W, PS, H, P, err);
  if (!ph) return std::nullopt;

  CycleReport rep;
  SlotTable t = slot_table(W, PS.sections);
  std::vector<int> cls = normalize_classes(PS.r_class);

  // one phase per boundary class
  std::vector<int> vphase(g.nverts, -1);
  for (size_t i = 0; i < t.slots.size(); ++i) {
    int v = cls[i];
    if (vphase[v] < 0) vphase[v] = (*ph)[i];
    else if (vphase[v] != (*ph)[i]) {
      rep.violations.push_back({"boundary class cuts the period at two phases", -1, -1, -1});
    }
  }
  rep.q0 = cyclic_permutations(P)[vphase[g.base_vertex]];

  // per-item exponents from the boundary phases
  int ne = (int)g.edges.size();
  rep.item_exp.assign(ne, 0);
  auto xsign = [&](int item) {
    for (size_t i = 0; i < PS.sections.size(); ++i) {
      const Section& sec = W.sections[PS.sections[i]];
      if (sec.lo <= item && item < sec.hi) return PS.x_sign[i];
    }
    return 0;
  };
  std::map<int, int> slot_row; // (owner,boundary) handled through the table
  for (int e = 0; e < ne; ++e) {
    int k = g.edges[e].item;
    int pos = -1;
    for (size_t i = 0; i < PS.sections.size(); ++i) {
      const Section& sec = W.sections[PS.sections[i]];
      if (sec.lo <= k && k < sec.hi) pos = (int)i;
    }
    int pk = (*ph)[t.at.at({pos, k})];
    int pk1 = (*ph)[t.at.at({pos, k + 1})];
    int num = H.val[k].len() + xsign(k) * (pk - pk1);
    if (num % n != 0) {
      std::ostringstream os;
      os << "item h" << k << " length is off phase";
      rep.violations.push_back({os.str(), -1, -1, -1});
    } else rep.item_exp[e] = num / n - 1;
  }

  // every fundamental cycle is the predicted power of the rotated period
  int m = (int)cb.gen_edge.size();
  rep.gen_exp.assign(m, 0);
  std::vector<Word> vg(m);
  for (int i = 0; i < m; ++i) {
    vg[i] = eval_cycle(G, g, cb.gen_cycle[i], H);
    std::vector<int> trow = cycle_t_row(W, PS, g, cb.gen_cycle[i]);
    long long E = 0;
    for (int e = 0; e < ne; ++e)
      E += (long long)trow[g.edges[e].item] * (rep.item_exp[e] + 1);
    rep.gen_exp[i] = (int)E;
    if (vg[i] != G.power(rep.q0, (int)E)) {
      std::ostringstream os;
      os << "cycle " << i << " is not the predicted period power";
      rep.violations.push_back({os.str(), i, -1, -1});
    }
    if (g.is_short[cb.gen_edge[i]] && std::abs(rep.gen_exp[i]) > 2 * W.rho) {
      std::ostringstream os;
      os << "short cycle " << i << " exponent exceeds twice the item count";
      rep.violations.push_back({os.str(), i, -1, -1});
    }
  }

  auto eval_gw = [&](const GenWord& w) {
    Word out;
    for (auto [gg, s] : w) out = G.concat(out, s > 0 ? vg[gg] : G.invert(vg[gg]));
    return out;
  };
  for (int r = 0; r < (int)cb.b_mu.size(); ++r)
    if (!eval_gw(cb.b_mu[r]).empty()) {
      std::ostringstream os;
      os << "relation cycle of base " << cb.pair_mu[r] << " does not vanish";
      rep.violations.push_back({os.str(), -1, -1, cb.pair_mu[r]});
    }
  for (int i = 0; i < cb.c1_size; ++i) {
    if (cb.c1_kind[i] == CycleBasis::ShortUnit) continue;
    if (cb.c1_kind[i] == CycleBasis::Impure) {
      ++rep.skipped_impure;
      continue;
    }
    if (!eval_gw(cb.basis_word[i]).empty()) {
      std::ostringstream os;
      os << "pure saturation cycle " << i << " does not vanish";
      rep.violations.push_back({os.str(), -1, i, -1});
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

// --- witnesses -------------------------------------------------------------------

std::optional<std::vector<Cycle>> singular_witness_cycles(const FreeProduct& G, const GenEq& W,
                                                          const PeriodicStructure& PS,
                                                          const SolveOptions& opt,
                                                          std::string* err) {
  auto cls = classify_structure(G, W, PS, opt, err);
  if (!cls) return std::nullopt;
  if (cls->kind == Classification::Regular) {
    if (err) *err = "structure is regular, no witnesses to produce";
    return std::nullopt;
  }
  auto gb = build_graph_and_basis(W, PS, err);
  if (!gb) return std::nullopt;
  const PeriodicGraph& g = gb->graph;
  const CycleBasis& cb = gb->basis;
  int m = (int)cb.gen_edge.size();
  std::vector<Cycle> out;
  if (cls->kind == Classification::SingularA) {
    const Cycle& a = cb.gen_cycle[cls->gen1];
    const Cycle& b = cb.gen_cycle[cls->gen2];
    out.push_back(cyc_concat(cyc_concat(a, b), cyc_concat(cyc_inv(a), cyc_inv(b))));
    return out;
  }
  if (cls->kind == Classification::SingularB) {
    for (int i = cb.c1_size; i < m && (int)out.size() < 2; ++i)
      out.push_back(cycle_of_genword(cb, cb.basis_word[i]));
    return out;
  }
  // type (c): powers of the short cycle against powers of the complement cycle
  int e0 = cls->witness_edge;
  auto back = t0_path(g, g.edges[e0].to, g.edges[e0].from);
  if (!back) {
    if (err) *err = "internal: witness edge lost its short path";
    return std::nullopt;
  }
  Cycle c0{{e0, +1}};
  c0 = cyc_concat(c0, *back);
  int nedges = (int)c0.size();
  const std::vector<std::pair<int, int>>& conj = g.path_from_root[g.edges[e0].from];
  Cycle based = cyc_concat(cyc_concat(conj, c0), cyc_inv(conj));
  Cycle c2 = cycle_of_genword(cb, cb.basis_word[cb.c1_size]);
  for (int i = -2 * nedges; i <= 2 * nedges; ++i)
    for (int j = -2 * nedges; j <= 2 * nedges; ++j) {
      if (i == 0 && j == 0) continue;
      out.push_back(cyc_concat(cyc_pow(based, i), cyc_pow(c2, j)));
    }
  return out;
}

// --- minimal solutions and the exponent ceiling -------------------------------------

std::vector<std::vector<i64>> minimal_diophantine_solutions(const DiophantineSystem& sys,
                                                            i64 bound) {
  std::vector<std::vector<i64>> out;
  int n = sys.nvars;
  if (n == 0) {
    for (i64 r : sys.rhs)
      if (r != 0) return out;
    out.push_back({});
    return out;
  }
  int nr = (int)sys.rows.size();
  // attainable range of each row over the remaining suffix
  std::vector<std::vector<i64>> lo(nr, std::vector<i64>(n + 1, 0)),
      hi(nr, std::vector<i64>(n + 1, 0));
  for (int r = 0; r < nr; ++r)
    for (int j = n - 1; j >= 0; --j) {
      i64 a = sys.rows[r][j];
      lo[r][j] = lo[r][j + 1] + (a < 0 ? a * bound : 0);
      hi[r][j] = hi[r][j + 1] + (a > 0 ? a * bound : 0);
    }
  std::vector<i64> z(n, 0), acc(nr, 0);
  std::function<void(int)> rec = [&](int j) {
    for (const auto& s : out) {
      bool dom = true;
      for (int i = 0; i < j && dom; ++i)
        if (z[i] < s[i]) dom = false;
      for (int i = j; i < n && dom; ++i)
        if (s[i] != 0) dom = false;
      if (dom) return; // any completion would dominate a found minimum
    }
    if (j == n) {
      for (int r = 0; r < nr; ++r)
        if (acc[r] != sys.rhs[r]) return;
      bool zero = std::all_of(z.begin(), z.end(), [](i64 v) { return v == 0; });
      if (!zero) out.push_back(z);
      return;
    }
    for (i64 v = 0; v <= bound; ++v) {
      z[j] = v;
      bool feasible = true;
      for (int r = 0; r < nr && feasible; ++r) {
        i64 s = acc[r] + sys.rows[r][j] * v;
        if (s + lo[r][j + 1] > sys.rhs[r] || s + hi[r][j + 1] < sys.rhs[r]) feasible = false;
      }
      if (feasible) {
        for (int r = 0; r < nr; ++r) acc[r] += sys.rows[r][j] * v;
        rec(j + 1);
        for (int r = 0; r < nr; ++r) acc[r] -= sys.rows[r][j] * v;
      }
    }
    z[j] = 0;
  };
  rec(0);
  // sweep out any survivors dominated by a later find
  std::vector<std::vector<i64>> anti;
  for (const auto& s : out) {
    bool dom = false;
    for (const auto& o : out) {
      if (&o == &s) continue;
      bool le = true, lt = false;
      for (int i = 0; i < n; ++i) {
        if (o[i] > s[i]) le = false;
        if (o[i] < s[i]) lt = true;
      }
      if (le && lt) dom = true;
    }
    if (!dom) anti.push_back(s);
  }
  return anti;
}

std::optional<int> exponent_bound(const FreeProduct& G, const GenEq& W,
                                  const PeriodicStructure& PS, const SolveOptions& opt,
                                  i64 dio_bound, std::string* err) {
  auto cls = classify_structure(G, W, PS, opt, err);
  if (!cls) return std::nullopt;
  if (cls->kind != Classification::Regular) {
    if (err) *err = "exponent ceiling needs a regular structure";
    return std::nullopt;
  }
  int rho = W.rho;
  if (PS.items.empty()) return 2 * rho;
  auto gb = build_graph_and_basis(W, PS, err);
  if (!gb) return std::nullopt;
  const PeriodicGraph& g = gb->graph;
  const CycleBasis& cb = gb->basis;
  int m = (int)cb.gen_edge.size();
  if (m == 0) return 2 * rho;

  // per-cycle exponent bound through the basis coordinates: pure saturation
  // rows contribute nothing, every other basis cycle stays within 2*rho
  std::vector<i64> ge(m, 0);
  i64 gmax = 0;
  for (int i = 0; i < m; ++i) {
    std::vector<i64> coord = abelianize(cb.gen_in_basis[i], m);
    i64 sum = 0;
    for (int j = 0; j < m; ++j) {
      bool pure = j < cb.c1_size && cb.c1_kind[j] == CycleBasis::ValueOne;
      if (!pure) sum += std::abs(coord[j]);
    }
    ge[i] = 2 * (i64)rho * sum;
    gmax = std::max(gmax, ge[i]);
  }

  DiophantineSystem sys;
  sys.nvars = (int)PS.items.size();
  for (int i = 0; i < m; ++i) {
    std::vector<int> trow = cycle_t_row(W, PS, g, cb.gen_cycle[i]);
    std::vector<i64> row(sys.nvars, 0);
    for (int v = 0; v < sys.nvars; ++v) row[v] = trow[PS.items[v]];
    sys.rows.push_back(row);
    sys.rhs.push_back(ge[i]);
  }
  i64 M = 0;
  for (const auto& s : minimal_diophantine_solutions(sys, dio_bound))
    for (i64 v : s) M = std::max(M, v);
  i64 f0 = std::max<i64>(2 * rho, gmax * (M + 1) + 2);
  return (int)f0;
}

// --- display -----------------------------------------------------------------------

std::string show(const PeriodicStructure& PS) {
  std::ostringstream os;
  os << "sections:";
  for (size_t i = 0; i < PS.sections.size(); ++i)
    os << " " << PS.sections[i] << (PS.x_sign[i] > 0 ? "+" : "-");
  os << " items:";
  for (int k : PS.items) os << " h" << k;
  os << " bases:";
  for (int b : PS.bases) os << " " << b;
  os << " classes:";
  for (size_t i = 0; i < PS.slots.size(); ++i) {
    os << " " << PS.slots[i].l;
    if (PS.slots[i].side == 1) os << "L";
    if (PS.slots[i].side == 2) os << "R";
    os << "=" << PS.r_class[i];
  }
  return os.str();
}

std::string to_dot(const PeriodicGraph& g) {
  std::ostringstream os;
  os << "digraph periodic {\n";
  for (int v = 0; v < g.nverts; ++v) {
    os << "  v" << v << " [label=\"" << g.vertex_slot[v].l;
    if (g.vertex_slot[v].side == 1) os << "L";
    if (g.vertex_slot[v].side == 2) os << "R";
    os << "\"];\n";
  }
  for (int e = 0; e < (int)g.edges.size(); ++e) {
    os << "  v" << g.edges[e].from << " -> v" << g.edges[e].to << " [label=\"h"
       << g.edges[e].item << "\"";
    if (g.in_t0[e]) os << ", style=bold";
    else if (g.in_t[e]) os << ", style=solid";
    else os << ", style=dashed";
    if (g.is_short[e]) os << ", color=gray";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

} // namespace fp
