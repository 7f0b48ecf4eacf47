#include "geneq.h"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

namespace fp {

using json = nlohmann::ordered_json;

Base variable_base(int alpha, int beta, int eps, int dual) {
  Base b;
  b.kind = BaseKind::Variable;
  b.alpha = alpha;
  b.beta = beta;
  b.eps = eps;
  b.dual = dual;
  return b;
}

Base factor_base(int alpha, int beta, int eps, int factor, int triple, int pos) {
  Base b;
  b.kind = BaseKind::Factor;
  b.alpha = alpha;
  b.beta = beta;
  b.eps = eps;
  b.factor = factor;
  b.triple = triple;
  b.pos = pos;
  return b;
}

Base constant_base(int alpha, Letter label) {
  Base b;
  b.kind = BaseKind::Constant;
  b.alpha = alpha;
  b.beta = alpha + 1;
  b.label = label;
  return b;
}

// --- structural queries -------------------------------------------------------

bool base_intersects_boundary(const Base& b, int i) { return b.alpha < i && i < b.beta; }
bool base_touches_boundary(const Base& b, int i) { return i == b.alpha || i == b.beta; }

bool boundary_open(const GenEq& W, int i) {
  for (const Base& b : W.bases)
    if (base_intersects_boundary(b, i)) return true;
  return false;
}

bool boundary_tied_in(const GenEq& W, int i, int mu) {
  for (const Conn& c : conns_of(W, mu))
    if (c.p == i) return true;
  return false;
}

bool boundary_free(const GenEq& W, int i) {
  for (const Base& b : W.bases)
    if (base_touches_boundary(b, i) || base_intersects_boundary(b, i)) return false;
  for (const Conn& c : W.conns)
    if (c.p == i || c.q == i) return false;
  return true;
}

bool item_in_base(const Base& b, int i) { return b.alpha <= i && i <= b.beta - 1; }

int gamma(const GenEq& W, int i) {
  int n = 0;
  for (const Base& b : W.bases)
    if (item_in_base(b, i)) ++n;
  return n;
}

bool matched_pair(const GenEq& W, int mu) {
  const Base& b = W.bases[mu];
  if (b.kind != BaseKind::Variable || b.dual < 0) return false;
  const Base& d = W.bases[b.dual];
  return b.alpha == d.alpha && b.beta == d.beta;
}

bool base_contained_in(const Base& inner, const Base& outer) {
  return outer.alpha <= inner.alpha && inner.beta <= outer.beta;
}

bool bases_overlap(const Base& x, const Base& y) {
  return x.alpha <= y.beta && y.alpha <= x.beta;
}

bool base_in_range(const Base& b, int lo, int hi) { return lo <= b.alpha && b.beta <= hi; }

bool section_closed(const GenEq& W, int lo, int hi) {
  if (boundary_open(W, lo) || boundary_open(W, hi)) return false;
  for (int i = lo + 1; i < hi; ++i)
    if (!boundary_open(W, i)) return false;
  return true;
}

std::vector<Conn> conns_of(const GenEq& W, int mu) {
  std::vector<Conn> out;
  int dual = W.bases[mu].dual;
  for (const Conn& c : W.conns) {
    if (c.base == mu) out.push_back(c);
    if (c.base == dual && dual != mu) out.push_back(Conn{c.q, mu, c.p});
  }
  return out;
}

int active_boundary(const GenEq& W) {
  int hi = 1;
  for (const Section& s : W.sections)
    if (s.active) hi = std::max(hi, s.hi);
  return hi;
}

int count_active_bases(const GenEq& W) {
  int n = 0;
  for (const Section& s : W.sections) {
    if (!s.active) continue;
    for (const Base& b : W.bases)
      if (base_in_range(b, s.lo, s.hi)) ++n;
  }
  return n;
}

int count_open_active_boundaries(const GenEq& W) {
  int n = 0;
  for (const Section& s : W.sections) {
    if (!s.active) continue;
    for (int i = s.lo; i <= s.hi; ++i)
      if (boundary_open(W, i)) ++n;
  }
  return n;
}

int section_base_count(const GenEq& W, const Section& s) {
  int n = 0;
  for (const Base& b : W.bases)
    if (base_in_range(b, s.lo, s.hi)) ++n;
  return n;
}

int complexity(const GenEq& W) {
  int c = 0;
  for (const Section& s : W.sections)
    if (s.active) c += std::max(0, section_base_count(W, s) - 2);
  return c;
}

// --- induced equations --------------------------------------------------------

InducedSystem induced_system(const GenEq& W) {
  InducedSystem I;
  std::map<int, std::vector<int>> triples;
  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& b = W.bases[i];
    switch (b.kind) {
      case BaseKind::Variable:
        if (b.dual > i) {
          const Base& d = W.bases[b.dual];
          I.basic.push_back(BasicEq{{b.alpha, b.beta, b.eps}, {d.alpha, d.beta, d.eps}});
        }
        break;
      case BaseKind::Factor:
        triples[b.triple].push_back(i);
        break;
      case BaseKind::Constant:
        I.coeff.push_back(CoeffEq{b.alpha, b.label});
        break;
    }
  }
  for (auto& [id, members] : triples) {
    std::sort(members.begin(), members.end(),
              [&](int x, int y) { return W.bases[x].pos < W.bases[y].pos; });
    FactorEq f;
    f.factor = W.bases[members[0]].factor;
    for (int k = 0; k < 3 && k < (int)members.size(); ++k) {
      f.item[k] = W.bases[members[k]].alpha;
      f.eps[k] = W.bases[members[k]].eps;
    }
    I.factor.push_back(f);
  }
  for (const Conn& c : W.conns) {
    const Base& b = W.bases[c.base];
    const Base& d = W.bases[b.dual];
    if (b.eps == d.eps)
      I.boundary.push_back(BasicEq{{b.alpha, c.p, +1}, {d.alpha, c.q, +1}});
    else
      I.boundary.push_back(BasicEq{{b.alpha, c.p, +1}, {c.q, d.beta, -1}});
  }
  return I;
}

// --- solutions ------------------------------------------------------------

namespace {

// seams inside [lo,hi) must alternate factors for the side to be reduced as
// written; empty check for single items
bool side_reduced(const GESolution& H, int lo, int hi) {
  for (int i = lo; i + 1 < hi; ++i)
    if (ttype(H.val[i]) == itype(H.val[i + 1])) return false;
  return true;
}

Word side_value(const FreeProduct& G, const GESolution& H, const SideRef& s) {
  Word acc;
  for (int i = s.lo; i < s.hi; ++i) acc = G.concat(acc, H.val[i]);
  return s.eps < 0 ? G.invert(acc) : acc;
}

bool graphical_side(const GESolution& H, const SideRef& s, const Word& value) {
  int total = 0;
  for (int i = s.lo; i < s.hi; ++i) total += H.val[i].len();
  return value.len() == total;
}

} // namespace

bool check_solution(const FreeProduct& G, const GenEq& W, const GESolution& H,
                    std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if ((int)H.val.size() != W.rho + 1) return fail("solution arity mismatch");
  for (int i = 1; i <= W.rho; ++i)
    if (H.val[i].empty()) return fail("item " + std::to_string(i) + " is trivial");

  InducedSystem I = induced_system(W);
  auto check_pair = [&](const BasicEq& e, const char* what) {
    if (!side_reduced(H, e.left.lo, e.left.hi) || !side_reduced(H, e.right.lo, e.right.hi))
      return fail(std::string(what) + " side not reduced as written");
    Word L = side_value(G, H, e.left);
    Word R = side_value(G, H, e.right);
    if (!graphical_side(H, e.left, L) || !graphical_side(H, e.right, R))
      return fail(std::string(what) + " side collapses");
    if (L != R) return fail(std::string(what) + " sides differ");
    return true;
  };
  for (const BasicEq& e : I.basic)
    if (!check_pair(e, "basic")) return false;
  for (const BasicEq& e : I.boundary)
    if (!check_pair(e, "boundary")) return false;
  for (const FactorEq& f : I.factor) {
    const FactorGroup& F = G.factor(f.factor);
    int acc = F.identity;
    for (int k = 0; k < 3; ++k) {
      const Word& w = H.val[f.item[k]];
      if (w.len() != 1 || w.ls[0].factor != f.factor)
        return fail("factor equation item is not a single letter of its factor");
      int e = w.ls[0].elem;
      if (f.eps[k] < 0) e = F.inv[e];
      acc = F.mul_of(acc, e);
    }
    if (acc != F.identity) return fail("factor equation does not vanish");
  }
  for (const CoeffEq& c : I.coeff) {
    const Word& w = H.val[c.item];
    if (w.len() != 1 || !(w.ls[0] == c.a)) return fail("coefficient equation violated");
  }
  for (int j = 1; j <= W.rho; ++j) {
    if (W.iterm[j] != 0 && itype(H.val[j]) != W.iterm[j])
      return fail("type constraint violated at item " + std::to_string(j));
    if (W.tterm[j + 1] != 0 && ttype(H.val[j]) != W.tterm[j + 1])
      return fail("type constraint violated at item " + std::to_string(j));
  }
  return true;
}

namespace {

// readiness plan: every induced equation is checked as soon as its highest
// item is assigned; seam alternation is checked pairwise even earlier
struct GEPlan {
  std::vector<std::vector<int>> basic_at, boundary_at, factor_at;
  std::vector<std::vector<Letter>> pins;       // all coefficient pins per item
  std::vector<std::vector<int>> factor_of;     // factors whose base starts at the item
  InducedSystem I;
};

int side_max(const SideRef& s) { return s.hi - 1; }

GEPlan make_geplan(const GenEq& W) {
  GEPlan P;
  P.I = induced_system(W);
  P.basic_at.resize(W.rho + 1);
  P.boundary_at.resize(W.rho + 1);
  P.factor_at.resize(W.rho + 1);
  P.pins.resize(W.rho + 1);
  P.factor_of.resize(W.rho + 1);
  for (int i = 0; i < (int)P.I.basic.size(); ++i) {
    int m = std::max(side_max(P.I.basic[i].left), side_max(P.I.basic[i].right));
    P.basic_at[std::max(1, m)].push_back(i);
  }
  for (int i = 0; i < (int)P.I.boundary.size(); ++i) {
    const BasicEq& e = P.I.boundary[i];
    // empty prefixes are legal in boundary equations
    int m = std::max({1, side_max(e.left), side_max(e.right)});
    P.boundary_at[m].push_back(i);
  }
  for (int i = 0; i < (int)P.I.factor.size(); ++i) {
    const FactorEq& f = P.I.factor[i];
    int m = std::max({f.item[0], f.item[1], f.item[2]});
    P.factor_at[m].push_back(i);
  }
  for (const CoeffEq& c : P.I.coeff) P.pins[c.item].push_back(c.a);
  for (const FactorEq& f : P.I.factor)
    for (int k = 0; k < 3; ++k) P.factor_of[f.item[k]].push_back(f.factor);
  return P;
}

bool check_basic_now(const FreeProduct& G, const GESolution& H, const BasicEq& e) {
  if (!side_reduced(H, e.left.lo, e.left.hi) || !side_reduced(H, e.right.lo, e.right.hi))
    return false;
  Word L = side_value(G, H, e.left);
  Word R = side_value(G, H, e.right);
  return graphical_side(H, e.left, L) && graphical_side(H, e.right, R) && L == R;
}

bool check_factor_now(const FreeProduct& G, const GESolution& H, const FactorEq& f) {
  const FactorGroup& F = G.factor(f.factor);
  int acc = F.identity;
  for (int k = 0; k < 3; ++k) {
    const Word& w = H.val[f.item[k]];
    if (w.len() != 1 || w.ls[0].factor != f.factor) return false;
    int e = w.ls[0].elem;
    if (f.eps[k] < 0) e = F.inv[e];
    acc = F.mul_of(acc, e);
  }
  return acc == F.identity;
}

} // namespace

bool for_each_geneq_solution(const FreeProduct& G, const GenEq& W, const SolveOptions& opt,
                             const std::function<bool(const GESolution&)>& visit) {
  GEPlan P = make_geplan(W);
  std::vector<Word> all = words_up_to(G, opt.max_len);

  // per-item candidate lists honoring nontriviality, type constraints, pins
  // and factor-equation membership
  std::vector<std::vector<Word>> cand(W.rho + 1);
  for (int j = 1; j <= W.rho; ++j) {
    for (const Word& w : all) {
      if (w.empty()) continue;
      if (W.iterm[j] != 0 && itype(w) != W.iterm[j]) continue;
      if (W.tterm[j + 1] != 0 && ttype(w) != W.tterm[j + 1]) continue;
      bool ok = true;
      for (const Letter& a : P.pins[j])
        if (!(w.len() == 1 && w.ls[0] == a)) ok = false;
      for (int f : P.factor_of[j])
        if (!(w.len() == 1 && w.ls[0].factor == f)) ok = false;
      if (ok) cand[j].push_back(w);
    }
  }

  GESolution H;
  H.val.resize(W.rho + 1);
  std::int64_t budget = opt.node_budget;
  // explicit stack DFS over items 1..rho
  std::vector<size_t> idx(W.rho + 2, 0);
  int d = 1;
  if (W.rho == 0) return visit(H);
  while (d >= 1) {
    if (idx[d] == cand[d].size()) {
      idx[d] = 0;
      --d;
      if (d >= 1) ++idx[d];
      continue;
    }
    if (budget == 0) return false;
    if (budget > 0) --budget;
    H.val[d] = cand[d][idx[d]];
    bool ok = true;
    for (int ei : P.basic_at[d])
      if (!check_basic_now(G, H, P.I.basic[ei])) {
        ok = false;
        break;
      }
    if (ok)
      for (int ei : P.boundary_at[d])
        if (!check_basic_now(G, H, P.I.boundary[ei])) {
          ok = false;
          break;
        }
    if (ok)
      for (int ei : P.factor_at[d])
        if (!check_factor_now(G, H, P.I.factor[ei])) {
          ok = false;
          break;
        }
    if (!ok) {
      ++idx[d];
      continue;
    }
    if (d == W.rho) {
      if (!visit(H)) return false;
      ++idx[d];
    } else {
      ++d;
    }
  }
  return true;
}

std::vector<GESolution> geneq_solutions(const FreeProduct& G, const GenEq& W,
                                        const SolveOptions& opt, bool* complete) {
  std::vector<GESolution> out;
  bool full = for_each_geneq_solution(G, W, opt, [&](const GESolution& H) {
    out.push_back(H);
    return true;
  });
  if (complete) *complete = full;
  return out;
}

int active_length(const GenEq& W, const GESolution& H) {
  int hi = active_boundary(W);
  int d = 0;
  for (int i = 1; i < hi; ++i) d += H.val[i].len();
  return d;
}

int excess(const GenEq& W, const GESolution& H) {
  int hi = active_boundary(W);
  int sum = 0;
  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& b = W.bases[i];
    if (b.kind != BaseKind::Variable) continue;
    const Base& d = W.bases[b.dual];
    bool in_active = (b.alpha >= 1 && b.beta <= hi) || (d.alpha >= 1 && d.beta <= hi);
    if (!in_active) continue;
    for (int k = b.alpha; k < b.beta; ++k) sum += H.val[k].len();
  }
  return sum - 2 * active_length(W, H);
}

// --- formal consistency -----------------------------------------------------

std::string check_formal_consistency(const GenEq& W) {
  auto eps_pair = [&](const Base& b) { return b.eps * W.bases[b.dual].eps; };

  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& b = W.bases[i];
    if (b.kind != BaseKind::Variable) continue;
    const Base& d = W.bases[b.dual];
    // (1) sign-opposite duals may not overlap
    if (eps_pair(b) == -1 && bases_overlap(b, d))
      return "opposite-sign duals overlap (base " + std::to_string(i) + ")";
    // (2) connections are monotone in the orientation given by the signs
    auto cs = conns_of(W, i);
    for (const Conn& c1 : cs)
      for (const Conn& c2 : cs) {
        if (c1.p < c2.p && eps_pair(b) == 1 && c1.q > c2.q)
          return "connections not increasing (base " + std::to_string(i) + ")";
        if (c1.p < c2.p && eps_pair(b) == -1 && c1.q < c2.q)
          return "connections not decreasing (base " + std::to_string(i) + ")";
        if (c1.p == c2.p && c1.q != c2.q)
          return "ambiguous connection (base " + std::to_string(i) + ")";
      }
    // (3) matched pairs only connect boundaries to themselves
    if (b.alpha == d.alpha)
      for (const Conn& c : cs)
        if (c.p != c.q) return "matched pair with shifted connection (base " + std::to_string(i) + ")";
    // (6) endpoint terms agree with the dual, literally including 0
    if (eps_pair(b) == 1) {
      if (W.iterm[b.alpha] != W.iterm[d.alpha] || W.tterm[b.beta] != W.tterm[d.beta])
        return "endpoint terms disagree (base " + std::to_string(i) + ")";
    } else {
      if (W.iterm[b.alpha] != W.tterm[d.beta] || W.tterm[b.beta] != W.iterm[d.alpha])
        return "endpoint terms disagree (base " + std::to_string(i) + ")";
    }
  }

  // (4) factor/constant bases sharing an initial boundary share the factor
  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& x = W.bases[i];
    if (x.kind == BaseKind::Variable) continue;
    int fx = x.kind == BaseKind::Constant ? x.label.factor : x.factor;
    for (int j = i + 1; j < (int)W.bases.size(); ++j) {
      const Base& y = W.bases[j];
      if (y.kind == BaseKind::Variable) continue;
      int fy = y.kind == BaseKind::Constant ? y.label.factor : y.factor;
      if (x.alpha == y.alpha && fx != fy)
        return "factor clash at boundary " + std::to_string(x.alpha);
    }
  }

  // (5) a factor/constant base inside a connected-through base spans exactly
  // one item on the other end as well
  for (const Base& eta : W.bases) {
    if (eta.kind == BaseKind::Variable) continue;
    for (int m = 0; m < (int)W.bases.size(); ++m) {
      const Base& mu = W.bases[m];
      if (mu.kind != BaseKind::Variable || !base_contained_in(eta, mu)) continue;
      auto cs = conns_of(W, m);
      for (int i = eta.alpha; i < eta.beta; ++i) {
        const Conn *c1 = nullptr, *c2 = nullptr;
        for (const Conn& c : cs) {
          if (c.p == i) c1 = &c;
          if (c.p == i + 1) c2 = &c;
        }
        if (c1 && c2 && std::abs(c1->q - c2->q) != 1)
          return "short base stretched through a connection";
      }
    }
  }

  // (7) factor triples: pairwise endpoint term duality
  std::map<int, std::vector<int>> triples;
  for (int i = 0; i < (int)W.bases.size(); ++i)
    if (W.bases[i].kind == BaseKind::Factor) triples[W.bases[i].triple].push_back(i);
  for (auto& [id, mem] : triples) {
    for (int x : mem)
      for (int y : mem) {
        if (x == y) continue;
        const Base& n1 = W.bases[x];
        const Base& n2 = W.bases[y];
        if (n1.eps == n2.eps) {
          if (W.iterm[n1.alpha] != W.iterm[n2.alpha] || W.tterm[n1.beta] != W.tterm[n2.beta])
            return "factor triple terms disagree (triple " + std::to_string(id) + ")";
        } else {
          if (W.iterm[n1.alpha] != W.tterm[n2.beta] || W.tterm[n1.beta] != W.iterm[n2.alpha])
            return "factor triple terms disagree (triple " + std::to_string(id) + ")";
        }
      }
  }
  return "";
}

std::string validate(const GenEq& W, bool strict) {
  if (W.rho < 0) return "negative item count";
  if ((int)W.iterm.size() < W.rho + 2 || (int)W.tterm.size() < W.rho + 2)
    return "term tables too short";
  for (int i = 1; i <= W.rho + 1; ++i) {
    if (W.iterm[i] < 0 || W.iterm[i] > 2 || W.tterm[i] < 0 || W.tterm[i] > 2)
      return "boundary term out of range";
  }
  std::map<int, std::vector<int>> triples;
  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& b = W.bases[i];
    std::string tag = "base " + std::to_string(i) + ": ";
    if (b.alpha < 1 || b.beta > W.rho + 1) return tag + "boundary out of range";
    if (b.alpha >= b.beta) return tag + "empty span";
    switch (b.kind) {
      case BaseKind::Variable: {
        if (b.dual < 0 || b.dual >= (int)W.bases.size()) return tag + "missing dual";
        if (b.dual == i) return tag + "self-dual";
        const Base& d = W.bases[b.dual];
        if (d.kind != BaseKind::Variable || d.dual != i) return tag + "broken involution";
        if (b.eps != 1 && b.eps != -1) return tag + "bad sign";
        break;
      }
      case BaseKind::Factor:
        if (b.factor < 1 || b.factor > 2) return tag + "bad factor";
        if (b.eps != 1 && b.eps != -1) return tag + "bad sign";
        if (b.pos < 1 || b.pos > 3) return tag + "bad triple position";
        triples[b.triple].push_back(i);
        break;
      case BaseKind::Constant:
        if (strict && b.beta != b.alpha + 1) return tag + "constant base spans several items";
        if (b.label.factor < 1 || b.label.factor > 2) return tag + "bad letter";
        break;
    }
  }
  for (auto& [id, mem] : triples) {
    if (mem.size() != 3) return "factor triple " + std::to_string(id) + " is not a triple";
    int f = W.bases[mem[0]].factor;
    bool pos_seen[4] = {false, false, false, false};
    for (int i : mem) {
      if (W.bases[i].factor != f) return "factor triple " + std::to_string(id) + " mixes factors";
      if (pos_seen[W.bases[i].pos]) return "factor triple " + std::to_string(id) + " repeats a position";
      pos_seen[W.bases[i].pos] = true;
    }
  }
  for (const Conn& c : W.conns) {
    if (c.base < 0 || c.base >= (int)W.bases.size()) return "connection on missing base";
    const Base& b = W.bases[c.base];
    if (b.kind != BaseKind::Variable) return "connection on non-variable base";
    const Base& d = W.bases[b.dual];
    if (!(b.alpha < c.p && c.p < b.beta)) return "connection boundary outside its base";
    if (!(d.alpha < c.q && c.q < d.beta)) return "connection boundary outside the dual";
    if (b.eps * d.eps == 1) {
      if (W.iterm[c.p] != W.iterm[c.q] || W.tterm[c.p] != W.tterm[c.q])
        return "connection joins boundaries with different terms";
    } else {
      if (W.iterm[c.p] != W.tterm[c.q] || W.tterm[c.p] != W.iterm[c.q])
        return "connection joins boundaries with different terms";
    }
  }
  // sections partition [1, rho+1]
  if (!W.sections.empty()) {
    std::vector<Section> ss = W.sections;
    std::sort(ss.begin(), ss.end(), [](const Section& a, const Section& b) { return a.lo < b.lo; });
    int at = 1;
    for (const Section& s : ss) {
      if (s.lo != at) return "sections do not tile the items";
      if (s.hi <= s.lo) return "empty section";
      at = s.hi;
    }
    if (W.rho > 0 && at != W.rho + 1) return "sections do not reach the last boundary";
  }
  return "";
}

// --- serialization ------------------------------------------------------------

namespace {

const char* kind_name(BaseKind k) {
  switch (k) {
    case BaseKind::Variable: return "variable";
    case BaseKind::Factor: return "factor";
    case BaseKind::Constant: return "constant";
  }
  return "?";
}

const char* class_name(SectionClass c) {
  switch (c) {
    case SectionClass::Variable: return "variable";
    case SectionClass::G1: return "g1";
    case SectionClass::G2: return "g2";
    case SectionClass::Free: return "free";
  }
  return "?";
}

json dump_geneq(const GenEq& W) {
  json j;
  j["rho"] = W.rho;
  j["bases"] = json::array();
  for (const Base& b : W.bases) {
    json bj;
    bj["kind"] = kind_name(b.kind);
    bj["alpha"] = b.alpha;
    bj["beta"] = b.beta;
    switch (b.kind) {
      case BaseKind::Variable:
        bj["eps"] = b.eps;
        bj["dual"] = b.dual;
        break;
      case BaseKind::Factor:
        bj["eps"] = b.eps;
        bj["factor"] = b.factor;
        bj["triple"] = b.triple;
        bj["pos"] = b.pos;
        break;
      case BaseKind::Constant:
        bj["label"] = {b.label.factor, b.label.elem};
        break;
    }
    j["bases"].push_back(bj);
  }
  j["connections"] = json::array();
  for (const Conn& c : W.conns) j["connections"].push_back({c.p, c.base, c.q});
  j["iterm"] = std::vector<int>(W.iterm.begin() + 1, W.iterm.begin() + W.rho + 2);
  j["tterm"] = std::vector<int>(W.tterm.begin() + 1, W.tterm.begin() + W.rho + 2);
  j["sections"] = json::array();
  for (const Section& s : W.sections) {
    json sj;
    sj["lo"] = s.lo;
    sj["hi"] = s.hi;
    sj["class"] = class_name(s.cls);
    sj["part"] = s.active ? "active" : "nonactive";
    j["sections"].push_back(sj);
  }
  return j;
}

} // namespace

std::string to_json(const GenEq& W) { return dump_geneq(W).dump(2); }

std::optional<GenEq> from_json(const std::string& text, std::string* err) {
  auto bad = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return bad("not valid JSON");
  GenEq W;
  try {
    W.rho = j.at("rho").get<int>();
    W.init_terms();
    for (const json& bj : j.at("bases")) {
      Base b;
      std::string k = bj.at("kind").get<std::string>();
      if (k == "variable") {
        b.kind = BaseKind::Variable;
        b.eps = bj.at("eps").get<int>();
        b.dual = bj.at("dual").get<int>();
      } else if (k == "factor") {
        b.kind = BaseKind::Factor;
        b.eps = bj.at("eps").get<int>();
        b.factor = bj.at("factor").get<int>();
        b.triple = bj.at("triple").get<int>();
        b.pos = bj.at("pos").get<int>();
      } else if (k == "constant") {
        b.kind = BaseKind::Constant;
        b.label.factor = bj.at("label").at(0).get<int>();
        b.label.elem = bj.at("label").at(1).get<int>();
      } else {
        return bad("unknown base kind '" + k + "'");
      }
      b.alpha = bj.at("alpha").get<int>();
      b.beta = bj.at("beta").get<int>();
      W.bases.push_back(b);
    }
    if (j.contains("connections"))
      for (const json& cj : j.at("connections"))
        W.conns.push_back(Conn{cj.at(0).get<int>(), cj.at(1).get<int>(), cj.at(2).get<int>()});
    if (j.contains("iterm")) {
      auto v = j.at("iterm").get<std::vector<int>>();
      for (int i = 0; i < (int)v.size() && i <= W.rho; ++i) W.iterm[i + 1] = v[i];
    }
    if (j.contains("tterm")) {
      auto v = j.at("tterm").get<std::vector<int>>();
      for (int i = 0; i < (int)v.size() && i <= W.rho; ++i) W.tterm[i + 1] = v[i];
    }
    if (j.contains("sections"))
      for (const json& sj : j.at("sections")) {
        Section s;
        s.lo = sj.at("lo").get<int>();
        s.hi = sj.at("hi").get<int>();
        std::string c = sj.at("class").get<std::string>();
        if (c == "variable")
          s.cls = SectionClass::Variable;
        else if (c == "g1")
          s.cls = SectionClass::G1;
        else if (c == "g2")
          s.cls = SectionClass::G2;
        else if (c == "free")
          s.cls = SectionClass::Free;
        else
          return bad("unknown section class '" + c + "'");
        s.active = sj.at("part").get<std::string>() == "active";
        W.sections.push_back(s);
      }
  } catch (const json::exception& e) {
    return bad(e.what());
  }
  std::string v = validate(W, /*strict=*/false);
  if (!v.empty()) return bad(v);
  return W;
}

std::string canonical_json(const GenEq& W) {
  // renumber bases by a stable structural key, remap duals and connections
  int n = (int)W.bases.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto key = [&](int i) {
    const Base& b = W.bases[i];
    const Base* d = b.kind == BaseKind::Variable ? &W.bases[b.dual] : nullptr;
    return std::tuple<int, int, int, int, int, int, int, int, int, int, int, int>(
        (int)b.kind, b.alpha, b.beta, b.eps, b.factor, b.triple, b.pos, b.label.factor,
        b.label.elem, d ? d->alpha : 0, d ? d->beta : 0, d ? d->eps : 0);
  };
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return key(x) < key(y); });
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  GenEq C = W;
  C.bases.clear();
  for (int i = 0; i < n; ++i) {
    Base b = W.bases[order[i]];
    if (b.kind == BaseKind::Variable) b.dual = pos[b.dual];
    b.origin = -1;
    C.bases.push_back(b);
  }
  C.conns.clear();
  for (const Conn& c : W.conns) {
    Conn r{c.p, pos[c.base], c.q};
    // one orientation per connection: through the smaller base index
    int dual = C.bases[r.base].dual;
    if (dual < r.base) r = Conn{r.q, dual, r.p};
    C.conns.push_back(r);
  }
  std::sort(C.conns.begin(), C.conns.end(), [](const Conn& a, const Conn& b) {
    return std::tie(a.base, a.p, a.q) < std::tie(b.base, b.p, b.q);
  });
  C.conns.erase(std::unique(C.conns.begin(), C.conns.end()), C.conns.end());
  std::sort(C.sections.begin(), C.sections.end(),
            [](const Section& a, const Section& b) { return a.lo < b.lo; });
  return dump_geneq(C).dump();
}

bool structurally_equal(const GenEq& A, const GenEq& B) {
  return canonical_json(A) == canonical_json(B);
}

std::string show(const GenEq& W, const FreeProduct* G) {
  std::ostringstream o;
  o << "items 1.." << W.rho << "\n";
  for (int i = 0; i < (int)W.bases.size(); ++i) {
    const Base& b = W.bases[i];
    o << "  " << i << ": " << kind_name(b.kind) << " [" << b.alpha << "," << b.beta << ")";
    if (b.kind == BaseKind::Variable) o << " eps=" << b.eps << " dual=" << b.dual;
    if (b.kind == BaseKind::Factor)
      o << " eps=" << b.eps << " G" << b.factor << " triple=" << b.triple << "." << b.pos;
    if (b.kind == BaseKind::Constant) {
      o << " label=";
      if (G)
        o << G->show(b.label);
      else
        o << "g" << b.label.factor << "#" << b.label.elem;
    }
    o << "\n";
  }
  for (const Conn& c : W.conns) o << "  conn (" << c.p << "," << c.base << "," << c.q << ")\n";
  for (const Section& s : W.sections)
    o << "  section [" << s.lo << "," << s.hi << ") " << class_name(s.cls) << " "
      << (s.active ? "active" : "nonactive") << "\n";
  return o.str();
}

// --- solution transport -----------------------------------------------------

Theta Theta::identity(int rho) {
  Theta t;
  t.img.resize(rho + 1);
  for (int i = 1; i <= rho; ++i) t.img[i] = {var_sym(i, +1)};
  return t;
}

GESolution transport_solution(const FreeProduct& G, const Theta& th, const GESolution& Hnew) {
  Assignment U;
  // item k of the successor appears as variable number k
  U.val.resize(Hnew.val.size());
  for (size_t i = 0; i < Hnew.val.size(); ++i) U.val[i] = Hnew.val[i];
  GESolution H;
  H.val.resize(th.img.size());
  for (size_t i = 1; i < th.img.size(); ++i) H.val[i] = substitute(G, th.img[i], U);
  return H;
}

Theta compose(const FreeProduct& G, const Theta& a, const Theta& b) {
  Theta r;
  r.img.resize(a.img.size());
  for (size_t i = 1; i < a.img.size(); ++i) {
    SymWord w;
    for (const Sym& s : a.img[i]) {
      if (!s.is_var) {
        w.push_back(s);
        continue;
      }
      const SymWord& piece = b.img[s.var];
      if (s.eps > 0) {
        w.insert(w.end(), piece.begin(), piece.end());
      } else {
        SymWord inv = word_inverse(G, piece);
        w.insert(w.end(), inv.begin(), inv.end());
      }
    }
    r.img[i] = w;
  }
  return r;
}

} // namespace fp
