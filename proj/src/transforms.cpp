#include "transforms.h"

#include <algorithm>
#include <sstream>

namespace fp {

namespace {

std::nullopt_t fail(std::string* err, const std::string& m) {
  if (err) *err = m;
  return std::nullopt;
}

// one elementary rewrite: successor equation plus the item substitution
struct StepResult {
  GenEq W;
  Theta theta;
};

Properness iso_mark() { return Properness{Properness::Isomorphism, 0}; }

Properness merge_prop(const Properness& a, const Properness& b) {
  if (a.kind == Properness::Proper || b.kind == Properness::Proper)
    return Properness{Properness::Proper, 0};
  if (a.kind == Properness::Uncertified || b.kind == Properness::Uncertified)
    return Properness{Properness::Uncertified, std::max(a.bound, b.bound)};
  return iso_mark();
}

bool share_items(const Base& x, const Base& y) {
  return x.alpha < y.beta && y.alpha < x.beta;
}

// drop the listed bases (always whole dual pairs) and their connections
GenEq drop_bases(const GenEq& W, std::vector<int> kill) {
  std::sort(kill.begin(), kill.end());
  std::vector<int> bm(W.bases.size(), -1);
  int at = 0;
  for (int v = 0; v < (int)W.bases.size(); ++v)
    if (!std::binary_search(kill.begin(), kill.end(), v)) bm[v] = at++;
  GenEq R = W;
  R.bases.clear();
  R.conns.clear();
  for (int v = 0; v < (int)W.bases.size(); ++v) {
    if (bm[v] < 0) continue;
    Base b = W.bases[v];
    if (b.kind == BaseKind::Variable) b.dual = bm[b.dual];
    R.bases.push_back(b);
  }
  for (const Conn& c : W.conns)
    if (bm[c.base] >= 0) R.conns.push_back(Conn{c.p, bm[c.base], c.q});
  return R;
}

std::optional<StepResult> run_et1(const GenEq& W, int li, int p, int q, std::string* err) {
  if (li < 0 || li >= (int)W.bases.size() || W.bases[li].kind != BaseKind::Variable)
    return fail(err, "et1: not a variable base");
  const Base b = W.bases[li];
  const int di = b.dual;
  const Base d = W.bases[di];
  bool have = false;
  for (const Conn& c : conns_of(W, li))
    if (c.p == p && c.q == q) have = true;
  if (!have) return fail(err, "et1: no boundary connection at the cut");
  int e = b.eps * d.eps;
  GenEq R = W;
  Base l1 = b, l2 = b, d1 = d, d2 = d;
  l1.beta = p;
  l2.alpha = p;
  if (e == 1) {
    d1.beta = q;
    d2.alpha = q;
  } else {
    d1.alpha = q;
    d2.beta = q;
  }
  int n = (int)W.bases.size();
  l1.dual = di;
  d1.dual = li;
  l2.dual = n + 1;
  d2.dual = n;
  R.bases[li] = l1;
  R.bases[di] = d1;
  R.bases.push_back(l2);
  R.bases.push_back(d2);
  R.conns.clear();
  for (const Conn& c : W.conns) {
    int pp, qq;
    if (c.base == li) {
      pp = c.p;
      qq = c.q;
    } else if (c.base == di) {
      pp = c.q;
      qq = c.p;
    } else {
      R.conns.push_back(c);
      continue;
    }
    if (pp == p && qq == q) continue;
    if (pp == p || qq == q) return fail(err, "et1: another connection shares the cut boundary");
    R.conns.push_back(Conn{pp, pp < p ? li : n, qq});
  }
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et1: result invalid: " + v);
  return StepResult{std::move(R), Theta::identity(W.rho)};
}

std::optional<StepResult> run_et2(const FreeProduct& G, const GenEq& W, int li, int mi,
                                  std::string* err) {
  if (mi < 0 || mi >= (int)W.bases.size() || W.bases[mi].kind != BaseKind::Variable)
    return fail(err, "et2: the carrier is not a variable base");
  if (li < 0 || li >= (int)W.bases.size() || li == mi)
    return fail(err, "et2: no such base to transfer");
  const Base lam = W.bases[li];
  const Base mu = W.bases[mi];
  const Base dmu = W.bases[mu.dual];
  if (!(mu.alpha <= lam.alpha && lam.beta <= mu.beta))
    return fail(err, "et2: the base is not contained in the carrier");
  int e = mu.eps * dmu.eps;
  auto cs = conns_of(W, mi);
  auto mapb = [&](int r) -> int {
    if (r == mu.alpha) return e == 1 ? dmu.alpha : dmu.beta;
    if (r == mu.beta) return e == 1 ? dmu.beta : dmu.alpha;
    for (const Conn& c : cs)
      if (c.p == r) return c.q;
    return -1;
  };
  int a2 = mapb(lam.alpha), b2 = mapb(lam.beta);
  if (a2 < 0 || b2 < 0) return fail(err, "et2: an endpoint of the base is not tied in the carrier");
  if (lam.kind == BaseKind::Variable)
    for (const Conn& c : conns_of(W, li))
      if (mapb(c.p) < 0) return fail(err, "et2: a tied boundary of the base is not tied in the carrier");
  int na = e == 1 ? a2 : b2, nb = e == 1 ? b2 : a2;
  if (na >= nb) return fail(err, "et2: the transfer collapses the base");
  GenEq R = W;
  Base nl = lam;
  nl.alpha = na;
  nl.beta = nb;
  if (e == -1) {
    if (lam.kind == BaseKind::Constant)
      nl.label = G.inv_letter(lam.label);
    else
      nl.eps = -lam.eps;
  }
  R.bases[li] = nl;
  if (lam.kind == BaseKind::Variable) {
    for (Conn& c : R.conns) {
      if (c.base == li)
        c.p = mapb(c.p);
      else if (c.base == lam.dual && lam.dual != li)
        c.q = mapb(c.q);
    }
  }
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et2: result invalid: " + v);
  return StepResult{std::move(R), Theta::identity(W.rho)};
}

std::optional<StepResult> run_et3(const GenEq& W, int mi, std::string* err) {
  if (mi < 0 || mi >= (int)W.bases.size() || W.bases[mi].kind != BaseKind::Variable)
    return fail(err, "et3: not a variable base");
  if (!matched_pair(W, mi)) return fail(err, "et3: the pair is not matched");
  const Base& b = W.bases[mi];
  if (b.eps != W.bases[b.dual].eps) return fail(err, "et3: matched pair with opposite signs");
  for (const Conn& c : conns_of(W, mi))
    if (c.p != c.q) return fail(err, "et3: a connection of the pair is shifted");
  GenEq R = drop_bases(W, {mi, b.dual});
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et3: result invalid: " + v);
  return StepResult{std::move(R), Theta::identity(W.rho)};
}

std::optional<StepResult> run_et4(const GenEq& W, int mi, std::string* err) {
  if (mi < 0 || mi >= (int)W.bases.size() || W.bases[mi].kind != BaseKind::Variable)
    return fail(err, "et4: not a variable base");
  const Base mu = W.bases[mi];
  const int di = mu.dual;
  const Base dmu = W.bases[di];
  for (int v = 0; v < (int)W.bases.size(); ++v) {
    if (v == mi) continue;
    if (share_items(W.bases[v], mu))
      return fail(err, v == di ? "et4: the dual overlaps the base" : "et4: another base overlaps the base");
  }
  int e = mu.eps * dmu.eps;
  std::vector<int> tau(mu.beta + 1, -1);
  auto cs = conns_of(W, mi);
  for (int i = mu.alpha + 1; i < mu.beta; ++i) {
    for (const Conn& c : cs)
      if (c.p == i) tau[i] = c.q;
    if (tau[i] < 0)
      return fail(err, "et4: boundary " + std::to_string(i) + " is not tied in the base");
  }
  tau[mu.alpha] = e == 1 ? dmu.alpha : dmu.beta;
  tau[mu.beta] = e == 1 ? dmu.beta : dmu.alpha;
  int len = mu.beta - mu.alpha;
  auto C = [&](int k) { return k <= mu.alpha ? k : (k >= mu.beta ? k - len : mu.alpha); };
  auto citem = [&](int t) { return t < mu.alpha ? t : t - len; };

  Theta th;
  th.img.resize(W.rho + 1);
  for (int j = 1; j <= W.rho; ++j) {
    if (j < mu.alpha || j >= mu.beta) {
      th.img[j] = {var_sym(citem(j), +1)};
      continue;
    }
    SymWord w;
    if (e == 1)
      for (int t = tau[j]; t < tau[j + 1]; ++t) w.push_back(var_sym(citem(t), +1));
    else
      for (int t = tau[j] - 1; t >= tau[j + 1]; --t) w.push_back(var_sym(citem(t), -1));
    th.img[j] = w;
  }

  GenEq R;
  R.rho = W.rho - len;
  R.init_terms();
  for (int k = 1; k <= W.rho + 1; ++k) {
    if (k > mu.alpha && k < mu.beta) continue;
    R.iterm[C(k)] = W.iterm[k];
    R.tterm[C(k)] = W.tterm[k];
  }
  // merged boundary: item start comes from beta, item end from alpha
  R.iterm[mu.alpha] = W.iterm[mu.beta];
  R.tterm[mu.alpha] = W.tterm[mu.alpha];
  std::vector<int> bm(W.bases.size(), -1);
  int at = 0;
  for (int v = 0; v < (int)W.bases.size(); ++v)
    if (v != mi && v != di) bm[v] = at++;
  for (int v = 0; v < (int)W.bases.size(); ++v) {
    if (bm[v] < 0) continue;
    Base b = W.bases[v];
    b.alpha = C(b.alpha);
    b.beta = C(b.beta);
    if (b.kind == BaseKind::Variable) b.dual = bm[b.dual];
    R.bases.push_back(b);
  }
  for (const Conn& c : W.conns) {
    if (c.base == mi || c.base == di) continue;
    R.conns.push_back(Conn{C(c.p), bm[c.base], C(c.q)});
  }
  R.sections.clear();
  for (const Section& s : W.sections) {
    Section ns = s;
    ns.lo = C(s.lo);
    ns.hi = C(s.hi);
    if (ns.lo < ns.hi) R.sections.push_back(ns);
  }
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et4: result invalid: " + v);
  return StepResult{std::move(R), std::move(th)};
}

std::optional<StepResult> run_et5_tie(const GenEq& W, int mi, int p, int q, std::string* err) {
  GenEq R = W;
  R.conns.push_back(Conn{p, mi, q});
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et5: " + v);
  v = check_formal_consistency(R);
  if (!v.empty()) return fail(err, "et5: " + v);
  return StepResult{std::move(R), Theta::identity(W.rho)};
}

// split item r on the dual side with a fresh boundary tied to p
std::optional<StepResult> run_et5_insert(const GenEq& W, int mi, int p, int r, std::string* err) {
  const Base& b = W.bases[mi];
  const Base& d = W.bases[b.dual];
  int e = b.eps * d.eps;
  auto sh = [&](int k) { return k > r ? k + 1 : k; };
  GenEq R;
  R.rho = W.rho + 1;
  R.init_terms();
  for (int k = 1; k <= W.rho + 1; ++k) {
    R.iterm[sh(k)] = W.iterm[k];
    R.tterm[sh(k)] = W.tterm[k];
  }
  R.iterm[r + 1] = e == 1 ? W.iterm[p] : W.tterm[p];
  R.tterm[r + 1] = e == 1 ? W.tterm[p] : W.iterm[p];
  for (Base x : W.bases) {
    x.alpha = sh(x.alpha);
    x.beta = sh(x.beta);
    R.bases.push_back(x);
  }
  for (Conn c : W.conns) {
    c.p = sh(c.p);
    c.q = sh(c.q);
    R.conns.push_back(c);
  }
  R.conns.push_back(Conn{sh(p), mi, r + 1});
  for (Section s : W.sections) {
    s.lo = sh(s.lo);
    s.hi = sh(s.hi);
    R.sections.push_back(s);
  }
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "et5: " + v);
  v = check_formal_consistency(R);
  if (!v.empty()) return fail(err, "et5: " + v);
  Theta th;
  th.img.resize(W.rho + 1);
  for (int i = 1; i <= W.rho; ++i) {
    if (i < r)
      th.img[i] = {var_sym(i, +1)};
    else if (i == r)
      th.img[i] = {var_sym(r, +1), var_sym(r + 1, +1)};
    else
      th.img[i] = {var_sym(i + 1, +1)};
  }
  return StepResult{std::move(R), std::move(th)};
}

SymWord side_word(const FreeProduct& G, const SideRef& s) {
  SymWord w;
  for (int i = s.lo; i < s.hi; ++i) w.push_back(var_sym(i - 1, +1));
  if (s.eps < 0) w = word_inverse(G, w);
  return w;
}

SymWord equation_word(const FreeProduct& G, const BasicEq& eq) {
  SymWord w = side_word(G, eq.left);
  SymWord r = word_inverse(G, side_word(G, eq.right));
  w.insert(w.end(), r.begin(), r.end());
  return w;
}

// whether the tie is a proper quotient: the new boundary equation must not
// already follow from the old equations
Properness tie_properness(const FreeProduct& G, const GenEq& W, int mi, int p, int q,
                          const TransformOptions& opt) {
  const Base& b = W.bases[mi];
  const Base& d = W.bases[b.dual];
  BasicEq eq;
  eq.left = SideRef{b.alpha, p, +1};
  eq.right = b.eps == d.eps ? SideRef{d.alpha, q, +1} : SideRef{q, d.beta, -1};
  QuasiIdentity qi;
  qi.premises = induced_equation_system(G, W);
  qi.conclusion = equation_word(G, eq);
  QIVerdict v = check_quasi_identity(G, qi, opt.qi);
  if (v.kind == QIVerdict::Fails) return Properness{Properness::Proper, 0};
  return Properness{Properness::Uncertified, opt.qi.max_len};
}

struct ET5Branch {
  GenEq W;
  Theta theta;
  Properness prop;
  ETStep step;
};

// all formally consistent ways to tie boundary p of base mi: every existing
// interior boundary of the dual, then a fresh boundary inside every dual item
std::vector<ET5Branch> et5_branches(const FreeProduct& G, const GenEq& W, int mi, int p,
                                    const TransformOptions& opt) {
  const Base& d = W.bases[W.bases[mi].dual];
  std::vector<ET5Branch> out;
  for (int q = d.alpha + 1; q < d.beta; ++q) {
    auto sr = run_et5_tie(W, mi, p, q, nullptr);
    if (!sr) continue;
    ETStep st;
    st.kind = ETStep::TieBoundary;
    st.base = mi;
    st.p = p;
    st.q = q;
    out.push_back({std::move(sr->W), std::move(sr->theta), tie_properness(G, W, mi, p, q, opt), st});
  }
  for (int r = d.alpha; r < d.beta; ++r) {
    auto sr = run_et5_insert(W, mi, p, r, nullptr);
    if (!sr) continue;
    ETStep st;
    st.kind = ETStep::TieBoundary;
    st.base = mi;
    st.p = p;
    st.q = r;
    st.insert = true;
    out.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), st});
  }
  return out;
}

// item permutation induced by moving section si right after section dj
// (-1 = to the front); empty when a base would be torn apart
std::optional<std::vector<int>> section_perm(const GenEq& W, int si, int dj, std::string* err) {
  int ns = (int)W.sections.size();
  std::vector<int> ord;
  for (int i = 0; i < ns; ++i)
    if (i != si) ord.push_back(i);
  auto it = ord.begin();
  if (dj >= 0) it = std::find(ord.begin(), ord.end(), dj) + 1;
  ord.insert(it, si);
  std::vector<int> n(W.rho + 1, 0);
  int at = 0;
  for (int s : ord)
    for (int i = W.sections[s].lo; i < W.sections[s].hi; ++i) n[i] = ++at;
  for (const Base& b : W.bases)
    for (int i = b.alpha; i + 1 < b.beta; ++i)
      if (n[i + 1] != n[i] + 1) {
        fail(err, "d2: a base crosses the moved section's boundary");
        return std::nullopt;
      }
  return n;
}

std::optional<StepResult> run_move_section(const GenEq& W, int si, int dj, std::string* err) {
  int ns = (int)W.sections.size();
  if (si < 0 || si >= ns) return fail(err, "d2: no such section");
  if (dj < -1 || dj >= ns || dj == si) return fail(err, "d2: bad destination section");
  const Section s = W.sections[si];
  if (!section_closed(W, s.lo, s.hi)) return fail(err, "d2: the section is not closed");
  auto perm = section_perm(W, si, dj, err);
  if (!perm) return std::nullopt;
  const std::vector<int>& n = *perm;
  GenEq R;
  R.rho = W.rho;
  R.init_terms();
  for (int i = 1; i <= W.rho; ++i) {
    R.iterm[n[i]] = W.iterm[i];
    R.tterm[n[i] + 1] = W.tterm[i + 1];
  }
  for (Base b : W.bases) {
    int a2 = n[b.alpha], b2 = n[b.beta - 1] + 1;
    b.alpha = a2;
    b.beta = b2;
    R.bases.push_back(b);
  }
  for (Conn c : W.conns) {
    c.p = n[c.p];
    c.q = n[c.q];
    R.conns.push_back(c);
  }
  std::vector<int> ord;
  for (int i = 0; i < ns; ++i)
    if (i != si) ord.push_back(i);
  auto it = ord.begin();
  if (dj >= 0) it = std::find(ord.begin(), ord.end(), dj) + 1;
  ord.insert(it, si);
  int lo = 1;
  for (int x : ord) {
    Section t = W.sections[x];
    int w = t.hi - t.lo;
    t.lo = lo;
    t.hi = lo + w;
    lo += w;
    R.sections.push_back(t);
  }
  std::string v = validate(R);
  if (!v.empty()) return fail(err, "d2: result invalid: " + v);
  Theta th;
  th.img.resize(W.rho + 1);
  for (int i = 1; i <= W.rho; ++i) th.img[i] = {var_sym(n[i], +1)};
  return StepResult{std::move(R), std::move(th)};
}

std::optional<StepResult> run_merge_constants(const FreeProduct& G, const GenEq& W, int ci, int cj,
                                              std::string* err) {
  if (ci < 0 || ci >= (int)W.bases.size() || W.bases[ci].kind != BaseKind::Constant ||
      cj < 0 || cj >= (int)W.bases.size() || W.bases[cj].kind != BaseKind::Constant || ci == cj)
    return fail(err, "d6: need two distinct constant bases");
  const Base a = W.bases[ci], b = W.bases[cj];
  int i = a.alpha, j = b.alpha;
  if (i == j) return fail(err, "d6: the constants pin the same item");
  int e;
  if (a.label == b.label)
    e = +1;
  else if (a.label == G.inv_letter(b.label))
    e = -1;
  else
    return fail(err, "d6: the constants are neither equal nor inverse");
  bool isec = false, jsec = false;
  for (const Section& s : W.sections) {
    if (s.lo == i && s.hi == i + 1) isec = true;
    if (s.lo == j && s.hi == j + 1) jsec = true;
  }
  if (!isec || !jsec) return fail(err, "d6: a constant does not fill a one-item section");
  if (!section_closed(W, i, i + 1) || !section_closed(W, j, j + 1))
    return fail(err, "d6: a constant section is not closed");

  GenEq R = W;
  // move every base sitting on [i, i+1] across, inverting when the labels are
  // mutually inverse
  for (Base& x : R.bases) {
    if (!(x.alpha == i && x.beta == i + 1)) continue;
    x.alpha = j;
    x.beta = j + 1;
    if (e == -1) {
      if (x.kind == BaseKind::Constant)
        x.label = G.inv_letter(x.label);
      else
        x.eps = -x.eps;
    }
  }
  // now item i is uncovered; delete it
  auto C = [&](int k) { return k <= i ? k : k - 1; };
  GenEq R2;
  R2.rho = W.rho - 1;
  R2.init_terms();
  for (int k = 1; k <= W.rho + 1; ++k) {
    if (k == i + 1) continue;
    R2.iterm[C(k)] = W.iterm[k];
    R2.tterm[C(k)] = W.tterm[k];
  }
  R2.iterm[i] = W.iterm[i + 1];
  R2.tterm[i] = W.tterm[i];
  for (Base x : R.bases) {
    x.alpha = C(x.alpha);
    x.beta = C(x.beta);
    R2.bases.push_back(x);
  }
  for (Conn c : R.conns) {
    c.p = C(c.p);
    c.q = C(c.q);
    R2.conns.push_back(c);
  }
  for (const Section& s : R.sections) {
    Section t = s;
    t.lo = C(s.lo);
    t.hi = C(s.hi);
    if (t.lo < t.hi) R2.sections.push_back(t);
  }
  std::string v = validate(R2);
  if (!v.empty()) return fail(err, "d6: result invalid: " + v);
  Theta th;
  th.img.resize(W.rho + 1);
  for (int k = 1; k <= W.rho; ++k) {
    if (k == i)
      th.img[k] = {var_sym(C(j), e)};
    else
      th.img[k] = {var_sym(C(k), +1)};
  }
  return StepResult{std::move(R2), std::move(th)};
}

struct Path {
  GenEq W;
  Theta th;
  std::vector<ETStep> script;
  Properness prop;
};

Path start_path(const GenEq& W) { return Path{W, Theta::identity(W.rho), {}, iso_mark()}; }

void push_step(Path& st, const FreeProduct& G, StepResult&& sr, const ETStep& step,
               const Properness& prop) {
  st.th = compose(G, st.th, sr.theta);
  st.W = std::move(sr.W);
  st.script.push_back(step);
  st.prop = merge_prop(st.prop, prop);
}

ETStep cut_step(int base, int p, int q) {
  ETStep st;
  st.kind = ETStep::CutBase;
  st.base = base;
  st.p = p;
  st.q = q;
  return st;
}

} // namespace

std::string show_step(const ETStep& s) {
  std::ostringstream o;
  switch (s.kind) {
    case ETStep::CutBase:
      o << "et1 cut base " << s.base << " at (" << s.p << ", " << s.q << ")";
      break;
    case ETStep::TransferBase:
      o << "et2 transfer base " << s.base << " through " << s.other;
      break;
    case ETStep::RemoveMatched:
      o << "et3 remove matched pair " << s.base;
      break;
    case ETStep::RemoveLinear:
      o << "et4 remove linear base " << s.base;
      break;
    case ETStep::TieBoundary:
      if (s.insert)
        o << "et5 split item " << s.q << " against boundary " << s.p << " of base " << s.base;
      else
        o << "et5 tie boundary " << s.p << " of base " << s.base << " to " << s.q;
      break;
    case ETStep::MoveSection:
      o << "move section " << s.src;
      if (s.dest < 0)
        o << " to the front";
      else
        o << " after section " << s.dest;
      break;
    case ETStep::MergeConstants:
      o << "identify constant sections of bases " << s.base << " and " << s.other;
      break;
    default:
      o << "unknown step";
      break;
  }
  return o.str();
}

EquationSystem induced_equation_system(const FreeProduct& G, const GenEq& W) {
  EquationSystem S;
  for (int i = 1; i <= W.rho; ++i) S.vars.push_back("h" + std::to_string(i));
  InducedSystem I = induced_system(W);
  for (const BasicEq& eq : I.basic) S.eqs.push_back(equation_word(G, eq));
  for (const FactorEq& f : I.factor) {
    SymWord w;
    for (int k = 0; k < 3; ++k) w.push_back(var_sym(f.item[k] - 1, f.eps[k]));
    S.eqs.push_back(w);
  }
  for (const CoeffEq& c : I.coeff) {
    SymWord w{var_sym(c.item - 1, +1), const_sym(G.inv_letter(c.a))};
    S.eqs.push_back(w);
  }
  for (const BasicEq& eq : I.boundary) S.eqs.push_back(equation_word(G, eq));
  return S;
}

std::optional<TransformOutcome> apply_et(const FreeProduct& G, const GenEq& W, int kind,
                                         const ETArgs& args, const TransformOptions& opt,
                                         std::string* err) {
  TransformOutcome out;
  out.source = W;
  switch (kind) {
    case 1: {
      auto sr = run_et1(W, args.base, args.p, args.q, err);
      if (!sr) return std::nullopt;
      ETStep st = cut_step(args.base, args.p, args.q);
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    case 2: {
      auto sr = run_et2(G, W, args.base, args.mu, err);
      if (!sr) return std::nullopt;
      ETStep st;
      st.kind = ETStep::TransferBase;
      st.base = args.base;
      st.other = args.mu;
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    case 3: {
      auto sr = run_et3(W, args.base, err);
      if (!sr) return std::nullopt;
      ETStep st;
      st.kind = ETStep::RemoveMatched;
      st.base = args.base;
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    case 4: {
      auto sr = run_et4(W, args.base, err);
      if (!sr) return std::nullopt;
      ETStep st;
      st.kind = ETStep::RemoveLinear;
      st.base = args.base;
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    case 5: {
      int mi = args.base, p = args.p;
      if (mi < 0 || mi >= (int)W.bases.size() || W.bases[mi].kind != BaseKind::Variable) {
        fail(err, "et5: not a variable base");
        return std::nullopt;
      }
      if (!base_intersects_boundary(W.bases[mi], p)) {
        fail(err, "et5: the boundary does not cross the base");
        return std::nullopt;
      }
      if (boundary_tied_in(W, p, mi)) {
        fail(err, "et5: the boundary is already tied in the base");
        return std::nullopt;
      }
      for (ET5Branch& b : et5_branches(G, W, mi, p, opt))
        out.branches.push_back({std::move(b.W), std::move(b.theta), b.prop, {b.step}});
      return out;
    }
    default:
      fail(err, "unknown elementary transformation");
      return std::nullopt;
  }
}

std::optional<TransformOutcome> apply_derived(const FreeProduct& G, const GenEq& W, int kind,
                                              const DArgs& args, const TransformOptions& opt,
                                              std::string* err) {
  TransformOutcome out;
  out.source = W;
  switch (kind) {
    case 1: {
      // close a section: tie and cut until no base crosses its endpoints
      int si = args.section;
      if (si < 0 || si >= (int)W.sections.size()) {
        fail(err, "d1: no such section");
        return std::nullopt;
      }
      std::vector<Path> work{start_path(W)}, done;
      int guard = 0;
      while (!work.empty()) {
        if (++guard > 20000) {
          fail(err, "d1: closing the section did not terminate");
          return std::nullopt;
        }
        Path st = std::move(work.back());
        work.pop_back();
        const Section& s = st.W.sections[si];
        int cross = -1, at = 0;
        for (int v = 0; v < (int)st.W.bases.size() && cross < 0; ++v)
          for (int e2 : {s.lo, s.hi})
            if (base_intersects_boundary(st.W.bases[v], e2)) {
              cross = v;
              at = e2;
              break;
            }
        if (cross < 0) {
          done.push_back(std::move(st));
          continue;
        }
        if (st.W.bases[cross].kind != BaseKind::Variable) {
          fail(err, "d1: a non-variable base crosses the section");
          return std::nullopt;
        }
        int q = -1;
        for (const Conn& c : conns_of(st.W, cross))
          if (c.p == at) q = c.q;
        if (q >= 0) {
          auto sr = run_et1(st.W, cross, at, q, err);
          if (!sr) return std::nullopt;
          push_step(st, G, std::move(*sr), cut_step(cross, at, q), iso_mark());
          work.push_back(std::move(st));
        } else {
          for (ET5Branch& b : et5_branches(G, st.W, cross, at, opt)) {
            Path nx = st;
            push_step(nx, G, StepResult{std::move(b.W), std::move(b.theta)}, b.step, b.prop);
            work.push_back(std::move(nx));
          }
        }
      }
      for (Path& st : done) out.branches.push_back({st.W, st.th, st.prop, st.script});
      return out;
    }
    case 2: {
      auto sr = run_move_section(W, args.section, args.dest, err);
      if (!sr) return std::nullopt;
      ETStep st;
      st.kind = ETStep::MoveSection;
      st.src = args.section;
      st.dest = args.dest;
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    case 3: {
      // complete the cut: cut every boundary connection
      Path st = start_path(W);
      int guard = 0;
      while (!st.W.conns.empty()) {
        if (++guard > 20000) {
          fail(err, "d3: completing the cut did not terminate");
          return std::nullopt;
        }
        Conn c = st.W.conns.front();
        auto sr = run_et1(st.W, c.base, c.p, c.q, err);
        if (!sr) return std::nullopt;
        push_step(st, G, std::move(*sr), cut_step(c.base, c.p, c.q), iso_mark());
      }
      out.branches.push_back({st.W, st.th, st.prop, st.script});
      return out;
    }
    case 5: {
      // entire transformation: tie, transfer everything below the carrier,
      // then remove the carrier's linear prefix
      int rhoA = active_boundary(W);
      for (int i = 1; i < rhoA; ++i)
        if (gamma(W, i) < 2) {
          fail(err, "d5: item h" + std::to_string(i) + " in the active part is covered fewer than twice");
          return std::nullopt;
        }
      int carrier = -1;
      for (int v = 0; v < (int)W.bases.size(); ++v) {
        const Base& b = W.bases[v];
        if (b.kind != BaseKind::Variable || b.alpha != 1 || b.beta > rhoA) continue;
        if (carrier < 0 || b.beta > W.bases[carrier].beta) carrier = v;
      }
      if (carrier < 0) {
        fail(err, "d5: no leading variable base in the active part");
        return std::nullopt;
      }
      std::vector<int> transfers;
      for (int v = 0; v < (int)W.bases.size(); ++v)
        if (v != carrier && W.bases[v].beta <= W.bases[carrier].beta) transfers.push_back(v);

      int guard = 0;
      std::vector<Path> work{start_path(W)}, moved;
      while (!work.empty()) {
        if (++guard > 20000) {
          fail(err, "d5: tying the carrier did not terminate");
          return std::nullopt;
        }
        Path st = std::move(work.back());
        work.pop_back();
        const Base& mu = st.W.bases[carrier];
        int need = -1;
        for (int r = 2; r < mu.beta && need < 0; ++r) {
          if (boundary_tied_in(st.W, r, carrier)) continue;
          for (int t : transfers) {
            const Base& lb = st.W.bases[t];
            if (lb.alpha <= r && r <= lb.beta) {
              need = r;
              break;
            }
          }
        }
        if (need < 0) {
          moved.push_back(std::move(st));
          continue;
        }
        for (ET5Branch& b : et5_branches(G, st.W, carrier, need, opt)) {
          Path nx = st;
          push_step(nx, G, StepResult{std::move(b.W), std::move(b.theta)}, b.step, b.prop);
          work.push_back(std::move(nx));
        }
      }
      std::vector<Path> ready;
      for (Path& st : moved) {
        bool ok = true;
        for (int t : transfers) {
          auto sr = run_et2(G, st.W, t, carrier, nullptr);
          if (!sr) {
            // the chosen ties squeeze this base to nothing: no solution
            // selects this branch
            ok = false;
            break;
          }
          ETStep step;
          step.kind = ETStep::TransferBase;
          step.base = t;
          step.other = carrier;
          push_step(st, G, std::move(*sr), step, iso_mark());
        }
        if (ok) ready.push_back(std::move(st));
      }
      std::vector<Path> final_;
      while (!ready.empty()) {
        if (++guard > 20000) {
          fail(err, "d5: cutting the carrier did not terminate");
          return std::nullopt;
        }
        Path st = std::move(ready.back());
        ready.pop_back();
        const Base mu = st.W.bases[carrier];
        int k = 0;
        for (int i = 1; i < mu.beta; ++i) {
          if (gamma(st.W, i) == 1)
            k = i;
          else
            break;
        }
        if (k == 0) {
          fail(err, "d5: the carrier's first item stays covered twice after the transfers");
          return std::nullopt;
        }
        if (k + 1 < mu.beta) {
          if (!boundary_tied_in(st.W, k + 1, carrier)) {
            for (ET5Branch& b : et5_branches(G, st.W, carrier, k + 1, opt)) {
              Path nx = st;
              push_step(nx, G, StepResult{std::move(b.W), std::move(b.theta)}, b.step, b.prop);
              ready.push_back(std::move(nx));
            }
            continue;
          }
          int q = -1;
          for (const Conn& c : conns_of(st.W, carrier))
            if (c.p == k + 1) q = c.q;
          auto sr = run_et1(st.W, carrier, k + 1, q, err);
          if (!sr) return std::nullopt;
          push_step(st, G, std::move(*sr), cut_step(carrier, k + 1, q), iso_mark());
        }
        auto sr4 = run_et4(st.W, carrier, err);
        if (!sr4) return std::nullopt;
        ETStep step;
        step.kind = ETStep::RemoveLinear;
        step.base = carrier;
        push_step(st, G, std::move(*sr4), step, iso_mark());
        final_.push_back(std::move(st));
      }
      if (final_.empty()) {
        fail(err, "d5: every branch degenerated");
        return std::nullopt;
      }
      for (Path& st : final_) out.branches.push_back({st.W, st.th, st.prop, st.script});
      return out;
    }
    case 6: {
      auto sr = run_merge_constants(G, W, args.first, args.second, err);
      if (!sr) return std::nullopt;
      ETStep st;
      st.kind = ETStep::MergeConstants;
      st.base = args.first;
      st.other = args.second;
      out.branches.push_back({std::move(sr->W), std::move(sr->theta), iso_mark(), {st}});
      return out;
    }
    default:
      fail(err, "unknown derived transformation");
      return std::nullopt;
  }
}

std::optional<KernelResult> kernel(const GenEq& W, ElimOrder order, std::string* err) {
  if (!W.conns.empty()) {
    fail(err, "kernel: the equation has boundary connections; complete the cut first");
    return std::nullopt;
  }
  GenEq K = W;
  int l = 0;
  for (;;) {
    int rhoA = active_boundary(K);
    std::vector<int> cand;
    for (int v = 0; v < (int)K.bases.size(); ++v) {
      const Base& b = K.bases[v];
      if (b.kind != BaseKind::Variable || b.beta > rhoA) continue;
      bool elim = false;
      for (int i = b.alpha; i < b.beta && !elim; ++i)
        if (gamma(K, i) == 1) elim = true;
      if (!elim) {
        for (int p : {b.alpha, b.beta}) {
          if (p == 1 || p == K.rho + 1) continue;
          bool touched = false;
          for (int u = 0; u < (int)K.bases.size() && !touched; ++u)
            if (u != v && K.bases[u].alpha <= p && p <= K.bases[u].beta) touched = true;
          if (!touched) {
            elim = true;
            break;
          }
        }
      }
      if (elim) cand.push_back(v);
    }
    if (cand.empty()) break;
    int v = order == ElimOrder::First ? cand.front() : cand.back();
    K = drop_bases(K, {v, K.bases[v].dual});
    ++l;
  }
  int freei = 0;
  for (int i = 1; i <= K.rho; ++i)
    if (gamma(K, i) == 0) ++freei;
  return KernelResult{std::move(K), l, freei - l};
}

namespace {

// rerun one recorded step (transport needs the intermediate equations)
std::optional<StepResult> run_step(const FreeProduct& G, const GenEq& W, const ETStep& st,
                                   std::string* err) {
  switch (st.kind) {
    case ETStep::CutBase:
      return run_et1(W, st.base, st.p, st.q, err);
    case ETStep::TransferBase:
      return run_et2(G, W, st.base, st.other, err);
    case ETStep::RemoveMatched:
      return run_et3(W, st.base, err);
    case ETStep::RemoveLinear:
      return run_et4(W, st.base, err);
    case ETStep::TieBoundary:
      return st.insert ? run_et5_insert(W, st.base, st.p, st.q, err)
                       : run_et5_tie(W, st.base, st.p, st.q, err);
    case ETStep::MoveSection:
      return run_move_section(W, st.src, st.dest, err);
    case ETStep::MergeConstants:
      return run_merge_constants(G, W, st.base, st.other, err);
    default:
      return fail(err, "unknown step");
  }
}

// push H through one step; empty when H selects a different branch
std::optional<GESolution> step_transport(const GenEq& W, const ETStep& st, const GESolution& H) {
  switch (st.kind) {
    case ETStep::CutBase:
    case ETStep::TransferBase:
    case ETStep::RemoveMatched:
      return H;
    case ETStep::RemoveLinear: {
      const Base& mu = W.bases[st.base];
      GESolution R;
      R.val.resize(W.rho - (mu.beta - mu.alpha) + 1);
      for (int i = 1, at = 1; i <= W.rho; ++i) {
        if (i >= mu.alpha && i < mu.beta) continue;
        R.val[at++] = H.val[i];
      }
      return R;
    }
    case ETStep::TieBoundary: {
      const Base& b = W.bases[st.base];
      const Base& d = W.bases[b.dual];
      int e = b.eps * d.eps;
      int L = 0;
      for (int i = b.alpha; i < st.p; ++i) L += H.val[i].len();
      // cumulative positions along the dual, from the matching end
      std::vector<int> cum(d.beta + 1, 0);
      if (e == 1) {
        for (int i = d.alpha; i < d.beta; ++i) cum[i + 1] = cum[i] + H.val[i].len();
        for (int q = d.alpha + 1; q < d.beta; ++q)
          if (cum[q] == L) {
            if (st.insert || st.q != q) return std::nullopt;
            return H;
          }
        for (int j = d.alpha; j < d.beta; ++j) {
          if (!(cum[j] < L && L < cum[j + 1])) continue;
          if (!st.insert || st.q != j) return std::nullopt;
          int off = L - cum[j];
          GESolution R;
          R.val.resize(W.rho + 2);
          for (int i = 1; i <= W.rho; ++i) {
            if (i < j)
              R.val[i] = H.val[i];
            else if (i == j) {
              R.val[j].ls.assign(H.val[j].ls.begin(), H.val[j].ls.begin() + off);
              R.val[j + 1].ls.assign(H.val[j].ls.begin() + off, H.val[j].ls.end());
            } else
              R.val[i + 1] = H.val[i];
          }
          return R;
        }
        return std::nullopt;
      }
      // opposite signs: measure from the far end of the dual
      std::vector<int> suf(d.beta + 1, 0);
      for (int i = d.beta - 1; i >= d.alpha; --i) suf[i] = suf[i + 1] + H.val[i].len();
      for (int q = d.alpha + 1; q < d.beta; ++q)
        if (suf[q] == L) {
          if (st.insert || st.q != q) return std::nullopt;
          return H;
        }
      for (int j = d.alpha; j < d.beta; ++j) {
        if (!(suf[j + 1] < L && L < suf[j])) continue;
        if (!st.insert || st.q != j) return std::nullopt;
        int off = H.val[j].len() - (L - suf[j + 1]);
        GESolution R;
        R.val.resize(W.rho + 2);
        for (int i = 1; i <= W.rho; ++i) {
          if (i < j)
            R.val[i] = H.val[i];
          else if (i == j) {
            R.val[j].ls.assign(H.val[j].ls.begin(), H.val[j].ls.begin() + off);
            R.val[j + 1].ls.assign(H.val[j].ls.begin() + off, H.val[j].ls.end());
          } else
            R.val[i + 1] = H.val[i];
        }
        return R;
      }
      return std::nullopt;
    }
    case ETStep::MoveSection: {
      auto perm = section_perm(W, st.src, st.dest, nullptr);
      if (!perm) return std::nullopt;
      GESolution R;
      R.val.resize(W.rho + 1);
      for (int i = 1; i <= W.rho; ++i) R.val[(*perm)[i]] = H.val[i];
      return R;
    }
    case ETStep::MergeConstants: {
      int i = W.bases[st.base].alpha;
      GESolution R;
      R.val.resize(W.rho);
      for (int k = 1, at = 1; k <= W.rho; ++k) {
        if (k == i) continue;
        R.val[at++] = H.val[k];
      }
      return R;
    }
    default:
      return std::nullopt;
  }
}

} // namespace

std::optional<std::pair<int, GESolution>> transport(const FreeProduct& G,
                                                    const TransformOutcome& out,
                                                    const GESolution& H, std::string* err) {
  std::string why;
  if (!check_solution(G, out.source, H, &why)) {
    fail(err, "transport: not a solution of the source: " + why);
    return std::nullopt;
  }
  int found = -1;
  GESolution res;
  for (int bi = 0; bi < (int)out.branches.size(); ++bi) {
    GenEq Wc = out.source;
    GESolution Hc = H;
    bool ok = true;
    for (const ETStep& st : out.branches[bi].script) {
      auto ht = step_transport(Wc, st, Hc);
      if (!ht) {
        ok = false;
        break;
      }
      auto sr = run_step(G, Wc, st, nullptr);
      if (!sr) {
        ok = false;
        break;
      }
      Hc = std::move(*ht);
      Wc = std::move(sr->W);
    }
    if (!ok || !check_solution(G, Wc, Hc, nullptr)) continue;
    if (found >= 0) {
      fail(err, "transport: two branches accept the solution");
      return std::nullopt;
    }
    found = bi;
    res = std::move(Hc);
  }
  if (found < 0) {
    fail(err, "transport: no branch accepts the solution");
    return std::nullopt;
  }
  return std::make_pair(found, std::move(res));
}

} // namespace fp
