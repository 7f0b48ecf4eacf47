#include "group.h"

#include <fstream>
#include <sstream>

namespace fp {

int FactorGroup::elem_index(const std::string& n) const {
  for (size_t i = 0; i < elems.size(); ++i)
    if (elems[i] == n) return (int)i;
  return -1;
}

std::string FactorGroup::validate() const {
  const int n = order();
  if (n == 0) return "group " + name + ": no elements";
  if (identity < 0 || identity >= n) return "group " + name + ": identity not among elements";
  if ((int)mul.size() != n) return "group " + name + ": multiplication table has wrong row count";
  for (int i = 0; i < n; ++i) {
    if ((int)mul[i].size() != n) return "group " + name + ": row " + elems[i] + " has wrong length";
    for (int j = 0; j < n; ++j)
      if (mul[i][j] < 0 || mul[i][j] >= n)
        return "group " + name + ": table entry out of range";
  }
  for (int i = 0; i < n; ++i)
    if (mul[identity][i] != i || mul[i][identity] != i)
      return "group " + name + ": identity law fails at " + elems[i];
  // inverses: every row and column must contain the identity
  for (int i = 0; i < n; ++i) {
    bool has = false;
    for (int j = 0; j < n; ++j) has = has || mul[i][j] == identity;
    if (!has) return "group " + name + ": no inverse for " + elems[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (mul[mul[i][j]][k] != mul[i][mul[j][k]])
          return "group " + name + ": associativity fails at (" + elems[i] + "," + elems[j] + "," + elems[k] + ")";
  return "";
}

bool FreeProduct::letter_ok(const Letter& l) const {
  if (l.factor < 1 || l.factor > num_factors()) return false;
  const FactorGroup& g = factor(l.factor);
  return l.elem >= 0 && l.elem < g.order() && l.elem != g.identity;
}

Letter FreeProduct::inv_letter(const Letter& l) const {
  return Letter{l.factor, factor(l.factor).inv[l.elem]};
}

Word FreeProduct::reduce(const std::vector<Letter>& raw) const {
  // Stack reduction; the stack alternates factors at all times, so at most one
  // merge is needed per incoming letter.
  Word w;
  for (const Letter& l0 : raw) {
    if (l0.elem == factor(l0.factor).identity) continue;
    Letter l = l0;
    bool drop = false;
    if (!w.empty() && w.ls.back().factor == l.factor) {
      const FactorGroup& g = factor(l.factor);
      int m = g.mul_of(w.ls.back().elem, l.elem);
      w.ls.pop_back();
      if (m == g.identity)
        drop = true;
      else
        l = Letter{l.factor, m};
    }
    if (!drop) w.ls.push_back(l);
  }
  return w;
}

Word FreeProduct::concat(const Word& a, const Word& b, bool* graphical) const {
  std::vector<Letter> raw = a.ls;
  raw.insert(raw.end(), b.ls.begin(), b.ls.end());
  Word r = reduce(raw);
  if (graphical) *graphical = r.len() == a.len() + b.len();
  return r;
}

Word FreeProduct::invert(const Word& w) const {
  Word r;
  r.ls.reserve(w.ls.size());
  for (auto it = w.ls.rbegin(); it != w.ls.rend(); ++it) r.ls.push_back(inv_letter(*it));
  return r;
}

Word FreeProduct::power(const Word& w, int n) const {
  Word base = n < 0 ? invert(w) : w;
  int k = n < 0 ? -n : n;
  Word r;
  for (int i = 0; i < k; ++i) r = concat(r, base);
  return r;
}

std::string FreeProduct::show(const Letter& l) const {
  return "g" + std::to_string(l.factor) + "." + factor(l.factor).elems[l.elem];
}

std::string FreeProduct::show(const Word& w) const {
  if (w.empty()) return "1";
  // compact form if every element name is a single char, unique across factors
  bool compact = true;
  for (const FactorGroup& g : factors)
    for (int i = 0; i < g.order(); ++i)
      if (i != g.identity && g.elems[i].size() != 1) compact = false;
  if (compact) {
    for (int k = 1; compact && k <= num_factors(); ++k)
      for (int k2 = k + 1; compact && k2 <= num_factors(); ++k2)
        for (int i = 0; i < factor(k).order(); ++i)
          for (int j = 0; j < factor(k2).order(); ++j)
            if (i != factor(k).identity && j != factor(k2).identity &&
                factor(k).elems[i] == factor(k2).elems[j])
              compact = false;
  }
  std::string s;
  for (size_t i = 0; i < w.ls.size(); ++i) {
    if (compact) {
      s += factor(w.ls[i].factor).elems[w.ls[i].elem];
    } else {
      if (i) s += " ";
      s += show(w.ls[i]);
    }
  }
  return s;
}

std::optional<Letter> FreeProduct::parse_letter(const std::string& tok) const {
  if (tok.size() > 1 && tok[0] == 'g') {
    size_t dot = tok.find('.');
    if (dot != std::string::npos) {
      int k = 0;
      try {
        k = std::stoi(tok.substr(1, dot - 1));
      } catch (...) {
        return std::nullopt;
      }
      if (k < 1 || k > num_factors()) return std::nullopt;
      int e = factor(k).elem_index(tok.substr(dot + 1));
      if (e < 0 || e == factor(k).identity) return std::nullopt;
      return Letter{k, e};
    }
  }
  // bare element name, accepted when unique across factors
  Letter found{0, 0};
  int hits = 0;
  for (int k = 1; k <= num_factors(); ++k) {
    int e = factor(k).elem_index(tok);
    if (e >= 0 && e != factor(k).identity) {
      found = Letter{k, e};
      ++hits;
    }
  }
  if (hits == 1) return found;
  return std::nullopt;
}

std::optional<Word> FreeProduct::parse_word(const std::string& text) const {
  std::vector<Letter> raw;
  if (text == "1" || text.empty()) return Word{};
  std::istringstream in(text);
  std::string tok;
  bool any = false;
  while (in >> tok) {
    any = true;
    auto l = parse_letter(tok);
    if (l) {
      raw.push_back(*l);
      continue;
    }
    // per-character lookup ("ab")
    bool ok = true;
    std::vector<Letter> chars;
    for (char c : tok) {
      auto cl = parse_letter(std::string(1, c));
      if (!cl) {
        ok = false;
        break;
      }
      chars.push_back(*cl);
    }
    if (!ok) return std::nullopt;
    raw.insert(raw.end(), chars.begin(), chars.end());
  }
  if (!any) return std::nullopt;
  return reduce(raw);
}

bool cyclically_reduced(const Word& w) {
  if (w.len() <= 1) return true;
  return itype(w) != ttype(w);
}

std::vector<Word> cyclic_permutations(const Word& w) {
  std::vector<Word> out;
  const int n = w.len();
  for (int s = 0; s < n; ++s) {
    Word r;
    r.ls.reserve(n);
    for (int i = 0; i < n; ++i) r.ls.push_back(w.ls[(s + i) % n]);
    out.push_back(std::move(r));
  }
  if (out.empty()) out.push_back(w);
  return out;
}

bool is_period(const FreeProduct& G, const Word& w) {
  (void)G;
  if (w.len() < 2 || !cyclically_reduced(w)) return false;
  const int n = w.len();
  for (int d = 1; d < n; ++d) {
    if (n % d) continue;
    bool rep = true;
    for (int i = d; i < n && rep; ++i) rep = w.ls[i] == w.ls[i % d];
    if (rep) return false; // proper power of the length-d prefix
  }
  return true;
}

namespace {
// candidates Q: rotations of P and of P^-1, deduplicated, orientation kept
struct QCand {
  Word Q;
  int orientation;
};
std::vector<QCand> q_candidates(const FreeProduct& G, const Word& P) {
  std::vector<QCand> qs;
  for (const Word& q : cyclic_permutations(P)) qs.push_back({q, +1});
  for (const Word& q : cyclic_permutations(G.invert(P))) {
    bool dup = false;
    for (const QCand& c : qs) dup = dup || c.Q == q;
    if (!dup) qs.push_back({q, -1});
  }
  return qs;
}
} // namespace

std::optional<PeriodicDecomposition>
periodic_decompose(const FreeProduct& G, const Word& w, const Word& P) {
  if (w.len() < P.len()) return std::nullopt;
  std::optional<PeriodicDecomposition> best;
  for (const QCand& c : q_candidates(G, P)) {
    const int q = c.Q.len();
    // match w against Q^inf from phase 0
    int i = 0;
    while (i < w.len() && w.ls[i] == c.Q.ls[i % q]) ++i;
    if (i < w.len()) continue; // mismatch before w ends: not of shape Q^r Q1
    int r = w.len() / q;
    int rem = w.len() % q;
    if (r < 1) continue;
    PeriodicDecomposition d;
    d.Q = c.Q;
    d.r = r;
    d.Q1.ls.assign(c.Q.ls.begin(), c.Q.ls.begin() + rem);
    d.orientation = c.orientation;
    if (!best || d.r > best->r) best = d;
  }
  return best;
}

int exponent_of_periodicity(const FreeProduct& G, const Word& w, const Word& P) {
  if (P.len() < 1 || w.len() < P.len()) return 0;
  int best = 0;
  for (const QCand& c : q_candidates(G, P)) {
    const int q = c.Q.len();
    for (int s = 0; s < w.len(); ++s) {
      int i = 0;
      while (s + i < w.len() && w.ls[s + i] == c.Q.ls[i % q]) ++i;
      best = std::max(best, i / q);
    }
  }
  return best;
}

// --- loader ---------------------------------------------------------------

LoadResult load_group_file(const std::string& path) {
  LoadResult out;
  std::ifstream in(path);
  if (!in) {
    out.error = path + ": cannot open";
    return out;
  }
  std::string line;
  int lineno = 0;
  FactorGroup cur;
  std::string cur_identity_name;
  bool open = false;
  auto flush = [&]() -> bool {
    if (!open) return true;
    cur.identity = cur.elem_index(cur_identity_name);
    if (cur.identity < 0) {
      out.error = path + ": group " + cur.name + ": identity '" + cur_identity_name + "' not declared";
      return false;
    }
    std::string err = cur.validate();
    if (!err.empty()) {
      out.error = path + ": " + err;
      return false;
    }
    cur.inv.assign(cur.order(), -1);
    for (int i = 0; i < cur.order(); ++i)
      for (int j = 0; j < cur.order(); ++j)
        if (cur.mul[i][j] == cur.identity) cur.inv[i] = j;
    out.groups.push_back(cur);
    cur = FactorGroup{};
    open = false;
    return true;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "group") {
      if (!flush()) return out;
      std::string idkw;
      if (!(ls >> cur.name >> idkw >> cur_identity_name) || idkw != "identity") {
        out.error = path + ":" + std::to_string(lineno) + ": expected 'group <name> identity <e>'";
        return out;
      }
      open = true;
    } else if (kw == "elements") {
      std::string e;
      while (ls >> e) cur.elems.push_back(e);
    } else if (kw == "mul") {
      std::string rowname;
      if (!(ls >> rowname)) {
        out.error = path + ":" + std::to_string(lineno) + ": expected 'mul <e>: ...'";
        return out;
      }
      if (!rowname.empty() && rowname.back() == ':') rowname.pop_back();
      int row = cur.elem_index(rowname);
      if (row < 0) {
        out.error = path + ":" + std::to_string(lineno) + ": unknown row element '" + rowname + "'";
        return out;
      }
      if ((int)cur.mul.size() < cur.order()) cur.mul.resize(cur.order());
      // tolerate both "mul a: ..." and "mul a : ..."
      std::vector<int> vals;
      std::string tok;
      while (ls >> tok) {
        if (tok == ":") continue;
        int v = cur.elem_index(tok);
        if (v < 0) {
          out.error = path + ":" + std::to_string(lineno) + ": unknown element '" + tok + "'";
          return out;
        }
        vals.push_back(v);
      }
      cur.mul[row] = vals;
    } else {
      out.error = path + ":" + std::to_string(lineno) + ": unknown keyword '" + kw + "'";
      return out;
    }
  }
  if (!flush()) return out;
  if (out.groups.empty()) out.error = path + ": no group blocks";
  return out;
}

ProductLoad load_free_product(const std::vector<std::string>& paths) {
  ProductLoad out;
  for (const std::string& p : paths) {
    LoadResult r = load_group_file(p);
    if (!r.error.empty()) {
      out.error = r.error;
      return out;
    }
    for (FactorGroup& g : r.groups) out.G.factors.push_back(std::move(g));
  }
  if (out.G.num_factors() < 2) out.error = "need at least two factors";
  return out;
}

} // namespace fp
