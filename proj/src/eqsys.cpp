#include "eqsys.h"

#include <fstream>
#include <sstream>

namespace fp {

Sym var_sym(int v, int eps) {
  Sym s;
  s.is_var = true;
  s.var = v;
  s.eps = eps;
  return s;
}

Sym const_sym(Letter l) {
  Sym s;
  s.c = l;
  return s;
}

Sym sym_inverse(const FreeProduct& G, const Sym& s) {
  Sym r = s;
  if (s.is_var)
    r.eps = -s.eps;
  else
    r.c = G.inv_letter(s.c);
  return r;
}

SymWord word_inverse(const FreeProduct& G, const SymWord& w) {
  SymWord r;
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(sym_inverse(G, *it));
  return r;
}

int EquationSystem::var_index(const std::string& n) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == n) return (int)i;
  return -1;
}

SymWord triangle_word(const Triangle& t) { return {t.r[0], t.r[1], t.r[2]}; }

TriangularSystem triangulate(const FreeProduct& G, const EquationSystem& S) {
  // Length 1: r = 1 becomes (r, r, r^-1), value r; no fresh variables.
  // Length 2: r s = 1 becomes (r, s, u), (u, u, u^-1) with u fresh; the first
  // triple determines u = s^-1 r^-1 and the second pins u = 1.
  // Length 3: as is.
  // Length n > 3: chain (r1, r2, u1^-1), (u1, r3, u2^-1), ...,
  // (u_{n-3}, r_{n-1}, r_n); every u_i is determined by the prefix.
  // Solution sets project bijectively onto the original variables.
  TriangularSystem T;
  T.vars = S.vars;
  T.num_original = (int)S.vars.size();
  auto fresh = [&](int eqno, int k) {
    std::string n = "_u" + std::to_string(eqno) + "_" + std::to_string(k);
    T.vars.push_back(n);
    return (int)T.vars.size() - 1;
  };
  int eqno = 0;
  for (const SymWord& w : S.eqs) {
    ++eqno;
    if (w.empty()) continue; // trivially satisfied
    if (w.size() == 1) {
      T.eqs.push_back(Triangle{{w[0], w[0], sym_inverse(G, w[0])}});
      continue;
    }
    if (w.size() == 2) {
      int u = fresh(eqno, 1);
      T.eqs.push_back(Triangle{{w[0], w[1], var_sym(u, +1)}});
      T.eqs.push_back(Triangle{{var_sym(u, +1), var_sym(u, +1), var_sym(u, -1)}});
      continue;
    }
    if (w.size() == 3) {
      T.eqs.push_back(Triangle{{w[0], w[1], w[2]}});
      continue;
    }
    int prev = fresh(eqno, 1);
    T.eqs.push_back(Triangle{{w[0], w[1], var_sym(prev, -1)}});
    for (size_t i = 2; i + 2 < w.size(); ++i) {
      int nxt = fresh(eqno, (int)i);
      T.eqs.push_back(Triangle{{var_sym(prev, +1), w[i], var_sym(nxt, -1)}});
      prev = nxt;
    }
    T.eqs.push_back(Triangle{{var_sym(prev, +1), w[w.size() - 2], w[w.size() - 1]}});
  }
  return T;
}

EquationSystem as_system(const TriangularSystem& T) {
  EquationSystem S;
  S.vars = T.vars;
  for (const Triangle& t : T.eqs) S.eqs.push_back(triangle_word(t));
  return S;
}

Word substitute(const FreeProduct& G, const SymWord& w, const Assignment& U,
                bool* graphical) {
  Word acc;
  bool graph = true;
  for (const Sym& s : w) {
    Word piece;
    if (s.is_var) {
      piece = s.eps > 0 ? U.val[s.var] : G.invert(U.val[s.var]);
    } else {
      piece.ls.push_back(s.c);
    }
    bool g = false;
    acc = G.concat(acc, piece, &g);
    graph = graph && g;
  }
  if (graphical) *graphical = graph;
  return acc;
}

// --- parsing ----------------------------------------------------------------

namespace {
std::optional<Sym> parse_sym(const FreeProduct& G, EquationSystem& S, const std::string& tok,
                             bool allow_new_vars, std::string& err) {
  std::string base = tok;
  int eps = 1;
  if (base.size() > 3 && base.substr(base.size() - 3) == "^-1") {
    eps = -1;
    base = base.substr(0, base.size() - 3);
  }
  if (auto l = G.parse_letter(base)) {
    Letter c = eps > 0 ? *l : G.inv_letter(*l);
    return const_sym(c);
  }
  // variable
  int vi = S.var_index(base);
  if (vi < 0) {
    if (!allow_new_vars || base.find('.') != std::string::npos) {
      err = "unknown token '" + tok + "'";
      return std::nullopt;
    }
    S.vars.push_back(base);
    vi = (int)S.vars.size() - 1;
  }
  return var_sym(vi, eps);
}
} // namespace

ParsedSystem parse_equation_text(const FreeProduct& G, const std::string& text) {
  ParsedSystem out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_vars = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;
    if (tok == "vars") {
      std::string v;
      while (ls >> v) {
        if (out.S.var_index(v) >= 0) {
          out.error = "line " + std::to_string(lineno) + ": duplicate variable " + v;
          return out;
        }
        if (G.parse_letter(v)) {
          out.error = "line " + std::to_string(lineno) + ": variable '" + v + "' collides with a constant";
          return out;
        }
        out.S.vars.push_back(v);
      }
      have_vars = true;
      continue;
    }
    // equation line; first token already read
    SymWord w;
    std::string err;
    std::string t = tok;
    do {
      auto s = parse_sym(G, out.S, t, /*allow_new_vars=*/!have_vars, err);
      if (!s) {
        out.error = "line " + std::to_string(lineno) + ": " + err;
        return out;
      }
      w.push_back(*s);
    } while (ls >> t);
    if (w.empty()) {
      out.error = "line " + std::to_string(lineno) + ": empty equation";
      return out;
    }
    out.S.eqs.push_back(w);
  }
  return out;
}

ParsedSystem parse_equation_file(const FreeProduct& G, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParsedSystem out;
    out.error = path + ": cannot open";
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ParsedSystem out = parse_equation_text(G, ss.str());
  if (!out.error.empty()) out.error = path + ": " + out.error;
  return out;
}

std::string show_sym(const FreeProduct& G, const EquationSystem& S, const Sym& s) {
  if (s.is_var) return S.vars[s.var] + (s.eps < 0 ? "^-1" : "");
  return G.show(s.c);
}

std::string show_word(const FreeProduct& G, const EquationSystem& S, const SymWord& w) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += " ";
    out += show_sym(G, S, w[i]);
  }
  return out.empty() ? "1" : out;
}

} // namespace fp
