#pragma once
// Systems of equations over G[X]: symbolic words mixing variables and
// constants, parsing, substitution, and triangulation into 3-letter equations.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "group.h"

namespace fp {

// One symbol of a word over X^{+-1} u A^{+-1}.
struct Sym {
  bool is_var = false;
  int var = -1; // index into the owning system's variable list
  int eps = 1;  // +-1, only meaningful for variables
  Letter c;     // constant letter otherwise
  friend bool operator==(const Sym&, const Sym&) = default;
};
using SymWord = std::vector<Sym>;

Sym var_sym(int v, int eps);
Sym const_sym(Letter l);
Sym sym_inverse(const FreeProduct& G, const Sym& s);
SymWord word_inverse(const FreeProduct& G, const SymWord& w);

struct EquationSystem {
  std::vector<std::string> vars;
  std::vector<SymWord> eqs;

  int var_index(const std::string& n) const;
};

// r1 r2 r3 = 1 with each r a variable occurrence or a constant letter.
struct Triangle {
  Sym r[3];
};

struct TriangularSystem {
  std::vector<std::string> vars; // originals first, then fresh
  int num_original = 0;
  std::vector<Triangle> eqs;
};

// Splits long equations with fresh determined variables; rewrites length-1/2
// equations as value-preserving triples. Projection onto the original
// variables is a bijection on solution sets.
TriangularSystem triangulate(const FreeProduct& G, const EquationSystem& S);

// view a triangular system as a plain system (each triple as a length-3 word)
EquationSystem as_system(const TriangularSystem& T);

// presentation of the quotient of G[X] by the normal closure of the relators;
// the radical itself is never computed, this is the symbolic stand-in
struct CoordinatePresentation {
  EquationSystem rel;
};

SymWord triangle_word(const Triangle& t);

struct Assignment {
  std::vector<Word> val; // indexed by variable
};

// reduce of the letter-wise substitution; graphical reports "reduced as
// written" (no cancellation and no merging at any seam).
Word substitute(const FreeProduct& G, const SymWord& w, const Assignment& U,
                bool* graphical = nullptr);

// --- text format ----------------------------------------------------------
// vars x y z
// x y g1.a
// x^-1 g2.b y
struct ParsedSystem {
  EquationSystem S;
  std::string error; // empty on success
};
ParsedSystem parse_equation_text(const FreeProduct& G, const std::string& text);
ParsedSystem parse_equation_file(const FreeProduct& G, const std::string& path);

std::string show_sym(const FreeProduct& G, const EquationSystem& S, const Sym& s);
std::string show_word(const FreeProduct& G, const EquationSystem& S, const SymWord& w);

} // namespace fp
