#pragma once
// Word arithmetic in a free product of finite groups given by multiplication
// tables: normal forms, graphical equality, types, cyclic reduction, periods,
// periodic decompositions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fp {

struct FactorGroup {
  std::string name;
  std::vector<std::string> elems; // element names, unique
  int identity = -1;              // index into elems
  std::vector<std::vector<int>> mul; // mul[i][j] = index of elems[i]*elems[j]
  std::vector<int> inv;              // inv[i] = index of elems[i]^-1

  int order() const { return (int)elems.size(); }
  int mul_of(int a, int b) const { return mul[a][b]; }
  int elem_index(const std::string& n) const; // -1 if unknown
  // Empty string when the table is a group; otherwise a diagnostic.
  std::string validate() const;
};

// A letter is a nonidentity element of one factor. Factors are numbered from 1.
struct Letter {
  int factor = 0;
  int elem = 0; // index into that factor's elems, never the identity
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// Normal form: adjacent letters lie in distinct factors. Empty = identity.
struct Word {
  std::vector<Letter> ls;
  int len() const { return (int)ls.size(); }
  bool empty() const { return ls.empty(); }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

class FreeProduct {
public:
  std::vector<FactorGroup> factors; // factor k lives at index k-1

  int num_factors() const { return (int)factors.size(); }
  const FactorGroup& factor(int k) const { return factors[k - 1]; }

  bool letter_ok(const Letter& l) const;
  Letter inv_letter(const Letter& l) const;

  // Normal form of an arbitrary letter sequence (identity letters allowed in
  // the input; they are dropped, adjacent same-factor letters merged).
  Word reduce(const std::vector<Letter>& raw) const;
  // Concatenation; `graphical` (when non-null) reports |ab| = |a|+|b|.
  Word concat(const Word& a, const Word& b, bool* graphical = nullptr) const;
  Word invert(const Word& w) const;
  Word power(const Word& w, int n) const;

  // Word rendering / parsing. Compact form ("ab") requires globally unique
  // single-character element names; dotted form is "g1.a g2.b".
  std::string show(const Word& w) const;
  std::string show(const Letter& l) const;
  std::optional<Letter> parse_letter(const std::string& tok) const;
  std::optional<Word> parse_word(const std::string& text) const;
};

inline int itype(const Word& w) { return w.empty() ? 0 : w.ls.front().factor; }
inline int ttype(const Word& w) { return w.empty() ? 0 : w.ls.back().factor; }

// |g| <= 1, or first and last letters in distinct factors.
bool cyclically_reduced(const Word& w);
// All |w| rotations of a cyclically reduced word, starting with w itself.
std::vector<Word> cyclic_permutations(const Word& w);
// Cyclically reduced, |w| >= 2, and not a proper power.
bool is_period(const FreeProduct& G, const Word& w);

struct PeriodicDecomposition {
  Word Q;          // cyclic permutation of P or of P^-1
  int r = 0;       // >= 1
  Word Q1;         // proper prefix of Q, possibly empty
  int orientation = 1; // +1: Q rotates P, -1: Q rotates P^-1
};

// Decomposition w = Q^r Q1 with maximal r when w is P-periodic
// (|w| >= |P| and w occurs inside some power of P); nullopt otherwise.
std::optional<PeriodicDecomposition>
periodic_decompose(const FreeProduct& G, const Word& w, const Word& P);

// Maximal r with Q^r a subword of w, Q a cyclic permutation of P^{+-1}.
int exponent_of_periodicity(const FreeProduct& G, const Word& w, const Word& P);

// --- group table files ---------------------------------------------------
// Format, one or more blocks per file:
//   group <name> identity <e>
//   elements <e1> <e2> ...
//   mul <ei>: <ei*e1> <ei*e2> ...
// Loader validates the group axioms and returns diagnostics with line numbers.
struct LoadResult {
  std::vector<FactorGroup> groups;
  std::string error; // empty on success
};
LoadResult load_group_file(const std::string& path);
// Builds a free product from files in order; fails if fewer than 2 factors.
struct ProductLoad {
  FreeProduct G;
  std::string error;
};
ProductLoad load_free_product(const std::vector<std::string>& paths);

} // namespace fp
