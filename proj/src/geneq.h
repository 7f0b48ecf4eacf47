#pragma once

#include "eqsys.h"
#include "oracle.h"

#include <string>
#include <vector>

namespace fp {

// Generalised equation: items h_1..h_rho sit between boundaries 1..rho+1.
// Bases cover item ranges; dual variable bases assert equality of the words
// they cover (up to sign), factor bases in triples assert a relation inside
// one free factor, constant bases pin single items to letters.

enum class BaseKind { Variable, Factor, Constant };

struct Base {
  BaseKind kind = BaseKind::Variable;
  int alpha = 0, beta = 0; // alpha < beta
  int eps = +1;
  int dual = -1;  // variable bases: index of the dual base
  int factor = 0; // factor/constant bases: which free factor (1 or 2)
  int triple = -1; // factor bases: id shared by the three duals
  int pos = 0;     // factor bases: position within the triple (1..3)
  Letter label;    // constant bases: the pinned letter
  int origin = -1; // in-memory ancestry tag, not serialized

  friend bool operator==(const Base& x, const Base& y) {
    return x.kind == y.kind && x.alpha == y.alpha && x.beta == y.beta && x.eps == y.eps &&
           x.dual == y.dual && x.factor == y.factor && x.triple == y.triple && x.pos == y.pos &&
           x.label == y.label;
  }
};

Base variable_base(int alpha, int beta, int eps, int dual);
Base factor_base(int alpha, int beta, int eps, int factor, int triple, int pos);
Base constant_base(int alpha, Letter label);

// boundary connection (p, mu, q); (q, dual(mu), p) names the same connection
struct Conn {
  int p = 0;
  int base = -1;
  int q = 0;
  friend bool operator==(const Conn&, const Conn&) = default;
};

enum class SectionClass { Variable, G1, G2, Free };

struct Section {
  int lo = 0, hi = 0;
  SectionClass cls = SectionClass::Variable;
  bool active = true;
  friend bool operator==(const Section&, const Section&) = default;
};

struct GenEq {
  int rho = 0;
  std::vector<Base> bases;
  std::vector<Conn> conns;
  std::vector<int> iterm, tterm; // boundary terms, indexed 1..rho+1 ([0] unused)
  std::vector<Section> sections;

  int num_boundaries() const { return rho + 1; }
  void init_terms() {
    iterm.assign(rho + 2, 0);
    tterm.assign(rho + 2, 0);
  }
};

// --- structural queries -------------------------------------------------------

bool base_intersects_boundary(const Base& b, int i); // alpha < i < beta
bool base_touches_boundary(const Base& b, int i);
bool boundary_open(const GenEq& W, int i);
bool boundary_tied_in(const GenEq& W, int i, int mu); // some (p,mu,q) with i on the mu side
bool boundary_free(const GenEq& W, int i);
bool item_in_base(const Base& b, int i); // alpha <= i <= beta-1
int gamma(const GenEq& W, int i);        // cover count of item h_i
bool matched_pair(const GenEq& W, int mu);
bool base_contained_in(const Base& inner, const Base& outer);
bool bases_overlap(const Base& x, const Base& y);
bool base_in_range(const Base& b, int lo, int hi);
bool section_closed(const GenEq& W, int lo, int hi);

// all connections of variable base mu, oriented as (p, mu, q)
std::vector<Conn> conns_of(const GenEq& W, int mu);

// active part boundary rho_A: the least boundary with every active section
// inside [1, rho_A]; standard-ordered equations keep the active part first
int active_boundary(const GenEq& W);

int count_active_bases(const GenEq& W);     // n_A
int count_open_active_boundaries(const GenEq& W); // xi
int section_base_count(const GenEq& W, const Section& s); // n(sigma)
int complexity(const GenEq& W); // sum over active sections of max(0, n(sigma)-2)

// --- induced equations --------------------------------------------------------

struct SideRef {
  int lo = 0, hi = 0; // items h_lo .. h_{hi-1}
  int eps = +1;
};

struct BasicEq {
  SideRef left, right;
};

struct FactorEq {
  int item[3] = {0, 0, 0};
  int eps[3] = {1, 1, 1};
  int factor = 0;
};

struct CoeffEq {
  int item = 0;
  Letter a;
};

struct InducedSystem {
  std::vector<BasicEq> basic;    // one per dual pair of variable bases
  std::vector<FactorEq> factor;  // one per factor triple
  std::vector<CoeffEq> coeff;    // one per constant base
  std::vector<BasicEq> boundary; // one per boundary connection
};

InducedSystem induced_system(const GenEq& W);

// --- solutions ------------------------------------------------------------

// items are 1-based: val[0] unused, val[i] = H_i
struct GESolution {
  std::vector<Word> val;
  int length() const {
    int n = 0;
    for (const Word& w : val) n += w.len();
    return n;
  }
};

// all four solution conditions: nontrivial items, sides reduced as written,
// graphical equality, factor equations inside the factor, type constraints
bool check_solution(const FreeProduct& G, const GenEq& W, const GESolution& H,
                    std::string* why = nullptr);

// bounded enumeration of solutions, each item of length 1..max_len
std::vector<GESolution> geneq_solutions(const FreeProduct& G, const GenEq& W,
                                        const SolveOptions& opt, bool* complete = nullptr);
bool for_each_geneq_solution(const FreeProduct& G, const GenEq& W, const SolveOptions& opt,
                             const std::function<bool(const GESolution&)>& visit);

// sum of |H_i| over the active items, and the excess of H
int active_length(const GenEq& W, const GESolution& H); // d_AS
int excess(const GenEq& W, const GESolution& H);        // psi_AS

// --- formal consistency -----------------------------------------------------

// necessary conditions for solvability; returns empty string or the reason
std::string check_formal_consistency(const GenEq& W);

// full structural well-formedness (boundary ranges, dual involution, triples,
// connection term compatibility); relaxed mode permits constant bases wider
// than one item while a transformation is mid-flight
std::string validate(const GenEq& W, bool strict = true);

// --- serialization ------------------------------------------------------------

std::string to_json(const GenEq& W);
// returns empty optional and sets err on malformed input
std::optional<GenEq> from_json(const std::string& text, std::string* err = nullptr);

// renumbering-stable canonical form: bases sorted, connections normalized
std::string canonical_json(const GenEq& W);
bool structurally_equal(const GenEq& A, const GenEq& B);

std::string show(const GenEq& W, const FreeProduct* G = nullptr);

// --- solution transport -----------------------------------------------------

// image of each old item as a word over the successor equation's items and
// constants; successor items appear as variables numbered by item index
struct Theta {
  std::vector<SymWord> img; // [0] unused, size old_rho + 1
  static Theta identity(int rho);
};

// evaluate the transported solution: old H_i = img[i](H')
GESolution transport_solution(const FreeProduct& G, const Theta& th, const GESolution& Hnew);
// composition: first apply a, then b (imgs of a rewritten through b)
Theta compose(const FreeProduct& G, const Theta& a, const Theta& b);

} // namespace fp
