#pragma once

#include "geneq.h"
#include "intmat.h"
#include "oracle.h"

#include <optional>
#include <string>
#include <vector>

namespace fp {

// --- periodic structures ---------------------------------------------------
// A structure singles out, inside a generalized equation without connections,
// the part of a solution that repeats a fixed period P: a set of closed
// variable sections, the long items inside them, the bases touching those
// items, and an equivalence on the section boundaries that remembers which
// boundaries cut the repeating word at the same phase.

// Boundary slot. A boundary shared by two structure sections appears twice,
// once per side; all other boundaries appear once with side 0.
struct BSlot {
  int l = 0;
  int side = 0; // 0 sole, 1 left copy, 2 right copy
  friend bool operator==(const BSlot&, const BSlot&) = default;
  friend auto operator<=>(const BSlot&, const BSlot&) = default;
};

struct PeriodicStructure {
  std::vector<int> items;    // long items, ascending
  std::vector<int> bases;    // member bases, ascending, closed under duals
  std::vector<int> sections; // indices into W.sections, ascending
  std::vector<int> x_sign;   // +-1 per section, parallel to sections
  std::vector<BSlot> slots;  // all boundaries of the sections, sorted
  std::vector<int> r_class;  // slot equivalence, parallel to slots
};

// Structures compare by item set and boundary equivalence; the signs are
// determined only up to consistent flips and do not separate structures.
bool same_structure(const PeriodicStructure& A, const PeriodicStructure& B);

// The boundary multiset for a chosen set of sections, sorted by (l, side).
std::vector<BSlot> structure_slots(const GenEq& W, const std::vector<int>& sections);

// Membership and coherence conditions; "" when valid. Checks that sections
// are closed variable sections, items lie inside them, bases are exactly the
// variable bases meeting a long item (dual-closed, sections present), signs
// multiply like the base orientations, slots match the section list, and the
// boundary equivalence relates base endpoints straight or crossed as the
// orientation product dictates.
std::string check_structure(const GenEq& W, const PeriodicStructure& PS);

// The structure cut out by a P-periodic solution. Every closed variable
// section must repeat P with exponent >= 2, or be no longer than P, or repeat
// some word no longer than P; at least one section must be of the first kind.
// Fails (with a reason) when H is not a solution, when the shape conditions
// fail, or when no phase-consistent orientation of the sections exists.
std::optional<PeriodicStructure> detect_periodic_structure(const FreeProduct& G, const GenEq& W,
                                                           const GESolution& H, const Word& P,
                                                           std::string* err = nullptr);

// All valid connected structures on W, independent of any solution: section
// subsets x long-item subsets x coarsenings of the forced boundary relation.
// Deterministic order; requires W without connections (else empty).
std::vector<PeriodicStructure> enumerate_periodic_structures(const GenEq& W);

// --- boundary graph ---------------------------------------------------------
// Vertices are classes of the boundary equivalence, one edge per item of a
// structure section. Short edges (item outside the structure) span the
// subforest T0; T extends it to a spanning tree of the whole graph.

struct PGEdge {
  int item = 0;
  int from = 0;
  int to = 0;
};

struct PeriodicGraph {
  int nverts = 0;
  std::vector<PGEdge> edges; // ascending by item
  std::vector<char> in_t0;   // parallel to edges
  std::vector<char> in_t;
  std::vector<char> is_short;
  std::vector<int> tbar;       // items outside the structure sections
  int base_vertex = 0;         // class of the least boundary of the least section
  std::vector<std::vector<std::pair<int, int>>> path_from_root; // (edge, dir) per vertex
  std::vector<BSlot> vertex_slot; // least slot of each class

  int edge_of_item(int k) const;
};

// Cycle based at base_vertex, and words over the fundamental generators.
using Cycle = std::vector<std::pair<int, int>>;   // (edge index, +-1)
using GenWord = std::vector<std::pair<int, int>>; // (generator index, +-1), reduced

struct CycleBasis {
  std::vector<int> gen_edge;        // out-of-tree edges, ascending
  std::vector<Cycle> gen_cycle;     // fundamental cycle per generator
  std::vector<int> pair_mu;         // lesser base index per relation row
  std::vector<GenWord> b_mu;        // relation cycles rewritten over generators
  Mat bt_rows;                      // abelianized relation rows
  Mat z1_rows;                      // basis of the saturation Z1 (with units)
  i64 index_z1_b = 1;               // [Z1 : B], B = relations + short units
  int c1_size = 0;                  // basis_ab rows [0, c1_size) span Z1
  Mat basis_ab;                     // unimodular: C1 rows then C2 rows
  enum C1Kind { ShortUnit = 0, ValueOne = 1, Impure = 2 };
  std::vector<int> c1_kind;         // per C1 row
  std::vector<i64> c1_mult;         // least n >= 1 with n*row in B (ValueOne)
  bool c1_pure = true;              // no Impure rows
  std::vector<GenWord> basis_word;  // basis element as a word over generators
  std::vector<GenWord> gen_in_basis; // generator as a word over basis symbols
};

struct GraphAndBasis {
  PeriodicGraph graph;
  CycleBasis basis;
};

// Builds the boundary graph, spanning forests, fundamental cycles, relation
// rows, and a basis of the cycle lattice split along the relation subgroup.
// Requires a valid connected structure.
std::optional<GraphAndBasis> build_graph_and_basis(const GenEq& W, const PeriodicStructure& PS,
                                                   std::string* err = nullptr);

// Saturation split of Z^m along the row lattice of gens: Z1 = primitive
// closure of the rows, Z2 a direct complement, index = [Z1 : row lattice].
struct LatticeSplit {
  Mat z1_basis;
  Mat z2_basis;
  i64 index = 1;
  int rank = 0;
};
LatticeSplit split_lattice(const Mat& gens, int m);

// One integer solution x of x*A = b, if any (rows x columns conventions as
// in Mat; A is n x m, b length m, x length n).
std::optional<std::vector<i64>> solve_integer(const Mat& A, const std::vector<i64>& b);

// Item word of a cycle: edge labels with traversal signs, freely reduced.
SymWord cycle_label(const PeriodicGraph& g, const Cycle& c);
// Expansion of a generator word into an edge cycle.
Cycle cycle_of_genword(const CycleBasis& cb, const GenWord& w);
// Value of a cycle under a solution.
Word eval_cycle(const FreeProduct& G, const PeriodicGraph& g, const Cycle& c, const GESolution& H);

// Signed traversal counts of each item along a cycle, weighted by the
// orientation sign of the item's section; index k holds t(c, h_k).
std::vector<int> cycle_t_row(const GenEq& W, const PeriodicStructure& PS, const PeriodicGraph& g,
                             const Cycle& c);

// Phase of each slot under a solution: the cut position of the period at that
// boundary, in [0, |P|). Follows the stored section signs.
std::optional<std::vector<int>> slot_phases(const FreeProduct& G, const GenEq& W,
                                            const PeriodicStructure& PS, const GESolution& H,
                                            const Word& P, std::string* err = nullptr);

// --- classification ----------------------------------------------------------
// A structure is singular when the solution group lets two independent cycles
// not commute (a), when the complement of the relation subgroup has rank above
// one (b), or when it has rank one and some short out-of-tree cycle can take a
// value other than 1 (c). Otherwise regular; verdicts that lean on a bounded
// search are reported uncertified.

struct Classification {
  enum Kind { Regular, SingularA, SingularB, SingularC } kind = Regular;
  bool certified = false;
  int bound = 0;       // word-length bound the bounded checks exhausted
  int gen1 = -1;       // SingularA: generator pair that fails to commute
  int gen2 = -1;
  int witness_edge = -1; // SingularC: short out-of-tree edge index
  Assignment witness;    // solution exhibiting the failure, when one exists
};

std::optional<Classification> classify_structure(const FreeProduct& G, const GenEq& W,
                                                 const PeriodicStructure& PS,
                                                 const SolveOptions& opt,
                                                 std::string* err = nullptr);

// --- automorphisms -----------------------------------------------------------
// Vertical automorphism generators of the solution set over the structure:
// edge twists slide a long tree edge around a fundamental cycle, complement
// twists multiply one complement basis cycle by another basis cycle. Empty
// for structures singular of type (a).

struct AutomorphismGen {
  enum Kind { EdgeTwist, C2Twist } kind = EdgeTwist;
  int ei = -1;    // EdgeTwist: tree edge index being twisted
  int gen = -1;   // EdgeTwist: fundamental generator giving the cycle
  int c2 = -1;    // C2Twist: complement row of basis_ab
  int other = -1; // C2Twist: helper row of basis_ab
  Theta sub;      // item images; identity off the structure
};

std::optional<std::vector<AutomorphismGen>> automorphism_generators(
    const FreeProduct& G, const GenEq& W, const PeriodicStructure& PS, const SolveOptions& opt,
    std::string* err = nullptr);

// --- value checks ------------------------------------------------------------
// Every cycle value under a periodic solution is a power of the period
// rotated to the base vertex phase; exponents follow the signed traversal
// counts, short-edge cycles stay within 2*rho, relation cycles vanish, and
// pure complement-free basis elements vanish. Violations name the culprit.

struct CycleViolation {
  std::string what;
  int gen = -1; // fundamental generator, when one is at fault
  int c1 = -1;  // C1 row, when one is at fault
  int mu = -1;  // relation pair, when one is at fault
};

struct CycleReport {
  bool ok = true;
  std::vector<CycleViolation> violations;
  Word q0;                    // period rotation at the base vertex
  std::vector<int> gen_exp;   // exponent per fundamental generator
  std::vector<int> item_exp;  // exponent per edge item, parallel to edges
  int skipped_impure = 0;
};

std::optional<CycleReport> cycle_value_checks(const FreeProduct& G, const GenEq& W,
                                              const PeriodicStructure& PS, const GESolution& H,
                                              const Word& P, std::string* err = nullptr);

// --- witnesses and bounds ------------------------------------------------------
// Cycles whose values pin down a singular structure: the commutator pair for
// type (a), two complement cycles for type (b), and for type (c) the family
// c^i (c2)^j over the offending short cycle c, with |i|, |j| <= 2n for n the
// edge count of c, skipping i = j = 0.
std::optional<std::vector<Cycle>> singular_witness_cycles(const FreeProduct& G, const GenEq& W,
                                                          const PeriodicStructure& PS,
                                                          const SolveOptions& opt,
                                                          std::string* err = nullptr);

// Componentwise-minimal nonzero solutions of a linear system over nonnegative
// integers, searched up to the given bound per component. The zero vector is
// returned only for the system with no variables.
struct DiophantineSystem {
  int nvars = 0;
  std::vector<std::vector<i64>> rows; // coefficients, each length nvars
  std::vector<i64> rhs;               // parallel to rows
};
std::vector<std::vector<i64>> minimal_diophantine_solutions(const DiophantineSystem& sys,
                                                            i64 bound);

// Exponent ceiling for solutions periodic over a regular structure: with no
// long items the period repeats at most 2*rho times; otherwise cycle
// exponents are bounded through the basis coordinates and the minimal
// solutions of the traversal system. Monotone in dio_bound.
std::optional<int> exponent_bound(const FreeProduct& G, const GenEq& W,
                                  const PeriodicStructure& PS, const SolveOptions& opt,
                                  i64 dio_bound, std::string* err = nullptr);

// --- display -----------------------------------------------------------------
std::string show(const PeriodicStructure& PS);
std::string to_dot(const PeriodicGraph& g);

} // namespace fp
