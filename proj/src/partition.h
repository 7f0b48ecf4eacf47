#pragma once

#include "eqsys.h"
#include "geneq.h"
#include "oracle.h"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fp {

// Partition tables: per-triangle words over letters Z (maximal blocks that
// cancel freely) and T (edges of a central cycle inside one factor) recording
// how a solution collapses each triangle r_{i1} r_{i2} r_{i3} = 1. Each table
// turns into one generalised equation; the family of all tables covers every
// solution of the system.

struct TableLetter {
  bool is_t = false;
  // z letters
  int z = 0;     // 1-based id
  int sign = +1; // t letters never occur inverted
  // t letters, id (factor, tri, edge)
  int factor = 0;
  int tri = 0;  // 1-based triangle number
  int edge = 0; // 1..3

  friend bool operator==(const TableLetter&, const TableLetter&) = default;
};

using TableWord = std::vector<TableLetter>;

struct PartitionTable {
  int m = 0;                                  // number of triangles
  std::vector<std::array<TableWord, 3>> cell; // cell[i][j], 0-based indices
  int p = 0;                                  // number of z letters

  std::string serialize() const; // canonical bytes; defines family order
};

std::string show_table_letter(const TableLetter& l);

// Checks the five table conditions against S. "" when valid, else a
// diagnostic naming the violated clause.
std::string validate_table(const TriangularSystem& S, const PartitionTable& T);

// Per-triangle cancellation pattern. Corner blocks: A pairs a prefix of the
// first cell with a suffix of the third, B pairs cells 1-2, C pairs cells 2-3;
// nesting (A outermost) is forced, so flags plus the triple factor determine
// the cell words completely.
struct TriangleScheme {
  int triple_factor = 0;        // 0 = no central triple
  std::array<bool, 3> corner{}; // nonempty flags for A, B, C
  // filled by scheme extraction from a concrete solution:
  std::array<Word, 3> corner_val{};
  std::array<Word, 3> triple_val{}; // single letters when triple_factor != 0

  int shape() const; // 1..5
};

using CancellationScheme = std::vector<TriangleScheme>;

// All partition tables of S realizable by a tree-graded cancellation scheme,
// built cell by cell with the table conditions enforced incrementally and
// condition (1) checked on the assembled words. Sorted by serialize().
std::vector<PartitionTable> enumerate_partition_tables(const TriangularSystem& S);

// The word map x -> P_x(h) attached to a generalised equation built from a
// table: the item span of x's first occurrence, or a pinned trivial value
// when every occurrence of x has an empty cell.
struct PxWord {
  enum class Kind { Span, Trivial, Free } kind = Kind::Span;
  int lo = 0, hi = 0; // item range [lo, hi) of the defining occurrence
  int eps = +1;
};

struct GEEntry {
  PartitionTable table;
  GenEq W;
  std::vector<PxWord> px;  // indexed like S.vars
  std::string consistency; // "" or the formal-consistency diagnostic
};

struct GEFamily {
  std::vector<GEEntry> entries;
  struct Rejected {
    PartitionTable table;
    std::string why;
  };
  // tables whose boundary-term propagation is contradictory; they admit no
  // solution, so dropping them loses nothing
  std::vector<Rejected> rejected;
};

// Builds the generalised equation of one table: items are the letters of
// V = V_11 V_12 ... V_m3, dual variable bases for z pairs and for variable
// occurrence pairs (left-lexicographic), factor-base triples for t letters,
// constant bases on constant cells, boundary terms with propagation across
// dual pairs. Coefficient pins are then propagated through the induced
// equations; tables whose equation is contradicted this way admit no
// solution and are dropped (nullopt, *why says where it broke).
std::optional<GEEntry> table_to_generalised_equation(const FreeProduct& G,
                                                     const TriangularSystem& S,
                                                     const PartitionTable& T,
                                                     std::string* why = nullptr);

GEFamily ge_family(const FreeProduct& G, const TriangularSystem& S, int jobs = 0);

// P(H) evaluated in G: the lift of a solution of an entry's generalised
// equation back to an assignment for S.
Assignment lift_solution(const FreeProduct& G, const TriangularSystem& S, const GEEntry& e,
                         const GESolution& H);

struct Roundtrip {
  CancellationScheme scheme;
  PartitionTable table;
  GEEntry entry;
  GESolution H;
};

// Extracts the cancellation scheme of a solution U of S, builds the induced
// table and the induced solution H of its generalised equation; U = P(H)
// holds graphically. Fails (with *why) when U does not solve S.
std::optional<Roundtrip> solution_roundtrip(const FreeProduct& G, const TriangularSystem& S,
                                            const Assignment& U, std::string* why = nullptr);

// Condition (3.31): every z and t letter occurring in the table lies in the
// subgroup of the free group generated by the cell words. Checked by
// Stallings folding. When it holds the induced map on coordinate groups is
// onto, so P is injective on solution sets.
bool check_331(const PartitionTable& T);

} // namespace fp
