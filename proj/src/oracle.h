#pragma once

#include "eqsys.h"

#include <cstdint>
#include <functional>

namespace fp {

// all reduced words of length <= max_len, in length-lex order (empty word first,
// letters ordered by factor then table position); deterministic
std::vector<Word> words_up_to(const FreeProduct& G, int max_len);

struct SolveOptions {
  int max_len = 3;               // per-variable word length cap
  std::int64_t node_budget = -1; // DFS nodes before giving up; -1 = unlimited
  int jobs = 0;                  // 0 = library default thread count
};

bool satisfies(const FreeProduct& G, const EquationSystem& S, const Assignment& U);

// streaming sweep in enumeration order; visit returns false to stop early.
// Returns true when the search space was exhausted (no budget trip, no stop).
bool for_each_solution(const FreeProduct& G, const EquationSystem& S, const SolveOptions& opt,
                       const std::function<bool(const Assignment&)>& visit);

// every assignment with all components of length <= max_len satisfying all
// equations, in enumeration order; serial and parallel sweeps agree exactly.
// `complete` (when non-null) reports whether the space was exhausted.
std::vector<Assignment> enumerate_solutions(const FreeProduct& G, const EquationSystem& S,
                                            const SolveOptions& opt, bool* complete = nullptr);
std::vector<Assignment> enumerate_solutions_serial(const FreeProduct& G, const EquationSystem& S,
                                                   const SolveOptions& opt,
                                                   bool* complete = nullptr);

struct QuasiIdentity {
  EquationSystem premises; // vars shared with the conclusion
  SymWord conclusion;      // asserted = 1 whenever all premises vanish
};

struct QIVerdict {
  enum Kind { Holds, Fails, Unknown } kind = Unknown;
  int bound = 0;      // exhausted word-length bound (Holds)
  Assignment witness; // premises vanish, conclusion does not (Fails)
};

// bounded semi-decision: Fails is definitive, Holds only certifies up to the
// bound, Unknown reports a tripped node budget
QIVerdict check_quasi_identity(const FreeProduct& G, const QuasiIdentity& qi,
                               const SolveOptions& opt);

} // namespace fp
