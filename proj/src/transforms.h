#pragma once

#include "geneq.h"

#include <optional>
#include <utility>

namespace fp {

// Rewriting moves on generalised equations. A move takes an equation to
// finitely many successor equations together with epimorphisms of coordinate
// groups, and for every solution of the source exactly one successor carries
// the transported solution.

struct ETStep {
  // 1..5 are the elementary moves; the last two are derived moves that are
  // not recorded as elementary scripts
  enum Kind {
    CutBase = 1,
    TransferBase = 2,
    RemoveMatched = 3,
    RemoveLinear = 4,
    TieBoundary = 5,
    MoveSection = 6,
    MergeConstants = 7,
  };
  int kind = 0;
  int base = -1;  // the base acted on; MergeConstants: the first constant
  int other = -1; // TransferBase: the carrier; MergeConstants: the second constant
  int p = 0;      // CutBase: the cut boundary; TieBoundary: the boundary tied
  int q = 0;      // CutBase: dual-side boundary; TieBoundary: target boundary,
                  // or the item a fresh boundary splits when insert is set
  bool insert = false;
  int src = -1, dest = -1; // MoveSection: section moved, section it lands after (-1 = front)
};

std::string show_step(const ETStep& s);

// how the epimorphism onto the branch's coordinate group is certified
struct Properness {
  enum Kind { Isomorphism, Proper, Uncertified } kind = Isomorphism;
  int bound = 0; // Uncertified: word-length bound the certification search exhausted
};

struct Branch {
  GenEq W;
  Theta theta; // source items as words over this branch's items and constants
  Properness properness;
  std::vector<ETStep> script;
};

struct TransformOutcome {
  GenEq source;
  std::vector<Branch> branches;
};

struct ETArgs {
  int base = -1; // 1/2: the base to cut or transfer; 3/4/5: the pair acted on
  int mu = -1;   // 2: the carrier
  int p = 0;     // 1: cut boundary on the base side; 5: boundary to tie
  int q = 0;     // 1: connected boundary on the dual side
};

struct DArgs {
  int section = -1;            // 1: section to close; 2: section to move
  int dest = -1;               // 2: land right after this section (-1 = front)
  int first = -1, second = -1; // 6: the constant bases to identify
};

struct TransformOptions {
  // budget for certifying whether a tie without a new boundary is proper
  SolveOptions qi = SolveOptions{2, 200000, 0};
};

// kinds 1..5; preconditions are reported through err by name
std::optional<TransformOutcome> apply_et(const FreeProduct& G, const GenEq& W, int kind,
                                         const ETArgs& args, const TransformOptions& opt = {},
                                         std::string* err = nullptr);

// kinds 1, 2, 3, 5, 6; the kernel has its own entry point below
std::optional<TransformOutcome> apply_derived(const FreeProduct& G, const GenEq& W, int kind,
                                              const DArgs& args, const TransformOptions& opt = {},
                                              std::string* err = nullptr);

enum class ElimOrder { First, Last };

struct KernelResult {
  GenEq kernel;
  int eliminations = 0;
  int free_rank_delta = 0; // free items of the kernel minus eliminations
};

// removes eliminable active variable-base pairs until none remain; the result
// does not depend on the order. Requires a connection-free equation (complete
// the cut first).
std::optional<KernelResult> kernel(const GenEq& W, ElimOrder order = ElimOrder::First,
                                   std::string* err = nullptr);

// the equations of W as one plain word system, variables h1..h_rho in order
EquationSystem induced_equation_system(const FreeProduct& G, const GenEq& W);

// the unique branch whose transport accepts H, with the transported solution
std::optional<std::pair<int, GESolution>> transport(const FreeProduct& G,
                                                    const TransformOutcome& out,
                                                    const GESolution& H,
                                                    std::string* err = nullptr);

} // namespace fp
