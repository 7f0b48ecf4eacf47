#include "oracle.h"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fp {

std::vector<Word> words_up_to(const FreeProduct& G, int max_len) {
  std::vector<Letter> letters;
  for (int k = 1; k <= G.num_factors(); ++k) {
    const FactorGroup& F = G.factor(k);
    for (int e = 0; e < F.order(); ++e)
      if (e != F.identity) letters.push_back(Letter{k, e});
  }
  std::vector<Word> out{Word{}};
  std::vector<Word> level{Word{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const Word& w : level)
      for (const Letter& l : letters) {
        if (!w.empty() && w.ls.back().factor == l.factor) continue;
        Word v = w;
        v.ls.push_back(l);
        next.push_back(std::move(v));
      }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

namespace {

// equations become checkable once their highest variable is assigned
struct Plan {
  std::vector<std::vector<int>> ready;
  std::vector<int> varless;
};

Plan make_plan(const EquationSystem& S) {
  Plan p;
  p.ready.resize(S.vars.size());
  for (int i = 0; i < (int)S.eqs.size(); ++i) {
    int mx = -1;
    for (const Sym& s : S.eqs[i]) mx = std::max(mx, s.is_var ? s.var : -1);
    if (mx < 0)
      p.varless.push_back(i);
    else
      p.ready[mx].push_back(i);
  }
  return p;
}

bool eq_ok(const FreeProduct& G, const SymWord& w, const Assignment& U) {
  return substitute(G, w, U).empty();
}

enum class Walk { Done, Stopped, Budget };

Walk dfs(const FreeProduct& G, const EquationSystem& S, const Plan& plan,
         const std::vector<Word>& words, Assignment& U, int d, std::int64_t& budget,
         const std::function<bool(const Assignment&)>& visit) {
  if (d == (int)S.vars.size()) return visit(U) ? Walk::Done : Walk::Stopped;
  for (const Word& w : words) {
    if (budget == 0) return Walk::Budget;
    if (budget > 0) --budget;
    U.val[d] = w;
    bool ok = true;
    for (int ei : plan.ready[d])
      if (!eq_ok(G, S.eqs[ei], U)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Walk r = dfs(G, S, plan, words, U, d + 1, budget, visit);
    if (r != Walk::Done) return r;
  }
  return Walk::Done;
}

} // namespace

bool satisfies(const FreeProduct& G, const EquationSystem& S, const Assignment& U) {
  for (const SymWord& w : S.eqs)
    if (!eq_ok(G, w, U)) return false;
  return true;
}

bool for_each_solution(const FreeProduct& G, const EquationSystem& S, const SolveOptions& opt,
                       const std::function<bool(const Assignment&)>& visit) {
  Plan plan = make_plan(S);
  Assignment U;
  U.val.resize(S.vars.size());
  for (int ei : plan.varless)
    if (!eq_ok(G, S.eqs[ei], U)) return true; // inconsistent constants: empty set, exhausted
  std::vector<Word> words = words_up_to(G, opt.max_len);
  std::int64_t budget = opt.node_budget;
  return dfs(G, S, plan, words, U, 0, budget, visit) == Walk::Done;
}

std::vector<Assignment> enumerate_solutions_serial(const FreeProduct& G, const EquationSystem& S,
                                                   const SolveOptions& opt, bool* complete) {
  std::vector<Assignment> out;
  bool full = for_each_solution(G, S, opt, [&](const Assignment& U) {
    out.push_back(U);
    return true;
  });
  if (complete) *complete = full;
  return out;
}

std::vector<Assignment> enumerate_solutions(const FreeProduct& G, const EquationSystem& S,
                                            const SolveOptions& opt, bool* complete) {
  const int n = (int)S.vars.size();
  // budgeted runs keep the serial prefix semantics exactly
  if (n == 0 || opt.node_budget >= 0) return enumerate_solutions_serial(G, S, opt, complete);

  Plan plan = make_plan(S);
  {
    Assignment probe;
    probe.val.resize(n);
    for (int ei : plan.varless)
      if (!eq_ok(G, S.eqs[ei], probe)) {
        if (complete) *complete = true;
        return {};
      }
  }
  std::vector<Word> words = words_up_to(G, opt.max_len);
  const int W = (int)words.size();
  std::vector<std::vector<Assignment>> buckets(W);

#ifdef _OPENMP
  int nthreads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
  for (int i = 0; i < W; ++i) {
    Assignment U;
    U.val.resize(n);
    U.val[0] = words[i];
    bool ok = true;
    for (int ei : plan.ready[0])
      if (!eq_ok(G, S.eqs[ei], U)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::int64_t budget = -1;
    dfs(G, S, plan, words, U, 1, budget, [&](const Assignment& A) {
      buckets[i].push_back(A);
      return true;
    });
  }

  std::vector<Assignment> out;
  for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
  if (complete) *complete = true;
  return out;
}

QIVerdict check_quasi_identity(const FreeProduct& G, const QuasiIdentity& qi,
                               const SolveOptions& opt) {
  QIVerdict v;
  bool found = false;
  bool full = for_each_solution(G, qi.premises, opt, [&](const Assignment& U) {
    if (!substitute(G, qi.conclusion, U).empty()) {
      v.kind = QIVerdict::Fails;
      v.witness = U;
      found = true;
      return false;
    }
    return true;
  });
  if (found) return v;
  if (!full) {
    v.kind = QIVerdict::Unknown;
    return v;
  }
  v.kind = QIVerdict::Holds;
  v.bound = opt.max_len;
  return v;
}

} // namespace fp
