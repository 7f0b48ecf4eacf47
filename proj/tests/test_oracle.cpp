#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.h"

#include <set>

using namespace fp;

namespace {

FreeProduct z2z3() {
  auto r = load_free_product({std::string(DATA_DIR) + "/z2z3.txt"});
  REQUIRE(r.error.empty());
  return r.G;
}

FreeProduct z2z2() {
  auto r = load_free_product({std::string(DATA_DIR) + "/z2z2.txt"});
  REQUIRE(r.error.empty());
  return r.G;
}

Word w(const FreeProduct& G, const std::string& s) {
  auto p = G.parse_word(s);
  REQUIRE(p.has_value());
  return *p;
}

EquationSystem sys(const FreeProduct& G, const std::string& text) {
  auto p = parse_equation_text(G, text);
  REQUIRE(p.error.empty());
  return p.S;
}

} // namespace

TEST_CASE("equation parsing") {
  auto G = z2z3();
  auto S = sys(G, "vars x y\nx y x\nx g1.a^-1\n");
  CHECK(S.vars == std::vector<std::string>{"x", "y"});
  REQUIRE(S.eqs.size() == 2);
  CHECK(S.eqs[0].size() == 3);
  CHECK(S.eqs[0][0].is_var);
  CHECK(S.eqs[1][1].is_var == false);
  // constant with ^-1 folds into the letter itself
  CHECK(S.eqs[1][1].c == G.inv_letter(*G.parse_letter("g1.a")));

  // implicit variables when no vars line is given
  auto P = parse_equation_text(G, "x y\n");
  REQUIRE(P.error.empty());
  CHECK(P.S.vars.size() == 2);

  // errors carry line numbers
  CHECK(parse_equation_text(G, "vars x x\n").error.find("line 1") != std::string::npos);
  CHECK(parse_equation_text(G, "vars a\n").error.find("collides") != std::string::npos);
  CHECK(parse_equation_text(G, "vars x\nx q\n").error.find("line 2") != std::string::npos);
}

TEST_CASE("substitution") {
  auto G = z2z3();
  auto S = sys(G, "vars x y\nx y\n");
  Assignment U;
  U.val = {w(G, "a"), w(G, "b")};
  bool g = false;
  CHECK(substitute(G, S.eqs[0], U, &g) == w(G, "ab"));
  CHECK(g);

  // x x^-1 collapses regardless of the value
  auto T = sys(G, "vars x\nx x^-1\n");
  Assignment V;
  V.val = {w(G, "aba")};
  CHECK(substitute(G, T.eqs[0], V, &g).empty());
  CHECK_FALSE(g);

  // full cancellation across the seam
  U.val = {w(G, "ab"), w(G, "ca")};
  CHECK(substitute(G, S.eqs[0], U, &g).empty());
  CHECK_FALSE(g);
}

TEST_CASE("triangulation shapes") {
  auto G = z2z3();

  // length 3 passes through, no fresh variables
  auto S3 = sys(G, "vars x y\nx y x\n");
  auto T3 = triangulate(G, S3);
  CHECK(T3.vars.size() == 2);
  REQUIRE(T3.eqs.size() == 1);
  CHECK(triangle_word(T3.eqs[0]) == S3.eqs[0]);

  // length 1 becomes (r, r, r^-1)
  auto S1 = sys(G, "vars x\nx\n");
  auto T1 = triangulate(G, S1);
  REQUIRE(T1.eqs.size() == 1);
  CHECK(T1.vars.size() == 1);
  CHECK(T1.eqs[0].r[2].eps == -1);

  // length 1 constant: the third letter is the table inverse
  auto S1c = sys(G, "vars x\ng2.b\n");
  auto T1c = triangulate(G, S1c);
  REQUIRE(T1c.eqs.size() == 1);
  CHECK(T1c.eqs[0].r[2].c == G.inv_letter(*G.parse_letter("g2.b")));

  // length 2 introduces one pinned fresh variable
  auto S2 = sys(G, "vars x y\nx y\n");
  auto T2 = triangulate(G, S2);
  CHECK(T2.num_original == 2);
  CHECK(T2.vars.size() == 3);
  REQUIRE(T2.eqs.size() == 2);
  CHECK(T2.eqs[1].r[0].var == 2);
  CHECK(T2.eqs[1].r[2].eps == -1);

  // length n > 3 chains with n-3 fresh variables
  auto S6 = sys(G, "vars x y z\nx y z x y z\n");
  auto T6 = triangulate(G, S6);
  CHECK(T6.vars.size() == 3 + 3);
  CHECK(T6.eqs.size() == 4);
  for (const Triangle& t : T6.eqs) CHECK(triangle_word(t).size() == 3);
}

TEST_CASE("triangulation preserves bounded solution sets") {
  auto G = z2z3();
  SolveOptions opt;
  opt.max_len = 3;

  // length-3 equation: counts agree exactly
  auto S = sys(G, "vars x y\nx y x\n");
  auto T = as_system(triangulate(G, S));
  CHECK(enumerate_solutions(G, S, opt).size() == enumerate_solutions(G, T, opt).size());

  // length-4 equation: fresh variable u = x*y is forced, so triangular
  // solutions are exactly the originals whose induced u fits the cap
  auto S4 = sys(G, "vars x y\nx y x y\n");
  auto T4sys = as_system(triangulate(G, S4));
  auto orig = enumerate_solutions(G, S4, opt);
  auto tri = enumerate_solutions(G, T4sys, opt);

  std::set<std::pair<Word, Word>> expect;
  for (const Assignment& U : orig) {
    Word u = G.concat(U.val[0], U.val[1]);
    if (u.len() <= opt.max_len) expect.insert({U.val[0], U.val[1]});
  }
  std::set<std::pair<Word, Word>> got;
  for (const Assignment& U : tri) got.insert({U.val[0], U.val[1]});
  CHECK(got == expect);
  CHECK(got.size() == tri.size()); // projection is injective
}

TEST_CASE("word enumeration is length-lex and reduced") {
  auto G2 = z2z2();
  auto ws2 = words_up_to(G2, 3);
  CHECK(ws2.size() == 7); // 1 + 2 + 2 + 2
  auto G3 = z2z3();
  auto ws3 = words_up_to(G3, 3);
  CHECK(ws3.size() == 14); // 1 + 3 + 4 + 6

  std::set<Word> seen;
  int last_len = 0;
  for (const Word& u : ws3) {
    CHECK(u.len() >= last_len);
    last_len = u.len();
    CHECK(seen.insert(u).second);
    CHECK(G3.reduce(u.ls) == u);
  }
}

TEST_CASE("solution enumeration matches hand counts") {
  auto G = z2z2();
  SolveOptions opt;
  opt.max_len = 2;

  auto S = sys(G, "vars x\nx x\n");
  auto sols = enumerate_solutions(G, S, opt);
  REQUIRE(sols.size() == 3);
  std::set<Word> vals;
  for (auto& U : sols) vals.insert(U.val[0]);
  CHECK(vals == std::set<Word>{w(G, "1"), w(G, "a"), w(G, "b")});

  auto Sa = sys(G, "vars x\nx g1.a^-1\n");
  auto sa = enumerate_solutions(G, Sa, opt);
  REQUIRE(sa.size() == 1);
  CHECK(sa[0].val[0] == w(G, "a"));

  // inconsistent constants, no variables involved
  auto Sc = sys(G, "vars x\ng1.a g2.b^-1\n");
  bool complete = false;
  CHECK(enumerate_solutions(G, Sc, opt, &complete).empty());
  CHECK(complete);
}

TEST_CASE("serial and parallel sweeps agree") {
  auto G = z2z3();
  SolveOptions opt;
  opt.max_len = 3;
  for (const char* text : {"vars x y\nx y x\n", "vars x y z\nx y z\nx x\n", "vars x\nx x x\n"}) {
    auto S = sys(G, text);
    auto a = enumerate_solutions_serial(G, S, opt);
    SolveOptions par = opt;
    par.jobs = 4;
    auto b = enumerate_solutions(G, S, par);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].val == b[i].val);
  }
}

TEST_CASE("budget truncation keeps the serial prefix") {
  auto G = z2z3();
  auto S = sys(G, "vars x y\nx x\n");
  SolveOptions full;
  full.max_len = 2;
  auto all = enumerate_solutions(G, S, full);
  REQUIRE(all.size() > 2);

  SolveOptions capped = full;
  capped.node_budget = 10;
  bool complete = true;
  auto some = enumerate_solutions(G, S, capped, &complete);
  CHECK_FALSE(complete);
  CHECK(some.size() < all.size());
  for (size_t i = 0; i < some.size(); ++i) CHECK(some[i].val == all[i].val);
}

TEST_CASE("quasi-identity verdicts") {
  auto G = z2z2();
  SolveOptions opt;
  opt.max_len = 3;

  // x = 1 implies x = 1
  QuasiIdentity tauto;
  tauto.premises = sys(G, "vars x\nx\n");
  tauto.conclusion = tauto.premises.eqs[0];
  auto v = check_quasi_identity(G, tauto, opt);
  CHECK(v.kind == QIVerdict::Holds);
  CHECK(v.bound == 3);

  // [x,y] = 1 does not force x = 1
  QuasiIdentity comm;
  comm.premises = sys(G, "vars x y\nx y x^-1 y^-1\n");
  comm.conclusion = {var_sym(0, +1)};
  v = check_quasi_identity(G, comm, opt);
  REQUIRE(v.kind == QIVerdict::Fails);
  CHECK(satisfies(G, comm.premises, v.witness));
  CHECK_FALSE(substitute(G, comm.conclusion, v.witness).empty());

  // budget trip reports Unknown
  QuasiIdentity open;
  open.premises = sys(G, "vars x\nx x\n");
  open.premises.eqs.clear(); // no premises: every x qualifies
  open.conclusion = {var_sym(0, +1)};
  SolveOptions tiny = opt;
  tiny.node_budget = 1;
  // budget of one explores only x = 1, where the conclusion holds
  v = check_quasi_identity(G, open, tiny);
  CHECK(v.kind == QIVerdict::Unknown);
}

TEST_CASE("quasi-identity agrees with exhaustive search") {
  auto G = z2z2();
  SolveOptions opt;
  opt.max_len = 3;
  auto premises = sys(G, "vars x\nx x\nx g1.a x g1.a\n");
  std::vector<SymWord> conclusions = {
      {var_sym(0, +1)},
      sys(G, "vars x\nx g1.a^-1\n").eqs[0],
      sys(G, "vars x\nx g1.a x^-1 g1.a^-1\n").eqs[0],
  };
  for (const SymWord& c : conclusions) {
    QuasiIdentity qi{premises, c};
    auto v = check_quasi_identity(G, qi, opt);
    bool broken = false;
    for (const Assignment& U : enumerate_solutions(G, premises, opt))
      if (!substitute(G, c, U).empty()) broken = true;
    CHECK(v.kind == (broken ? QIVerdict::Fails : QIVerdict::Holds));
  }
}
