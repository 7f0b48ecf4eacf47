#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "partition.h"

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

TriangularSystem tri(const FreeProduct& G, const std::string& text) {
  auto p = parse_equation_text(G, text);
  REQUIRE(p.error.empty());
  return triangulate(G, p.S);
}

Word w(const FreeProduct& G, const std::string& s) {
  auto p = G.parse_word(s);
  REQUIRE(p.has_value());
  return *p;
}

} // namespace

TEST_CASE("single coefficient-free triangle") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  auto tabs = enumerate_partition_tables(S);
  CHECK(tabs.size() == 24); // golden, frozen from the first enumeration
  std::set<std::string> seen;
  for (const auto& T : tabs) {
    CHECK(validate_table(S, T) == "");
    CHECK(seen.insert(T.serialize()).second);
  }
  for (size_t i = 1; i < tabs.size(); ++i)
    CHECK(tabs[i - 1].serialize() < tabs[i].serialize());
  // enumeration is a pure function of the system
  auto again = enumerate_partition_tables(S);
  REQUIRE(again.size() == tabs.size());
  for (size_t i = 0; i < tabs.size(); ++i)
    CHECK(again[i].serialize() == tabs[i].serialize());
}

TEST_CASE("constant cells stay single letters") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y\nx y g1.a\n");
  auto tabs = enumerate_partition_tables(S);
  CHECK(tabs.size() == 6); // golden
  for (const auto& T : tabs) {
    CHECK(T.cell[0][2].size() == 1);
    // a central letter carrying the constant lies in the constant's factor
    if (T.cell[0][2][0].is_t) CHECK(T.cell[0][2][0].factor == 1);
  }
}

TEST_CASE("disjoint triangles multiply") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z u v t\nx y z\nu v t\n");
  auto tabs = enumerate_partition_tables(S);
  CHECK(tabs.size() == 24 * 24);
}

TEST_CASE("generalised equation of a central-cycle table") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  GEFamily F = ge_family(G, S);
  REQUIRE(!F.entries.empty());
  const GEEntry* E = nullptr;
  for (const auto& e : F.entries)
    if (e.table.serialize() == "m1;t2.1.1|t2.1.2|t2.1.3;") E = &e;
  REQUIRE(E != nullptr);
  const GenEq& W = E->W;
  CHECK(W.rho == 3);
  CHECK(W.num_boundaries() == 4);
  CHECK(W.conns.empty());
  REQUIRE(W.bases.size() == 3);
  for (const Base& b : W.bases) {
    CHECK(b.kind == BaseKind::Factor);
    CHECK(b.factor == 2);
    CHECK(b.beta == b.alpha + 1);
  }
  // own-type boundary terms only: the three cells are single letters
  CHECK(W.iterm[1] == 2);
  CHECK(W.iterm[2] == 2);
  CHECK(W.iterm[3] == 2);
  CHECK(W.tterm[2] == 2);
  CHECK(W.tterm[3] == 2);
  CHECK(W.tterm[4] == 2);
  InducedSystem I = induced_system(W);
  CHECK(I.basic.empty());
  REQUIRE(I.factor.size() == 1);
  CHECK(I.factor[0].factor == 2);
  CHECK(E->consistency == "");
  // b b b and c c c are the only letter solutions in Z3
  SolveOptions opt;
  opt.max_len = 1;
  bool complete = false;
  auto sols = geneq_solutions(G, W, opt, &complete);
  CHECK(complete);
  REQUIRE(sols.size() == 2);
  for (const auto& H : sols) {
    Assignment U = lift_solution(G, S, *E, H);
    CHECK(substitute(G, triangle_word(S.eqs[0]), U).empty());
  }
  // the word map reads the three occurrences in order
  REQUIRE(E->px.size() == 3);
  CHECK(E->px[0].kind == PxWord::Kind::Span);
  CHECK(E->px[0].lo == 1);
  CHECK(E->px[0].hi == 2);
  CHECK(E->px[1].lo == 2);
  CHECK(E->px[2].lo == 3);
}

TEST_CASE("every bounded solution of every entry projects to a solution") {
  FreeProduct G = z2z3();
  for (const char* text : {"vars x y z\nx y z\n", "vars x y\nx g1.a y\n"}) {
    TriangularSystem S = tri(G, text);
    EquationSystem plain = as_system(S);
    GEFamily F = ge_family(G, S);
    SolveOptions opt;
    opt.max_len = 1;
    for (const auto& e : F.entries) {
      auto sols = geneq_solutions(G, e.W, opt);
      for (const auto& H : sols) {
        Assignment U = lift_solution(G, S, e, H);
        CHECK(satisfies(G, plain, U));
      }
    }
  }
}

TEST_CASE("solution round-trips over two products") {
  struct Probe {
    FreeProduct G;
    const char* text;
  };
  std::vector<Probe> probes;
  probes.push_back({z2z3(), "vars x y z\nx y z\n"});
  probes.push_back({z2z3(), "vars x y\nx g1.a y\n"});
  probes.push_back({z2z3(), "vars x\nx g1.a^-1\n"});
  probes.push_back({z2z2(), "vars x y z\nx y z\n"});
  probes.push_back({z2z2(), "vars x y\nx y x^-1 y^-1\n"});
  for (auto& pr : probes) {
    TriangularSystem S = tri(pr.G, pr.text);
    EquationSystem plain = as_system(S);
    SolveOptions opt;
    opt.max_len = 2;
    bool complete = false;
    auto sols = enumerate_solutions(pr.G, plain, opt, &complete);
    REQUIRE(complete);
    REQUIRE(!sols.empty());
    auto tabs = enumerate_partition_tables(S);
    std::set<std::string> keys;
    for (const auto& T : tabs) keys.insert(T.serialize());
    for (const auto& U : sols) {
      std::string why;
      auto rt = solution_roundtrip(pr.G, S, U, &why);
      REQUIRE_MESSAGE(rt.has_value(), why);
      CHECK(keys.count(rt->table.serialize()) == 1);
      for (const auto& sc : rt->scheme) {
        CHECK(sc.shape() >= 1);
        CHECK(sc.shape() <= 5);
      }
      // the factorization is graphical: item lengths tile each value
      for (size_t v = 0; v < S.vars.size(); ++v) {
        const PxWord& p = rt->entry.px[v];
        if (p.kind != PxWord::Kind::Span) {
          CHECK(U.val[v].empty());
          continue;
        }
        int total = 0;
        for (int k = p.lo; k < p.hi; ++k) total += rt->H.val[k].len();
        CHECK(total == U.val[v].len());
      }
    }
  }
}

TEST_CASE("tail-head pairing of a fully cancelling pair") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  Assignment U;
  U.val = {w(G, "ab"), w(G, "ca"), Word{}};
  auto rt = solution_roundtrip(G, S, U);
  REQUIRE(rt.has_value());
  const TriangleScheme& sc = rt->scheme[0];
  CHECK(sc.triple_factor == 0);
  CHECK(sc.corner == std::array<bool, 3>{false, true, false});
  CHECK(sc.corner_val[1] == w(G, "ab"));
}

TEST_CASE("cancellation-free solutions use only central letters") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  Assignment U;
  U.val = {w(G, "b"), w(G, "b"), w(G, "b")};
  auto rt = solution_roundtrip(G, S, U);
  REQUIRE(rt.has_value());
  const TriangleScheme& sc = rt->scheme[0];
  CHECK(sc.triple_factor == 2);
  CHECK(sc.corner == std::array<bool, 3>{false, false, false});
  for (int j = 0; j < 3; ++j) CHECK(rt->table.cell[0][j].size() == 1);
}

TEST_CASE("merging letters resolve into a central cycle beside corners") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  Assignment U;
  U.val = {w(G, "ab"), w(G, "bac"), w(G, "baba")};
  Word prod = G.concat(G.concat(U.val[0], U.val[1]), U.val[2]);
  REQUIRE(prod.empty());
  auto rt = solution_roundtrip(G, S, U);
  REQUIRE(rt.has_value());
  const TriangleScheme& sc = rt->scheme[0];
  CHECK(sc.triple_factor == 2);
  CHECK(sc.corner == std::array<bool, 3>{true, false, true});
}

TEST_CASE("unsolvable constant pair yields an empty family") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x\ng1.a g2.b\n");
  GEFamily F = ge_family(G, S);
  CHECK(F.entries.empty());
  CHECK(!F.rejected.empty());
  SolveOptions opt;
  opt.max_len = 2;
  bool complete = false;
  auto sols = enumerate_solutions(G, as_system(S), opt, &complete);
  CHECK(complete);
  CHECK(sols.empty());
}

TEST_CASE("pinned variable keeps its family and its solution") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x\nx g1.a^-1\n");
  GEFamily F = ge_family(G, S);
  REQUIRE(!F.entries.empty());
  bool found = false;
  SolveOptions opt;
  opt.max_len = 1;
  for (const auto& e : F.entries) {
    for (const auto& H : geneq_solutions(G, e.W, opt)) {
      Assignment U = lift_solution(G, S, e, H);
      if (U.val[0] == w(G, "a")) found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("generator membership by folding") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  auto tabs = enumerate_partition_tables(S);
  int pass = 0, failcnt = 0;
  for (const auto& T : tabs) {
    if (T.p == 0 && T.cell[0][0].empty() && T.cell[0][1].empty() && T.cell[0][2].empty())
      continue; // nothing occurs, vacuously onto
    (check_331(T) ? pass : failcnt)++;
  }
  CHECK(pass > 0);
  // single-letter cells generate their letters outright
  PartitionTable lone;
  lone.m = 1;
  lone.cell.resize(1);
  TableLetter z1;
  z1.z = 1;
  lone.cell[0][0] = {z1};
  TableLetter z1i = z1;
  z1i.sign = -1;
  lone.cell[0][1] = {z1i};
  lone.p = 1;
  CHECK(check_331(lone));
  // a two-letter cell whose letters never appear alone is not onto
  PartitionTable wide;
  wide.m = 1;
  wide.cell.resize(1);
  TableLetter z2l;
  z2l.z = 2;
  wide.cell[0][0] = {z1, z2l};
  TableLetter z2i = z2l;
  z2i.sign = -1;
  wide.cell[0][1] = {z2i, z1i};
  wide.p = 2;
  CHECK_FALSE(check_331(wide));
}

TEST_CASE("distinct solutions stay distinct through an onto table") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  GEFamily F = ge_family(G, S);
  SolveOptions opt;
  opt.max_len = 1;
  for (const auto& e : F.entries) {
    if (!check_331(e.table)) continue;
    auto sols = geneq_solutions(G, e.W, opt);
    std::set<std::string> images;
    for (const auto& H : sols) {
      Assignment U = lift_solution(G, S, e, H);
      std::string key;
      for (const Word& u : U.val) key += G.show(u) + "|";
      CHECK(images.insert(key).second);
    }
  }
}

TEST_CASE("family construction is deterministic across thread counts") {
  FreeProduct G = z2z3();
  TriangularSystem S = tri(G, "vars x y\nx g1.a y\n");
  GEFamily a = ge_family(G, S, 1);
  GEFamily b = ge_family(G, S, 4);
  REQUIRE(a.entries.size() == b.entries.size());
  REQUIRE(a.rejected.size() == b.rejected.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].table.serialize() == b.entries[i].table.serialize());
    CHECK(canonical_json(a.entries[i].W) == canonical_json(b.entries[i].W));
  }
  for (size_t i = 0; i < a.rejected.size(); ++i) {
    CHECK(a.rejected[i].table.serialize() == b.rejected[i].table.serialize());
    CHECK(a.rejected[i].why == b.rejected[i].why);
  }
}

TEST_CASE("every oracle solution factors through the family") {
  FreeProduct G = z2z2();
  TriangularSystem S = tri(G, "vars x y z\nx y z\n");
  EquationSystem plain = as_system(S);
  SolveOptions opt;
  opt.max_len = 2;
  bool complete = false;
  auto sols = enumerate_solutions(G, plain, opt, &complete);
  REQUIRE(complete);
  GEFamily F = ge_family(G, S);
  std::set<std::string> entry_keys;
  for (const auto& e : F.entries) entry_keys.insert(e.table.serialize());
  for (const auto& U : sols) {
    auto rt = solution_roundtrip(G, S, U);
    REQUIRE(rt.has_value());
    CHECK(entry_keys.count(rt->table.serialize()) == 1);
  }
}
