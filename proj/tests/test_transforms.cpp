#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "transforms.h"

#include <algorithm>
#include <set>
#include <string>

using namespace fp;

namespace {

FreeProduct z2z3() {
  auto r = load_free_product({std::string(DATA_DIR) + "/z2z3.txt"});
  REQUIRE(r.error.empty());
  return r.G;
}

Word w(const FreeProduct& G, const std::string& s) {
  auto p = G.parse_word(s);
  REQUIRE(p.has_value());
  return *p;
}

GenEq ge(int rho) {
  GenEq W;
  W.rho = rho;
  W.init_terms();
  W.sections.push_back(Section{1, rho + 1, SectionClass::Variable, true});
  return W;
}

void add_pair(GenEq& W, int a1, int b1, int a2, int b2) {
  int i = (int)W.bases.size();
  W.bases.push_back(variable_base(a1, b1, +1, i + 1));
  W.bases.push_back(variable_base(a2, b2, +1, i));
}

GESolution sol(const FreeProduct& G, const std::vector<std::string>& items) {
  GESolution H;
  H.val.resize(items.size() + 1);
  for (size_t i = 0; i < items.size(); ++i) H.val[i + 1] = w(G, items[i]);
  return H;
}

std::vector<GESolution> sols(const FreeProduct& G, const GenEq& W, int L) {
  return geneq_solutions(G, W, SolveOptions{L, -1, 0});
}

std::set<std::string> sol_keys(const FreeProduct& G, const std::vector<GESolution>& hs) {
  std::set<std::string> out;
  for (const GESolution& h : hs) {
    std::string k;
    for (size_t i = 1; i < h.val.size(); ++i) k += G.show(h.val[i]) + "|";
    out.insert(k);
  }
  return out;
}

// every branch solution, pushed back through theta, must satisfy the source's
// equations as plain word equations
void check_lifts(const FreeProduct& G, const TransformOutcome& out, int L) {
  EquationSystem sys = induced_equation_system(G, out.source);
  for (const Branch& br : out.branches) {
    for (const GESolution& Hb : sols(G, br.W, L)) {
      GESolution lift = transport_solution(G, br.theta, Hb);
      Assignment U;
      U.val.assign(lift.val.begin() + 1, lift.val.end());
      CHECK(satisfies(G, sys, U));
    }
  }
}

// rho 4, one dual pair h1 h2 = h3 h4 with the middle boundary tied, and terms
// pinning the seam so that cutting loses no constraint
GenEq cut_fixture() {
  GenEq W = ge(4);
  add_pair(W, 1, 3, 3, 5);
  W.conns.push_back(Conn{2, 0, 4});
  W.tterm[2] = 1;
  W.iterm[2] = 2;
  W.tterm[4] = 1;
  W.iterm[4] = 2;
  return W;
}

} // namespace

TEST_CASE("cutting a base at a tied boundary") {
  FreeProduct G = z2z3();
  GenEq W = cut_fixture();
  REQUIRE(validate(W).empty());

  auto out = apply_et(G, W, 1, ETArgs{0, -1, 2, 4});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.properness.kind == Properness::Isomorphism);
  CHECK(br.W.bases.size() == 4);
  CHECK(br.W.conns.empty());
  CHECK(validate(br.W).empty());
  CHECK(br.W.bases[0].alpha == 1);
  CHECK(br.W.bases[0].beta == 2);
  CHECK(br.W.bases[1].alpha == 3);
  CHECK(br.W.bases[1].beta == 4);
  CHECK(br.W.bases[2].alpha == 2);
  CHECK(br.W.bases[3].alpha == 4);

  // the tied terms keep the seam, so the halves say exactly as much as the whole
  auto before = sol_keys(G, sols(G, W, 2));
  auto after = sol_keys(G, sols(G, br.W, 2));
  CHECK(before.size() == 12);
  CHECK(before == after);

  GESolution H = sol(G, {"a", "b", "a", "b"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->first == 0);
  CHECK(tr->second.val == H.val);

  GESolution lift = transport_solution(G, br.theta, tr->second);
  CHECK(lift.val == H.val);
  check_lifts(G, *out, 2);

  std::string err;
  GenEq W2 = ge(4);
  add_pair(W2, 1, 3, 3, 5);
  CHECK_FALSE(apply_et(G, W2, 1, ETArgs{0, -1, 2, 4}, {}, &err).has_value());
  CHECK(err.find("connection") != std::string::npos);
}

TEST_CASE("transferring a base through its carrier") {
  FreeProduct G = z2z3();
  GenEq W = ge(5);
  add_pair(W, 1, 3, 3, 5); // carrier pair
  add_pair(W, 1, 2, 5, 6); // the base to move
  W.conns.push_back(Conn{2, 0, 4});
  REQUIRE(validate(W).empty());

  auto out = apply_et(G, W, 2, ETArgs{2, 0, 0, 0});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.properness.kind == Properness::Isomorphism);
  CHECK(br.W.bases[2].alpha == 3);
  CHECK(br.W.bases[2].beta == 4);
  CHECK(br.W.bases[3].alpha == 5); // the dual stays put
  CHECK(validate(br.W).empty());

  auto before = sol_keys(G, sols(G, W, 2));
  auto after = sol_keys(G, sols(G, br.W, 2));
  CHECK(before.size() == 24);
  CHECK(before == after);

  GESolution H = sol(G, {"a", "b", "a", "b", "a"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->second.val == H.val);
  check_lifts(G, *out, 2);

  // without the tie the endpoint of the moved base has no image
  std::string err;
  GenEq W2 = ge(5);
  add_pair(W2, 1, 3, 3, 5);
  add_pair(W2, 1, 2, 5, 6);
  CHECK_FALSE(apply_et(G, W2, 2, ETArgs{2, 0, 0, 0}, {}, &err).has_value());
  CHECK(err.find("not tied") != std::string::npos);
}

TEST_CASE("removing a matched pair") {
  FreeProduct G = z2z3();
  GenEq W = ge(2);
  add_pair(W, 1, 2, 1, 2); // matched on a single item
  add_pair(W, 1, 2, 2, 3);
  REQUIRE(validate(W).empty());

  auto out = apply_et(G, W, 3, ETArgs{0, -1, 0, 0});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.W.bases.size() == 2);
  CHECK(br.W.bases[0].dual == 1);
  CHECK(br.W.bases[1].dual == 0);
  CHECK(validate(br.W).empty());

  auto before = sol_keys(G, sols(G, W, 2));
  auto after = sol_keys(G, sols(G, br.W, 2));
  CHECK(before.size() == 7);
  CHECK(before == after);

  GESolution H = sol(G, {"ab", "ab"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->second.val == H.val);
  check_lifts(G, *out, 2);

  std::string err;
  GenEq W2 = ge(2);
  add_pair(W2, 1, 2, 2, 3);
  CHECK_FALSE(apply_et(G, W2, 3, ETArgs{0, -1, 0, 0}, {}, &err).has_value());
  CHECK(err.find("matched") != std::string::npos);
}

TEST_CASE("removing a linear base deletes its items") {
  FreeProduct G = z2z3();
  GenEq W = ge(4);
  add_pair(W, 1, 3, 3, 5);
  W.conns.push_back(Conn{2, 0, 4});
  REQUIRE(validate(W).empty());

  auto out = apply_et(G, W, 4, ETArgs{0, -1, 0, 0});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.W.rho == 2);
  CHECK(br.W.bases.empty());
  CHECK(br.W.conns.empty());
  REQUIRE(br.W.sections.size() == 1);
  CHECK(br.W.sections[0].hi == 3);
  CHECK(validate(br.W).empty());

  // h1 and h2 read off the surviving copies
  CHECK(br.theta.img[1] == SymWord{var_sym(1, +1)});
  CHECK(br.theta.img[2] == SymWord{var_sym(2, +1)});
  CHECK(br.theta.img[3] == SymWord{var_sym(1, +1)});
  CHECK(br.theta.img[4] == SymWord{var_sym(2, +1)});

  auto before = sols(G, W, 2);
  CHECK(before.size() == 24);
  CHECK(sols(G, br.W, 2).size() == 49);
  std::set<std::string> seen;
  for (const GESolution& H : before) {
    auto tr = transport(G, *out, H);
    REQUIRE(tr.has_value());
    CHECK(tr->second.length() < H.length()); // removal strictly shortens
    CHECK(check_solution(G, br.W, tr->second));
    seen.insert(G.show(tr->second.val[1]) + "|" + G.show(tr->second.val[2]));
  }
  CHECK(seen.size() == before.size());
  check_lifts(G, *out, 2);

  std::string err;
  GenEq W2 = ge(4);
  add_pair(W2, 1, 3, 3, 5);
  CHECK_FALSE(apply_et(G, W2, 4, ETArgs{0, -1, 0, 0}, {}, &err).has_value());
  CHECK(err.find("not tied") != std::string::npos);

  GenEq W3 = W;
  W3.bases.push_back(constant_base(1, w(G, "a").ls[0]));
  CHECK_FALSE(apply_et(G, W3, 4, ETArgs{0, -1, 0, 0}, {}, &err).has_value());
  CHECK(err.find("overlaps") != std::string::npos);
}

TEST_CASE("tying a boundary branches over the dual side") {
  FreeProduct G = z2z3();
  GenEq W = ge(4);
  add_pair(W, 1, 3, 3, 5);
  REQUIRE(validate(W).empty());

  auto out = apply_et(G, W, 5, ETArgs{0, -1, 2, 0});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 3); // tie to 4, split item 3, split item 4

  int ties = 0, inserts = 0;
  for (const Branch& br : out->branches) {
    REQUIRE(br.script.size() == 1);
    CHECK(validate(br.W).empty());
    if (br.script[0].insert) {
      ++inserts;
      CHECK(br.W.rho == 5);
      CHECK(br.properness.kind == Properness::Isomorphism);
    } else {
      ++ties;
      CHECK(br.script[0].q == 4);
      CHECK(br.W.rho == 4);
      // h1 = h3 does not follow from h1 h2 = h3 h4, so the tie is proper
      CHECK(br.properness.kind == Properness::Proper);
    }
    CHECK(br.W.conns.size() == 1);
  }
  CHECK(ties == 1);
  CHECK(inserts == 2);

  // equal halves pick the tie branch
  GESolution H1 = sol(G, {"a", "b", "a", "b"});
  auto tr1 = transport(G, *out, H1);
  REQUIRE(tr1.has_value());
  CHECK_FALSE(out->branches[tr1->first].script[0].insert);
  CHECK(tr1->second.val == H1.val);

  // unequal halves split the dual item
  GESolution H2 = sol(G, {"ab", "a", "a", "ba"});
  auto tr2 = transport(G, *out, H2);
  REQUIRE(tr2.has_value());
  const Branch& ibr = out->branches[tr2->first];
  CHECK(ibr.script[0].insert);
  CHECK(ibr.script[0].q == 4);
  REQUIRE(tr2->second.val.size() == 6);
  CHECK(tr2->second.val[4] == w(G, "b"));
  CHECK(tr2->second.val[5] == w(G, "a"));
  CHECK(check_solution(G, ibr.W, tr2->second));
  GESolution lift = transport_solution(G, ibr.theta, tr2->second);
  CHECK(lift.val == H2.val);

  // every solution lands in exactly one branch; transport errors otherwise
  for (const GESolution& H : sols(G, W, 2)) CHECK(transport(G, *out, H).has_value());
  check_lifts(G, *out, 2);

  // when the halves are forced equal the tie adds nothing provable
  GenEq W2 = W;
  add_pair(W2, 1, 2, 3, 4);
  auto out2 = apply_et(G, W2, 5, ETArgs{0, -1, 2, 0});
  REQUIRE(out2.has_value());
  for (const Branch& br : out2->branches)
    if (!br.script[0].insert) {
      CHECK(br.properness.kind == Properness::Uncertified);
      CHECK(br.properness.bound == 2);
    }

  std::string err;
  GenEq W3 = W;
  W3.conns.push_back(Conn{2, 0, 4});
  CHECK_FALSE(apply_et(G, W3, 5, ETArgs{0, -1, 2, 0}, {}, &err).has_value());
  CHECK(err.find("already tied") != std::string::npos);
}

TEST_CASE("closing a section cuts every crossing base") {
  FreeProduct G = z2z3();
  GenEq W = ge(5);
  W.sections.clear();
  W.sections.push_back(Section{1, 3, SectionClass::Variable, true});
  W.sections.push_back(Section{3, 6, SectionClass::Variable, true});
  add_pair(W, 2, 4, 4, 6);
  REQUIRE(validate(W).empty());

  auto out = apply_derived(G, W, 1, DArgs{0, -1, -1, -1});
  REQUIRE(out.has_value());
  CHECK(out->branches.size() == 3);
  for (const Branch& br : out->branches) {
    CHECK(validate(br.W).empty());
    // no base crosses the section's endpoints any more
    const Section& s = br.W.sections[0];
    CHECK_FALSE(boundary_open(br.W, s.lo));
    CHECK_FALSE(boundary_open(br.W, s.hi));
  }

  GESolution H = sol(G, {"c", "a", "b", "a", "b"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  const Branch& br = out->branches[tr->first];
  REQUIRE(br.script.size() == 2);
  CHECK(br.script[0].kind == ETStep::TieBoundary);
  CHECK_FALSE(br.script[0].insert);
  CHECK(br.script[0].q == 5);
  CHECK(br.script[1].kind == ETStep::CutBase);
  CHECK(tr->second.val == H.val);
  check_lifts(G, *out, 1);
}

TEST_CASE("moving a closed section is reversible") {
  FreeProduct G = z2z3();
  GenEq W = ge(4);
  W.sections.clear();
  W.sections.push_back(Section{1, 3, SectionClass::Variable, true});
  W.sections.push_back(Section{3, 5, SectionClass::Variable, true});
  add_pair(W, 1, 3, 1, 3); // matched pairs keep the inner boundaries open
  add_pair(W, 3, 5, 3, 5);
  REQUIRE(validate(W).empty());
  REQUIRE(section_closed(W, 1, 3));

  auto out = apply_derived(G, W, 2, DArgs{0, 1, -1, -1});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.properness.kind == Properness::Isomorphism);
  CHECK(validate(br.W).empty());
  CHECK(br.W.bases[0].alpha == 3); // the moved pair now sits at the back
  CHECK(br.W.bases[2].alpha == 1);
  CHECK(br.theta.img[1] == SymWord{var_sym(3, +1)});
  CHECK(br.theta.img[3] == SymWord{var_sym(1, +1)});

  CHECK(sols(G, W, 2).size() == sols(G, br.W, 2).size());

  GESolution H = sol(G, {"a", "b", "b", "a"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->second.val[1] == w(G, "b"));
  CHECK(tr->second.val[3] == w(G, "a"));

  // moving it back restores the original equation
  auto back = apply_derived(G, br.W, 2, DArgs{1, -1, -1, -1});
  REQUIRE(back.has_value());
  CHECK(structurally_equal(back->branches[0].W, W));
  CHECK(canonical_json(back->branches[0].W) == canonical_json(W));

  std::string err;
  GenEq W2 = ge(4);
  W2.sections.clear();
  W2.sections.push_back(Section{1, 3, SectionClass::Variable, true});
  W2.sections.push_back(Section{3, 5, SectionClass::Variable, true});
  add_pair(W2, 2, 4, 1, 2); // crosses the seam
  CHECK_FALSE(apply_derived(G, W2, 2, DArgs{0, 1, -1, -1}, {}, &err).has_value());
  CHECK(err.find("not closed") != std::string::npos);
}

TEST_CASE("completing the cut removes every connection") {
  FreeProduct G = z2z3();
  GenEq W = ge(6);
  add_pair(W, 1, 4, 4, 7);
  W.conns.push_back(Conn{2, 0, 5});
  W.conns.push_back(Conn{6, 1, 3}); // same tie as (3, base 0, 6)
  // terms pin both interior seams on each side
  W.tterm[2] = 1;
  W.iterm[2] = 2;
  W.tterm[3] = 2;
  W.iterm[3] = 1;
  W.tterm[5] = 1;
  W.iterm[5] = 2;
  W.tterm[6] = 2;
  W.iterm[6] = 1;
  REQUIRE(validate(W).empty());

  auto out = apply_derived(G, W, 3, DArgs{});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.W.conns.empty());
  CHECK(br.W.bases.size() == 6);
  CHECK(br.script.size() == 2);
  CHECK(br.properness.kind == Properness::Isomorphism);
  CHECK(validate(br.W).empty());

  auto before = sol_keys(G, sols(G, W, 2));
  auto after = sol_keys(G, sols(G, br.W, 2));
  CHECK(before.size() == 18);
  CHECK(before == after);

  GESolution H = sol(G, {"a", "b", "a", "a", "b", "a"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->second.val == H.val);
  check_lifts(G, *out, 1);
}

TEST_CASE("entire transformation advances the carrier") {
  FreeProduct G = z2z3();
  GenEq W = ge(4);
  add_pair(W, 1, 2, 2, 3); // h1 = h2
  add_pair(W, 3, 4, 4, 5); // h3 = h4
  add_pair(W, 1, 3, 3, 5); // h1 h2 = h3 h4, the carrier
  add_pair(W, 1, 2, 4, 5); // h1 = h4
  REQUIRE(validate(W).empty());
  for (int i = 1; i <= 4; ++i) CHECK(gamma(W, i) >= 2);

  auto out = apply_derived(G, W, 5, DArgs{});
  REQUIRE(out.has_value());
  CHECK(out->branches.size() == 3);

  int main_branch = -1;
  for (int i = 0; i < (int)out->branches.size(); ++i) {
    CHECK(validate(out->branches[i].W).empty());
    if (out->branches[i].W.rho == 2) {
      CHECK(main_branch == -1);
      main_branch = i;
    }
  }
  REQUIRE(main_branch >= 0);
  const Branch& br = out->branches[main_branch];
  CHECK(br.W.bases.size() == 6); // three pairs asserting h1 = h2

  auto before = sols(G, W, 2);
  CHECK(before.size() == 4); // (w,w,w,w) with w of mixed type
  for (const GESolution& H : before) {
    auto tr = transport(G, *out, H);
    REQUIRE(tr.has_value());
    CHECK(tr->first == main_branch);
    CHECK(tr->second.val[1] == H.val[1]);
    CHECK(tr->second.val[2] == H.val[2]);
    CHECK(tr->second.length() < H.length());
    CHECK(excess(W, H) == excess(br.W, tr->second));
    CHECK(excess(W, H) == 4);
    GESolution lift = transport_solution(G, br.theta, tr->second);
    CHECK(lift.val == H.val);
  }
  check_lifts(G, *out, 2);

  // deterministic replay
  auto again = apply_derived(G, W, 5, DArgs{});
  REQUIRE(again.has_value());
  REQUIRE(again->branches.size() == out->branches.size());
  for (size_t i = 0; i < out->branches.size(); ++i)
    CHECK(canonical_json(again->branches[i].W) == canonical_json(out->branches[i].W));

  std::string err;
  GenEq W2 = ge(2);
  add_pair(W2, 1, 2, 2, 3);
  CHECK_FALSE(apply_derived(G, W2, 5, DArgs{}, {}, &err).has_value());
  CHECK(err.find("covered fewer than twice") != std::string::npos);
}

TEST_CASE("identifying constant sections") {
  FreeProduct G = z2z3();
  GenEq W = ge(2);
  W.sections.clear();
  W.sections.push_back(Section{1, 2, SectionClass::G2, true});
  W.sections.push_back(Section{2, 3, SectionClass::G2, true});
  W.bases.push_back(constant_base(1, w(G, "b").ls[0]));
  W.bases.push_back(constant_base(2, w(G, "c").ls[0]));
  REQUIRE(validate(W).empty());

  auto out = apply_derived(G, W, 6, DArgs{-1, -1, 0, 1});
  REQUIRE(out.has_value());
  REQUIRE(out->branches.size() == 1);
  const Branch& br = out->branches[0];
  CHECK(br.properness.kind == Properness::Isomorphism);
  CHECK(br.W.rho == 1);
  REQUIRE(br.W.bases.size() == 2);
  for (const Base& b : br.W.bases) {
    CHECK(b.kind == BaseKind::Constant);
    CHECK(b.alpha == 1);
    CHECK(b.label == w(G, "c").ls[0]); // b^-1 = c
  }
  CHECK(validate(br.W).empty());

  CHECK(sols(G, W, 3).size() == 1);
  CHECK(sols(G, br.W, 3).size() == 1);

  GESolution H = sol(G, {"b", "c"});
  auto tr = transport(G, *out, H);
  REQUIRE(tr.has_value());
  CHECK(tr->second.val[1] == w(G, "c"));
  GESolution lift = transport_solution(G, br.theta, tr->second);
  CHECK(lift.val == H.val);
  check_lifts(G, *out, 3);

  std::string err;
  GenEq W2 = W;
  W2.bases[1] = constant_base(2, w(G, "a").ls[0]);
  CHECK_FALSE(apply_derived(G, W2, 6, DArgs{-1, -1, 0, 1}, {}, &err).has_value());
  CHECK(err.find("neither equal nor inverse") != std::string::npos);
}

TEST_CASE("kernel removes eliminable pairs") {
  FreeProduct G = z2z3();
  GenEq W = ge(4);
  add_pair(W, 1, 2, 3, 4);
  add_pair(W, 2, 3, 4, 5);
  REQUIRE(validate(W).empty());

  auto k1 = kernel(W, ElimOrder::First);
  auto k2 = kernel(W, ElimOrder::Last);
  REQUIRE(k1.has_value());
  REQUIRE(k2.has_value());
  CHECK(k1->eliminations == 2);
  CHECK(k1->kernel.bases.empty());
  CHECK(k1->free_rank_delta == 2);
  CHECK(structurally_equal(k1->kernel, k2->kernel)); // order independent
  CHECK(k2->eliminations == 2);

  // the two pairs pin h3, h4 to h1, h2; the kernel leaves all four free
  size_t n = words_up_to(G, 2).size() - 1;
  CHECK(sols(G, W, 2).size() == n * n);
  CHECK(sols(G, k1->kernel, 2).size() == n * n * n * n);

  // a constant base is never eliminable
  GenEq W2 = ge(2);
  W2.bases.push_back(constant_base(1, w(G, "a").ls[0]));
  add_pair(W2, 1, 2, 2, 3);
  auto k3 = kernel(W2);
  REQUIRE(k3.has_value());
  CHECK(k3->eliminations == 1);
  REQUIRE(k3->kernel.bases.size() == 1);
  CHECK(k3->kernel.bases[0].kind == BaseKind::Constant);
  CHECK(k3->free_rank_delta == 0);
  CHECK(sols(G, W2, 2).size() == 1);
  CHECK(sols(G, k3->kernel, 2).size() == n);

  std::string err;
  GenEq W3 = cut_fixture();
  CHECK_FALSE(kernel(W3, ElimOrder::First, &err).has_value());
  CHECK(err.find("complete the cut") != std::string::npos);
}

TEST_CASE("step rendering") {
  ETStep s;
  s.kind = ETStep::CutBase;
  s.base = 0;
  s.p = 2;
  s.q = 4;
  CHECK(show_step(s).find("cut") != std::string::npos);
  s.kind = ETStep::TieBoundary;
  s.insert = true;
  CHECK(show_step(s).find("split") != std::string::npos);
  s.insert = false;
  CHECK(show_step(s).find("tie") != std::string::npos);
}
