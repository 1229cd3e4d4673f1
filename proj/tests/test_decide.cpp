#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include "helpers.hpp"

#include "resp/decide.hpp"
#include "resp/structure.hpp"

using namespace resp;
using resp::testing::el;
using resp::testing::rank3_pair;
using resp::testing::shift27_pair;

namespace {

// Z/n with A = B = G and phi = multiplication by m.
HnnPair mult_pair(std::int64_t p, int exponent, Coord m) {
  Group g = make_abelian(p, {exponent});
  Subgroup whole = Subgroup::whole(g);
  std::int64_t mod = 1;
  for (int i = 0; i < exponent; ++i) mod *= p;
  std::vector<Element> images;
  for (const Element& e : whole.elements())
    images.push_back(el({static_cast<Coord>((m * e[0]) % mod)}));
  GroupMap phi = GroupMap::from_table(whole, whole, images, /*validate=*/true);
  return make_pair(g, whole, whole, phi);
}

// A = B = {1} over an arbitrary group.
HnnPair trivial_pair(const Group& g) {
  Subgroup t = Subgroup::trivial(g);
  return make_pair(g, t, t, GroupMap::identity_on(t));
}

std::vector<std::vector<Element>> term_lists(const Filtration& f) {
  std::vector<std::vector<Element>> out;
  for (const Subgroup& t : f.terms) out.push_back(t.elements());
  return out;
}

}  // namespace

TEST_CASE("decide_chief on cyclic groups") {
  SUBCASE("identity on Z/3 is residually 3") {
    HnnPair pair = mult_pair(3, 1, 1);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    CHECK(d.chief->filtration.terms.size() == 2);
    CHECK(d.chief->filtration.terms[0].order() == 3);
    CHECK(d.chief->filtration.terms[1].order() == 1);
    std::string why;
    CHECK(check_chief_certificate(pair, *d.chief, &why));
  }
  SUBCASE("multiplication by 2 on Z/3 is not residually 3") {
    Decision d = decide_chief(mult_pair(3, 1, 2));
    CHECK(d.verdict == Verdict::NotResiduallyP);
    CHECK_FALSE(d.chief.has_value());
    CHECK(d.transcript["exhausted"] == true);
    // The only order-3 central subgroup is G itself, rejected once.
    CHECK(d.stats.candidates == 1);
  }
  SUBCASE("multiplication by 3 on Z/4 is residually 2") {
    HnnPair pair = mult_pair(2, 2, 3);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    // Unique chief chain Z/4 > 2Z/4 > 1.
    REQUIRE(d.chief->filtration.terms.size() == 3);
    CHECK(d.chief->filtration.terms[1].elements() ==
          std::vector<Element>{el({0}), el({2})});
    CHECK(check_chief_certificate(pair, *d.chief));
  }
  SUBCASE("multiplication by 2 on Z/9 is not residually 3") {
    Decision d = decide_chief(mult_pair(3, 2, 2));
    CHECK(d.verdict == Verdict::NotResiduallyP);
  }
  SUBCASE("multiplication by 4 on Z/9 is residually 3") {
    // 4 = 1 + 3 is congruent to 1 mod 3; its order mod 9 is 3.
    HnnPair pair = mult_pair(3, 2, 4);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    CHECK(check_chief_certificate(pair, *d.chief));
  }
}

TEST_CASE("decide_chief with trivial associated subgroups is always YES") {
  // Conditions are vacuous: any chief filtration of the ambient group works.
  SUBCASE("on the dihedral group of order 8") {
    Group d4 = make_group_ring_semidirect(2, 1);
    HnnPair pair = trivial_pair(d4);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    REQUIRE(d.chief->filtration.terms.size() == 4);
    CHECK(d.chief->filtration.terms[0].order() == 8);
    CHECK(d.chief->filtration.terms[1].order() == 4);
    CHECK(d.chief->filtration.terms[2].order() == 2);
    // The unique minimal central subgroup of D4 is its center.
    CHECK(d.chief->filtration.terms[2].elements() ==
          std::vector<Element>{el({0, 0, 0}), el({0, 1, 1})});
    CHECK(check_chief_certificate(pair, *d.chief));
    // Layer witnesses exist and are all-identity residues.
    for (const LayerWitness& w : d.chief->layers) {
      CHECK(w.a_elements == std::vector<Element>{d4.identity()});
      CHECK(w.residues == std::vector<Element>{d4.identity()});
    }
  }
  SUBCASE("on the nonabelian order-27 group") {
    HnnPair base = shift27_pair();
    Decision d = decide_chief(trivial_pair(base.G));
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    CHECK(d.chief->filtration.terms.size() == 4);
  }
}

TEST_CASE("decide_chief on the rank-3 abelian pairs") {
  SUBCASE("invariant line acted on trivially: YES") {
    HnnPair pair = rank3_pair(1, 0, 1);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    CHECK(d.chief->filtration.terms.size() == 4);
    CHECK(check_chief_certificate(pair, *d.chief));
  }
  SUBCASE("invariant line acted on by inversion: NO") {
    Decision d = decide_chief(rank3_pair(2, 0, 1));
    CHECK(d.verdict == Verdict::NotResiduallyP);
  }
  SUBCASE("dying line: YES") {
    HnnPair pair = rank3_pair(1, 1, 1);
    Decision d = decide_chief(pair);
    CHECK(d.verdict == Verdict::ResiduallyP);
    REQUIRE(d.chief.has_value());
    CHECK(check_chief_certificate(pair, *d.chief));
  }
}

TEST_CASE("decide_chief on the nonabelian order-27 pair: NO") {
  Decision d = decide_chief(shift27_pair());
  CHECK(d.verdict == Verdict::NotResiduallyP);
  CHECK(d.transcript["exhausted"] == true);
}

TEST_CASE("memoized and non-memoized searches agree exactly") {
  auto agree = [](const HnnPair& pair) {
    DecideOptions memo_on;
    DecideOptions memo_off;
    memo_off.memoize = false;
    Decision a = decide_chief(pair, memo_on);
    Decision b = decide_chief(pair, memo_off);
    CHECK(a.verdict == b.verdict);
    CHECK(a.chief.has_value() == b.chief.has_value());
    if (a.chief && b.chief) {
      CHECK(term_lists(a.chief->filtration) == term_lists(b.chief->filtration));
      REQUIRE(a.chief->layers.size() == b.chief->layers.size());
      for (std::size_t i = 0; i < a.chief->layers.size(); ++i) {
        CHECK(a.chief->layers[i].a_elements == b.chief->layers[i].a_elements);
        CHECK(a.chief->layers[i].residues == b.chief->layers[i].residues);
      }
    }
    CHECK(b.stats.memo_hits == 0);
  };
  agree(rank3_pair(1, 0, 1));
  agree(rank3_pair(2, 0, 1));
  agree(rank3_pair(1, 1, 1));
  agree(shift27_pair());
  agree(mult_pair(2, 2, 3));
  agree(trivial_pair(make_group_ring_semidirect(2, 1)));
}

TEST_CASE("certificate re-checker rejects tampering") {
  HnnPair pair = rank3_pair(1, 0, 1);
  Decision d = decide_chief(pair);
  REQUIRE(d.chief.has_value());
  std::string why;

  SUBCASE("non-chief filtration") {
    ChiefCertificate bad;
    bad.filtration.ambient = pair.G;
    bad.filtration.terms = {Subgroup::whole(pair.G), Subgroup::trivial(pair.G)};
    CHECK_FALSE(check_chief_certificate(pair, bad, &why));
    CHECK(why == "filtration is not a chief series");
  }
  SUBCASE("incompatible filtration") {
    // Chief chain through <e2>: phi maps A ∩ <e2> = <e2> onto <e3>, which
    // meets B ∩ <e2> = {1} only in the identity.
    Group g = pair.G;
    Subgroup e2 = Subgroup::closure(g, {el({0, 1, 0})});
    Subgroup mid = Subgroup::closure(g, {el({0, 1, 0}), el({1, 0, 0})});
    ChiefCertificate bad;
    bad.filtration.ambient = g;
    bad.filtration.terms = {Subgroup::whole(g), mid, e2, Subgroup::trivial(g)};
    CHECK_FALSE(check_chief_certificate(pair, bad, &why));
    CHECK(why.find("phi(A ∩ G_i) != B ∩ G_i") == 0);
  }
  SUBCASE("congruence violation") {
    // For multiplication by 2 on Z/3, the unique chief chain is compatible
    // but phi(a)·a^-1 = a does not lie in the trivial term.
    HnnPair twist = mult_pair(3, 1, 2);
    ChiefCertificate bad;
    bad.filtration.ambient = twist.G;
    bad.filtration.terms = {Subgroup::whole(twist.G), Subgroup::trivial(twist.G)};
    CHECK_FALSE(check_chief_certificate(twist, bad, &why));
    CHECK(why.find("escapes") != std::string::npos);
  }
  SUBCASE("tampered residue") {
    ChiefCertificate bad = *d.chief;
    REQUIRE(!bad.layers.empty());
    REQUIRE(!bad.layers[0].residues.empty());
    bad.layers[0].residues[0] = el({1, 1, 1});
    CHECK_FALSE(check_chief_certificate(pair, bad, &why));
    CHECK(why.find("recorded residue differs") == 0);
  }
  SUBCASE("wrong ambient group") {
    ChiefCertificate cert = *d.chief;
    HnnPair other = mult_pair(3, 1, 1);
    CHECK_FALSE(check_chief_certificate(other, cert, &why));
  }
}

TEST_CASE("obstruction_toplevel") {
  SUBCASE("abelian pair, identity on the invariant line: no violation") {
    SearchStats stats;
    CHECK_FALSE(obstruction_toplevel(rank3_pair(1, 0, 1), &stats).has_value());
    // |A| * |B| = 9 * 9 twists, all equal to phi since G is abelian.
    CHECK(stats.twists == 81);
  }
  SUBCASE("abelian pair, inversion on the invariant line: violation") {
    SearchStats stats;
    auto v = obstruction_toplevel(rank3_pair(2, 0, 1), &stats);
    REQUIRE(v.has_value());
    // Twisting cannot change anything in an abelian group, so the first
    // scanned twist (a = b = identity) already violates.
    CHECK(stats.twists == 1);
    CHECK(v->i == 1);
    CHECK(v->j == -1);
    CHECK(v->a == el({0, 0, 0}));
    CHECK(v->b == el({0, 0, 0}));
    CHECK(v->core_order == 3);
    CHECK(v->map_order == 2);
  }
  SUBCASE("order-27 pair: no violation at the top level") {
    SearchStats stats;
    CHECK_FALSE(obstruction_toplevel(shift27_pair(), &stats).has_value());
    // All twisted cores sit inside A ∩ B = {1}.
    CHECK(stats.twists == 9);
  }
  SUBCASE("trivial associated subgroups: no violation") {
    Group d4 = make_group_ring_semidirect(2, 1);
    CHECK_FALSE(obstruction_toplevel(trivial_pair(d4)).has_value());
  }
}

TEST_CASE("compatible central filtration enumeration") {
  SUBCASE("Z/3 with identity has exactly one") {
    auto filts = compatible_central_filtrations(mult_pair(3, 1, 1));
    REQUIRE(filts.size() == 1);
    CHECK(filts[0].terms.size() == 2);
  }
  SUBCASE("order-27 pair has exactly five") {
    // G > Z > 1 plus G > M > Z > 1 for the four maximal subgroups M; the
    // lower exchange steps are blocked by [G, G] = Z(G) of order 3.
    auto filts = compatible_central_filtrations(shift27_pair());
    REQUIRE(filts.size() == 5);
    std::size_t len3 = 0, len4 = 0;
    for (const Filtration& f : filts) {
      validate_filtration(f);
      CHECK(is_central_series(f));
      if (f.terms.size() == 3) ++len3;
      if (f.terms.size() == 4) ++len4;
    }
    CHECK(len3 == 1);
    CHECK(len4 == 4);
  }
}

TEST_CASE("obstruction_full") {
  SUBCASE("identity pair on Z/3 is inconclusive") {
    Decision d = obstruction_full(mult_pair(3, 1, 1));
    CHECK(d.verdict == Verdict::Inconclusive);
    CHECK(d.passing.has_value());
    CHECK(d.stats.filtrations == 1);
  }
  SUBCASE("order-27 pair is refuted") {
    HnnPair pair = shift27_pair();
    Decision d = obstruction_full(pair);
    CHECK(d.verdict == Verdict::NotResiduallyP);
    CHECK_FALSE(d.passing.has_value());
    CHECK(d.stats.filtrations == 5);
    CHECK(d.transcript["checked"] == 5);
    // Every enumerated filtration fails somewhere.
    for (const auto& rec : d.transcript["records"])
      CHECK(rec["failing"].size() > 0);
    // The short chain G > Z > 1 fails exactly at the (1,2) subquotient,
    // already for the untwisted map: core of order 3 acted on with order 2.
    bool found_short = false;
    for (const auto& rec : d.transcript["records"]) {
      if (rec["orders"] != nlohmann::json({27, 3, 1})) continue;
      found_short = true;
      REQUIRE(rec["failing"].size() == 1);
      const auto& v = rec["failing"][0];
      CHECK(v["i"] == 1);
      CHECK(v["j"] == 2);
      CHECK(v["a"] == format_element(pair.G.identity()));
      CHECK(v["b"] == format_element(pair.G.identity()));
      CHECK(v["core_order"] == 3);
      CHECK(v["map_order"] == 2);
    }
    CHECK(found_short);
  }
}

TEST_CASE("sufficiency checks") {
  SUBCASE("trivial filtration certifies the invariant-line pair") {
    HnnPair pair = rank3_pair(1, 0, 1);
    Filtration f{pair.G, {Subgroup::whole(pair.G), Subgroup::trivial(pair.G)}};
    CHECK(sufficient_layerwise(pair, f));
    CHECK(sufficient_quotient(pair, f));
  }
  SUBCASE("trivial filtration fails for the inversion pair") {
    HnnPair pair = rank3_pair(2, 0, 1);
    Filtration f{pair.G, {Subgroup::whole(pair.G), Subgroup::trivial(pair.G)}};
    CHECK_FALSE(sufficient_layerwise(pair, f));
    CHECK_FALSE(sufficient_quotient(pair, f));
  }
  SUBCASE("lower central series fails for the order-27 pair") {
    HnnPair pair = shift27_pair();
    Filtration lcs = lower_central_series(pair.G);
    REQUIRE(lcs.terms.size() == 3);
    CHECK(is_compatible(pair, lcs));
    CHECK_FALSE(sufficient_layerwise(pair, lcs));
  }
  SUBCASE("incompatible filtration is a reported precondition failure") {
    HnnPair pair = rank3_pair(1, 0, 1);
    Group g = pair.G;
    Subgroup e2 = Subgroup::closure(g, {el({0, 1, 0})});
    Filtration f{g, {Subgroup::whole(g), e2, Subgroup::trivial(g)}};
    CHECK_THROWS_AS(sufficient_layerwise(pair, f), Error);
    CHECK_THROWS_AS(sufficient_quotient(pair, f), Error);
  }
  SUBCASE("non-central filtration is a reported precondition failure") {
    HnnPair pair = shift27_pair();
    Subgroup z = center(pair.G);
    Subgroup mid = subgroup_product(pair.A, z);
    REQUIRE(mid.order() == 9);
    Filtration f{pair.G, {Subgroup::whole(pair.G), mid, Subgroup::trivial(pair.G)}};
    CHECK_THROWS_AS(sufficient_layerwise(pair, f), Error);
  }
}

TEST_CASE("consistency sandwich on the worked pairs") {
  // sufficient_layerwise true => decide_chief YES.
  {
    HnnPair pair = rank3_pair(1, 0, 1);
    Filtration f{pair.G, {Subgroup::whole(pair.G), Subgroup::trivial(pair.G)}};
    REQUIRE(sufficient_layerwise(pair, f));
    CHECK(decide_chief(pair).verdict == Verdict::ResiduallyP);
  }
  // obstruction_toplevel violation => decide_chief NO.
  {
    HnnPair pair = rank3_pair(2, 0, 1);
    REQUIRE(obstruction_toplevel(pair).has_value());
    CHECK(decide_chief(pair).verdict == Verdict::NotResiduallyP);
  }
  // obstruction_full refutation => decide_chief NO.
  {
    HnnPair pair = shift27_pair();
    REQUIRE(obstruction_full(pair).verdict == Verdict::NotResiduallyP);
    CHECK(decide_chief(pair).verdict == Verdict::NotResiduallyP);
  }
}

TEST_CASE("decide_chief cap handling") {
  HnnPair pair = rank3_pair(1, 0, 1);
  DecideOptions tight;
  tight.cap = 9;
  CHECK_THROWS_AS(decide_chief(pair, tight), Error);
}
