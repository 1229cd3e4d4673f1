#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "helpers.hpp"
#include "resp/abelian.hpp"
#include "resp/random_pairs.hpp"
#include "resp/structure.hpp"

using namespace resp;
using resp::testing::el;

namespace {

// G = F_3^2 with A = B = <e1> and phi = multiplication by x on the line.
HnnPair line_pair(Coord x) {
  Group g = make_abelian(3, {1, 1});
  Subgroup a = Subgroup::closure(g, {el({1, 0})});
  GroupMap phi = GroupMap::from_pairs(
      a, a,
      {{g.identity(), g.identity()},
       {el({1, 0}), el({x, 0})},
       {el({2, 0}), el({static_cast<Coord>(2 * x % 3), 0})}},
      /*validate=*/true);
  return make_pair(g, a, a, phi);
}

// G = F_3^2 with A = <e1>, B = <e2> and phi(e1) = e2.
HnnPair independent_lines_pair() {
  Group g = make_abelian(3, {1, 1});
  Subgroup a = Subgroup::closure(g, {el({1, 0})});
  Subgroup b = Subgroup::closure(g, {el({0, 1})});
  GroupMap phi = GroupMap::from_pairs(a, b,
                                      {{g.identity(), g.identity()},
                                       {el({1, 0}), el({0, 1})},
                                       {el({2, 0}), el({0, 2})}},
                                      /*validate=*/true);
  return make_pair(g, a, b, phi);
}

// G = Z/9 with A = B = <3> and phi = multiplication by x on the subgroup.
HnnPair nine_pair(Coord x) {
  Group g = make_abelian(3, {2});
  Subgroup a = Subgroup::closure(g, {el({3})});
  GroupMap phi = GroupMap::from_pairs(
      a, a,
      {{g.identity(), g.identity()},
       {el({3}), el({static_cast<Coord>(3 * x % 9)})},
       {el({6}), el({static_cast<Coord>(6 * x % 9)})}},
      /*validate=*/true);
  return make_pair(g, a, a, phi);
}

}  // namespace

TEST_CASE("decide_abelian: scaling on a shared line") {
  Decision yes = decide_abelian(line_pair(1));
  CHECK(yes.verdict == Verdict::ResiduallyP);
  CHECK(yes.method == "decide_abelian");
  CHECK(yes.transcript.at("core_order").get<std::uint64_t>() == 3);
  CHECK(yes.transcript.at("phi_order").get<std::uint64_t>() == 1);
  CHECK_FALSE(yes.violation.has_value());

  Decision no = decide_abelian(line_pair(2));
  CHECK(no.verdict == Verdict::NotResiduallyP);
  REQUIRE(no.violation.has_value());
  CHECK(no.violation->i == 1);
  CHECK(no.violation->j == -1);
  CHECK(no.violation->a == el({0, 0}));
  CHECK(no.violation->b == el({0, 0}));
  CHECK(no.violation->core_order == 3);
  CHECK(no.violation->map_order == 2);
}

TEST_CASE("decide_abelian matches the chief search on the rank-3 family") {
  for (Coord x : {1, 2})
    for (Coord y : {0, 1, 2})
      for (Coord z : {1, 2}) {
        HnnPair pair = resp::testing::rank3_pair(x, y, z);
        Decision fast = decide_abelian(pair);
        Decision slow = decide_chief(pair);
        CAPTURE(x);
        CAPTURE(y);
        CAPTURE(z);
        CHECK(fast.verdict == slow.verdict);
        // The line <e1> is carried to itself exactly when y = 0, and then
        // phi scales it by x; any other case has trivial core.
        bool expect_yes = (y != 0) || (x == 1);
        CHECK((fast.verdict == Verdict::ResiduallyP) == expect_yes);
      }
}

TEST_CASE("decide_abelian rejects a nonabelian base group") {
  CHECK_THROWS_AS(decide_abelian(resp::testing::shift27_pair()), Error);
}

TEST_CASE("elementary witness: identity on a line in the plane") {
  HnnPair pair = line_pair(1);
  ElementaryWitness w = build_witness_elementary(pair);
  CHECK(w.X.order() == 9);  // |A| * |Q|^(p-1) * |S| = 3 * 1 * 3
  CHECK(w.gamma_order == 1);
  CHECK(w.P.order() == 1);
  CHECK(w.Q.order() == 1);
  CHECK(w.S.order() == 3);
  CHECK(w.X.order() == pair.A.order() * 1 * 1 * w.S.order());

  EmbeddingCheck ec = embedding_into_automorphism(w.iota, pair, w.gamma);
  CHECK(ec.ok);
  CHECK(ec.failure.empty());

  Wrap wrap = semidirect_wrap(w.X, w.gamma);
  GroupMap alpha = wrap.include.compose(w.iota);
  EmbeddingCheck cc = embedding_into_conjugation(alpha, pair, wrap.Y, wrap.y);
  CHECK(cc.ok);
}

TEST_CASE("elementary witness: plane-to-plane shift") {
  // A = <e1, e2>, B = <e1, e3>, phi fixes e1 and sends e2 to e3.
  HnnPair pair = resp::testing::rank3_pair(1, 0, 1);
  ElementaryWitness w = build_witness_elementary(pair);
  CHECK(w.X.order() == 81);
  CHECK(w.X.width() == 4);
  CHECK(w.gamma_order == 3);
  CHECK(w.P.elements() == resp::testing::sorted({el({0, 0, 0}), el({0, 1, 0}), el({0, 2, 0})}));
  CHECK(w.Q.elements() == resp::testing::sorted({el({0, 0, 0}), el({0, 0, 1}), el({0, 0, 2})}));
  CHECK(w.S.is_trivial());
  // |X| = |A| * |Q|^(p-1) * |S|.
  CHECK(w.X.order() == 9 * 3 * 3 * 1);

  // Coordinates: A block (e1 then e2), two Q copies, no S block.  gamma
  // cycles coefficient slots 1 -> 2 -> 3 -> 1 and fixes slot 0.
  CHECK(w.iota.apply(el({1, 0, 0})) == el({1, 0, 0, 0}));
  CHECK(w.iota.apply(el({0, 1, 0})) == el({0, 1, 0, 0}));
  CHECK(w.iota.apply(el({0, 0, 1})) == el({0, 0, 1, 0}));
  CHECK(w.gamma.apply(el({1, 0, 0, 0})) == el({1, 0, 0, 0}));
  CHECK(w.gamma.apply(el({0, 1, 0, 0})) == el({0, 0, 1, 0}));
  CHECK(w.gamma.apply(el({0, 0, 1, 0})) == el({0, 0, 0, 1}));
  CHECK(w.gamma.apply(el({0, 0, 0, 1})) == el({0, 1, 0, 0}));

  CHECK(embedding_into_automorphism(w.iota, pair, w.gamma).ok);
  Wrap wrap = semidirect_wrap(w.X, w.gamma);
  CHECK(wrap.Y.order() == 81 * 3);
  GroupMap alpha = wrap.include.compose(w.iota);
  CHECK(embedding_into_conjugation(alpha, pair, wrap.Y, wrap.y).ok);
}

TEST_CASE("elementary witness rejects bad hypotheses") {
  // Order-2 action on A ∩ B.
  CHECK_THROWS_AS(build_witness_elementary(line_pair(2)), Error);
  // Exponent 9 is not elementary.
  CHECK_THROWS_AS(build_witness_elementary(nine_pair(1)), Error);
}

TEST_CASE("homocyclic hull of a mixed direct sum") {
  Group g = make_abelian(3, {1, 2});
  Subgroup a = Subgroup::closure(g, {el({1, 0})});
  GroupMap phi = GroupMap::identity_on(a);
  HnnPair pair = make_pair(g, a, a, phi);

  HomocyclicEmbedding he = homocyclic_embed(pair);
  CHECK(he.k == 2);
  CHECK(he.hull.order() == 81);
  CHECK(he.hull.width() == 2);
  CHECK(he.iota.apply(el({1, 0})) == el({3, 0}));
  CHECK(he.iota.apply(el({0, 1})) == el({0, 1}));
  CHECK(he.pair.A.order() == 3);
  CHECK(he.pair.A.contains(el({3, 0})));

  // A coordinate of modulus one is dropped from the hull.
  Group g2 = make_abelian(3, {1, 0, 2});
  Subgroup a2 = Subgroup::closure(g2, {el({1, 0, 0})});
  HnnPair pair2 = make_pair(g2, a2, a2, GroupMap::identity_on(a2));
  CHECK(homocyclic_embed(pair2).hull.width() == 2);
}

TEST_CASE("power filtration of a homocyclic hull") {
  Group g = make_abelian(3, {1, 2});
  Subgroup a = Subgroup::closure(g, {el({1, 0})});
  HnnPair pair = make_pair(g, a, a, GroupMap::identity_on(a));
  HomocyclicEmbedding he = homocyclic_embed(pair);

  PowerFiltration pf = power_filtration(he.pair, he.k);
  REQUIRE(pf.f.terms.size() == 3);
  CHECK(pf.f.terms[0].order() == 81);
  CHECK(pf.f.terms[1].order() == 9);
  CHECK(pf.f.terms[2].order() == 1);
  CHECK(pf.layers.size() == 2);
  CHECK(pf.layers[0].pair.G.order() == 9);
  CHECK(pf.layers[1].pair.G.order() == 9);
  CHECK(pf.layer_to_top.size() == 2);

  // p^j-multiples are exactly the kernel of multiplication by p^(k-j), so
  // intersecting any subgroup with a term picks out its torsion layer.
  const Group& hull = he.hull;
  std::vector<Subgroup> probes = {he.pair.A, Subgroup::closure(hull, {el({1, 1})}),
                                  Subgroup::closure(hull, {el({3, 1})}),
                                  Subgroup::closure(hull, {el({0, 3})})};
  for (const Subgroup& s : probes)
    for (std::size_t j = 0; j < pf.f.terms.size(); ++j) {
      std::vector<Element> expect;
      const std::int64_t kill = j == 0 ? 9 : (j == 1 ? 3 : 1);
      for (const Element& h : s.elements())
        if (hull.is_identity(hull.power(h, kill))) expect.push_back(h);
      CHECK(intersect(s, pf.f.terms[j]).elements() == expect);
    }
}

TEST_CASE("unipotent flag of an elementary shear") {
  Group x = make_abelian(3, {1, 1});
  std::vector<Element> units = {el({1, 0}), el({0, 1})};
  GroupMap gamma = GroupMap::from_generator_images(
      x, units, x, {el({1, 0}), el({1, 1})});
  Filtration f = unipotent_flag(x, gamma);
  REQUIRE(f.terms.size() == 3);
  CHECK(f.terms[0].order() == 9);
  CHECK(f.terms[1].elements() ==
        resp::testing::sorted({el({0, 0}), el({1, 0}), el({2, 0})}));
  CHECK(f.terms[2].is_trivial());
  CHECK(is_chief_series(f));
}

TEST_CASE("unipotent flag rejects a map of order two") {
  Group x = make_abelian(3, {1});
  GroupMap gamma =
      GroupMap::from_generator_images(x, {el({1})}, x, {el({2})});
  CHECK_THROWS_AS(unipotent_flag(x, gamma), Error);
}

TEST_CASE("unipotent flag of the witness map has length five") {
  ElementaryWitness w = build_witness_elementary(resp::testing::rank3_pair(1, 0, 1));
  Filtration f = unipotent_flag(w.X, w.gamma);
  REQUIRE(f.terms.size() == 5);
  std::uint64_t expect = 81;
  for (const Subgroup& t : f.terms) {
    CHECK(t.order() == expect);
    expect /= 3;
  }
  // Greedy kernel basis: ker(gamma - 1) = <u0, u1 + u2 + u3>.
  CHECK(f.terms[3].elements() ==
        resp::testing::sorted({el({0, 0, 0, 0}), el({1, 0, 0, 0}), el({2, 0, 0, 0})}));
  CHECK(f.terms[2].contains(el({0, 1, 1, 1})));
  CHECK(is_chief_series(f));
}

TEST_CASE("pipeline on a cyclic group of order nine") {
  HnnPair pair = nine_pair(1);
  PipelineResult pr = abelian_pipeline(pair);
  CHECK(pr.embedding.k == 2);
  CHECK(pr.embedding.hull.order() == 9);
  CHECK(pr.top_witness.X.order() == 3);
  REQUIRE(pr.certificate.filtration.terms.size() == 3);
  CHECK(pr.certificate.filtration.terms[0].order() == 9);
  CHECK(pr.certificate.filtration.terms[1].order() == 3);
  CHECK(pr.certificate.filtration.terms[2].order() == 1);
  std::string why;
  CHECK(check_chief_certificate(pr.embedding.pair, pr.certificate, &why));
  CHECK(why.empty());
}

TEST_CASE("pipeline on the plane-to-plane shift") {
  HnnPair pair = resp::testing::rank3_pair(1, 0, 1);
  PipelineResult pr = abelian_pipeline(pair);
  CHECK(pr.embedding.k == 1);
  CHECK(pr.embedding.hull.order() == 27);
  CHECK(pr.top_witness.X.order() == 81);
  REQUIRE(pr.certificate.filtration.terms.size() == 4);
  CHECK(pr.certificate.filtration.terms[0].order() == 27);
  CHECK(pr.certificate.filtration.terms[1].order() == 9);
  CHECK(pr.certificate.filtration.terms[2].order() == 3);
  std::string why;
  CHECK(check_chief_certificate(pr.embedding.pair, pr.certificate, &why));
  CHECK(why.empty());
  // The chief search agrees that a certificate exists.
  CHECK(decide_chief(pair).verdict == Verdict::ResiduallyP);
}

TEST_CASE("pipeline on a trivial group") {
  Group g = make_abelian(3, std::vector<int>{});
  Subgroup a = Subgroup::whole(g);
  HnnPair pair = make_pair(g, a, a, GroupMap::identity_on(a));
  PipelineResult pr = abelian_pipeline(pair);
  CHECK(pr.certificate.filtration.terms.size() == 1);
  CHECK(check_chief_certificate(pair, pr.certificate));
}

TEST_CASE("pipeline rejects bad hypotheses") {
  CHECK_THROWS_AS(abelian_pipeline(line_pair(2)), Error);
  CHECK_THROWS_AS(abelian_pipeline(nine_pair(2)), Error);
  CHECK_THROWS_AS(abelian_pipeline(resp::testing::shift27_pair()), Error);
}

TEST_CASE("pipeline rejects a non-invariant intersection") {
  // A ∩ B = <e1> is carried to <(1,0,1)>, which is a different line.
  CHECK_THROWS_AS(abelian_pipeline(resp::testing::rank3_pair(1, 1, 1)), Error);
}

TEST_CASE("pipeline accepts a trivially invariant intersection") {
  // A ∩ B = 0 here, so the hypothesis holds vacuously.
  HnnPair pair = independent_lines_pair();
  PipelineResult pr = abelian_pipeline(pair);
  CHECK(check_chief_certificate(pr.embedding.pair, pr.certificate));
  CHECK(decide_abelian(pair).verdict == Verdict::ResiduallyP);
}

TEST_CASE("cyclic cover of the identity line") {
  Group g = make_abelian(3, {1});
  Subgroup a = Subgroup::whole(g);
  HnnPair pair = make_pair(g, a, a, GroupMap::identity_on(a));
  CHECK(default_cover_exponent(pair) == 3);
  CyclicCover cc = cyclic_cover(pair, 3);
  CHECK(cc.s == 3);
  CHECK(cc.expected_order == 3);
  CHECK(cc.Gp.order() == 3);
  CHECK(cc.blocks.size() == 3);
  AbprimeReport rep = check_abprime(pair, cc);
  CHECK(rep.ok);
  CHECK(rep.failures.empty());
  CHECK(rep.core_order == 3);
  CHECK(rep.phi_prime_order == 1);
}

TEST_CASE("cyclic cover separates independent lines") {
  HnnPair pair = independent_lines_pair();
  CHECK(default_cover_exponent(pair) == 3);
  CyclicCover cc = cyclic_cover(pair, 3);
  // |G'| = |G| * (|G| / |A|)^(s-1) = 9 * 3^2.
  CHECK(cc.expected_order == 81);
  CHECK(cc.Gp.order() == 81);
  CHECK(cc.cover.A.order() == 3);
  CHECK(cc.cover.B.order() == 3);
  AbprimeReport rep = check_abprime(pair, cc);
  CHECK(rep.ok);
  CHECK(rep.core_order == 1);
  CHECK(rep.phi_prime_order == 1);
}

TEST_CASE("cyclic cover on the rank-3 family") {
  HnnPair pair = resp::testing::rank3_pair(2, 1, 1);
  CHECK(default_cover_exponent(pair) == 9);
  CyclicCover cc = cyclic_cover(pair, 9);
  // |G'| = 27 * (27 / 9)^8.
  CHECK(cc.expected_order == 27ull * 6561ull);
  CHECK(cc.Gp.order() == cc.expected_order);
  AbprimeReport rep = check_abprime(pair, cc);
  CHECK(rep.ok);
  CHECK(rep.failures.empty());
}

TEST_CASE("cyclic cover rejects bad degrees") {
  HnnPair pair = independent_lines_pair();
  CHECK_THROWS_AS(cyclic_cover(pair, 2), Error);   // not a power of p
  CHECK_THROWS_AS(cyclic_cover(pair, 1), Error);   // below p
  CHECK_THROWS_AS(cyclic_cover(resp::testing::rank3_pair(2, 1, 1), 3),
                  Error);  // does not clear the orbit bound
  CHECK_THROWS_AS(cyclic_cover(resp::testing::shift27_pair(), 3), Error);
}

TEST_CASE("samplers produce valid pairs with reproducible streams") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    Group g = sample_abelian_group(rng, 3, 4);
    CHECK(g.order() <= 81);
    CHECK(is_abelian(g));
  }
  for (int i = 0; i < 10; ++i)
    CHECK(sample_abelian_group(rng, 2, 4, /*elementary=*/true).order() <= 16);

  // make_pair validates phi : A -> B as an isomorphism on construction, so
  // surviving the loop is itself the check.
  for (int i = 0; i < 15; ++i) {
    Group g = sample_group(rng, 3, 81);
    HnnPair pair = sample_pair(rng, g);
    CHECK(pair.A.order() == pair.B.order());
  }
  for (int i = 0; i < 15; ++i) {
    HnnPair pair = sample_invariant_pair(rng, 3, 4, /*elementary=*/false);
    Subgroup n = intersect(pair.A, pair.B);
    CHECK(map_image(pair.phi, n).same_set(n));
    CHECK(is_power_of(automorphism_order(pair.phi.restrict(n)), 3));
  }

  // Identical seeds replay the identical pair.
  std::mt19937_64 r1(99), r2(99);
  HnnPair p1 = sample_pair(r1, make_abelian(3, {1, 1, 1}));
  HnnPair p2 = sample_pair(r2, make_abelian(3, {1, 1, 1}));
  CHECK(p1.A.elements() == p2.A.elements());
  CHECK(p1.B.elements() == p2.B.elements());
  for (const Element& a : p1.A.elements())
    CHECK(p1.phi.apply(a) == p2.phi.apply(a));
}

TEST_CASE("sampled abelian bases decompose their subgroup") {
  std::mt19937_64 rng(11);
  Group g = make_abelian(2, {3, 2, 1});
  for (int i = 0; i < 10; ++i) {
    Subgroup s = Subgroup::closure(
        g, {g.elements()[std::uniform_int_distribution<std::size_t>(
               0, g.elements().size() - 1)(rng)]});
    std::vector<Element> basis = abelian_basis(s, &rng);
    std::uint64_t prod = 1;
    for (const Element& e : basis) prod *= g.element_order(e);
    CHECK(prod == s.order());
    CHECK(Subgroup::closure(g, basis).same_set(s));
  }
}

TEST_CASE("decide_auto routes by group shape") {
  Decision viaAb = decide_auto(resp::testing::rank3_pair(1, 0, 1));
  CHECK(viaAb.method == "decide_abelian");
  CHECK(viaAb.verdict == Verdict::ResiduallyP);

  Decision viaChief = decide_auto(resp::testing::shift27_pair());
  CHECK(viaChief.method == "decide_chief");
  CHECK(viaChief.verdict == Verdict::NotResiduallyP);

  DecideOptions tight;
  tight.cap = 10;  // force the order-27 group onto the obstruction path
  Decision viaObstruct = decide_auto(resp::testing::shift27_pair(), tight);
  CHECK(viaObstruct.method == "obstruction_toplevel");
  // Every top-level twist of this pair has a core of p-power order; the
  // refutation only appears one layer down, so the scan is inconclusive.
  CHECK(viaObstruct.verdict == Verdict::Inconclusive);
  CHECK_FALSE(viaObstruct.violation.has_value());
  CHECK(viaObstruct.transcript.at("exhausted").get<bool>());
}
