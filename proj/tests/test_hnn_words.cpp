#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include "helpers.hpp"

#include "resp/hnn.hpp"
#include "resp/words.hpp"

using namespace resp;
using resp::testing::el;
using resp::testing::rank3_pair;
using resp::testing::shift27_pair;

TEST_CASE("pair validation") {
  Group g = make_abelian(3, {1, 1, 1});
  Subgroup a = Subgroup::closure(g, {el({1, 0, 0})});
  Subgroup b = Subgroup::closure(g, {el({0, 1, 0})});
  Subgroup big = Subgroup::closure(g, {el({1, 0, 0}), el({0, 1, 0})});
  GroupMap ok = GroupMap::from_pairs(
      a, b,
      {{el({0, 0, 0}), el({0, 0, 0})},
       {el({1, 0, 0}), el({0, 1, 0})},
       {el({2, 0, 0}), el({0, 2, 0})}},
      false);
  CHECK_NOTHROW(make_pair(g, a, b, ok));
  // Non-injective table.
  GroupMap bad = GroupMap::from_pairs(
      a, b,
      {{el({0, 0, 0}), el({0, 0, 0})},
       {el({1, 0, 0}), el({0, 1, 0})},
       {el({2, 0, 0}), el({0, 1, 0})}},
      false);
  CHECK_THROWS_AS(make_pair(g, a, b, bad), Error);
  // Size mismatch.
  CHECK_THROWS_AS(make_pair(g, big, b, ok), Error);
}

TEST_CASE("core of abelian rank-3 pairs") {
  SUBCASE("invariant line: x=1, y=0, z=1") {
    HnnPair pair = rank3_pair(1, 0, 1);
    Core c = compute_core(pair);
    CHECK(c.H.order() == 3);
    CHECK(c.H.contains(el({1, 0, 0})));
    CHECK(c.fix_index == 0);
    CHECK(c.orbit_bound == 2);
    CHECK(core_automorphism_order(c) == 1);
  }
  SUBCASE("shifted line: x=1, y=1, z=1 kills the core") {
    HnnPair pair = rank3_pair(1, 1, 1);
    Core c = compute_core(pair);
    CHECK(c.H.order() == 1);
    CHECK(c.fix_index == 1);
    CHECK(c.orbit_bound == 3);
    CHECK(core_automorphism_order(c) == 1);
  }
  SUBCASE("scaled line: x=2, y=0, z=1") {
    HnnPair pair = rank3_pair(2, 0, 1);
    Core c = compute_core(pair);
    CHECK(c.H.order() == 3);
    // phi multiplies the core line by 2, which has order 2 (not a 3-power).
    CHECK(core_automorphism_order(c) == 2);
  }
}

TEST_CASE("core of the order-27 nonabelian pair") {
  HnnPair pair = shift27_pair();
  Core c = compute_core(pair);
  CHECK(c.H.order() == 1);
  CHECK(c.fix_index == 0);
  CHECK(c.orbit_bound == 2);
  Core fix = core_fixpoint(pair);
  CHECK(fix.H.same_set(c.H));
  CHECK(fix.orbit_bound == -1);
}

TEST_CASE("automorphism pairs have full core") {
  Group d4 = make_group_ring_semidirect(2, 1);
  GroupMap ct = GroupMap::conjugation(Subgroup::whole(d4), el({1, 0, 0}));
  HnnPair pair = make_auto_pair(d4, ct);
  Core c = compute_core(pair);
  CHECK(c.H.order() == 8);
  CHECK(c.orbit_bound == 0);
  CHECK(core_automorphism_order(c) == 2);
}

TEST_CASE("twisted pairs") {
  HnnPair pair = shift27_pair();
  Element a = el({1, 0, 2, 2});
  Element b = el({1, 0, 0, 1});
  HnnPair tw = twisted_pair(pair, a, b);
  // psi(x) = b^-1 phi(a^-1 x a) b; on x = a the inner twist is trivial.
  CHECK(tw.phi.apply(a) == pair.G.conjugate(pair.phi.apply(a), b));
  CHECK(tw.A.same_set(pair.A));
  CHECK(tw.B.same_set(pair.B));
  CHECK(tw.phi.is_multiplicative());  // composite of isos stays an iso here
  CHECK_THROWS_AS(twisted_pair(pair, b, b), Error);  // b is not in A
  // Twisting an abelian pair changes nothing.
  HnnPair ab = rank3_pair(1, 1, 1);
  HnnPair abtw = twisted_pair(ab, el({1, 1, 0}), el({1, 0, 1}));
  for (const Element& e : ab.A.elements())
    CHECK(abtw.phi.apply(e) == ab.phi.apply(e));
}

TEST_CASE("induced pairs on quotients") {
  HnnPair pair = rank3_pair(1, 1, 1);
  Subgroup n = Subgroup::closure(pair.G, {el({0, 1, 0}), el({0, 0, 1})});
  InducedPair ind = induced_pair(pair, n);
  CHECK(ind.pair.G.order() == 3);
  CHECK(ind.pair.A.order() == 3);
  CHECK(ind.pair.B.order() == 3);
  Core c = compute_core(ind.pair);
  CHECK(c.H.order() == 3);  // induced map is multiplication by x = 1
  CHECK(core_automorphism_order(c) == 1);
  // N = <e2> fails the compatibility condition phi(A ∩ N) = B ∩ N.
  Subgroup bad = Subgroup::closure(pair.G, {el({0, 1, 0})});
  CHECK_THROWS_AS(induced_pair(pair, bad), Error);
}

TEST_CASE("layer pairs of a compatible filtration") {
  HnnPair pair = rank3_pair(1, 0, 1);
  Filtration f;
  f.ambient = pair.G;
  f.terms = {Subgroup::whole(pair.G),
             Subgroup::closure(pair.G, {el({1, 0, 0})}),
             Subgroup::trivial(pair.G)};
  validate_filtration(f);
  InducedPair top = induced_layer_pair(pair, f, 0, 1);
  CHECK(top.pair.G.order() == 9);
  CHECK(compute_core(top.pair).H.order() == 1);
  InducedPair bottom = induced_layer_pair(pair, f, 1, 2);
  CHECK(bottom.pair.G.order() == 3);
  CHECK(compute_core(bottom.pair).H.order() == 3);
  // The non-compatible chain through <e3> is rejected.
  Filtration g;
  g.ambient = pair.G;
  g.terms = {Subgroup::whole(pair.G),
             Subgroup::closure(pair.G, {el({0, 0, 1})}),
             Subgroup::trivial(pair.G)};
  CHECK_THROWS_AS(induced_layer_pair(pair, g, 0, 1), Error);
}

TEST_CASE("semidirect wrap realizes an automorphism by conjugation") {
  Group d4 = make_group_ring_semidirect(2, 1);
  GroupMap ct = GroupMap::conjugation(Subgroup::whole(d4), el({1, 0, 0}));
  Wrap w = semidirect_wrap(d4, ct);
  CHECK(w.Y.order() == 16);
  CHECK(w.y == el({1, 0, 0, 0}));
  CHECK(w.include.apply(el({0, 1, 0})) == el({0, 0, 1, 0}));
  HnnPair pair = make_auto_pair(d4, ct);
  EmbeddingCheck ok = embedding_into_conjugation(w.include, pair, w.Y, w.y);
  CHECK(ok.ok);
  EmbeddingCheck bad =
      embedding_into_conjugation(w.include, pair, w.Y, w.Y.identity());
  CHECK_FALSE(bad.ok);
  CHECK(bad.failure.find("conjugation") != std::string::npos);
  // An automorphism of non-p-power order cannot be wrapped.
  Group z9 = make_abelian(3, {2});
  GroupMap m2 = GroupMap::from_generator_images(z9, {el({1})}, z9, {el({2})});
  CHECK_THROWS_AS(semidirect_wrap(z9, m2), Error);
}

TEST_CASE("britton reduction basics") {
  HnnPair pair = rank3_pair(1, 0, 1);
  // t^-1 e2 t pinches to phi(e2) = e3.
  Word w = {Letter::stable(-1), Letter::group(el({0, 1, 0})), Letter::stable(1)};
  Word r = britton_reduce(pair, w);
  REQUIRE(r.size() == 1);
  CHECK(r[0].g == el({0, 0, 1}));
  // t e2 t^-1 is stuck (e2 is not in B).
  Word s = {Letter::stable(1), Letter::group(el({0, 1, 0})), Letter::stable(-1)};
  CHECK(britton_reduce(pair, s).size() == 3);
  CHECK(is_britton_reduced(pair, s));
  CHECK_FALSE(is_britton_reduced(pair, w));
  // t t^-1 with nothing between collapses to the empty word.
  Word tt = {Letter::stable(1), Letter::stable(-1)};
  CHECK(britton_reduce(pair, tt).empty());
  CHECK(reduces_to_group_letter(pair, tt));
  // Normalization merges adjacent group letters.
  Word m = {Letter::group(el({1, 0, 0})), Letter::group(el({2, 0, 0})),
            Letter::stable(1)};
  Word nm = normalize_word(pair, m);
  REQUIRE(nm.size() == 1);
  CHECK(nm[0].t == 1);
  CHECK(format_word(nm) == "t");
}

TEST_CASE("britton membership probes match the core") {
  SUBCASE("surviving line") {
    HnnPair pair = rank3_pair(1, 0, 1);
    Subgroup probe = core_britton_oracle(pair, 2);
    CHECK(probe.same_set(compute_core(pair).H));
  }
  SUBCASE("dying line") {
    HnnPair pair = rank3_pair(1, 1, 1);
    // At bound 1 every element of A ∩ B still looks good.
    CHECK(core_britton_oracle(pair, 1).order() == 3);
    // At bound 2 (= fixpoint index + 1) the probe finds the true core.
    Subgroup probe = core_britton_oracle(pair, 2);
    CHECK(probe.order() == 1);
    CHECK(probe.same_set(compute_core(pair).H));
  }
  SUBCASE("nonabelian pair") {
    HnnPair pair = shift27_pair();
    CHECK(core_britton_oracle(pair, 2).same_set(compute_core(pair).H));
  }
}

TEST_CASE("britton reduction against the twisted-extension fold") {
  // For an automorphism pair the extension is G ⋊ Z; every word equals
  // t^k g for a fold-computable k and g.  Reduction must preserve the fold
  // and reduce exactly the k = 0 words to group letters.
  Group d4 = make_group_ring_semidirect(2, 1);
  GroupMap ct = GroupMap::conjugation(Subgroup::whole(d4), el({1, 0, 0}));
  HnnPair pair = make_auto_pair(d4, ct);
  Wrap wr = semidirect_wrap(d4, ct);

  auto fold = [&](const Word& w) {
    int k = 0;
    Element acc = d4.identity();
    for (const Letter& l : w) {
      if (l.t == 0) {
        acc = d4.mul(acc, l.g);
      } else {
        k += l.t;
        acc = l.t == 1 ? pair.phi.apply(acc) : pair.phi_inv.apply(acc);
      }
    }
    return std::make_pair(k, acc);
  };

  std::mt19937 rng(20260814);
  std::vector<Element> delems = d4.elements();
  for (int trial = 0; trial < 200; ++trial) {
    Word w;
    int len = static_cast<int>(rng() % 9);
    for (int i = 0; i < len; ++i) {
      switch (rng() % 3) {
        case 0: w.push_back(Letter::stable(1)); break;
        case 1: w.push_back(Letter::stable(-1)); break;
        default: w.push_back(Letter::group(delems[rng() % delems.size()]));
      }
    }
    Word r = britton_reduce(pair, w);
    CHECK(is_britton_reduced(pair, r));
    auto [k0, g0] = fold(w);
    auto [k1, g1] = fold(r);
    CHECK(k0 == k1);
    CHECK(g0 == g1);
    CHECK(reduces_to_group_letter(pair, w) == (k0 == 0));
    // The evaluation homomorphism into the wrap respects the fold.
    Element val = evaluate_word(wr.include, wr.Y, wr.y, w);
    Element expect = wr.Y.mul(wr.Y.power(wr.y, k0), wr.include.apply(g0));
    CHECK(val == expect);
  }
}
