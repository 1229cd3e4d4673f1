#include "resp/fixtures.hpp"

#include <algorithm>
#include <utility>

#include "resp/decide.hpp"
#include "resp/structure.hpp"

namespace resp {
namespace {

std::uint64_t scalar_order(std::int64_t x, std::int64_t p) {
  std::uint64_t o = 1;
  std::int64_t v = ((x % p) + p) % p;
  std::int64_t acc = v;
  while (acc != 1) {
    acc = acc * v % p;
    ++o;
  }
  return o;
}

std::string tuple_name(std::int64_t p, Coord x, Coord y, Coord z) {
  return "(p=" + std::to_string(p) + ",x=" + std::to_string(x) + ",y=" +
         std::to_string(y) + ",z=" + std::to_string(z) + ")";
}

}  // namespace

Fixture abelian_rank3(std::int64_t p, Coord x, Coord y, Coord z) {
  if (x % p == 0 || z % p == 0)
    throw Error("rank-3 family needs x and z nonzero mod p");
  Group g = make_abelian(p, {1, 1, 1});
  Element e1 = {1, 0, 0};
  Subgroup a = Subgroup::closure(g, {e1, {0, 1, 0}});
  Subgroup b = Subgroup::closure(g, {e1, {0, 0, 1}});
  std::vector<std::pair<Element, Element>> images;
  for (const Element& e : a.elements())
    images.emplace_back(
        e, Element{static_cast<Coord>(x * e[0] % p), 0,
                   static_cast<Coord>((y * e[0] + z * e[1]) % p)});
  GroupMap phi = GroupMap::from_pairs(a, b, images, /*validate=*/true);
  HnnPair pair = make_pair(g, a, b, std::move(phi));

  Fixture f;
  f.name = "abelian_rank3" + tuple_name(p, x, y, z);
  f.summary =
      "rank-3 elementary abelian pair: A and B are planes meeting in a line";
  f.pair = pair;

  if (y % p != 0) {
    f.facts.push_back(
        {"core-trivial",
         "y is nonzero, so the core is trivial: the orbit of the shared line "
         "leaves A",
         [pair] { return compute_core(pair).H.is_trivial(); }});
  } else {
    f.facts.push_back(
        {"core-line",
         "y vanishes, so the fixpoint chain stops at A ∩ B: the core is the "
         "shared line",
         [pair] {
           return compute_core(pair).H.same_set(intersect(pair.A, pair.B));
         }});
    const std::uint64_t xo = scalar_order(x, p);
    f.facts.push_back(
        {"core-order",
         "on the shared line the map scales by x, whose multiplicative order "
         "is " +
             std::to_string(xo),
         [pair, xo] {
           return core_automorphism_order(compute_core(pair)) == xo;
         }});
  }

  Subgroup k = Subgroup::closure(g, {{0, 1, 0}, {0, 0, 1}});
  f.facts.push_back(
      {"k-invariant",
       "K = <e2,e3> satisfies phi(A ∩ K) = B ∩ K, so the pair descends to "
       "G/K",
       [pair, k] {
         return map_image(pair.phi, intersect(pair.A, k))
             .same_set(intersect(pair.B, k));
       }});
  const std::uint64_t xo = scalar_order(x, p);
  f.facts.push_back(
      {"quotient-core-full",
       "the induced pair on G/K has core equal to the whole quotient line "
       "of order " +
           std::to_string(p),
       [pair, k, p] {
         InducedPair ip = induced_pair(pair, k);
         Core c = compute_core(ip.pair);
         return c.H.order() == static_cast<std::uint64_t>(p) &&
                c.H.same_set(Subgroup::whole(ip.pair.G));
       }});
  f.facts.push_back(
      {"quotient-action",
       "the induced map on G/K is multiplication by x (order " +
           std::to_string(xo) + ")",
       [pair, k, e1, x, xo] {
         InducedPair ip = induced_pair(pair, k);
         Element lift = ip.onto.project(e1);
         Element scaled =
             ip.onto.project(pair.G.power(e1, static_cast<std::int64_t>(x)));
         if (ip.pair.phi.apply(lift) != scaled) return false;
         return core_automorphism_order(compute_core(ip.pair)) == xo;
       }});
  return f;
}

Fixture abelian_rank4(std::int64_t p, Coord a, Coord b, Coord c) {
  if (a % p == 0) throw Error("rank-4 family needs a nonzero mod p");
  Group g = make_abelian(p, {1, 1, 1, 1});
  Subgroup sa = Subgroup::closure(g, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
  Subgroup sb = Subgroup::closure(g, {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  std::vector<std::pair<Element, Element>> images;
  for (const Element& e : sa.elements())
    images.emplace_back(
        e, Element{static_cast<Coord>(a * e[0] % p), 0,
                   static_cast<Coord>((b * e[0] + e[1]) % p),
                   static_cast<Coord>((c * e[0] + e[2]) % p)});
  GroupMap phi = GroupMap::from_pairs(sa, sb, images, /*validate=*/true);
  HnnPair pair = make_pair(g, sa, sb, std::move(phi));

  Fixture f;
  f.name = "abelian_rank4(p=" + std::to_string(p) + ",a=" + std::to_string(a) +
           ",b=" + std::to_string(b) + ",c=" + std::to_string(c) + ")";
  f.summary =
      "rank-4 elementary abelian pair whose quotient core grows while the "
      "ambient core shrinks";
  f.pair = pair;

  if (c % p != 0) {
    f.facts.push_back({"core-trivial",
                       "c is nonzero, so the ambient core is trivial",
                       [pair] { return compute_core(pair).H.is_trivial(); }});
  } else if (b % p != 0) {
    f.facts.push_back(
        {"core-trivial",
         "c vanishes but b does not: the two membership constraints on the "
         "fixpoint chain still force the core to be trivial",
         [pair] { return compute_core(pair).H.is_trivial(); }});
  } else {
    const std::uint64_t ao = scalar_order(a, p);
    f.facts.push_back(
        {"core-line",
         "b and c vanish: the fixpoint core is the line <e1>, scaled by a "
         "(order " +
             std::to_string(ao) + ")",
         [pair, ao] {
           Core core = compute_core(pair);
           Subgroup line =
               Subgroup::closure(pair.G, {Element{1, 0, 0, 0}});
           return core.H.same_set(line) && core_automorphism_order(core) == ao;
         }});
  }

  Subgroup l =
      Subgroup::closure(g, {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  f.facts.push_back(
      {"l-invariant",
       "L = <e2,e3,e4> satisfies phi(A ∩ L) = B ∩ L, so the pair descends "
       "to G/L",
       [pair, l] {
         return map_image(pair.phi, intersect(pair.A, l))
             .same_set(intersect(pair.B, l));
       }});
  f.facts.push_back(
      {"quotient-core-nontrivial",
       "the induced pair on G/L has nontrivial core (the whole line of "
       "order " +
           std::to_string(p) + "), although the ambient core may be trivial",
       [pair, l, p] {
         InducedPair ip = induced_pair(pair, l);
         return compute_core(ip.pair).H.order() == static_cast<std::uint64_t>(p);
       }});
  return f;
}

Fixture wreath() {
  const std::int64_t p = 3;
  Group g = make_group_ring_semidirect(p, 2);
  // Width 11: point part (u1, u2), then nine function coordinates indexed
  // over (Z/3)^2 with the first point coordinate fastest.
  auto a_elem = [](Coord n, Coord f0, Coord f1, Coord f2) {
    return Element{n, 0, f0, f1, f2, 0, 0, 0, 0, 0, 0};
  };
  auto b_elem = [](Coord n, Coord g0, Coord g1, Coord g2) {
    return Element{0, n, g0, 0, 0, g1, 0, 0, g2, 0, 0};
  };
  Element x_top = a_elem(1, 0, 0, 0);
  Element delta0 = a_elem(0, 1, 0, 0);
  Subgroup a = Subgroup::closure(g, {x_top, delta0});
  Subgroup b = Subgroup::closure(g, {b_elem(1, 0, 0, 0), delta0});
  // phi carries the function part to the other line, shifting the support
  // down one step and doubling.
  std::vector<std::pair<Element, Element>> images;
  for (Coord n = 0; n < 3; ++n)
    for (Coord f0 = 0; f0 < 3; ++f0)
      for (Coord f1 = 0; f1 < 3; ++f1)
        for (Coord f2 = 0; f2 < 3; ++f2)
          images.emplace_back(
              a_elem(n, f0, f1, f2),
              b_elem(n, static_cast<Coord>(2 * f1 % 3),
                     static_cast<Coord>(2 * f2 % 3),
                     static_cast<Coord>(2 * f0 % 3)));
  GroupMap phi = GroupMap::from_pairs(a, b, images, /*validate=*/true);
  HnnPair pair = make_pair(g, a, b, std::move(phi));

  Fixture f;
  f.name = "wreath";
  f.summary =
      "order-3^11 wreath-type pair: trivial core, yet an inner twist is "
      "obstructed";
  f.pair = pair;

  f.facts.push_back({"ambient-order", "the ambient group has order 3^11",
                     [g] { return g.order() == 177147; }});
  f.facts.push_back({"side-orders", "A and B both have order 81", [pair] {
                       return pair.A.order() == 81 && pair.B.order() == 81;
                     }});
  std::vector<Element> meet = {g.identity(), a_elem(0, 1, 0, 0),
                               a_elem(0, 2, 0, 0)};
  std::sort(meet.begin(), meet.end());
  f.facts.push_back(
      {"intersection",
       "A ∩ B consists of the functions supported at the identity point: "
       "three elements",
       [pair, meet] { return intersect(pair.A, pair.B).elements() == meet; }});
  f.facts.push_back(
      {"core-trivial",
       "the core of phi is trivial and the fixpoint chain stabilizes after "
       "one step",
       [pair] {
         Core c = compute_core(pair);
         return c.H.is_trivial() && c.fix_index == 1;
       }});
  f.facts.push_back(
      {"lcs-orders",
       "the lower central series has orders 3^11, 3^8, 3^6, 3^3, 3, 1",
       [g] {
         Filtration lcs = lower_central_series(g);
         std::vector<std::uint64_t> orders;
         for (const Subgroup& t : lcs.terms) orders.push_back(t.order());
         return orders == std::vector<std::uint64_t>{177147, 6561, 729, 27, 3, 1};
       }});
  f.facts.push_back(
      {"lcs-compatible",
       "phi restricts to a bijection A ∩ gamma_k -> B ∩ gamma_k on every "
       "lower-central term",
       [pair] { return is_compatible(pair, lower_central_series(pair.G)); }});
  f.facts.push_back(
      {"twisted-core",
       "twisting by a = (x,0) inside A gives a core of exactly the three "
       "identity-supported functions",
       [pair, x_top, meet] {
         HnnPair tw = twisted_pair(pair, x_top, pair.G.identity());
         return compute_core(tw).H.elements() == meet;
       }});
  f.facts.push_back(
      {"twisted-scaling",
       "the twisted map doubles the identity-supported functions, so it has "
       "order 2 on its core",
       [pair, x_top, delta0] {
         HnnPair tw = twisted_pair(pair, x_top, pair.G.identity());
         Element twice = pair.G.mul(delta0, delta0);
         if (tw.phi.apply(delta0) != twice) return false;
         if (tw.phi.apply(twice) != delta0) return false;
         return core_automorphism_order(compute_core(tw)) == 2;
       }});
  f.facts.push_back(
      {"toplevel-violation",
       "the twist scan refutes: first violation at a = (x,0), b = 1 with "
       "core order 3 and map order 2",
       [pair, x_top] {
         SearchStats stats;
         std::optional<Violation> v = obstruction_toplevel(pair, &stats);
         if (!v) return false;
         return v->a == x_top && v->b == pair.G.identity() &&
                v->core_order == 3 && v->map_order == 2;
       }});
  return f;
}

Fixture cyclic_shift() {
  const std::int64_t p = 3;
  ZMat shift = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  Group g = make_matrix_semidirect(p, 3, shift, {{1, 1, 1}});
  Element a = {1, 0, 2, 2};
  Element b = {1, 0, 0, 1};
  Subgroup sa = Subgroup::closure(g, {a});
  Subgroup sb = Subgroup::closure(g, {b});
  GroupMap phi = GroupMap::from_pairs(sa, sb,
                                      {{g.identity(), g.identity()},
                                       {a, g.mul(b, b)},
                                       {g.mul(a, a), b}},
                                      /*validate=*/true);
  HnnPair pair = make_pair(g, sa, sb, std::move(phi));

  Fixture f;
  f.name = "cyclic_shift";
  f.summary =
      "order-27 shift action: every central filtration is obstructed one "
      "layer down";
  f.pair = pair;

  f.facts.push_back({"ambient-order", "the ambient group has order 27",
                     [g] { return g.order() == 27; }});
  std::vector<Element> gamma2 = {g.identity(), {0, 0, 1, 2}, {0, 0, 2, 1}};
  std::sort(gamma2.begin(), gamma2.end());
  f.facts.push_back(
      {"gamma2",
       "the commutator subgroup is the zero-sum function line of order 3",
       [g, gamma2] {
         Filtration lcs = lower_central_series(g);
         return lcs.terms.size() >= 2 && lcs.terms[1].elements() == gamma2;
       }});
  f.facts.push_back(
      {"gamma3", "the lower central series reaches 1 at the third term",
       [g] {
         Filtration lcs = lower_central_series(g);
         return lcs.terms.size() == 3 && lcs.terms[2].is_trivial();
       }});
  f.facts.push_back({"intersection-trivial", "A ∩ B = 1", [pair] {
                       return intersect(pair.A, pair.B).is_trivial();
                     }});
  f.facts.push_back({"core-trivial", "the core of phi is trivial", [pair] {
                       return compute_core(pair).H.is_trivial();
                     }});
  f.facts.push_back(
      {"obstruction-full",
       "all five compatible central filtrations fail a layer test: refuted",
       [pair] {
         Decision d = obstruction_full(pair);
         return d.verdict == Verdict::NotResiduallyP &&
                d.stats.filtrations == 5;
       }});
  f.facts.push_back(
      {"decide-no", "the exhaustive chief search also answers NO", [pair] {
         return decide_chief(pair).verdict == Verdict::NotResiduallyP;
       }});
  return f;
}

std::vector<Fixture> reference_fixtures(bool heavy) {
  std::vector<Fixture> out;
  out.push_back(abelian_rank3(3, 1, 1, 1));
  out.push_back(abelian_rank3(3, 2, 1, 1));
  out.push_back(abelian_rank3(3, 1, 0, 1));
  out.push_back(abelian_rank4(3, 1, 0, 1));
  out.push_back(abelian_rank4(3, 1, 1, 1));
  out.push_back(abelian_rank4(3, 1, 0, 0));
  out.push_back(cyclic_shift());
  if (heavy) out.push_back(wreath());
  return out;
}

std::vector<FactResult> run_fixture(const Fixture& f) {
  std::vector<FactResult> out;
  for (const Fact& fact : f.facts) {
    FactResult r;
    r.fixture = f.name;
    r.id = fact.id;
    r.claim = fact.claim;
    try {
      r.ok = fact.check();
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace resp
