#include "resp/random_pairs.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <utility>

#include "resp/structure.hpp"

namespace resp {
namespace {

std::size_t draw(std::mt19937_64& rng, std::size_t bound) {
  return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
}

// Candidates for one basis slot: elements of the given order, shuffled when
// an engine is supplied.
std::vector<Element> order_class(const Group& g, const std::vector<Element>& pool,
                                 std::uint64_t order, std::mt19937_64* rng) {
  std::vector<Element> out;
  for (const Element& e : pool)
    if (g.element_order(e) == order) out.push_back(e);
  if (rng != nullptr) std::shuffle(out.begin(), out.end(), *rng);
  return out;
}

// Depth-first completion of `chosen` to a direct-sum basis of s; directness
// of each extension is certified by the closure order doubling exactly by
// the order of the new element.
bool extend_basis(const Subgroup& s, std::vector<Element>& chosen,
                  std::uint64_t product, std::mt19937_64* rng) {
  if (product == s.order()) return true;
  const Group& g = s.ambient();
  std::vector<std::uint64_t> orders;
  for (const Element& e : s.elements()) {
    std::uint64_t o = g.element_order(e);
    if (o > 1 && std::find(orders.begin(), orders.end(), o) == orders.end())
      orders.push_back(o);
  }
  std::sort(orders.rbegin(), orders.rend());
  for (std::uint64_t o : orders) {
    if (product * o > s.order() || s.order() % (product * o) != 0) continue;
    for (const Element& c : order_class(g, s.elements(), o, rng)) {
      std::vector<Element> next = chosen;
      next.push_back(c);
      if (Subgroup::closure(g, next).order() != product * o) continue;
      chosen.push_back(c);
      if (extend_basis(s, chosen, product * o, rng)) return true;
      chosen.pop_back();
    }
  }
  return false;
}

// Images (b_i) with ord(b_i) = ord(a_i) spanning a direct sum inside g;
// the identity assignment b_i = a_i guarantees a solution exists.
bool pick_images(const Group& g, const std::vector<Element>& abasis,
                 std::vector<Element>& bbasis, std::size_t i,
                 std::uint64_t product, std::mt19937_64& rng) {
  if (i == abasis.size()) return true;
  const std::uint64_t o = g.element_order(abasis[i]);
  for (const Element& c : order_class(g, g.elements(), o, &rng)) {
    std::vector<Element> next = bbasis;
    next.push_back(c);
    if (Subgroup::closure(g, next).order() != product * o) continue;
    bbasis.push_back(c);
    if (pick_images(g, abasis, bbasis, i + 1, product * o, rng)) return true;
    bbasis.pop_back();
  }
  return false;
}

// Isomorphism pair from two matched direct-sum bases: coefficient tuples
// enumerate both tables in lockstep.
HnnPair pair_from_bases(const Group& g, const Subgroup& a,
                        const std::vector<Element>& abasis,
                        const std::vector<Element>& bbasis) {
  std::vector<std::uint64_t> orders;
  orders.reserve(abasis.size());
  for (const Element& e : abasis) orders.push_back(g.element_order(e));
  std::vector<std::pair<Element, Element>> prs;
  std::vector<std::uint64_t> c(abasis.size(), 0);
  while (true) {
    Element x = g.identity();
    Element y = g.identity();
    for (std::size_t i = 0; i < abasis.size(); ++i) {
      x = g.mul(x, g.power(abasis[i], static_cast<std::int64_t>(c[i])));
      y = g.mul(y, g.power(bbasis[i], static_cast<std::int64_t>(c[i])));
    }
    prs.emplace_back(std::move(x), std::move(y));
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == orders[i]) c[i++] = 0;
    if (i == c.size()) break;
  }
  std::vector<Element> belems;
  belems.reserve(prs.size());
  for (const auto& pr : prs) belems.push_back(pr.second);
  std::sort(belems.begin(), belems.end());
  Subgroup b = Subgroup::from_elements_unchecked(g, std::move(belems),
                                                 std::vector<Element>(bbasis));
  GroupMap phi = GroupMap::from_pairs(a, b, prs, /*validate=*/true);
  return make_pair(g, a, std::move(b), std::move(phi));
}

Subgroup random_subgroup(std::mt19937_64& rng, const Group& g, int max_gens) {
  const std::vector<Element>& elems = g.elements();
  const int n = std::uniform_int_distribution<int>(0, max_gens)(rng);
  std::vector<Element> gens;
  gens.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) gens.push_back(elems[draw(rng, elems.size())]);
  return Subgroup::closure(g, std::move(gens));
}

bool commutes(const Subgroup& s) {
  const Group& g = s.ambient();
  const std::vector<Element>& e = s.elements();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (g.mul(e[i], e[j]) != g.mul(e[j], e[i])) return false;
  return true;
}

}  // namespace

Group sample_abelian_group(std::mt19937_64& rng, std::int64_t p, int max_exp_sum,
                           bool elementary) {
  if (max_exp_sum < 1) throw Error("need a positive exponent budget");
  int budget = max_exp_sum;
  std::vector<int> exps;
  while (budget > 0) {
    int e = elementary ? 1
                       : std::uniform_int_distribution<int>(1, budget)(rng);
    exps.push_back(e);
    budget -= e;
    if (budget > 0 && std::uniform_int_distribution<int>(0, 2)(rng) == 0) break;
  }
  return make_abelian(p, exps);
}

Group sample_group(std::mt19937_64& rng, std::int64_t p, std::uint64_t max_order) {
  int budget = 0;
  std::uint64_t o = 1;
  while (o * static_cast<std::uint64_t>(p) <= max_order) {
    o *= static_cast<std::uint64_t>(p);
    ++budget;
  }
  if (budget < 1) throw Error("order bound admits no nontrivial group");
  std::vector<Group> pool;
  if (p == 2) {
    if (max_order >= 8)
      pool.push_back(make_matrix_semidirect(2, 2, {{1, 1}, {0, 1}}, {}));
    if (max_order >= 32)
      pool.push_back(make_matrix_semidirect(
          2, 4, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}, {}));
  } else if (p == 3) {
    if (max_order >= 27) {
      pool.push_back(make_matrix_semidirect(3, 3, {{1, 1}, {0, 1}}, {}));
      pool.push_back(make_matrix_semidirect(
          3, 3, {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}, {{1, 1, 1}}));
    }
    if (max_order >= 81)
      pool.push_back(make_matrix_semidirect(
          3, 3, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}, {}));
  }
  if (!pool.empty() && std::uniform_int_distribution<int>(0, 2)(rng) == 0)
    return pool[draw(rng, pool.size())];
  return sample_abelian_group(rng, p, budget, /*elementary=*/false);
}

std::vector<Element> abelian_basis(const Subgroup& s, std::mt19937_64* rng) {
  std::vector<Element> chosen;
  if (s.order() == 1) return chosen;
  if (!extend_basis(s, chosen, 1, rng))
    throw Error("subgroup admits no direct-sum basis; is it abelian?");
  return chosen;
}

HnnPair sample_pair(std::mt19937_64& rng, const Group& g) {
  Subgroup a = random_subgroup(rng, g, 2);
  if (commutes(a)) {
    std::vector<Element> abasis = abelian_basis(a, &rng);
    std::vector<Element> bbasis;
    if (!pick_images(g, abasis, bbasis, 0, 1, rng))
      throw InternalCheckError("no image basis found for an abelian subgroup");
    return pair_from_bases(g, a, abasis, bbasis);
  }
  const std::vector<Element>& elems = g.elements();
  Element c = elems[draw(rng, elems.size())];
  Subgroup b = conjugate_subgroup(a, c);
  GroupMap phi = GroupMap::conjugation(a, c);
  return make_pair(g, a, std::move(b), std::move(phi));
}

HnnPair sample_invariant_pair(std::mt19937_64& rng, std::int64_t p, int max_exp_sum,
                              bool elementary) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Group g = sample_abelian_group(rng, p, max_exp_sum, elementary);
    Subgroup a = random_subgroup(rng, g, 3);
    std::vector<Element> abasis = abelian_basis(a, &rng);
    // Pinning a basis vector (keeping it fixed by phi) biases the sample
    // toward a nontrivial invariant intersection.
    std::vector<Element> bbasis;
    bool ok = true;
    for (std::size_t i = 0; i < abasis.size() && ok; ++i) {
      if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
        std::vector<Element> next = bbasis;
        next.push_back(abasis[i]);
        std::uint64_t prod = 1;
        for (const Element& e : bbasis) prod *= g.element_order(e);
        if (Subgroup::closure(g, next).order() ==
            prod * g.element_order(abasis[i])) {
          bbasis.push_back(abasis[i]);
          continue;
        }
      }
      std::uint64_t prod = 1;
      for (const Element& e : bbasis) prod *= g.element_order(e);
      std::vector<Element> rest = bbasis;
      if (!pick_images(g, {abasis[i]}, rest, 0, prod, rng)) {
        ok = false;
        break;
      }
      bbasis = std::move(rest);
    }
    if (!ok) continue;
    HnnPair pair = pair_from_bases(g, a, abasis, bbasis);
    Subgroup n = intersect(pair.A, pair.B);
    if (!map_image(pair.phi, n).same_set(n)) continue;
    if (!is_power_of(automorphism_order(pair.phi.restrict(n)),
                     static_cast<std::uint64_t>(p)))
      continue;
    return pair;
  }
  // Identity fallback: always satisfies the hypothesis.
  Group g = sample_abelian_group(rng, p, max_exp_sum, elementary);
  Subgroup a = random_subgroup(rng, g, 3);
  GroupMap phi = GroupMap::identity_on(a);
  return make_pair(g, a, a, std::move(phi));
}

}  // namespace resp
