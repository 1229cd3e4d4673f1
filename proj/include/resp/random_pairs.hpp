#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "resp/hnn.hpp"

namespace resp {

// Deterministic samplers for randomized consistency tests: every draw comes
// from the caller's engine, so a fixed seed reproduces the same sequence of
// groups and pairs.

// Direct sum of Z/p^{e_i} with total exponent between 1 and max_exp_sum.
// When elementary is set, every exponent is 1.
Group sample_abelian_group(std::mt19937_64& rng, std::int64_t p, int max_exp_sum,
                           bool elementary = false);

// Abelian or small nonabelian ambient group of order at most max_order.
Group sample_group(std::mt19937_64& rng, std::int64_t p, std::uint64_t max_order);

// Basis of an abelian subgroup as a direct sum of cyclic groups, found by
// depth-first search starting from elements of maximal order.  With an
// engine, candidates of equal order are tried in shuffled order, which
// randomizes the basis; without one the order is lexicographic.
std::vector<Element> abelian_basis(const Subgroup& s, std::mt19937_64* rng = nullptr);

// Random isomorphism pair inside g: an abelian subgroup is matched with a
// random isomorphic subgroup along a random basis-to-basis isomorphism; a
// nonabelian subgroup is paired with a random conjugate.
HnnPair sample_pair(std::mt19937_64& rng, const Group& g);

// Abelian ambient plus a pair satisfying phi(A ∩ B) = A ∩ B with p-power
// order on the intersection (the hypothesis of the constructive builders).
// When elementary is set the ambient has exponent p.
HnnPair sample_invariant_pair(std::mt19937_64& rng, std::int64_t p, int max_exp_sum,
                              bool elementary);

}  // namespace resp
