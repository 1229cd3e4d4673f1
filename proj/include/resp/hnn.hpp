#pragma once

// HNN data on a finite p-group: a pair (G, phi) with phi : A -> B an
// isomorphism between subgroups, the associated core subgroup H (largest
// subgroup of A∩B on which phi restricts to an automorphism), twisted pairs,
// and pairs induced on quotients and on filtration layers.

#include <cstdint>
#include <optional>
#include <string>

#include "resp/filtration.hpp"
#include "resp/group_map.hpp"
#include "resp/structure.hpp"
#include "resp/subgroup.hpp"

namespace resp {

struct HnnPair {
  Group G;
  Subgroup A, B;
  GroupMap phi;      // A -> B, bijective
  GroupMap phi_inv;  // B -> A
};

// Validates: A, B subgroups of G, phi an isomorphism A -> B (multiplicative
// and bijective, checked exhaustively).
HnnPair make_pair(const Group& g, Subgroup a, Subgroup b, GroupMap phi,
                  bool validate = true);

// The pair (X, gamma) for an automorphism gamma of the whole group.
HnnPair make_auto_pair(const Group& x, const GroupMap& gamma);

struct Core {
  Subgroup H;
  GroupMap phi_H;      // restriction of phi, an automorphism of H
  int fix_index = 0;   // least i with H_i = H_{i+1} in the fixpoint chain
  int orbit_bound = -1;  // least s with S_s = S_{s+1} in the one-sided chain
                         // (-1 when produced by the fixpoint algorithm alone)
};

// Fixpoint algorithm: H_0 = A ∩ B, H_{i+1} = {h in H_i : phi(h) in H_i and
// phi^{-1}(h) in H_i}; stops at the first repeat.
Core core_fixpoint(const HnnPair& pair);

// One-sided orbit algorithm: S_1 = A, S_{s+1} = {a in A : phi(a) in S_s};
// the first repeat equals the core.  Cross-checks against core_fixpoint and
// throws InternalCheckError on disagreement.
Core core_orbit(const HnnPair& pair);

// core_orbit with the cross-check folded in; the canonical entry point.
Core compute_core(const HnnPair& pair);

// Order of phi restricted to the core.
std::uint64_t core_automorphism_order(const Core& core);

// The pair (G, c_b ∘ phi ∘ c_a) with c_g(x) = g^-1 x g; requires a in A and
// b in B.  Domain A and codomain B are unchanged.
HnnPair twisted_pair(const HnnPair& pair, const Element& a, const Element& b);

struct InducedPair {
  HnnPair pair;
  QuotientResult onto;  // projection G -> G/N used to build it
};

// The pair (G/N, induced phi); requires N normal and phi(A ∩ N) = B ∩ N.
InducedPair induced_pair(const HnnPair& pair, const Subgroup& n,
                         std::uint64_t cap = kEnumerationCap);

// The layer pair on G_i / G_j for filtration indices i < j (0-based):
// ambient group is the image of G_i in G/G_j, with subgroups the images of
// A ∩ G_i and B ∩ G_i.  Requires phi(A ∩ G_j) = B ∩ G_j.
InducedPair induced_layer_pair(const HnnPair& pair, const Filtration& f,
                               std::size_t i, std::size_t j,
                               std::uint64_t cap = kEnumerationCap);

struct EmbeddingCheck {
  bool ok = true;
  std::string failure;
};

// Checks that alpha : G -> Y intertwines the pair with the automorphism
// pair of y on Y: alpha injective and multiplicative, and for all a in A,
// alpha(phi(a)) = y^-1 alpha(a) y.
EmbeddingCheck embedding_into_conjugation(const GroupMap& alpha, const HnnPair& src,
                                          const Group& y_group, const Element& y);

// Checks that alpha : G -> X intertwines the pair with an automorphism
// gamma of X: alpha injective and multiplicative, gamma bijective on X,
// and for all a in A, alpha(phi(a)) = gamma(alpha(a)).
EmbeddingCheck embedding_into_automorphism(const GroupMap& alpha, const HnnPair& src,
                                           const GroupMap& gamma);

struct Wrap {
  Group Y;
  Element y;
  GroupMap include;  // X -> Y, x -> (0, x)
};

// Y = Z/p^k ⋉ X for an automorphism gamma of X of p-power order p^k, with
// the distinguished generator y acting as gamma.  Verifies c_y|_X = gamma.
Wrap semidirect_wrap(const Group& x, const GroupMap& gamma);

}  // namespace resp
