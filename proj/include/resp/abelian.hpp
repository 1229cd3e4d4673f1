#pragma once

// Abelian-pair machinery: the direct residual-p decision for abelian base
// groups, the constructive witness pipeline (elementary hull, power
// filtration, unipotent flags, interleaved chief assembly) and the degree-s
// cyclic cover that replaces an arbitrary abelian pair by one whose core is
// the full intersection A' ∩ B'.

#include <cstdint>
#include <string>
#include <vector>

#include "resp/decide.hpp"
#include "resp/hnn.hpp"
#include "resp/structure.hpp"

namespace resp {

// Direct decision for abelian G: the extension is residually p exactly when
// the core automorphism has p-power order.  The transcript records the core
// elements and both orders.  Throws Error when G is not abelian.
Decision decide_abelian(const HnnPair& pair);

// Witness for an elementary abelian pair whose core automorphism has
// p-power order: an elementary abelian overgroup X with an automorphism
// gamma of p-power order extending phi through iota.
//
// X is assembled from complements chosen by greedy basis extension in
// lexicographic element order: P with A = (A ∩ B) ⊕ P, Q with
// B = (A ∩ B) ⊕ Q and S with G = A ⊕ Q ⊕ S.  Then
//   X = A ⊕ Q ⊕ Q_1 ⊕ ... ⊕ Q_{p-2} ⊕ S
// with fresh copies Q_i of Q, and gamma maps A by phi, shifts each Q copy
// to the next one, returns the last copy through phi^-1 and fixes S
// pointwise (for p = 2 the single copy Q goes through phi^-1 directly).
struct ElementaryWitness {
  Group X;
  GroupMap iota;   // G -> X, injective, iota ∘ phi = gamma ∘ iota on A
  GroupMap gamma;  // automorphism of X of p-power order
  Subgroup P, Q, S;
  std::uint64_t gamma_order = 1;
};
ElementaryWitness build_witness_elementary(const HnnPair& pair);

// Embedding of a finite abelian p-group into a homocyclic group
// (Z/p^k)^d, k the largest generator order exponent, sending the i-th
// coordinate generator to p^(k - e_i) times the i-th unit vector.  The
// transported pair lives on the hull.  Requires a direct-sum presentation
// (Group kind "abelian").
struct HomocyclicEmbedding {
  Group hull;
  GroupMap iota;  // G -> hull, codomain = image subgroup
  HnnPair pair;   // transported pair on the hull
  int k = 1;      // hull exponent p^k
};
HomocyclicEmbedding homocyclic_embed(const HnnPair& pair);

// The filtration hull = G_1 > G_2 > ... > G_{k+1} = 1 with G_i = p^(i-1) hull,
// its layer pairs, and the multiplication-by-p^(k-i) isomorphisms
// Phi_i : L_i -> L_k onto the bottom layer.  The commuting squares
// Phi_i ∘ phi_i = phi_k ∘ Phi_i are verified elementwise, as is
// compatibility of the filtration with the hull pair.
struct PowerFiltration {
  Filtration f;
  std::vector<InducedPair> layers;    // layer i built from terms (i, i+1)
  std::vector<GroupMap> layer_to_top; // Phi_i : layer i ambient -> top ambient
};
PowerFiltration power_filtration(const HnnPair& hull_pair, int k);

// Complete flag X = T_1 > T_2 > ... > T_{d+1} = 1 of an elementary abelian
// group refining the kernels of (gamma - id)^j, with every factor of order
// p and gamma(v) v^-1 in T_{j+1} for all v in T_j.  Built by nested greedy
// basis extension through the kernel chain.  Throws Error when gamma - id
// is not nilpotent (equivalently, the order of gamma is not a p-power).
Filtration unipotent_flag(const Group& x, const GroupMap& gamma);

// Interleaves per-layer chief flags of a central compatible filtration into
// a single chief filtration of G via preimages G_ij of the flag terms under
// the projections G -> G/G_{i+1}, and packages it as a certificate with the
// layer congruence witnesses.  Each flag must be a chief flag of the layer
// ambient satisfying phi_i(A_i ∩ H_ij) = B_i ∩ H_ij and
// phi_i(a) a^-1 in H_{i,j+1}; violations throw Error.  The result passes
// check_chief_certificate by construction.
ChiefCertificate assemble_chief(const HnnPair& pair, const Filtration& f,
                                const std::vector<Filtration>& layer_flags);

// Full constructive pipeline for an abelian pair whose core automorphism
// fixes A ∩ B setwise with p-power order: homocyclic hull, power
// filtration, elementary witness on the top layer, unipotent flag of the
// witness group, pulled-back layer flags, interleaved chief certificate for
// the transported pair on the hull.
struct PipelineResult {
  HomocyclicEmbedding embedding;
  PowerFiltration filtration;
  ElementaryWitness top_witness;  // built on an exponent-p model of the top layer
  ChiefCertificate certificate;   // for embedding.pair
};
PipelineResult abelian_pipeline(const HnnPair& pair);

// Degree-s cyclic cover of an abelian pair: the block sum D of s copies of
// G modulo the relations a × i = phi(a) × (i+1) for a in A and
// i = 0..s-2, computed by Smith-normal-form reduction.  The cover pair is
// (G', A', B', phi') with A' the last block image of A, B' the first block
// image of B and phi'(a × (s-1)) = phi(a) × 0.  Every block map G -> G' is
// verified injective, and |G'| · |A|^(s-1) = |G|^s is verified (this is the
// numerical certificate that the relation map is injective).
struct CyclicCover {
  std::int64_t s = 0;
  Group Gp;                     // G' as a direct sum of cyclic p-groups
  HnnPair cover;                // (G', A', B', phi')
  GroupMap Psi;                 // G -> G', g -> g × 0 (equals blocks[0])
  std::vector<GroupMap> blocks; // G -> G', g -> g × j for j = 0..s-1
  std::uint64_t expected_order = 0;  // |G|^s / |A|^(s-1)
};
CyclicCover cyclic_cover(const HnnPair& pair, std::int64_t s);

// Least power of p strictly greater than max(orbit_bound, 1); the smallest
// admissible cover degree.
std::int64_t default_cover_exponent(const HnnPair& pair);

// Exhaustive verification of the cover's two defining properties:
// (1) the core of the cover pair is all of A' ∩ B', and the direct solve of
//     the relation system over B reproduces the core of the base pair;
// (2) Psi restricts to an isomorphism of cores conjugating phi^s to phi'.
struct AbprimeReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::uint64_t core_order = 0;       // |H(G', phi')|
  std::uint64_t phi_prime_order = 0;  // order of phi' on the cover core
};
AbprimeReport check_abprime(const HnnPair& base, const CyclicCover& data);

// Routing used by the command-line front end: abelian groups go through
// decide_abelian; otherwise decide_chief under the cap; groups above the
// cap get only the top-level obstruction scan (refuted or inconclusive).
Decision decide_auto(const HnnPair& pair, const DecideOptions& opts = {});

}  // namespace resp
