#pragma once

// Decision procedures for residual p-ness of the HNN extension of a finite
// p-group pair (G, phi):
//
//  * decide_chief      — exact decision by exhaustive bottom-up search for a
//                        chief filtration compatible with the pair whose
//                        layers satisfy phi(a) ≡ a mod G_{i+1}.
//  * obstruction_*     — necessary conditions via twisted cores: a twist
//                        c_b ∘ phi_ij ∘ c_a whose core automorphism has
//                        non-p-power order certifies NOT residually p.
//  * sufficient_*      — sufficient conditions via layer / quotient cores:
//                        p-power orders everywhere certify residually p.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resp/filtration.hpp"
#include "resp/hnn.hpp"

namespace resp {

enum class Verdict { ResiduallyP, NotResiduallyP, Inconclusive };

std::string verdict_name(Verdict v);

// Congruence witnesses for one layer of a chief certificate: for every
// a in A ∩ G_i the residue phi(a)·a^{-1}, which must lie in G_{i+1}.
struct LayerWitness {
  std::vector<Element> a_elements;
  std::vector<Element> residues;
};

struct ChiefCertificate {
  Filtration filtration;             // chief, compatible with the pair
  std::vector<LayerWitness> layers;  // one entry per layer i = 0..n-2
};

// A twisted-core order violation: the automorphism induced by
// c_b ∘ phi_ij ∘ c_a on the core of the (i, j) subquotient pair has order
// `map_order`, not a power of p.  Indices are 1-based filtration positions;
// j = -1 encodes the bottom term {1}, present in every filtration, so
// (i, j) = (1, -1) is the top-level specialization on (G, phi) itself.
struct Violation {
  int i = 1;
  int j = -1;
  Element a, b;                  // witnesses in the scanned pair's ambient
  std::uint64_t core_order = 0;  // order of the twisted core
  std::uint64_t map_order = 0;   // order of the twisted map on it
};

struct SearchStats {
  std::uint64_t nodes = 0;        // decision-tree nodes visited
  std::uint64_t candidates = 0;   // candidate minimal central subgroups
  std::uint64_t memo_hits = 0;
  std::uint64_t max_depth = 0;
  std::uint64_t filtrations = 0;  // central filtrations enumerated
  std::uint64_t twists = 0;       // (a, b) twists scanned
};

struct Decision {
  Verdict verdict = Verdict::Inconclusive;
  std::string method;
  std::optional<ChiefCertificate> chief;  // set on chief-search YES
  std::optional<Violation> violation;     // set on a single-twist refutation
  std::optional<Filtration> passing;      // obstruction_full: a filtration
                                          // passing every twisted-core check
  SearchStats stats;
  nlohmann::json transcript;  // method-specific search record
};

// phi restricts to a bijection A ∩ G_i -> B ∩ G_i for every term.
bool is_compatible(const HnnPair& pair, const Filtration& f);

struct DecideOptions {
  std::uint64_t cap = kDecideCap;  // largest |G| the search will accept
  bool memoize = true;
};

// Exhaustive bottom-up search: pick an order-p central subgroup N with
// phi(A ∩ N) = B ∩ N and phi fixing A ∩ N pointwise, recurse on the induced
// pair on G/N; memoized on the accumulated kernel (a subgroup of the
// original G).  Candidates are visited in lexicographic order of their
// sorted element lists, so the first certificate found is canonical.
// YES: verdict ResiduallyP with a ChiefCertificate.  NO: NotResiduallyP
// with an exhaustion transcript.  Throws Error when |G| exceeds the cap.
Decision decide_chief(const HnnPair& pair, const DecideOptions& opts = {});

// Independent re-check of a chief certificate: the filtration is chief,
// compatible with the pair, and phi(a)·a^{-1} lies in G_{i+1} for every i
// and every a in A ∩ G_i.  Recorded layer witnesses, when present, must
// match the recomputed ones.  On failure, *why names the first violated
// condition.
bool check_chief_certificate(const HnnPair& pair, const ChiefCertificate& cert,
                             std::string* why = nullptr);

// Scans all (a, b) in A × B — b outer, a inner, each in lexicographic
// element order — and returns the first twist c_b ∘ phi ∘ c_a whose core
// automorphism order is not a power of p.  Needs no ambient enumeration.
// A violation certifies that the HNN extension is not residually p.
std::optional<Violation> obstruction_toplevel(const HnnPair& pair,
                                              SearchStats* stats = nullptr);

// All central filtrations of G compatible with the pair, enumerated as
// descending chains over the subgroup lattice in lexicographic order.
// Throws Error when |G| exceeds the cap.
std::vector<Filtration> compatible_central_filtrations(
    const HnnPair& pair, std::uint64_t cap = kFiltrationCap);

// Enumerates all compatible central filtrations and checks every
// subquotient twist: for each i < j and each (a, b) in (A ∩ G_i) × (B ∩ G_i)
// the core automorphism order of c_b ∘ phi_ij ∘ c_a on G_i/G_j must be a
// p-power.  Every filtration failing somewhere refutes (NotResiduallyP,
// with a transcript recording each filtration's failing (i, j) pairs); a
// filtration passing everywhere makes the result Inconclusive, since the
// condition is necessary but not sufficient.
Decision obstruction_full(const HnnPair& pair,
                          std::uint64_t cap = kFiltrationCap);

// True when every layer pair G_i/G_{i+1} has core automorphism of p-power
// order; true certifies residually p.  Requires f central and compatible
// (throws Error naming the failed precondition otherwise).
bool sufficient_layerwise(const HnnPair& pair, const Filtration& f);

// Same via the quotient pairs G/G_i.  Additionally asserts the containment
// H(G_i/G_{i+1}) ⊆ H(G/G_{i+1}) realized inside G/G_{i+1}, throwing
// InternalCheckError when it fails.
bool sufficient_quotient(const HnnPair& pair, const Filtration& f);

}  // namespace resp
