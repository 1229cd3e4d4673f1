#pragma once

// Structural computations: centers, quotients with canonical coset
// representatives, lower central series, minimal central subgroups and the
// full subgroup lattice (capped).

#include <cstdint>
#include <functional>
#include <vector>

#include "resp/filtration.hpp"
#include "resp/group_map.hpp"
#include "resp/subgroup.hpp"

namespace resp {

// Elements commuting with every generator; enumerates the group (capped).
Subgroup center(const Group& g, std::uint64_t cap = kEnumerationCap);

// True when every pair of generators commutes.
bool is_abelian(const Group& g);

// Abelian and of exponent dividing p (every generator has order 1 or p).
bool is_elementary_abelian(const Group& g);

// Quotient of g by a normal subgroup n.  Elements of the quotient group are
// canonical coset representatives in the parent encoding (lexicographically
// least member of the coset); project maps any parent element to its
// representative.  The representative search is generator-driven, so only
// |G/N| cosets are ever materialized.
class QuotientResult {
public:
  const Group& group() const { return quotient_; }
  const Group& parent() const { return parent_; }
  const Subgroup& kernel() const { return kernel_; }
  Element project(const Element& g) const { return project_(g); }
  // Image of a subgroup of the parent.
  Subgroup project_subgroup(const Subgroup& s) const;
  // Full projection table on the parent (parent order must be <= cap).
  GroupMap projection_map(std::uint64_t cap = kEnumerationCap) const;

private:
  friend QuotientResult quotient(const Group&, const Subgroup&, std::uint64_t);
  Group parent_, quotient_;
  Subgroup kernel_;
  std::function<Element(const Element&)> project_;
};

QuotientResult quotient(const Group& g, const Subgroup& n,
                        std::uint64_t cap = kEnumerationCap);

// G = gamma_1 >= gamma_2 >= ... >= 1 with gamma_{k+1} = [G, gamma_k].
// Throws if the series does not reach 1 (cannot happen for finite
// p-groups, but guards against broken oracles).
Filtration lower_central_series(const Group& g, std::uint64_t cap = kEnumerationCap);

// All subgroups of order p contained in the center, sorted by element list.
std::vector<Subgroup> minimal_central_subgroups(const Group& g,
                                                std::uint64_t cap = kEnumerationCap);

// Every subgroup of g (closure lattice breadth-first search).  Requires the
// order of g to be at most cap; intended for small groups only.
std::vector<Subgroup> all_subgroups(const Group& g, std::uint64_t cap = kFiltrationCap);

}  // namespace resp
