#pragma once

// Descending chains of normal subgroups G = G_1 >= G_2 >= ... >= G_n = 1.
// Indices are 0-based in the API; term(i) beyond the stored chain is the
// trivial subgroup.

#include <cstdint>
#include <vector>

#include "resp/subgroup.hpp"

namespace resp {

struct Filtration {
  Group ambient;
  std::vector<Subgroup> terms;  // terms.front() = whole, terms.back() = trivial

  std::size_t length() const { return terms.size(); }
  const Subgroup& term(std::size_t i) const;
};

// Validates: first term is the whole group, last is trivial, the chain is
// strictly descending, and every term is normal in the ambient group.
void validate_filtration(const Filtration& f);

// Every quotient G_i / G_{i+1} is central in G / G_{i+1}; checked as
// [G, G_i] <= G_{i+1} via generator commutators.
bool is_central_series(const Filtration& f);

// Central with factors of order exactly p.
bool is_chief_series(const Filtration& f);

}  // namespace resp
