#include "resp/filtration.hpp"

namespace resp {

const Subgroup& Filtration::term(std::size_t i) const {
  if (i < terms.size()) return terms[i];
  return terms.back();
}

void validate_filtration(const Filtration& f) {
  if (f.terms.empty()) throw Error("filtration has no terms");
  if (!f.terms.front().is_whole() &&
      f.terms.front().order() != f.ambient.order())
    throw Error("filtration must start at the whole group");
  if (f.terms.back().order() != 1)
    throw Error("filtration must end at the trivial subgroup");
  for (const Subgroup& t : f.terms) {
    if (!t.ambient().same_as(f.ambient))
      throw Error("filtration term lives in the wrong ambient group");
    if (!is_normal(t)) throw Error("filtration term is not normal");
  }
  for (std::size_t i = 0; i + 1 < f.terms.size(); ++i) {
    if (!f.terms[i + 1].subset_of(f.terms[i]))
      throw Error("filtration is not descending");
    if (f.terms[i + 1].order() == f.terms[i].order())
      throw Error("filtration repeats a term");
  }
}

bool is_central_series(const Filtration& f) {
  const Group& g = f.ambient;
  for (std::size_t i = 0; i + 1 < f.terms.size(); ++i) {
    const Subgroup& next = f.terms[i + 1];
    for (const Element& a : g.generators())
      for (const Element& b : f.terms[i].gens())
        if (!next.contains(g.commutator(a, b))) return false;
  }
  return true;
}

bool is_chief_series(const Filtration& f) {
  if (!is_central_series(f)) return false;
  std::uint64_t p = static_cast<std::uint64_t>(f.ambient.prime());
  for (std::size_t i = 0; i + 1 < f.terms.size(); ++i)
    if (f.terms[i].order() != f.terms[i + 1].order() * p) return false;
  return true;
}

}  // namespace resp
