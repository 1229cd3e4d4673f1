#pragma once

// Subgroups of a fixed ambient group.  A subgroup is either a materialized
// sorted element list or the whole ambient group (kept symbolic so that
// large ambients never have to be enumerated just to talk about them).

#include <cstdint>
#include <memory>
#include <vector>

#include "resp/group.hpp"

namespace resp {

class Subgroup {
public:
  Subgroup() = default;

  static Subgroup whole(const Group& g);
  static Subgroup trivial(const Group& g);
  // Closure of the given generators inside g; throws if it exceeds cap.
  static Subgroup closure(const Group& g, std::vector<Element> gens,
                          std::uint64_t cap = kEnumerationCap);
  // Wraps an element list that is already known to be a subgroup; the list
  // is sorted and the subgroup axioms are verified.
  static Subgroup from_elements(const Group& g, std::vector<Element> elems,
                                std::vector<Element> gens = {});
  // Same, but skips the quadratic closure check.  Only for constructions
  // that guarantee subgroup-ness (intersections, conjugates, closures).
  static Subgroup from_elements_unchecked(const Group& g, std::vector<Element> elems,
                                          std::vector<Element> gens = {});

  const Group& ambient() const { return data_->ambient; }
  bool is_whole() const { return data_->whole; }
  std::uint64_t order() const;
  bool contains(const Element& e) const;
  bool is_trivial() const { return order() == 1; }

  // Sorted element list; materializes a whole-flag subgroup on first use
  // (throws if the ambient order exceeds the enumeration cap).
  const std::vector<Element>& elements() const;
  const std::vector<Element>& gens() const { return data_->gens; }

  bool same_set(const Subgroup& o) const;
  bool subset_of(const Subgroup& o) const;

private:
  struct Data {
    Group ambient;
    bool whole = false;
    mutable bool have_elems = false;
    mutable std::vector<Element> elems;
    std::vector<Element> gens;
  };
  explicit Subgroup(std::shared_ptr<Data> data) : data_(std::move(data)) {}
  std::shared_ptr<Data> data_;
};

Subgroup intersect(const Subgroup& a, const Subgroup& b);
Subgroup conjugate_subgroup(const Subgroup& s, const Element& g);
// Normality test via conjugation of subgroup generators by ambient
// generators (sufficient in a finite group).
bool is_normal(const Subgroup& s);
// Smallest normal subgroup containing the seeds.
Subgroup normal_closure(const Group& g, const std::vector<Element>& seeds,
                        std::uint64_t cap = kEnumerationCap);
// [S, T] as a subgroup: normal closure of pairwise generator commutators
// when S and T are normal; used as [G, N] with S = G.
Subgroup commutator_subgroup(const Subgroup& s, const Subgroup& t,
                             std::uint64_t cap = kEnumerationCap);
// Set product A*N for N normalizing the product (result must be a group).
Subgroup subgroup_product(const Subgroup& a, const Subgroup& n);
// The subgroup promoted to a standalone Group sharing the ambient encoding.
Group promote(const Subgroup& s);

}  // namespace resp
