#pragma once

// Total maps between subgroups, stored as image tables aligned with the
// sorted element list of the domain.  Construction either verifies or
// guarantees multiplicativity; injectivity and image computations are
// explicit table scans.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "resp/subgroup.hpp"

namespace resp {

class GroupMap {
public:
  GroupMap() = default;

  // images[i] is the image of dom.elements()[i].  With validate set the
  // table is checked to be a homomorphism into cod.
  static GroupMap from_table(Subgroup dom, Subgroup cod, std::vector<Element> images,
                             bool validate);
  static GroupMap from_pairs(Subgroup dom, Subgroup cod,
                             const std::vector<std::pair<Element, Element>>& pairs,
                             bool validate);
  // Extends generator images multiplicatively over the closure of gens.
  // The breadth-first extension verifies every table entry against every
  // generator, which already certifies multiplicativity.
  static GroupMap from_generator_images(const Group& dom_ambient,
                                        const std::vector<Element>& gens,
                                        const Group& cod_ambient,
                                        const std::vector<Element>& images,
                                        std::uint64_t cap = kEnumerationCap);
  static GroupMap identity_on(const Subgroup& s);
  // c_g restricted to s: x -> g^-1 x g, codomain g^-1 s g.
  static GroupMap conjugation(const Subgroup& s, const Element& g);

  const Subgroup& domain() const { return data_->dom; }
  const Subgroup& codomain() const { return data_->cod; }
  Element apply(const Element& e) const;
  std::vector<std::pair<Element, Element>> table() const;

  Subgroup image() const;
  bool is_multiplicative() const;  // exhaustive |dom|^2 check
  bool is_injective() const;
  // Inverse table; requires injectivity.  The codomain of the inverse is
  // the domain, and its domain is the image.
  GroupMap inverse() const;
  // this ∘ inner; requires image(inner) ⊆ domain(this).
  GroupMap compose(const GroupMap& inner) const;
  GroupMap restrict(const Subgroup& s) const;
  // Replace the codomain by a (super)group of the image.
  GroupMap with_codomain(const Subgroup& cod) const;

private:
  struct Data {
    Subgroup dom, cod;
    std::vector<Element> images;  // aligned with dom.elements()
  };
  explicit GroupMap(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

// Order of a bijective map whose domain and image coincide as sets
// (least common multiple of its cycle lengths).
std::uint64_t automorphism_order(const GroupMap& f);

// Image subgroup of s under f (s must lie in the domain).
Subgroup map_image(const GroupMap& f, const Subgroup& s);

}  // namespace resp
