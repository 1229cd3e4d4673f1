#pragma once

// Finite p-groups with oracle-style access.  A Group is a cheap handle on an
// immutable implementation that knows how to multiply, invert and test
// canonical integer tuples.  Element universes are only ever enumerated
// behind explicit caps; subgroup closures, cores and quotient coset searches
// all work generator-side so that groups of order ~3^11 stay usable.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "resp/element.hpp"
#include "resp/zlattice.hpp"

namespace resp {

// Default caps.  The enumeration cap gates universe materialization
// (center, quotient reps, subgroup promotion); the decide cap gates the
// chief-filtration search; the filtration cap gates exhaustive central
// filtration enumeration.
inline constexpr std::uint64_t kEnumerationCap = 531441;  // 3^12
inline constexpr std::uint64_t kDecideCap = 6561;         // 3^8
inline constexpr std::uint64_t kFiltrationCap = 81;       // 3^4

class GroupOps {
public:
  virtual ~GroupOps() = default;
  virtual std::size_t width() const = 0;
  virtual std::uint64_t order() const = 0;
  virtual std::int64_t prime() const = 0;
  virtual Element mul(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  virtual bool contains(const Element& a) const = 0;
  virtual std::vector<Element> generators() const = 0;
  virtual void for_each(const std::function<void(const Element&)>& fn) const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json describe() const = 0;
};

class Group {
public:
  Group() = default;
  explicit Group(std::shared_ptr<const GroupOps> ops) : ops_(std::move(ops)) {}

  std::size_t width() const { return ops_->width(); }
  std::uint64_t order() const { return ops_->order(); }
  std::int64_t prime() const { return ops_->prime(); }
  Element identity() const { return Element(ops_->width(), 0); }
  Element mul(const Element& a, const Element& b) const { return ops_->mul(a, b); }
  Element inverse(const Element& a) const { return ops_->inverse(a); }
  bool contains(const Element& a) const { return ops_->contains(a); }
  std::vector<Element> generators() const { return ops_->generators(); }
  void for_each(const std::function<void(const Element&)>& fn) const {
    ops_->for_each(fn);
  }
  std::string kind() const { return ops_->kind(); }
  nlohmann::json describe() const { return ops_->describe(); }

  bool is_identity(const Element& a) const {
    for (Coord c : a)
      if (c != 0) return false;
    return true;
  }
  // g^-1 x g
  Element conjugate(const Element& x, const Element& g) const {
    return mul(mul(inverse(g), x), g);
  }
  // [a,b] = a b a^-1 b^-1
  Element commutator(const Element& a, const Element& b) const {
    return mul(mul(a, b), mul(inverse(a), inverse(b)));
  }
  Element power(const Element& a, std::int64_t n) const;
  std::uint64_t element_order(const Element& a) const;

  // Materialized, lexicographically sorted universe; throws if order > cap.
  std::vector<Element> elements(std::uint64_t cap = kEnumerationCap) const;

  bool same_as(const Group& o) const { return ops_ == o.ops_; }
  const std::shared_ptr<const GroupOps>& handle() const { return ops_; }

private:
  std::shared_ptr<const GroupOps> ops_;
};

// Direct sum of Z/p^{e_i}; tuple coordinate i is a residue mod p^{e_i}.
Group make_abelian(std::int64_t p, const std::vector<int>& exponents);

// Abelian group with explicit per-coordinate moduli (each a power of p).
// Used for cokernels whose invariant factors are already known.
Group make_abelian_moduli(std::int64_t p, const std::vector<std::int64_t>& moduli);

// G = <x | x^m> acting on V = (Z/p)^n / span(relations) on the right via the
// n x n matrix `action`.  Tuples are (k, v_0..v_{n-1}) with v the canonical
// coset representative.  Multiplication: (j,u)(k,v) = (j+k, action^k u + v).
Group make_matrix_semidirect(std::int64_t p, std::int64_t m, const ZMat& action,
                             const std::vector<ZVec>& relations);

// G = P ⋉ F_p[P] for P = (Z/p)^rank, P acting by ring multiplication.
// Tuples are (u_1..u_rank, f_0..f_{p^rank-1}) with f indexed by P in
// odometer order.  Multiplication: (u,f)(v,g) = (u+v, v·f + g).
Group make_group_ring_semidirect(std::int64_t p, int rank);

// Y = Z/p^k ⋉ X where the canonical generator acts via gamma (given as a
// total table on X).  Tuples are (c, x...).  Used by semidirect_wrap.
Group make_cyclic_extension(std::int64_t p, int k, const Group& X,
                            const std::vector<std::pair<Element, Element>>& gamma_table);

// Group whose universe is an explicit subgroup of `parent`, sharing its
// element encoding and oracles.
Group promote_subgroup(const Group& parent, std::vector<Element> elements,
                       std::vector<Element> gens);

}  // namespace resp
