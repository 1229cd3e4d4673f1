#include "resp/hnn.hpp"

#include <algorithm>

namespace resp {

namespace {

Subgroup subgroup_from_sorted(const Group& g, std::vector<Element> elems) {
  return Subgroup::from_elements_unchecked(g, std::move(elems));
}

GroupMap restrict_onto(const GroupMap& f, const Subgroup& dom) {
  // Restriction with codomain shrunk to the exact image.
  GroupMap r = f.restrict(dom);
  return r.with_codomain(map_image(r, dom));
}

}  // namespace

HnnPair make_pair(const Group& g, Subgroup a, Subgroup b, GroupMap phi,
                  bool validate) {
  if (!a.ambient().same_as(g) || !b.ambient().same_as(g))
    throw Error("pair subgroups must live in the given group");
  if (!phi.domain().same_set(a))
    throw Error("phi must be defined on exactly the subgroup A");
  if (validate) {
    if (a.order() != b.order())
      throw Error("A and B have different orders; phi cannot be an isomorphism");
    if (!phi.image().same_set(b))
      throw Error("phi does not map A onto B");
    if (!phi.is_injective()) throw Error("phi is not injective");
    if (!phi.is_multiplicative()) throw Error("phi is not a homomorphism");
  }
  HnnPair pair;
  pair.G = g;
  pair.A = std::move(a);
  pair.B = std::move(b);
  pair.phi_inv = phi.inverse().with_codomain(pair.A);
  pair.phi = std::move(phi).with_codomain(pair.B);
  return pair;
}

HnnPair make_auto_pair(const Group& x, const GroupMap& gamma) {
  Subgroup whole = Subgroup::whole(x);
  if (gamma.domain().order() != x.order())
    throw Error("automorphism must be defined on the whole group");
  GroupMap g = gamma.with_codomain(whole);
  return make_pair(x, whole, whole, std::move(g), /*validate=*/true);
}

namespace {

Core finish_core(const HnnPair& pair, std::vector<Element> helems, int fix_index,
                 int orbit_bound) {
  Subgroup h = subgroup_from_sorted(pair.G, std::move(helems));
  GroupMap phi_h = restrict_onto(pair.phi, h);
  if (!phi_h.image().same_set(h))
    throw InternalCheckError("phi does not restrict to an automorphism of the core");
  Core core;
  core.H = h;
  core.phi_H = phi_h.with_codomain(h);
  core.fix_index = fix_index;
  core.orbit_bound = orbit_bound;
  return core;
}

}  // namespace

Core core_fixpoint(const HnnPair& pair) {
  // H_0 = A ∩ B; H_{i+1} = {h : h, phi(h), phi^{-1}(h) all in H_i}.
  std::vector<Element> cur = intersect(pair.A, pair.B).elements();
  int i = 0;
  while (true) {
    std::vector<Element> next;
    next.reserve(cur.size());
    for (const Element& h : cur) {
      Element fwd = pair.phi.apply(h);
      Element bwd = pair.phi_inv.apply(h);
      if (std::binary_search(cur.begin(), cur.end(), fwd) &&
          std::binary_search(cur.begin(), cur.end(), bwd))
        next.push_back(h);
    }
    if (next.size() == cur.size()) break;
    cur = std::move(next);
    ++i;
  }
  return finish_core(pair, std::move(cur), i, -1);
}

Core core_orbit(const HnnPair& pair) {
  // S_1 = A, S_{s+1} = {a in A : phi(a) in S_s}; the first repeat is the
  // core.  S_0 = G by convention, so the bound is 0 exactly when A = G and
  // already S_1 = S_0.
  const std::vector<Element>& aelems = pair.A.elements();
  std::vector<Element> cur = aelems;
  int s = pair.A.order() == pair.G.order() ? 0 : 1;
  if (s == 1) {
    while (true) {
      std::vector<Element> next;
      next.reserve(cur.size());
      for (const Element& a : aelems) {
        Element fwd = pair.phi.apply(a);
        if (std::binary_search(cur.begin(), cur.end(), fwd)) next.push_back(a);
      }
      if (next.size() == cur.size()) break;
      cur = std::move(next);
      ++s;
    }
  }
  Core fix = core_fixpoint(pair);
  if (fix.H.elements() != cur)
    throw InternalCheckError("core algorithms disagree: fixpoint gives order " +
                             std::to_string(fix.H.order()) + ", orbit gives order " +
                             std::to_string(cur.size()));
  fix.orbit_bound = s;
  return fix;
}

Core compute_core(const HnnPair& pair) { return core_orbit(pair); }

std::uint64_t core_automorphism_order(const Core& core) {
  return automorphism_order(core.phi_H);
}

HnnPair twisted_pair(const HnnPair& pair, const Element& a, const Element& b) {
  if (!pair.A.contains(a))
    throw Error("twist element " + format_element(a) + " is not in A");
  if (!pair.B.contains(b))
    throw Error("twist element " + format_element(b) + " is not in B");
  const Group& g = pair.G;
  const std::vector<Element>& dom = pair.A.elements();
  std::vector<Element> images;
  images.reserve(dom.size());
  for (const Element& x : dom)
    images.push_back(g.conjugate(pair.phi.apply(g.conjugate(x, a)), b));
  GroupMap psi = GroupMap::from_table(pair.A, pair.B, std::move(images),
                                      /*validate=*/false);
  HnnPair out;
  out.G = g;
  out.A = pair.A;
  out.B = pair.B;
  out.phi_inv = psi.inverse().with_codomain(out.A);
  out.phi = std::move(psi);
  return out;
}

InducedPair induced_pair(const HnnPair& pair, const Subgroup& n, std::uint64_t cap) {
  if (!n.ambient().same_as(pair.G))
    throw Error("induced pair requires a subgroup of the same group");
  Subgroup an = intersect(pair.A, n);
  Subgroup bn = intersect(pair.B, n);
  if (!map_image(pair.phi, an).same_set(bn))
    throw Error("phi(A ∩ N) differs from B ∩ N; the induced pair is undefined");
  QuotientResult q = quotient(pair.G, n, cap);
  Subgroup qa = q.project_subgroup(pair.A);
  Subgroup qb = q.project_subgroup(pair.B);
  std::vector<std::pair<Element, Element>> table;
  table.reserve(pair.A.elements().size());
  for (const Element& x : pair.A.elements())
    table.emplace_back(q.project(x), q.project(pair.phi.apply(x)));
  std::sort(table.begin(), table.end());
  table.erase(std::unique(table.begin(), table.end()), table.end());
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    if (table[i].first == table[i + 1].first)
      throw InternalCheckError("induced map is not well defined");
  if (table.size() != qa.order())
    throw InternalCheckError("induced map misses part of the projected domain");
  GroupMap phi_q = GroupMap::from_pairs(qa, qb, table, /*validate=*/false);
  if (phi_q.image().order() != qb.order())
    throw InternalCheckError("induced map is not onto the projected codomain");
  InducedPair out;
  out.pair = make_pair(q.group(), std::move(qa), std::move(qb), std::move(phi_q),
                       /*validate=*/false);
  out.onto = std::move(q);
  return out;
}

InducedPair induced_layer_pair(const HnnPair& pair, const Filtration& f,
                               std::size_t i, std::size_t j, std::uint64_t cap) {
  if (i >= j || j >= f.terms.size())
    throw Error("layer indices must satisfy i < j within the filtration");
  const Subgroup& gi = f.terms[i];
  const Subgroup& gj = f.terms[j];
  Subgroup aj = intersect(pair.A, gj);
  Subgroup bj = intersect(pair.B, gj);
  if (!map_image(pair.phi, aj).same_set(bj))
    throw Error("phi(A ∩ G_j) differs from B ∩ G_j; the layer pair is undefined");
  Subgroup ai = intersect(pair.A, gi);
  Subgroup bi = intersect(pair.B, gi);
  if (!map_image(pair.phi, ai).same_set(bi))
    throw Error("phi(A ∩ G_i) differs from B ∩ G_i; the layer pair is undefined");
  QuotientResult q = quotient(pair.G, gj, cap);
  Subgroup li = q.project_subgroup(gi);
  Group layer = promote(li);
  auto project_into_layer = [&](const Subgroup& s) {
    std::vector<Element> out;
    out.reserve(s.elements().size());
    for (const Element& e : s.elements()) out.push_back(q.project(e));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return Subgroup::from_elements_unchecked(layer, std::move(out));
  };
  Subgroup la = project_into_layer(ai);
  Subgroup lb = project_into_layer(bi);
  std::vector<std::pair<Element, Element>> table;
  for (const Element& x : ai.elements())
    table.emplace_back(q.project(x), q.project(pair.phi.apply(x)));
  std::sort(table.begin(), table.end());
  table.erase(std::unique(table.begin(), table.end()), table.end());
  for (std::size_t k = 0; k + 1 < table.size(); ++k)
    if (table[k].first == table[k + 1].first)
      throw InternalCheckError("layer map is not well defined");
  GroupMap phi_l = GroupMap::from_pairs(la, lb, table, /*validate=*/false);
  if (phi_l.image().order() != lb.order())
    throw InternalCheckError("layer map is not onto its codomain");
  InducedPair out;
  out.pair = make_pair(layer, std::move(la), std::move(lb), std::move(phi_l),
                       /*validate=*/false);
  out.onto = std::move(q);
  return out;
}

EmbeddingCheck embedding_into_conjugation(const GroupMap& alpha, const HnnPair& src,
                                          const Group& y_group, const Element& y) {
  EmbeddingCheck out;
  auto fail = [&](const std::string& why) {
    out.ok = false;
    out.failure = why;
    return out;
  };
  if (!y_group.contains(y)) return fail("conjugating element outside target group");
  if (alpha.domain().order() != src.G.order())
    return fail("embedding is not defined on the whole source group");
  if (!alpha.codomain().ambient().same_as(y_group))
    return fail("embedding lands in the wrong group");
  if (!alpha.is_injective()) return fail("embedding is not injective");
  if (!alpha.is_multiplicative()) return fail("embedding is not a homomorphism");
  for (const Element& a : src.A.elements()) {
    Element lhs = alpha.apply(src.phi.apply(a));
    Element rhs = y_group.conjugate(alpha.apply(a), y);
    if (lhs != rhs)
      return fail("conjugation by the stable element does not realize phi at " +
                  format_element(a));
  }
  return out;
}

EmbeddingCheck embedding_into_automorphism(const GroupMap& alpha, const HnnPair& src,
                                           const GroupMap& gamma) {
  EmbeddingCheck out;
  auto fail = [&](const std::string& why) {
    out.ok = false;
    out.failure = why;
    return out;
  };
  const Group& x = gamma.domain().ambient();
  if (gamma.domain().order() != x.order())
    return fail("gamma is not defined on the whole target group");
  if (!gamma.image().same_set(gamma.domain()))
    return fail("gamma is not an automorphism");
  if (alpha.domain().order() != src.G.order())
    return fail("embedding is not defined on the whole source group");
  if (!alpha.codomain().ambient().same_as(x))
    return fail("embedding lands in the wrong group");
  if (!alpha.is_injective()) return fail("embedding is not injective");
  if (!alpha.is_multiplicative()) return fail("embedding is not a homomorphism");
  for (const Element& a : src.A.elements()) {
    Element lhs = alpha.apply(src.phi.apply(a));
    Element rhs = gamma.apply(alpha.apply(a));
    if (lhs != rhs)
      return fail("gamma does not extend phi through the embedding at " +
                  format_element(a));
  }
  return out;
}

Wrap semidirect_wrap(const Group& x, const GroupMap& gamma) {
  if (gamma.domain().order() != x.order() ||
      !gamma.domain().ambient().same_as(x))
    throw Error("wrap requires an automorphism of the whole group");
  std::uint64_t ord = automorphism_order(gamma);
  std::uint64_t p = static_cast<std::uint64_t>(x.prime());
  if (!is_power_of(ord, p))
    throw Error("automorphism order " + std::to_string(ord) +
                " is not a power of p; the wrap does not exist");
  int k = 0;
  for (std::uint64_t v = ord; v > 1; v /= p) ++k;
  Wrap wrap;
  wrap.Y = make_cyclic_extension(x.prime(), k, x, gamma.table());
  wrap.y = wrap.Y.identity();
  if (k > 0) wrap.y[0] = 1;
  // Inclusion X -> Y; packing preserves lexicographic order, so the image
  // list stays aligned with the sorted domain.
  std::vector<Element> yimg;
  for (const Element& e : x.elements()) {
    Element img(wrap.Y.width());
    img[0] = 0;
    std::copy(e.begin(), e.end(), img.begin() + 1);
    yimg.push_back(img);
  }
  Subgroup dom = Subgroup::whole(x);
  Subgroup cod = Subgroup::from_elements_unchecked(wrap.Y, yimg);
  // ydom is sorted (x.elements() is sorted) and packing preserves order.
  wrap.include = GroupMap::from_table(dom, cod, std::move(yimg), /*validate=*/false);
  // Invariant: conjugation by y realizes gamma on the fiber.
  for (const Element& e : x.elements()) {
    Element lhs = wrap.include.apply(gamma.apply(e));
    Element rhs = wrap.Y.conjugate(wrap.include.apply(e), wrap.y);
    if (lhs != rhs)
      throw InternalCheckError("wrap conjugation does not realize the twist");
  }
  return wrap;
}

}  // namespace resp
