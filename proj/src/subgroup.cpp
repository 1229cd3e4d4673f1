#include "resp/subgroup.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace resp {

namespace {

bool sorted_contains(const std::vector<Element>& v, const Element& e) {
  return std::binary_search(v.begin(), v.end(), e);
}

std::vector<Element> closure_elements(const Group& g,
                                      const std::vector<Element>& gens,
                                      std::uint64_t cap) {
  std::unordered_set<Element, ElementHash> seen;
  std::deque<Element> queue;
  Element id = g.identity();
  seen.insert(id);
  queue.push_back(id);
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const Element& gen : gens) {
      for (const Element& step : {g.mul(cur, gen), g.mul(cur, g.inverse(gen))}) {
        if (seen.insert(step).second) {
          if (seen.size() > cap)
            throw Error("subgroup closure exceeds cap " + std::to_string(cap));
          queue.push_back(step);
        }
      }
    }
  }
  std::vector<Element> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Subgroup Subgroup::whole(const Group& g) {
  auto data = std::make_shared<Data>();
  data->ambient = g;
  data->whole = true;
  data->gens = g.generators();
  return Subgroup(std::move(data));
}

Subgroup Subgroup::trivial(const Group& g) {
  auto data = std::make_shared<Data>();
  data->ambient = g;
  data->elems = {g.identity()};
  data->have_elems = true;
  return Subgroup(std::move(data));
}

Subgroup Subgroup::closure(const Group& g, std::vector<Element> gens,
                           std::uint64_t cap) {
  for (const Element& e : gens)
    if (!g.contains(e))
      throw Error("closure generator " + format_element(e) + " outside ambient group");
  auto data = std::make_shared<Data>();
  data->ambient = g;
  data->elems = closure_elements(g, gens, cap);
  data->have_elems = true;
  data->gens = std::move(gens);
  if (data->elems.size() == g.order()) data->whole = true;
  return Subgroup(std::move(data));
}

Subgroup Subgroup::from_elements(const Group& g, std::vector<Element> elems,
                                 std::vector<Element> gens) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  if (elems.empty()) throw Error("subgroup element list is empty");
  for (const Element& e : elems)
    if (!g.contains(e))
      throw Error("subgroup element " + format_element(e) + " outside ambient group");
  if (!sorted_contains(elems, g.identity()))
    throw Error("subgroup element list lacks the identity");
  for (const Element& e : elems) {
    if (!sorted_contains(elems, g.inverse(e)))
      throw Error("subgroup element list not closed under inversion");
  }
  // Full pairwise closure check; quadratic, but the lists that reach the
  // validating entry point are small.
  for (const Element& a : elems)
    for (const Element& b : elems)
      if (!sorted_contains(elems, g.mul(a, b)))
        throw Error("subgroup element list not closed under multiplication");
  return from_elements_unchecked(g, std::move(elems), std::move(gens));
}

Subgroup Subgroup::from_elements_unchecked(const Group& g, std::vector<Element> elems,
                                           std::vector<Element> gens) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  auto data = std::make_shared<Data>();
  data->ambient = g;
  data->elems = std::move(elems);
  data->have_elems = true;
  if (gens.empty()) {
    data->gens = data->elems;  // crude but always valid
  } else {
    data->gens = std::move(gens);
  }
  if (data->elems.size() == g.order()) data->whole = true;
  return Subgroup(std::move(data));
}

std::uint64_t Subgroup::order() const {
  if (data_->have_elems) return data_->elems.size();
  return data_->ambient.order();
}

bool Subgroup::contains(const Element& e) const {
  if (data_->whole) return data_->ambient.contains(e);
  return sorted_contains(elements(), e);
}

const std::vector<Element>& Subgroup::elements() const {
  if (!data_->have_elems) {
    data_->elems = data_->ambient.elements();
    data_->have_elems = true;
  }
  return data_->elems;
}

bool Subgroup::same_set(const Subgroup& o) const {
  if (!ambient().same_as(o.ambient())) return false;
  if (is_whole() && o.is_whole()) return true;
  if (order() != o.order()) return false;
  if (is_whole() || o.is_whole()) return true;  // equal orders, one is whole
  return elements() == o.elements();
}

bool Subgroup::subset_of(const Subgroup& o) const {
  if (!ambient().same_as(o.ambient())) return false;
  if (o.is_whole()) return true;
  if (order() > o.order()) return false;
  for (const Element& e : elements())
    if (!o.contains(e)) return false;
  return true;
}

Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  if (!a.ambient().same_as(b.ambient()))
    throw Error("intersection requires a common ambient group");
  if (a.is_whole()) return b;
  if (b.is_whole()) return a;
  const Subgroup& small = a.order() <= b.order() ? a : b;
  const Subgroup& large = a.order() <= b.order() ? b : a;
  std::vector<Element> out;
  for (const Element& e : small.elements())
    if (large.contains(e)) out.push_back(e);
  return Subgroup::from_elements_unchecked(a.ambient(), std::move(out));
}

Subgroup conjugate_subgroup(const Subgroup& s, const Element& g) {
  const Group& amb = s.ambient();
  if (!amb.contains(g)) throw Error("conjugating element outside ambient group");
  if (s.is_whole()) return s;
  std::vector<Element> out;
  out.reserve(s.elements().size());
  for (const Element& e : s.elements()) out.push_back(amb.conjugate(e, g));
  std::vector<Element> gens;
  for (const Element& e : s.gens()) gens.push_back(amb.conjugate(e, g));
  return Subgroup::from_elements_unchecked(amb, std::move(out), std::move(gens));
}

bool is_normal(const Subgroup& s) {
  if (s.is_whole()) return true;
  const Group& amb = s.ambient();
  for (const Element& g : amb.generators())
    for (const Element& h : s.gens())
      if (!s.contains(amb.conjugate(h, g))) return false;
  return true;
}

Subgroup normal_closure(const Group& g, const std::vector<Element>& seeds,
                        std::uint64_t cap) {
  // Grow a generating set: close under group operations, then add any
  // generator conjugate that escaped and repeat.  Conjugation by ambient
  // generators of a generating set suffices for normality.
  std::vector<Element> gens;
  for (const Element& s : seeds) {
    if (!g.contains(s)) throw Error("normal closure seed outside ambient group");
    if (!g.is_identity(s)) gens.push_back(s);
  }
  std::vector<Element> ggens = g.generators();
  std::vector<Element> elems = closure_elements(g, gens, cap);
  while (true) {
    bool grew = false;
    std::size_t n = gens.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (const Element& gen : ggens) {
        for (const Element& c :
             {g.conjugate(gens[i], gen), g.conjugate(gens[i], g.inverse(gen))}) {
          if (!std::binary_search(elems.begin(), elems.end(), c)) {
            gens.push_back(c);
            grew = true;
          }
        }
      }
    }
    if (!grew) break;
    elems = closure_elements(g, gens, cap);
  }
  return Subgroup::from_elements_unchecked(g, std::move(elems), std::move(gens));
}

Subgroup commutator_subgroup(const Subgroup& s, const Subgroup& t,
                             std::uint64_t cap) {
  if (!s.ambient().same_as(t.ambient()))
    throw Error("commutator requires a common ambient group");
  const Group& g = s.ambient();
  std::vector<Element> seeds;
  for (const Element& a : s.gens())
    for (const Element& b : t.gens()) {
      Element c = g.commutator(a, b);
      if (!g.is_identity(c)) seeds.push_back(c);
    }
  return normal_closure(g, seeds, cap);
}

Subgroup subgroup_product(const Subgroup& a, const Subgroup& n) {
  if (!a.ambient().same_as(n.ambient()))
    throw Error("product requires a common ambient group");
  if (a.is_whole()) return a;
  if (n.is_whole()) return n;
  const Group& g = a.ambient();
  std::vector<Element> out;
  out.reserve(a.elements().size() * n.elements().size());
  for (const Element& x : a.elements())
    for (const Element& y : n.elements()) out.push_back(g.mul(x, y));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<Element> gens = a.gens();
  gens.insert(gens.end(), n.gens().begin(), n.gens().end());
  return Subgroup::from_elements(g, std::move(out), std::move(gens));
}

Group promote(const Subgroup& s) {
  if (s.is_whole()) return s.ambient();
  return promote_subgroup(s.ambient(), s.elements(), s.gens());
}

}  // namespace resp
