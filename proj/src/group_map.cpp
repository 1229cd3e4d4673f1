#include "resp/group_map.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace resp {

namespace {

std::size_t index_in(const std::vector<Element>& sorted, const Element& e) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), e);
  if (it == sorted.end() || *it != e)
    throw Error("element " + format_element(e) + " outside map domain");
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

GroupMap GroupMap::from_table(Subgroup dom, Subgroup cod, std::vector<Element> images,
                              bool validate) {
  const std::vector<Element>& delems = dom.elements();
  if (images.size() != delems.size())
    throw Error("image table size does not match domain order");
  for (const Element& e : images)
    if (!cod.contains(e)) throw Error("map image outside codomain");
  auto data = std::make_shared<Data>();
  data->dom = std::move(dom);
  data->cod = std::move(cod);
  data->images = std::move(images);
  GroupMap f(std::move(data));
  if (validate && !f.is_multiplicative())
    throw Error("image table is not a homomorphism");
  return f;
}

GroupMap GroupMap::from_pairs(Subgroup dom, Subgroup cod,
                              const std::vector<std::pair<Element, Element>>& pairs,
                              bool validate) {
  const std::vector<Element>& delems = dom.elements();
  std::vector<Element> images(delems.size());
  std::vector<bool> seen(delems.size(), false);
  for (const auto& [from, to] : pairs) {
    std::size_t i = index_in(delems, from);
    if (seen[i] && images[i] != to)
      throw Error("conflicting images for " + format_element(from));
    seen[i] = true;
    images[i] = to;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw Error("no image provided for " + format_element(delems[i]));
  return from_table(std::move(dom), std::move(cod), std::move(images), validate);
}

GroupMap GroupMap::from_generator_images(const Group& dom_ambient,
                                         const std::vector<Element>& gens,
                                         const Group& cod_ambient,
                                         const std::vector<Element>& images,
                                         std::uint64_t cap) {
  if (gens.size() != images.size())
    throw Error("generator and image counts differ");
  for (const Element& g : gens)
    if (!dom_ambient.contains(g)) throw Error("map generator outside domain group");
  for (const Element& h : images)
    if (!cod_ambient.contains(h)) throw Error("map image outside codomain group");

  std::unordered_map<Element, Element, ElementHash> table;
  std::deque<Element> queue;
  table[dom_ambient.identity()] = cod_ambient.identity();
  queue.push_back(dom_ambient.identity());
  // Also seed inverse steps so the walk covers the closure of the gens.
  std::vector<std::pair<Element, Element>> steps;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    steps.emplace_back(gens[i], images[i]);
    steps.emplace_back(dom_ambient.inverse(gens[i]), cod_ambient.inverse(images[i]));
  }
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    const Element& cur_img = table.at(cur);
    for (const auto& [g, h] : steps) {
      Element next = dom_ambient.mul(cur, g);
      Element next_img = cod_ambient.mul(cur_img, h);
      auto [it, fresh] = table.emplace(next, next_img);
      if (fresh) {
        if (table.size() > cap)
          throw Error("generated subgroup exceeds cap " + std::to_string(cap));
        queue.push_back(next);
      } else if (it->second != next_img) {
        throw Error("generator images do not extend to a homomorphism");
      }
    }
  }
  std::vector<Element> delems,ims;
  delems.reserve(table.size());
  for (const auto& [k, v] : table) delems.push_back(k);
  std::sort(delems.begin(), delems.end());
  ims.reserve(table.size());
  std::unordered_set<Element, ElementHash> imset;
  for (const Element& e : delems) {
    ims.push_back(table.at(e));
    imset.insert(ims.back());
  }
  Subgroup dom = Subgroup::from_elements_unchecked(dom_ambient, delems, gens);
  std::vector<Element> imelems(imset.begin(), imset.end());
  Subgroup cod = Subgroup::from_elements_unchecked(cod_ambient, std::move(imelems), images);
  auto data = std::make_shared<Data>();
  data->dom = std::move(dom);
  data->cod = std::move(cod);
  data->images = std::move(ims);
  return GroupMap(std::move(data));
}

GroupMap GroupMap::identity_on(const Subgroup& s) {
  auto data = std::make_shared<Data>();
  data->dom = s;
  data->cod = s;
  data->images = s.elements();
  return GroupMap(std::move(data));
}

GroupMap GroupMap::conjugation(const Subgroup& s, const Element& g) {
  const Group& amb = s.ambient();
  if (!amb.contains(g)) throw Error("conjugating element outside ambient group");
  Subgroup cod = conjugate_subgroup(s, g);
  std::vector<Element> images;
  images.reserve(s.elements().size());
  for (const Element& e : s.elements()) images.push_back(amb.conjugate(e, g));
  auto data = std::make_shared<Data>();
  data->dom = s;
  data->cod = std::move(cod);
  data->images = std::move(images);
  return GroupMap(std::move(data));
}

Element GroupMap::apply(const Element& e) const {
  return data_->images[index_in(data_->dom.elements(), e)];
}

std::vector<std::pair<Element, Element>> GroupMap::table() const {
  const std::vector<Element>& delems = data_->dom.elements();
  std::vector<std::pair<Element, Element>> out;
  out.reserve(delems.size());
  for (std::size_t i = 0; i < delems.size(); ++i)
    out.emplace_back(delems[i], data_->images[i]);
  return out;
}

Subgroup GroupMap::image() const {
  std::vector<Element> ims = data_->images;
  std::sort(ims.begin(), ims.end());
  ims.erase(std::unique(ims.begin(), ims.end()), ims.end());
  return Subgroup::from_elements_unchecked(data_->cod.ambient(), std::move(ims));
}

bool GroupMap::is_multiplicative() const {
  const std::vector<Element>& delems = data_->dom.elements();
  const Group& d = data_->dom.ambient();
  const Group& c = data_->cod.ambient();
  for (std::size_t i = 0; i < delems.size(); ++i)
    for (std::size_t j = 0; j < delems.size(); ++j) {
      Element prod = d.mul(delems[i], delems[j]);
      Element expect = c.mul(data_->images[i], data_->images[j]);
      if (apply(prod) != expect) return false;
    }
  return true;
}

bool GroupMap::is_injective() const {
  std::unordered_set<Element, ElementHash> seen;
  for (const Element& e : data_->images)
    if (!seen.insert(e).second) return false;
  return true;
}

GroupMap GroupMap::inverse() const {
  if (!is_injective()) throw Error("cannot invert a non-injective map");
  const std::vector<Element>& delems = data_->dom.elements();
  Subgroup img = image();
  const std::vector<Element>& ielems = img.elements();
  std::vector<Element> inv_images(ielems.size());
  for (std::size_t i = 0; i < delems.size(); ++i)
    inv_images[index_in(ielems, data_->images[i])] = delems[i];
  auto data = std::make_shared<Data>();
  data->dom = std::move(img);
  data->cod = data_->dom;
  data->images = std::move(inv_images);
  return GroupMap(std::move(data));
}

GroupMap GroupMap::compose(const GroupMap& inner) const {
  const std::vector<Element>& delems = inner.domain().elements();
  std::vector<Element> images;
  images.reserve(delems.size());
  for (const Element& e : delems) images.push_back(apply(inner.apply(e)));
  auto data = std::make_shared<Data>();
  data->dom = inner.domain();
  data->cod = data_->cod;
  data->images = std::move(images);
  return GroupMap(std::move(data));
}

GroupMap GroupMap::restrict(const Subgroup& s) const {
  if (!s.subset_of(data_->dom))
    throw Error("restriction target is not contained in the domain");
  std::vector<Element> images;
  images.reserve(s.elements().size());
  for (const Element& e : s.elements()) images.push_back(apply(e));
  auto data = std::make_shared<Data>();
  data->dom = s;
  data->cod = data_->cod;
  data->images = std::move(images);
  return GroupMap(std::move(data));
}

GroupMap GroupMap::with_codomain(const Subgroup& cod) const {
  for (const Element& e : data_->images)
    if (!cod.contains(e)) throw Error("image escapes the requested codomain");
  auto data = std::make_shared<Data>();
  data->dom = data_->dom;
  data->cod = cod;
  data->images = data_->images;
  return GroupMap(std::move(data));
}

std::uint64_t automorphism_order(const GroupMap& f) {
  const std::vector<Element>& delems = f.domain().elements();
  // Domain and image must agree as sets.
  Subgroup img = f.image();
  if (!img.same_set(f.domain()) || img.order() != f.domain().order())
    throw Error("map does not permute its domain");
  std::vector<std::size_t> perm(delems.size());
  for (std::size_t i = 0; i < delems.size(); ++i)
    perm[i] = static_cast<std::size_t>(
        std::lower_bound(delems.begin(), delems.end(), f.apply(delems[i])) -
        delems.begin());
  std::vector<bool> used(delems.size(), false);
  std::uint64_t ord = 1;
  for (std::size_t i = 0; i < delems.size(); ++i) {
    if (used[i]) continue;
    std::uint64_t len = 0;
    std::size_t j = i;
    while (!used[j]) {
      used[j] = true;
      j = perm[j];
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  return ord;
}

Subgroup map_image(const GroupMap& f, const Subgroup& s) {
  std::vector<Element> ims;
  ims.reserve(s.elements().size());
  for (const Element& e : s.elements()) ims.push_back(f.apply(e));
  std::sort(ims.begin(), ims.end());
  ims.erase(std::unique(ims.begin(), ims.end()), ims.end());
  return Subgroup::from_elements_unchecked(f.codomain().ambient(), std::move(ims));
}

}  // namespace resp
