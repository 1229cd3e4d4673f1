#include "resp/structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace resp {

namespace {

// Quotient group implementation: elements are canonical (lexicographically
// least) coset representatives.  For abelian parents the representative is
// computed by Hermite reduction against the kernel lattice; otherwise by a
// memoized minimum over the kernel coset.

class QuotientImpl final : public GroupOps {
public:
  QuotientImpl(Group parent, Subgroup kernel, std::uint64_t cap)
      : parent_(std::move(parent)) {
    nelems_ = kernel.elements();
    if (parent_.kind() == "abelian") {
      std::vector<std::int64_t> moduli =
          parent_.describe().at("moduli").get<std::vector<std::int64_t>>();
      std::vector<ZVec> cols;
      for (const Element& g : kernel.gens()) {
        ZVec v(g.begin(), g.end());
        cols.push_back(std::move(v));
      }
      for (std::size_t i = 0; i < moduli.size(); ++i) {
        ZVec v(moduli.size(), 0);
        v[i] = moduli[i];
        cols.push_back(std::move(v));
      }
      hermite_ = hermite_basis(moduli.size(), cols);
    }

    std::uint64_t expected = parent_.order() / nelems_.size();
    if (expected > cap)
      throw Error("quotient order " + std::to_string(expected) +
                  " exceeds cap " + std::to_string(cap));
    // Breadth-first walk over coset representatives.
    std::deque<Element> queue;
    std::unordered_set<Element, ElementHash> seen;
    Element id = parent_.identity();
    if (rep(id) != id)
      throw InternalCheckError("identity coset representative is not the identity");
    seen.insert(id);
    queue.push_back(id);
    std::vector<Element> steps;
    for (const Element& g : parent_.generators()) {
      steps.push_back(g);
      steps.push_back(parent_.inverse(g));
    }
    while (!queue.empty()) {
      Element cur = queue.front();
      queue.pop_front();
      for (const Element& g : steps) {
        Element next = rep(parent_.mul(cur, g));
        if (seen.insert(next).second) {
          if (seen.size() > expected)
            throw InternalCheckError("quotient walk found too many cosets");
          queue.push_back(next);
        }
      }
    }
    if (seen.size() != expected)
      throw InternalCheckError("quotient walk missed cosets");
    reps_.assign(seen.begin(), seen.end());
    std::sort(reps_.begin(), reps_.end());
    repset_ = std::move(seen);
    for (const Element& g : parent_.generators()) {
      Element r = rep(g);
      bool is_id = true;
      for (Coord c : r) is_id = is_id && c == 0;
      if (!is_id) gens_.push_back(r);
    }
    std::sort(gens_.begin(), gens_.end());
    gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
    if (gens_.empty() && reps_.size() > 1)
      throw InternalCheckError("quotient generators project to nothing");
  }

  Element rep(const Element& g) const {
    if (nelems_.size() == 1) return g;
    if (!hermite_.empty()) {
      ZVec v(g.begin(), g.end());
      ZVec r = hermite_reduce(hermite_, v);
      Element out(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) out[i] = static_cast<Coord>(r[i]);
      return out;
    }
    // Memoizing only pays off when cosets are expensive to scan; for small
    // kernels recomputation is cheaper than caching every queried element.
    bool memoize = nelems_.size() >= 16;
    if (memoize) {
      auto it = memo_.find(g);
      if (it != memo_.end()) return it->second;
    }
    Element best = parent_.mul(g, nelems_.front());
    for (std::size_t i = 1; i < nelems_.size(); ++i) {
      Element cand = parent_.mul(g, nelems_[i]);
      if (cand < best) best = cand;
    }
    if (memoize) memo_.emplace(g, best);
    return best;
  }

  std::size_t width() const override { return parent_.width(); }
  std::uint64_t order() const override { return reps_.size(); }
  std::int64_t prime() const override { return parent_.prime(); }
  Element mul(const Element& a, const Element& b) const override {
    return rep(parent_.mul(a, b));
  }
  Element inverse(const Element& a) const override {
    return rep(parent_.inverse(a));
  }
  bool contains(const Element& a) const override { return repset_.count(a) > 0; }
  std::vector<Element> generators() const override { return gens_; }
  void for_each(const std::function<void(const Element&)>& fn) const override {
    for (const Element& e : reps_) fn(e);
  }
  std::string kind() const override { return "quotient"; }
  nlohmann::json describe() const override {
    return {{"kind", "quotient"},
            {"kernel_order", nelems_.size()},
            {"parent", parent_.describe()}};
  }

private:
  Group parent_;
  std::vector<Element> nelems_;
  ZMat hermite_;
  std::vector<Element> reps_;
  std::unordered_set<Element, ElementHash> repset_;
  std::vector<Element> gens_;
  mutable std::unordered_map<Element, Element, ElementHash> memo_;
};

}  // namespace

Subgroup QuotientResult::project_subgroup(const Subgroup& s) const {
  if (!s.ambient().same_as(parent_))
    throw Error("projected subgroup lives in the wrong group");
  if (s.is_whole()) return Subgroup::whole(quotient_);
  std::vector<Element> out;
  out.reserve(s.elements().size());
  for (const Element& e : s.elements()) out.push_back(project_(e));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<Element> gens;
  for (const Element& g : s.gens()) gens.push_back(project_(g));
  return Subgroup::from_elements_unchecked(quotient_, std::move(out), std::move(gens));
}

GroupMap QuotientResult::projection_map(std::uint64_t cap) const {
  Subgroup dom = Subgroup::whole(parent_);
  std::vector<Element> elems = parent_.elements(cap);
  std::vector<Element> images;
  images.reserve(elems.size());
  for (const Element& e : elems) images.push_back(project_(e));
  return GroupMap::from_table(dom, Subgroup::whole(quotient_), std::move(images),
                              /*validate=*/false);
}

QuotientResult quotient(const Group& g, const Subgroup& n, std::uint64_t cap) {
  if (!n.ambient().same_as(g))
    throw Error("kernel subgroup lives in the wrong group");
  if (!is_normal(n)) throw Error("cannot quotient by a non-normal subgroup");
  auto impl = std::make_shared<QuotientImpl>(g, n, cap);
  QuotientResult qr;
  qr.parent_ = g;
  qr.quotient_ = Group(impl);
  qr.kernel_ = n;
  qr.project_ = [impl](const Element& e) { return impl->rep(e); };
  return qr;
}

Subgroup center(const Group& g, std::uint64_t cap) {
  std::vector<Element> elems = g.elements(cap);
  std::vector<Element> gens = g.generators();
  std::vector<Element> out;
  for (const Element& e : elems) {
    bool central = true;
    for (const Element& x : gens)
      if (g.mul(e, x) != g.mul(x, e)) {
        central = false;
        break;
      }
    if (central) out.push_back(e);
  }
  return Subgroup::from_elements_unchecked(g, std::move(out));
}

bool is_abelian(const Group& g) {
  std::vector<Element> gens = g.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (g.mul(gens[i], gens[j]) != g.mul(gens[j], gens[i])) return false;
  return true;
}

bool is_elementary_abelian(const Group& g) {
  if (!is_abelian(g)) return false;
  for (const Element& x : g.generators())
    if (!g.is_identity(g.power(x, static_cast<std::int64_t>(g.prime()))))
      return false;
  return true;
}

Filtration lower_central_series(const Group& g, std::uint64_t cap) {
  Filtration f;
  f.ambient = g;
  f.terms.push_back(Subgroup::whole(g));
  while (f.terms.back().order() > 1) {
    Subgroup next = commutator_subgroup(Subgroup::whole(g), f.terms.back(), cap);
    if (next.order() >= f.terms.back().order())
      throw InternalCheckError("lower central series fails to descend");
    f.terms.push_back(std::move(next));
  }
  return f;
}

std::vector<Subgroup> minimal_central_subgroups(const Group& g, std::uint64_t cap) {
  Subgroup z = center(g, cap);
  std::uint64_t p = static_cast<std::uint64_t>(g.prime());
  std::map<std::vector<Element>, Subgroup> found;
  for (const Element& e : z.elements()) {
    if (g.is_identity(e)) continue;
    if (g.element_order(e) != p) continue;
    Subgroup s = Subgroup::closure(g, {e});
    found.emplace(s.elements(), s);
  }
  std::vector<Subgroup> out;
  out.reserve(found.size());
  for (auto& [key, s] : found) out.push_back(std::move(s));
  return out;
}

std::vector<Subgroup> all_subgroups(const Group& g, std::uint64_t cap) {
  if (g.order() > cap)
    throw Error("subgroup lattice enumeration capped at order " + std::to_string(cap));
  std::vector<Element> elems = g.elements(cap);
  std::map<std::vector<Element>, Subgroup> found;
  std::deque<Subgroup> queue;
  Subgroup triv = Subgroup::trivial(g);
  found.emplace(triv.elements(), triv);
  queue.push_back(triv);
  while (!queue.empty()) {
    Subgroup cur = queue.front();
    queue.pop_front();
    for (const Element& e : elems) {
      if (cur.contains(e)) continue;
      std::vector<Element> gens = cur.gens();
      if (cur.order() == 1) gens.clear();
      gens.push_back(e);
      Subgroup next = Subgroup::closure(g, std::move(gens), g.order());
      auto [it, fresh] = found.emplace(next.elements(), next);
      if (fresh) queue.push_back(it->second);
    }
  }
  std::vector<Subgroup> out;
  out.reserve(found.size());
  for (auto& [key, s] : found) out.push_back(s);
  return out;
}

}  // namespace resp
