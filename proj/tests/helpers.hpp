#pragma once

#include <doctest.h>

#include <algorithm>
#include <initializer_list>
#include <random>
#include <vector>

#include "resp/element.hpp"
#include "resp/hnn.hpp"

namespace resp::testing {

inline Element el(std::initializer_list<Coord> c) { return Element(c); }

inline std::vector<Element> sorted(std::vector<Element> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// G = F_3^3, A = <e1,e2>, B = <e1,e3>, phi(a1,a2,0) = (x*a1, 0, y*a1 + z*a2).
inline HnnPair rank3_pair(Coord x, Coord y, Coord z) {
  Group g = make_abelian(3, {1, 1, 1});
  Subgroup a = Subgroup::closure(g, {el({1, 0, 0}), el({0, 1, 0})});
  Subgroup b = Subgroup::closure(g, {el({1, 0, 0}), el({0, 0, 1})});
  std::vector<Element> images;
  for (const Element& e : a.elements())
    images.push_back(el({static_cast<Coord>(x * e[0] % 3),
                         0,
                         static_cast<Coord>((y * e[0] + z * e[1]) % 3)}));
  GroupMap phi = GroupMap::from_table(a, b, images, /*validate=*/false);
  return make_pair(g, a, b, phi);
}

// Nonabelian order-27 example: cyclic shift action on F_3^3 / <(1,1,1)>,
// A, B cyclic of order 3 with phi(a) = b^2.
inline HnnPair shift27_pair() {
  ZMat shift = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  Group g = make_matrix_semidirect(3, 3, shift, {{1, 1, 1}});
  Element a = el({1, 0, 2, 2});
  Element b = el({1, 0, 0, 1});
  Subgroup sa = Subgroup::closure(g, {a});
  Subgroup sb = Subgroup::closure(g, {b});
  GroupMap phi = GroupMap::from_pairs(
      sa, sb,
      {{g.identity(), g.identity()},
       {a, g.mul(b, b)},
       {g.mul(a, a), b}},
      /*validate=*/true);
  return make_pair(g, sa, sb, phi);
}

}  // namespace resp::testing
