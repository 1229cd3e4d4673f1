#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resp/hnn.hpp"

namespace resp {

// One machine-checkable claim about a reference pair.  Checks rebuild their
// answer from scratch each run; they never cache across runs.
struct Fact {
  std::string id;               // stable identifier, e.g. "core-trivial"
  std::string claim;            // human-readable statement of the expectation
  std::function<bool()> check;  // re-verifies the claim
};

struct Fixture {
  std::string name;
  std::string summary;
  HnnPair pair;
  std::vector<Fact> facts;
};

// G = F_p^3, A = <e1,e2>, B = <e1,e3>, phi(a1,a2,0) = (x a1, 0, y a1 + z a2).
// Requires x and z nonzero mod p.  The line <e1> is the intersection; the
// core is trivial exactly when y is nonzero, and the quotient by
// K = <e2,e3> always has full core with the induced map scaling by x.
Fixture abelian_rank3(std::int64_t p, Coord x, Coord y, Coord z);

// G = F_p^4, A = <e1,e2,e3>, B = <e1,e3,e4>,
// phi(a1,a2,a3,0) = (a a1, 0, b a1 + a2, c a1 + a3).  Requires a nonzero.
// The core is trivial whenever c is nonzero, yet the quotient by
// L = <e2,e3,e4> has full core: quotient cores can grow.
Fixture abelian_rank4(std::int64_t p, Coord a, Coord b, Coord c);

// G = P ⋉ F_3[P] with P = (Z/3)^2 of order 3^11; A and B are the
// sub-wreath pieces along the two coordinate lines of P, and phi shifts
// the supporting line with a twist by 2.  The core of phi is trivial, but
// one inner twist has a core of order 3 on which the twisted map has
// order 2 — so the extension is not residually 3.
Fixture wreath();

// Order-27 ambient with a cyclic-shift action, A and B cyclic of order 3,
// phi(a) = b^2.  Every central filtration fails the layer test, so the
// extension is not residually 3 even though the top-level core is trivial.
Fixture cyclic_shift();

// The bundled reference fixtures in report order.  `heavy` includes the
// order-3^11 wreath fixture; small consumers may skip it.
std::vector<Fixture> reference_fixtures(bool heavy = true);

struct FactResult {
  std::string fixture;
  std::string id;
  std::string claim;
  bool ok = false;
  std::string error;  // exception text when the check threw
};

// Runs every fact of the fixture; exceptions are caught and reported.
std::vector<FactResult> run_fixture(const Fixture& f);

}  // namespace resp
