#pragma once

// Integer-lattice utilities shared by the abelian machinery: Hermite normal
// form (canonical coset representatives in quotients of f.g. abelian groups)
// and Smith normal form with a recorded left transform (explicit cokernel
// coordinates).  Matrices are small and dense; entries are checked against
// 64-bit overflow rather than assumed safe.

#include <cstdint>
#include <vector>

#include "resp/element.hpp"

namespace resp {

using ZVec = std::vector<std::int64_t>;
using ZMat = std::vector<ZVec>;  // row-major: mat[r][c]

std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);

// Hermite basis of the full-rank lattice spanned by the columns of `cols`
// (each column a ZVec of length dim).  Result is a lower-triangular dim x dim
// matrix with positive diagonal; throws Error if the lattice has rank < dim.
ZMat hermite_basis(std::size_t dim, const std::vector<ZVec>& cols);

// Lexicographically least non-negative representative of v + L, where L is
// given by a hermite_basis result.  Reduces coordinates left to right.
ZVec hermite_reduce(const ZMat& basis, ZVec v);

struct SmithForm {
  ZMat left;                       // unimodular U with U*M*V = diag
  std::vector<std::int64_t> diag;  // length = rows, non-negative
};

// Smith normal form of the rows x cols matrix `m`; only the left transform is
// recorded (column operations are not needed for cokernel coordinates).
SmithForm smith_form(ZMat m);

}  // namespace resp
