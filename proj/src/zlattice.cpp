#include "resp/zlattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace resp {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error("integer overflow in lattice arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error("integer overflow in lattice arithmetic");
  return r;
}

namespace {

// col_j -= q * col_k, applied to a column-major working copy.
void axpy(ZVec& target, const ZVec& src, std::int64_t q) {
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = checked_add(target[i], checked_mul(-q, src[i]));
}

}  // namespace

ZMat hermite_basis(std::size_t dim, const std::vector<ZVec>& cols) {
  std::vector<ZVec> work = cols;
  for (const ZVec& c : work)
    if (c.size() != dim) throw Error("hermite_basis: column size mismatch");

  ZMat basis;  // chosen pivot columns, in pivot-row order
  std::size_t start = 0;
  for (std::size_t row = 0; row < dim; ++row) {
    // Eliminate row `row` across the not-yet-pivot columns by gcd steps.
    while (true) {
      std::size_t best = work.size();
      for (std::size_t j = start; j < work.size(); ++j) {
        if (work[j][row] == 0) continue;
        if (best == work.size() ||
            std::llabs(work[j][row]) < std::llabs(work[best][row]))
          best = j;
      }
      if (best == work.size())
        throw Error("hermite_basis: lattice is not full rank");
      std::swap(work[start], work[best]);
      bool clean = true;
      for (std::size_t j = start + 1; j < work.size(); ++j) {
        if (work[j][row] == 0) continue;
        std::int64_t q = work[j][row] / work[start][row];
        axpy(work[j], work[start], q);
        if (work[j][row] != 0) clean = false;
      }
      if (clean) break;
    }
    if (work[start][row] < 0)
      for (auto& x : work[start]) x = -x;
    basis.push_back(work[start]);
    ++start;
  }
  // Entries above each pivot are zero by construction (earlier rows were
  // eliminated from every column that became a later pivot).
  return basis;
}

ZVec hermite_reduce(const ZMat& basis, ZVec v) {
  for (std::size_t row = 0; row < basis.size(); ++row) {
    std::int64_t piv = basis[row][row];
    std::int64_t q = v[row] / piv;
    if (v[row] - checked_mul(q, piv) < 0) --q;  // floor division
    if (q != 0) axpy(v, basis[row], q);
  }
  return v;
}

SmithForm smith_form(ZMat m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  SmithForm out;
  out.left.assign(rows, ZVec(rows, 0));
  for (std::size_t i = 0; i < rows; ++i) out.left[i][i] = 1;
  out.diag.assign(rows, 0);

  auto row_sub = [&](std::size_t i, std::size_t k, std::int64_t q) {
    for (std::size_t c = 0; c < cols; ++c)
      m[i][c] = checked_add(m[i][c], checked_mul(-q, m[k][c]));
    for (std::size_t c = 0; c < rows; ++c)
      out.left[i][c] = checked_add(out.left[i][c], checked_mul(-q, out.left[k][c]));
  };
  auto row_swap = [&](std::size_t i, std::size_t k) {
    std::swap(m[i], m[k]);
    std::swap(out.left[i], out.left[k]);
  };
  auto col_sub = [&](std::size_t j, std::size_t k, std::int64_t q) {
    for (std::size_t r = 0; r < rows; ++r)
      m[r][j] = checked_add(m[r][j], checked_mul(-q, m[r][k]));
  };

  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Locate the smallest nonzero entry in the trailing block.
    std::size_t pr = rows, pc = cols;
    for (std::size_t r = t; r < rows; ++r)
      for (std::size_t c = t; c < cols; ++c) {
        if (m[r][c] == 0) continue;
        if (pr == rows || std::llabs(m[r][c]) < std::llabs(m[pr][pc])) {
          pr = r;
          pc = c;
        }
      }
    if (pr == rows) break;  // trailing block is zero
    row_swap(t, pr);
    if (pc != t)
      for (std::size_t r = 0; r < rows; ++r) std::swap(m[r][t], m[r][pc]);

    bool again = false;
    for (std::size_t r = t + 1; r < rows; ++r) {
      if (m[r][t] == 0) continue;
      row_sub(r, t, m[r][t] / m[t][t]);
      if (m[r][t] != 0) again = true;
    }
    for (std::size_t c = t + 1; c < cols; ++c) {
      if (m[t][c] == 0) continue;
      col_sub(c, t, m[t][c] / m[t][t]);
      if (m[t][c] != 0) again = true;
    }
    if (again) continue;  // re-pick pivot until row and column are clear

    if (m[t][t] < 0) {
      for (std::size_t c = 0; c < cols; ++c) m[t][c] = -m[t][c];
      for (std::size_t c = 0; c < rows; ++c) out.left[t][c] = -out.left[t][c];
    }
    // Enforce the divisibility chain: if some later entry is not divisible
    // by the pivot, fold its row in and redo this pivot.
    bool fixed = false;
    for (std::size_t r = t + 1; r < rows && !fixed; ++r)
      for (std::size_t c = t + 1; c < cols && !fixed; ++c)
        if (m[r][c] % m[t][t] != 0) {
          row_sub(t, r, -1);
          fixed = true;
        }
    if (fixed) continue;
    out.diag[t] = m[t][t];
    ++t;
  }
  return out;
}

}  // namespace resp
