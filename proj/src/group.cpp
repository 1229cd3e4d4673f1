#include "resp/group.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace resp {

Element Group::power(const Element& a, std::int64_t n) const {
  Element base = a;
  if (n < 0) {
    base = inverse(a);
    n = -n;
  }
  Element acc = identity();
  while (n > 0) {
    if (n & 1) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return acc;
}

std::uint64_t Group::element_order(const Element& a) const {
  Element cur = a;
  std::uint64_t n = 1;
  while (!is_identity(cur)) {
    cur = mul(cur, a);
    ++n;
    if (n > order()) throw InternalCheckError("element order exceeds group order");
  }
  return n;
}

std::vector<Element> Group::elements(std::uint64_t cap) const {
  if (order() > cap)
    throw Error("group of order " + std::to_string(order()) +
                " exceeds enumeration cap " + std::to_string(cap));
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(order()));
  for_each([&](const Element& e) { out.push_back(e); });
  std::sort(out.begin(), out.end());
  if (out.size() != order()) throw InternalCheckError("universe size mismatch");
  return out;
}

namespace {

std::int64_t mod_reduce(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  if (r < 0) r += m;
  return r;
}

// ---------------------------------------------------------------------------
// Abelian groups: direct sums of cyclic p-groups.

class AbelianImpl final : public GroupOps {
public:
  AbelianImpl(std::int64_t p, std::vector<std::int64_t> moduli)
      : p_(p), moduli_(std::move(moduli)) {
    if (!is_prime(p_)) throw Error("p must be prime");
    order_ = 1;
    for (std::int64_t m : moduli_) {
      if (m < 1 || !is_power_of(static_cast<std::uint64_t>(m),
                                static_cast<std::uint64_t>(p_)))
        throw Error("each modulus must be a positive power of p");
      order_ = checked_mul(order_, m);
    }
  }

  std::size_t width() const override { return moduli_.size(); }
  std::uint64_t order() const override { return static_cast<std::uint64_t>(order_); }
  std::int64_t prime() const override { return p_; }

  Element mul(const Element& a, const Element& b) const override {
    check(a);
    check(b);
    Element r(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      r[i] = static_cast<Coord>(mod_reduce(static_cast<std::int64_t>(a[i]) + b[i], moduli_[i]));
    return r;
  }

  Element inverse(const Element& a) const override {
    check(a);
    Element r(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      r[i] = static_cast<Coord>(mod_reduce(-static_cast<std::int64_t>(a[i]), moduli_[i]));
    return r;
  }

  bool contains(const Element& a) const override {
    if (a.size() != moduli_.size()) return false;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      if (a[i] < 0 || a[i] >= moduli_[i]) return false;
    return true;
  }

  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      if (moduli_[i] == 1) continue;
      Element e(moduli_.size(), 0);
      e[i] = 1;
      gens.push_back(e);
    }
    return gens;
  }

  void for_each(const std::function<void(const Element&)>& fn) const override {
    Element cur(moduli_.size(), 0);
    while (true) {
      fn(cur);
      std::size_t i = moduli_.size();
      while (i > 0) {
        --i;
        if (cur[i] + 1 < moduli_[i]) {
          ++cur[i];
          std::fill(cur.begin() + static_cast<std::ptrdiff_t>(i) + 1, cur.end(), 0);
          break;
        }
        if (i == 0) return;
        cur[i] = 0;
      }
      if (moduli_.empty()) return;
    }
  }

  std::string kind() const override { return "abelian"; }

  nlohmann::json describe() const override {
    return {{"kind", "abelian"}, {"p", p_}, {"moduli", moduli_}};
  }

  const std::vector<std::int64_t>& moduli() const { return moduli_; }

private:
  void check(const Element& a) const {
    if (!contains(a)) throw Error("element " + format_element(a) + " not in abelian group");
  }

  std::int64_t p_;
  std::vector<std::int64_t> moduli_;
  std::int64_t order_;
};

// ---------------------------------------------------------------------------
// Cyclic group acting on an F_p vector-space quotient via a matrix.
//
// V = (Z/p)^n / span(relations); coset representatives are canonicalized by
// zeroing the pivot coordinates of the reduced row echelon basis of the
// relation span.

struct Fpspan {
  std::int64_t p = 0;
  std::size_t n = 0;
  // Echelon rows with pivot value 1; pivots strictly increasing.
  std::vector<ZVec> rows;
  std::vector<std::size_t> pivots;

  void build(std::int64_t p_in, std::size_t n_in, const std::vector<ZVec>& vecs) {
    p = p_in;
    n = n_in;
    rows.clear();
    pivots.clear();
    for (const ZVec& v : vecs) insert(v);
  }

  // Reduce v by the current rows (zeroes pivot coordinates).
  ZVec reduce(ZVec v) const {
    for (auto& c : v) c = mod_reduce(c, p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::int64_t c = v[pivots[r]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        v[j] = mod_reduce(v[j] - c * rows[r][j], p);
    }
    return v;
  }

  void insert(ZVec v) {
    v = reduce(std::move(v));
    std::size_t piv = n;
    for (std::size_t j = 0; j < n; ++j)
      if (v[j] != 0) {
        piv = j;
        break;
      }
    if (piv == n) return;  // already in span
    // Normalize pivot to 1 (p prime: invert by Fermat).
    std::int64_t inv = 1, base = v[piv], e = p - 2;
    while (e > 0) {
      if (e & 1) inv = mod_reduce(inv * base, p);
      base = mod_reduce(base * base, p);
      e >>= 1;
    }
    for (auto& c : v) c = mod_reduce(c * inv, p);
    // Back-substitute into existing rows, keep echelon sorted by pivot.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::int64_t c = rows[r][piv];
      if (c == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        rows[r][j] = mod_reduce(rows[r][j] - c * v[j], p);
    }
    auto it = std::lower_bound(pivots.begin(), pivots.end(), piv);
    std::size_t at = static_cast<std::size_t>(it - pivots.begin());
    pivots.insert(it, piv);
    rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(at), std::move(v));
  }

  bool is_pivot(std::size_t j) const {
    return std::binary_search(pivots.begin(), pivots.end(), j);
  }
};

class MatrixSemidirectImpl final : public GroupOps {
public:
  MatrixSemidirectImpl(std::int64_t p, std::int64_t m, ZMat action,
                       std::vector<ZVec> relations)
      : p_(p), m_(m), action_(std::move(action)), relations_(std::move(relations)) {
    if (!is_prime(p_)) throw Error("p must be prime");
    if (m_ < 1 || !is_power_of(static_cast<std::uint64_t>(m_),
                               static_cast<std::uint64_t>(p_)))
      throw Error("cyclic part order must be a power of p");
    n_ = action_.size();
    for (const ZVec& row : action_)
      if (row.size() != n_) throw Error("action matrix must be square");
    for (const ZVec& r : relations_)
      if (r.size() != n_) throw Error("relation width mismatch");
    span_.build(p_, n_, relations_);
    free_coords_.clear();
    for (std::size_t j = 0; j < n_; ++j)
      if (!span_.is_pivot(j)) free_coords_.push_back(j);

    // Precompute action powers 0..m-1.
    powers_.resize(static_cast<std::size_t>(m_));
    powers_[0] = identity_matrix();
    for (std::size_t k = 1; k < powers_.size(); ++k)
      powers_[k] = mat_mul(action_, powers_[k - 1]);

    // The action must preserve the relation span, act invertibly on the
    // quotient, and satisfy action^m = id on the quotient.
    for (const ZVec& r : relations_) {
      ZVec img = span_.reduce(mat_apply(action_, r));
      for (std::int64_t c : img)
        if (c != 0) throw Error("action does not preserve relation span");
    }
    Fpspan image_span;
    std::vector<ZVec> imgs;
    for (std::size_t j : free_coords_) {
      ZVec e(n_, 0);
      e[j] = 1;
      imgs.push_back(span_.reduce(mat_apply(action_, e)));
    }
    image_span.build(p_, n_, imgs);
    if (image_span.rows.size() != free_coords_.size())
      throw Error("action is not invertible on the quotient space");
    ZMat am = mat_mod(mat_pow(action_, m_));
    for (std::size_t j : free_coords_) {
      ZVec e(n_, 0);
      e[j] = 1;
      if (span_.reduce(mat_apply(am, e)) != span_.reduce(e))
        throw Error("action order does not divide the cyclic part order");
    }

    std::int64_t vo = 1;
    for (std::size_t i = 0; i < free_coords_.size(); ++i) vo = checked_mul(vo, p_);
    order_ = checked_mul(m_, vo);
  }

  std::size_t width() const override { return 1 + n_; }
  std::uint64_t order() const override { return static_cast<std::uint64_t>(order_); }
  std::int64_t prime() const override { return p_; }

  Element mul(const Element& a, const Element& b) const override {
    check(a);
    check(b);
    std::int64_t j = a[0], k = b[0];
    ZVec u(n_), r(n_);
    for (std::size_t i = 0; i < n_; ++i) u[i] = a[1 + i];
    ZVec moved = mat_apply(powers_[static_cast<std::size_t>(k)], u);
    for (std::size_t i = 0; i < n_; ++i) r[i] = moved[i] + b[1 + i];
    return pack(mod_reduce(j + k, m_), span_.reduce(std::move(r)));
  }

  Element inverse(const Element& a) const override {
    check(a);
    std::int64_t k = mod_reduce(-static_cast<std::int64_t>(a[0]), m_);
    ZVec u(n_);
    for (std::size_t i = 0; i < n_; ++i) u[i] = -static_cast<std::int64_t>(a[1 + i]);
    return pack(k, span_.reduce(mat_apply(powers_[static_cast<std::size_t>(k)], u)));
  }

  bool contains(const Element& a) const override {
    if (a.size() != 1 + n_) return false;
    if (a[0] < 0 || a[0] >= m_) return false;
    ZVec u(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (a[1 + i] < 0 || a[1 + i] >= p_) return false;
      u[i] = a[1 + i];
    }
    return span_.reduce(u) == u;
  }

  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    if (m_ > 1) {
      Element t(1 + n_, 0);
      t[0] = 1;
      gens.push_back(t);
    }
    for (std::size_t j : free_coords_) {
      Element e(1 + n_, 0);
      e[1 + j] = 1;
      gens.push_back(e);
    }
    return gens;
  }

  void for_each(const std::function<void(const Element&)>& fn) const override {
    std::vector<Coord> free_vals(free_coords_.size(), 0);
    for (std::int64_t k = 0; k < m_; ++k) {
      while (true) {
        Element e(1 + n_, 0);
        e[0] = static_cast<Coord>(k);
        for (std::size_t i = 0; i < free_coords_.size(); ++i)
          e[1 + free_coords_[i]] = free_vals[i];
        fn(e);
        std::size_t i = free_vals.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (free_vals[i] + 1 < p_) {
            ++free_vals[i];
            std::fill(free_vals.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                      free_vals.end(), 0);
            done = false;
            break;
          }
          free_vals[i] = 0;
        }
        if (done) break;
      }
    }
  }

  std::string kind() const override { return "matrix_semidirect"; }

  nlohmann::json describe() const override {
    return {{"kind", "matrix_semidirect"},
            {"p", p_},
            {"m", m_},
            {"action", action_},
            {"relations", relations_}};
  }

private:
  void check(const Element& a) const {
    if (!contains(a))
      throw Error("element " + format_element(a) + " not in semidirect group");
  }

  Element pack(std::int64_t k, ZVec v) const {
    Element e(1 + n_);
    e[0] = static_cast<Coord>(k);
    for (std::size_t i = 0; i < n_; ++i) e[i + 1] = static_cast<Coord>(v[i]);
    return e;
  }

  ZMat identity_matrix() const {
    ZMat id(n_, ZVec(n_, 0));
    for (std::size_t i = 0; i < n_; ++i) id[i][i] = 1;
    return id;
  }

  ZMat mat_mul(const ZMat& a, const ZMat& b) const {
    ZMat r(n_, ZVec(n_, 0));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        if (a[i][k] == 0) continue;
        for (std::size_t j = 0; j < n_; ++j)
          r[i][j] = mod_reduce(r[i][j] + a[i][k] * b[k][j], p_);
      }
    return r;
  }

  ZMat mat_mod(ZMat m) const {
    for (auto& row : m)
      for (auto& c : row) c = mod_reduce(c, p_);
    return m;
  }

  ZMat mat_pow(ZMat base, std::int64_t e) const {
    ZMat acc = identity_matrix();
    base = mat_mod(std::move(base));
    while (e > 0) {
      if (e & 1) acc = mat_mul(acc, base);
      base = mat_mul(base, base);
      e >>= 1;
    }
    return acc;
  }

  ZVec mat_apply(const ZMat& m, const ZVec& v) const {
    ZVec r(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < n_; ++j) s += m[i][j] * v[j];
      r[i] = mod_reduce(s, p_);
    }
    return r;
  }

  std::int64_t p_;
  std::int64_t m_;
  ZMat action_;
  std::vector<ZVec> relations_;
  std::size_t n_ = 0;
  Fpspan span_;
  std::vector<std::size_t> free_coords_;
  std::vector<ZMat> powers_;
  std::int64_t order_ = 0;
};

// ---------------------------------------------------------------------------
// P ⋉ F_p[P] with P = (Z/p)^rank acting by translation on functions.
//
// Tuple layout: (u_0..u_{rank-1}, f_0..f_{p^rank-1}) where f is indexed by
// the little-endian odometer index of w in P, i.e. idx(w) = sum w_i p^i.
// Multiplication: (u,f)(v,g) = (u+v, v.f + g) with (v.f)(w) = f(w - v).

class GroupRingSemidirectImpl final : public GroupOps {
public:
  GroupRingSemidirectImpl(std::int64_t p, int rank) : p_(p), rank_(rank) {
    if (!is_prime(p_)) throw Error("p must be prime");
    if (rank_ < 1) throw Error("rank must be positive");
    pts_ = 1;
    for (int i = 0; i < rank_; ++i) pts_ = checked_mul(pts_, p_);
    if (pts_ > 4096) throw Error("group ring base is too large");
    order_ = pts_;
    for (std::int64_t i = 0; i < pts_; ++i) order_ = checked_mul(order_, p_);
    // Precompute the index permutation of w -> w + e_j for each axis, and
    // general translation is composed per-call from coordinates.
    sub_table_.assign(static_cast<std::size_t>(pts_) * static_cast<std::size_t>(pts_), 0);
    for (std::int64_t w = 0; w < pts_; ++w)
      for (std::int64_t v = 0; v < pts_; ++v)
        sub_table_[static_cast<std::size_t>(w) * static_cast<std::size_t>(pts_) +
                   static_cast<std::size_t>(v)] = idx_sub(w, v);
  }

  std::size_t width() const override {
    return static_cast<std::size_t>(rank_) + static_cast<std::size_t>(pts_);
  }
  std::uint64_t order() const override { return static_cast<std::uint64_t>(order_); }
  std::int64_t prime() const override { return p_; }

  Element mul(const Element& a, const Element& b) const override {
    check(a);
    check(b);
    Element r(width());
    for (int i = 0; i < rank_; ++i)
      r[static_cast<std::size_t>(i)] = static_cast<Coord>(
          mod_reduce(static_cast<std::int64_t>(a[static_cast<std::size_t>(i)]) +
                         b[static_cast<std::size_t>(i)],
                     p_));
    std::int64_t v = point_index(b);
    const std::int64_t* row =
        sub_table_.data() + 0;  // indexed per w below
    for (std::int64_t w = 0; w < pts_; ++w) {
      std::int64_t src = row[static_cast<std::size_t>(w) * static_cast<std::size_t>(pts_) +
                             static_cast<std::size_t>(v)];
      r[f_off(w)] = static_cast<Coord>(
          mod_reduce(static_cast<std::int64_t>(a[f_off(src)]) + b[f_off(w)], p_));
    }
    return r;
  }

  Element inverse(const Element& a) const override {
    check(a);
    Element r(width());
    for (int i = 0; i < rank_; ++i)
      r[static_cast<std::size_t>(i)] = static_cast<Coord>(
          mod_reduce(-static_cast<std::int64_t>(a[static_cast<std::size_t>(i)]), p_));
    std::int64_t vinv = point_index(r);
    for (std::int64_t w = 0; w < pts_; ++w) {
      std::int64_t src =
          sub_table_[static_cast<std::size_t>(w) * static_cast<std::size_t>(pts_) +
                     static_cast<std::size_t>(vinv)];
      r[f_off(w)] = static_cast<Coord>(
          mod_reduce(-static_cast<std::int64_t>(a[f_off(src)]), p_));
    }
    return r;
  }

  bool contains(const Element& a) const override {
    if (a.size() != width()) return false;
    for (Coord c : a)
      if (c < 0 || c >= p_) return false;
    return true;
  }

  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    for (int i = 0; i < rank_; ++i) {
      Element e(width(), 0);
      e[static_cast<std::size_t>(i)] = 1;
      gens.push_back(e);
    }
    Element d(width(), 0);
    d[f_off(0)] = 1;  // delta at the identity of P
    gens.push_back(d);
    return gens;
  }

  void for_each(const std::function<void(const Element&)>& fn) const override {
    Element cur(width(), 0);
    while (true) {
      fn(cur);
      std::size_t i = width();
      bool done = true;
      while (i > 0) {
        --i;
        if (cur[i] + 1 < p_) {
          ++cur[i];
          std::fill(cur.begin() + static_cast<std::ptrdiff_t>(i) + 1, cur.end(), 0);
          done = false;
          break;
        }
        cur[i] = 0;
      }
      if (done) return;
    }
  }

  std::string kind() const override { return "group_ring_semidirect"; }

  nlohmann::json describe() const override {
    return {{"kind", "group_ring_semidirect"}, {"p", p_}, {"rank", rank_}};
  }

private:
  void check(const Element& a) const {
    if (!contains(a))
      throw Error("element not in group ring semidirect product");
  }

  std::size_t f_off(std::int64_t w) const {
    return static_cast<std::size_t>(rank_) + static_cast<std::size_t>(w);
  }

  std::int64_t point_index(const Element& a) const {
    std::int64_t idx = 0, mult = 1;
    for (int i = 0; i < rank_; ++i) {
      idx += a[static_cast<std::size_t>(i)] * mult;
      mult *= p_;
    }
    return idx;
  }

  // Index of w - v in the odometer indexing of P.
  std::int64_t idx_sub(std::int64_t w, std::int64_t v) const {
    std::int64_t idx = 0, mult = 1;
    for (int i = 0; i < rank_; ++i) {
      std::int64_t wc = w % p_, vc = v % p_;
      w /= p_;
      v /= p_;
      idx += mod_reduce(wc - vc, p_) * mult;
      mult *= p_;
    }
    return idx;
  }

  std::int64_t p_;
  int rank_;
  std::int64_t pts_ = 0;
  std::int64_t order_ = 0;
  std::vector<std::int64_t> sub_table_;
};

// ---------------------------------------------------------------------------
// Z/p^k ⋉ X with the canonical generator acting via an explicit bijection
// table on X.  Tuples are (c, x...).

class CyclicExtensionImpl final : public GroupOps {
public:
  CyclicExtensionImpl(std::int64_t p, int k, Group X,
                      const std::vector<std::pair<Element, Element>>& gamma_table)
      : p_(p), k_(k), x_(std::move(X)) {
    if (!is_prime(p_)) throw Error("p must be prime");
    if (k_ < 0) throw Error("exponent must be non-negative");
    if (x_.prime() != p_) throw Error("prime mismatch between fiber and cyclic part");
    m_ = 1;
    for (int i = 0; i < k_; ++i) m_ = checked_mul(m_, p_);
    order_ = checked_mul(m_, static_cast<std::int64_t>(x_.order()));
    fwd_.reserve(gamma_table.size());
    bwd_.reserve(gamma_table.size());
    for (const auto& [from, to] : gamma_table) {
      if (!x_.contains(from) || !x_.contains(to))
        throw Error("twist table entry outside the fiber group");
      fwd_[from] = to;
      bwd_[to] = from;
    }
    if (fwd_.size() != x_.order() || bwd_.size() != x_.order())
      throw Error("twist table is not a bijection on the fiber group");
  }

  std::size_t width() const override { return 1 + x_.width(); }
  std::uint64_t order() const override { return static_cast<std::uint64_t>(order_); }
  std::int64_t prime() const override { return p_; }

  Element mul(const Element& a, const Element& b) const override {
    check(a);
    check(b);
    Element u = fiber(a), v = fiber(b);
    Element moved = apply_pow(u, b[0]);
    Element prod = x_.mul(moved, v);
    return pack(mod_reduce(static_cast<std::int64_t>(a[0]) + b[0], m_), prod);
  }

  Element inverse(const Element& a) const override {
    check(a);
    std::int64_t c = mod_reduce(-static_cast<std::int64_t>(a[0]), m_);
    Element u = x_.inverse(fiber(a));
    return pack(c, apply_pow(u, c));
  }

  bool contains(const Element& a) const override {
    if (a.size() != width()) return false;
    if (a[0] < 0 || a[0] >= m_) return false;
    Element u(a.begin() + 1, a.end());
    return x_.contains(u);
  }

  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    if (m_ > 1) {
      Element t(width(), 0);
      t[0] = 1;
      gens.push_back(t);
    }
    for (const Element& g : x_.generators()) gens.push_back(pack(0, g));
    return gens;
  }

  void for_each(const std::function<void(const Element&)>& fn) const override {
    for (std::int64_t c = 0; c < m_; ++c)
      x_.for_each([&](const Element& u) { fn(pack(c, u)); });
  }

  std::string kind() const override { return "cyclic_extension"; }

  nlohmann::json describe() const override {
    return {{"kind", "cyclic_extension"},
            {"p", p_},
            {"k", k_},
            {"fiber", x_.describe()}};
  }

private:
  void check(const Element& a) const {
    if (!contains(a)) throw Error("element not in cyclic extension");
  }

  Element fiber(const Element& a) const { return Element(a.begin() + 1, a.end()); }

  Element pack(std::int64_t c, const Element& u) const {
    Element e;
    e.reserve(width());
    e.push_back(static_cast<Coord>(c));
    e.insert(e.end(), u.begin(), u.end());
    return e;
  }

  // gamma^e(u) for 0 <= e < m_; gamma has order dividing m_, so walk the
  // short way around.
  Element apply_pow(Element u, std::int64_t e) const {
    e = mod_reduce(e, m_);
    if (2 * e <= m_) {
      for (std::int64_t i = 0; i < e; ++i) u = fwd_.at(u);
    } else {
      for (std::int64_t i = 0; i < m_ - e; ++i) u = bwd_.at(u);
    }
    return u;
  }

  std::int64_t p_;
  int k_;
  Group x_;
  std::int64_t m_ = 1;
  std::int64_t order_ = 0;
  std::unordered_map<Element, Element, ElementHash> fwd_, bwd_;
};

// ---------------------------------------------------------------------------
// A subgroup of a parent group promoted to a Group in its own right.

class PromotedSubgroupImpl final : public GroupOps {
public:
  PromotedSubgroupImpl(Group parent, std::vector<Element> elements,
                       std::vector<Element> gens)
      : parent_(std::move(parent)), elements_(std::move(elements)), gens_(std::move(gens)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    set_.reserve(elements_.size());
    for (const Element& e : elements_) set_.insert(e);
    if (elements_.empty() || !set_.count(parent_.identity()))
      throw Error("promoted subgroup must contain the identity");
    for (const Element& g : gens_)
      if (!set_.count(g)) throw Error("promoted subgroup generator outside element set");
    // Light closure check: inverses and generator translates stay inside.
    for (const Element& e : elements_) {
      if (!set_.count(parent_.inverse(e)))
        throw Error("promoted subgroup is not closed under inversion");
      for (const Element& g : gens_)
        if (!set_.count(parent_.mul(e, g)))
          throw Error("promoted subgroup is not closed under multiplication");
    }
  }

  std::size_t width() const override { return parent_.width(); }
  std::uint64_t order() const override { return elements_.size(); }
  std::int64_t prime() const override { return parent_.prime(); }
  Element mul(const Element& a, const Element& b) const override {
    return parent_.mul(a, b);
  }
  Element inverse(const Element& a) const override { return parent_.inverse(a); }
  bool contains(const Element& a) const override { return set_.count(a) > 0; }
  std::vector<Element> generators() const override { return gens_; }
  void for_each(const std::function<void(const Element&)>& fn) const override {
    for (const Element& e : elements_) fn(e);
  }
  std::string kind() const override { return "promoted_subgroup"; }
  nlohmann::json describe() const override {
    return {{"kind", "promoted_subgroup"},
            {"order", elements_.size()},
            {"parent", parent_.describe()}};
  }

  const Group& parent() const { return parent_; }

private:
  Group parent_;
  std::vector<Element> elements_;
  std::vector<Element> gens_;
  std::unordered_set<Element, ElementHash> set_;
};

}  // namespace

Group make_abelian(std::int64_t p, const std::vector<int>& exponents) {
  std::vector<std::int64_t> moduli;
  moduli.reserve(exponents.size());
  for (int e : exponents) {
    if (e < 0) throw Error("exponents must be non-negative");
    std::int64_t m = 1;
    for (int i = 0; i < e; ++i) m = checked_mul(m, p);
    moduli.push_back(m);
  }
  return Group(std::make_shared<AbelianImpl>(p, std::move(moduli)));
}

Group make_abelian_moduli(std::int64_t p, const std::vector<std::int64_t>& moduli) {
  return Group(std::make_shared<AbelianImpl>(p, moduli));
}

Group make_matrix_semidirect(std::int64_t p, std::int64_t m, const ZMat& action,
                             const std::vector<ZVec>& relations) {
  return Group(std::make_shared<MatrixSemidirectImpl>(p, m, action, relations));
}

Group make_group_ring_semidirect(std::int64_t p, int rank) {
  return Group(std::make_shared<GroupRingSemidirectImpl>(p, rank));
}

Group make_cyclic_extension(std::int64_t p, int k, const Group& X,
                            const std::vector<std::pair<Element, Element>>& gamma_table) {
  return Group(std::make_shared<CyclicExtensionImpl>(p, k, X, gamma_table));
}

Group promote_subgroup(const Group& parent, std::vector<Element> elements,
                       std::vector<Element> gens) {
  return Group(std::make_shared<PromotedSubgroupImpl>(
      parent, std::move(elements), std::move(gens)));
}

}  // namespace resp
