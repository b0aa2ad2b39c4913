#pragma once

// Dense matrices over any of the rings, elimination over fields, and the
// exact local Smith form used both as test ground truth and as the dense
// finish of the nullspace method.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lsnf/rings.hpp"
#include "lsnf/smith.hpp"

namespace lsnf {

template <class R>
class DenseMatrix {
 public:
  using Ring = R;
  using Element = typename R::Element;

  DenseMatrix(R ring, std::size_t rows, std::size_t cols)
      : ring_(std::move(ring)), rows_(rows), cols_(cols), data_(rows * cols, ring_.zero()) {}

  static DenseMatrix identity(const R& ring, std::size_t n) {
    DenseMatrix m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ring.one();
    return m;
  }
  static DenseMatrix random(const R& ring, std::size_t rows, std::size_t cols, Rng& rng) {
    DenseMatrix m(ring, rows, cols);
    for (auto& x : m.data_) x = ring.random(rng);
    return m;
  }

  const R& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Element& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Element& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Element> row(std::size_t i) { return std::span<Element>(data_).subspan(i * cols_, cols_); }
  std::span<const Element> row(std::size_t i) const {
    return std::span<const Element>(data_).subspan(i * cols_, cols_);
  }

  std::vector<Element> column(std::size_t j) const {
    std::vector<Element> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(std::size_t j, std::span<const Element> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  std::vector<Element> apply(std::span<const Element> x) const {
    std::vector<Element> y(rows_, ring_.zero());
    for (std::size_t i = 0; i < rows_; ++i) {
      auto acc = ring_.zero();
      for (std::size_t j = 0; j < cols_; ++j) acc = ring_.add(acc, ring_.mul((*this)(i, j), x[j]));
      y[i] = acc;
    }
    return y;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(ring_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    DenseMatrix s(ring_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) s(i, j) = (*this)(r0 + i, c0 + j);
    return s;
  }

  bool operator==(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  R ring_;
  std::size_t rows_, cols_;
  std::vector<Element> data_;
};

template <class R>
DenseMatrix<R> operator*(const DenseMatrix<R>& a, const DenseMatrix<R>& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::DimensionMismatch, "dense product dimensions differ");
  const R& ring = a.ring();
  DenseMatrix<R> c(ring, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto& aik = a(i, k);
      if (ring.is_zero(aik)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = ring.add(c(i, j), ring.mul(aik, b(k, j)));
    }
  return c;
}

/// Entrywise ring change.
template <class K, class R, class Hom>
DenseMatrix<K> map_matrix(const DenseMatrix<R>& m, const K& k, const Hom& hom) {
  DenseMatrix<K> out(k, m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = hom(m(i, j));
  return out;
}

/// Rank over a field by Gaussian elimination.
template <class F>
std::size_t dense_rank(DenseMatrix<F> m) {
  const F& field = m.ring();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < m.rows() && field.is_zero(m(piv, col))) ++piv;
    if (piv == m.rows()) continue;
    if (piv != rank)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rank, j));
    const auto inv = field.inv(m(rank, col));
    for (std::size_t i = rank + 1; i < m.rows(); ++i) {
      if (field.is_zero(m(i, col))) continue;
      const auto factor = field.mul(m(i, col), inv);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) = field.sub(m(i, j), field.mul(factor, m(rank, j)));
    }
    ++rank;
  }
  return rank;
}

/// Linearly independent set of vectors over a field kept in reduced row
/// echelon form; insert() reports whether a vector extended the span.
template <class F>
class EchelonBasis {
 public:
  using Element = typename F::Element;

  EchelonBasis(F field, std::size_t dim) : field_(std::move(field)), dim_(dim) {}

  bool insert(std::vector<Element> v) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto& c = v[pivots_[r]];
      if (field_.is_zero(c)) continue;
      const auto factor = c;
      for (std::size_t j = 0; j < dim_; ++j) v[j] = field_.sub(v[j], field_.mul(factor, rows_[r][j]));
    }
    std::size_t piv = 0;
    while (piv < dim_ && field_.is_zero(v[piv])) ++piv;
    if (piv == dim_) return false;
    const auto inv = field_.inv(v[piv]);
    for (auto& x : v) x = field_.mul(x, inv);
    for (auto& row : rows_) {
      const auto c = row[piv];
      if (field_.is_zero(c)) continue;
      for (std::size_t j = 0; j < dim_; ++j) row[j] = field_.sub(row[j], field_.mul(c, v[j]));
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::vector<Element>>& vectors() const { return rows_; }

 private:
  F field_;
  std::size_t dim_;
  std::vector<std::vector<Element>> rows_;
  std::vector<std::size_t> pivots_;
};

/// Inverse over a local ring (or field) by Gauss-Jordan with unit pivots.
template <class R>
DenseMatrix<R> dense_inverse(DenseMatrix<R> m) {
  const R& ring = m.ring();
  const std::size_t n = m.rows();
  if (m.cols() != n) fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  auto inv = DenseMatrix<R>::identity(ring, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && !ring.is_unit(m(piv, col))) ++piv;
    if (piv == n) fail(ErrorCode::NonUnit, "matrix is not invertible");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(m(piv, j), m(col, j));
      std::swap(inv(piv, j), inv(col, j));
    }
    const auto u = ring.inv(m(col, col));
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) = ring.mul(m(col, j), u);
      inv(col, j) = ring.mul(inv(col, j), u);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || ring.is_zero(m(i, col))) continue;
      const auto f = m(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = ring.sub(m(i, j), ring.mul(f, m(col, j)));
        inv(i, j) = ring.sub(inv(i, j), ring.mul(f, inv(col, j)));
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Local Smith form by minimal-valuation pivoting.

/// Invariant valuations of M over a local ring (ascending, length
/// min(rows, cols), zeros encoded as e). The pivot valuations are returned
/// in the order they were chosen, which over a local PIR is non-decreasing.
template <class R>
std::vector<unsigned> local_invariant_valuations(DenseMatrix<R> m) {
  const R& ring = m.ring();
  const unsigned e = ring.exponent();
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t n = std::min(rows, cols);
  std::vector<unsigned> vals;
  vals.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    unsigned best = e;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = step; i < rows && best > 0; ++i)
      for (std::size_t j = step; j < cols; ++j) {
        const unsigned v = ring.valuation(m(i, j));
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    if (best == e) break;
    if (bi != step)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(bi, j), m(step, j));
    if (bj != step)
      for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, bj), m(i, step));
    // pivot = unit * pi^v; normalise the pivot row by the unit's inverse.
    const auto unit_inv = ring.inv(ring.div_uniformizer_pow(m(step, step), best));
    for (std::size_t j = step; j < cols; ++j) m(step, j) = ring.mul(m(step, j), unit_inv);
    for (std::size_t i = step + 1; i < rows; ++i) {
      if (ring.is_zero(m(i, step))) continue;
      const auto q = ring.div_uniformizer_pow(m(i, step), best);
      for (std::size_t j = step; j < cols; ++j) m(i, j) = ring.sub(m(i, j), ring.mul(q, m(step, j)));
    }
    vals.push_back(best);
  }
  vals.resize(n, e);
  return vals;
}

template <class R>
SmithMultiplicities dense_smith_local(const DenseMatrix<R>& m) {
  auto vals = local_invariant_valuations(m);
  return SmithMultiplicities::from_valuations(m.ring().describe(), m.ring().exponent(), vals);
}

// ---------------------------------------------------------------------------
// Determinantal divisors by exhaustive minors (test oracle, small sizes).

inline constexpr std::size_t kMaxDivisorOrder = 4;
inline constexpr std::size_t kMaxDivisorDim = 8;

/// v_k = min valuation over all k x k minors for k = 1..kmax, computed on the
/// exact lift to Z (for Z_{p^e}) or F[z] (for F[z]/(f^e)), so values are not
/// capped by e. nullopt marks "all k x k minors vanish".
std::vector<std::optional<unsigned>> determinantal_divisor_valuations(const DenseMatrix<LocalIntRing>& m,
                                                                      std::size_t kmax);

template <class F>
std::vector<std::optional<unsigned>> determinantal_divisor_valuations(const DenseMatrix<PolyQuotRing<F>>& m,
                                                                      std::size_t kmax);

/// s_k = v_k - v_{k-1}, capped at e (and e for vanishing divisors).
std::vector<unsigned> invariants_from_divisors(std::span<const std::optional<unsigned>> v, unsigned e);

namespace detail {

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn);

template <class T, class Ops>
T laplace_det(const std::vector<std::vector<T>>& a, const Ops& ops) {
  const std::size_t k = a.size();
  if (k == 1) return a[0][0];
  T acc = ops.zero();
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<T>> minor;
    for (std::size_t i = 1; i < k; ++i) {
      std::vector<T> r;
      for (std::size_t j = 0; j < k; ++j)
        if (j != c) r.push_back(a[i][j]);
      minor.push_back(std::move(r));
    }
    T term = ops.mul(a[0][c], laplace_det(minor, ops));
    acc = (c % 2 == 0) ? ops.add(acc, term) : ops.sub(acc, term);
  }
  return acc;
}

template <class T, class Ops, class Val>
std::vector<std::optional<unsigned>> divisor_scan(std::size_t rows, std::size_t cols, std::size_t kmax,
                                                  const std::function<T(std::size_t, std::size_t)>& entry,
                                                  const Ops& ops, const Val& valuation) {
  if (rows > kMaxDivisorDim || cols > kMaxDivisorDim || kmax > kMaxDivisorOrder)
    fail(ErrorCode::InvalidArgument, "determinantal divisor oracle limited to 8x8 and k <= 4");
  kmax = std::min({kmax, rows, cols});
  std::vector<std::optional<unsigned>> out;
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::optional<unsigned> best;
    for_each_subset(rows, k, [&](const std::vector<std::size_t>& rs) {
      for_each_subset(cols, k, [&](const std::vector<std::size_t>& cs) {
        std::vector<std::vector<T>> a(k, std::vector<T>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) a[i][j] = entry(rs[i], cs[j]);
        auto v = valuation(laplace_det(a, ops));
        if (v && (!best || *v < *best)) best = v;
      });
    });
    out.push_back(best);
  }
  return out;
}

template <class F>
struct PolyOps {
  const F& field;
  poly::Poly<F> zero() const { return {}; }
  poly::Poly<F> add(const poly::Poly<F>& a, const poly::Poly<F>& b) const {
    auto r = poly::add(field, std::span<const typename F::Element>(a), std::span<const typename F::Element>(b));
    poly::trim(field, r);
    return r;
  }
  poly::Poly<F> sub(const poly::Poly<F>& a, const poly::Poly<F>& b) const {
    auto r = poly::sub(field, std::span<const typename F::Element>(a), std::span<const typename F::Element>(b));
    poly::trim(field, r);
    return r;
  }
  poly::Poly<F> mul(const poly::Poly<F>& a, const poly::Poly<F>& b) const {
    auto r = poly::mul(field, std::span<const typename F::Element>(a), std::span<const typename F::Element>(b));
    poly::trim(field, r);
    return r;
  }
};

}  // namespace detail

template <class F>
std::vector<std::optional<unsigned>> determinantal_divisor_valuations(const DenseMatrix<PolyQuotRing<F>>& m,
                                                                      std::size_t kmax) {
  const auto& ring = m.ring();
  const F& field = ring.field();
  detail::PolyOps<F> ops{field};
  auto entry = [&](std::size_t i, std::size_t j) {
    poly::Poly<F> a(m(i, j).begin(), m(i, j).end());
    poly::trim(field, a);
    return a;
  };
  auto valuation = [&](poly::Poly<F> a) -> std::optional<unsigned> {
    poly::trim(field, a);
    if (a.empty()) return std::nullopt;
    unsigned v = 0;
    for (;;) {
      auto [q, r] = poly::divrem_monic(field, a, std::span<const typename F::Element>(ring.f()));
      if (!r.empty()) return v;
      a = std::move(q);
      ++v;
    }
  };
  return detail::divisor_scan<poly::Poly<F>>(m.rows(), m.cols(), kmax,
                                             std::function<poly::Poly<F>(std::size_t, std::size_t)>(entry), ops,
                                             valuation);
}

}  // namespace lsnf
