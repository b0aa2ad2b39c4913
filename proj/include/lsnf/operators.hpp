#pragma once

// Black-box linear operators and the constructions used by the Smith form
// algorithms: sparse triplet matrices, the companion embedding phi_l of
// F[z]/(f^e) matrices into F-matrices, scaled Toeplitz preconditioners,
// composition, truncation and bordering.

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lsnf/dense.hpp"
#include "lsnf/rings.hpp"

namespace lsnf {

/// Matvec counter shared by every view of the same black box.
class MatvecCounter {
 public:
  void tick() { count_.fetch_add(1, std::memory_order_relaxed); }
  u64 value() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<u64> count_{0};
};

using CounterPtr = std::shared_ptr<MatvecCounter>;
inline CounterPtr make_counter() { return std::make_shared<MatvecCounter>(); }

template <class R>
class Operator {
 public:
  using Ring = R;
  using Element = typename R::Element;
  using Vec = std::vector<Element>;
  using Fn = std::function<void(std::span<const Element>, std::span<Element>)>;

  Operator(R ring, std::size_t rows, std::size_t cols, Fn apply, Fn apply_transpose,
           CounterPtr counter = make_counter())
      : ring_(std::move(ring)),
        rows_(rows),
        cols_(cols),
        apply_(std::move(apply)),
        apply_t_(std::move(apply_transpose)),
        counter_(std::move(counter)) {}

  const R& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const CounterPtr& counter() const { return counter_; }
  u64 matvecs() const { return counter_->value(); }

  Vec apply(std::span<const Element> x) const {
    if (x.size() != cols_) fail(ErrorCode::DimensionMismatch, "apply: vector length != cols");
    Vec y(rows_, ring_.zero());
    counter_->tick();
    apply_(x, std::span<Element>(y));
    return y;
  }

  Vec apply_transpose(std::span<const Element> y) const {
    if (y.size() != rows_) fail(ErrorCode::DimensionMismatch, "apply_transpose: vector length != rows");
    Vec x(cols_, ring_.zero());
    counter_->tick();
    apply_t_(y, std::span<Element>(x));
    return x;
  }

  /// The transpose as an operator; shares this operator's counter.
  Operator transposed() const { return Operator(ring_, cols_, rows_, apply_t_, apply_, counter_); }

 private:
  R ring_;
  std::size_t rows_, cols_;
  Fn apply_, apply_t_;
  CounterPtr counter_;
};

// ---------------------------------------------------------------------------
// Sparse triplets.

template <class R>
struct Triplet {
  std::size_t row;  // 1-based
  std::size_t col;  // 1-based
  typename R::Element value;
};

template <class R>
class TripletMatrix {
 public:
  using Element = typename R::Element;

  TripletMatrix(R ring, std::size_t rows, std::size_t cols) : ring_(std::move(ring)), rows_(rows), cols_(cols) {}

  const R& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Triplet<R>>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  void add(std::size_t i, std::size_t j, Element v) {
    if (i < 1 || i > rows_ || j < 1 || j > cols_)
      fail(ErrorCode::DimensionMismatch, "triplet index (" + std::to_string(i) + "," + std::to_string(j) +
                                              ") out of range");
    entries_.push_back({i, j, std::move(v)});
  }

  /// Sort by (row, col), sum duplicates, drop zeros.
  void normalize() {
    std::stable_sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Triplet<R>> out;
    for (auto& t : entries_) {
      if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
        out.back().value = ring_.add(out.back().value, t.value);
      } else {
        out.push_back(std::move(t));
      }
    }
    std::erase_if(out, [&](const auto& t) { return ring_.is_zero(t.value); });
    entries_ = std::move(out);
  }

  DenseMatrix<R> to_dense() const {
    DenseMatrix<R> d(ring_, rows_, cols_);
    for (const auto& t : entries_) d(t.row - 1, t.col - 1) = ring_.add(d(t.row - 1, t.col - 1), t.value);
    return d;
  }

  static TripletMatrix from_dense(const DenseMatrix<R>& d) {
    TripletMatrix t(d.ring(), d.rows(), d.cols());
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j)
        if (!d.ring().is_zero(d(i, j))) t.add(i + 1, j + 1, d(i, j));
    return t;
  }

 private:
  R ring_;
  std::size_t rows_, cols_;
  std::vector<Triplet<R>> entries_;
};

/// A sparse matrix held as a black box. The same matrix can be evaluated
/// over any ring K reachable by a homomorphism from R (a scalar extension or
/// a reduction); all such views share one matvec counter.
template <class R>
class SparseBlackBox {
 public:
  using Ring = R;
  using Element = typename R::Element;

  explicit SparseBlackBox(TripletMatrix<R> m) : counter_(make_counter()) {
    m.normalize();
    ring_ = std::make_shared<R>(m.ring());
    rows_ = m.rows();
    cols_ = m.cols();
    row_ptr_.assign(rows_ + 1, 0);
    for (const auto& t : m.entries()) ++row_ptr_[t.row];
    for (std::size_t i = 0; i < rows_; ++i) row_ptr_[i + 1] += row_ptr_[i];
    col_idx_.reserve(m.nnz());
    values_.reserve(m.nnz());
    for (const auto& t : m.entries()) {
      col_idx_.push_back(t.col - 1);
      values_.push_back(t.value);
    }
  }

  const R& ring() const { return *ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const CounterPtr& counter() const { return counter_; }

  Operator<R> op() const {
    return over(*ring_, [](const Element& x) { return x; });
  }

  template <class K, class Hom>
  Operator<K> over(const K& k, const Hom& hom) const {
    using KE = typename K::Element;
    auto vals = std::make_shared<std::vector<KE>>();
    vals->reserve(values_.size());
    for (const auto& v : values_) vals->push_back(hom(v));
    auto rp = std::make_shared<std::vector<std::size_t>>(row_ptr_);
    auto ci = std::make_shared<std::vector<std::size_t>>(col_idx_);
    const std::size_t rows = rows_, cols = cols_;
    auto apply = [k, vals, rp, ci, rows](std::span<const KE> x, std::span<KE> y) {
      for (std::size_t i = 0; i < rows; ++i) {
        MulAcc<K> acc(k);
        for (std::size_t t = (*rp)[i]; t < (*rp)[i + 1]; ++t) acc.add((*vals)[t], x[(*ci)[t]]);
        y[i] = acc.value();
      }
    };
    auto apply_t = [k, vals, rp, ci, rows](std::span<const KE> x, std::span<KE> y) {
      for (std::size_t i = 0; i < rows; ++i) {
        if (k.is_zero(x[i])) continue;
        for (std::size_t t = (*rp)[i]; t < (*rp)[i + 1]; ++t)
          y[(*ci)[t]] = k.add(y[(*ci)[t]], k.mul((*vals)[t], x[i]));
      }
    };
    return Operator<K>(k, rows, cols, apply, apply_t, counter_);
  }

 private:
  std::shared_ptr<R> ring_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_, col_idx_;
  std::vector<Element> values_;
  CounterPtr counter_;
};

template <class R>
Operator<R> from_triplets(TripletMatrix<R> m) {
  return SparseBlackBox<R>(std::move(m)).op();
}

// ---------------------------------------------------------------------------
// Basic operators.

template <class R>
Operator<R> identity_operator(const R& ring, std::size_t n) {
  auto copy = [](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
  return Operator<R>(ring, n, n, copy, copy);
}

template <class R>
Operator<R> diagonal_operator(const R& ring, std::vector<typename R::Element> diag) {
  auto d = std::make_shared<std::vector<typename R::Element>>(std::move(diag));
  auto fn = [ring, d](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = ring.mul((*d)[i], x[i]);
  };
  const std::size_t n = d->size();
  return Operator<R>(ring, n, n, fn, fn);
}

template <class R>
Operator<R> dense_operator(const DenseMatrix<R>& m) {
  auto a = std::make_shared<DenseMatrix<R>>(m);
  auto at = std::make_shared<DenseMatrix<R>>(m.transposed());
  auto apply = [a](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    auto r = a->apply(x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  auto apply_t = [at](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    auto r = at->apply(x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  return Operator<R>(m.ring(), m.rows(), m.cols(), apply, apply_t);
}

/// Materialise an operator by applying it to unit vectors (cols applies).
template <class R>
DenseMatrix<R> to_dense(const Operator<R>& op) {
  const R& ring = op.ring();
  DenseMatrix<R> d(ring, op.rows(), op.cols());
  std::vector<typename R::Element> unit(op.cols(), ring.zero());
  for (std::size_t j = 0; j < op.cols(); ++j) {
    unit[j] = ring.one();
    d.set_column(j, op.apply(unit));
    unit[j] = ring.zero();
  }
  return d;
}

/// a o b (b applied first).
template <class R>
Operator<R> compose(const Operator<R>& a, const Operator<R>& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::DimensionMismatch, "compose: inner dimensions differ");
  auto apply = [a, b](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    auto t = a.apply(b.apply(x));
    std::copy(t.begin(), t.end(), y.begin());
  };
  auto apply_t = [a, b](std::span<const typename R::Element> x, std::span<typename R::Element> y) {
    auto t = b.apply_transpose(a.apply_transpose(x));
    std::copy(t.begin(), t.end(), y.begin());
  };
  return Operator<R>(a.ring(), a.rows(), b.cols(), apply, apply_t);
}

/// ops[0] o ops[1] o ... (applied right to left).
template <class R>
Operator<R> compose(const std::vector<Operator<R>>& ops) {
  if (ops.empty()) fail(ErrorCode::InvalidArgument, "compose: empty chain");
  Operator<R> acc = ops.back();
  for (std::size_t i = ops.size() - 1; i-- > 0;) acc = compose(ops[i], acc);
  return acc;
}

/// Leading rows x cols block of op.
template <class R>
Operator<R> truncate(const Operator<R>& op, std::size_t rows, std::size_t cols) {
  if (rows > op.rows() || cols > op.cols()) fail(ErrorCode::DimensionMismatch, "truncate beyond operator size");
  using E = typename R::Element;
  auto apply = [op, rows, cols](std::span<const E> x, std::span<E> y) {
    std::vector<E> padded(op.cols(), op.ring().zero());
    std::copy(x.begin(), x.end(), padded.begin());
    auto full = op.apply(padded);
    std::copy_n(full.begin(), rows, y.begin());
  };
  auto apply_t = [op, rows, cols](std::span<const E> x, std::span<E> y) {
    std::vector<E> padded(op.rows(), op.ring().zero());
    std::copy(x.begin(), x.end(), padded.begin());
    auto full = op.apply_transpose(padded);
    std::copy_n(full.begin(), cols, y.begin());
  };
  return Operator<R>(op.ring(), rows, cols, apply, apply_t);
}

/// [[a11, a12], [a21, a22]].
template <class R>
Operator<R> border(const Operator<R>& a11, const Operator<R>& a12, const Operator<R>& a21, const Operator<R>& a22) {
  if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() || a12.cols() != a22.cols())
    fail(ErrorCode::DimensionMismatch, "border: blocks are not conformable");
  using E = typename R::Element;
  const std::size_t r1 = a11.rows(), r2 = a21.rows(), c1 = a11.cols(), c2 = a12.cols();
  const R ring = a11.ring();
  auto apply = [=](std::span<const E> x, std::span<E> y) {
    auto x1 = x.first(c1), x2 = x.subspan(c1);
    auto t11 = a11.apply(x1), t12 = a12.apply(x2), t21 = a21.apply(x1), t22 = a22.apply(x2);
    for (std::size_t i = 0; i < r1; ++i) y[i] = ring.add(t11[i], t12[i]);
    for (std::size_t i = 0; i < r2; ++i) y[r1 + i] = ring.add(t21[i], t22[i]);
  };
  auto apply_t = [=](std::span<const E> x, std::span<E> y) {
    auto y1 = x.first(r1), y2 = x.subspan(r1);
    auto t11 = a11.apply_transpose(y1), t21 = a21.apply_transpose(y2);
    auto t12 = a12.apply_transpose(y1), t22 = a22.apply_transpose(y2);
    for (std::size_t j = 0; j < c1; ++j) y[j] = ring.add(t11[j], t21[j]);
    for (std::size_t j = 0; j < c2; ++j) y[c1 + j] = ring.add(t12[j], t22[j]);
  };
  return Operator<R>(ring, r1 + r2, c1 + c2, apply, apply_t);
}

// ---------------------------------------------------------------------------
// Scaled Toeplitz preconditioner D1 * T * D2 with T[i][j] = y_{n+i-j}
// (1-based): y_n on the diagonal, y_1 top right, y_{2n-1} bottom left.

template <class R>
struct ToeplitzSpec {
  std::size_t n = 0;
  std::vector<typename R::Element> diagonals;  // y_1..y_{2n-1}, stored 0-based
  std::vector<typename R::Element> left;       // v_1..v_n (D1)
  std::vector<typename R::Element> right;      // w_1..w_n (D2)

  static ToeplitzSpec random(const R& ring, std::size_t n, Rng& rng) {
    return sampled(ring, n, [&] { return ring.random(rng); });
  }
  template <class Sampler>
  static ToeplitzSpec sampled(const R& ring, std::size_t n, Sampler&& sample) {
    ToeplitzSpec s;
    s.n = n;
    for (std::size_t i = 0; i + 1 < 2 * n; ++i) s.diagonals.push_back(sample());
    for (std::size_t i = 0; i < n; ++i) s.left.push_back(sample());
    for (std::size_t i = 0; i < n; ++i) s.right.push_back(sample());
    (void)ring;
    return s;
  }

  template <class K, class Hom>
  ToeplitzSpec<K> map(const Hom& hom) const {
    ToeplitzSpec<K> s;
    s.n = n;
    for (const auto& x : diagonals) s.diagonals.push_back(hom(x));
    for (const auto& x : left) s.left.push_back(hom(x));
    for (const auto& x : right) s.right.push_back(hom(x));
    return s;
  }
};

/// Middle product: out_i = v_i * sum_j y[n-1+i-j] * w_j * x_j, via one
/// polynomial product of the diagonal sequence with the scaled input.
template <class R>
std::vector<typename R::Element> toeplitz_apply(const R& ring, const ToeplitzSpec<R>& s,
                                                std::span<const typename R::Element> x) {
  using E = typename R::Element;
  const std::size_t n = s.n;
  std::vector<E> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = ring.mul(s.right[j], x[j]);
  auto prod = poly::mul(ring, std::span<const E>(s.diagonals), std::span<const E>(u));
  std::vector<E> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = ring.mul(s.left[i], prod[n - 1 + i]);
  return out;
}

/// D2 * T^T * D1 applied to x.
template <class R>
std::vector<typename R::Element> toeplitz_apply_transpose(const R& ring, const ToeplitzSpec<R>& s,
                                                          std::span<const typename R::Element> x) {
  using E = typename R::Element;
  const std::size_t n = s.n;
  std::vector<E> rev(n);
  for (std::size_t i = 0; i < n; ++i) rev[n - 1 - i] = ring.mul(s.left[i], x[i]);
  auto prod = poly::mul(ring, std::span<const E>(s.diagonals), std::span<const E>(rev));
  std::vector<E> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = ring.mul(s.right[j], prod[2 * n - 2 - j]);
  return out;
}

/// Leading rows x cols block of D1 T D2 applied to x (length cols), by
/// direct dot products.
template <class R>
std::vector<typename R::Element> toeplitz_block_apply(const R& ring, const ToeplitzSpec<R>& s, std::size_t rows,
                                                      std::size_t cols, std::span<const typename R::Element> x) {
  using E = typename R::Element;
  const std::size_t n = s.n;
  std::vector<E> u(cols);
  for (std::size_t j = 0; j < cols; ++j) u[j] = ring.mul(s.right[j], x[j]);
  std::vector<E> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    MulAcc<R> acc(ring);
    const E* y = s.diagonals.data() + (n - 1 + i);
    for (std::size_t j = 0; j < cols; ++j) acc.add(*(y - j), u[j]);
    out[i] = ring.mul(s.left[i], acc.value());
  }
  return out;
}

template <class R>
std::vector<typename R::Element> toeplitz_block_apply_transpose(const R& ring, const ToeplitzSpec<R>& s,
                                                                std::size_t rows, std::size_t cols,
                                                                std::span<const typename R::Element> x) {
  using E = typename R::Element;
  const std::size_t n = s.n;
  std::vector<E> u(rows);
  for (std::size_t i = 0; i < rows; ++i) u[i] = ring.mul(s.left[i], x[i]);
  std::vector<E> out(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    MulAcc<R> acc(ring);
    const E* y = s.diagonals.data() + (n - 1 - j);
    for (std::size_t i = 0; i < rows; ++i) acc.add(y[i], u[i]);
    out[j] = ring.mul(s.right[j], acc.value());
  }
  return out;
}

template <class R>
Operator<R> toeplitz_operator(const R& ring, ToeplitzSpec<R> spec) {
  using E = typename R::Element;
  auto s = std::make_shared<ToeplitzSpec<R>>(std::move(spec));
  auto apply = [ring, s](std::span<const E> x, std::span<E> y) {
    auto r = toeplitz_apply(ring, *s, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  auto apply_t = [ring, s](std::span<const E> x, std::span<E> y) {
    auto r = toeplitz_apply_transpose(ring, *s, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  return Operator<R>(ring, s->n, s->n, apply, apply_t);
}

/// Leading rows x cols block of the scaled Toeplitz matrix. Thin blocks use
/// dot products, wide ones the polynomial product.
template <class R>
Operator<R> toeplitz_operator(const R& ring, ToeplitzSpec<R> spec, std::size_t rows, std::size_t cols) {
  using E = typename R::Element;
  if (rows > spec.n || cols > spec.n) fail(ErrorCode::DimensionMismatch, "Toeplitz block exceeds the matrix");
  constexpr std::size_t kDirect = 512;
  if (std::min(rows, cols) > kDirect) return truncate(toeplitz_operator(ring, std::move(spec)), rows, cols);
  auto s = std::make_shared<ToeplitzSpec<R>>(std::move(spec));
  auto apply = [ring, s, rows, cols](std::span<const E> x, std::span<E> y) {
    auto r = toeplitz_block_apply(ring, *s, rows, cols, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  auto apply_t = [ring, s, rows, cols](std::span<const E> x, std::span<E> y) {
    auto r = toeplitz_block_apply_transpose(ring, *s, rows, cols, x);
    std::copy(r.begin(), r.end(), y.begin());
  };
  return Operator<R>(ring, rows, cols, apply, apply_t);
}

// ---------------------------------------------------------------------------
// Companion embedding phi_l(A mod f^l): each entry a of A becomes the
// (dl x dl) matrix of multiplication by a in F[z]/(f^l), basis 1, z, ...
// Vector coordinates are grouped per entry, lowest degree first.
//
// The transpose uses the symmetric bilinear form <x, y> = tau(x y) with tau
// the top coefficient: multiplication is self-adjoint for it, so
// M_a^T = H M_a H^{-1} with H the Hankel Gram matrix, and
// phi(A)^T = (I (x) H) phi(A^T) (I (x) H^{-1}).

template <class F>
Operator<F> embed_phi(const Operator<PolyQuotRing<F>>& a, unsigned ell) {
  using FE = typename F::Element;
  using LE = typename PolyQuotRing<F>::Element;
  const auto& ring = a.ring();
  if (ell < 1 || ell > ring.exponent()) fail(ErrorCode::InvalidArgument, "embed_phi: l must be in 1..e");
  const F field = ring.field();
  const std::size_t width = static_cast<std::size_t>(ring.d()) * ell;
  const auto g = std::make_shared<poly::Poly<F>>(ring.f_power(ell));

  // tau(z^s) for s = 0 .. 2N-2.
  auto hankel = std::make_shared<std::vector<FE>>(2 * width - 1, field.zero());
  (*hankel)[width - 1] = field.one();
  for (std::size_t s = width; s < hankel->size(); ++s) {
    FE acc = field.zero();
    for (std::size_t i = 0; i < width; ++i) acc = field.sub(acc, field.mul((*g)[i], (*hankel)[s - width + i]));
    (*hankel)[s] = acc;
  }

  auto gather = [ring, width](std::span<const FE> x, std::size_t blocks) {
    std::vector<LE> v(blocks, ring.zero());
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t c = 0; c < width; ++c) v[b][c] = x[b * width + c];
    return v;
  };
  auto scatter = [field, g, width](const std::vector<LE>& w, std::span<FE> y) {
    for (std::size_t b = 0; b < w.size(); ++b) {
      auto r = poly::rem_monic(field, poly::Poly<F>(w[b].begin(), w[b].end()), std::span<const FE>(*g));
      for (std::size_t c = 0; c < width; ++c) y[b * width + c] = r[c];
    }
  };
  auto hankel_mul = [field, hankel, width](std::span<FE> blk) {
    std::vector<FE> out(width, field.zero());
    for (std::size_t r = 0; r < width; ++r)
      for (std::size_t c = 0; c < width; ++c) out[r] = field.add(out[r], field.mul((*hankel)[r + c], blk[c]));
    std::copy(out.begin(), out.end(), blk.begin());
  };
  auto hankel_solve = [field, hankel, width](std::span<FE> blk) {
    std::vector<FE> x(width, field.zero());
    for (std::size_t r = 0; r < width; ++r) {
      FE acc = blk[r];
      for (std::size_t c = width - r; c < width; ++c) acc = field.sub(acc, field.mul((*hankel)[r + c], x[c]));
      x[width - 1 - r] = acc;
    }
    std::copy(x.begin(), x.end(), blk.begin());
  };

  const std::size_t rows = a.rows(), cols = a.cols();
  auto apply = [a, gather, scatter, cols](std::span<const FE> x, std::span<FE> y) {
    scatter(a.apply(gather(x, cols)), y);
  };
  auto apply_t = [a, gather, scatter, hankel_mul, hankel_solve, rows, cols, width](std::span<const FE> x,
                                                                                   std::span<FE> y) {
    std::vector<FE> tmp(x.begin(), x.end());
    for (std::size_t b = 0; b < rows; ++b) hankel_solve(std::span<FE>(tmp).subspan(b * width, width));
    scatter(a.apply_transpose(gather(tmp, rows)), y);
    for (std::size_t b = 0; b < cols; ++b) hankel_mul(y.subspan(b * width, width));
  };
  return Operator<F>(field, rows * width, cols * width, apply, apply_t);
}

}  // namespace lsnf
