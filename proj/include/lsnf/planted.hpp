#pragma once

// Matrices with a prescribed local Smith form: A = U * D * V with U, V
// unimodular and D = diag(pi^v_1, ..., pi^v_t, 0, ...).

#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "lsnf/dense.hpp"
#include "lsnf/operators.hpp"

namespace lsnf {

/// Product of a random unit lower and a random unit upper triangular matrix.
template <class R>
DenseMatrix<R> random_unimodular(const R& ring, std::size_t n, Rng& rng) {
  auto l = DenseMatrix<R>::identity(ring, n);
  auto u = DenseMatrix<R>::identity(ring, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      l(i, j) = ring.random(rng);
      u(j, i) = ring.random(rng);
    }
  return l * u;
}

/// Diagonal with pi^vals[i] at (i, i); vals >= e give zero entries.
template <class R>
DenseMatrix<R> smith_diagonal(const R& ring, std::size_t rows, std::size_t cols, std::span<const unsigned> vals) {
  if (vals.size() > std::min(rows, cols)) fail(ErrorCode::DimensionMismatch, "too many diagonal entries");
  DenseMatrix<R> d(ring, rows, cols);
  for (std::size_t i = 0; i < vals.size(); ++i) d(i, i) = ring.uniformizer_pow(vals[i]);
  return d;
}

template <class R>
DenseMatrix<R> planted_dense(const R& ring, std::size_t rows, std::size_t cols, std::span<const unsigned> vals,
                             Rng& rng) {
  return random_unimodular(ring, rows, rng) * smith_diagonal(ring, rows, cols, vals) *
         random_unimodular(ring, cols, rng);
}

/// Expand multiplicities into the ascending valuation list.
inline std::vector<unsigned> valuations_of(const std::vector<std::size_t>& counts, std::size_t zeros, unsigned e) {
  std::vector<unsigned> v;
  for (unsigned i = 0; i < counts.size(); ++i) v.insert(v.end(), counts[i], i);
  v.insert(v.end(), zeros, e);
  return v;
}

struct SparsePlantOptions {
  std::size_t lower_per_row = 3;  // off-diagonal entries per row of L
  std::size_t upper_per_row = 4;  // off-diagonal entries per row of R
};

/// Sparse planted instance P1 * L * D * R * P2 with L unit lower and R unit
/// upper triangular, each with a few random off-diagonal entries per row,
/// and P1, P2 random permutations. Rows have at most
/// (lower+1)*(upper+1) nonzeros.
template <class R>
TripletMatrix<R> planted_sparse(const R& ring, std::size_t rows, std::size_t cols, std::span<const unsigned> vals,
                                Rng& rng, const SparsePlantOptions& opts = {}) {
  using E = typename R::Element;
  const std::size_t t = vals.size();
  if (t > std::min(rows, cols)) fail(ErrorCode::DimensionMismatch, "too many diagonal entries");
  auto nonzero = [&] {
    E x;
    do x = ring.random(rng);
    while (ring.is_zero(x));
    return x;
  };
  // Row j of R (j < t), as a sparse map.
  std::vector<std::map<std::size_t, E>> rrows(t);
  for (std::size_t j = 0; j < t; ++j) {
    rrows[j][j] = ring.one();
    if (j + 1 < cols)
      for (std::size_t s = 0; s < opts.upper_per_row; ++s) rrows[j][j + 1 + rng.below(cols - j - 1)] = nonzero();
  }
  std::vector<E> dvals(t);
  for (std::size_t j = 0; j < t; ++j) dvals[j] = ring.uniformizer_pow(vals[j]);

  std::vector<std::size_t> prow(rows), pcol(cols);
  std::iota(prow.begin(), prow.end(), 0);
  std::iota(pcol.begin(), pcol.end(), 0);
  for (std::size_t i = rows; i > 1; --i) std::swap(prow[i - 1], prow[rng.below(i)]);
  for (std::size_t i = cols; i > 1; --i) std::swap(pcol[i - 1], pcol[rng.below(i)]);

  TripletMatrix<R> out(ring, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    // Row i of L restricted to the first t columns.
    std::map<std::size_t, E> lrow;
    if (i < t) lrow[i] = ring.one();
    if (i > 0)
      for (std::size_t s = 0; s < opts.lower_per_row; ++s) {
        const std::size_t j = rng.below(std::min(i, t == 0 ? std::size_t{1} : t));
        if (j < t && j < i) lrow[j] = nonzero();
      }
    std::map<std::size_t, E> acc;
    for (const auto& [j, lv] : lrow) {
      const E coef = ring.mul(lv, dvals[j]);
      if (ring.is_zero(coef)) continue;
      for (const auto& [c, rv] : rrows[j]) {
        auto it = acc.try_emplace(c, ring.zero()).first;
        it->second = ring.add(it->second, ring.mul(coef, rv));
      }
    }
    for (const auto& [c, v] : acc)
      if (!ring.is_zero(v)) out.add(prow[i] + 1, pcol[c] + 1, v);
  }
  out.normalize();
  return out;
}

}  // namespace lsnf
