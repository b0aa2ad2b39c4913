#include "doctest.h"
#include "lsnf/dense.hpp"

using namespace lsnf;

namespace {

template <class R>
DenseMatrix<R> diag_matrix(const R& ring, std::size_t rows, std::size_t cols, const std::vector<unsigned>& vals) {
  DenseMatrix<R> d(ring, rows, cols);
  for (std::size_t i = 0; i < vals.size(); ++i) d(i, i) = ring.uniformizer_pow(vals[i]);
  return d;
}

template <class R>
DenseMatrix<R> random_unit_lower(const R& ring, std::size_t n, Rng& rng) {
  auto m = DenseMatrix<R>::identity(ring, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = ring.random(rng);
  return m;
}

template <class R>
DenseMatrix<R> random_unimodular(const R& ring, std::size_t n, Rng& rng) {
  return random_unit_lower(ring, n, rng) * random_unit_lower(ring, n, rng).transposed();
}

}  // namespace

TEST_CASE("dense rank over a prime field") {
  PrimeField f(7);
  DenseMatrix<PrimeField> m(f, 3, 3);
  m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
  m(1, 0) = 2; m(1, 1) = 4; m(1, 2) = 6;
  m(2, 0) = 0; m(2, 1) = 1; m(2, 2) = 5;
  CHECK(dense_rank(m) == 2);
  EchelonBasis<PrimeField> basis(f, 3);
  CHECK(basis.insert(m.column(0)));
  CHECK(basis.insert(m.column(1)));
  CHECK_FALSE(basis.insert({2, 4, 1}));
  CHECK(basis.size() == 2);
}

TEST_CASE("local Smith form of a hand example over Z/9") {
  LocalIntRing r(3, 2);
  DenseMatrix<LocalIntRing> m(r, 2, 2);
  m(0, 0) = 3; m(0, 1) = 6;
  m(1, 0) = 6; m(1, 1) = 3;
  // det = 9 - 36 = -27: divisors v1 = 1, v2 = 3, so invariants (3, 9=0 mod 9).
  auto s = dense_smith_local(m);
  CHECK(s.counts == std::vector<std::size_t>{0, 1});
  CHECK(s.zeros == 1);
  auto v = determinantal_divisor_valuations(m, 2);
  CHECK(v[0] == 1u);
  CHECK(v[1] == 3u);
}

TEST_CASE("planted diagonals survive unimodular mixing") {
  Rng rng(11);
  for (u64 p : {2, 3, 5}) {
    LocalIntRing r(p, 4);
    for (int t = 0; t < 20; ++t) {
      std::vector<unsigned> vals;
      for (int i = 0; i < 4; ++i) vals.push_back(static_cast<unsigned>(rng.below(5)));
      std::sort(vals.begin(), vals.end());
      auto a = random_unimodular(r, 5, rng) * diag_matrix(r, 5, 6, vals) * random_unimodular(r, 6, rng);
      auto expect = vals;
      expect.push_back(4);
      CHECK(local_invariant_valuations(a) == expect);
    }
  }
}

TEST_CASE("elimination agrees with determinantal divisors") {
  Rng rng(12);
  for (u64 p : {2, 3}) {
    LocalIntRing r(p, 3);
    for (int t = 0; t < 40; ++t) {
      auto a = DenseMatrix<LocalIntRing>::random(r, 4, 4, rng);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          if (rng.below(2)) a(i, j) = r.mul(a(i, j), p);
      auto div = determinantal_divisor_valuations(a, 4);
      CHECK(invariants_from_divisors(div, 3) == local_invariant_valuations(a));
    }
  }
  PolyQuotRing<PrimeField> pq(PrimeField(2), {1, 1, 1}, 3);
  for (int t = 0; t < 30; ++t) {
    auto a = DenseMatrix<PolyQuotRing<PrimeField>>::random(pq, 3, 4, rng);
    for (std::size_t j = 0; j < 4; ++j)
      if (rng.below(2)) a(0, j) = pq.mul(a(0, j), pq.uniformizer_pow(1));
    auto div = determinantal_divisor_valuations(a, 3);
    CHECK(invariants_from_divisors(div, 3) == local_invariant_valuations(a));
  }
}

TEST_CASE("galois ring local Smith form") {
  Rng rng(13);
  GaloisRing gr(3, 3, {2, 2, 0, 1});
  for (int t = 0; t < 10; ++t) {
    std::vector<unsigned> vals{0, 1, 1, 2};
    auto a = random_unimodular(gr, 4, rng) * diag_matrix(gr, 4, 4, vals) * random_unimodular(gr, 4, rng);
    CHECK(local_invariant_valuations(a) == vals);
  }
}
