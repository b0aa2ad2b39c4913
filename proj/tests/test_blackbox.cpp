#include "doctest.h"
#include "lsnf/blackbox.hpp"

using namespace lsnf;

namespace {

using Zp = PrimeField;

/// Minimal polynomial by finding the first linear relation among vec(A^i),
/// solved with dense Gauss-Jordan elimination.
poly::Poly<Zp> dense_minpoly(const DenseMatrix<Zp>& a) {
  const Zp& f = a.ring();
  const std::size_t n = a.rows(), nn = n * n;
  std::vector<DenseMatrix<Zp>> powers{DenseMatrix<Zp>::identity(f, n)};
  for (std::size_t k = 1;; ++k) {
    powers.push_back(powers.back() * a);
    // Solve sum_{i<k} c_i vec(A^i) = -vec(A^k).
    DenseMatrix<Zp> sys(f, nn, k + 1);
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) sys(r * n + c, i) = i < k ? powers[i](r, c) : f.neg(powers[k](r, c));
    std::vector<std::size_t> pivcol;
    std::size_t row = 0;
    for (std::size_t col = 0; col < k && row < nn; ++col) {
      std::size_t p = row;
      while (p < nn && sys(p, col) == 0) ++p;
      if (p == nn) continue;
      for (std::size_t j = 0; j <= k; ++j) std::swap(sys(p, j), sys(row, j));
      auto inv = f.inv(sys(row, col));
      for (std::size_t j = 0; j <= k; ++j) sys(row, j) = f.mul(sys(row, j), inv);
      for (std::size_t i = 0; i < nn; ++i) {
        if (i == row || sys(i, col) == 0) continue;
        auto c = sys(i, col);
        for (std::size_t j = 0; j <= k; ++j) sys(i, j) = f.sub(sys(i, j), f.mul(c, sys(row, j)));
      }
      pivcol.push_back(col);
      ++row;
    }
    bool consistent = true;
    for (std::size_t i = row; i < nn; ++i) consistent = consistent && sys(i, k) == 0;
    if (!consistent || pivcol.size() < k) continue;
    poly::Poly<Zp> m(k + 1, 0);
    for (std::size_t r = 0; r < k; ++r) m[pivcol[r]] = sys(r, k);
    m[k] = 1;
    return m;
  }
}

DenseMatrix<Zp> planted_rank(const Zp& f, std::size_t rows, std::size_t cols, std::size_t r, Rng& rng) {
  return DenseMatrix<Zp>::random(f, rows, r, rng) * DenseMatrix<Zp>::random(f, r, cols, rng);
}

}  // namespace

TEST_CASE("berlekamp-massey on simple sequences") {
  Zp f(7);
  std::vector<u64> zeros(10, 0);
  CHECK(berlekamp_massey(f, std::span<const u64>(zeros)) == poly::Poly<Zp>{1});
  std::vector<u64> geo;
  u64 x = 3;
  for (int i = 0; i < 10; ++i) {
    geo.push_back(x);
    x = f.mul(x, 5);
  }
  CHECK(berlekamp_massey(f, std::span<const u64>(geo)) == poly::Poly<Zp>{2, 1});
  std::vector<u64> fib{0, 1};
  for (int i = 2; i < 12; ++i) fib.push_back(f.add(fib[i - 1], fib[i - 2]));
  CHECK(berlekamp_massey(f, std::span<const u64>(fib)) == poly::Poly<Zp>{6, 6, 1});
}

TEST_CASE("projected sequence generator divides the dense minimal polynomial") {
  Zp f(101);
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    auto a = DenseMatrix<Zp>::random(f, 5, 5, rng);
    auto m = dense_minpoly(a);
    auto u = detail::random_vector(f, 5, rng), w = detail::random_vector(f, 5, rng);
    std::vector<u64> seq;
    for (int i = 0; i < 10; ++i) {
      seq.push_back(detail::dot(f, std::span<const u64>(u), std::span<const u64>(w)));
      w = a.apply(w);
    }
    auto g = berlekamp_massey(f, std::span<const u64>(seq));
    CHECK(poly::divrem(f, m, g).second.empty());
  }
}

TEST_CASE("black-box minimal polynomial") {
  Zp f(101);
  Rng rng(2);
  CHECK(minpoly_blackbox(dense_operator(DenseMatrix<Zp>(f, 4, 4)), rng) == poly::Poly<Zp>{0, 1});
  CHECK(minpoly_blackbox(identity_operator(f, 4), rng) == poly::Poly<Zp>{100, 1});
  for (int t = 0; t < 10; ++t) {
    auto a = DenseMatrix<Zp>::random(f, 6, 6, rng);
    if (t % 2) a = planted_rank(f, 6, 6, 3, rng);
    CHECK(minpoly_blackbox(dense_operator(a), rng) == dense_minpoly(a));
  }
}

TEST_CASE("rank of planted matrices") {
  Rng rng(3);
  Zp f(101);
  CHECK(rank_blackbox(dense_operator(DenseMatrix<Zp>(f, 5, 5)), rng).rank == 0);
  auto a = planted_rank(f, 10, 10, 6, rng);
  auto res = rank_blackbox(dense_operator(a), rng);
  CHECK(res.rank == 6);
  CHECK(res.extension_degree > 1);
  for (u64 p : {2, 3, 65521}) {
    Zp g(p);
    for (auto [rows, cols, r] : {std::tuple{7, 12, 5}, {12, 7, 4}, {9, 9, 9}, {8, 8, 1}}) {
      auto m = planted_rank(g, rows, cols, r, rng);
      const auto exact = dense_rank(m);
      CHECK(rank_blackbox(dense_operator(m), rng).rank == exact);
    }
  }
}

TEST_CASE("rank never overestimates and respects the matvec budget") {
  Rng rng(4);
  Zp f(3);
  for (int t = 0; t < 30; ++t) {
    auto a = planted_rank(f, 12, 12, 1 + rng.below(11), rng);
    const auto exact = dense_rank(a);
    auto op = dense_operator(a);
    RankOptions opts;
    opts.trials = 1;
    opts.xi = 1.0;
    auto res = rank_blackbox(op, rng, opts);
    CHECK(res.rank <= exact);
    SparseBlackBox<Zp> bb(TripletMatrix<Zp>::from_dense(a));
    auto build = [&](const auto& k, const auto& hom) { return bb.over(k, hom); };
    auto r2 = rank_blackbox(f, 12, 12, build, rng, RankOptions{100.0, 1, 0});
    CHECK(r2.rank <= exact);
    CHECK(bb.counter()->value() <= 4 * 12);
  }
}

TEST_CASE("rank of embedded powers of f") {
  Rng rng(5);
  for (unsigned d = 1; d <= 3; ++d)
    for (u64 p : {2, 3, 5}) {
      PolyQuotRing<Zp> ring(Zp(p), first_irreducible(Zp(p), d), 3);
      for (unsigned i = 0; i <= 3; ++i) {
        DenseMatrix<PolyQuotRing<Zp>> a(ring, 1, 1);
        a(0, 0) = ring.uniformizer_pow(i);
        auto res = rank_blackbox(embed_phi(dense_operator(a), 3), rng);
        CHECK(res.rank == d * (3 - i));
      }
    }
}

TEST_CASE("nullspace sampling") {
  Rng rng(6);
  Zp f5(5);
  auto z = nullspace_sample(dense_operator(DenseMatrix<Zp>(f5, 4, 4)), 4, rng);
  CHECK(z == DenseMatrix<Zp>::identity(f5, 4));

  Zp f7(7);
  auto d = DenseMatrix<Zp>::identity(f7, 3);
  d(2, 2) = 0;
  auto k = nullspace_sample(dense_operator(d), 1, rng);
  CHECK(k(0, 0) == 0);
  CHECK(k(1, 0) == 0);
  CHECK(k(2, 0) != 0);
  CHECK_THROWS_AS(nullspace_sample(dense_operator(d), 2, rng), Error);

  for (u64 p : {2, 101, 65521}) {
    Zp f(p);
    for (int t = 0; t < 5; ++t) {
      auto a = planted_rank(f, 8, 8, 5, rng);
      auto n = nullspace_sample(dense_operator(a), 3, rng);
      CHECK(dense_rank(n) == 3);
      bool zero = true;
      auto an = a * n;
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 3; ++j) zero = zero && an(i, j) == 0;
      CHECK(zero);
    }
    auto wide = planted_rank(f, 4, 9, 3, rng);
    CHECK(dense_rank(nullspace_sample(dense_operator(wide), 6, rng)) == 6);
  }
}
