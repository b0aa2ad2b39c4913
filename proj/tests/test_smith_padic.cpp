#include "doctest.h"
#include "lsnf/planted.hpp"
#include "lsnf/smith_padic.hpp"

using namespace lsnf;

namespace {

using Zpe = LocalIntRing;

SparseBlackBox<Zpe> box(const DenseMatrix<Zpe>& a) { return SparseBlackBox<Zpe>(TripletMatrix<Zpe>::from_dense(a)); }

auto id_hom = [](u64 x) { return x; };

/// Columns `cols` of the identity (n x cols.size()).
DenseMatrix<Zpe> selector(const Zpe& r, std::size_t n, const std::vector<std::size_t>& cols) {
  DenseMatrix<Zpe> s(r, n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) s(cols[j], j) = r.one();
  return s;
}

}  // namespace

TEST_CASE("preconditioner domains") {
  Rng rng(1);
  Zpe r(1009, 1);
  auto pair = make_preconditioners(r, 4, 4, 3, PreconditionerMode::Provable, 2.0, rng);
  CHECK(pair.domain == "range 192");
  bool in_range = true;
  for (const auto* spec : {&pair.left, &pair.right}) {
    for (u64 x : spec->diagonals) in_range = in_range && x < 192;
    for (u64 x : spec->left) in_range = in_range && x < 192;
    for (u64 x : spec->right) in_range = in_range && x < 192;
  }
  CHECK(in_range);
  CHECK(galois_degree(2, 10, 10, 10, 2.0) == 11);
  CHECK_THROWS_AS(make_preconditioners(Zpe(2, 3), 10, 10, 4, PreconditionerMode::Provable, 2.0, rng), Error);

  GaloisRing gr(2, 3, first_irreducible(PrimeField(2), 11));
  auto gpair = make_preconditioners(gr, 10, 10, 4, PreconditionerMode::Provable, 2.0, rng);
  bool binary = true;
  for (const auto& x : gpair.left.diagonals)
    for (u64 c : x) binary = binary && c < 2;
  CHECK(binary);
}

TEST_CASE("dimension reduction") {
  Rng rng(2);
  Zpe r(3, 2);
  auto a = DenseMatrix<Zpe>::random(r, 5, 5, rng);
  auto pair = make_preconditioners(r, 5, 5, 3, PreconditionerMode::Heuristic, 100.0, rng);
  auto reduced = to_dense(reduce_dimension(dense_operator(a), pair));
  CHECK(reduced == to_dense(pair.b1()) * a * to_dense(pair.b2()));

  auto id = DenseMatrix<Zpe>::identity(r, 5);
  auto full = make_preconditioners(r, 5, 5, 5, PreconditionerMode::Heuristic, 100.0, rng);
  int units = 0;
  for (int t = 0; t < 20; ++t) {
    full = make_preconditioners(r, 5, 5, 5, PreconditionerMode::Heuristic, 100.0, rng);
    auto s = dense_smith_local(to_dense(reduce_dimension(dense_operator(id), full)));
    units += s.counts[0] == 5;
  }
  CHECK(units >= 1);

  Zpe r101(101, 2);
  std::vector<unsigned> v{0, 0, 1};
  auto d = smith_diagonal(r101, 5, 5, std::span<const unsigned>(v));
  int matches = 0;
  for (int t = 0; t < 20; ++t) {
    auto p3 = make_preconditioners(r101, 5, 5, 3, PreconditionerMode::Heuristic, 100.0, rng);
    auto s = dense_smith_local(to_dense(reduce_dimension(dense_operator(d), p3)));
    matches += s.counts == std::vector<std::size_t>{2, 1};
  }
  CHECK(matches >= 18);
  auto z = to_dense(reduce_dimension(dense_operator(DenseMatrix<Zpe>(r, 5, 5)), pair));
  CHECK(z == DenseMatrix<Zpe>(r, 3, 3));
}

TEST_CASE("nullspace pipeline against the dense oracle") {
  Rng rng(3);
  {
    Zpe r(101, 3);
    auto src = box(DenseMatrix<Zpe>::identity(r, 6));
    int units = 0;
    for (int t = 0; t < 20; ++t) {
      auto pair = make_preconditioners(r, 6, 6, 6, PreconditionerMode::Heuristic, 100.0, rng);
      auto res = smith_pe_nullspace(src, r, id_hom, pair, rng);
      units += res.r0 == 6 && res.k == 0 && res.divisibility_checked == 0;
    }
    CHECK(units >= 18);
  }
  int agree = 0, verified = 0, total = 0;
  for (u64 p : {3, 97})
    for (int t = 0; t < 15; ++t) {
      const unsigned e = 1 + static_cast<unsigned>(rng.below(4));
      Zpe r(p, e);
      const std::size_t n = 4 + rng.below(21);
      std::vector<unsigned> vals;
      const std::size_t nz = rng.below(n + 1);
      for (std::size_t i = 0; i < nz; ++i) vals.push_back(static_cast<unsigned>(rng.below(e)));
      std::sort(vals.begin(), vals.end());
      auto a = planted_dense(r, n, n, std::span<const unsigned>(vals), rng);
      auto src = box(a);
      const std::size_t ell = std::min(n, nz + 2);
      auto pair = make_preconditioners(r, n, n, ell, PreconditionerMode::Heuristic, 100.0, rng);
      ++total;
      try {
        auto res = smith_pe_nullspace(src, r, id_hom, pair, rng);
        auto rep = projection_verify(src.op(), pair.b1(), pair.b2(), 21, rng);
        if (!rep.verified) continue;
        ++verified;
        agree += res.multiplicities == dense_smith_local(a);
        CHECK(res.divisibility_checked == res.k * ell);
        CHECK(res.storage_peak <= 4 * std::max<std::size_t>(res.k, 1) * ell);
      } catch (const Error& err) {
        MESSAGE("pipeline error: " << std::string(err.what()));
      }
    }
  CHECK(agree == verified);
  CHECK(verified >= total * 2 / 3);
}

TEST_CASE("one-sided check") {
  Rng rng(4);
  Zpe r(3, 2);
  auto a = DenseMatrix<Zpe>::random(r, 4, 4, rng);
  auto y = DenseMatrix<Zpe>::random(r, 4, 1, rng);
  DenseMatrix<Zpe> ay(r, 4, 5);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) ay(i, j) = a(i, j);
    ay(i, 4) = (a * y)(i, 0);
  }
  CHECK(one_side_check(a, ay));

  // A = diag(1, 3), Q = e1: AQ misses the invariant 3 in the first column.
  std::vector<unsigned> v{0, 1};
  auto d = smith_diagonal(r, 2, 2, std::span<const unsigned>(v));
  int rejected = 0;
  for (int t = 0; t < 200; ++t) {
    auto planted = random_unimodular(r, 2, rng) * d;
    auto aq = planted.submatrix(0, 1, 2, 1);
    auto yv = DenseMatrix<Zpe>::random(r, 2, 1, rng);
    auto col = planted * yv;
    DenseMatrix<Zpe> both(r, 2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
      both(i, 0) = aq(i, 0);
      both(i, 1) = col(i, 0);
    }
    rejected += !one_side_check(aq, both);
  }
  CHECK(rejected >= 200 * 2 / 3 - 20);

  int accepted = 0;
  for (int t = 0; t < 200; ++t) {
    auto planted = random_unimodular(r, 3, rng) * smith_diagonal(r, 3, 3, std::span<const unsigned>(v));
    auto aq = planted.submatrix(0, 0, 3, 2);
    auto yv = DenseMatrix<Zpe>::random(r, 3, 1, rng);
    auto col = planted * yv;
    DenseMatrix<Zpe> both(r, 3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      both(i, 0) = aq(i, 0);
      both(i, 1) = aq(i, 1);
      both(i, 2) = col(i, 0);
    }
    accepted += one_side_check(aq, both);
  }
  CHECK(accepted == 200);
}

TEST_CASE("projection verification") {
  Rng rng(5);
  Zpe r2(2, 3);
  auto id = dense_operator(DenseMatrix<Zpe>::identity(r2, 4));
  auto rep = projection_verify(id, id, id, 21, rng);
  CHECK(rep.verified);
  CHECK(rep.failure_bound <= 1e-6);
  CHECK(rep.k == 4);

  Zpe r(3, 2);
  std::vector<unsigned> v{0, 0, 1, 1};
  int rejected = 0, accepted_true = 0;
  for (int t = 0; t < 100; ++t) {
    auto u = random_unimodular(r, 6, rng), w = random_unimodular(r, 6, rng);
    auto a = u * smith_diagonal(r, 6, 6, std::span<const unsigned>(v)) * w;
    auto uinv = dense_inverse(u), winv = dense_inverse(w);
    auto good_q = winv * selector(r, 6, {0, 1, 2, 3});
    auto good_p = selector(r, 6, {0, 1, 2, 3}).transposed() * uinv;
    accepted_true += projection_verify(dense_operator(a), dense_operator(good_p), dense_operator(good_q), 2, rng).verified;
    auto bad_q = winv * selector(r, 6, {0, 2, 3, 4});
    auto bad_p = selector(r, 6, {0, 2, 3, 4}).transposed() * uinv;
    rejected += !projection_verify(dense_operator(a), dense_operator(bad_p), dense_operator(bad_q), 2, rng).verified;
  }
  CHECK(accepted_true == 100);
  CHECK(rejected >= 75);
}

TEST_CASE("smith_pe driver") {
  Rng rng(6);
  Zpe r(3, 3);
  std::vector<unsigned> v{0, 0, 0, 0, 0, 1, 1, 2};
  auto a = planted_dense(r, 14, 12, std::span<const unsigned>(v), rng);
  auto expect = dense_smith_local(a);
  auto src = box(a);
  auto res = smith_pe(src, rng);
  CHECK(res.multiplicities == expect);
  CHECK(res.verification->verified);
  CHECK(res.matvecs > 0);
  CHECK(res.eta == 2);

  SmithPeOptions plain;
  plain.galois_degree = 1;
  auto flat = smith_pe(src, rng, plain);
  CHECK(flat.eta == 1);
  if (flat.verification->verified) CHECK(flat.multiplicities == expect);

  SmithPeOptions provable;
  provable.mode = PreconditionerMode::Provable;
  provable.xi = 2.0;
  auto g = smith_pe(src, rng, provable);
  CHECK(g.multiplicities == expect);
  CHECK(g.eta > 1);
  CHECK(g.domain == "Galois coefficients");

  Zpe big(1000003, 2);
  std::vector<unsigned> w{0, 0, 1, 1, 2};
  auto b = planted_dense(big, 8, 8, std::span<const unsigned>(w), rng);
  auto pr = smith_pe(box(b), rng, provable);
  CHECK(pr.multiplicities == dense_smith_local(b));
  CHECK(pr.domain == "range 768");
}

TEST_CASE("heuristic galois degree") {
  CHECK(heuristic_galois_degree(2) == 3);
  CHECK(heuristic_galois_degree(3) == 2);
  CHECK(heuristic_galois_degree(7) == 2);
  CHECK(heuristic_galois_degree(11) == 1);
}

TEST_CASE("sparse 100x100 over Z/3^5 at l = 52") {
  Rng rng(2024);
  Zpe r(3, 5);
  GaloisRing gr(3, 5, first_irreducible(PrimeField(3), 2));
  auto emb = [&gr](u64 x) { return gr.embed(x); };
  std::vector<unsigned> v(45, 0);
  v.insert(v.end(), {1, 1, 1, 3, 4});
  int good = 0;
  for (int t = 0; t < 5; ++t) {
    auto a = planted_sparse(r, 100, 100, std::span<const unsigned>(v), rng);
    SparseBlackBox<Zpe> src(a);
    auto pair = make_preconditioners(gr, 100, 100, 52, PreconditionerMode::Heuristic, 100.0, rng);
    auto res = smith_pe_nullspace(src, gr, emb, pair, rng);
    auto rep = projection_verify(src.over(gr, emb), pair.b1(), pair.b2(), 21, rng);
    good += rep.verified && res.multiplicities.counts == std::vector<std::size_t>{45, 3, 0, 1, 1} &&
            res.multiplicities.zeros == 50;
  }
  CHECK(good >= 4);
}
