#include "doctest.h"
#include "lsnf/rings.hpp"

using namespace lsnf;

TEST_CASE("prime field arithmetic") {
  PrimeField f(101);
  CHECK(f.mul(f.inv(7), 7) == 1);
  CHECK(f.from_signed(-1) == 100);
  CHECK(f.parse_element("-205") == 98);
  CHECK_THROWS_AS(PrimeField(91), Error);
  CHECK_THROWS_AS(f.inv(0), Error);
}

TEST_CASE("local integer ring valuations and inverses") {
  LocalIntRing r(3, 5);
  CHECK(r.modulus() == 243);
  CHECK(r.inv(2) == 122);
  CHECK(r.valuation(162) == 4);
  CHECK(r.valuation(0) == 5);
  CHECK(r.div_uniformizer_pow(162, 4) == 2);
  CHECK(r.uniformizer_pow(5) == 0);
  CHECK(r.from_signed(-1) == 242);
  CHECK_THROWS_AS(r.inv(6), Error);
  CHECK_THROWS_AS(LocalIntRing(65521, 5), Error);
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    u64 a = r.random(rng);
    if (r.is_unit(a)) CHECK(r.mul(a, r.inv(a)) == 1);
    unsigned v = r.valuation(a);
    if (a) CHECK(r.mul(r.div_uniformizer_pow(a, v), r.uniformizer_pow(v)) == a);
  }
}

TEST_CASE("deterministic irreducibles") {
  CHECK(first_irreducible(PrimeField(2), 3) == poly::Poly<PrimeField>{1, 1, 0, 1});
  CHECK(first_irreducible(PrimeField(3), 2) == poly::Poly<PrimeField>{1, 0, 1});
  CHECK(poly::is_irreducible(PrimeField(2), poly::Poly<PrimeField>{1, 1, 1}));
  CHECK_FALSE(poly::is_irreducible(PrimeField(2), poly::Poly<PrimeField>{1, 0, 1}));
  CHECK_FALSE(poly::is_irreducible(PrimeField(5), poly::Poly<PrimeField>{4, 0, 1}));
}

TEST_CASE("extension field") {
  PrimeField f2(2);
  GFq k(f2, {1, 1, 0, 1});
  GFq::Element y{0, 1, 0};
  CHECK(k.inv(y) == GFq::Element{1, 0, 1});
  CHECK(encode_gf(k, GFq::Element{1, 0, 1}) == 5);
  CHECK(decode_gf(k, 6) == GFq::Element{0, 1, 1});
  CHECK_THROWS_AS(decode_gf(k, 8), Error);
  CHECK_THROWS_AS(GFq(f2, {1, 0, 1}), Error);

  Rng rng(2);
  auto g = random_irreducible(k, 2, rng);
  ExtField<GFq> kk(k, g);
  CHECK(kk.size() == doctest::Approx(64.0));
  for (int t = 0; t < 50; ++t) {
    auto a = kk.random(rng), b = kk.random(rng), c = kk.random(rng);
    CHECK(kk.mul(a, kk.add(b, c)) == kk.add(kk.mul(a, b), kk.mul(a, c)));
    if (!kk.is_zero(a)) CHECK(kk.mul(a, kk.inv(a)) == kk.one());
  }
}

TEST_CASE("galois ring") {
  GaloisRing gr(2, 2, {1, 1, 1});
  GaloisRing::Element y{0, 1};
  CHECK(gr.mul(gr.mul(y, y), y) == gr.one());
  CHECK(gr.valuation(GaloisRing::Element{2, 2}) == 1);
  CHECK(gr.valuation(gr.zero()) == 2);
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    auto a = gr.random(rng);
    if (gr.is_unit(a)) CHECK(gr.mul(a, gr.inv(a)) == gr.one());
  }
  CHECK(gr.format_element(gr.parse_element("3,-1")) == "3,3");
}

TEST_CASE("polynomial quotient ring") {
  PrimeField f2(2);
  PolyQuotRing<PrimeField> r(f2, {1, 1, 1}, 2);
  CHECK(r.modulus() == poly::Poly<PrimeField>{1, 0, 1, 0, 1});
  auto z = r.parse_element("0,1");
  CHECK(r.inv(z) == r.parse_element("0,1,0,1"));
  auto f = r.parse_element("1,1,1");
  CHECK(r.valuation(f) == 1);
  CHECK(r.valuation(r.mul(f, f)) == 2);
  CHECK(r.is_zero(r.mul(f, f)));
  CHECK(r.div_uniformizer_pow(r.mul(f, z), 1) == z);
  CHECK(r.describe() == "PQ:2:1,1,1^2");
  CHECK_THROWS_AS(PolyQuotRing<PrimeField>(f2, {1, 0, 1}, 2), Error);

  Rng rng(4);
  PolyQuotRing<PrimeField> s(PrimeField(3), {2, 2, 0, 1}, 3);
  for (int t = 0; t < 100; ++t) {
    auto a = s.random(rng);
    if (s.is_unit(a)) CHECK(s.mul(a, s.inv(a)) == s.one());
    unsigned v = s.valuation(a);
    if (!s.is_zero(a)) CHECK(s.mul(s.div_uniformizer_pow(a, v), s.uniformizer_pow(v)) == a);
  }
}

TEST_CASE("log-table fields") {
  CHECK(first_primitive(PrimeField(2), 3) == poly::Poly<PrimeField>{1, 1, 0, 1});
  // x^2 + 1 is irreducible over Z_3 but x has order 4 there, so it is skipped.
  CHECK(first_primitive(PrimeField(3), 2) == poly::Poly<PrimeField>{2, 1, 1});
  for (auto [p, m] : {std::pair<u64, unsigned>{2, 10}, {3, 5}, {5, 3}, {7, 1}}) {
    ZechField k(p, m);
    GFq ref(PrimeField(p), first_primitive(PrimeField(p), m));
    Rng rng(p * 100 + m);
    for (int t = 0; t < 300; ++t) {
      auto a = k.random(rng), b = k.random(rng);
      auto ra = decode_gf(ref, k.code(a)), rb = decode_gf(ref, k.code(b));
      CHECK(k.code(k.add(a, b)) == encode_gf(ref, ref.add(ra, rb)));
      CHECK(k.code(k.sub(a, b)) == encode_gf(ref, ref.sub(ra, rb)));
      CHECK(k.code(k.mul(a, b)) == encode_gf(ref, ref.mul(ra, rb)));
      if (!k.is_zero(a)) CHECK(k.mul(a, k.inv(a)) == k.one());
    }
    CHECK(k.from_int(p + 1) == k.one());
    CHECK(k.is_zero(k.from_int(p)));
  }
}

template <class R>
void check_mulacc(const R& ring, Rng& rng, std::size_t len) {
  for (int t = 0; t < 20; ++t) {
    MulAcc<R> lazy(ring);
    auto plain = ring.zero();
    for (std::size_t i = 0; i < len; ++i) {
      auto a = ring.random(rng), b = ring.random(rng);
      lazy.add(a, b);
      plain = ring.add(plain, ring.mul(a, b));
    }
    CHECK(lazy.value() == plain);
  }
}

TEST_CASE("lazy dot products") {
  Rng rng(8);
  check_mulacc(PrimeField(65521), rng, 300);
  check_mulacc(PrimeField((u64{1} << 61) - 1), rng, 50);
  check_mulacc(LocalIntRing(3, 5), rng, 300);
  check_mulacc(GFq(PrimeField(3), first_irreducible(PrimeField(3), 4)), rng, 300);
  check_mulacc(GaloisRing(3, 5, first_irreducible(PrimeField(3), 2)), rng, 300);
  check_mulacc(ZechField(2, 22), rng, 100);
  check_mulacc(ZechField(3, 10), rng, 300);
  check_mulacc(ZechField(4093, 1), rng, 5000);
  check_mulacc(ZechField(GFq(PrimeField(3), first_irreducible(PrimeField(3), 2)), 1), rng, 100);
}
