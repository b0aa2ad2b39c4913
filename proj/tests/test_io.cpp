#include <sstream>

#include "doctest.h"
#include "lsnf/descriptor.hpp"
#include "lsnf/planted.hpp"
#include "lsnf/sms.hpp"

using namespace lsnf;

namespace {

std::string parse_error(std::string_view text, const LocalIntRing& r) {
  try {
    parse_sms(text, r);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("sms reading") {
  LocalIntRing z9(3, 2);
  auto m = parse_sms("2 3 M\n1 2 5\n2 3 4\n1 2 5\n2 1 9\n0 0 0\n", z9);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  REQUIRE(m.nnz() == 2);
  CHECK(m.entries()[0].value == 1);  // 5 + 5 = 10 = 1 mod 9; the 9 vanishes
  CHECK(m.entries()[1].value == 4);

  auto blank = parse_sms("\n1 1 M\n\n0 0 0\n", z9);
  CHECK(blank.nnz() == 0);
}

TEST_CASE("sms errors carry line and column") {
  LocalIntRing z9(3, 2);
  CHECK(parse_error("2 2 M\n1 x 3\n0 0 0\n", z9) == "SMS line 2, column 3: expected a nonnegative integer, got 'x'");
  CHECK(parse_error("2 2 M\n3 1 1\n0 0 0\n", z9) == "SMS line 2, column 1: row index out of range");
  CHECK(parse_error("2 2 M\n1  2 1\n", z9) == "SMS line 3, column 1: missing terminator '0 0 0'");
  CHECK(parse_error("2 2 Q\n0 0 0\n", z9) == "SMS line 1, column 5: header type must be 'M'");
  CHECK(parse_error("2 2 M\n1 1 abc\n0 0 0\n", z9).starts_with("SMS line 2, column 5: invalid integer"));
  CHECK(parse_error("2 2 M\n1 1\n0 0 0\n", z9) == "SMS line 2, column 1: entry must have three fields");
  CHECK(parse_error("2 2 M\n0 0 0\n1 1 1\n", z9) == "SMS line 3, column 1: content after terminator");
  CHECK(parse_error("", z9) == "SMS line 1, column 1: missing header 'm n M'");
}

TEST_CASE("sms round trip") {
  Rng rng(3);
  LocalIntRing r(5, 3);
  std::vector<unsigned> v{0, 0, 1, 2};
  auto a = planted_sparse(r, 9, 7, std::span<const unsigned>(v), rng);
  std::ostringstream out;
  write_sms(out, a);
  auto b = parse_sms(out.str(), r);
  CHECK(b.to_dense() == a.to_dense());

  auto gr = std::get<GaloisRing>(parse_ring("GR:3^2:2"));
  TripletMatrix<GaloisRing> g(gr, 2, 2);
  g.add(1, 1, gr.parse_element("4,7"));
  g.add(2, 2, gr.one());
  g.normalize();
  std::ostringstream gout;
  write_sms(gout, g);
  CHECK(parse_sms(gout.str(), gr).to_dense() == g.to_dense());
}

TEST_CASE("ring descriptors") {
  CHECK(std::get<PrimeField>(parse_ring("Zp:101")).characteristic() == 101);
  auto z = std::get<LocalIntRing>(parse_ring("Zpe:3^5"));
  CHECK(z.modulus() == 243);
  auto gr = std::get<GaloisRing>(parse_ring("GR:2^3:4"));
  CHECK(gr.degree() == 4);
  CHECK(gr.exponent() == 3);
  auto pq = std::get<PolyQuotRing<PrimeField>>(parse_ring("PQ:3:1,2,0,1^2"));
  CHECK(pq.d() == 3);
  CHECK(pq.exponent() == 2);
  auto pq4 = std::get<PolyQuotRing<GFq>>(parse_ring("PQ:2:2:2,1^3"));
  CHECK(pq4.d() == 1);
  CHECK(pq4.field().size() == 4);
  for (auto text : {"Zp:101", "Zpe:3^5", "GR:2^3:4", "PQ:3:1,2,0,1^2", "PQ:2:2:2,1^3"})
    CHECK(describe(parse_ring(text)) == text);

  for (auto text : {"Zp:100", "Zpe:3", "Zpe:3^0", "Zpe:2^64", "GR:3^2", "PQ:3:2,0,1^2", "PQ:3:1,2^x", "Q:5", "Zp",
                    "PQ:3:1,1,2^2"})
    CHECK_THROWS_AS(parse_ring(text), Error);
}
