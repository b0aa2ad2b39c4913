#include "lsnf/descriptor.hpp"

#include <charconv>
#include <string>

namespace lsnf {

namespace {

[[noreturn]] void bad(std::string_view text, const std::string& why) {
  fail(ErrorCode::Parse, "ring descriptor '" + std::string(text) + "': " + why);
}

u64 number(std::string_view text, std::string_view token, const char* what) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
    bad(text, std::string("invalid ") + what + " '" + std::string(token) + "'");
  return v;
}

u64 prime(std::string_view text, std::string_view token) {
  const u64 p = number(text, token, "prime");
  if (!is_prime(p)) bad(text, std::to_string(p) + " is not prime");
  return p;
}

unsigned positive(std::string_view text, std::string_view token, const char* what) {
  const u64 v = number(text, token, what);
  if (v == 0 || v > 64) bad(text, std::string(what) + " must be in 1..64");
  return static_cast<unsigned>(v);
}

/// Splits "<a>^<b>" at the last caret.
std::pair<std::string_view, std::string_view> power(std::string_view text, std::string_view token) {
  const auto caret = token.rfind('^');
  if (caret == std::string_view::npos) bad(text, "expected '<base>^<exponent>'");
  return {token.substr(0, caret), token.substr(caret + 1)};
}

}  // namespace

GFq standard_gf(u64 p, unsigned m) { return GFq(PrimeField(p), first_irreducible(PrimeField(p), m)); }

AnyRing parse_ring(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) bad(text, "missing ':' after the ring kind");
  const std::string_view kind = text.substr(0, colon), rest = text.substr(colon + 1);
  if (kind == "Zp") return PrimeField(prime(text, rest));
  if (kind == "Zpe") {
    auto [p, e] = power(text, rest);
    const u64 q = prime(text, p);
    const unsigned ex = positive(text, e, "exponent");
    if (checked_pow(q, ex) == 0) bad(text, "p^e must fit in 64 bits");
    return LocalIntRing(q, ex);
  }
  if (kind == "GR") {
    const auto c2 = rest.find(':');
    if (c2 == std::string_view::npos) bad(text, "expected GR:<p>^<e>:<eta>");
    auto [p, e] = power(text, rest.substr(0, c2));
    const u64 q = prime(text, p);
    const unsigned ex = positive(text, e, "exponent");
    const unsigned eta = positive(text, rest.substr(c2 + 1), "residue degree");
    if (checked_pow(q, ex) == 0) bad(text, "p^e must fit in 64 bits");
    return GaloisRing(q, ex, first_irreducible(PrimeField(q), eta));
  }
  if (kind == "PQ") {
    auto [body, e] = power(text, rest);
    const unsigned ex = positive(text, e, "exponent");
    const auto c2 = body.rfind(':');
    if (c2 == std::string_view::npos) bad(text, "expected PQ:<p>[:<m>]:<f>^<e>");
    const std::string_view head = body.substr(0, c2), coeffs = body.substr(c2 + 1);
    const auto c3 = head.find(':');
    const u64 p = prime(text, head.substr(0, c3));
    const unsigned m = c3 == std::string_view::npos ? 1 : positive(text, head.substr(c3 + 1), "field degree");
    std::vector<long long> f;
    try {
      f = parse_signed_list(coeffs);
    } catch (const Error& err) {
      bad(text, err.what());
    }
    try {
      if (m == 1) {
        PrimeField fp(p);
        poly::Poly<PrimeField> g;
        for (long long c : f) g.push_back(fp.from_signed(c));
        return PolyQuotRing<PrimeField>(fp, std::move(g), ex);
      }
      GFq k = standard_gf(p, m);
      poly::Poly<GFq> g;
      for (long long c : f) g.push_back(detail::parse_field_coeff(k, c));
      return PolyQuotRing<GFq>(k, std::move(g), ex);
    } catch (const Error& err) {
      bad(text, err.what());
    }
  }
  bad(text, "unknown ring kind '" + std::string(kind) + "'");
}

std::string describe(const AnyRing& ring) {
  return std::visit([](const auto& r) { return r.describe(); }, ring);
}

}  // namespace lsnf
