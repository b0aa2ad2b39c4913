#include "lsnf/rings.hpp"

#include <map>
#include <mutex>

namespace lsnf {

long long parse_signed(std::string_view token) {
  long long v = 0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    fail(ErrorCode::Parse, "invalid integer '" + std::string(token) + "'");
  return v;
}

std::vector<long long> parse_signed_list(std::string_view token) {
  std::vector<long long> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = token.find(',', start);
    out.push_back(parse_signed(token.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

u64 encode_gf(const GFq& field, const GFq::Element& a) {
  const u64 p = field.characteristic();
  u128 code = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    code = code * p + a[i];
    if (code >> 64) fail(ErrorCode::Unsupported, "GF(p^m) element code exceeds 64 bits");
  }
  return static_cast<u64>(code);
}

GFq::Element decode_gf(const GFq& field, u64 code) {
  const u64 p = field.characteristic();
  GFq::Element a(field.degree(), 0);
  for (auto& c : a) {
    c = code % p;
    code /= p;
  }
  if (code != 0) fail(ErrorCode::Parse, "GF(p^m) element code out of range");
  return a;
}

poly::Poly<PrimeField> first_irreducible(const PrimeField& field, unsigned m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "degree must be >= 1");
  const u64 p = field.characteristic();
  poly::Poly<PrimeField> g(m + 1, 0);
  g[m] = 1;
  for (;;) {
    if (poly::is_irreducible(field, g)) return g;
    // Increment (c_{m-1}, ..., c_0) as a base-p counter, low digit c_0.
    std::size_t i = 0;
    while (i < m) {
      if (++g[i] < p) break;
      g[i] = 0;
      ++i;
    }
    if (i == m) fail(ErrorCode::Internal, "no irreducible polynomial found");
  }
}

namespace {

GFq make_residue(u64 p, const std::vector<u64>& gamma) {
  PrimeField F(p);
  poly::Poly<PrimeField> g;
  for (u64 c : gamma) g.push_back(c % p);
  if (g.empty() || g.back() != 1) fail(ErrorCode::InvalidArgument, "Gamma must be monic");
  return GFq(F, g, true);
}

}  // namespace

GaloisRing::GaloisRing(u64 p, unsigned e, std::vector<u64> gamma)
    : coeff_(p, e), gamma_(std::move(gamma)), residue_(make_residue(p, gamma_)) {
  for (auto& c : gamma_) c = coeff_.from_int(c);
}

GaloisRing::Element GaloisRing::mul(const Element& a, const Element& b) const {
  const std::size_t m = degree();
  const u64 q = coeff_.modulus();
  boost::container::small_vector<u64, 24> prod(2 * m - 1, 0);
  if (q < (u64{1} << 28) && m < 256) {
    // Sums of at most m products stay below 2^64.
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) prod[i + j] += a[i] * b[j];
    }
    for (auto& x : prod) x %= q;
    for (std::size_t i = prod.size(); i-- > m;) {
      const u64 c = prod[i];
      if (c == 0) continue;
      const u64 negc = q - c;
      for (std::size_t j = 0; j < m; ++j) prod[i - m + j] = (prod[i - m + j] + negc * gamma_[j]) % q;
    }
    return Element(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(m));
  }
  if (q <= 0xffffffffULL) {
    boost::container::small_vector<u128, 24> acc(2 * m - 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) acc[i + j] += a[i] * b[j];
    }
    for (std::size_t i = 0; i < acc.size(); ++i) prod[i] = static_cast<u64>(acc[i] % q);
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j], q), q);
    }
  }
  for (std::size_t i = prod.size(); i-- > m;) {
    const u64 c = prod[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j < m; ++j) prod[i - m + j] = submod(prod[i - m + j], mulmod(c, gamma_[j], q), q);
  }
  return Element(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(m));
}

GaloisRing::Element GaloisRing::inv(const Element& a) const {
  if (!is_unit(a)) fail(ErrorCode::NonUnit, "element is divisible by p");
  Element x = lift_residue(residue_.inv(residue(a)));
  const Element two = from_int(2);
  for (unsigned prec = 1; prec < exponent(); prec *= 2) x = mul(x, sub(two, mul(a, x)));
  return x;
}

unsigned GaloisRing::valuation(const Element& a) const {
  unsigned v = exponent();
  for (u64 c : a)
    if (c) v = std::min(v, coeff_.valuation(c));
  return v;
}

GaloisRing::Element GaloisRing::parse_element(std::string_view s) const {
  auto vals = parse_signed_list(s);
  if (vals.size() > degree()) fail(ErrorCode::Parse, "Galois ring element has too many coefficients");
  Element a = zero();
  for (std::size_t i = 0; i < vals.size(); ++i) a[i] = coeff_.from_signed(vals[i]);
  return a;
}

std::string GaloisRing::format_element(const Element& a) const {
  std::size_t n = a.size();
  while (n > 0 && a[n - 1] == 0) --n;
  if (n == 0) return "0";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s;
}

}  // namespace lsnf

namespace lsnf {

poly::Poly<PrimeField> first_primitive(const PrimeField& field, unsigned m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "degree must be >= 1");
  const u64 p = field.characteristic();
  const u64 q = checked_pow(p, m);
  if (q == 0) fail(ErrorCode::Unsupported, "p^m must fit in 64 bits");
  std::vector<u64> primes;
  u64 rest = q - 1;
  for (u64 r = 2; r * r <= rest; ++r)
    if (rest % r == 0) {
      primes.push_back(r);
      while (rest % r == 0) rest /= r;
    }
  if (rest > 1) primes.push_back(rest);

  poly::Poly<PrimeField> g(m + 1, 0);
  g[m] = 1;
  const poly::Poly<PrimeField> x{0, 1};
  for (;;) {
    if (g[0] != 0 && poly::is_irreducible(field, g)) {
      bool primitive = true;
      for (u64 r : primes) {
        auto pw = poly::powmod(field, x, (q - 1) / r, g);
        poly::trim(field, pw);
        if (pw == poly::Poly<PrimeField>{1}) {
          primitive = false;
          break;
        }
      }
      if (primitive) return g;
    }
    std::size_t i = 0;
    while (i < m) {
      if (++g[i] < p) break;
      g[i] = 0;
      ++i;
    }
    if (i == m) fail(ErrorCode::Internal, "no primitive polynomial found");
  }
}

namespace {

std::shared_ptr<const ZechTables> build_zech(u64 p, unsigned m) {
  const u64 q = checked_pow(p, m);
  if (q == 0 || q > kZechMaxSize) fail(ErrorCode::Unsupported, "GF(p^m) too large for log tables");
  auto t = std::make_shared<ZechTables>();
  t->p = p;
  t->m = m;
  t->order = static_cast<std::uint32_t>(q - 1);
  t->modulus = first_primitive(PrimeField(p), m);
  t->exp.resize(q - 1);
  t->log.assign(q, ZechField::kZero);
  std::vector<u64> digits(m, 0), pw(m, 1);
  for (unsigned i = 1; i < m; ++i) pw[i] = pw[i - 1] * p;
  digits[0] = 1;
  for (std::uint32_t i = 0; i < t->order; ++i) {
    u64 code = 0;
    for (unsigned j = 0; j < m; ++j) code += digits[j] * pw[j];
    t->exp[i] = static_cast<std::uint32_t>(code);
    t->log[code] = i;
    // Multiply by x modulo the primitive polynomial.
    const u64 top = digits[m - 1];
    for (unsigned j = m - 1; j > 0; --j) digits[j] = digits[j - 1];
    digits[0] = 0;
    if (top)
      for (unsigned j = 0; j < m; ++j) digits[j] = (digits[j] + (p - top) * t->modulus[j]) % p;
  }
  t->width = 64 / m;
  const u64 cap = t->width >= 64 ? ~u64{0} : (u64{1} << t->width) - 1;
  t->budget = static_cast<unsigned>(std::min<u64>(cap / (p - 1), u64{1} << 20));
  t->packed.resize(q - 1);
  for (std::uint32_t i = 0; i < t->order; ++i) {
    u64 c = t->exp[i], w = 0;
    for (unsigned j = 0; j < m; ++j, c /= p) w |= (c % p) << (t->width * j);
    t->packed[i] = w;
  }
  t->zech.resize(q - 1);
  for (std::uint32_t d = 0; d < t->order; ++d) {
    const u64 code = t->exp[d];
    const u64 d0 = code % p;
    t->zech[d] = t->log[code - d0 + (d0 + 1) % p];
  }
  return t;
}

}  // namespace

std::shared_ptr<const ZechTables> zech_tables(u64 p, unsigned m) {
  static std::mutex mu;
  static std::map<std::pair<u64, unsigned>, std::shared_ptr<const ZechTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, m}];
  if (!slot) slot = build_zech(p, m);
  return slot;
}

ZechField::ZechField(const GFq& base, unsigned m) : ZechField(base.characteristic(), base.degree() * m) {
  const u64 p = base.characteristic();
  const unsigned eta = base.degree(), n = eta * m;
  const u64 q = checked_pow(p, eta);
  const u64 step = (static_cast<u64>(t_->order)) / (q - 1);
  const auto& g = base.modulus();
  Element beta = kZero;
  for (u64 t = 0; t < q - 1 && beta == kZero; ++t) {
    const Element cand = static_cast<Element>((t * step) % t_->order);
    Element val = kZero, pw = one();
    for (const auto& c : g) {
      val = add(val, mul(from_int(c), pw));
      pw = mul(pw, cand);
    }
    if (val == kZero) beta = cand;
  }
  if (beta == kZero) fail(ErrorCode::Internal, "no root of the subfield modulus found");
  auto sub = std::make_shared<Subfield>(Subfield{base, {}, {}});
  Element pw = one();
  for (unsigned i = 0; i < eta; ++i, pw = mul(pw, beta)) sub->beta_pows.push_back(pw);

  // Columns: digits of beta^i x^j, column index i + eta j; invert mod p.
  std::vector<std::vector<u64>> a(n, std::vector<u64>(2 * n, 0));
  for (unsigned j = 0; j < m; ++j)
    for (unsigned i = 0; i < eta; ++i) {
      u64 c = code(mul(sub->beta_pows[i], static_cast<Element>(j)));
      for (unsigned r = 0; r < n; ++r, c /= p) a[r][i + eta * j] = c % p;
    }
  for (unsigned r = 0; r < n; ++r) a[r][n + r] = 1;
  for (unsigned col = 0; col < n; ++col) {
    unsigned piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) fail(ErrorCode::Internal, "subfield basis is singular");
    std::swap(a[piv], a[col]);
    const u64 inv = powmod(a[col][col], p - 2, p);
    for (auto& x : a[col]) x = mulmod(x, inv, p);
    for (unsigned r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const u64 f = a[r][col];
      for (unsigned c = 0; c < 2 * n; ++c) a[r][c] = submod(a[r][c], mulmod(f, a[col][c], p), p);
    }
  }
  sub->inverse.assign(n, std::vector<u64>(n));
  for (unsigned r = 0; r < n; ++r)
    for (unsigned c = 0; c < n; ++c) sub->inverse[r][c] = a[r][n + c];
  sub_ = std::move(sub);
}

}  // namespace lsnf
