#pragma once

// Dense univariate polynomials over a coefficient ring, lowest degree first.
// Functions accept untrimmed inputs; results that represent "a polynomial"
// (rather than a fixed-width ring element) are trimmed.

#include <algorithm>
#include <span>
#include <vector>

#include "lsnf/common.hpp"

namespace lsnf::poly {

template <class R>
using Poly = std::vector<typename R::Element>;

inline constexpr std::size_t kKaratsubaThreshold = 64;

template <class R>
void trim(const R& ring, Poly<R>& a) {
  while (!a.empty() && ring.is_zero(a.back())) a.pop_back();
}

/// Degree, with -1 for the zero polynomial.
template <class R>
long degree(const R& ring, std::span<const typename R::Element> a) {
  long d = static_cast<long>(a.size()) - 1;
  while (d >= 0 && ring.is_zero(a[d])) --d;
  return d;
}

template <class R>
Poly<R> add(const R& ring, std::span<const typename R::Element> a,
            std::span<const typename R::Element> b) {
  Poly<R> c(std::max(a.size(), b.size()), ring.zero());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = ring.add(c[i], b[i]);
  return c;
}

template <class R>
Poly<R> sub(const R& ring, std::span<const typename R::Element> a,
            std::span<const typename R::Element> b) {
  Poly<R> c(std::max(a.size(), b.size()), ring.zero());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = ring.sub(c[i], b[i]);
  return c;
}

namespace detail {

template <class R>
void schoolbook(const R& ring, std::span<const typename R::Element> a,
                std::span<const typename R::Element> b,
                std::span<typename R::Element> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ring.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = ring.add(out[i + j], ring.mul(a[i], b[j]));
    }
  }
}

// out += a*b, with |a| == |b| == n. out has room for 2n-1 terms.
template <class R>
void karatsuba(const R& ring, std::span<const typename R::Element> a,
               std::span<const typename R::Element> b,
               std::span<typename R::Element> out) {
  const std::size_t n = a.size();
  if (n < kKaratsubaThreshold) {
    schoolbook(ring, a, b, out);
    return;
  }
  const std::size_t h = n / 2;
  const std::size_t hi = n - h;
  auto a0 = a.first(h), a1 = a.subspan(h);
  auto b0 = b.first(h), b1 = b.subspan(h);

  Poly<R> low(2 * h - 1, ring.zero());
  Poly<R> high(2 * hi - 1, ring.zero());
  karatsuba(ring, a0, b0, std::span(low));
  karatsuba(ring, a1, b1, std::span(high));

  Poly<R> sa(hi, ring.zero()), sb(hi, ring.zero());
  for (std::size_t i = 0; i < hi; ++i) {
    sa[i] = i < h ? ring.add(a0[i], a1[i]) : a1[i];
    sb[i] = i < h ? ring.add(b0[i], b1[i]) : b1[i];
  }
  Poly<R> mid(2 * hi - 1, ring.zero());
  karatsuba(ring, std::span<const typename R::Element>(sa),
            std::span<const typename R::Element>(sb), std::span(mid));
  for (std::size_t i = 0; i < low.size(); ++i) mid[i] = ring.sub(mid[i], low[i]);
  for (std::size_t i = 0; i < high.size(); ++i) mid[i] = ring.sub(mid[i], high[i]);

  for (std::size_t i = 0; i < low.size(); ++i) out[i] = ring.add(out[i], low[i]);
  for (std::size_t i = 0; i < mid.size(); ++i) out[i + h] = ring.add(out[i + h], mid[i]);
  for (std::size_t i = 0; i < high.size(); ++i)
    out[i + 2 * h] = ring.add(out[i + 2 * h], high[i]);
}

}  // namespace detail

/// Full product, length |a|+|b|-1 (untrimmed). Schoolbook for short
/// operands, Karatsuba on equal-length blocks otherwise.
template <class R>
Poly<R> mul(const R& ring, std::span<const typename R::Element> a,
            std::span<const typename R::Element> b) {
  if (a.empty() || b.empty()) return {};
  Poly<R> out(a.size() + b.size() - 1, ring.zero());
  if (a.size() < b.size()) std::swap(a, b);
  if (b.size() < kKaratsubaThreshold) {
    detail::schoolbook(ring, a, b, std::span(out));
    return out;
  }
  // Split the longer operand into chunks of |b|.
  const std::size_t n = b.size();
  Poly<R> chunk(n, ring.zero());
  for (std::size_t off = 0; off < a.size(); off += n) {
    const std::size_t len = std::min(n, a.size() - off);
    std::fill(chunk.begin(), chunk.end(), ring.zero());
    std::copy_n(a.begin() + off, len, chunk.begin());
    Poly<R> part(2 * n - 1, ring.zero());
    detail::karatsuba(ring, std::span<const typename R::Element>(chunk), b,
                      std::span(part));
    for (std::size_t i = 0; i < part.size() && off + i < out.size(); ++i)
      out[off + i] = ring.add(out[off + i], part[i]);
  }
  return out;
}

/// Remainder of a modulo a monic polynomial m (deg m >= 1). Result has
/// exactly deg(m) coefficients.
template <class R>
Poly<R> rem_monic(const R& ring, Poly<R> a, std::span<const typename R::Element> m) {
  const long dm = static_cast<long>(m.size()) - 1;
  for (long i = static_cast<long>(a.size()) - 1; i >= dm; --i) {
    const auto c = a[i];
    if (ring.is_zero(c)) continue;
    for (long j = 0; j <= dm; ++j) {
      a[i - dm + j] = ring.sub(a[i - dm + j], ring.mul(c, m[j]));
    }
  }
  a.resize(dm, ring.zero());
  return a;
}

/// Quotient and remainder by a monic divisor. Exact over any commutative ring.
template <class R>
std::pair<Poly<R>, Poly<R>> divrem_monic(const R& ring, Poly<R> a,
                                         std::span<const typename R::Element> m) {
  const long dm = degree(ring, m);
  const long da = static_cast<long>(a.size()) - 1;
  Poly<R> q(da >= dm ? da - dm + 1 : 0, ring.zero());
  for (long i = da; i >= dm; --i) {
    const auto c = a[i];
    if (ring.is_zero(c)) continue;
    q[i - dm] = c;
    for (long j = 0; j <= dm; ++j) {
      a[i - dm + j] = ring.sub(a[i - dm + j], ring.mul(c, m[j]));
    }
  }
  a.resize(std::max<long>(dm, 0), ring.zero());
  trim(ring, q);
  trim(ring, a);
  return {q, a};
}

// ---- field-only operations -------------------------------------------------

template <class F>
Poly<F> make_monic(const F& field, Poly<F> a) {
  trim(field, a);
  if (a.empty()) return a;
  const auto inv = field.inv(a.back());
  for (auto& c : a) c = field.mul(c, inv);
  return a;
}

template <class F>
std::pair<Poly<F>, Poly<F>> divrem(const F& field, Poly<F> a, Poly<F> b) {
  trim(field, b);
  if (b.empty()) fail(ErrorCode::InvalidArgument, "polynomial division by zero");
  const auto lead_inv = field.inv(b.back());
  Poly<F> monic = b;
  for (auto& c : monic) c = field.mul(c, lead_inv);
  auto [q, r] = divrem_monic(field, std::move(a), std::span<const typename F::Element>(monic));
  for (auto& c : q) c = field.mul(c, lead_inv);
  return {q, r};
}

/// Monic gcd.
template <class F>
Poly<F> gcd(const F& field, Poly<F> a, Poly<F> b) {
  trim(field, a);
  trim(field, b);
  while (!b.empty()) {
    auto r = divrem(field, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(field, std::move(a));
}

/// Inverse of a modulo m (both over a field); throws NonUnit when
/// gcd(a, m) != 1.
template <class F>
Poly<F> inverse_mod(const F& field, Poly<F> a, const Poly<F>& m) {
  Poly<F> r0 = m, r1 = std::move(a);
  trim(field, r0);
  trim(field, r1);
  Poly<F> s0, s1{field.one()};
  while (!r1.empty()) {
    auto [q, r] = divrem(field, r0, r1);
    auto qs = mul(field, std::span<const typename F::Element>(q),
                  std::span<const typename F::Element>(s1));
    auto s2 = sub(field, std::span<const typename F::Element>(s0),
                  std::span<const typename F::Element>(qs));
    trim(field, s2);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.size() != 1) fail(ErrorCode::NonUnit, "element is not invertible");
  const auto c = field.inv(r0[0]);
  for (auto& x : s0) x = field.mul(x, c);
  auto out = divrem(field, s0, m).second;
  return out;
}

/// base^exp mod a monic m; exponent given as a word.
template <class R>
Poly<R> powmod(const R& ring, Poly<R> base, u64 exp, const Poly<R>& m) {
  const std::span<const typename R::Element> ms(m);
  Poly<R> result{ring.one()};
  base = rem_monic(ring, std::move(base), ms);
  while (exp) {
    if (exp & 1) result = rem_monic(ring, mul(ring, std::span<const typename R::Element>(result), std::span<const typename R::Element>(base)), ms);
    exp >>= 1;
    if (exp) base = rem_monic(ring, mul(ring, std::span<const typename R::Element>(base), std::span<const typename R::Element>(base)), ms);
  }
  return result;
}

/// Ben-Or irreducibility test for a monic g over a finite field F of size
/// p^k: g is irreducible iff gcd(x^{|F|^i} - x, g) = 1 for 1 <= i <= deg/2.
template <class F>
bool is_irreducible(const F& field, const Poly<F>& g_in) {
  Poly<F> g = g_in;
  trim(field, g);
  const long n = static_cast<long>(g.size()) - 1;
  if (n < 1) return false;
  if (n == 1) return true;
  g = make_monic(field, g);
  const u64 p = field.characteristic();
  const unsigned k = field.degree_over_prime();
  Poly<F> x{field.zero(), field.one()};
  Poly<F> h = x;
  for (long i = 1; i <= n / 2; ++i) {
    for (unsigned j = 0; j < k; ++j) h = powmod(field, h, p, g);
    auto diff = sub(field, std::span<const typename F::Element>(h),
                    std::span<const typename F::Element>(x));
    auto gg = gcd(field, diff, g);
    if (gg.size() != 1) return false;
  }
  return true;
}

}  // namespace lsnf::poly
