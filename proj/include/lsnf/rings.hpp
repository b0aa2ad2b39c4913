#pragma once

// Exact arithmetic for the base structures: Z_p, GF(p^m) (as towers over any
// finite field), Z_{p^e}, Galois rings GR(p^e, eta) and F[z]/(f^l).
//
// Every ring is an immutable descriptor with value-type elements kept in
// canonical (fully reduced, fixed width) form, so == on elements is ring
// equality.

#include <boost/container/small_vector.hpp>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lsnf/common.hpp"
#include "lsnf/poly.hpp"

namespace lsnf {

// ---------------------------------------------------------------------------
// Text helpers shared by the element parsers.

long long parse_signed(std::string_view token);
std::vector<long long> parse_signed_list(std::string_view token);

// ---------------------------------------------------------------------------

class PrimeField {
 public:
  using Element = u64;

  explicit PrimeField(u64 p) : p_(p) {
    if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "modulus " + std::to_string(p) + " is not prime");
  }

  u64 characteristic() const { return p_; }
  unsigned degree_over_prime() const { return 1; }
  long double size() const { return static_cast<long double>(p_); }

  Element zero() const { return 0; }
  Element one() const { return 1 % p_; }
  Element from_int(u64 x) const { return x % p_; }
  Element from_signed(long long x) const {
    long long r = x % static_cast<long long>(p_);
    return r < 0 ? static_cast<u64>(r + static_cast<long long>(p_)) : static_cast<u64>(r);
  }

  Element add(Element a, Element b) const { return addmod(a, b, p_); }
  Element sub(Element a, Element b) const { return submod(a, b, p_); }
  Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
  Element mul(Element a, Element b) const { return mulmod(a, b, p_); }
  Element inv(Element a) const {
    if (a == 0) fail(ErrorCode::NonUnit, "zero has no inverse in Z_" + std::to_string(p_));
    return powmod(a, p_ - 2, p_);
  }
  bool is_zero(Element a) const { return a == 0; }
  bool is_unit(Element a) const { return a != 0; }
  Element random(Rng& rng) const { return rng.below(p_); }

  std::string describe() const { return "Zp:" + std::to_string(p_); }
  Element parse_element(std::string_view s) const { return from_signed(parse_signed(s)); }
  std::string format_element(Element a) const { return std::to_string(a); }

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }

 private:
  u64 p_;
};

/// Sum of products a_i b_i; reduces once at the end for word moduli below
/// 2^32, where each product fits in 64 bits.
template <class R>
class MulAcc {
 public:
  explicit MulAcc(const R& ring) : ring_(ring), acc_(ring.zero()) {}
  void add(const typename R::Element& a, const typename R::Element& b) { acc_ = ring_.add(acc_, ring_.mul(a, b)); }
  typename R::Element value() const { return acc_; }

 private:
  const R& ring_;
  typename R::Element acc_;
};

namespace detail {
class WordMulAcc {
 public:
  explicit WordMulAcc(u64 m) : m_(m), small_(m <= 0xffffffffULL) {}
  void add(u64 a, u64 b) {
    if (small_) sum_ += a * b;
    else sum_ = (sum_ + static_cast<u128>(a) * b % m_) % m_;
  }
  u64 value() const { return static_cast<u64>(sum_ % m_); }

 private:
  u64 m_;
  bool small_;
  u128 sum_ = 0;
};
}  // namespace detail

template <>
class MulAcc<PrimeField> : public detail::WordMulAcc {
 public:
  explicit MulAcc(const PrimeField& f) : WordMulAcc(f.characteristic()) {}
};

// ---------------------------------------------------------------------------

/// Finite field extension F[y]/(g) of a finite field F.
template <class F>
class ExtField {
 public:
  using Base = F;
  using BaseElement = typename F::Element;
  using Element = boost::container::small_vector<BaseElement, 12>;

  ExtField(F base, poly::Poly<F> modulus, bool verify = true)
      : base_(std::move(base)), modulus_(poly::make_monic(base_, std::move(modulus))) {
    if (modulus_.size() < 2) fail(ErrorCode::InvalidArgument, "extension modulus must have degree >= 1");
    if (verify && !poly::is_irreducible(base_, modulus_))
      fail(ErrorCode::InvalidArgument, "extension modulus is reducible");
  }

  const F& base() const { return base_; }
  const poly::Poly<F>& modulus() const { return modulus_; }
  unsigned degree() const { return static_cast<unsigned>(modulus_.size() - 1); }
  u64 characteristic() const { return base_.characteristic(); }
  unsigned degree_over_prime() const { return degree() * base_.degree_over_prime(); }
  long double size() const { return std::pow(base_.size(), static_cast<long double>(degree())); }

  Element zero() const { return Element(degree(), base_.zero()); }
  Element one() const { return embed(base_.one()); }
  Element from_int(u64 x) const { return embed(base_.from_int(x)); }
  Element embed(const BaseElement& c) const {
    Element e(degree(), base_.zero());
    e[0] = c;
    return e;
  }

  Element add(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = base_.add(c[i], b[i]);
    return c;
  }
  Element sub(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = base_.sub(c[i], b[i]);
    return c;
  }
  Element neg(const Element& a) const {
    Element c(a);
    for (auto& x : c) x = base_.neg(x);
    return c;
  }
  Element mul(const Element& a, const Element& b) const {
    if (is_constant(a)) return scale(b, a[0]);
    if (is_constant(b)) return scale(a, b[0]);
    const std::size_t m = degree();
    boost::container::small_vector<BaseElement, 24> prod(2 * m - 1, base_.zero());
    if constexpr (std::is_same_v<F, PrimeField>) {
      const u64 p = base_.characteristic();
      if (p < (u64{1} << 32)) {
        // Products fit in 64 bits; sum them in 128 bits and reduce once.
        boost::container::small_vector<u128, 24> acc(2 * m - 1, 0);
        for (std::size_t i = 0; i < m; ++i) {
          if (a[i] == 0) continue;
          for (std::size_t j = 0; j < m; ++j) acc[i + j] += a[i] * b[j];
        }
        for (std::size_t i = 0; i < acc.size(); ++i) prod[i] = static_cast<u64>(acc[i] % p);
        for (std::size_t i = prod.size(); i-- > m;) {
          const u64 c = prod[i];
          if (c == 0) continue;
          const u64 negc = p - c;
          for (std::size_t j = 0; j < m; ++j) prod[i - m + j] = (prod[i - m + j] + negc * modulus_[j]) % p;
        }
        return Element(prod.begin(), prod.begin() + m);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (base_.is_zero(a[i])) continue;
      for (std::size_t j = 0; j < m; ++j)
        prod[i + j] = base_.add(prod[i + j], base_.mul(a[i], b[j]));
    }
    for (std::size_t i = prod.size(); i-- > m;) {
      const auto c = prod[i];
      if (base_.is_zero(c)) continue;
      for (std::size_t j = 0; j < m; ++j)
        prod[i - m + j] = base_.sub(prod[i - m + j], base_.mul(c, modulus_[j]));
    }
    return Element(prod.begin(), prod.begin() + m);
  }
  Element scale(const Element& a, const BaseElement& c) const {
    Element r(a);
    for (auto& x : r) x = base_.mul(x, c);
    return r;
  }
  Element inv(const Element& a) const {
    if (is_zero(a)) fail(ErrorCode::NonUnit, "zero has no inverse in extension field");
    if (is_constant(a)) return embed(base_.inv(a[0]));
    auto r = poly::inverse_mod(base_, poly::Poly<F>(a.begin(), a.end()), modulus_);
    Element e(degree(), base_.zero());
    for (std::size_t i = 0; i < r.size(); ++i) e[i] = r[i];
    return e;
  }
  bool is_zero(const Element& a) const {
    for (const auto& x : a)
      if (!base_.is_zero(x)) return false;
    return true;
  }
  bool is_constant(const Element& a) const {
    for (std::size_t i = 1; i < a.size(); ++i)
      if (!base_.is_zero(a[i])) return false;
    return true;
  }
  bool is_unit(const Element& a) const { return !is_zero(a); }
  Element random(Rng& rng) const {
    Element e(degree(), base_.zero());
    for (auto& x : e) x = base_.random(rng);
    return e;
  }

  std::string describe() const {
    std::string s = "GF(" + base_.describe() + ")[";
    for (std::size_t i = 0; i < modulus_.size(); ++i) {
      if (i) s += ",";
      s += base_.format_element(modulus_[i]);
    }
    return s + "]";
  }

  bool operator==(const ExtField& o) const {
    return base_ == o.base_ && modulus_ == o.modulus_;
  }

 private:
  F base_;
  poly::Poly<F> modulus_;
};

using GFq = ExtField<PrimeField>;

/// Unreduced coefficient sums of a_i b_i over GF(p^m); one reduction at the end.
template <>
class MulAcc<GFq> {
 public:
  explicit MulAcc(const GFq& f)
      : field_(f), p_(f.characteristic()), m_(f.degree()), acc_(2 * f.degree() - 1, 0) {
    lazy_ = p_ < (u64{1} << 28) && m_ < 256;
    const u64 bound = (p_ - 1) * (p_ - 1) * m_;
    budget_ = lazy_ ? (~u64{0} - bound) / std::max<u64>(bound, 1) : 0;
    if (!lazy_) fallback_ = f.zero();
  }
  void add(const GFq::Element& a, const GFq::Element& b) {
    if (!lazy_) {
      fallback_ = field_.add(fallback_, field_.mul(a, b));
      return;
    }
    if (used_ == budget_) {
      for (auto& x : acc_) x %= p_;
      used_ = 0;
    }
    ++used_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m_; ++j) acc_[i + j] += a[i] * b[j];
    }
  }
  GFq::Element value() const {
    if (!lazy_) return fallback_;
    boost::container::small_vector<u64, 24> prod(acc_.begin(), acc_.end());
    for (auto& x : prod) x %= p_;
    const auto& g = field_.modulus();
    for (std::size_t i = prod.size(); i-- > m_;) {
      const u64 c = prod[i];
      if (c == 0) continue;
      for (std::size_t j = 0; j < m_; ++j) prod[i - m_ + j] = (prod[i - m_ + j] + (p_ - c) * g[j]) % p_;
    }
    return GFq::Element(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(m_));
  }

 private:
  const GFq& field_;
  u64 p_;
  std::size_t m_;
  boost::container::small_vector<u64, 24> acc_;
  bool lazy_ = false;
  u64 budget_ = 0, used_ = 0;
  GFq::Element fallback_;
};

/// Integer encoding of a GF(p^m) element: sum of c_i p^i.
u64 encode_gf(const GFq& field, const GFq::Element& a);
GFq::Element decode_gf(const GFq& field, u64 code);

template <class F>
struct ext_depth : std::integral_constant<int, 0> {};
template <class F>
struct ext_depth<ExtField<F>> : std::integral_constant<int, 1 + ext_depth<F>::value> {};

// ---------------------------------------------------------------------------

/// Tables for GF(p^m) in Zech logarithm form: exp[i] is the base-p code of
/// x^i for a primitive modulus, log inverts it, zech[d] = log(1 + x^d).
struct ZechTables {
  u64 p = 0;
  unsigned m = 0;
  std::uint32_t order = 0;  // q - 1
  poly::Poly<PrimeField> modulus;
  std::vector<std::uint32_t> exp, log, zech;
  // exp[i] with digit j at bit width*j, for lazy dot products.
  std::vector<u64> packed;
  unsigned width = 0;
  unsigned budget = 0;  // packed additions before a digit can overflow
};

inline constexpr u64 kZechMaxSize = u64{1} << 22;

/// Shared, cached tables (built once per (p, m)).
std::shared_ptr<const ZechTables> zech_tables(u64 p, unsigned m);

/// First monic polynomial of degree m (base-p counter order) that is
/// irreducible and has x as a primitive element.
poly::Poly<PrimeField> first_primitive(const PrimeField& field, unsigned m);

/// GF(p^m) for p^m <= 2^22 with elements stored as discrete logarithms.
/// Optionally carries an embedding of a subfield GF(p^eta) given in its own
/// polynomial basis, with coordinates over it in the basis 1, x, x^2, ...
class ZechField {
 public:
  using Element = std::uint32_t;
  static constexpr Element kZero = 0xffffffffu;

  struct Subfield {
    GFq field;
    std::vector<Element> beta_pows;          // images of y^0 .. y^(eta-1)
    std::vector<std::vector<u64>> inverse;   // digits -> (i + eta j) coefficients
  };

  ZechField(u64 p, unsigned m) : t_(zech_tables(p, m)) {}
  /// GF(q^m) containing `base` = GF(q) through a root of its modulus.
  ZechField(const GFq& base, unsigned m);

  const Subfield* subfield() const { return sub_.get(); }
  Element embed_sub(const GFq::Element& a) const {
    Element r = kZero;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0) r = add(r, mul(from_int(a[i]), sub_->beta_pows[i]));
    return r;
  }
  /// Coordinates of z over the subfield (m of them).
  std::vector<GFq::Element> sub_coordinates(Element z) const {
    const unsigned eta = sub_->field.degree(), m = t_->m / eta;
    const u64 p = t_->p;
    std::vector<u64> digits(t_->m);
    u64 c = code(z);
    for (auto& d : digits) d = c % p, c /= p;
    std::vector<GFq::Element> out(m, sub_->field.zero());
    for (std::size_t r = 0; r < t_->m; ++r) {
      u64 acc = 0;
      for (std::size_t s = 0; s < t_->m; ++s) acc = (acc + sub_->inverse[r][s] * digits[s]) % p;
      out[r / eta][r % eta] = acc;
    }
    return out;
  }

  u64 characteristic() const { return t_->p; }
  unsigned degree() const { return t_->m; }
  unsigned degree_over_prime() const { return t_->m; }
  long double size() const { return static_cast<long double>(t_->order) + 1.0L; }
  const poly::Poly<PrimeField>& modulus() const { return t_->modulus; }

  Element zero() const { return kZero; }
  Element one() const { return 0; }
  Element from_int(u64 x) const { return from_code(x % t_->p); }
  Element from_code(u64 code) const { return t_->log.at(code); }
  u64 code(Element a) const { return a == kZero ? 0 : t_->exp[a]; }

  Element add(Element a, Element b) const {
    if (a == kZero) return b;
    if (b == kZero) return a;
    std::uint32_t d = b >= a ? b - a : b + t_->order - a;
    const Element z = t_->zech[d];
    if (z == kZero) return kZero;
    return wrap(static_cast<u64>(a) + z);
  }
  Element neg(Element a) const {
    if (a == kZero || t_->p == 2) return a;
    return wrap(static_cast<u64>(a) + t_->order / 2);
  }
  Element sub(Element a, Element b) const { return add(a, neg(b)); }
  Element mul(Element a, Element b) const {
    if (a == kZero || b == kZero) return kZero;
    return wrap(static_cast<u64>(a) + b);
  }
  Element inv(Element a) const {
    if (a == kZero) fail(ErrorCode::NonUnit, "zero has no inverse in GF(q)");
    return a == 0 ? 0 : t_->order - a;
  }
  bool is_zero(Element a) const { return a == kZero; }
  bool is_unit(Element a) const { return a != kZero; }
  Element random(Rng& rng) const {
    const u64 r = rng.below(static_cast<u64>(t_->order) + 1);
    return r == t_->order ? kZero : static_cast<Element>(r);
  }

  std::string describe() const { return "GF(" + std::to_string(t_->p) + "^" + std::to_string(t_->m) + ")"; }
  std::string format_element(Element a) const { return std::to_string(code(a)); }

  bool operator==(const ZechField& o) const { return t_->p == o.t_->p && t_->m == o.t_->m; }
  const ZechTables& tables() const { return *t_; }

 private:
  Element wrap(u64 s) const { return static_cast<Element>(s >= t_->order ? s - t_->order : s); }
  std::shared_ptr<const ZechTables> t_;
  std::shared_ptr<const Subfield> sub_;
};

template <>
struct ext_depth<ZechField> : std::integral_constant<int, 1> {};

template <>
class MulAcc<ZechField> {
 public:
  explicit MulAcc(const ZechField& k) : t_(k.tables()) {}
  void add(ZechField::Element a, ZechField::Element b) {
    if (a == ZechField::kZero || b == ZechField::kZero) return;
    u64 l = static_cast<u64>(a) + b;
    if (l >= t_.order) l -= t_.order;
    sum_ += t_.packed[l];
    if (++n_ == t_.budget) fold();
  }
  ZechField::Element value() const {
    u64 code = 0;
    const u64 mask = t_.width >= 64 ? ~u64{0} : (u64{1} << t_.width) - 1;
    for (unsigned j = t_.m; j-- > 0;) code = code * t_.p + ((sum_ >> (t_.width * j)) & mask) % t_.p;
    return t_.log[code];
  }

 private:
  void fold() {
    const u64 mask = t_.width >= 64 ? ~u64{0} : (u64{1} << t_.width) - 1;
    u64 r = 0;
    for (unsigned j = 0; j < t_.m; ++j) r |= (((sum_ >> (t_.width * j)) & mask) % t_.p) << (t_.width * j);
    sum_ = r;
    n_ = 1;
  }
  const ZechTables& t_;
  u64 sum_ = 0;
  unsigned n_ = 1;
};

// ---------------------------------------------------------------------------

/// Z / p^e Z with p^e < 2^64.
class LocalIntRing {
 public:
  using Element = u64;
  using ResidueField = PrimeField;

  LocalIntRing(u64 p, unsigned e) : p_(p), e_(e), q_(checked_pow(p, e)), residue_(p) {
    if (e < 1) fail(ErrorCode::InvalidArgument, "exponent must be >= 1");
    if (q_ == 0) fail(ErrorCode::Unsupported, "p^e must fit in 64 bits");
  }

  u64 prime() const { return p_; }
  unsigned exponent() const { return e_; }
  u64 modulus() const { return q_; }
  const PrimeField& residue_field() const { return residue_; }

  Element zero() const { return 0; }
  Element one() const { return 1 % q_; }
  Element from_int(u64 x) const { return x % q_; }
  Element from_signed(long long x) const {
    if (x >= 0) return static_cast<u64>(x) % q_;
    u64 m = static_cast<u64>(-(x + 1)) % q_;  // avoid overflow at LLONG_MIN
    return q_ - 1 - m;
  }

  Element add(Element a, Element b) const { return addmod(a, b, q_); }
  Element sub(Element a, Element b) const { return submod(a, b, q_); }
  Element neg(Element a) const { return a == 0 ? 0 : q_ - a; }
  Element mul(Element a, Element b) const { return mulmod(a, b, q_); }
  /// Hensel lifting of the inverse mod p.
  Element inv(Element a) const {
    if (a % p_ == 0) fail(ErrorCode::NonUnit, std::to_string(a) + " is not a unit mod " + std::to_string(q_));
    u64 x = powmod(a % p_, p_ - 2, p_);
    for (unsigned prec = 1; prec < e_; prec *= 2) {
      x = mul(x, sub(from_int(2), mul(a, x)));
    }
    return x;
  }
  bool is_zero(Element a) const { return a == 0; }
  bool is_unit(Element a) const { return a % p_ != 0; }
  Element random(Rng& rng) const { return rng.below(q_); }

  /// Largest i with p^i | a; e for zero.
  unsigned valuation(Element a) const { return a == 0 ? e_ : word_valuation(a, p_); }
  Element uniformizer_pow(unsigned v) const { return v >= e_ ? 0 : checked_pow(p_, v); }
  /// Some y with y * p^v = a (requires valuation(a) >= v).
  Element div_uniformizer_pow(Element a, unsigned v) const { return a / checked_pow(p_, v); }

  PrimeField::Element residue(Element a) const { return a % p_; }
  Element lift_residue(PrimeField::Element b) const { return b; }

  std::string describe() const { return "Zpe:" + std::to_string(p_) + "^" + std::to_string(e_); }
  Element parse_element(std::string_view s) const { return from_signed(parse_signed(s)); }
  std::string format_element(Element a) const { return std::to_string(a); }

  bool operator==(const LocalIntRing& o) const { return p_ == o.p_ && e_ == o.e_; }

 private:
  u64 p_;
  unsigned e_;
  u64 q_;
  PrimeField residue_;
};

template <>
class MulAcc<LocalIntRing> : public detail::WordMulAcc {
 public:
  explicit MulAcc(const LocalIntRing& r) : WordMulAcc(r.modulus()) {}
};

// ---------------------------------------------------------------------------

/// Monic irreducible polynomial of degree m over a field, by sample-and-test.
template <class F>
poly::Poly<F> random_irreducible(const F& field, unsigned m, Rng& rng) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "degree must be >= 1");
  for (;;) {
    poly::Poly<F> g(m + 1, field.zero());
    for (unsigned i = 0; i < m; ++i) g[i] = field.random(rng);
    g[m] = field.one();
    if (poly::is_irreducible(field, g)) return g;
  }
}

/// First monic irreducible of degree m over Z_p in lexicographic order of
/// (c_{m-1}, ..., c_0) read as a base-p counter. Deterministic.
poly::Poly<PrimeField> first_irreducible(const PrimeField& field, unsigned m);

// ---------------------------------------------------------------------------

/// GR(p^e, eta) = Z_{p^e}[y] / (Gamma), Gamma monic of degree eta and
/// irreducible mod p.
class GaloisRing {
 public:
  using Element = boost::container::small_vector<u64, 12>;
  using ResidueField = GFq;

  GaloisRing(u64 p, unsigned e, std::vector<u64> gamma);

  u64 prime() const { return coeff_.prime(); }
  unsigned exponent() const { return coeff_.exponent(); }
  unsigned degree() const { return static_cast<unsigned>(gamma_.size() - 1); }
  const LocalIntRing& coefficient_ring() const { return coeff_; }
  const std::vector<u64>& gamma() const { return gamma_; }
  const GFq& residue_field() const { return residue_; }

  Element zero() const { return Element(degree(), 0); }
  Element one() const { return from_int(1); }
  Element from_int(u64 x) const {
    Element a(degree(), 0);
    a[0] = coeff_.from_int(x);
    return a;
  }
  Element embed(u64 z) const { return from_int(z); }

  Element add(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeff_.add(c[i], b[i]);
    return c;
  }
  Element sub(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeff_.sub(c[i], b[i]);
    return c;
  }
  Element neg(const Element& a) const {
    Element c(a);
    for (auto& x : c) x = coeff_.neg(x);
    return c;
  }
  Element mul(const Element& a, const Element& b) const;
  Element inv(const Element& a) const;
  bool is_zero(const Element& a) const {
    for (u64 x : a)
      if (x) return false;
    return true;
  }
  bool is_unit(const Element& a) const { return !residue_.is_zero(residue(a)); }
  Element random(Rng& rng) const {
    Element a(degree());
    for (auto& x : a) x = coeff_.random(rng);
    return a;
  }

  unsigned valuation(const Element& a) const;
  Element uniformizer_pow(unsigned v) const { return from_int(coeff_.uniformizer_pow(v)); }
  Element div_uniformizer_pow(const Element& a, unsigned v) const {
    Element r(a);
    for (auto& x : r) x = coeff_.div_uniformizer_pow(x, v);
    return r;
  }

  GFq::Element residue(const Element& a) const {
    GFq::Element r(degree(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] % prime();
    return r;
  }
  Element lift_residue(const GFq::Element& b) const { return Element(b.begin(), b.end()); }

  std::string describe() const {
    return "GR:" + std::to_string(prime()) + "^" + std::to_string(exponent()) + ":" + std::to_string(degree());
  }
  Element parse_element(std::string_view s) const;
  std::string format_element(const Element& a) const;

  bool operator==(const GaloisRing& o) const { return coeff_ == o.coeff_ && gamma_ == o.gamma_; }

 private:
  LocalIntRing coeff_;
  std::vector<u64> gamma_;
  GFq residue_;
};

/// Unreduced product sums in Z[y]; reduced mod (p^e, gamma) once at the end.
template <>
class MulAcc<GaloisRing> {
 public:
  explicit MulAcc(const GaloisRing& r)
      : ring_(r), q_(r.coefficient_ring().modulus()), m_(r.degree()), acc_(2 * r.degree() - 1, 0) {
    const u64 bound = (q_ - 1) * (q_ - 1) * m_;
    lazy_ = q_ < (u64{1} << 28) && m_ < 256;
    budget_ = lazy_ ? (~u64{0} - bound) / std::max<u64>(bound, 1) : 0;
  }
  void add(const GaloisRing::Element& a, const GaloisRing::Element& b) {
    if (!lazy_) {
      fallback_ = ring_.add(fallback_.empty() ? ring_.zero() : fallback_, ring_.mul(a, b));
      return;
    }
    if (used_ == budget_) fold();
    ++used_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < m_; ++j) acc_[i + j] += a[i] * b[j];
    }
  }
  GaloisRing::Element value() const {
    if (!lazy_) return fallback_.empty() ? ring_.zero() : fallback_;
    boost::container::small_vector<u64, 24> prod(acc_.begin(), acc_.end());
    for (auto& x : prod) x %= q_;
    const auto& gamma = ring_.gamma();
    for (std::size_t i = prod.size(); i-- > m_;) {
      const u64 c = prod[i];
      if (c == 0) continue;
      for (std::size_t j = 0; j < m_; ++j) prod[i - m_ + j] = (prod[i - m_ + j] + (q_ - c) * gamma[j]) % q_;
    }
    return GaloisRing::Element(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(m_));
  }

 private:
  void fold() {
    for (auto& x : acc_) x %= q_;
    used_ = 0;
  }
  const GaloisRing& ring_;
  u64 q_;
  std::size_t m_;
  boost::container::small_vector<u64, 24> acc_;
  bool lazy_ = false;
  u64 budget_ = 0, used_ = 0;
  GaloisRing::Element fallback_;
};

// ---------------------------------------------------------------------------

/// F[z] / (f^l) for f monic irreducible of degree d over the field F.
template <class F>
class PolyQuotRing {
 public:
  using Field = F;
  using FieldElement = typename F::Element;
  using Element = std::vector<FieldElement>;

  /// verify=false skips the irreducibility check; used when f is carried
  /// over to a scalar extension of F, where it may split.
  PolyQuotRing(F field, poly::Poly<F> f, unsigned ell, bool verify = true)
      : field_(std::move(field)), f_(std::move(f)), ell_(ell) {
    poly::trim(field_, f_);
    if (f_.size() < 2) fail(ErrorCode::InvalidArgument, "f must have degree >= 1");
    if (f_.back() != field_.one()) fail(ErrorCode::InvalidArgument, "f must be monic");
    if (ell_ < 1) fail(ErrorCode::InvalidArgument, "exponent must be >= 1");
    if (verify && !poly::is_irreducible(field_, f_))
      fail(ErrorCode::InvalidArgument, "f is reducible over the base field");
    fpow_.push_back(poly::Poly<F>{field_.one()});
    for (unsigned i = 1; i <= ell_; ++i) {
      fpow_.push_back(poly::mul(field_, std::span<const FieldElement>(fpow_.back()),
                                std::span<const FieldElement>(f_)));
    }
  }

  const F& field() const { return field_; }
  const poly::Poly<F>& f() const { return f_; }
  unsigned d() const { return static_cast<unsigned>(f_.size() - 1); }
  unsigned exponent() const { return ell_; }
  std::size_t width() const { return static_cast<std::size_t>(d()) * ell_; }
  /// f^l, monic of degree d*l.
  const poly::Poly<F>& modulus() const { return fpow_[ell_]; }
  const poly::Poly<F>& f_power(unsigned i) const { return fpow_.at(i); }

  PolyQuotRing with_exponent(unsigned ell) const { return PolyQuotRing(field_, f_, ell, false); }

  /// The same f over a scalar extension K of F.
  template <class K, class Hom>
  PolyQuotRing<K> over(const K& k, const Hom& hom) const {
    poly::Poly<K> g;
    for (const auto& c : f_) g.push_back(hom(c));
    return PolyQuotRing<K>(k, std::move(g), ell_, false);
  }

  Element zero() const { return Element(width(), field_.zero()); }
  Element one() const { return from_int(1); }
  Element from_int(u64 x) const {
    Element a = zero();
    a[0] = field_.from_int(x);
    return a;
  }
  Element from_poly(poly::Poly<F> a) const {
    if (a.size() > width()) a = poly::rem_monic(field_, std::move(a), std::span<const FieldElement>(modulus()));
    a.resize(width(), field_.zero());
    return a;
  }

  Element add(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = field_.add(c[i], b[i]);
    return c;
  }
  Element sub(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = field_.sub(c[i], b[i]);
    return c;
  }
  Element neg(const Element& a) const {
    Element c(a);
    for (auto& x : c) x = field_.neg(x);
    return c;
  }
  Element mul(const Element& a, const Element& b) const {
    auto prod = poly::mul(field_, std::span<const FieldElement>(a), std::span<const FieldElement>(b));
    return from_poly(std::move(prod));
  }
  bool is_zero(const Element& a) const {
    for (const auto& x : a)
      if (!field_.is_zero(x)) return false;
    return true;
  }
  bool is_unit(const Element& a) const {
    auto r = poly::rem_monic(field_, poly::Poly<F>(a.begin(), a.end()), std::span<const FieldElement>(f_));
    for (const auto& x : r)
      if (!field_.is_zero(x)) return true;
    return false;
  }
  /// Inverse mod f by extended Euclid, then Newton iteration x <- x(2 - a x)
  /// doubling the f-adic precision up to l.
  Element inv(const Element& a) const {
    if (!is_unit(a)) fail(ErrorCode::NonUnit, "element is divisible by f");
    auto r = poly::inverse_mod(field_, poly::Poly<F>(a.begin(), a.end()), f_);
    Element x = from_poly(std::move(r));
    const Element two = from_int(2);
    for (unsigned prec = 1; prec < ell_; prec *= 2) x = mul(x, sub(two, mul(a, x)));
    return x;
  }
  Element random(Rng& rng) const {
    Element a(width());
    for (auto& x : a) x = field_.random(rng);
    return a;
  }

  /// Largest i <= l with f^i | a.
  unsigned valuation(const Element& a) const {
    if (is_zero(a)) return ell_;
    poly::Poly<F> cur(a.begin(), a.end());
    poly::trim(field_, cur);
    unsigned v = 0;
    while (v < ell_) {
      auto [q, r] = poly::divrem_monic(field_, cur, std::span<const FieldElement>(f_));
      if (!r.empty()) break;
      cur = std::move(q);
      ++v;
    }
    return v;
  }
  Element uniformizer_pow(unsigned v) const {
    if (v >= ell_) return zero();
    return from_poly(fpow_[v]);
  }
  Element div_uniformizer_pow(const Element& a, unsigned v) const {
    auto q = poly::divrem_monic(field_, poly::Poly<F>(a.begin(), a.end()),
                                std::span<const FieldElement>(fpow_.at(v))).first;
    return from_poly(std::move(q));
  }

  std::string describe() const;
  Element parse_element(std::string_view s) const;
  std::string format_element(const Element& a) const;

  bool operator==(const PolyQuotRing& o) const {
    return field_ == o.field_ && f_ == o.f_ && ell_ == o.ell_;
  }

 private:
  F field_;
  poly::Poly<F> f_;
  unsigned ell_;
  std::vector<poly::Poly<F>> fpow_;
};

namespace detail {
inline std::string format_field_coeff(const PrimeField& F, u64 c) { return F.format_element(c); }
inline std::string format_field_coeff(const GFq& F, const GFq::Element& c) {
  return std::to_string(encode_gf(F, c));
}
inline u64 parse_field_coeff(const PrimeField& F, long long v) { return F.from_signed(v); }
inline GFq::Element parse_field_coeff(const GFq& F, long long v) {
  if (v < 0) fail(ErrorCode::Parse, "GF(p^m) coefficient codes must be nonnegative");
  return decode_gf(F, static_cast<u64>(v));
}
template <class F>
std::string field_prefix(const F& F_) {
  if constexpr (std::is_same_v<F, PrimeField>) {
    return std::to_string(F_.characteristic());
  } else {
    return std::to_string(F_.characteristic()) + ":" + std::to_string(F_.degree());
  }
}
}  // namespace detail

template <class F>
std::string PolyQuotRing<F>::describe() const {
  std::string s = "PQ:" + detail::field_prefix(field_) + ":";
  for (std::size_t i = 0; i < f_.size(); ++i) {
    if (i) s += ",";
    s += detail::format_field_coeff(field_, f_[i]);
  }
  return s + "^" + std::to_string(ell_);
}

template <class F>
typename PolyQuotRing<F>::Element PolyQuotRing<F>::parse_element(std::string_view s) const {
  poly::Poly<F> a;
  for (long long v : parse_signed_list(s)) a.push_back(detail::parse_field_coeff(field_, v));
  return from_poly(std::move(a));
}

template <class F>
std::string PolyQuotRing<F>::format_element(const Element& a) const {
  long d = poly::degree(field_, std::span<const FieldElement>(a));
  if (d < 0) return "0";
  std::string s;
  for (long i = 0; i <= d; ++i) {
    if (i) s += ",";
    s += detail::format_field_coeff(field_, a[i]);
  }
  return s;
}

}  // namespace lsnf
