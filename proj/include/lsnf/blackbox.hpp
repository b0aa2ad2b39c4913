#pragma once

// Wiedemann-style linear algebra over fields: Berlekamp-Massey, minimal
// polynomials of black boxes, probabilistic rank and nullspace sampling.
//
// Routines that need a large field take a builder, a callable
// (const K& k, const Hom& hom) -> Operator<K>, that re-creates the operator
// over a scalar extension K of the base field; hom embeds base scalars.

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "lsnf/dense.hpp"
#include "lsnf/operators.hpp"

namespace lsnf {

/// Incremental Berlekamp-Massey. After pushing s_0..s_{N-1}, minpoly()
/// is the monic generator x^L C(1/x) of the shortest recurrence.
template <class F>
class BerlekampMassey {
 public:
  using Element = typename F::Element;

  explicit BerlekampMassey(F field)
      : field_(std::move(field)), c_{field_.one()}, b_{field_.one()}, last_disc_(field_.one()) {}

  void push(const Element& s) {
    seq_.push_back(s);
    const std::size_t n = seq_.size() - 1;
    Element d = s;
    for (std::size_t i = 1; i <= len_ && i < c_.size(); ++i) d = field_.add(d, field_.mul(c_[i], seq_[n - i]));
    if (field_.is_zero(d)) {
      ++shift_;
      return;
    }
    const Element coef = field_.mul(d, field_.inv(last_disc_));
    auto t = c_;
    if (c_.size() < b_.size() + shift_) c_.resize(b_.size() + shift_, field_.zero());
    for (std::size_t i = 0; i < b_.size(); ++i) c_[i + shift_] = field_.sub(c_[i + shift_], field_.mul(coef, b_[i]));
    if (2 * len_ <= n) {
      len_ = n + 1 - len_;
      b_ = std::move(t);
      last_disc_ = d;
      shift_ = 1;
      last_change_ = n;
    } else {
      ++shift_;
    }
  }

  std::size_t length() const { return len_; }
  std::size_t size() const { return seq_.size(); }
  /// Index of the last step that changed the recurrence length.
  std::size_t last_change() const { return last_change_; }

  poly::Poly<F> minpoly() const {
    poly::Poly<F> r(len_ + 1, field_.zero());
    for (std::size_t j = 0; j <= len_; ++j) r[j] = (len_ - j < c_.size()) ? c_[len_ - j] : field_.zero();
    return r;
  }

 private:
  F field_;
  std::vector<Element> seq_;
  poly::Poly<F> c_, b_;
  Element last_disc_;
  std::size_t len_ = 0, shift_ = 1, last_change_ = 0;
};

template <class F>
poly::Poly<F> berlekamp_massey(const F& field, std::span<const typename F::Element> seq) {
  BerlekampMassey<F> bm(field);
  for (const auto& s : seq) bm.push(s);
  return bm.minpoly();
}

template <class F>
poly::Poly<F> poly_lcm(const F& field, const poly::Poly<F>& a, const poly::Poly<F>& b) {
  auto g = poly::gcd(field, a, b);
  auto q = poly::divrem(field, a, g).first;
  auto r = poly::mul(field, std::span<const typename F::Element>(q), std::span<const typename F::Element>(b));
  poly::trim(field, r);
  return poly::make_monic(field, std::move(r));
}

namespace detail {

template <class F>
std::vector<typename F::Element> random_vector(const F& field, std::size_t n, Rng& rng) {
  std::vector<typename F::Element> v(n);
  for (auto& x : v) x = field.random(rng);
  return v;
}

template <class F>
std::vector<typename F::Element> random_units(const F& field, std::size_t n, Rng& rng) {
  std::vector<typename F::Element> v(n);
  for (auto& x : v) {
    do x = field.random(rng);
    while (!field.is_unit(x));
  }
  return v;
}

template <class F>
typename F::Element dot(const F& field, std::span<const typename F::Element> a,
                        std::span<const typename F::Element> b) {
  MulAcc<F> acc(field);
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i], b[i]);
  return acc.value();
}

template <class F>
bool is_zero_vector(const F& field, std::span<const typename F::Element> v) {
  return std::all_of(v.begin(), v.end(), [&](const auto& x) { return field.is_zero(x); });
}

/// lcm of the generators of u1^T B^i v and u2^T B^i v. Stops once both
/// recurrences have been stable for `early` consecutive terms (0: never).
template <class F, class Apply>
poly::Poly<F> projected_minpoly(const F& field, std::size_t n, const Apply& apply, Rng& rng, std::size_t early) {
  auto u1 = random_vector(field, n, rng);
  auto u2 = random_vector(field, n, rng);
  auto w = random_vector(field, n, rng);
  BerlekampMassey<F> bm1(field), bm2(field);
  const std::size_t len = 2 * n;
  for (std::size_t i = 0; i < len; ++i) {
    bm1.push(dot(field, std::span<const typename F::Element>(u1), std::span<const typename F::Element>(w)));
    bm2.push(dot(field, std::span<const typename F::Element>(u2), std::span<const typename F::Element>(w)));
    const std::size_t l = std::max(bm1.length(), bm2.length());
    if (i + 1 == len) break;
    if (early && i + 1 >= 2 * l + early && i + 1 - std::max(bm1.last_change(), bm2.last_change()) > early) break;
    w = apply(w);
  }
  return poly_lcm(field, bm1.minpoly(), bm2.minpoly());
}

}  // namespace detail

/// Minimal polynomial of a square black box (probabilistic undershoot).
template <class F>
poly::Poly<F> minpoly_blackbox(const Operator<F>& a, Rng& rng) {
  if (a.rows() != a.cols()) fail(ErrorCode::DimensionMismatch, "minpoly needs a square operator");
  const F& field = a.ring();
  auto apply = [&](const std::vector<typename F::Element>& x) { return a.apply(x); };
  auto m1 = detail::projected_minpoly(field, a.rows(), apply, rng, 0);
  auto m2 = detail::projected_minpoly(field, a.rows(), apply, rng, 0);
  return poly_lcm(field, m1, m2);
}

// ---------------------------------------------------------------------------

struct RankOptions {
  double xi = 100.0;
  unsigned trials = 3;
  /// Krylov early termination after this many stable terms; 0 disables.
  std::size_t early_termination = 16;
};

struct RankResult {
  std::size_t rank = 0;
  double failure_bound = 0.0;  // 1/xi
  unsigned trials = 0;
  unsigned extension_degree = 1;
  long double field_size = 0;
  long double threshold = 0;  // 8 * max(rows, cols) * xi
};

/// Smallest field size the randomised routines accept without lifting.
inline long double field_threshold(std::size_t rows, std::size_t cols, double xi) {
  return 8.0L * static_cast<long double>(std::max<std::size_t>({rows, cols, 1})) * static_cast<long double>(xi);
}

/// Smallest m with |F|^m >= threshold.
inline unsigned extension_degree_for(long double field_size, long double threshold) {
  unsigned m = 1;
  long double s = field_size;
  while (s < threshold) {
    s *= field_size;
    ++m;
  }
  return m;
}

/// Calls fn(k, hom) with k = F itself when F is large enough, otherwise with
/// an extension of the minimal sufficient degree (log tables for small
/// extensions of Z_p, a random irreducible modulus otherwise). Returns the
/// degree.
template <class F, class Fn>
unsigned with_large_field(const F& field, long double threshold, Rng& rng, Fn&& fn) {
  if constexpr (std::is_same_v<F, PrimeField>) {
    if (field.size() < threshold) {
      const unsigned m = extension_degree_for(field.size(), threshold);
      const u64 q = checked_pow(field.characteristic(), m);
      if (q != 0 && q <= kZechMaxSize) {
        ZechField k(field.characteristic(), m);
        fn(k, [k](const u64& c) { return k.from_int(c); });
        return m;
      }
    }
  }
  if constexpr (std::is_same_v<F, GFq>) {
    const unsigned m = field.size() < threshold ? extension_degree_for(field.size(), threshold) : 1;
    const u64 q = checked_pow(field.characteristic(), field.degree() * m);
    if (q != 0 && q <= kZechMaxSize) {
      ZechField k(field, m);
      fn(k, [k](const GFq::Element& c) { return k.embed_sub(c); });
      return m;
    }
  }
  if constexpr (ext_depth<F>::value < 2) {
    if (field.size() < threshold) {
      const unsigned m = extension_degree_for(field.size(), threshold);
      ExtField<F> k(field, random_irreducible(field, m, rng), false);
      fn(k, [k](const typename F::Element& c) { return k.embed(c); });
      return m;
    }
  }
  fn(field, [](const typename F::Element& c) { return c; });
  return 1;
}

namespace detail {

/// Preconditioned symmetric operator D1 A^T D2 A D1 (or D1 A D2 A^T D1 for
/// wide A) of dimension min(rows, cols). One apply costs two base applies.
template <class K>
struct GramPreconditioner {
  using E = typename K::Element;
  Operator<K> a;
  std::vector<E> d1, d2;
  bool wide;

  GramPreconditioner(Operator<K> op, Rng& rng) : a(std::move(op)), wide(a.rows() < a.cols()) {
    const K& k = a.ring();
    d1 = random_units(k, dim(), rng);
    d2 = random_units(k, wide ? a.cols() : a.rows(), rng);
  }

  std::size_t dim() const { return std::min(a.rows(), a.cols()); }

  std::vector<E> scale(const std::vector<E>& d, std::vector<E> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.ring().mul(d[i], x[i]);
    return x;
  }

  std::vector<E> operator()(const std::vector<E>& x) const {
    if (!wide) return scale(d1, a.apply_transpose(scale(d2, a.apply(scale(d1, x)))));
    return scale(d1, a.apply(scale(d2, a.apply_transpose(scale(d1, x)))));
  }
};

template <class K>
std::size_t rank_from_minpoly(const K& k, const poly::Poly<K>& m) {
  const std::size_t deg = m.size() - 1;
  return (deg > 0 && k.is_zero(m[0])) ? deg - 1 : deg;
}

}  // namespace detail

template <class F, class Builder>
RankResult rank_blackbox(const F& field, std::size_t rows, std::size_t cols, const Builder& build, Rng& rng,
                         const RankOptions& opts = {}) {
  RankResult res;
  res.failure_bound = 1.0 / opts.xi;
  res.field_size = field.size();
  res.threshold = field_threshold(rows, cols, opts.xi);
  const std::size_t n = std::min(rows, cols);
  if (n == 0) return res;
  res.extension_degree = with_large_field(field, res.threshold, rng, [&](const auto& k, const auto& hom) {
    auto op = build(k, hom);
    for (unsigned t = 0; t < std::max(1u, opts.trials); ++t) {
      ++res.trials;
      Rng trial = rng.split();
      detail::GramPreconditioner<std::decay_t<decltype(k)>> b(op, trial);
      auto m = detail::projected_minpoly(k, n, b, trial, opts.early_termination);
      res.rank = std::max(res.rank, detail::rank_from_minpoly(k, m));
      if (res.rank == n) break;
    }
  });
  return res;
}

namespace detail {

/// Base-field coordinate vectors of a vector over K = F or ExtField<F>.
template <class F, class K>
std::vector<std::vector<typename F::Element>> coordinates(const K& k, const std::vector<typename K::Element>& z) {
  if constexpr (std::is_same_v<K, F>) {
    (void)k;
    return {z};
  } else if constexpr (std::is_same_v<K, ZechField> && std::is_same_v<F, GFq>) {
    std::vector<std::vector<typename F::Element>> out(k.degree() / k.subfield()->field.degree(),
                                                      std::vector<typename F::Element>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j) {
      auto cs = k.sub_coordinates(z[j]);
      for (std::size_t c = 0; c < cs.size(); ++c) out[c][j] = std::move(cs[c]);
    }
    return out;
  } else if constexpr (std::is_same_v<K, ZechField>) {
    const u64 p = k.characteristic();
    std::vector<std::vector<typename F::Element>> out(k.degree(), std::vector<typename F::Element>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j) {
      u64 code = k.code(z[j]);
      for (unsigned c = 0; c < k.degree(); ++c, code /= p) out[c][j] = code % p;
    }
    return out;
  } else {
    std::vector<std::vector<typename F::Element>> out(k.degree(), std::vector<typename F::Element>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j)
      for (unsigned c = 0; c < k.degree(); ++c) out[c][j] = z[j][c];
    return out;
  }
}

/// v * y^c in K, for the basis used by coordinates().
template <class F, class K>
typename K::Element from_coordinate(const K& k, unsigned c, const typename F::Element& v) {
  if constexpr (std::is_same_v<K, ZechField> && std::is_same_v<F, GFq>) {
    return k.mul(k.embed_sub(v), static_cast<typename K::Element>(c));
  } else if constexpr (std::is_same_v<K, ZechField>) {
    return v == 0 ? k.zero() : k.mul(k.from_int(v), static_cast<typename K::Element>(c));
  } else {
    auto e = k.zero();
    e[c] = v;
    return e;
  }
}

}  // namespace detail

/// F-linear operator over an extension K by coordinate decomposition; one
/// extended apply costs [K:F] base applies.
template <class F, class K>
Operator<K> extend_scalars(const Operator<F>& a, const K& k) {
  using KE = typename K::Element;
  auto lift = [a, k](bool transpose) {
    return [a, k, transpose](std::span<const KE> x, std::span<KE> y) {
      auto coords = detail::coordinates<F>(k, std::vector<KE>(x.begin(), x.end()));
      for (unsigned c = 0; c < coords.size(); ++c) {
        if (detail::is_zero_vector(a.ring(), std::span<const typename F::Element>(coords[c]))) continue;
        auto yc = transpose ? a.apply_transpose(coords[c]) : a.apply(coords[c]);
        for (std::size_t i = 0; i < yc.size(); ++i) y[i] = k.add(y[i], detail::from_coordinate<F>(k, c, yc[i]));
      }
    };
  };
  return Operator<K>(k, a.rows(), a.cols(), lift(false), lift(true));
}

template <class F>
RankResult rank_blackbox(const Operator<F>& a, Rng& rng, const RankOptions& opts = {}) {
  auto build = [&a](const auto& k, const auto&) {
    if constexpr (std::is_same_v<std::decay_t<decltype(k)>, F>) return a;
    else return extend_scalars(a, k);
  };
  return rank_blackbox(a.ring(), a.rows(), a.cols(), build, rng, opts);
}

// ---------------------------------------------------------------------------

struct NullspaceOptions {
  double xi = 100.0;
  unsigned retries = 5;
  std::size_t early_termination = 16;
};


/// k vectors spanning a k-dimensional subspace of the right kernel of A,
/// as the columns of a cols x k matrix. Every column is checked with one
/// apply of A before returning.
template <class F, class Builder>
DenseMatrix<F> nullspace_sample(const F& field, std::size_t rows, std::size_t cols, const Builder& build,
                                std::size_t k, Rng& rng, const NullspaceOptions& opts = {}) {
  using E = typename F::Element;
  DenseMatrix<F> out(field, cols, k);
  if (k == 0) return out;
  if (k > cols) fail(ErrorCode::InsufficientNullity, "requested more kernel vectors than columns");
  const auto base = build(field, [](const E& c) { return c; });
  for (unsigned attempt = 0; attempt < std::max(1u, opts.retries); ++attempt) {
    EchelonBasis<F> basis(field, cols);
    with_large_field(field, field_threshold(rows, cols, opts.xi), rng, [&](const auto& kf, const auto& hom) {
      using K = std::decay_t<decltype(kf)>;
      using KE = typename K::Element;
      auto op = build(kf, hom);
      // Work on the tall side so the Gram operator acts on column space.
      std::vector<KE> d2 = detail::random_units(kf, rows, rng);
      std::vector<KE> d1 = detail::random_units(kf, cols, rng);
      auto scale = [&](const std::vector<KE>& d, std::vector<KE> x) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = kf.mul(d[i], x[i]);
        return x;
      };
      auto gram = [&](const std::vector<KE>& x) {
        return scale(d1, op.apply_transpose(scale(d2, op.apply(scale(d1, x)))));
      };
      auto m1 = detail::projected_minpoly(kf, cols, gram, rng, opts.early_termination);
      auto m2 = detail::projected_minpoly(kf, cols, gram, rng, opts.early_termination);
      auto m = poly_lcm(kf, m1, m2);
      std::size_t t = 0;
      while (t < m.size() && kf.is_zero(m[t])) ++t;
      if (t == 0) return;  // nonsingular with high probability; retry
      poly::Poly<K> h(m.begin() + static_cast<std::ptrdiff_t>(t), m.end());
      const std::size_t budget = 2 * k + 8;
      for (std::size_t s = 0; s < budget && basis.size() < k; ++s) {
        // w = h(B) b by Horner, then push into the kernel of B.
        auto b = detail::random_vector(kf, cols, rng);
        std::vector<KE> w(cols, kf.zero());
        for (std::size_t i = h.size(); i-- > 0;) {
          w = gram(w);
          for (std::size_t j = 0; j < cols; ++j) w[j] = kf.add(w[j], kf.mul(h[i], b[j]));
        }
        bool found = false;
        for (std::size_t step = 0; step <= t; ++step) {
          if (detail::is_zero_vector(kf, std::span<const KE>(w))) break;
          auto bw = gram(w);
          if (detail::is_zero_vector(kf, std::span<const KE>(bw))) {
            found = true;
            break;
          }
          w = std::move(bw);
        }
        if (!found) continue;
        auto z = scale(d1, w);
        for (auto& c : detail::coordinates<F>(kf, z)) {
          basis.insert(std::move(c));
          if (basis.size() == k) break;
        }
      }
    });
    if (basis.size() < k) continue;
    bool exact = true;
    for (std::size_t j = 0; j < k && exact; ++j) {
      const auto& v = basis.vectors()[j];
      exact = detail::is_zero_vector(field, std::span<const E>(base.apply(v)));
      out.set_column(j, v);
    }
    if (exact) return out;
  }
  fail(ErrorCode::InsufficientNullity,
       "could not sample " + std::to_string(k) + " independent kernel vectors within the retry budget");
}

template <class F>
DenseMatrix<F> nullspace_sample(const Operator<F>& a, std::size_t k, Rng& rng, const NullspaceOptions& opts = {}) {
  auto build = [&a](const auto& kf, const auto&) {
    if constexpr (std::is_same_v<std::decay_t<decltype(kf)>, F>) return a;
    else return extend_scalars(a, kf);
  };
  return nullspace_sample(a.ring(), a.rows(), a.cols(), build, k, rng, opts);
}

}  // namespace lsnf
