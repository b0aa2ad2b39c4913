#pragma once

// Smith multiplicities over Z/p^e (and Galois rings) for sparse black boxes:
// reduce to l x l with truncated scaled Toeplitz preconditioners, dispose of
// the unit invariants through a nullspace mod p, finish densely on an l x k
// matrix, and certify by projection verification.

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "lsnf/blackbox.hpp"
#include "lsnf/dense.hpp"
#include "lsnf/operators.hpp"
#include "lsnf/smith.hpp"

namespace lsnf {

enum class PreconditionerMode { Heuristic, Provable };

/// Dense auxiliary storage, in ring elements.
class StorageMeter {
 public:
  void allocate(std::size_t n) {
    current_ += n;
    peak_ = std::max(peak_, current_);
  }
  void release(std::size_t n) { current_ -= std::min(n, current_); }
  std::size_t current() const { return current_; }
  std::size_t peak() const { return peak_; }

 private:
  std::size_t current_ = 0, peak_ = 0;
};

/// B1 = leading l rows of D1 T1 D2 (l x m), B2 = leading l columns of
/// D1' T2 D2' (n x l).
template <class W>
struct PreconditionerPair {
  W ring;
  std::size_t rows = 0, cols = 0, ell = 0;
  ToeplitzSpec<W> left, right;
  std::string domain;
  double xi = 0;
  u64 seed = 0;

  Operator<W> b1() const { return toeplitz_operator(ring, left, ell, rows); }
  Operator<W> b2() const { return toeplitz_operator(ring, right, cols, ell); }

  /// The same pair with entries mapped into another ring.
  template <class K, class Hom>
  std::pair<Operator<K>, Operator<K>> over(const K& k, const Hom& hom) const {
    return {toeplitz_operator(k, left.template map<K>(hom), ell, rows),
            toeplitz_operator(k, right.template map<K>(hom), cols, ell)};
  }
};

/// Side of the sample range {0, ..., 6 N^2 xi - 1} for N = max(rows, cols).
inline long double provable_range(std::size_t rows, std::size_t cols, double xi) {
  const long double n = static_cast<long double>(std::max(rows, cols));
  return 6.0L * n * n * static_cast<long double>(xi);
}

/// Residue degree eta used for the Galois lift: p^eta covers both the
/// preconditioner range and the field size the rank step needs at l.
inline unsigned galois_degree(u64 p, std::size_t rows, std::size_t cols, std::size_t ell, double xi) {
  unsigned eta = std::max(1u, ceil_log(p, provable_range(rows, cols, xi)));
  return std::max(eta, ceil_log(p, field_threshold(ell, ell, xi)));
}

/// Heuristic: entries uniform over the ring W, unit scalings. Provable: entries uniform
/// over {0, ..., 6N^2 xi - 1} (needs p at least that large) or, over a
/// Galois ring, over the coefficient set {sum a_i y^i : 0 <= a_i < p}.
template <class W>
PreconditionerPair<W> make_preconditioners(const W& ring, std::size_t rows, std::size_t cols, std::size_t ell,
                                           PreconditionerMode mode, double xi, Rng& rng) {
  if (ell > std::min(rows, cols)) fail(ErrorCode::InvalidArgument, "l exceeds the matrix dimensions");
  PreconditionerPair<W> pair{ring, rows, cols, ell, {}, {}, {}, xi, rng.next()};
  Rng local(pair.seed);
  if (mode == PreconditionerMode::Heuristic) {
    pair.domain = "full ring";
    pair.left = ToeplitzSpec<W>::random(ring, rows, local);
    pair.right = ToeplitzSpec<W>::random(ring, cols, local);
    for (auto* spec : {&pair.left, &pair.right}) {
      spec->left = detail::random_units(ring, spec->n, local);
      spec->right = detail::random_units(ring, spec->n, local);
    }
    return pair;
  }
  if constexpr (std::is_same_v<W, GaloisRing>) {
    pair.domain = "Galois coefficients";
    auto sample = [&] {
      typename W::Element a = ring.zero();
      for (auto& c : a) c = local.below(ring.prime());
      return a;
    };
    pair.left = ToeplitzSpec<W>::sampled(ring, rows, sample);
    pair.right = ToeplitzSpec<W>::sampled(ring, cols, sample);
  } else {
    const long double range = provable_range(rows, cols, xi);
    if (static_cast<long double>(ring.prime()) < range)
      fail(ErrorCode::InvalidArgument, "prime below 6 N^2 xi; use the Galois lift");
    const u64 bound = static_cast<u64>(std::ceil(range));
    pair.domain = "range " + std::to_string(bound);
    auto sample = [&] { return ring.from_int(local.below(bound)); };
    pair.left = ToeplitzSpec<W>::sampled(ring, rows, sample);
    pair.right = ToeplitzSpec<W>::sampled(ring, cols, sample);
  }
  return pair;
}

/// A_hat = B1 * A * B2 (l x l).
template <class W>
Operator<W> reduce_dimension(const Operator<W>& a, const PreconditionerPair<W>& pair) {
  if (a.rows() != pair.rows || a.cols() != pair.cols)
    fail(ErrorCode::DimensionMismatch, "preconditioners do not match the operator");
  return compose(std::vector<Operator<W>>{pair.b1(), a, pair.b2()});
}

// ---------------------------------------------------------------------------

struct PipelineOptions {
  RankOptions rank{.trials = 1};
  NullspaceOptions nullspace;
};

struct PipelineResult {
  SmithMultiplicities multiplicities;
  std::size_t ell = 0;
  std::size_t r0 = 0;  // unit invariants of A_hat
  std::size_t k = 0;   // l - r0
  std::size_t divisibility_checked = 0;
  std::size_t storage_peak = 0;
};

/// Ring-change helpers: W -> residue field K0 -> scalar extension K.
template <class W>
using ResidueOf = std::decay_t<decltype(std::declval<const W&>().residue_field())>;

/// Corrects a kernel lift N (l x k, A_hat N = 0 mod p) so that G A_hat N = 0
/// exactly for a random r0 x l matrix G = [I | R] with G A_hat of full rank
/// mod p. Then A_hat N carries exactly the non-unit invariants of A_hat. Each
/// p-adic step solves (G A_hat P) y = b over the residue field by Wiedemann,
/// P = [I; R'] random; solutions are checked, so an undershooting
/// minimal polynomial only costs another projection.
template <class W, class Builder>
void refine_kernel_lift(const Operator<W>& a_hat, const Builder& build, std::size_t r0, DenseMatrix<W>& lifted,
                        Rng& rng, const PipelineOptions& opts, StorageMeter& mem) {
  using K0 = ResidueOf<W>;
  const W& ring = a_hat.ring();
  const K0& residue = ring.residue_field();
  const std::size_t ell = lifted.rows(), k = lifted.cols();
  const unsigned e = ring.exponent();
  constexpr unsigned kTries = 32, kProjections = 6;
  bool done = false;
  auto body = [&](const auto& kf, const auto& hom) {
    using K = std::decay_t<decltype(kf)>;
    using KE = typename K::Element;
    auto to_k = [&](const typename W::Element& x) { return hom(ring.residue(x)); };
    const std::size_t rest = ell - r0;
    for (unsigned attempt = 0; attempt < kTries && !done; ++attempt) {
      // G = [I | R] and P = [I; R'] with dense random R (r0 x rest), R' (rest x r0).
      std::vector<typename W::Element> gr(r0 * rest);
      for (auto& v : gr) v = ring.random(rng);
      std::vector<KE> grk(gr.size()), pr(rest * r0);
      for (std::size_t i = 0; i < gr.size(); ++i) grk[i] = to_k(gr[i]);
      for (auto& v : pr) v = kf.random(rng);
      auto g_apply = [&](const auto& rg, const auto& coef, const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V out(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(r0));
        for (std::size_t i = 0; i < r0; ++i) {
          MulAcc<std::decay_t<decltype(rg)>> acc(rg);
          for (std::size_t j = 0; j < rest; ++j) acc.add(coef[i * rest + j], x[r0 + j]);
          out[i] = rg.add(out[i], acc.value());
        }
        return out;
      };
      const auto a_k = build(kf, hom);
      auto op_apply = [&](const std::vector<KE>& x) { return g_apply(kf, grk, a_k.apply(x)); };
      auto pre_apply = [&](const std::vector<KE>& y) {
        std::vector<KE> out(y);
        out.resize(ell);
        for (std::size_t i = 0; i < rest; ++i) {
          MulAcc<K> acc(kf);
          for (std::size_t j = 0; j < r0; ++j) acc.add(pr[i * r0 + j], y[j]);
          out[r0 + i] = acc.value();
        }
        return out;
      };
      auto square = [&](const std::vector<KE>& y) { return op_apply(pre_apply(y)); };

      auto m = detail::projected_minpoly(kf, r0, square, rng, opts.nullspace.early_termination);
      unsigned projections = 1;
      DenseMatrix<W> trial = lifted;
      bool ok = !m.empty() && !kf.is_zero(m[0]);
      mem.allocate(r0 * k + ell * k);
      for (unsigned j = 1; j < e && ok; ++j) {
        const auto pj = ring.uniformizer_pow(j);
        for (std::size_t c = 0; c < k && ok; ++c) {
          auto col = g_apply(ring, gr, a_hat.apply(trial.column(c)));
          std::vector<KE> b(r0);
          for (std::size_t i = 0; i < r0; ++i) {
            if (ring.valuation(col[i]) < j) fail(ErrorCode::Internal, "kernel lift lost p-adic precision");
            b[i] = to_k(ring.div_uniformizer_pow(col[i], j));
          }
          for (;;) {
            std::vector<KE> y(r0, kf.zero());
            for (std::size_t i = m.size(); i-- > 1;) {
              y = square(y);
              for (std::size_t r = 0; r < r0; ++r) y[r] = kf.add(y[r], kf.mul(m[i], b[r]));
            }
            const KE scale = kf.neg(kf.inv(m[0]));
            for (auto& v : y) v = kf.mul(scale, v);
            auto x = pre_apply(y);
            if (op_apply(x) == b) {
              auto x0 = detail::coordinates<K0>(kf, x)[0];
              for (std::size_t i = 0; i < ell; ++i)
                trial(i, c) = ring.sub(trial(i, c), ring.mul(pj, ring.lift_residue(x0[i])));
              break;
            }
            if (projections++ == kProjections) {
              ok = false;
              break;
            }
            m = poly_lcm(kf, m, detail::projected_minpoly(kf, r0, square, rng, opts.nullspace.early_termination));
            if (kf.is_zero(m[0])) {
              ok = false;
              break;
            }
          }
        }
      }
      mem.release(r0 * k + ell * k);
      if (ok) {
        lifted = std::move(trial);
        done = true;
      }
    }
  };
  bool zech = false;
  if constexpr (std::is_same_v<K0, GFq>) {
    if (residue.size() <= static_cast<long double>(kZechMaxSize)) {
      ZechField kz(residue, 1);
      body(kz, [&kz](const GFq::Element& c) { return kz.embed_sub(c); });
      zech = true;
    }
  }
  if (!zech) body(residue, [](const typename K0::Element& x) { return x; });
  if (!done) fail(ErrorCode::InsufficientNullity, "no preconditioner of full rank mod p found for the kernel lift");
}

/// Algorithm over the working ring W. `src` is a sparse black box over the
/// input ring R and `to_w` embeds R into W.
template <class W, class Source, class ToW>
PipelineResult smith_pe_nullspace(const Source& src, const W& ring, const ToW& to_w,
                                  const PreconditionerPair<W>& pair, Rng& rng, const PipelineOptions& opts = {},
                                  StorageMeter* meter = nullptr) {
  using K0 = ResidueOf<W>;
  using WE = typename W::Element;
  StorageMeter local_meter;
  StorageMeter& mem = meter ? *meter : local_meter;
  const std::size_t ell = pair.ell;
  const std::size_t m = src.rows(), n = src.cols();
  const unsigned e = ring.exponent();
  const K0& residue = ring.residue_field();

  PipelineResult res;
  res.ell = ell;

  // Step 0: reduced operator.
  const auto a_w = src.over(ring, to_w);
  const auto a_hat = reduce_dimension(a_w, pair);

  // Step 1: rank of A_hat mod p.
  auto build = [&](const auto& k, const auto& hom) {
    auto to_k = [&](const auto& x) { return hom(ring.residue(to_w(x))); };
    auto pre = pair.over(k, [&](const WE& x) { return hom(ring.residue(x)); });
    return compose(std::vector{pre.first, src.over(k, to_k), pre.second});
  };
  res.r0 = ell == 0 ? 0 : rank_blackbox(residue, ell, ell, build, rng, opts.rank).rank;
  res.k = ell - res.r0;

  // Step 2: kernel mod p, lifted by the canonical residue embedding.
  std::vector<unsigned> vals(res.r0, 0);
  if (res.k > 0) {
    mem.allocate(res.k * ell);
    auto kernel = nullspace_sample(residue, ell, ell, build, res.k, rng, opts.nullspace);
    mem.allocate(res.k * ell);
    DenseMatrix<W> lifted(ring, ell, res.k);
    for (std::size_t i = 0; i < ell; ++i)
      for (std::size_t j = 0; j < res.k; ++j) lifted(i, j) = ring.lift_residue(kernel(i, j));
    kernel = DenseMatrix<K0>(residue, 0, 0);
    mem.release(res.k * ell);
    if (res.r0 > 0 && e > 1) refine_kernel_lift(a_hat, build, res.r0, lifted, rng, opts, mem);

    // Step 3: N = A_hat * N', divisible by p.
    mem.allocate(res.k * ell);
    DenseMatrix<W> nmat(ring, ell, res.k);
    for (std::size_t j = 0; j < res.k; ++j) {
      auto col = a_hat.apply(lifted.column(j));
      for (std::size_t i = 0; i < ell; ++i) {
        if (ring.valuation(col[i]) < 1)
          fail(ErrorCode::Internal, "A_hat * N' has an entry not divisible by p");
        ++res.divisibility_checked;
      }
      nmat.set_column(j, col);
    }
    lifted = DenseMatrix<W>(ring, 0, 0);
    mem.release(res.k * ell);

    // Step 4: the invariants of N are the non-unit invariants of A_hat.
    auto nvals = local_invariant_valuations(std::move(nmat));
    mem.release(res.k * ell);
    vals.insert(vals.end(), nvals.begin(), nvals.end());
  }
  res.storage_peak = mem.peak();

  std::size_t zeros_hat = 0;
  for (unsigned v : vals) zeros_hat += (v >= e);
  if (zeros_hat == 0 && ell < std::min(m, n))
    fail(ErrorCode::InsufficientBound, "no zero invariant in the reduced matrix; l may be too small");

  SmithMultiplicities s{src.ring().describe(), std::vector<std::size_t>(e, 0), 0};
  for (unsigned v : vals)
    if (v < e) ++s.counts[v];
  s.zeros = std::min(m, n) - s.nonzero();
  res.multiplicities = std::move(s);
  return res;
}

// ---------------------------------------------------------------------------

/// Valuations of the first k invariants of [AQ] and [AQ | Ay] agree.
template <class W>
bool one_side_check(const DenseMatrix<W>& aq, const DenseMatrix<W>& aqy) {
  const std::size_t k = aq.cols();
  auto s1 = local_invariant_valuations(aq);
  auto s2 = local_invariant_valuations(aqy);
  s1.resize(std::min(k, s1.size()));
  s2.resize(std::min(k, s2.size()));
  return s1 == s2;
}

struct VerificationReport {
  std::size_t k = 0;     // nonzero invariants of PAQ
  unsigned c = 0;
  bool verified = false;
  double failure_bound = 1.0;  // 2 / p^c
  u64 seed = 0;
  std::vector<unsigned> paq_valuations;
  std::vector<unsigned> bordered_valuations;
};

/// Bordered matrix [[PAQ, PAR1], [R2AQ, R2AR1]] with R1 (n x c) and R2
/// (c x m) uniform; verified iff its first k invariants equal those of PAQ
/// and it has no further nonzero invariant.
template <class W>
VerificationReport projection_verify(const Operator<W>& a, const Operator<W>& p, const Operator<W>& q, unsigned c,
                                     Rng& rng) {
  using E = typename W::Element;
  const W& ring = a.ring();
  if (p.cols() != a.rows() || q.rows() != a.cols() || p.rows() != q.cols())
    fail(ErrorCode::DimensionMismatch, "projection shapes do not match the operator");
  const std::size_t ell = p.rows(), m = a.rows(), n = a.cols(), t = ell + c;
  VerificationReport rep;
  rep.c = c;
  rep.seed = rng.next();
  rep.failure_bound = 2.0 / std::pow(static_cast<double>(ring.prime()), static_cast<double>(c));
  Rng local(rep.seed);
  auto r1 = DenseMatrix<W>::random(ring, n, c, local);
  auto r2 = DenseMatrix<W>::random(ring, c, m, local);

  DenseMatrix<W> b(ring, t, t);
  std::vector<E> unit(ell, ring.zero());
  for (std::size_t j = 0; j < t; ++j) {
    std::vector<E> x;
    if (j < ell) {
      unit[j] = ring.one();
      x = q.apply(unit);
      unit[j] = ring.zero();
    } else {
      x = r1.column(j - ell);
    }
    auto ax = a.apply(x);
    auto top = p.apply(ax);
    auto bottom = r2.apply(ax);
    for (std::size_t i = 0; i < ell; ++i) b(i, j) = top[i];
    for (std::size_t i = 0; i < c; ++i) b(ell + i, j) = bottom[i];
  }
  const unsigned e = ring.exponent();
  rep.paq_valuations = local_invariant_valuations(b.submatrix(0, 0, ell, ell));
  rep.bordered_valuations = local_invariant_valuations(b);
  for (unsigned v : rep.paq_valuations) rep.k += (v < e);
  bool ok = std::equal(rep.paq_valuations.begin(), rep.paq_valuations.begin() + rep.k,
                       rep.bordered_valuations.begin());
  for (std::size_t i = rep.k; i < rep.bordered_valuations.size(); ++i) ok = ok && rep.bordered_valuations[i] >= e;
  rep.verified = ok;
  return rep;
}

// ---------------------------------------------------------------------------

struct SmithPeOptions {
  double xi = 100.0;
  std::optional<std::size_t> ell;
  std::size_t slack = 8;
  unsigned c = 21;
  PreconditionerMode mode = PreconditionerMode::Heuristic;
  unsigned rounds = 6;
  /// Heuristic mode over Z/p^e: residue degree of the Galois ring used as
  /// working ring. 0 picks the least eta with p^eta >= 8; 1 stays in Z/p^e.
  unsigned galois_degree = 0;
  RankOptions rank{.trials = 1};
  NullspaceOptions nullspace;
};

inline unsigned heuristic_galois_degree(u64 p) {
  unsigned eta = 1;
  for (u64 q = p; q < 8; q *= p) ++eta;
  return eta;
}

struct SmithPeResult {
  SmithMultiplicities multiplicities;
  std::optional<VerificationReport> verification;
  std::size_t ell = 0;
  std::size_t r0 = 0;
  std::size_t k = 0;
  unsigned rounds = 0;
  unsigned eta = 1;  // residue degree of the working ring
  std::string domain;
  u64 matvecs = 0;
  std::size_t storage_peak = 0;
  std::size_t divisibility_checked = 0;
  double failure_bound = 0;
};

namespace detail {

template <class W, class Source, class ToW>
SmithPeResult smith_pe_rounds(const Source& src, const W& ring, const ToW& to_w, std::size_t base_rank,
                              unsigned eta_fixed, Rng& rng, const SmithPeOptions& opts) {
  const std::size_t m = src.rows(), n = src.cols(), top = std::min(m, n);
  const u64 start = src.counter()->value();
  SmithPeResult out;
  std::size_t slack = opts.slack;
  std::size_t ell = opts.ell ? std::min(*opts.ell, top) : std::min(base_rank + slack, top);
  PipelineOptions popts{opts.rank, opts.nullspace};
  for (unsigned round = 0; round < std::max(1u, opts.rounds); ++round) {
    ++out.rounds;
    W wring = ring;
    auto pair = make_preconditioners(wring, m, n, ell, opts.mode, opts.xi, rng);
    bool grow = false;
    try {
      StorageMeter meter;
      auto res = smith_pe_nullspace(src, wring, to_w, pair, rng, popts, &meter);
      out.multiplicities = res.multiplicities;
      out.ell = ell;
      out.r0 = res.r0;
      out.k = res.k;
      out.storage_peak = std::max(out.storage_peak, res.storage_peak);
      out.divisibility_checked += res.divisibility_checked;
      out.domain = pair.domain;
      out.eta = eta_fixed;
      if (opts.c == 0) {
        out.verification.reset();
        out.failure_bound = 1.0;
        out.matvecs = src.counter()->value() - start;
        return out;
      }
      auto a_w = src.over(wring, to_w);
      auto rep = projection_verify(a_w, pair.b1(), pair.b2(), opts.c, rng);
      out.verification = rep;
      out.failure_bound = rep.failure_bound;
      if (rep.verified) {
        out.matvecs = src.counter()->value() - start;
        return out;
      }
      grow = true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InsufficientBound) grow = true;
      else if (e.code() != ErrorCode::InsufficientNullity) throw;
    }
    if (grow && ell < top) {
      ell = std::min(ell + slack, top);
      slack *= 2;
    }
  }
  fail(ErrorCode::RetriesExhausted, "no verified result after " + std::to_string(out.rounds) + " rounds");
}

}  // namespace detail

/// Full driver: l from the option or rank(A mod p) + slack, growing l on
/// InsufficientBound or a failed verification.
template <class Source>
SmithPeResult smith_pe(const Source& src, Rng& rng, const SmithPeOptions& opts = {}) {
  using R = std::decay_t<decltype(src.ring())>;
  using RE = typename R::Element;
  const R& ring = src.ring();
  std::size_t base_rank = 0;
  if (!opts.ell) {
    auto build = [&](const auto& k, const auto& hom) {
      return src.over(k, [&](const RE& x) { return hom(ring.residue(x)); });
    };
    base_rank = rank_blackbox(ring.residue_field(), src.rows(), src.cols(), build, rng, opts.rank).rank;
  }
  auto identity = [](const RE& x) { return x; };
  if (opts.mode == PreconditionerMode::Provable) {
    const long double range = provable_range(src.rows(), src.cols(), opts.xi);
    if constexpr (std::is_same_v<R, LocalIntRing>) {
      if (static_cast<long double>(ring.prime()) < range) {
        const std::size_t ell_hint = opts.ell.value_or(std::min(src.rows(), src.cols()));
        const unsigned eta = galois_degree(ring.prime(), src.rows(), src.cols(), ell_hint, opts.xi);
        std::vector<u64> gamma = first_irreducible(PrimeField(ring.prime()), eta);
        GaloisRing gr(ring.prime(), ring.exponent(), gamma);
        auto res = detail::smith_pe_rounds(src, gr, [&gr](u64 x) { return gr.embed(x); }, base_rank, eta, rng, opts);
        res.multiplicities.ring = ring.describe();
        return res;
      }
    } else {
      if (ring.residue_field().size() < range)
        fail(ErrorCode::Unsupported, "provable mode over this ring needs a residue field of size >= 6 N^2 xi");
    }
  }
  if constexpr (std::is_same_v<R, LocalIntRing>) {
    if (opts.mode == PreconditionerMode::Heuristic) {
      const unsigned eta = opts.galois_degree ? opts.galois_degree : heuristic_galois_degree(ring.prime());
      if (eta > 1) {
        GaloisRing gr(ring.prime(), ring.exponent(), first_irreducible(PrimeField(ring.prime()), eta));
        auto res = detail::smith_pe_rounds(src, gr, [&gr](u64 x) { return gr.embed(x); }, base_rank, eta, rng, opts);
        res.multiplicities.ring = ring.describe();
        return res;
      }
    }
  }
  return detail::smith_pe_rounds(src, ring, identity, base_rank, 1, rng, opts);
}

}  // namespace lsnf
