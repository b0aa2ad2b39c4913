#pragma once

// Smith multiplicities over F[z]/(f^e) from the ranks of the companion
// embeddings phi_l(A mod f^l), l = 1..e.

#include <vector>

#include "lsnf/blackbox.hpp"
#include "lsnf/smith.hpp"

namespace lsnf {

struct RankProfile {
  std::vector<std::size_t> rho;  // rho[l-1] = rank phi_l(A mod f^l)
  unsigned d = 1;
  unsigned e = 1;
  std::size_t n = 0;  // min(rows, cols)
};

/// rho_{l-1} = d * sum_i max(l - i, 0) * r_i.
inline RankProfile rank_profile_from_multiplicities(const SmithMultiplicities& s, unsigned d, std::size_t n) {
  RankProfile p;
  p.d = d;
  p.e = s.exponent();
  p.n = n;
  for (unsigned l = 1; l <= p.e; ++l) {
    std::size_t acc = 0;
    for (unsigned i = 0; i < l; ++i) acc += (l - i) * s.counts[i];
    p.rho.push_back(d * acc);
  }
  return p;
}

/// Inverts the triangular rank system: tau_l = rho_{l-1}/d and
/// r_{l-1} = tau_l - 2 tau_{l-1} + tau_{l-2}.
inline SmithMultiplicities solve_rank_system(const RankProfile& p, std::string ring = {}) {
  if (p.rho.size() != p.e || p.d == 0) fail(ErrorCode::InvalidArgument, "malformed rank profile");
  std::vector<long long> tau{0, 0};
  for (std::size_t rho : p.rho) {
    if (rho % p.d != 0)
      fail(ErrorCode::InconsistentProfile, "rank " + std::to_string(rho) + " not divisible by d=" + std::to_string(p.d));
    tau.push_back(static_cast<long long>(rho / p.d));
  }
  SmithMultiplicities s{std::move(ring), std::vector<std::size_t>(p.e, 0), 0};
  long long total = 0;
  for (unsigned l = 1; l <= p.e; ++l) {
    const long long r = tau[l + 1] - 2 * tau[l] + tau[l - 1];
    if (r < 0) fail(ErrorCode::InconsistentProfile, "negative multiplicity for f^" + std::to_string(l - 1));
    s.counts[l - 1] = static_cast<std::size_t>(r);
    total += r;
  }
  if (total > static_cast<long long>(p.n))
    fail(ErrorCode::InconsistentProfile, "multiplicities exceed the matrix dimension");
  s.zeros = p.n - static_cast<std::size_t>(total);
  return s;
}

struct SmithFeOptions {
  RankOptions rank;
  unsigned retries = 5;
};

struct SmithFeResult {
  SmithMultiplicities multiplicities;
  RankProfile profile;
  unsigned attempts = 0;
  u64 matvecs = 0;
  double failure_bound = 0;  // e / xi
  unsigned extension_degree = 1;
};

/// Builder producing phi_l(A mod f^l) over a scalar extension of F, for a
/// source exposing over(ring, hom) (e.g. SparseBlackBox).
template <class Source>
auto phi_builder(const Source& src, unsigned ell) {
  return [&src, ell](const auto& k, const auto& hom) {
    const auto& ring = src.ring();
    auto ring_k = ring.over(k, hom).with_exponent(ell);
    auto op = src.over(ring_k, [&hom, &ring_k](const auto& a) {
      poly::Poly<std::decay_t<decltype(k)>> b;
      b.reserve(a.size());
      for (const auto& c : a) b.push_back(hom(c));
      return ring_k.from_poly(std::move(b));
    });
    return embed_phi(op, ell);
  };
}

template <class Source>
RankProfile rank_profile(const Source& src, Rng& rng, const RankOptions& opts = {},
                         unsigned* extension_degree = nullptr) {
  const auto& ring = src.ring();
  RankProfile p;
  p.d = ring.d();
  p.e = ring.exponent();
  p.n = std::min(src.rows(), src.cols());
  for (unsigned l = 1; l <= p.e; ++l) {
    const std::size_t w = static_cast<std::size_t>(p.d) * l;
    auto res = rank_blackbox(ring.field(), w * src.rows(), w * src.cols(), phi_builder(src, l), rng, opts);
    if (extension_degree) *extension_degree = std::max(*extension_degree, res.extension_degree);
    p.rho.push_back(res.rank);
  }
  return p;
}

/// Retries with fresh randomness whenever the rank profile is inconsistent.
template <class Source>
SmithFeResult smith_fe(const Source& src, Rng& rng, const SmithFeOptions& opts = {}) {
  SmithFeResult res;
  const u64 start = src.counter()->value();
  res.failure_bound = src.ring().exponent() / opts.rank.xi;
  for (unsigned attempt = 0; attempt < std::max(1u, opts.retries); ++attempt) {
    ++res.attempts;
    Rng trial = rng.split();
    res.profile = rank_profile(src, trial, opts.rank, &res.extension_degree);
    try {
      res.multiplicities = solve_rank_system(res.profile, src.ring().describe());
      res.matvecs = src.counter()->value() - start;
      return res;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InconsistentProfile) throw;
    }
  }
  fail(ErrorCode::RetriesExhausted,
       "rank profile stayed inconsistent after " + std::to_string(res.attempts) + " attempts");
}

}  // namespace lsnf
