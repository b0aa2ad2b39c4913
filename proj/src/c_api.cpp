#include "lsnf/lsnf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "lsnf/carries.hpp"
#include "lsnf/descriptor.hpp"
#include "lsnf/planted.hpp"
#include "lsnf/sms.hpp"
#include "lsnf/smith_padic.hpp"
#include "lsnf/smith_poly.hpp"

using namespace lsnf;

struct lsnf_ring {
  AnyRing ring;
};

struct lsnf_matrix {
  std::variant<TripletMatrix<PrimeField>, TripletMatrix<LocalIntRing>, TripletMatrix<GaloisRing>,
               TripletMatrix<PolyQuotRing<PrimeField>>, TripletMatrix<PolyQuotRing<GFq>>>
      m;
};

struct lsnf_result {
  SmithMultiplicities mult;
  std::size_t rank = 0;
  int verified = -1;
  bool has_bound = false;
  double bound = 0;
  u64 matvecs = 0;
  std::size_t ell = 0, r0 = 0, k = 0, storage_peak = 0;
  unsigned eta = 1;
};

namespace {

thread_local std::string last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

lsnf_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return LSNF_E_INVALID_ARGUMENT;
    case ErrorCode::Parse: return LSNF_E_PARSE;
    case ErrorCode::RingMismatch: return LSNF_E_RING_MISMATCH;
    case ErrorCode::DimensionMismatch: return LSNF_E_DIMENSION_MISMATCH;
    case ErrorCode::NonUnit: return LSNF_E_NON_UNIT;
    case ErrorCode::InconsistentProfile: return LSNF_E_INCONSISTENT_PROFILE;
    case ErrorCode::RetriesExhausted: return LSNF_E_RETRIES_EXHAUSTED;
    case ErrorCode::InsufficientBound: return LSNF_E_INSUFFICIENT_BOUND;
    case ErrorCode::InsufficientNullity: return LSNF_E_INSUFFICIENT_NULLITY;
    case ErrorCode::Unsupported: return LSNF_E_UNSUPPORTED;
    case ErrorCode::Internal: return LSNF_E_INTERNAL;
  }
  return LSNF_E_INTERNAL;
}

template <class Fn>
lsnf_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return LSNF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const IoError& e) {
    last_error = e.what();
    return LSNF_E_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LSNF_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LSNF_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lsnf_options resolve(const lsnf_options* opts) {
  lsnf_options o;
  lsnf_options_default(&o);
  if (opts) o = *opts;
  if (!(o.xi > 1.0)) fail(ErrorCode::InvalidArgument, "xi must exceed 1");
  return o;
}

/// Z/p as the local ring Z/p^1.
TripletMatrix<LocalIntRing> as_local(const TripletMatrix<PrimeField>& m) {
  TripletMatrix<LocalIntRing> out(LocalIntRing(m.ring().characteristic(), 1), m.rows(), m.cols());
  for (const auto& t : m.entries()) out.add(t.row, t.col, t.value);
  return out;
}

template <class R>
constexpr bool is_pq = false;
template <class F>
constexpr bool is_pq<PolyQuotRing<F>> = true;

template <class R>
void run_smith_pe(const TripletMatrix<R>& m, const lsnf_options& o, lsnf_result& res) {
  SparseBlackBox<R> src(m);
  Rng rng(o.seed);
  SmithPeOptions so;
  so.xi = o.xi;
  if (o.ell) so.ell = o.ell;
  so.slack = o.slack;
  so.c = o.c;
  so.mode = o.mode == LSNF_MODE_PROVABLE ? PreconditionerMode::Provable : PreconditionerMode::Heuristic;
  so.galois_degree = o.galois_degree;
  auto out = smith_pe(src, rng, so);
  res.mult = out.multiplicities;
  res.rank = out.multiplicities.nonzero();
  res.verified = out.verification ? static_cast<int>(out.verification->verified) : -1;
  res.has_bound = true;
  res.bound = out.failure_bound;
  res.matvecs = out.matvecs;
  res.ell = out.ell;
  res.r0 = out.r0;
  res.k = out.k;
  res.eta = out.eta;
  res.storage_peak = out.storage_peak;
}

template <class R>
void run_verify(const TripletMatrix<R>& a, const lsnf_matrix* p, const lsnf_matrix* q, const lsnf_options& o,
                lsnf_result& res) {
  const R& ring = a.ring();
  SparseBlackBox<R> src(a);
  Rng rng(o.seed);
  auto id = [](const typename R::Element& x) { return x; };
  VerificationReport rep;
  if (p && q) {
    const auto* pm = std::get_if<TripletMatrix<R>>(&p->m);
    const auto* qm = std::get_if<TripletMatrix<R>>(&q->m);
    if (!pm || !qm || !(pm->ring() == ring) || !(qm->ring() == ring))
      fail(ErrorCode::RingMismatch, "P and Q must be over the ring of A");
    rep = projection_verify(src.op(), SparseBlackBox<R>(*pm).op(), SparseBlackBox<R>(*qm).op(), o.c, rng);
    res.ell = pm->rows();
  } else {
    if (p || q) fail(ErrorCode::InvalidArgument, "give both P and Q or neither");
    if (o.ell == 0) fail(ErrorCode::InvalidArgument, "verification with generated projections needs ell");
    const auto mode = o.mode == LSNF_MODE_PROVABLE ? PreconditionerMode::Provable : PreconditionerMode::Heuristic;
    auto pair = make_preconditioners(ring, a.rows(), a.cols(), o.ell, mode, o.xi, rng);
    rep = projection_verify(src.over(ring, id), pair.b1(), pair.b2(), o.c, rng);
    res.ell = o.ell;
  }
  res.mult = SmithMultiplicities::from_valuations(ring.describe(), ring.exponent(), rep.paq_valuations);
  res.rank = rep.k;
  res.verified = rep.verified;
  res.has_bound = true;
  res.bound = rep.failure_bound;
  res.matvecs = src.counter()->value();
}

}  // namespace

extern "C" {

const char* lsnf_version(void) { return "0.1.0"; }

const char* lsnf_last_error(void) { return last_error.c_str(); }

const char* lsnf_status_name(lsnf_status s) {
  switch (s) {
    case LSNF_OK: return "ok";
    case LSNF_E_INVALID_ARGUMENT: return "invalid argument";
    case LSNF_E_PARSE: return "parse error";
    case LSNF_E_RING_MISMATCH: return "ring mismatch";
    case LSNF_E_DIMENSION_MISMATCH: return "dimension mismatch";
    case LSNF_E_NON_UNIT: return "non-unit";
    case LSNF_E_INCONSISTENT_PROFILE: return "inconsistent rank profile";
    case LSNF_E_RETRIES_EXHAUSTED: return "retries exhausted";
    case LSNF_E_INSUFFICIENT_BOUND: return "insufficient bound";
    case LSNF_E_INSUFFICIENT_NULLITY: return "insufficient nullity";
    case LSNF_E_UNSUPPORTED: return "unsupported";
    case LSNF_E_INTERNAL: return "internal error";
    case LSNF_E_IO: return "i/o error";
  }
  return "unknown";
}

void lsnf_string_free(char* s) { std::free(s); }

void lsnf_options_default(lsnf_options* opts) {
  if (!opts) return;
  *opts = lsnf_options{100.0, 0, 8, 21, LSNF_MODE_HEURISTIC, 1, 0};
}

lsnf_status lsnf_ring_parse(const char* descriptor, lsnf_ring** out) {
  return guarded([&] {
    need(descriptor, "descriptor");
    need(out, "out");
    *out = new lsnf_ring{parse_ring(descriptor)};
  });
}

void lsnf_ring_free(lsnf_ring* ring) { delete ring; }

lsnf_status lsnf_ring_describe(const lsnf_ring* ring, char** out) {
  return guarded([&] {
    need(ring, "ring");
    need(out, "out");
    *out = dup(describe(ring->ring));
  });
}

unsigned lsnf_ring_exponent(const lsnf_ring* ring) {
  if (!ring) return 0;
  return std::visit(
      [](const auto& r) -> unsigned {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PrimeField>) return 1;
        else return r.exponent();
      },
      ring->ring);
}

lsnf_status lsnf_matrix_parse_sms(const lsnf_ring* ring, const char* text, lsnf_matrix** out) {
  return guarded([&] {
    need(ring, "ring");
    need(text, "text");
    need(out, "out");
    *out = std::visit([&](const auto& r) { return new lsnf_matrix{parse_sms(text, r)}; }, ring->ring);
  });
}

lsnf_status lsnf_matrix_read_sms(const lsnf_ring* ring, const char* path, lsnf_matrix** out) {
  return guarded([&] {
    need(ring, "ring");
    need(path, "path");
    need(out, "out");
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open '") + path + "'");
    *out = std::visit([&](const auto& r) { return new lsnf_matrix{read_sms(in, r)}; }, ring->ring);
  });
}

lsnf_status lsnf_matrix_to_sms(const lsnf_matrix* m, char** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    std::ostringstream s;
    std::visit([&](const auto& t) { write_sms(s, t); }, m->m);
    *out = dup(s.str());
  });
}

lsnf_status lsnf_matrix_planted(const lsnf_ring* ring, size_t rows, size_t cols, const unsigned* vals, size_t count,
                                int sparse, uint64_t seed, lsnf_matrix** out) {
  return guarded([&] {
    need(ring, "ring");
    need(out, "out");
    if (count && !vals) fail(ErrorCode::InvalidArgument, "vals is NULL");
    std::span<const unsigned> v(vals, count);
    Rng rng(seed);
    auto make = [&](const auto& r) {
      if (sparse) return planted_sparse(r, rows, cols, v, rng);
      const auto d = planted_dense(r, rows, cols, v, rng);
      TripletMatrix<std::decay_t<decltype(r)>> t(r, rows, cols);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          if (!r.is_zero(d(i, j))) t.add(i + 1, j + 1, d(i, j));
      return t;
    };
    *out = std::visit(
        [&](const auto& r) -> lsnf_matrix* {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PrimeField>) {
            const auto local = make(LocalIntRing(r.characteristic(), 1));
            TripletMatrix<PrimeField> t(r, rows, cols);
            for (const auto& e : local.entries()) t.add(e.row, e.col, e.value);
            return new lsnf_matrix{std::move(t)};
          } else {
            return new lsnf_matrix{make(r)};
          }
        },
        ring->ring);
  });
}

void lsnf_matrix_free(lsnf_matrix* m) { delete m; }

size_t lsnf_matrix_rows(const lsnf_matrix* m) {
  return m ? std::visit([](const auto& t) { return t.rows(); }, m->m) : 0;
}
size_t lsnf_matrix_cols(const lsnf_matrix* m) {
  return m ? std::visit([](const auto& t) { return t.cols(); }, m->m) : 0;
}
size_t lsnf_matrix_nnz(const lsnf_matrix* m) {
  return m ? std::visit([](const auto& t) { return t.nnz(); }, m->m) : 0;
}

lsnf_status lsnf_smith_fe(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto o = resolve(opts);
    auto res = std::make_unique<lsnf_result>();
    std::visit(
        [&](const auto& t) {
          using R = std::decay_t<decltype(t.ring())>;
          if constexpr (is_pq<R>) {
            SparseBlackBox<R> src(t);
            Rng rng(o.seed);
            SmithFeOptions fo;
            fo.rank.xi = o.xi;
            auto r = smith_fe(src, rng, fo);
            res->mult = r.multiplicities;
            res->rank = r.multiplicities.nonzero();
            res->has_bound = true;
            res->bound = r.failure_bound;
            res->matvecs = r.matvecs;
            res->eta = r.extension_degree;
          } else {
            fail(ErrorCode::Unsupported, "smith-fe needs a PQ ring");
          }
        },
        m->m);
    *out = res.release();
  });
}

lsnf_status lsnf_smith_pe(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto o = resolve(opts);
    auto res = std::make_unique<lsnf_result>();
    std::visit(
        [&](const auto& t) {
          using R = std::decay_t<decltype(t.ring())>;
          if constexpr (std::is_same_v<R, PrimeField>) {
            run_smith_pe(as_local(t), o, *res);
            res->mult.ring = t.ring().describe();
          } else if constexpr (is_pq<R>) {
            fail(ErrorCode::Unsupported, "smith-pe needs a Zp, Zpe or GR ring; use smith-fe for PQ");
          } else {
            run_smith_pe(t, o, *res);
          }
        },
        m->m);
    *out = res.release();
  });
}

lsnf_status lsnf_dense_smith(const lsnf_matrix* m, lsnf_result** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    auto res = std::make_unique<lsnf_result>();
    std::visit(
        [&](const auto& t) {
          using R = std::decay_t<decltype(t.ring())>;
          if constexpr (std::is_same_v<R, PrimeField>) {
            res->mult = dense_smith_local(as_local(t).to_dense());
            res->mult.ring = t.ring().describe();
          } else {
            res->mult = dense_smith_local(t.to_dense());
          }
        },
        m->m);
    res->rank = res->mult.nonzero();
    *out = res.release();
  });
}

lsnf_status lsnf_rank(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto o = resolve(opts);
    const auto* t = std::get_if<TripletMatrix<PrimeField>>(&m->m);
    if (!t) fail(ErrorCode::Unsupported, "rank needs a Zp ring");
    SparseBlackBox<PrimeField> src(*t);
    Rng rng(o.seed);
    RankOptions ro;
    ro.xi = o.xi;
    auto r = rank_blackbox(src.op(), rng, ro);
    auto res = std::make_unique<lsnf_result>();
    res->rank = r.rank;
    res->mult.ring = t->ring().describe();
    res->has_bound = true;
    res->bound = r.failure_bound;
    res->matvecs = src.counter()->value();
    res->eta = r.extension_degree;
    *out = res.release();
  });
}

lsnf_status lsnf_verify(const lsnf_matrix* a, const lsnf_matrix* p, const lsnf_matrix* q, const lsnf_options* opts,
                        lsnf_result** out) {
  return guarded([&] {
    need(a, "matrix");
    need(out, "out");
    const auto o = resolve(opts);
    auto res = std::make_unique<lsnf_result>();
    std::visit(
        [&](const auto& t) {
          using R = std::decay_t<decltype(t.ring())>;
          if constexpr (std::is_same_v<R, LocalIntRing> || std::is_same_v<R, GaloisRing>) {
            run_verify(t, p, q, o, *res);
          } else {
            fail(ErrorCode::Unsupported, "verify needs a Zpe or GR ring");
          }
        },
        a->m);
    *out = res.release();
  });
}

void lsnf_result_free(lsnf_result* r) { delete r; }
unsigned lsnf_result_exponent(const lsnf_result* r) { return r ? r->mult.exponent() : 0; }
size_t lsnf_result_count(const lsnf_result* r, unsigned i) {
  return r && i < r->mult.counts.size() ? r->mult.counts[i] : 0;
}
size_t lsnf_result_zeros(const lsnf_result* r) { return r ? r->mult.zeros : 0; }
size_t lsnf_result_rank(const lsnf_result* r) { return r ? r->rank : 0; }
int lsnf_result_verified(const lsnf_result* r) { return r ? r->verified : -1; }
int lsnf_result_has_failure_bound(const lsnf_result* r) { return r && r->has_bound; }
double lsnf_result_failure_bound(const lsnf_result* r) { return r && r->has_bound ? r->bound : 0.0; }
uint64_t lsnf_result_matvecs(const lsnf_result* r) { return r ? r->matvecs : 0; }
size_t lsnf_result_ell(const lsnf_result* r) { return r ? r->ell : 0; }
size_t lsnf_result_r0(const lsnf_result* r) { return r ? r->r0 : 0; }
size_t lsnf_result_k(const lsnf_result* r) { return r ? r->k : 0; }
unsigned lsnf_result_eta(const lsnf_result* r) { return r ? r->eta : 0; }
size_t lsnf_result_storage_peak(const lsnf_result* r) { return r ? r->storage_peak : 0; }

lsnf_status lsnf_carries(uint64_t p, size_t n, size_t r, int digits, unsigned trials, uint64_t seed, char** jsonl,
                         size_t* violations) {
  return guarded([&] {
    need(jsonl, "jsonl");
    CarryConfig cfg;
    cfg.p = p;
    cfg.n = n;
    cfg.r = r;
    if (digits >= 0) cfg.digits = static_cast<unsigned>(digits);
    cfg.trials = trials;
    cfg.seed = seed;
    auto rep = run_carry_experiment(cfg);
    *jsonl = dup(to_jsonl(rep));
    if (violations) *violations = rep.violation_count();
  });
}

}  // extern "C"
