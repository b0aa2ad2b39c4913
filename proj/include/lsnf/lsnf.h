#ifndef LSNF_H
#define LSNF_H

/* C interface to the local Smith form library. All objects are opaque
 * handles released with the matching *_free function. Functions return
 * LSNF_OK or an error code; lsnf_last_error() describes the most recent
 * failure on the calling thread. Strings returned through char** are
 * owned by the caller and released with lsnf_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LSNF_API __declspec(dllexport)
#else
#define LSNF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LSNF_OK = 0,
  LSNF_E_INVALID_ARGUMENT = 1,
  LSNF_E_PARSE = 2,
  LSNF_E_RING_MISMATCH = 3,
  LSNF_E_DIMENSION_MISMATCH = 4,
  LSNF_E_NON_UNIT = 5,
  LSNF_E_INCONSISTENT_PROFILE = 6,
  LSNF_E_RETRIES_EXHAUSTED = 7,
  LSNF_E_INSUFFICIENT_BOUND = 8,
  LSNF_E_INSUFFICIENT_NULLITY = 9,
  LSNF_E_UNSUPPORTED = 10,
  LSNF_E_INTERNAL = 11,
  LSNF_E_IO = 12
} lsnf_status;

typedef enum { LSNF_MODE_HEURISTIC = 0, LSNF_MODE_PROVABLE = 1 } lsnf_mode;

typedef struct lsnf_ring lsnf_ring;
typedef struct lsnf_matrix lsnf_matrix;
typedef struct lsnf_result lsnf_result;

typedef struct {
  double xi;              /* failure parameter, default 100 */
  size_t ell;             /* reduced dimension; 0 = rank mod p + slack */
  size_t slack;           /* default 8 */
  unsigned c;             /* verification projections, default 21; 0 skips */
  lsnf_mode mode;         /* default heuristic */
  uint64_t seed;          /* default 1 */
  unsigned galois_degree; /* heuristic working ring over Z/p^e; 0 = automatic */
} lsnf_options;

LSNF_API const char* lsnf_version(void);
LSNF_API const char* lsnf_last_error(void);
LSNF_API const char* lsnf_status_name(lsnf_status status);
LSNF_API void lsnf_string_free(char* s);
LSNF_API void lsnf_options_default(lsnf_options* opts);

/* Rings: Zp:<p>, Zpe:<p>^<e>, GR:<p>^<e>:<eta>, PQ:<p>[:<m>]:<f>^<e>. */
LSNF_API lsnf_status lsnf_ring_parse(const char* descriptor, lsnf_ring** out);
LSNF_API void lsnf_ring_free(lsnf_ring* ring);
LSNF_API lsnf_status lsnf_ring_describe(const lsnf_ring* ring, char** out);
LSNF_API unsigned lsnf_ring_exponent(const lsnf_ring* ring);

/* Sparse matrices in SMS triplet form. */
LSNF_API lsnf_status lsnf_matrix_read_sms(const lsnf_ring* ring, const char* path, lsnf_matrix** out);
LSNF_API lsnf_status lsnf_matrix_parse_sms(const lsnf_ring* ring, const char* text, lsnf_matrix** out);
LSNF_API lsnf_status lsnf_matrix_to_sms(const lsnf_matrix* m, char** out);
/* U S V with S = diag(pi^vals[0], ..., pi^vals[count-1], 0, ...); values
 * >= e give zeros. sparse != 0 builds a sparse instance. */
LSNF_API lsnf_status lsnf_matrix_planted(const lsnf_ring* ring, size_t rows, size_t cols, const unsigned* vals,
                                         size_t count, int sparse, uint64_t seed, lsnf_matrix** out);
LSNF_API void lsnf_matrix_free(lsnf_matrix* m);
LSNF_API size_t lsnf_matrix_rows(const lsnf_matrix* m);
LSNF_API size_t lsnf_matrix_cols(const lsnf_matrix* m);
LSNF_API size_t lsnf_matrix_nnz(const lsnf_matrix* m);

/* Smith forms. smith_fe needs a PQ ring; smith_pe accepts Zp, Zpe, GR;
 * dense_smith accepts every ring kind. */
LSNF_API lsnf_status lsnf_smith_fe(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out);
LSNF_API lsnf_status lsnf_smith_pe(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out);
LSNF_API lsnf_status lsnf_dense_smith(const lsnf_matrix* m, lsnf_result** out);
/* Rank over Zp by black-box methods. */
LSNF_API lsnf_status lsnf_rank(const lsnf_matrix* m, const lsnf_options* opts, lsnf_result** out);
/* Projection verification of A with P (l x m) and Q (n x l); when p and q
 * are NULL, preconditioners are drawn per opts (ell must be set). The
 * multiplicities of the result are those of P A Q. */
LSNF_API lsnf_status lsnf_verify(const lsnf_matrix* a, const lsnf_matrix* p, const lsnf_matrix* q,
                                 const lsnf_options* opts, lsnf_result** out);

LSNF_API void lsnf_result_free(lsnf_result* r);
LSNF_API unsigned lsnf_result_exponent(const lsnf_result* r);
/* Multiplicity of pi^i for i < exponent. */
LSNF_API size_t lsnf_result_count(const lsnf_result* r, unsigned i);
LSNF_API size_t lsnf_result_zeros(const lsnf_result* r);
LSNF_API size_t lsnf_result_rank(const lsnf_result* r);
/* -1 when not verified at all, else 0 or 1. */
LSNF_API int lsnf_result_verified(const lsnf_result* r);
/* 0 when the answer is deterministic. */
LSNF_API int lsnf_result_has_failure_bound(const lsnf_result* r);
LSNF_API double lsnf_result_failure_bound(const lsnf_result* r);
LSNF_API uint64_t lsnf_result_matvecs(const lsnf_result* r);
/* Reduced dimension, unit invariants of the reduced matrix, its kernel
 * dimension, Galois degree and peak auxiliary storage (smith_pe only). */
LSNF_API size_t lsnf_result_ell(const lsnf_result* r);
LSNF_API size_t lsnf_result_r0(const lsnf_result* r);
LSNF_API size_t lsnf_result_k(const lsnf_result* r);
LSNF_API unsigned lsnf_result_eta(const lsnf_result* r);
LSNF_API size_t lsnf_result_storage_peak(const lsnf_result* r);

/* Carry-rank experiment as JSON lines; digits < 0 uses the safe default. */
LSNF_API lsnf_status lsnf_carries(uint64_t p, size_t n, size_t r, int digits, unsigned trials, uint64_t seed,
                                  char** jsonl, size_t* violations);

#ifdef __cplusplus
}
#endif

#endif
