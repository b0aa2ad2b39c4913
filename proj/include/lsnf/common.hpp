#pragma once

// Shared vocabulary: error codes, word-size modular helpers, seeded RNG.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lsnf {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

enum class ErrorCode {
  InvalidArgument,
  Parse,
  RingMismatch,
  DimensionMismatch,
  NonUnit,
  InconsistentProfile,
  RetriesExhausted,
  InsufficientBound,
  InsufficientNullity,
  Unsupported,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  if (m <= 0xffffffffULL) return (a * b) % m;
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  if (s < a || s >= m) s -= m;
  return s;
}

inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

u64 powmod(u64 base, u64 exp, u64 m);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(u64 n);

/// p^e, or 0 when the result does not fit in 64 bits.
u64 checked_pow(u64 p, unsigned e);

/// Smallest k >= 0 with base^k >= x.
unsigned ceil_log(u64 base, long double x);

/// p-adic valuation of a nonzero word.
unsigned word_valuation(u64 x, u64 p);

u64 splitmix64(u64 x);

/// Seeded 64-bit generator. Child streams are derived as
/// splitmix64(parent draw), which keeps whole runs reproducible from the
/// root seed.
class Rng {
 public:
  explicit Rng(u64 seed) : engine_(splitmix64(seed)) {}

  u64 next() { return engine_(); }

  /// Uniform in [0, bound).
  u64 below(u64 bound) {
    if (bound <= 1) return 0;
    return std::uniform_int_distribution<u64>(0, bound - 1)(engine_);
  }

  Rng split() { return Rng(splitmix64(next())); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lsnf
