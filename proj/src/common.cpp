#include "lsnf/common.hpp"

#include <cmath>

namespace lsnf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::RingMismatch: return "RingMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonUnit: return "NonUnit";
    case ErrorCode::InconsistentProfile: return "InconsistentProfile";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::InsufficientBound: return "InsufficientBound";
    case ErrorCode::InsufficientNullity: return "InsufficientNullity";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 q : kSmall) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : kSmall) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 checked_pow(u64 p, unsigned e) {
  u128 acc = 1;
  for (unsigned i = 0; i < e; ++i) {
    acc *= p;
    if (acc >> 64) return 0;
  }
  return static_cast<u64>(acc);
}

unsigned ceil_log(u64 base, long double x) {
  unsigned k = 0;
  long double acc = 1.0L;
  while (acc < x) {
    acc *= static_cast<long double>(base);
    ++k;
  }
  return k;
}

unsigned word_valuation(u64 x, u64 p) {
  unsigned v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace lsnf
