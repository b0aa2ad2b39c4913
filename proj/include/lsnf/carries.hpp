#pragma once

// Carry-rank experiments: M = U S V over the integers with U, V invertible
// mod p and S = diag(1 x r, 0), expanded as M = sum_i M_i p^i, and the
// ranks of the digit matrices M_i over Z_p.

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lsnf/dense.hpp"

namespace lsnf {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<BigInt>>;

/// s + 1 digit matrices with M = sum_i M_i p^i; entries must be
/// nonnegative and below p^(s+1).
std::vector<DenseMatrix<PrimeField>> padic_digits(const IntMatrix& m, u64 p, unsigned s);

/// binom(r, 2^i) for p = 2 and i >= 1; for p = 2k+1 and i = 1,
/// sum_{j=0..k} binom(r+2j, 2j+1) + binom(r+2k-1, 2k) - 2r. Empty otherwise.
std::optional<BigInt> conjectured_bound(u64 p, unsigned r, unsigned i);

/// Highest digit index that can be nonzero given entries <= n (p-1)^2 r.
unsigned carry_digits(u64 p, std::size_t n, std::size_t r);

struct CarryConfig {
  u64 p = 2;
  std::size_t n = 60;
  std::size_t r = 4;
  std::optional<unsigned> digits;  // s; defaults to carry_digits
  unsigned trials = 50;
  u64 seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CarryTrial {
  unsigned trial = 0;
  std::vector<std::size_t> digit_ranks;
  std::vector<std::optional<BigInt>> bounds;
  std::vector<unsigned> violations;  // digits whose rank exceeds min(bound, n)
  std::vector<unsigned> equalities;  // digits whose rank equals min(bound, n)
  bool reassembled = false;          // sum_i M_i p^i == M
};

struct CarryReport {
  CarryConfig config;
  unsigned digits = 0;
  std::vector<CarryTrial> trials;
  /// Per digit: fraction of trials meeting the bound with equality; empty
  /// where no bound is defined.
  std::vector<std::optional<double>> equality_frequency;
  std::size_t violation_count() const;
};

CarryReport run_carry_experiment(const CarryConfig& cfg);

/// One JSON object per trial: trial, p, n, r, digit_ranks, bounds, violations.
std::string to_jsonl(const CarryReport& report);

}  // namespace lsnf
