#include "lsnf/carries.hpp"

#include <algorithm>
#include <thread>

#include "json.hpp"

namespace lsnf {

namespace {

BigInt binom(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt b = 1;
  for (unsigned i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

DenseMatrix<PrimeField> random_invertible(const PrimeField& f, std::size_t n, Rng& rng) {
  for (;;) {
    auto m = DenseMatrix<PrimeField>::random(f, n, n, rng);
    if (dense_rank(m) == n) return m;
  }
}

CarryTrial run_trial(const CarryConfig& cfg, unsigned s, unsigned t) {
  const PrimeField f(cfg.p);
  const std::size_t n = cfg.n, r = cfg.r;
  Rng rng(splitmix64(cfg.seed ^ splitmix64(t + 1)));
  const auto u = random_invertible(f, n, rng);
  const auto v = random_invertible(f, n, rng);
  IntMatrix m(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      BigInt acc = 0;
      for (std::size_t k = 0; k < r; ++k) acc += BigInt(u(i, k)) * v(k, j);
      m[i][j] = acc;
    }
  auto digits = padic_digits(m, cfg.p, s);

  CarryTrial out;
  out.trial = t;
  out.reassembled = true;
  for (std::size_t i = 0; i < n && out.reassembled; ++i)
    for (std::size_t j = 0; j < n && out.reassembled; ++j) {
      BigInt acc = 0;
      for (unsigned d = s + 1; d-- > 0;) acc = acc * cfg.p + digits[d](i, j);
      out.reassembled = acc == m[i][j];
    }
  for (unsigned d = 0; d <= s; ++d) {
    const std::size_t rank = dense_rank(digits[d]);
    out.digit_ranks.push_back(rank);
    auto bound = d == 0 ? std::nullopt : conjectured_bound(cfg.p, static_cast<unsigned>(r), d);
    if (bound) {
      const BigInt cap = std::min<BigInt>(*bound, BigInt(n));
      if (BigInt(rank) > cap) out.violations.push_back(d);
      if (BigInt(rank) == cap) out.equalities.push_back(d);
    }
    out.bounds.push_back(std::move(bound));
  }
  return out;
}

}  // namespace

std::vector<DenseMatrix<PrimeField>> padic_digits(const IntMatrix& m, u64 p, unsigned s) {
  const PrimeField f(p);
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<DenseMatrix<PrimeField>> out(s + 1, DenseMatrix<PrimeField>(f, rows, cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      BigInt x = m[i][j];
      if (x < 0) fail(ErrorCode::InvalidArgument, "padic_digits needs nonnegative entries");
      for (unsigned d = 0; d <= s; ++d) {
        out[d](i, j) = static_cast<u64>(x % p);
        x /= p;
      }
      if (x != 0) fail(ErrorCode::InvalidArgument, "entry has more than s+1 digits");
    }
  return out;
}

std::optional<BigInt> conjectured_bound(u64 p, unsigned r, unsigned i) {
  if (p == 2) {
    if (i == 0) return std::nullopt;
    if (i >= 32 || (u64{1} << i) > r) return BigInt(0);
    return binom(r, 1u << i);
  }
  if (i != 1) return std::nullopt;
  const unsigned k = static_cast<unsigned>((p - 1) / 2);
  BigInt b = 0;
  for (unsigned j = 0; j <= k; ++j) b += binom(r + 2 * j, 2 * j + 1);
  b += binom(r + 2 * k - 1, 2 * k);
  return b - 2 * BigInt(r);
}

unsigned carry_digits(u64 p, std::size_t n, std::size_t r) {
  BigInt bound = BigInt(n) * (p - 1) * (p - 1) * r;
  unsigned s = 0;
  while (bound >= p) {
    bound /= p;
    ++s;
  }
  return s;
}

std::size_t CarryReport::violation_count() const {
  std::size_t c = 0;
  for (const auto& t : trials) c += t.violations.size();
  return c;
}

CarryReport run_carry_experiment(const CarryConfig& cfg) {
  if (!is_prime(cfg.p)) fail(ErrorCode::InvalidArgument, "p must be prime");
  if (cfg.r > cfg.n) fail(ErrorCode::InvalidArgument, "r must not exceed n");
  CarryReport rep;
  rep.config = cfg;
  rep.digits = cfg.digits.value_or(carry_digits(cfg.p, cfg.n, cfg.r));
  rep.trials.resize(cfg.trials);
  const unsigned hw = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min(hw, std::max(1u, cfg.trials));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (unsigned t = w; t < cfg.trials; t += workers) rep.trials[t] = run_trial(cfg, rep.digits, t);
      });
  }
  rep.equality_frequency.assign(rep.digits + 1, std::nullopt);
  for (unsigned d = 0; d <= rep.digits && cfg.trials > 0; ++d) {
    if (!rep.trials[0].bounds[d]) continue;
    std::size_t eq = 0;
    for (const auto& t : rep.trials) eq += std::count(t.equalities.begin(), t.equalities.end(), d);
    rep.equality_frequency[d] = static_cast<double>(eq) / cfg.trials;
  }
  return rep;
}

std::string to_jsonl(const CarryReport& report) {
  std::string out;
  for (const auto& t : report.trials) {
    nlohmann::ordered_json j;
    j["trial"] = t.trial;
    j["p"] = report.config.p;
    j["n"] = report.config.n;
    j["r"] = report.config.r;
    j["digit_ranks"] = t.digit_ranks;
    auto bounds = nlohmann::ordered_json::array();
    for (const auto& b : t.bounds) {
      if (!b) bounds.push_back(nullptr);
      else if (*b <= std::numeric_limits<u64>::max()) bounds.push_back(static_cast<u64>(*b));
      else bounds.push_back(b->str());
    }
    j["bounds"] = bounds;
    j["violations"] = t.violations;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace lsnf
