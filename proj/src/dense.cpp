#include "lsnf/dense.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace lsnf {

using boost::multiprecision::cpp_int;

std::string to_string(const SmithMultiplicities& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    out += (i == 0 ? "1" : "pi^" + std::to_string(i)) + ":" + std::to_string(s.counts[i]) + ", ";
  }
  return out + "0:" + std::to_string(s.zeros) + "}";
}

namespace detail {

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

namespace {
struct IntOps {
  cpp_int zero() const { return 0; }
  cpp_int add(const cpp_int& a, const cpp_int& b) const { return a + b; }
  cpp_int sub(const cpp_int& a, const cpp_int& b) const { return a - b; }
  cpp_int mul(const cpp_int& a, const cpp_int& b) const { return a * b; }
};
}  // namespace

}  // namespace detail

std::vector<std::optional<unsigned>> determinantal_divisor_valuations(const DenseMatrix<LocalIntRing>& m,
                                                                      std::size_t kmax) {
  const u64 p = m.ring().prime();
  auto entry = [&](std::size_t i, std::size_t j) { return cpp_int(m(i, j)); };
  auto valuation = [&](cpp_int a) -> std::optional<unsigned> {
    if (a == 0) return std::nullopt;
    unsigned v = 0;
    while (a % p == 0) {
      a /= p;
      ++v;
    }
    return v;
  };
  return detail::divisor_scan<cpp_int>(m.rows(), m.cols(), kmax,
                                       std::function<cpp_int(std::size_t, std::size_t)>(entry), detail::IntOps{},
                                       valuation);
}

std::vector<unsigned> invariants_from_divisors(std::span<const std::optional<unsigned>> v, unsigned e) {
  std::vector<unsigned> s;
  unsigned prev = 0;
  bool vanished = false;
  for (const auto& vk : v) {
    if (vanished || !vk) {
      vanished = true;
      s.push_back(e);
      continue;
    }
    s.push_back(std::min(e, *vk - prev));
    prev = *vk;
  }
  return s;
}

}  // namespace lsnf
