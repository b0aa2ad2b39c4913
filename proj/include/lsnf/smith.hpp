#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace lsnf {

/// Multiplicities of the Smith invariants over a local ring with maximal
/// ideal generated by pi (= p or f): counts[i] copies of pi^i for
/// 0 <= i < e, and `zeros` copies of 0.
struct SmithMultiplicities {
  std::string ring;
  std::vector<std::size_t> counts;
  std::size_t zeros = 0;

  unsigned exponent() const { return static_cast<unsigned>(counts.size()); }
  std::size_t nonzero() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
  std::size_t total() const { return nonzero() + zeros; }

  /// Invariant valuations in ascending order, zeros encoded as e.
  std::vector<unsigned> valuations() const {
    std::vector<unsigned> out;
    for (unsigned i = 0; i < counts.size(); ++i) out.insert(out.end(), counts[i], i);
    out.insert(out.end(), zeros, exponent());
    return out;
  }

  static SmithMultiplicities from_valuations(std::string ring, unsigned e, std::span<const unsigned> vals) {
    SmithMultiplicities s{std::move(ring), std::vector<std::size_t>(e, 0), 0};
    for (unsigned v : vals) {
      if (v >= e) ++s.zeros;
      else ++s.counts[v];
    }
    return s;
  }

  bool operator==(const SmithMultiplicities& o) const { return counts == o.counts && zeros == o.zeros; }
};

std::string to_string(const SmithMultiplicities& s);

}  // namespace lsnf
