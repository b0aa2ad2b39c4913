#pragma once

// Textual ring descriptors: Zp:<p>, Zpe:<p>^<e>, GR:<p>^<e>:<eta>,
// PQ:<p>[:<m>]:<f coefficients, low to high>^<e>.

#include <string_view>
#include <variant>

#include "lsnf/rings.hpp"

namespace lsnf {

using AnyRing = std::variant<PrimeField, LocalIntRing, GaloisRing, PolyQuotRing<PrimeField>, PolyQuotRing<GFq>>;

/// GF(p^m) with the first irreducible modulus in base-p counter order.
GFq standard_gf(u64 p, unsigned m);

AnyRing parse_ring(std::string_view text);

std::string describe(const AnyRing& ring);

}  // namespace lsnf
