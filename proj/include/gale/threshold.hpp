#pragma once

#include <cstdint>
#include <utility>

#include "gale/bitstring.hpp"
#include "gale/numeric.hpp"

namespace gale {

// Positive dyadic rational mantissa·2^exponent in canonical form: mantissa
// odd and positive, trailing zeros folded into the exponent.
struct Dyadic {
    Integer mantissa;
    Integer exponent;

    Rational to_rational() const;
    // Canonicalize an arbitrary positive m·2^e.
    static Dyadic normalized(Integer m, Integer e);

    bool operator==(const Dyadic& other) const {
        return mantissa == other.mantissa && exponent == other.exponent;
    }
};

// Exact comparison of a rational against a dyadic.
int cmp_dyadic(const Rational& r, const Dyadic& d);
// Exact comparison of a*b (rationals) against a dyadic; avoids materializing
// the product in canonical form.
int cmp_product_dyadic(const Rational& a, const Rational& b, const Dyadic& d);

// Slack used at approximation index i: 1/2 for i <= 1, 1/i^2 for i >= 2.
Rational approximation_slack(std::uint64_t i);

// Approximate r > 0 from below by a dyadic d with r > d >= r·(1 - slack(i))
// and mantissa bit length at most 1 + ceil(log2(1/slack(i))). Keeps the
// leading significant bits of r, truncating toward zero; when the truncation
// equals r exactly, one unit in the last kept place is subtracted.
Dyadic approximate_below(const Rational& r, std::uint64_t i);

// enc(zigzag(exponent)) followed by enc(mantissa - 1), with zigzag(e) = 2e
// for e >= 0 and -2e-1 for e < 0. Self-delimiting.
BitString encode_threshold(const Dyadic& d);

// Exact inverse of encode_threshold. Rejects non-canonical mantissas and
// exponents beyond the supported magnitude (2^24) as malformed.
Dyadic decode_threshold(BitCursor& reader);

std::pair<Dyadic, std::uint64_t> decode_threshold_with_consumed(const BitString& data);

}  // namespace gale
