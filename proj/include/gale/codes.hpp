#pragma once

#include <utility>

#include "gale/bitstring.hpp"
#include "gale/numeric.hpp"

namespace gale {

// Standard enumeration of binary strings, ordered by length then
// lexicographically: sigma(0) = "", sigma(1) = "0", sigma(2) = "1",
// sigma(3) = "00", ... Computed as the binary representation of n+1 with the
// leading 1 removed.
BitString sigma(const Integer& n);
Integer sigma_inverse(const BitString& w);

// e0(w) = 0^|w| 1 w
BitString e0(const BitString& w);

// Self-delimiting code enc(w) = e0(sigma(|w|)) w; for naturals,
// enc(n) = enc(sigma(n)). Codewords can be prepended to arbitrary bits and
// uniquely decoded.
BitString enc_string(const BitString& w);
BitString enc_nat(const Integer& n);

// Exact left inverse of enc_string. Consumes exactly one codeword from the
// cursor; throws MalformedCode when the zero run never terminates or the
// payload is truncated.
BitString dec(BitCursor& reader);

// Convenience for tests: decode plus the number of bits consumed.
std::pair<BitString, std::uint64_t> dec_with_consumed(const BitString& data);

}  // namespace gale
