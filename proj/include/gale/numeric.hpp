#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "gale/errors.hpp"

namespace gale {

// Arbitrary-precision integer and exact rational. All capital arithmetic in
// the codec paths uses these; floating point is confined to diagnostics.
using Integer = mpz_class;
using Rational = mpq_class;

// num/den reduced to lowest terms, den > 0.
Rational make_rational(const Integer& num, const Integer& den);
Rational make_rational(long num, long den);

// floor(log2(r)) for r > 0: the unique e with 2^e <= r < 2^(e+1).
long floor_log2(const Rational& r);

// Compare x against y * 2^e without materializing huge shifts on both sides.
// Returns <0, 0, >0. |e| must fit in a bit count (guarded).
int cmp_mul2exp(const Integer& x, const Integer& y, long e);

// Compare a*b against c (all rationals) exactly.
int cmp_product(const Rational& a, const Rational& b, const Rational& c);

// 2^e as a rational, e possibly negative.
Rational pow2_rational(long e);

double to_double(const Rational& r);
// log2 of a positive rational as a double; robust to operands far beyond
// double range.
double log2_rational(const Rational& r);

// Deterministic 64-bit PRNG used for pinned pseudorandom data. The j-th
// output depends only on (seed, j), so streams are restartable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += kGamma);
        return mix(z);
    }

    // Output the PRNG would produce on its (index+1)-th call after seeding.
    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + (index + 1) * kGamma);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
};

}  // namespace gale
