#include "gale/threshold.hpp"

#include "gale/codes.hpp"

namespace gale {

namespace {

constexpr long kExponentCap = 1L << 24;

long exponent_to_long(const Integer& e) {
    if (!e.fits_slong_p()) throw ParameterOutOfRange("dyadic exponent out of range");
    return e.get_si();
}

// ceil(log2(x)) for x >= 1
unsigned long ceil_log2(const Integer& x) {
    if (cmp(x, Integer(1)) <= 0) return 0;
    Integer y = x - 1;
    return mpz_sizeinbase(y.get_mpz_t(), 2);
}

}  // namespace

Rational Dyadic::to_rational() const {
    long e = exponent_to_long(exponent);
    return Rational(mantissa) * pow2_rational(e);
}

Dyadic Dyadic::normalized(Integer m, Integer e) {
    if (sgn(m) <= 0) throw NonPositiveInput("dyadic mantissa must be positive");
    mp_bitcnt_t twos = mpz_scan1(m.get_mpz_t(), 0);
    if (twos > 0) {
        mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), twos);
        e += static_cast<unsigned long>(twos);
    }
    return Dyadic{std::move(m), std::move(e)};
}

int cmp_dyadic(const Rational& r, const Dyadic& d) {
    return cmp_mul2exp(r.get_num(), r.get_den() * d.mantissa, exponent_to_long(d.exponent));
}

int cmp_product_dyadic(const Rational& a, const Rational& b, const Dyadic& d) {
    return cmp_mul2exp(a.get_num() * b.get_num(), a.get_den() * b.get_den() * d.mantissa,
                       exponent_to_long(d.exponent));
}

Rational approximation_slack(std::uint64_t i) {
    if (i <= 1) return make_rational(1, 2);
    Integer sq = Integer(static_cast<unsigned long>(i));
    sq *= sq;
    return make_rational(Integer(1), sq);
}

Dyadic approximate_below(const Rational& r, std::uint64_t i) {
    if (sgn(r) <= 0) throw NonPositiveInput("can only approximate positive values");
    // Number of leading significant bits to keep.
    unsigned long g;
    if (i <= 1) {
        g = 2;
    } else {
        Integer sq = Integer(static_cast<unsigned long>(i));
        sq *= sq;
        g = 1 + ceil_log2(sq);
    }

    long e = floor_log2(r);
    long ulp_exp = e - static_cast<long>(g) + 1;

    // kept = floor(r / 2^ulp_exp), remainder tells whether the cut was exact.
    Integer num = r.get_num();
    Integer den = r.get_den();
    if (ulp_exp >= 0) {
        mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(ulp_exp));
    } else {
        mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(-ulp_exp));
    }
    Integer kept, rem;
    mpz_fdiv_qr(kept.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (sgn(rem) == 0) kept -= 1;  // truncation hit r exactly; step one ulp down

    return Dyadic::normalized(std::move(kept), Integer(ulp_exp));
}

BitString encode_threshold(const Dyadic& d) {
    Integer zz;
    if (sgn(d.exponent) >= 0) {
        zz = 2 * d.exponent;
    } else {
        zz = -2 * d.exponent - 1;
    }
    BitString out = enc_nat(zz);
    out.append(enc_nat(d.mantissa - 1));
    return out;
}

Dyadic decode_threshold(BitCursor& reader) {
    Integer zz = sigma_inverse(dec(reader));
    Integer e;
    if (mpz_tstbit(zz.get_mpz_t(), 0) == 0) {
        e = zz / 2;
    } else {
        e = -((zz + 1) / 2);
    }
    if (!e.fits_slong_p() || e.get_si() > kExponentCap || e.get_si() < -kExponentCap)
        throw MalformedCode("threshold exponent out of supported range");
    Integer m = sigma_inverse(dec(reader)) + 1;
    if (mpz_tstbit(m.get_mpz_t(), 0) == 0)
        throw MalformedCode("non-canonical threshold mantissa");
    return Dyadic{std::move(m), std::move(e)};
}

std::pair<Dyadic, std::uint64_t> decode_threshold_with_consumed(const BitString& data) {
    BitReader reader(data);
    Dyadic d = decode_threshold(reader);
    return {std::move(d), reader.consumed()};
}

}  // namespace gale
