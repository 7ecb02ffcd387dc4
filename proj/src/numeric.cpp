#include "gale/numeric.hpp"

#include <cmath>
#include <cstdlib>

namespace gale {

Rational make_rational(const Integer& num, const Integer& den) {
    if (sgn(den) == 0) throw ParameterOutOfRange("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational make_rational(long num, long den) {
    return make_rational(Integer(num), Integer(den));
}

long floor_log2(const Rational& r) {
    if (sgn(r) <= 0) throw NonPositiveInput("floor_log2 of non-positive value");
    const Integer& num = r.get_num();
    const Integer& den = r.get_den();
    // num in [2^(a-1), 2^a), den in [2^(b-1), 2^b)  =>  e is a-b or a-b-1.
    long a = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
    long b = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
    long e = a - b;
    // r >= 2^e  <=>  num >= den << e
    if (cmp_mul2exp(num, den, e) >= 0) return e;
    return e - 1;
}

int cmp_mul2exp(const Integer& x, const Integer& y, long e) {
    constexpr long kShiftCap = 1L << 31;
    if (e > kShiftCap || e < -kShiftCap)
        throw ParameterOutOfRange("power-of-two shift out of supported range");
    Integer lhs = x;
    Integer rhs = y;
    if (e >= 0) {
        mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    } else {
        mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return cmp(lhs, rhs);
}

int cmp_product(const Rational& a, const Rational& b, const Rational& c) {
    // a*b vs c  <=>  a.num*b.num*c.den vs a.den*b.den*c.num  (dens > 0)
    Integer lhs = a.get_num() * b.get_num() * c.get_den();
    Integer rhs = a.get_den() * b.get_den() * c.get_num();
    return cmp(lhs, rhs);
}

Rational pow2_rational(long e) {
    Integer one = 1;
    Integer p;
    mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(e >= 0 ? e : -e));
    return e >= 0 ? Rational(p) : make_rational(one, p);
}

double to_double(const Rational& r) { return r.get_d(); }

double log2_rational(const Rational& r) {
    if (sgn(r) <= 0) throw NonPositiveInput("log2 of non-positive value");
    long exp_num = 0;
    long exp_den = 0;
    double mant_num = mpz_get_d_2exp(&exp_num, r.get_num().get_mpz_t());
    double mant_den = mpz_get_d_2exp(&exp_den, r.get_den().get_mpz_t());
    return (std::log2(mant_num) + static_cast<double>(exp_num)) -
           (std::log2(mant_den) + static_cast<double>(exp_den));
}

}  // namespace gale
