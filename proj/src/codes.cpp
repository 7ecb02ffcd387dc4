#include "gale/codes.hpp"

#include <algorithm>

namespace gale {

BitString sigma(const Integer& n) {
    if (sgn(n) < 0) throw ParameterOutOfRange("sigma of negative index");
    Integer m = n + 1;
    std::size_t len = mpz_sizeinbase(m.get_mpz_t(), 2);
    BitString w;
    // Bits of n+1 below the leading 1, most significant first.
    for (std::size_t i = len - 1; i-- > 0;)
        w.push_back(mpz_tstbit(m.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0);
    return w;
}

Integer sigma_inverse(const BitString& w) {
    // n + 1 = 1·w read as binary
    Integer m = 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
        mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), 1);
        if (w[i]) m += 1;
    }
    return m - 1;
}

BitString e0(const BitString& w) {
    BitString out;
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back(false);
#ifdef GALE_FAULT_INJECT_ENC
    out.push_back(false);  // corrupted terminator, used to prove selftest has teeth
#else
    out.push_back(true);
#endif
    out.append(w);
    return out;
}

BitString enc_string(const BitString& w) {
    BitString out = e0(sigma(static_cast<unsigned long>(w.size())));
    out.append(w);
    return out;
}

BitString enc_nat(const Integer& n) { return enc_string(sigma(n)); }

BitString dec(BitCursor& reader) {
    // Zero run, then the terminating 1, gives |sigma(|w|)|.
    std::uint64_t zeros = 0;
    while (!reader.next()) ++zeros;
    BitString len_code;
    for (std::uint64_t i = 0; i < zeros; ++i) len_code.push_back(reader.next());
    Integer len = sigma_inverse(len_code);
    if (!len.fits_ulong_p()) throw MalformedCode("declared payload length is absurd");
    unsigned long n = len.get_ui();
    BitString w;
    for (unsigned long i = 0; i < n; ++i) w.push_back(reader.next());
    return w;
}

std::pair<BitString, std::uint64_t> dec_with_consumed(const BitString& data) {
    BitReader reader(data);
    BitString w = dec(reader);
    return {std::move(w), reader.consumed()};
}

}  // namespace gale
