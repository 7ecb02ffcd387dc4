#include "gale/selftest.hpp"

#include <functional>
#include <string>
#include <vector>

#include "gale/analysis.hpp"
#include "gale/codes.hpp"
#include "gale/container.hpp"
#include "gale/otm.hpp"
#include "gale/threshold.hpp"

namespace gale {

namespace {

// All strings of length up to max_len in enumeration order.
std::vector<BitString> strings_up_to(std::size_t max_len) {
    std::vector<BitString> all;
    Integer n = 0;
    while (true) {
        BitString w = sigma(n);
        if (w.size() > max_len) break;
        all.push_back(std::move(w));
        n += 1;
    }
    return all;
}

std::vector<ModelPtr> builtin_models() {
    return {uniform_model(), bernoulli_model(make_rational(1, 4)), kt_model(),
            mixture_model({kt_model(), bernoulli_model(make_rational(1, 4))},
                          {make_rational(1, 2), make_rational(1, 2)})};
}

bool check_codes() {
    for (const BitString& w : strings_up_to(10)) {
        auto [back, used] = dec_with_consumed(enc_string(w));
        if (back != w || used != enc_string(w).size()) return false;
    }
    auto small = strings_up_to(6);
    for (const BitString& x : small)
        for (const BitString& y : small)
            if (x != y && enc_string(x).is_prefix_of(enc_string(y))) return false;
    for (Integer n = 0; n <= 4096; n += 1)
        if (sigma_inverse(sigma(n)) != n) return false;
    for (const BitString& x : strings_up_to(10)) {
        std::size_t len = enc_string(x).size();
        if (x.size() <= 1) {
            if (len > 4) return false;
        } else {
            long excess = static_cast<long>(len) - static_cast<long>(x.size()) - 3;
            if (excess > 0 &&
                cmp_mul2exp(Integer(1) << excess, Integer(x.size() * x.size()), 0) > 0)
                return false;
        }
    }
    return true;
}

bool check_gale_laws() {
    for (const ModelPtr& m : builtin_models()) {
        for (std::uint64_t k = 0; k <= 8; ++k) {
            Rational sum = 0;
            Integer count = Integer(1) << k;
            for (Integer u = 0; u < count; ++u) {
                BitString bits;
                for (std::uint64_t j = 0; j < k; ++j)
                    bits.push_back(mpz_tstbit(u.get_mpz_t(), static_cast<mp_bitcnt_t>(k - 1 - j)));
                sum += m->value(bits);
            }
            if (cmp(sum, Rational(Integer(1) << k)) != 0) return false;
        }
        for (const BitString& w : strings_up_to(6)) {
            Rational here = m->value(w);
            BitString w0 = w, w1 = w;
            w0.push_back(false);
            w1.push_back(true);
            if (cmp(here * 2, m->value(w0) + m->value(w1)) != 0) return false;
            for (std::uint64_t t = 0; t <= 8; ++t) {
                Rational a = m->staged(w, t);
                Rational b = m->staged(w, t + 1);
                if (!(cmp(a, b) <= 0 && cmp(b, here) < 0)) return false;
            }
        }
    }
    return true;
}

bool check_thresholds() {
    Dyadic pinned = approximate_below(Rational(100), 3);
    if (!(pinned.mantissa == 3 && pinned.exponent == 5)) return false;
    SplitMix64 rng(0x5E1F7E57);
    for (int trial = 0; trial < 2000; ++trial) {
        std::uint64_t i = rng.next() % 30;
        Integer num = Integer(rng.next() % 0xFFFFF) + 1;
        Integer den = Integer(rng.next() % 0xFFFFF) + 1;
        long shift = static_cast<long>(rng.next() % 41) - 20;
        Rational r = make_rational(num, den) * pow2_rational(shift);
        Dyadic d = approximate_below(r, i);
        Rational dv = d.to_rational();
        if (!(cmp(dv, r) < 0 && cmp(dv, r * (Rational(1) - approximation_slack(i))) >= 0))
            return false;
        auto [back, used] = decode_threshold_with_consumed(encode_threshold(d));
        if (!(back == d && used == encode_threshold(d).size())) return false;
    }
    return true;
}

bool check_counting() {
    for (const ModelPtr& m : builtin_models()) {
        for (std::uint64_t k = 1; k <= 6; ++k) {
            for (long a = -1; a <= 1; ++a) {
                Rational alpha = pow2_rational(a);
                for (std::uint64_t l = 0; l <= k; ++l) {
                    Rational lr(static_cast<unsigned long>(l));
                    std::uint64_t count = count_exceeding(*m, BitString(), k, alpha, lr);
                    if (compare_pow2(ScaledPow2{alpha, Rational(static_cast<unsigned long>(k)) - lr},
                                     ScaledPow2{1, 0}) > 0 &&
                        compare_pow2(ScaledPow2{alpha * Rational(static_cast<unsigned long>(count)), 0},
                                     ScaledPow2{1, lr}) >= 0)
                        return false;
                }
            }
        }
    }
    return true;
}

bool check_codec() {
    auto sched = BlockSchedule::paper();
    SplitMix64 rng(0xC0DEC);
    std::vector<ModelPtr> models = builtin_models();
    models.push_back(slow_staged_wrapper(kt_model()));
    for (const ModelPtr& m : models) {
        for (int trial = 0; trial < 40; ++trial) {
            BitString input;
            for (int j = 0; j < 10; ++j) input.push_back((rng.next() & 1) != 0);
            FixedSource src(input);
            OracleStream stream = encode_blocks(src, *m, sched, 4);
            for (std::uint64_t n = 0; n <= 10; ++n) {
                auto [bits, usage] = decode_prefix(stream, n, *m, sched);
                (void)usage;
                if (bits != input.prefix(n)) return false;
            }
        }
    }
    return true;
}

bool check_enumeration() {
    // Closed-form ranks must agree with a direct filter of all extensions.
    auto m = kt_model();
    SplitMix64 rng(0xE9);
    for (int trial = 0; trial < 30; ++trial) {
        BitString prefix;
        for (int j = 0; j < 5; ++j) prefix.push_back((rng.next() & 1) != 0);
        std::uint64_t k = 1 + rng.next() % 6;
        Rational d = make_rational(Integer(1 + rng.next() % 64), Integer(1 + rng.next() % 16));
        auto listed = enumerate_admitted(*m, prefix, k, d, EnumOrder::exact);
        std::vector<BitString> brute;
        for (Integer u = 0; u < (Integer(1) << k); u += 1) {
            BitString bits;
            for (std::uint64_t j = 0; j < k; ++j)
                bits.push_back(mpz_tstbit(u.get_mpz_t(), static_cast<mp_bitcnt_t>(k - 1 - j)));
            BitString whole = prefix;
            whole.append(bits);
            if (cmp(m->value(whole), d) > 0) brute.push_back(bits);
        }
        if (listed.size() != brute.size()) return false;
        for (std::size_t i = 0; i < brute.size(); ++i)
            if (listed[i].first != brute[i]) return false;
    }
    return true;
}

bool check_container() {
    SplitMix64 rng(0xF0227);
    BitString input;
    for (int j = 0; j < 15; ++j) input.push_back((rng.next() & 1) != 0);
    FixedSource src(input);
    OracleStream stream = encode_blocks(src, *kt_model(), BlockSchedule::paper(), 5);
    std::vector<std::uint8_t> bytes = write_container(stream);
    OracleStream back = read_container(bytes);
    if (back.model_spec != stream.model_spec || back.payload != stream.payload ||
        back.block_count != stream.block_count || back.schedule != stream.schedule)
        return false;
    EnumLimits tight{1u << 18, 1u << 12};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint8_t> bad = bytes;
        bad[rng.next() % bad.size()] ^= static_cast<std::uint8_t>(1 + rng.next() % 255);
        try {
            OracleStream s = read_container(bad);
            if (s.block_coded) {
                std::size_t pos = 0;
                ModelPtr m = parse_model_bytes(s.model_spec, pos);
                decode_prefix(s, 15, *m, s.schedule, tight);
            }
        } catch (const Error&) {
            continue;  // clean rejection
        }
        // Decoded to something; silent divergence is the caller's concern.
    }
    return true;
}

bool check_machines() {
    FixedSource zeros(BitString::zeros(40));
    auto model = bernoulli_model(make_rational(1, 4));
    auto sched = BlockSchedule::paper();
    OracleStream stream = encode_blocks(zeros, *model, sched, 8);
    for (std::uint64_t m = 1; m <= 2; ++m) {
        BitString spread;
        for (std::size_t j = 0; j < stream.payload.size(); ++j) {
            spread.push_back(stream.payload[j]);
            for (std::uint64_t t = 1; t < m; ++t) spread.push_back(false);
        }
        auto decoder = block_decoder_machine(model, sched);
        auto composed = compose(decoder, inflate_machine(m));
        for (std::uint64_t n = 0; n <= sched.n(8); ++n) {
            RunResult direct = run(*decoder, stream.payload, n);
            RunResult through = run(*composed, spread, n);
            if (direct.output != through.output) return false;
            if (through.ledger.distinct_count() != m * direct.ledger.distinct_count())
                return false;
        }
    }
    return true;
}

}  // namespace

bool run_selftests(std::ostream& out) {
    struct Check {
        const char* name;
        std::function<bool()> fn;
    };
    const std::vector<Check> checks = {
        {"self-delimiting codes", check_codes},
        {"martingale laws", check_gale_laws},
        {"threshold approximation", check_thresholds},
        {"counting bounds", check_counting},
        {"block codec round trip", check_codec},
        {"enumeration consistency", check_enumeration},
        {"container format", check_container},
        {"oracle machines", check_machines},
    };
    bool all_ok = true;
    for (const Check& check : checks) {
        bool ok = false;
        try {
            ok = check.fn();
        } catch (const std::exception& e) {
            out << "[FAIL] " << check.name << " (" << e.what() << ")\n";
            all_ok = false;
            continue;
        }
        out << (ok ? "[ok]   " : "[FAIL] ") << check.name << "\n";
        all_ok = all_ok && ok;
    }
    return all_ok;
}

}  // namespace gale
