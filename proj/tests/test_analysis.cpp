#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gale/analysis.hpp"
#include "support.hpp"

using namespace gale;
using namespace gale::test;

namespace {

Rational rat(long num, long den) { return make_rational(num, den); }

// Independent restatement of the pinned PRNG, kept deliberately separate from
// the library implementation.
std::uint64_t reference_splitmix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    std::uint64_t z = 0;
    for (std::uint64_t i = 0; i <= index; ++i) {
        state += 0x9E3779B97F4A7C15ull;
        z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z = z ^ (z >> 31);
    }
    return z;
}

}  // namespace

TEST_CASE("pinned PRNG matches an independent restatement") {
    for (std::uint64_t seed : {0ull, 42ull, 0xDEC0DEull}) {
        for (std::uint64_t j : {0ull, 1ull, 2ull, 17ull, 1000ull}) {
            REQUIRE(SplitMix64::at(seed, j) == reference_splitmix(seed, j));
        }
        SplitMix64 sequential(seed);
        for (std::uint64_t j = 0; j < 50; ++j) REQUIRE(sequential.next() == SplitMix64::at(seed, j));
    }
}

TEST_CASE("bernoulli source: concentration, determinism, validation") {
    auto src = bernoulli_source(rat(1, 2), 42);
    std::uint64_t ones = 0;
    for (std::uint64_t j = 0; j < 10000; ++j) ones += src->bit(j) ? 1 : 0;
    CHECK(ones >= 4600);
    CHECK(ones <= 5400);

    auto again = bernoulli_source(rat(1, 2), 42);
    CHECK(src->prefix(10000) == again->prefix(10000));

    CHECK_THROWS_AS(bernoulli_source(Rational(0), 1), ParameterOutOfRange);
    CHECK_THROWS_AS(bernoulli_source(Rational(1), 1), ParameterOutOfRange);
}

TEST_CASE("fixed sources") {
    CHECK(zeros_source()->prefix(5).str() == "00000");
    CHECK(periodic_source(BitString::parse("10"))->prefix(5).str() == "10101");
    CHECK_THROWS_AS(periodic_source(BitString()), EmptyPattern);

    auto regime = regime_source({zeros_source(), bernoulli_source(rat(1, 2), 7)}, {4, 16, 64});
    auto noisy = bernoulli_source(rat(1, 2), 7);
    for (std::uint64_t j = 0; j < 200; ++j) {
        bool in_second = (j >= 4 && j < 16) || (j >= 64);
        CHECK(regime->bit(j) == (in_second ? noisy->bit(j) : false));
    }
    CHECK_THROWS_AS(regime_source({}, {}), ParameterOutOfRange);
    CHECK_THROWS_AS(regime_source({zeros_source()}, {4, 4}), ParameterOutOfRange);
}

TEST_CASE("source text specs") {
    CHECK(source_from_spec("zeros")->prefix(3).str() == "000");
    CHECK(source_from_spec("periodic:10")->prefix(5).str() == "10101");
    CHECK(source_from_spec("bernoulli:1/2:42")->prefix(100) ==
          bernoulli_source(rat(1, 2), 42)->prefix(100));
    auto regime = source_from_spec("regime:zeros+bernoulli:1/2:7@4,16,64");
    CHECK(regime->bit(5) == bernoulli_source(rat(1, 2), 7)->bit(5));
    CHECK_THROWS_AS(source_from_spec("white-noise"), ParameterOutOfRange);
}

TEST_CASE("binary entropy") {
    CHECK(entropy(rat(1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(rat(1, 16)) == doctest::Approx(0.3373).epsilon(3e-4));
    CHECK(entropy(rat(1, 8)) == doctest::Approx(0.5436).epsilon(3e-4));
    CHECK_THROWS_AS(entropy(Rational(0)), ParameterOutOfRange);
    CHECK_THROWS_AS(entropy(Rational(2)), ParameterOutOfRange);
}

TEST_CASE("dimension report: degenerate zeros run") {
    auto report = dimension_report(*zeros_source(), *bernoulli_model(rat(1, 4)),
                                   BlockSchedule::paper(), 10);
    REQUIRE(report.rows.size() == 10);
    for (const ReportRow& row : report.rows) {
        REQUIRE(row.size_A == 1);
        REQUIRE(row.log2_size_A == 0.0);
        REQUIRE(row.index_sum_ratio == 0.0);
        REQUIRE(row.enc_p_bits == 4);  // rank 1 every block
    }
    CHECK(report.rows[0].n_end == 1);
    CHECK(report.rows[9].n_end == 55);
}

TEST_CASE("dimension report: uniform model admits everything") {
    auto source = bernoulli_source(rat(1, 3), 5);
    auto report = dimension_report(*source, *uniform_model(), BlockSchedule::paper(), 6);
    REQUIRE(report.rows.size() == 6);
    for (const ReportRow& row : report.rows) {
        REQUIRE(row.size_A == Integer(1) << row.k);
        REQUIRE(row.index_sum_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dimension report: exact self-consistency") {
    auto source = bernoulli_source(rat(1, 8), 0xDEC0DE);
    auto report = dimension_report(*source, *kt_model(), BlockSchedule::paper(), 12);
    std::uint64_t index_bits = 0;
    std::uint64_t thresh_bits = 0;
    for (const ReportRow& row : report.rows) {
        index_bits += row.enc_p_bits;
        thresh_bits += row.thresh_bits;
        Integer n_end(static_cast<unsigned long>(row.n_end));
        REQUIRE(row.index_bits_ratio ==
                make_rational(Integer(static_cast<unsigned long>(index_bits)), n_end));
        REQUIRE(row.overhead_bits_ratio ==
                make_rational(Integer(static_cast<unsigned long>(thresh_bits)), n_end));
        // Exact bit accounting: total = index component + overhead component.
        REQUIRE(row.total_ratio_exact == row.index_bits_ratio + row.overhead_bits_ratio);
        REQUIRE(cmp(row.index_bits_ratio, row.total_ratio_exact) <= 0);
        // The l diagnostic bounds the admitted-set size from above:
        // log2|A| <= l - log2(1 - slack).
        double slack_term =
            row.i >= 2 ? -std::log2(1.0 - 1.0 / (static_cast<double>(row.i) * row.i)) : 1.0;
        REQUIRE(row.log2_size_A <= row.l_diag + slack_term + 1e-9);
    }
    CHECK_THROWS_AS(dimension_report(*source, *kt_model(), BlockSchedule::paper(), 0),
                    ParameterOutOfRange);
}

TEST_CASE("total ratio decays monotonically in the overhead-only regime") {
    auto report = dimension_report(*zeros_source(), *bernoulli_model(rat(1, 4)),
                                   BlockSchedule::paper(), 40);
    for (std::size_t i = 8; i < 40; ++i) {
        // Boundary ratio at n(i) is rows[i-1]; strictly decreasing from i = 8.
        REQUIRE(cmp(report.rows[i].total_ratio_exact, report.rows[i - 1].total_ratio_exact) < 0);
    }
}

TEST_CASE("csv export") {
    DimensionReport empty;
    CHECK(export_csv(empty) == "i,k,n_end,sizeA,enc_p_bits,thresh_bits,index_ratio,total_ratio\n");

    auto one = dimension_report(*zeros_source(), *bernoulli_model(rat(1, 4)),
                                BlockSchedule::paper(), 1);
    CHECK(export_csv(one) ==
          "i,k,n_end,sizeA,enc_p_bits,thresh_bits,index_ratio,total_ratio\n"
          "0,1,1,1,4,2,0.000000,6.000000\n");

    auto ten = dimension_report(*zeros_source(), *bernoulli_model(rat(1, 4)),
                                BlockSchedule::paper(), 10);
    std::string csv = export_csv(ten);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 11);  // header plus one row per block
}

TEST_CASE("capital curve signs") {
    // A fair martingale in a fair environment stays exactly at its start.
    auto flat = capital_curve(*uniform_model(), *zeros_source(), 30, Rational(1));
    for (const CurvePoint& p : flat) CHECK(p.sign == 0);

    // The biased bettor on all-zeros gains capital every bit.
    auto rising = capital_curve(*bernoulli_model(rat(1, 4)), *zeros_source(), 60, Rational(1));
    for (const CurvePoint& p : rising) CHECK(p.sign > 0);

    // Against the payoff exponent s = 2/5 the same bettor falls short:
    // (3/2)^n against 2^(3n/5) is 3^(5n) against 2^(8n) after cross-powering,
    // and 243 < 256.
    auto short_of = capital_curve(*bernoulli_model(rat(1, 4)), *zeros_source(), 60, rat(2, 5));
    for (const CurvePoint& p : short_of) CHECK(p.sign < 0);

    // At s matching the growth rate from above, the comparison flips sign.
    auto above = capital_curve(*bernoulli_model(rat(1, 4)), *zeros_source(), 60, rat(1, 2));
    for (const CurvePoint& p : above) CHECK(p.sign > 0);  // 3^2 = 9 > 2^3 = 8
}

TEST_CASE("regime source shows distinct best and worst case usage") {
    // Alternating all-zero and fair-coin stretches make block usage bounce.
    auto regime = source_from_spec("regime:zeros+bernoulli:1/2:3@16,64,256,1024");
    auto report = dimension_report(*regime, *kt_model(), BlockSchedule::paper(), 40);
    double lo = 2.0, hi = 0.0;
    for (std::size_t i = 20; i < report.rows.size(); ++i) {
        lo = std::min(lo, report.rows[i].index_sum_ratio);
        hi = std::max(hi, report.rows[i].index_sum_ratio);
    }
    CHECK(lo < hi);  // the two regimes leave a visible gap in the tail
}

TEST_CASE("entropy tracking toward the source dimension") {
    // At n(44) = 990 the cumulative index-sum ratio sits within 0.1 of the
    // source entropy for both biases.
    auto kt = kt_model();
    auto r16 = dimension_report(*bernoulli_source(rat(1, 16), 0xDEC0DE), *kt,
                                BlockSchedule::paper(), 44);
    CHECK(std::abs(r16.rows.back().index_sum_ratio - 0.3373) < 0.1);
    auto r8 = dimension_report(*bernoulli_source(rat(1, 8), 0xDEC0DE), *kt,
                               BlockSchedule::paper(), 44);
    CHECK(std::abs(r8.rows.back().index_sum_ratio - 0.5436) < 0.1);
}
