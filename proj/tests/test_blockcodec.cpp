#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "gale/blockcodec.hpp"
#include "support.hpp"

using namespace gale;
using namespace gale::test;

namespace {

Rational rat(long num, long den) { return make_rational(num, den); }

BitString random_bits(SplitMix64& rng, std::size_t len) {
    BitString out;
    for (std::size_t j = 0; j < len; ++j) out.push_back((rng.next() & 1) != 0);
    return out;
}

// Independent oracle: filter all 2^k extensions with a full, unpruned tree
// walk over direct capital evaluations.
std::vector<BitString> brute_admitted(const MartingaleModel& m, const BitString& prefix,
                                      std::uint64_t k, const Rational& d) {
    std::vector<BitString> result;
    ModelCursor start = m.start();
    start.advance(prefix);
    BitString path;
    auto walk = [&](auto&& self, const ModelCursor& cursor, std::uint64_t remaining) -> void {
        if (remaining == 0) {
            if (cmp(cursor.capital(), d) > 0) result.push_back(path);
            return;
        }
        for (int b = 0; b < 2; ++b) {
            path.push_back(b != 0);
            self(self, cursor.advanced(b != 0), remaining - 1);
            path = path.prefix(path.size() - 1);
        }
    };
    walk(walk, start, k);
    return result;
}

}  // namespace

TEST_CASE("block schedule") {
    BlockSchedule paper = BlockSchedule::paper();
    CHECK(paper.k(0) == 1);
    CHECK(paper.k(6) == 7);
    CHECK(paper.n(0) == 0);
    CHECK(paper.n(4) == 10);
    CHECK(paper.n(300) == 45150);
    CHECK(locate_block(paper, 0) == 0);
    CHECK(locate_block(paper, 5) == 2);

    // Capped at 2 the offsets run 0,1,3,5,7,9,...; position 7 opens block 4.
    BlockSchedule capped = BlockSchedule::capped(2);
    CHECK(capped.k(0) == 1);
    CHECK(capped.k(1) == 2);
    CHECK(capped.k(5) == 2);
    std::vector<std::uint64_t> offsets = {0, 1, 3, 5, 7, 9};
    for (std::size_t i = 0; i < offsets.size(); ++i) CHECK(capped.n(i) == offsets[i]);
    CHECK(locate_block(capped, 7) == 4);

    for (std::uint64_t pos = 0; pos < 2000; ++pos) {
        for (const BlockSchedule& sched : {paper, capped, BlockSchedule::capped(24)}) {
            std::uint64_t i = locate_block(sched, pos);
            REQUIRE(sched.n(i) <= pos);
            REQUIRE(pos < sched.n(i + 1));
        }
    }
    CHECK(paper.blocks_covering(0) == 0);
    CHECK(paper.blocks_covering(1) == 1);
    CHECK(paper.blocks_covering(10) == 4);
    CHECK(paper.blocks_covering(11) == 5);
    CHECK_THROWS_AS(BlockSchedule::capped(0), ParameterOutOfRange);
}

TEST_CASE("admitted-set enumeration: pinned values") {
    auto uniform = uniform_model();
    auto listed = enumerate_admitted(*uniform, BitString(), 2, rat(1, 2), EnumOrder::exact);
    REQUIRE(listed.size() == 4);
    CHECK(listed[0].first.str() == "00");
    CHECK(listed[1].first.str() == "01");
    CHECK(listed[2].first.str() == "10");
    CHECK(listed[3].first.str() == "11");
    for (std::size_t i = 0; i < 4; ++i) CHECK(listed[i].second == i + 1);

    auto kt = kt_model();
    auto narrow = enumerate_admitted(*kt, BitString(), 2, rat(11, 10), EnumOrder::exact);
    REQUIRE(narrow.size() == 2);
    CHECK(narrow[0].first.str() == "00");
    CHECK(narrow[1].first.str() == "11");

    CHECK(enumerate_admitted(*kt, BitString(), 3, Rational(8), EnumOrder::exact).empty());
    CHECK(enumerate_admitted(*uniform, BitString(), 3, Rational(8), EnumOrder::exact).empty());
}

TEST_CASE("rank and unrank: pinned values") {
    auto uniform = uniform_model();
    CHECK(string_to_index(*uniform, BitString(), 2, rat(1, 2), BitString::parse("10"),
                          EnumOrder::exact) == 3);
    auto kt = kt_model();
    CHECK(string_to_index(*kt, BitString(), 2, rat(11, 10), BitString::parse("11"),
                          EnumOrder::exact) == 2);
    CHECK_THROWS_AS(string_to_index(*kt, BitString(), 2, rat(11, 10), BitString::parse("01"),
                                    EnumOrder::exact),
                    NotAdmitted);

    CHECK(index_to_string(*uniform, BitString(), 2, rat(1, 2), 3, EnumOrder::exact).str() == "10");
    CHECK(index_to_string(*kt, BitString(), 2, rat(11, 10), 1, EnumOrder::exact).str() == "00");
    CHECK_THROWS_AS(index_to_string(*kt, BitString(), 2, rat(11, 10), 5, EnumOrder::exact),
                    IndexOutOfRange);
    CHECK_THROWS_AS(index_to_string(*kt, BitString(), 2, rat(11, 10), 0, EnumOrder::exact),
                    IndexOutOfRange);
}

TEST_CASE("enumeration agrees with brute force for every model and order") {
    std::vector<ModelPtr> models = builtin_models();
    models.push_back(position_bias_model());
    models.push_back(slow_staged_wrapper(kt_model()));
    SplitMix64 rng(0xE11);
    for (const ModelPtr& m : models) {
        for (std::uint64_t k = 1; k <= 10; ++k) {
            for (int trial = 0; trial < 10; ++trial) {
                BitString prefix = random_bits(rng, rng.next() % 6);
                // Thresholds straddling the capital scale of the block.
                Rational d = m->value(prefix) *
                             rat(1 + static_cast<long>(rng.next() % 64), 32) *
                             pow2_rational(static_cast<long>(rng.next() % (k + 1)) -
                                           static_cast<long>(k / 2));
                auto brute = brute_admitted(*m, prefix, k, d);

                auto exact = enumerate_admitted(*m, prefix, k, d, EnumOrder::exact);
                REQUIRE(exact.size() == brute.size());
                for (std::size_t i = 0; i < brute.size(); ++i) {
                    REQUIRE(exact[i].first == brute[i]);
                    REQUIRE(exact[i].second == i + 1);
                }

                // Staged order permutes the same set.
                auto staged = enumerate_admitted(*m, prefix, k, d, EnumOrder::staged);
                REQUIRE(staged.size() == brute.size());
                std::set<std::string> brute_set, staged_set;
                for (const auto& u : brute) brute_set.insert(u.str());
                for (const auto& [u, rank] : staged) staged_set.insert(u.str());
                REQUIRE(staged_set == brute_set);

                // rank_of and string_at invert each other in both orders.
                ModelCursor at_prefix = m->start();
                at_prefix.advance(prefix);
                for (EnumOrder order : {EnumOrder::exact, EnumOrder::staged}) {
                    BlockEnumerator en(at_prefix, k, d, order);
                    auto all = en.all();
                    REQUIRE(en.size() == Integer(static_cast<unsigned long>(all.size())));
                    for (const auto& [u, rank] : all) {
                        REQUIRE(en.rank_of(u) == rank);
                        REQUIRE(en.string_at(rank) == u);
                    }
                    if (!all.empty()) {
                        // The free functions agree with the enumerator object.
                        REQUIRE(string_to_index(*m, prefix, k, d, all.front().first, order) == 1);
                        REQUIRE(index_to_string(*m, prefix, k, d, 1, order) == all.front().first);
                    }
                }
            }
        }
    }
}

TEST_CASE("staged order is the stage-loop order") {
    // With the ramp approximation, a string is admitted at the first stage t
    // with value·(1 - 2^-(t+1)) > d; scanning not-yet-admitted strings
    // lexicographically per stage sorts by (crossing stage, lex).
    auto m = slow_staged_wrapper(kt_model());
    BitString prefix = BitString::parse("0");
    std::uint64_t k = 4;
    Rational d = rat(3, 4);
    auto staged = enumerate_admitted(*m, prefix, k, d, EnumOrder::staged);
    REQUIRE(!staged.empty());

    // Replay the loop directly as an oracle.
    std::vector<BitString> remaining = brute_admitted(*m, prefix, k, d);
    std::vector<BitString> loop_order;
    for (std::uint64_t t = 0; loop_order.size() < remaining.size() && t < 4096; ++t) {
        for (const BitString& u : remaining) {
            if (std::find(loop_order.begin(), loop_order.end(), u) != loop_order.end()) continue;
            BitString whole = prefix;
            whole.append(u);
            if (cmp(m->staged(whole, t), d) > 0) loop_order.push_back(u);
        }
    }
    REQUIRE(loop_order.size() == staged.size());
    for (std::size_t i = 0; i < staged.size(); ++i) REQUIRE(staged[i].first == loop_order[i]);
}

TEST_CASE("encoding: pinned single-block streams") {
    auto bern = bernoulli_model(rat(1, 4));
    FixedSource zeros(BitString::zeros(4));
    OracleStream stream = encode_blocks(zeros, *bern, BlockSchedule::paper(), 1);
    CHECK(stream.block_coded);
    CHECK(stream.block_count == 1);
    CHECK(stream.payload.str() == "010011");

    auto uniform = uniform_model();
    for (bool first_bit : {false, true}) {
        BitString input;
        input.push_back(first_bit);
        FixedSource src(input);
        auto [ustream, trace] = encode_blocks_traced(src, *uniform, BlockSchedule::paper(), 1);
        REQUIRE(trace.size() == 1);
        CHECK(trace[0].capital_after == Rational(1));
        Rational d = trace[0].threshold.to_rational();
        CHECK(cmp(d, rat(1, 2)) >= 0);
        CHECK(cmp(d, Rational(1)) < 0);
        CHECK(trace[0].admitted_size == 2);
        CHECK(trace[0].index == (first_bit ? 2 : 1));
    }

    CHECK_THROWS_AS(encode_blocks(zeros, *bern, BlockSchedule::paper(), 0), ParameterOutOfRange);
}

TEST_CASE("decoding: pinned values and header checks") {
    auto bern = bernoulli_model(rat(1, 4));
    FixedSource zeros(BitString::zeros(4));
    OracleStream stream = encode_blocks(zeros, *bern, BlockSchedule::paper(), 1);

    auto [bits, usage] = decode_prefix(stream, 1, *bern, BlockSchedule::paper());
    CHECK(bits.str() == "0");
    CHECK(usage == 6);

    auto [none, zero_usage] = decode_prefix(stream, 0, *bern, BlockSchedule::paper());
    CHECK(none.empty());
    CHECK(zero_usage == 0);

    CHECK_THROWS_AS(decode_prefix(stream, 1, *kt_model(), BlockSchedule::paper()), ModelMismatch);
    CHECK_THROWS_AS(decode_prefix(stream, 1, *bern, BlockSchedule::capped(8)), ModelMismatch);
    CHECK_THROWS_AS(decode_prefix(stream, 2, *bern, BlockSchedule::paper()), InsufficientBlocks);

    OracleStream truncated = stream;
    truncated.payload = truncated.payload.prefix(3);
    CHECK_THROWS_AS(decode_prefix(truncated, 1, *bern, BlockSchedule::paper()), MalformedCode);

    OracleStream zero_rank = stream;
    zero_rank.payload = BitString::parse("1" "11");  // enc(0) then threshold 1
    CHECK_THROWS_AS(decode_prefix(zero_rank, 1, *bern, BlockSchedule::paper()), IndexOutOfRange);
}

TEST_CASE("round trip across models, schedules and every prefix length") {
    std::vector<ModelPtr> models = builtin_models();
    models.push_back(slow_staged_wrapper(kt_model()));
    models.push_back(position_bias_model());
    SplitMix64 rng(0x707);
    for (const ModelPtr& m : models) {
        for (const BlockSchedule& sched : {BlockSchedule::paper(), BlockSchedule::capped(3)}) {
            std::uint32_t blocks = 4;
            std::uint64_t total = sched.n(blocks);
            for (int trial = 0; trial < 25; ++trial) {
                BitString input = random_bits(rng, total);
                FixedSource src(input);
                OracleStream stream = encode_blocks(src, *m, sched, blocks);
                for (std::uint64_t n = 0; n <= total; ++n) {
                    auto [bits, usage] = decode_prefix(stream, n, *m, sched);
                    REQUIRE(bits == input.prefix(n));
                    (void)usage;
                }
            }
        }
    }
}

TEST_CASE("query usage equals the bit total of the consumed records") {
    auto m = kt_model();
    BlockSchedule sched = BlockSchedule::paper();
    SplitMix64 rng(0xACC7);
    BitString input = random_bits(rng, sched.n(6));
    FixedSource src(input);
    auto [stream, trace] = encode_blocks_traced(src, *m, sched, 6);

    std::uint64_t payload_total = 0;
    for (const BlockRecord& rec : trace) payload_total += rec.index_bits + rec.threshold_bits;
    REQUIRE(payload_total == stream.payload.size());

    for (std::uint64_t n = 0; n <= sched.n(6); ++n) {
        auto [bits, usage] = decode_prefix(stream, n, *m, sched);
        std::uint64_t expected = 0;
        for (std::uint64_t j = 0; j < sched.blocks_covering(n); ++j)
            expected += trace[j].index_bits + trace[j].threshold_bits;
        REQUIRE(usage == expected);
        (void)bits;
    }
}

TEST_CASE("ranks are injective and code lengths cannot beat counting") {
    auto m = kt_model();
    SplitMix64 rng(0x1B9);
    for (std::uint64_t k = 1; k <= 10; ++k) {
        BitString prefix = random_bits(rng, 4);
        Rational d = m->value(prefix) * rat(1 + static_cast<long>(rng.next() % 32), 16);
        auto all = enumerate_admitted(*m, prefix, k, d, EnumOrder::exact);
        if (all.empty()) continue;
        std::set<std::string> strings;
        std::set<std::string> ranks;
        for (const auto& [u, rank] : all) {
            strings.insert(u.str());
            ranks.insert(rank.get_str());
        }
        REQUIRE(strings.size() == all.size());
        REQUIRE(ranks.size() == all.size());
        REQUIRE(all.back().second == Integer(static_cast<unsigned long>(all.size())));
        // |enc(max rank)| >= log2 |A|
        std::size_t code_len = enc_nat(all.back().second).size();
        REQUIRE(pow2_rational(static_cast<long>(code_len)) >=
                Rational(Integer(static_cast<unsigned long>(all.size()))));
    }
}

TEST_CASE("encoded rank never exceeds the admitted-set size, with short codes") {
    SplitMix64 rng(0xB0B);
    for (const ModelPtr& m : builtin_models()) {
        BitString input = random_bits(rng, BlockSchedule::paper().n(6));
        FixedSource src(input);
        auto [stream, trace] = encode_blocks_traced(src, *m, BlockSchedule::paper(), 6);
        (void)stream;
        for (const BlockRecord& rec : trace) {
            REQUIRE(rec.index >= 1);
            REQUIRE(rec.index <= rec.admitted_size);
            double log_a = log2_rational(Rational(rec.admitted_size));
            double budget = log_a + 2.0 * std::log2(log_a + 2.0) + 6.0;
            REQUIRE(static_cast<double>(rec.index_bits) <= budget);
            // Thresholds approximate the end capital from below.
            REQUIRE(cmp_dyadic(rec.capital_after, rec.threshold) > 0);
            REQUIRE(cmp_dyadic(rec.capital_after * (Rational(1) - approximation_slack(rec.i)),
                               rec.threshold) <= 0);
        }
    }
}

TEST_CASE("staged-order streams round trip with permuted ranks") {
    auto plain = kt_model();
    auto wrapped = slow_staged_wrapper(plain);
    BlockSchedule sched = BlockSchedule::paper();
    SplitMix64 rng(0x57A);
    bool saw_rank_difference = false;
    for (int trial = 0; trial < 60; ++trial) {
        BitString input = random_bits(rng, sched.n(4));
        FixedSource src(input);
        auto [exact_stream, exact_trace] = encode_blocks_traced(src, *plain, sched, 4);
        auto [staged_stream, staged_trace] = encode_blocks_traced(src, *wrapped, sched, 4);
        // Same thresholds and admitted sets, possibly different ranks.
        for (std::size_t i = 0; i < exact_trace.size(); ++i) {
            REQUIRE(exact_trace[i].threshold == staged_trace[i].threshold);
            REQUIRE(exact_trace[i].admitted_size == staged_trace[i].admitted_size);
            if (exact_trace[i].index != staged_trace[i].index) saw_rank_difference = true;
        }
        auto [bits, usage] = decode_prefix(staged_stream, sched.n(4), *wrapped, sched);
        REQUIRE(bits == input);
        (void)usage;
        auto [exact_bits, exact_usage] = decode_prefix(exact_stream, sched.n(4), *plain, sched);
        REQUIRE(exact_bits == input);
        (void)exact_usage;
    }
    CHECK(saw_rank_difference);  // the wrapper genuinely reorders admissions
}

TEST_CASE("passthrough mode") {
    FixedSource src(BitString::parse("101"));
    OracleStream stream = passthrough_encode(src, 3);
    CHECK_FALSE(stream.block_coded);
    CHECK(stream.payload.str() == "101");
    auto [bits, usage] = passthrough_decode(stream, 3);
    CHECK(bits.str() == "101");
    CHECK(usage == 3);

    OracleStream empty = passthrough_encode(src, 0);
    auto [none, zero] = passthrough_decode(empty, 0);
    CHECK(none.empty());
    CHECK(zero == 0);

    SplitMix64 rng(0xA55);
    for (int trial = 0; trial < 1000; ++trial) {
        BitString bits_in = random_bits(rng, rng.next() % 64);
        FixedSource fs(bits_in);
        OracleStream s = passthrough_encode(fs, bits_in.size());
        auto [back, used] = passthrough_decode(s, bits_in.size());
        REQUIRE(back == bits_in);
        REQUIRE(used == bits_in.size());
    }

    CHECK_THROWS_AS(passthrough_decode(stream, 4), MalformedCode);
    auto block_stream = encode_blocks(FixedSource(BitString::zeros(1)),
                                      *uniform_model(), BlockSchedule::paper(), 1);
    CHECK_THROWS_AS(passthrough_decode(block_stream, 1), MalformedCode);
    CHECK_THROWS_AS(decode_prefix(stream, 1, *uniform_model(), BlockSchedule::paper()),
                    MalformedCode);
}

TEST_CASE("node budget turns runaway searches into reported errors") {
    auto m = position_bias_model();
    EnumLimits tiny{16, 1u << 12};
    CHECK_THROWS_AS(
        enumerate_admitted(*m, BitString(), 10, rat(1, 1024), EnumOrder::exact, tiny),
        TraversalBudgetExceeded);
}
