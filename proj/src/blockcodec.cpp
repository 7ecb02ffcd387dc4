#include "gale/blockcodec.hpp"

#include <algorithm>
#include <cmath>

#include "gale/codes.hpp"

namespace gale {

namespace {

Integer binom(std::uint64_t n, std::uint64_t k) {
    if (k > n) return Integer(0);
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

std::uint64_t popcount(const BitString& w) {
    std::uint64_t ones = 0;
    for (std::size_t i = 0; i < w.size(); ++i) ones += w[i] ? 1 : 0;
    return ones;
}

constexpr unsigned __int128 tri(unsigned __int128 i) { return i * (i + 1) / 2; }

}  // namespace

// ---------------------------------------------------------------- schedule

BlockSchedule BlockSchedule::capped(std::uint16_t k_max) {
    if (k_max == 0) throw ParameterOutOfRange("capped schedule needs k_max >= 1");
    return BlockSchedule(k_max);
}

std::uint64_t BlockSchedule::k(std::uint64_t i) const {
    std::uint64_t grow = i + 1;
    if (k_max_ != 0 && grow > k_max_) return k_max_;
    return grow;
}

std::uint64_t BlockSchedule::n(std::uint64_t i) const {
    unsigned __int128 v;
    if (k_max_ == 0 || i <= k_max_) {
        v = tri(i);
    } else {
        v = tri(k_max_) + static_cast<unsigned __int128>(i - k_max_) * k_max_;
    }
    if (v > static_cast<unsigned __int128>(UINT64_MAX))
        throw ParameterOutOfRange("schedule offset overflows 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t BlockSchedule::locate(std::uint64_t pos) const {
    if (k_max_ != 0) {
        std::uint64_t flat_start = n(k_max_);
        if (pos >= flat_start) return k_max_ + (pos - flat_start) / k_max_;
    }
    // Triangular regime: i near (sqrt(8·pos+1)-1)/2, then exact fixup.
    std::uint64_t i = static_cast<std::uint64_t>(
        (std::sqrt(8.0 * static_cast<double>(pos) + 1.0) - 1.0) / 2.0);
    while (i > 0 && tri(i) > pos) --i;
    while (tri(i + 1) <= pos) ++i;
    return i;
}

std::uint64_t BlockSchedule::blocks_covering(std::uint64_t prefix_len) const {
    if (prefix_len == 0) return 0;
    return locate(prefix_len - 1) + 1;
}

std::uint64_t locate_block(const BlockSchedule& sched, std::uint64_t pos) {
    return sched.locate(pos);
}

// -------------------------------------------------------------- enumerator

BlockEnumerator::BlockEnumerator(ModelCursor prefix, std::uint64_t k, Rational threshold,
                                 EnumOrder order, EnumLimits limits)
    : prefix_(std::move(prefix)), k_(k), d_(std::move(threshold)), order_(order), limits_(limits) {
    if (k_ == 0) throw ParameterOutOfRange("block length must be at least 1");
    if (sgn(d_) <= 0) throw ParameterOutOfRange("admission threshold must be positive");
    const MartingaleModel& model = prefix_.model();
    fast_ = model.exchangeable_blocks();
    if (fast_) {
        // Decide membership per ones-count class, then lay the classes out in
        // enumeration order: one lex-merged group for exact order, one group
        // per crossing stage for staged order.
        std::vector<std::pair<std::uint64_t, std::uint64_t>> stage_and_ones;
        for (std::uint64_t m = 0; m <= k_; ++m) {
            Rational ratio = model.block_ones_ratio(prefix_.state(), k_, m);
            if (cmp_product(prefix_.capital(), ratio, d_) <= 0) continue;
            std::uint64_t stage = 0;
            if (order_ == EnumOrder::staged) {
                auto t = model.staged_crossing(prefix_.capital() * ratio, d_,
                                               limits_.stage_budget);
                stage = *t;  // admission guarantees a finite crossing stage
            }
            stage_and_ones.emplace_back(stage, m);
        }
        std::stable_sort(stage_and_ones.begin(), stage_and_ones.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t pos = 0;
        while (pos < stage_and_ones.size()) {
            ClassGroup group;
            std::uint64_t stage = stage_and_ones[pos].first;
            group.count = 0;
            while (pos < stage_and_ones.size() && stage_and_ones[pos].first == stage) {
                group.ones_classes.push_back(stage_and_ones[pos].second);
                group.count += binom(k_, stage_and_ones[pos].second);
                ++pos;
            }
            groups_.push_back(std::move(group));
        }
    } else if (order_ == EnumOrder::staged) {
        build_staged_generic();
    }
}

bool BlockEnumerator::admitted(const Rational& capital) const {
    return cmp(capital, d_) > 0;
}

Integer BlockEnumerator::count_in_classes(std::uint64_t suffix_len,
                                          const std::vector<std::uint64_t>& classes,
                                          std::uint64_t ones_used) const {
    Integer total = 0;
    for (std::uint64_t m : classes) {
        if (m < ones_used) continue;
        total += binom(suffix_len, m - ones_used);
    }
    return total;
}

Integer BlockEnumerator::rank_within_classes(const BitString& block,
                                             const std::vector<std::uint64_t>& classes) const {
    Integer r = 0;
    std::uint64_t ones = 0;
    for (std::uint64_t j = 0; j < k_; ++j) {
        if (block[j]) {
            r += count_in_classes(k_ - 1 - j, classes, ones);
            ++ones;
        }
    }
    return r;  // 0-based position in the lex merge of the classes
}

BitString BlockEnumerator::unrank_within_classes(Integer index,
                                                 const std::vector<std::uint64_t>& classes) const {
    BitString out;
    std::uint64_t ones = 0;
    for (std::uint64_t j = 0; j < k_; ++j) {
        Integer with_zero = count_in_classes(k_ - 1 - j, classes, ones);
        if (index < with_zero) {
            out.push_back(false);
        } else {
            index -= with_zero;
            out.push_back(true);
            ++ones;
        }
    }
    return out;
}

Integer BlockEnumerator::generic_count(const ModelCursor& cursor, std::uint64_t remaining,
                                       std::uint64_t& nodes) const {
    if (++nodes > limits_.node_budget)
        throw TraversalBudgetExceeded("enumeration node budget exhausted");
    if (remaining == 0) return admitted(cursor.capital()) ? Integer(1) : Integer(0);
    if (cmp_product(cursor.capital(), cursor.completion_bound(remaining), d_) <= 0)
        return Integer(0);
    Integer total = generic_count(cursor.advanced(false), remaining - 1, nodes);
    total += generic_count(cursor.advanced(true), remaining - 1, nodes);
    return total;
}

void BlockEnumerator::build_staged_generic() {
    // Collect the admitted set lexicographically, then replay the stage loop
    // by ordering on (crossing stage, lex position).
    std::vector<std::pair<BitString, Rational>> admitted_list;
    std::uint64_t nodes = 0;
    BitString path;
    auto walk = [&](auto&& self, const ModelCursor& cursor, std::uint64_t remaining) -> void {
        if (++nodes > limits_.node_budget)
            throw TraversalBudgetExceeded("enumeration node budget exhausted");
        if (remaining == 0) {
            if (admitted(cursor.capital())) {
                if (admitted_list.size() >= (1ull << 20))
                    throw ExhaustiveBoundExceeded("staged admitted set too large to materialize");
                admitted_list.emplace_back(path, cursor.capital());
            }
            return;
        }
        if (cmp_product(cursor.capital(), cursor.completion_bound(remaining), d_) <= 0)
            return;
        for (int b = 0; b < 2; ++b) {
            path.push_back(b != 0);
            self(self, cursor.advanced(b != 0), remaining - 1);
            path = path.prefix(path.size() - 1);
        }
    };
    walk(walk, prefix_, k_);

    const MartingaleModel& model = prefix_.model();
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    order.reserve(admitted_list.size());
    for (std::size_t idx = 0; idx < admitted_list.size(); ++idx) {
        auto t = model.staged_crossing(admitted_list[idx].second, d_, limits_.stage_budget);
        order.emplace_back(*t, idx);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    staged_list_.reserve(order.size());
    for (const auto& [stage, idx] : order) staged_list_.push_back(admitted_list[idx].first);
}

Integer BlockEnumerator::size() const {
    if (fast_) {
        Integer total = 0;
        for (const auto& g : groups_) total += g.count;
        return total;
    }
    if (order_ == EnumOrder::staged) return Integer(static_cast<unsigned long>(staged_list_.size()));
    std::uint64_t nodes = 0;
    return generic_count(prefix_, k_, nodes);
}

Integer BlockEnumerator::rank_of(const BitString& block) const {
    if (block.size() != k_) throw ParameterOutOfRange("block has the wrong length");
    if (fast_) {
        std::uint64_t ones = popcount(block);
        Integer before = 0;
        for (const auto& g : groups_) {
            if (std::binary_search(g.ones_classes.begin(), g.ones_classes.end(), ones))
                return before + rank_within_classes(block, g.ones_classes) + 1;
            before += g.count;
        }
        throw NotAdmitted("block fails the admission threshold");
    }
    if (order_ == EnumOrder::staged) {
        for (std::size_t i = 0; i < staged_list_.size(); ++i)
            if (staged_list_[i] == block) return Integer(static_cast<unsigned long>(i + 1));
        throw NotAdmitted("block fails the admission threshold");
    }
    // Exact order, generic model: admitted strings lex-before the block, plus
    // one for the block itself.
    ModelCursor at_block = prefix_;
    at_block.advance(block);
    if (!admitted(at_block.capital())) throw NotAdmitted("block fails the admission threshold");
    std::uint64_t nodes = 0;
    Integer before = 0;
    ModelCursor cur = prefix_;
    for (std::uint64_t j = 0; j < k_; ++j) {
        if (block[j]) before += generic_count(cur.advanced(false), k_ - 1 - j, nodes);
        cur.advance(block[j]);
    }
    return before + 1;
}

BitString BlockEnumerator::string_at(const Integer& rank) const {
    if (cmp(rank, Integer(1)) < 0) throw IndexOutOfRange("ranks start at 1");
    if (fast_) {
        Integer rest = rank - 1;
        for (const auto& g : groups_) {
            if (rest < g.count) return unrank_within_classes(rest, g.ones_classes);
            rest -= g.count;
        }
        throw IndexOutOfRange("rank beyond the admitted-set size");
    }
    if (order_ == EnumOrder::staged) {
        if (cmp(rank, Integer(static_cast<unsigned long>(staged_list_.size()))) > 0)
            throw IndexOutOfRange("rank beyond the admitted-set size");
        return staged_list_[rank.get_ui() - 1];
    }
    std::uint64_t nodes = 0;
    Integer want = rank;
    ModelCursor cur = prefix_;
    BitString path;
    for (std::uint64_t j = 0; j < k_; ++j) {
        ModelCursor left = cur.advanced(false);
        Integer in_left = generic_count(left, k_ - 1 - j, nodes);
        if (want <= in_left) {
            cur = std::move(left);
            path.push_back(false);
        } else {
            want -= in_left;
            cur.advance(true);
            path.push_back(true);
        }
    }
    if (cmp(want, Integer(1)) == 0 && admitted(cur.capital())) return path;
    throw IndexOutOfRange("rank beyond the admitted-set size");
}

std::vector<std::pair<BitString, Integer>> BlockEnumerator::all(std::uint64_t max_entries) const {
    std::vector<std::pair<BitString, Integer>> out;
    if (!fast_ && order_ == EnumOrder::exact) {
        // One pruned lexicographic walk collects the whole enumeration.
        std::uint64_t nodes = 0;
        BitString path;
        Integer rank = 0;
        auto walk = [&](auto&& self, const ModelCursor& cursor, std::uint64_t remaining) -> void {
            if (++nodes > limits_.node_budget)
                throw TraversalBudgetExceeded("enumeration node budget exhausted");
            if (remaining == 0) {
                if (admitted(cursor.capital())) {
                    if (out.size() >= max_entries)
                        throw ExhaustiveBoundExceeded("admitted set too large to materialize");
                    rank += 1;
                    out.emplace_back(path, rank);
                }
                return;
            }
            if (cmp_product(cursor.capital(), cursor.completion_bound(remaining), d_) <= 0) return;
            for (int b = 0; b < 2; ++b) {
                path.push_back(b != 0);
                self(self, cursor.advanced(b != 0), remaining - 1);
                path = path.prefix(path.size() - 1);
            }
        };
        walk(walk, prefix_, k_);
        return out;
    }
    Integer total = size();
    if (cmp(total, Integer(max_entries)) > 0)
        throw ExhaustiveBoundExceeded("admitted set too large to materialize");
    unsigned long count = total.get_ui();
    out.reserve(count);
    for (unsigned long r = 1; r <= count; ++r)
        out.emplace_back(string_at(Integer(r)), Integer(r));
    return out;
}

// ------------------------------------------------------------ free wrappers

namespace {

EnumOrder order_for(const MartingaleModel& m) {
    return m.staged_enumeration() ? EnumOrder::staged : EnumOrder::exact;
}

ModelCursor cursor_at(const MartingaleModel& m, const BitString& prefix) {
    ModelCursor c = m.start();
    c.advance(prefix);
    return c;
}

}  // namespace

std::vector<std::pair<BitString, Integer>> enumerate_admitted(
    const MartingaleModel& m, const BitString& prefix, std::uint64_t k, const Rational& d,
    EnumOrder order, EnumLimits limits, std::uint64_t max_entries) {
    return BlockEnumerator(cursor_at(m, prefix), k, d, order, limits).all(max_entries);
}

Integer string_to_index(const MartingaleModel& m, const BitString& prefix, std::uint64_t k,
                        const Rational& d, const BitString& u, EnumOrder order, EnumLimits limits) {
    return BlockEnumerator(cursor_at(m, prefix), k, d, order, limits).rank_of(u);
}

BitString index_to_string(const MartingaleModel& m, const BitString& prefix, std::uint64_t k,
                          const Rational& d, const Integer& p, EnumOrder order, EnumLimits limits) {
    return BlockEnumerator(cursor_at(m, prefix), k, d, order, limits).string_at(p);
}

// ------------------------------------------------------------------- codec

namespace {

std::pair<OracleStream, std::vector<BlockRecord>> encode_impl(const BitSource& source,
                                                              const MartingaleModel& m,
                                                              const BlockSchedule& sched,
                                                              std::uint32_t block_count,
                                                              EnumLimits limits, bool trace) {
    if (block_count == 0) throw ParameterOutOfRange("at least one block is required");
    BitString s = source.prefix(sched.n(block_count));
    EnumOrder order = order_for(m);
    ModelCursor cur = m.start();
    BitWriter payload;
    std::vector<BlockRecord> records;
    for (std::uint32_t i = 0; i < block_count; ++i) {
        std::uint64_t kk = sched.k(i);
        BitString block = s.slice(sched.n(i), kk);
        ModelCursor block_start = cur;
        cur.advance(block);
        Dyadic d = approximate_below(cur.capital(), i);
        BlockEnumerator en(block_start, kk, d.to_rational(), order, limits);
        Integer p = en.rank_of(block);  // the sandwich guarantees admission
        BitString index_code = enc_nat(p);
        BitString threshold_code = encode_threshold(d);
        payload.write(index_code);
        payload.write(threshold_code);
        if (trace) {
            BlockRecord rec;
            rec.i = i;
            rec.k = kk;
            rec.n_end = sched.n(i + 1);
            rec.index = p;
            rec.threshold = d;
            rec.admitted_size = en.size();
            rec.capital_before = block_start.capital();
            rec.capital_after = cur.capital();
            rec.index_bits = index_code.size();
            rec.threshold_bits = threshold_code.size();
            records.push_back(std::move(rec));
        }
    }
    OracleStream stream;
    stream.block_coded = true;
    stream.model_spec = m.spec_bytes();
    stream.schedule = sched;
    stream.block_count = block_count;
    stream.payload = payload.take();
    return {std::move(stream), std::move(records)};
}

}  // namespace

OracleStream encode_blocks(const BitSource& source, const MartingaleModel& m,
                           const BlockSchedule& sched, std::uint32_t block_count,
                           EnumLimits limits) {
    return encode_impl(source, m, sched, block_count, limits, false).first;
}

std::pair<OracleStream, std::vector<BlockRecord>> encode_blocks_traced(
    const BitSource& source, const MartingaleModel& m, const BlockSchedule& sched,
    std::uint32_t block_count, EnumLimits limits) {
    return encode_impl(source, m, sched, block_count, limits, true);
}

std::pair<BitString, std::uint64_t> decode_blocks_from(BitCursor& reader, std::uint64_t n,
                                                       const MartingaleModel& m,
                                                       const BlockSchedule& sched,
                                                       EnumLimits limits) {
    std::uint64_t needed = sched.blocks_covering(n);
    EnumOrder order = order_for(m);
    std::uint64_t start = reader.consumed();
    ModelCursor cur = m.start();
    BitString out;
    for (std::uint64_t i = 0; i < needed; ++i) {
        Integer p = sigma_inverse(dec(reader));
        if (cmp(p, Integer(1)) < 0) throw IndexOutOfRange("ranks start at 1");
        Dyadic d = decode_threshold(reader);
        BlockEnumerator en(cur, sched.k(i), d.to_rational(), order, limits);
        BitString block = en.string_at(p);
        cur.advance(block);
        out.append(block);
    }
    return {out.prefix(n), reader.consumed() - start};
}

std::pair<BitString, std::uint64_t> decode_prefix(const OracleStream& stream, std::uint64_t n,
                                                  const MartingaleModel& m,
                                                  const BlockSchedule& sched, EnumLimits limits) {
    if (!stream.block_coded) throw MalformedCode("stream is not block-coded");
    if (m.spec_bytes() != stream.model_spec) throw ModelMismatch("stream encoded with a different model");
    if (sched != stream.schedule) throw ModelMismatch("stream encoded with a different schedule");
    if (sched.blocks_covering(n) > stream.block_count)
        throw InsufficientBlocks("stream holds fewer blocks than the prefix needs");
    BitReader reader(stream.payload);
    return decode_blocks_from(reader, n, m, sched, limits);
}

OracleStream passthrough_encode(const BitSource& source, std::uint64_t n) {
    OracleStream stream;
    stream.block_coded = false;
    stream.model_spec = {0x00};
    stream.schedule = BlockSchedule::paper();
    stream.block_count = 0;
    stream.payload = source.prefix(n);
    return stream;
}

std::pair<BitString, std::uint64_t> passthrough_decode(const OracleStream& stream,
                                                       std::uint64_t n) {
    if (stream.block_coded) throw MalformedCode("stream is not in passthrough mode");
    if (n > stream.payload.size()) throw MalformedCode("passthrough payload truncated");
    return {stream.payload.prefix(n), n};
}

}  // namespace gale
