#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gale/bitstring.hpp"
#include "gale/gales.hpp"
#include "gale/source.hpp"
#include "gale/threshold.hpp"

namespace gale {

// Block-length schedule. Block i (i >= 0) spans bit offsets [n(i), n(i+1))
// with k(i) = i+1 in paper mode, or k(i) = min(i+1, k_max) when capped.
class BlockSchedule {
public:
    static BlockSchedule paper() { return BlockSchedule(0); }
    static BlockSchedule capped(std::uint16_t k_max);

    std::uint64_t k(std::uint64_t i) const;
    std::uint64_t n(std::uint64_t i) const;
    // The unique i with n(i) <= pos < n(i+1).
    std::uint64_t locate(std::uint64_t pos) const;
    // Number of leading blocks needed to cover a prefix of the given length.
    std::uint64_t blocks_covering(std::uint64_t prefix_len) const;

    bool is_paper() const { return k_max_ == 0; }
    std::uint16_t k_max() const { return k_max_; }  // 0 encodes paper mode

    bool operator==(const BlockSchedule& other) const { return k_max_ == other.k_max_; }
    bool operator!=(const BlockSchedule& other) const { return k_max_ != other.k_max_; }

private:
    explicit BlockSchedule(std::uint16_t k_max) : k_max_(k_max) {}
    std::uint16_t k_max_;
};

enum class EnumOrder { exact, staged };

// Resource caps for enumeration searches; they turn the construction's
// non-halting cases (rank too large, stream/model mismatch) into reported
// errors, and keep corrupt streams from running away.
struct EnumLimits {
    std::uint64_t node_budget = 1ull << 24;
    std::uint64_t stage_budget = 1ull << 20;
};

// The admitted set A = {u in {0,1}^k : value(prefix·u) > d} with its
// enumeration order. Exact order is lexicographic. Staged order replays the
// stage loop: for t = 0,1,2,..., scan not-yet-admitted u lexicographically
// and admit when staged(prefix·u, t) > d.
//
// One enumerator implementation serves encoder and decoder, so the two can
// never disagree on ranks. For models whose block values depend only on the
// ones count, membership is decided per count class and ranks are computed
// combinatorially; otherwise a pruned tree search is used (pruning at any v
// with value(prefix·v)·completion_bound <= d, which cannot exclude an
// admitted leaf).
class BlockEnumerator {
public:
    BlockEnumerator(ModelCursor prefix, std::uint64_t k, Rational threshold, EnumOrder order,
                    EnumLimits limits = {});

    Integer size() const;
    // Admission rank of the block, starting at 1. Throws NotAdmitted when the
    // block fails the threshold.
    Integer rank_of(const BitString& block) const;
    // Inverse of rank_of. Throws IndexOutOfRange when rank < 1 or beyond the
    // admitted-set size.
    BitString string_at(const Integer& rank) const;
    // Materialized (string, rank) pairs in enumeration order, for bounded
    // sets only.
    std::vector<std::pair<BitString, Integer>> all(std::uint64_t max_entries = 1ull << 20) const;

private:
    struct ClassGroup {
        std::vector<std::uint64_t> ones_classes;  // ascending; lex-merged within a group
        Integer count;
    };

    bool admitted(const Rational& capital) const;
    Integer count_in_classes(std::uint64_t suffix_len, const std::vector<std::uint64_t>& classes,
                             std::uint64_t ones_used) const;
    Integer rank_within_classes(const BitString& block,
                                const std::vector<std::uint64_t>& classes) const;
    BitString unrank_within_classes(Integer index,
                                    const std::vector<std::uint64_t>& classes) const;

    Integer generic_count(const ModelCursor& cursor, std::uint64_t remaining,
                          std::uint64_t& nodes) const;
    void build_staged_generic();

    ModelCursor prefix_;
    std::uint64_t k_;
    Rational d_;
    EnumOrder order_;
    EnumLimits limits_;

    bool fast_ = false;
    std::vector<ClassGroup> groups_;  // fast path, in enumeration order

    // staged generic path: admitted strings in enumeration order
    std::vector<BitString> staged_list_;
};

// Compressed stream: header metadata plus the concatenated
// enc(p_i)·threshold(d_i) records (block-coded mode) or raw copied bits
// (passthrough mode).
struct OracleStream {
    bool block_coded = true;  // the combined construction's mode bit
    std::vector<std::uint8_t> model_spec;
    BlockSchedule schedule = BlockSchedule::paper();
    std::uint32_t block_count = 0;
    BitString payload;
};

// Per-block diagnostics; never serialized.
struct BlockRecord {
    std::uint64_t i = 0;
    std::uint64_t k = 0;
    std::uint64_t n_end = 0;
    Integer index;          // p, 1-based admission rank
    Dyadic threshold;       // d
    Integer admitted_size;  // |A|
    Rational capital_before;
    Rational capital_after;
    std::uint64_t index_bits = 0;      // |enc(p)|
    std::uint64_t threshold_bits = 0;  // |encode_threshold(d)|
};

std::uint64_t locate_block(const BlockSchedule& sched, std::uint64_t pos);

// The admission threshold of these three operations is any positive exact
// rational; block codecs pass the dyadic wire thresholds through to_rational.
std::vector<std::pair<BitString, Integer>> enumerate_admitted(
    const MartingaleModel& m, const BitString& prefix, std::uint64_t k, const Rational& d,
    EnumOrder order, EnumLimits limits = {}, std::uint64_t max_entries = 1ull << 20);

Integer string_to_index(const MartingaleModel& m, const BitString& prefix, std::uint64_t k,
                        const Rational& d, const BitString& u, EnumOrder order,
                        EnumLimits limits = {});

BitString index_to_string(const MartingaleModel& m, const BitString& prefix, std::uint64_t k,
                          const Rational& d, const Integer& p, EnumOrder order,
                          EnumLimits limits = {});

// Encode the first B blocks of the source. Per block i over bits
// [n(i), n(i+1)): the threshold approximates the capital at the block's end
// with slack index i, so the true block is always admitted, and the record
// enc(p_i)·threshold(d_i) is appended to the payload.
OracleStream encode_blocks(const BitSource& source, const MartingaleModel& m,
                           const BlockSchedule& sched, std::uint32_t block_count,
                           EnumLimits limits = {});
std::pair<OracleStream, std::vector<BlockRecord>> encode_blocks_traced(
    const BitSource& source, const MartingaleModel& m, const BlockSchedule& sched,
    std::uint32_t block_count, EnumLimits limits = {});

// Cursor-level decode loop: reads enc(p_i)·threshold(d_i) records off the
// cursor for exactly the blocks covering n bits, reconstructing the prefix.
// Returns the bits and the number of cursor bits consumed.
std::pair<BitString, std::uint64_t> decode_blocks_from(BitCursor& reader, std::uint64_t n,
                                                       const MartingaleModel& m,
                                                       const BlockSchedule& sched,
                                                       EnumLimits limits = {});

// Reconstruct the first n source bits from a block-coded stream, returning
// the exact number of payload bits consumed (header bits are not counted;
// every payload bit is counted once).
std::pair<BitString, std::uint64_t> decode_prefix(const OracleStream& stream, std::uint64_t n,
                                                  const MartingaleModel& m,
                                                  const BlockSchedule& sched,
                                                  EnumLimits limits = {});

// Trivial bit-copier mode.
OracleStream passthrough_encode(const BitSource& source, std::uint64_t n);
std::pair<BitString, std::uint64_t> passthrough_decode(const OracleStream& stream,
                                                       std::uint64_t n);

}  // namespace gale
