#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gale/blockcodec.hpp"

namespace gale {

// Accounting mode for query usage: number of distinct queried indices, or the
// index just past the rightmost queried bit. The two coincide for machines
// that read their oracle sequentially.
enum class UsageMode { distinct, rightmost };

// Records the set of oracle indices a machine queried. Repeat queries to an
// index change nothing.
class QueryLedger {
public:
    void record(std::uint64_t index) { indices_.insert(index); }

    std::uint64_t distinct_count() const { return indices_.size(); }
    std::uint64_t rightmost_usage() const {
        return indices_.empty() ? 0 : *indices_.rbegin() + 1;
    }
    std::uint64_t usage(UsageMode mode) const {
        return mode == UsageMode::distinct ? distinct_count() : rightmost_usage();
    }
    const std::set<std::uint64_t>& indices() const { return indices_; }

private:
    std::set<std::uint64_t> indices_;
};

// Query interface handed to machines. Implementations decide where bits come
// from and what bookkeeping happens.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual bool query(std::uint64_t index) = 0;
};

// Oracle over a finite bit string, recording every query in a ledger.
// Queries past the end throw OracleExhausted.
class LedgeredOracle final : public Oracle {
public:
    LedgeredOracle(const BitString& bits, QueryLedger& ledger) : bits_(&bits), ledger_(&ledger) {}

    bool query(std::uint64_t index) override {
        if (index >= bits_->size()) throw OracleExhausted("query beyond provided oracle data");
        ledger_->record(index);
        return (*bits_)[index];
    }

private:
    const BitString* bits_;
    QueryLedger* ledger_;
};

// Deterministic machine computing prefixes of one sequence from an oracle:
// same n and same oracle answers give the same output and the same queries,
// and the output for n is a prefix of the output for n+1.
class OracleMachine {
public:
    virtual ~OracleMachine() = default;
    virtual std::string name() const = 0;
    virtual BitString compute(std::uint64_t n, Oracle& oracle) const = 0;
};

using MachinePtr = std::shared_ptr<const OracleMachine>;

// Output bit j = oracle bit j.
MachinePtr copier_machine();

// Reads m oracle bits per output bit and outputs every m-th: output bit j is
// oracle bit m·j, and computing n bits queries exactly indices [0, m·n).
MachinePtr inflate_machine(std::uint64_t m);

// Decodes a block-coded payload served bit-by-bit through the oracle,
// querying payload indices sequentially from 0.
MachinePtr block_decoder_machine(ModelPtr model, BlockSchedule sched, EnumLimits limits = {});

// Demand-driven composition: m1 runs with a virtual oracle whose bit j is
// produced by running m2 for just enough output, against the real oracle.
// Only real-oracle queries reach the ledger. Repeated reproduction of inner
// bits is harmless: distinct indices are counted once.
MachinePtr compose(MachinePtr m1, MachinePtr m2);

struct RunResult {
    BitString output;
    QueryLedger ledger;
};

// Run M to produce n bits against a finite oracle, with exact accounting.
RunResult run(const OracleMachine& machine, const BitString& oracle_bits, std::uint64_t n);

struct ProfilePoint {
    std::uint64_t n = 0;
    std::uint64_t usage = 0;
    Rational ratio;  // usage/n, exact
};

// Finite-n usage ratios, plus min and max over the trailing window. These are
// explicitly finite proxies; no limit is claimed.
struct RatioProfile {
    std::vector<ProfilePoint> points;  // n = 1..n_max
    std::uint64_t window = 0;
    Rational tail_min;
    Rational tail_max;
};

// Profile the machine over output lengths 1..n_max, checking each output
// against the expected bits (OutputMismatch otherwise).
RatioProfile ratio_profile(const OracleMachine& machine, const BitString& oracle_bits,
                           const BitString& expected, std::uint64_t n_max, std::uint64_t window,
                           UsageMode mode = UsageMode::distinct);

}  // namespace gale
