#include "gale/otm.hpp"

#include <algorithm>

#include "gale/codes.hpp"

namespace gale {

namespace {

class CopierMachine final : public OracleMachine {
public:
    std::string name() const override { return "copier"; }
    BitString compute(std::uint64_t n, Oracle& oracle) const override {
        BitString out;
        for (std::uint64_t j = 0; j < n; ++j) out.push_back(oracle.query(j));
        return out;
    }
};

class InflateMachine final : public OracleMachine {
public:
    explicit InflateMachine(std::uint64_t m) : m_(m) {
        if (m_ < 1) throw ParameterOutOfRange("inflate factor must be at least 1");
    }

    std::string name() const override { return "inflate(" + std::to_string(m_) + ")"; }

    BitString compute(std::uint64_t n, Oracle& oracle) const override {
        BitString out;
        for (std::uint64_t j = 0; j < n; ++j) {
            bool kept = false;
            for (std::uint64_t t = 0; t < m_; ++t) {
                bool b = oracle.query(m_ * j + t);
                if (t == 0) kept = b;
            }
            out.push_back(kept);
        }
        return out;
    }

private:
    std::uint64_t m_;
};

// Serves a machine's oracle queries at sequential indices.
class SequentialOracleCursor final : public BitCursor {
public:
    explicit SequentialOracleCursor(Oracle& oracle) : oracle_(&oracle) {}
    bool next() override { return oracle_->query(pos_++); }
    std::uint64_t consumed() const override { return pos_; }

private:
    Oracle* oracle_;
    std::uint64_t pos_ = 0;
};

class BlockDecoderMachine final : public OracleMachine {
public:
    BlockDecoderMachine(ModelPtr model, BlockSchedule sched, EnumLimits limits)
        : model_(std::move(model)), sched_(sched), limits_(limits) {
        if (!model_) throw ParameterOutOfRange("decoder machine needs a model");
    }

    std::string name() const override { return "blockdec(" + model_->name() + ")"; }

    BitString compute(std::uint64_t n, Oracle& oracle) const override {
        SequentialOracleCursor cursor(oracle);
        return decode_blocks_from(cursor, n, *model_, sched_, limits_).first;
    }

private:
    ModelPtr model_;
    BlockSchedule sched_;
    EnumLimits limits_;
};

class ComposedMachine final : public OracleMachine {
public:
    ComposedMachine(MachinePtr m1, MachinePtr m2) : m1_(std::move(m1)), m2_(std::move(m2)) {
        if (!m1_ || !m2_) throw ParameterOutOfRange("compose needs two machines");
    }

    std::string name() const override { return "compose(" + m1_->name() + "," + m2_->name() + ")"; }

    BitString compute(std::uint64_t n, Oracle& oracle) const override {
        InnerOracle inner(*m2_, oracle);
        return m1_->compute(n, inner);
    }

private:
    // Bits of the intermediate sequence, produced on demand by running the
    // inner machine for the minimum output length that covers the query.
    class InnerOracle final : public Oracle {
    public:
        InnerOracle(const OracleMachine& producer, Oracle& outer)
            : producer_(&producer), outer_(&outer) {}

        bool query(std::uint64_t index) override {
            if (index >= cache_.size()) {
                BitString bits = producer_->compute(index + 1, *outer_);
                if (bits.size() <= index)
                    throw OracleExhausted("inner machine produced too few bits");
                cache_ = bits.bits();
            }
            return cache_[index];
        }

    private:
        const OracleMachine* producer_;
        Oracle* outer_;
        std::vector<bool> cache_;
    };

    MachinePtr m1_;
    MachinePtr m2_;
};

}  // namespace

MachinePtr copier_machine() { return std::make_shared<CopierMachine>(); }

MachinePtr inflate_machine(std::uint64_t m) { return std::make_shared<InflateMachine>(m); }

MachinePtr block_decoder_machine(ModelPtr model, BlockSchedule sched, EnumLimits limits) {
    return std::make_shared<BlockDecoderMachine>(std::move(model), sched, limits);
}

MachinePtr compose(MachinePtr m1, MachinePtr m2) {
    return std::make_shared<ComposedMachine>(std::move(m1), std::move(m2));
}

RunResult run(const OracleMachine& machine, const BitString& oracle_bits, std::uint64_t n) {
    RunResult result;
    LedgeredOracle oracle(oracle_bits, result.ledger);
    result.output = machine.compute(n, oracle);
    return result;
}

RatioProfile ratio_profile(const OracleMachine& machine, const BitString& oracle_bits,
                           const BitString& expected, std::uint64_t n_max, std::uint64_t window,
                           UsageMode mode) {
    if (n_max == 0) throw ParameterOutOfRange("profile needs at least one output length");
    if (expected.size() < n_max) throw ParameterOutOfRange("expected bits shorter than n_max");
    RatioProfile profile;
    profile.window = std::min<std::uint64_t>(window == 0 ? n_max : window, n_max);
    profile.points.reserve(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        RunResult r = run(machine, oracle_bits, n);
        if (r.output != expected.prefix(n))
            throw OutputMismatch("reduction does not compute the expected sequence");
        ProfilePoint point;
        point.n = n;
        point.usage = r.ledger.usage(mode);
        point.ratio = make_rational(Integer(static_cast<unsigned long>(point.usage)),
                                    Integer(static_cast<unsigned long>(n)));
        profile.points.push_back(std::move(point));
    }
    std::size_t first_tail = profile.points.size() - static_cast<std::size_t>(profile.window);
    profile.tail_min = profile.points[first_tail].ratio;
    profile.tail_max = profile.points[first_tail].ratio;
    for (std::size_t i = first_tail + 1; i < profile.points.size(); ++i) {
        profile.tail_min = std::min(profile.tail_min, profile.points[i].ratio);
        profile.tail_max = std::max(profile.tail_max, profile.points[i].ratio);
    }
    return profile;
}

}  // namespace gale
