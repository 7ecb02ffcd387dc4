#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "gale/bitstring.hpp"

namespace gale {

// Restartable deterministic bit generator: the same source yields the same
// bit at the same index, across runs and platforms.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual bool bit(std::uint64_t index) const = 0;
    virtual std::string describe() const = 0;

    BitString prefix(std::uint64_t n) const {
        BitString out;
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(bit(i));
        return out;
    }
};

using SourcePtr = std::shared_ptr<const BitSource>;

// Finite bits provided up front; indexing past the end is an error.
class FixedSource final : public BitSource {
public:
    explicit FixedSource(BitString bits) : bits_(std::move(bits)) {}

    bool bit(std::uint64_t index) const override {
        if (index >= bits_.size()) throw ParameterOutOfRange("fixed source exhausted");
        return bits_[index];
    }
    std::string describe() const override { return "fixed[" + std::to_string(bits_.size()) + "]"; }

private:
    BitString bits_;
};

}  // namespace gale
