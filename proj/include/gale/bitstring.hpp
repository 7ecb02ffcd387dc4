#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gale/errors.hpp"

namespace gale {

// Finite binary string. The empty string is valid; bit 0 is the leftmost.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::vector<bool> bits) : bits_(std::move(bits)) {}

    // Parse from '0'/'1' characters; throws MalformedCode on anything else.
    static BitString parse(std::string_view text);
    static BitString zeros(std::size_t n) { return BitString(std::vector<bool>(n, false)); }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i]; }

    void push_back(bool bit) { bits_.push_back(bit); }
    void append(const BitString& other);

    BitString prefix(std::size_t n) const;
    BitString slice(std::size_t pos, std::size_t len) const;

    bool is_prefix_of(const BitString& other) const;

    std::string str() const;

    bool operator==(const BitString& other) const { return bits_ == other.bits_; }
    bool operator!=(const BitString& other) const { return bits_ != other.bits_; }

    const std::vector<bool>& bits() const { return bits_; }

private:
    std::vector<bool> bits_;
};

// Sequential bit producer. Exhaustion is always an error, never a silent
// truncation; implementations throw their own error type.
class BitCursor {
public:
    virtual ~BitCursor() = default;
    virtual bool next() = 0;
    virtual std::uint64_t consumed() const = 0;
};

// Cursor over an in-memory BitString. Throws MalformedCode past the end.
class BitReader final : public BitCursor {
public:
    explicit BitReader(const BitString& data) : data_(&data) {}

    bool next() override {
        if (pos_ >= data_->size()) throw MalformedCode("bit stream exhausted");
        return (*data_)[pos_++];
    }

    std::uint64_t consumed() const override { return pos_; }
    std::uint64_t remaining() const { return data_->size() - pos_; }

private:
    const BitString* data_;
    std::size_t pos_ = 0;
};

// Accumulates bits; output length always equals the sum of written lengths.
class BitWriter {
public:
    void write(bool bit) { out_.push_back(bit); }
    void write(const BitString& bits) { out_.append(bits); }
    std::uint64_t written() const { return out_.size(); }
    const BitString& result() const { return out_; }
    BitString take() { return std::move(out_); }

private:
    BitString out_;
};

}  // namespace gale
