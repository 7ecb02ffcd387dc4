#include "gale/bitstring.hpp"

namespace gale {

BitString BitString::parse(std::string_view text) {
    std::vector<bool> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c == '0') {
            bits.push_back(false);
        } else if (c == '1') {
            bits.push_back(true);
        } else {
            throw MalformedCode(std::string("invalid bit character '") + c + "'");
        }
    }
    return BitString(std::move(bits));
}

void BitString::append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitString BitString::prefix(std::size_t n) const { return slice(0, n); }

BitString BitString::slice(std::size_t pos, std::size_t len) const {
    if (pos + len > bits_.size()) throw MalformedCode("slice beyond end of bit string");
    return BitString(std::vector<bool>(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                       bits_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

bool BitString::is_prefix_of(const BitString& other) const {
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (bits_[i] != other.bits_[i]) return false;
    return true;
}

std::string BitString::str() const {
    std::string s;
    s.reserve(size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

}  // namespace gale
