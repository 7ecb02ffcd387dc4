#include "gale/container.hpp"

#include "gale/gales.hpp"

namespace gale {

namespace {

constexpr char kMagic[4] = {'G', 'A', 'L', 'E'};
constexpr std::uint8_t kVersion = 0x01;

void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint8_t need_byte(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    if (pos >= bytes.size()) throw MalformedCode("container truncated");
    return bytes[pos++];
}

std::uint16_t get_u16le(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    std::uint16_t v = need_byte(bytes, pos);
    v |= static_cast<std::uint16_t>(need_byte(bytes, pos)) << 8;
    return v;
}

std::uint32_t get_u32le(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(need_byte(bytes, pos)) << (8 * i);
    return v;
}

std::uint64_t get_u64le(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(need_byte(bytes, pos)) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> write_container(const OracleStream& stream) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(stream.block_coded ? 0x01 : 0x00);
    out.insert(out.end(), stream.model_spec.begin(), stream.model_spec.end());
    put_u16le(out, stream.schedule.k_max());
    put_u32le(out, stream.block_count);
    put_u64le(out, stream.payload.size());
    std::uint8_t byte = 0;
    for (std::size_t i = 0; i < stream.payload.size(); ++i) {
        byte |= static_cast<std::uint8_t>(stream.payload[i] ? 1 : 0) << (7 - (i % 8));
        if (i % 8 == 7) {
            out.push_back(byte);
            byte = 0;
        }
    }
    if (stream.payload.size() % 8 != 0) out.push_back(byte);
    return out;
}

OracleStream read_container(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    for (char c : kMagic)
        if (need_byte(bytes, pos) != static_cast<std::uint8_t>(c))
            throw MalformedCode("bad container magic");
    if (need_byte(bytes, pos) != kVersion) throw MalformedCode("unsupported container version");
    std::uint8_t mode = need_byte(bytes, pos);
    if (mode != 0x00 && mode != 0x01) throw MalformedCode("unknown container mode");

    std::size_t model_start = pos;
    parse_model_bytes(bytes, pos);  // validates; length is implicit in the encoding
    std::vector<std::uint8_t> model_spec(bytes.begin() + static_cast<std::ptrdiff_t>(model_start),
                                         bytes.begin() + static_cast<std::ptrdiff_t>(pos));

    std::uint16_t k_max = get_u16le(bytes, pos);
    std::uint32_t block_count = get_u32le(bytes, pos);
    std::uint64_t bit_length = get_u64le(bytes, pos);

    std::size_t remaining = bytes.size() - pos;
    unsigned __int128 capacity = static_cast<unsigned __int128>(remaining) * 8;
    if (bit_length > capacity) throw MalformedCode("declared payload length exceeds container");
    if (capacity >= bit_length + 8) throw MalformedCode("trailing bytes after payload");

    BitString payload;
    for (std::uint64_t i = 0; i < bit_length; ++i) {
        std::uint8_t byte = bytes[pos + i / 8];
        payload.push_back(((byte >> (7 - (i % 8))) & 1) != 0);
    }
    // Padding must be zero.
    if (bit_length % 8 != 0) {
        std::uint8_t last = bytes[pos + (bit_length - 1) / 8];
        std::uint8_t mask = static_cast<std::uint8_t>(0xFF >> (bit_length % 8));
        if ((last & mask) != 0) throw MalformedCode("nonzero payload padding");
    }

    OracleStream stream;
    stream.block_coded = mode == 0x01;
    stream.model_spec = std::move(model_spec);
    stream.schedule = k_max == 0 ? BlockSchedule::paper() : BlockSchedule::capped(k_max);
    stream.block_count = block_count;
    stream.payload = std::move(payload);
    return stream;
}

}  // namespace gale
