#include "frak/bitstream.hpp"

#include <bit>
#include <cstring>
#include <string>

namespace frak {

int address_bits(std::size_t pool_size) {
    int bits = 0;
    while ((std::size_t{1} << bits) < pool_size) {
        ++bits;
    }
    return bits;
}

int s_index_bits(std::size_t set_size) { return address_bits(set_size); }

int record_bits(const StreamHeader &header, int step) {
    const LevelHeader &lv = header.level(step);
    return 2 + 8 + 3 + address_bits(lv.origins.size()) + s_index_bits(lv.s_values.size());
}

std::size_t header_bytes(const StreamHeader &header) {
    std::size_t bytes = 4 + 1 + 1 + 2 + 2;
    for (const LevelHeader &lv : header.levels) {
        bytes += 2 + 1 + 8 * lv.s_values.size() + 4 + 4 * lv.origins.size();
    }
    return bytes;
}

std::size_t payload_bits(const CompressedStream &stream) {
    std::size_t bits = 0;
    for (const MatchRecord &r : stream.records) {
        bits += static_cast<std::size_t>(record_bits(stream.header, r.step));
    }
    return bits;
}

void BitWriter::put(std::uint32_t value, int bits) {
    for (int i = bits - 1; i >= 0; --i) {
        if (bits_ % 8 == 0) {
            bytes_.push_back(0);
        }
        if ((value >> i) & 1u) {
            bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
        }
        ++bits_;
    }
}

std::vector<std::uint8_t> BitWriter::finish() && { return std::move(bytes_); }

std::uint32_t BitReader::peek(int bits) const {
    if (remaining() < static_cast<std::size_t>(bits)) {
        throw Error(ErrorCode::truncated_stream, "payload ends inside a record");
    }
    std::uint32_t value = 0;
    for (int i = 0; i < bits; ++i) {
        std::size_t p = pos_ + static_cast<std::size_t>(i);
        value = (value << 1) | ((bytes_[p / 8] >> (7 - p % 8)) & 1u);
    }
    return value;
}

std::uint32_t BitReader::get(int bits) {
    std::uint32_t value = peek(bits);
    pos_ += static_cast<std::size_t>(bits);
    return value;
}

namespace {

// Depth-first walk shared by layout() and the payload parser. `step_of`
// returns the step field of the next record, or throws when none is left.
template <typename StepOf, typename OnLeaf>
void walk_slot(int x, int y, int level, StepOf &step_of, OnLeaf &on_leaf) {
    const int step = step_of();
    if (step < level) {
        throw Error(ErrorCode::step_inconsistency, "record step " + std::to_string(step) + " inside a level-" +
                                                       std::to_string(level) + " slot");
    }
    if (step == level) {
        on_leaf(BlockView{x, y, range_side(level)});
        return;
    }
    const int half = range_side(level) / 2;
    walk_slot(x, y, level + 1, step_of, on_leaf);
    walk_slot(x + half, y, level + 1, step_of, on_leaf);
    walk_slot(x, y + half, level + 1, step_of, on_leaf);
    walk_slot(x + half, y + half, level + 1, step_of, on_leaf);
}

template <typename StepOf, typename OnLeaf>
void walk_image(int width, int height, StepOf &step_of, OnLeaf &on_leaf) {
    const int top = range_side(1);
    for (int y = 0; y < height; y += top) {
        for (int x = 0; x < width; x += top) {
            walk_slot(x, y, 1, step_of, on_leaf);
        }
    }
}

void check_geometry(int width, int height) {
    if (width <= 0 || height <= 0 || width % range_side(1) != 0 || height % range_side(1) != 0) {
        throw Error(ErrorCode::malformed_stream_header,
                    "dimensions " + std::to_string(width) + "x" + std::to_string(height) + " not positive multiples of 16");
    }
}

void check_record(const StreamHeader &header, const MatchRecord &r) {
    if (r.step < 1 || r.step > kLevels) {
        throw Error(ErrorCode::step_inconsistency, "step out of range");
    }
    if (r.isometry >= Isometry::count) {
        throw Error(ErrorCode::invalid_config, "isometry out of range");
    }
    const LevelHeader &lv = header.level(r.step);
    if (r.domain_address >= lv.origins.size()) {
        throw Error(ErrorCode::address_out_of_range, "domain address " + std::to_string(r.domain_address) +
                                                         " >= pool size " + std::to_string(lv.origins.size()) +
                                                         " at step " + std::to_string(r.step));
    }
    if (r.s_index >= lv.s_values.size()) {
        throw Error(ErrorCode::s_index_out_of_range, "s index " + std::to_string(r.s_index) + " at step " +
                                                         std::to_string(r.step));
    }
}

void check_header(const StreamHeader &header) {
    check_geometry(header.width, header.height);
    for (int step = 1; step <= kLevels; ++step) {
        const LevelHeader &lv = header.level(step);
        if (lv.stride < 1 || lv.stride > 65535) {
            throw Error(ErrorCode::malformed_stream_header, "stride out of range at step " + std::to_string(step));
        }
        if (lv.s_values.empty() || lv.s_values.size() > 255) {
            throw Error(ErrorCode::malformed_stream_header, "s set size out of range at step " + std::to_string(step));
        }
        for (double s : lv.s_values) {
            if (!(s >= 0.0 && s <= 1.0)) {
                throw Error(ErrorCode::malformed_stream_header, "s value outside [0,1]");
            }
        }
        const int dside = domain_side(step);
        for (const auto &o : lv.origins) {
            if (o[0] + dside > header.width || o[1] + dside > header.height) {
                throw Error(ErrorCode::malformed_stream_header, "domain origin outside image at step " +
                                                                    std::to_string(step));
            }
        }
    }
}

void put_u16(std::vector<std::uint8_t> &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    put_u16(out, v & 0xffff);
    put_u16(out, v >> 16);
}

void put_f64(std::vector<std::uint8_t> &out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    put_u32(out, static_cast<std::uint32_t>(bits & 0xffffffffu));
    put_u32(out, static_cast<std::uint32_t>(bits >> 32));
}

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u8() { return take(1)[0]; }
    std::uint32_t u16() {
        auto b = take(2);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8);
    }
    std::uint32_t u32() {
        std::uint32_t lo = u16();
        return lo | (u16() << 16);
    }
    double f64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return std::bit_cast<double>(lo | (hi << 32));
    }
    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

  private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::truncated_stream, "stream ends inside the header");
        }
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<Leaf> layout(const CompressedStream &stream) {
    check_geometry(stream.header.width, stream.header.height);
    std::vector<Leaf> leaves;
    leaves.reserve(stream.records.size());
    std::size_t next = 0;
    auto step_of = [&]() -> int {
        if (next >= stream.records.size()) {
            throw Error(ErrorCode::truncated_stream, "records end before the image is tiled");
        }
        return stream.records[next].step;
    };
    auto on_leaf = [&](BlockView range) { leaves.push_back(Leaf{range, next++}); };
    walk_image(stream.header.width, stream.header.height, step_of, on_leaf);
    if (next != stream.records.size()) {
        throw Error(ErrorCode::trailing_data, std::to_string(stream.records.size() - next) +
                                                  " records beyond the tiled image");
    }
    return leaves;
}

void validate(const CompressedStream &stream) {
    check_header(stream.header);
    for (const MatchRecord &r : stream.records) {
        check_record(stream.header, r);
    }
    layout(stream);
}

std::vector<std::uint8_t> serialize(const CompressedStream &stream) {
    validate(stream);
    const StreamHeader &h = stream.header;
    std::vector<std::uint8_t> out(kStreamMagic.begin(), kStreamMagic.end());
    out.push_back(kStreamVersion);
    out.push_back(static_cast<std::uint8_t>(h.mode));
    put_u16(out, static_cast<std::uint32_t>(h.width));
    put_u16(out, static_cast<std::uint32_t>(h.height));
    for (const LevelHeader &lv : h.levels) {
        put_u16(out, static_cast<std::uint32_t>(lv.stride));
        out.push_back(static_cast<std::uint8_t>(lv.s_values.size()));
        for (double s : lv.s_values) {
            put_f64(out, s);
        }
        put_u32(out, static_cast<std::uint32_t>(lv.origins.size()));
        for (const auto &o : lv.origins) {
            put_u16(out, o[0]);
            put_u16(out, o[1]);
        }
    }

    BitWriter bits;
    for (const MatchRecord &r : stream.records) {
        const LevelHeader &lv = h.level(r.step);
        bits.put(r.step - 1u, 2);
        bits.put(r.offset, 8);
        bits.put(r.isometry, 3);
        bits.put(r.domain_address, address_bits(lv.origins.size()));
        bits.put(r.s_index, s_index_bits(lv.s_values.size()));
    }
    auto payload = std::move(bits).finish();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

CompressedStream deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kStreamMagic.size() ||
        std::memcmp(bytes.data(), kStreamMagic.data(), kStreamMagic.size()) != 0) {
        throw Error(ErrorCode::bad_magic, "not a FRAK stream");
    }
    ByteReader in(bytes.subspan(kStreamMagic.size()));
    const std::uint32_t version = in.u8();
    if (version != kStreamVersion) {
        throw Error(ErrorCode::version_mismatch, "stream version " + std::to_string(version) + ", expected " +
                                                     std::to_string(kStreamVersion));
    }
    CompressedStream stream;
    StreamHeader &h = stream.header;
    const std::uint32_t mode = in.u8();
    if (mode > 1) {
        throw Error(ErrorCode::malformed_stream_header, "unknown policy identifier " + std::to_string(mode));
    }
    h.mode = static_cast<SMode>(mode);
    h.width = static_cast<int>(in.u16());
    h.height = static_cast<int>(in.u16());
    check_geometry(h.width, h.height);
    for (LevelHeader &lv : h.levels) {
        lv.stride = static_cast<int>(in.u16());
        const std::uint32_t ns = in.u8();
        for (std::uint32_t i = 0; i < ns; ++i) {
            lv.s_values.push_back(in.f64());
        }
        const std::uint32_t dn = in.u32();
        // each origin needs 4 bytes; reject impossible counts before allocating
        if (dn > in.rest().size() / 4) {
            throw Error(ErrorCode::truncated_stream, "pool list longer than the stream");
        }
        lv.origins.resize(dn);
        for (auto &o : lv.origins) {
            o[0] = static_cast<std::uint16_t>(in.u16());
            o[1] = static_cast<std::uint16_t>(in.u16());
        }
    }
    check_header(h);

    BitReader bits(in.rest());
    std::array<int, kLevels + 1> addr_bits{};
    std::array<int, kLevels + 1> s_bits{};
    for (int step = 1; step <= kLevels; ++step) {
        addr_bits[step] = address_bits(h.level(step).origins.size());
        s_bits[step] = s_index_bits(h.level(step).s_values.size());
    }
    auto step_of = [&]() -> int { return static_cast<int>(bits.peek(2)) + 1; };
    auto on_leaf = [&](BlockView) {
        MatchRecord r;
        r.step = static_cast<std::uint8_t>(bits.get(2) + 1);
        r.offset = static_cast<std::uint8_t>(bits.get(8));
        r.isometry = static_cast<std::uint8_t>(bits.get(3));
        r.domain_address = bits.get(addr_bits[r.step]);
        r.s_index = static_cast<std::uint8_t>(bits.get(s_bits[r.step]));
        check_record(h, r);
        stream.records.push_back(r);
    };
    walk_image(h.width, h.height, step_of, on_leaf);

    // only zero padding may follow, and only up to the byte boundary
    if (bits.remaining() >= 8) {
        throw Error(ErrorCode::trailing_data, std::to_string(bits.remaining() / 8) + " bytes after the last record");
    }
    if (bits.remaining() > 0 && bits.peek(static_cast<int>(bits.remaining())) != 0) {
        throw Error(ErrorCode::trailing_data, "non-zero padding bits");
    }
    return stream;
}

} // namespace frak
