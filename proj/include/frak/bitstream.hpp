#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "frak/entropy_pool.hpp"
#include "frak/image.hpp"
#include "frak/matcher.hpp"

namespace frak {

inline constexpr std::array<char, 4> kStreamMagic = {'F', 'R', 'A', 'K'};
inline constexpr std::uint8_t kStreamVersion = 1;

/// One coded range block.
struct MatchRecord {
    std::uint8_t step = 1;    // 1..4
    std::uint8_t offset = 0;  // stored luminance offset
    std::uint8_t isometry = 0;
    std::uint32_t domain_address = 0;
    std::uint8_t s_index = 0;

    friend bool operator==(const MatchRecord &, const MatchRecord &) = default;
};

struct LevelHeader {
    int stride = 1;
    std::vector<double> s_values;
    std::vector<std::array<std::uint16_t, 2>> origins;  // (x, y) of each pool entry

    friend bool operator==(const LevelHeader &, const LevelHeader &) = default;
};

struct StreamHeader {
    int width = 0;
    int height = 0;
    SMode mode = SMode::proposed;
    std::array<LevelHeader, kLevels> levels;

    const LevelHeader &level(int step) const { return levels[step - 1]; }

    friend bool operator==(const StreamHeader &, const StreamHeader &) = default;
};

/// Header plus records in depth-first quadtree order (16x16 slots in raster
/// order; children top-left, top-right, bottom-left, bottom-right).
struct CompressedStream {
    StreamHeader header;
    std::vector<MatchRecord> records;

    friend bool operator==(const CompressedStream &, const CompressedStream &) = default;
};

/// ceil(log2(n)), 0 for n <= 1.
int address_bits(std::size_t pool_size);
int s_index_bits(std::size_t set_size);
/// Bits of one record at a step: 2 + 8 + 3 + address + s-index.
int record_bits(const StreamHeader &header, int step);

std::size_t header_bytes(const StreamHeader &header);
std::size_t payload_bits(const CompressedStream &stream);

/// A record placed in the image.
struct Leaf {
    BlockView range;
    std::size_t record = 0;
};

/// Recovers range geometry from step fields. Throws StepInconsistency or
/// TruncatedStream when the records do not exactly tile the image.
std::vector<Leaf> layout(const CompressedStream &stream);

/// Throws if the stream violates tiling or field-range invariants.
void validate(const CompressedStream &stream);

std::vector<std::uint8_t> serialize(const CompressedStream &stream);
CompressedStream deserialize(std::span<const std::uint8_t> bytes);

/// MSB-first bit packing.
class BitWriter {
  public:
    void put(std::uint32_t value, int bits);
    std::size_t bit_count() const noexcept { return bits_; }
    /// Pads the last byte with zeros and returns the buffer.
    std::vector<std::uint8_t> finish() &&;

  private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

class BitReader {
  public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t get(int bits);
    std::uint32_t peek(int bits) const;
    std::size_t remaining() const noexcept { return bytes_.size() * 8 - pos_; }
    std::size_t position() const noexcept { return pos_; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace frak
