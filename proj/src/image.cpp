#include "frak/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace frak {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::malformed_header: return "MalformedHeader";
    case ErrorCode::unsupported_maxval: return "UnsupportedMaxval";
    case ErrorCode::truncated_pixel_data: return "TruncatedPixelData";
    case ErrorCode::unsupported_dimensions: return "UnsupportedDimensions";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::empty_pool: return "EmptyPool";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::version_mismatch: return "VersionMismatch";
    case ErrorCode::malformed_stream_header: return "MalformedStreamHeader";
    case ErrorCode::truncated_stream: return "TruncatedStream";
    case ErrorCode::address_out_of_range: return "AddressOutOfRange";
    case ErrorCode::s_index_out_of_range: return "SIndexOutOfRange";
    case ErrorCode::step_inconsistency: return "StepInconsistency";
    case ErrorCode::trailing_data: return "TrailingData";
    }
    return "Unknown";
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) {
        throw Error(ErrorCode::unsupported_dimensions, "negative image dimensions");
    }
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 0 || height < 0 || pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::dimension_mismatch, "pixel count does not match width x height");
    }
}

Isometry Isometry::compose(Isometry first, Isometry second) noexcept {
    // Each element is mirror^m after rot^k. Moving a rotation past a mirror
    // reverses its direction, so the rotation of `second` flips sign when
    // `first` is mirrored.
    int m = (first.index_ >> 2) ^ (second.index_ >> 2);
    int k2 = second.quarter_turns();
    int k = (first.quarter_turns() + (first.mirrored() ? 4 - k2 : k2)) & 3;
    Isometry out;
    out.index_ = 4 * m + k;
    return out;
}

Isometry Isometry::inverse() const noexcept {
    // mirrored elements are involutions
    Isometry out;
    out.index_ = mirrored() ? index_ : (4 - quarter_turns()) & 3;
    return out;
}

std::vector<std::uint16_t> isometry_permutation(Isometry iso, int side) {
    std::vector<std::uint16_t> perm(static_cast<std::size_t>(side) * side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            auto [sx, sy] = iso.source(x, y, side);
            perm[static_cast<std::size_t>(y) * side + x] = static_cast<std::uint16_t>(sy * side + sx);
        }
    }
    return perm;
}

Tile extract(const GrayImage &image, BlockView block) {
    Tile out(block.side);
    for (int y = 0; y < block.side; ++y) {
        const std::uint8_t *src = image.row(block.y + y) + block.x;
        std::copy(src, src + block.side, out.px.begin() + static_cast<std::ptrdiff_t>(y) * block.side);
    }
    return out;
}

Tile decimate(const GrayImage &image, BlockView block) {
    const int half = block.side / 2;
    Tile out(half);
    for (int j = 0; j < half; ++j) {
        const std::uint8_t *r0 = image.row(block.y + 2 * j) + block.x;
        const std::uint8_t *r1 = r0 + image.width();
        for (int i = 0; i < half; ++i) {
            int sum = r0[2 * i] + r0[2 * i + 1] + r1[2 * i] + r1[2 * i + 1];
            out.px[static_cast<std::size_t>(j) * half + i] = static_cast<std::uint8_t>(sum >> 2);
        }
    }
    return out;
}

Tile decimate(const Tile &tile) {
    const int half = tile.side / 2;
    Tile out(half);
    for (int j = 0; j < half; ++j) {
        for (int i = 0; i < half; ++i) {
            int sum = tile.at(2 * i, 2 * j) + tile.at(2 * i + 1, 2 * j) + tile.at(2 * i, 2 * j + 1) +
                      tile.at(2 * i + 1, 2 * j + 1);
            out.at(i, j) = static_cast<std::uint8_t>(sum >> 2);
        }
    }
    return out;
}

void require_dimensions_multiple_of(const GrayImage &image, int multiple) {
    if (image.width() <= 0 || image.height() <= 0 || image.width() % multiple != 0 ||
        image.height() % multiple != 0) {
        throw Error(ErrorCode::unsupported_dimensions,
                    "dimensions not multiple of " + std::to_string(multiple) + " (got " +
                        std::to_string(image.width()) + "x" + std::to_string(image.height()) + ")");
    }
}

GrayImage center_crop_to_multiple(const GrayImage &image, int multiple) {
    int w = image.width() / multiple * multiple;
    int h = image.height() / multiple * multiple;
    if (w == 0 || h == 0) {
        throw Error(ErrorCode::unsupported_dimensions, "image smaller than " + std::to_string(multiple) + " pixels");
    }
    int x0 = (image.width() - w) / 2;
    int y0 = (image.height() - h) / 2;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t *src = image.row(y0 + y) + x0;
        std::copy(src, src + w, out.row(y));
    }
    return out;
}

namespace {

class PgmTokenizer {
  public:
    explicit PgmTokenizer(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
                    ++pos_;
                }
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Returns -1 when no digits are present.
    long read_uint() {
        skip_space_and_comments();
        long value = -1;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = (value < 0 ? 0 : value * 10) + (bytes_[pos_] - '0');
            if (value > 1'000'000'000) {
                return -1;
            }
            ++pos_;
        }
        return value;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }
    bool next_is_space() const noexcept { return pos_ < bytes_.size() && std::isspace(bytes_[pos_]); }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
        throw Error(ErrorCode::malformed_header, "missing P5/P2 magic");
    }
    const bool binary = bytes[1] == '5';
    PgmTokenizer tok(bytes);
    tok.advance(2);
    long width = tok.read_uint();
    long height = tok.read_uint();
    long maxval = tok.read_uint();
    if (width <= 0 || height <= 0 || maxval <= 0) {
        throw Error(ErrorCode::malformed_header, "bad width/height/maxval fields");
    }
    if (width > 65535 || height > 65535) {
        throw Error(ErrorCode::malformed_header, "dimensions exceed 65535");
    }
    if (maxval != 255) {
        throw Error(ErrorCode::unsupported_maxval, "maxval " + std::to_string(maxval) + " (only 255 supported)");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> pixels(count);
    if (binary) {
        // exactly one whitespace byte separates the header from the raster
        if (!tok.next_is_space()) {
            throw Error(ErrorCode::malformed_header, "missing whitespace after maxval");
        }
        tok.advance(1);
        if (bytes.size() - tok.pos() < count) {
            throw Error(ErrorCode::truncated_pixel_data, "expected " + std::to_string(count) + " bytes, got " +
                                                             std::to_string(bytes.size() - tok.pos()));
        }
        std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(tok.pos()), count, pixels.begin());
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            long v = tok.read_uint();
            if (v < 0) {
                throw Error(ErrorCode::truncated_pixel_data, "ASCII raster ended after " + std::to_string(i) + " samples");
            }
            if (v > 255) {
                throw Error(ErrorCode::malformed_header, "sample exceeds maxval");
            }
            pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

GrayImage load_pgm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::io_failure, "read failed for " + path.string());
    }
    return parse_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage &image) {
    std::string header = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels().begin(), image.pixels().end());
    return out;
}

void save_pgm(const GrayImage &image, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    }
    auto bytes = encode_pgm(image);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed for " + path.string());
    }
}

} // namespace frak
