#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "frak/error.hpp"

namespace frak {

/// Owned 8-bit single-channel raster, row-major.
class GrayImage {
  public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
    std::uint8_t &at(int x, int y) { return pixels_[index(x, y)]; }

    const std::uint8_t *row(int y) const { return pixels_.data() + static_cast<std::size_t>(y) * width_; }
    std::uint8_t *row(int y) { return pixels_.data() + static_cast<std::size_t>(y) * width_; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    friend bool operator==(const GrayImage &, const GrayImage &) = default;

  private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Square window into a GrayImage. Side is a power of two.
struct BlockView {
    int x = 0;
    int y = 0;
    int side = 0;

    bool fits(const GrayImage &image) const noexcept {
        return x >= 0 && y >= 0 && side > 0 && x + side <= image.width() && y + side <= image.height();
    }
    int area() const noexcept { return side * side; }

    friend bool operator==(const BlockView &, const BlockView &) = default;
};

/// Square pixel array, row-major. Used for decimated domains, range copies, and
/// precomputed scaled tiles (hence templated on the sample type).
template <typename T>
struct BasicTile {
    int side = 0;
    std::vector<T> px;

    BasicTile() = default;
    explicit BasicTile(int side_, T fill = T{}) : side(side_), px(static_cast<std::size_t>(side_) * side_, fill) {}
    BasicTile(int side_, std::vector<T> values) : side(side_), px(std::move(values)) {}

    T at(int x, int y) const { return px[static_cast<std::size_t>(y) * side + x]; }
    T &at(int x, int y) { return px[static_cast<std::size_t>(y) * side + x]; }
    std::size_t size() const noexcept { return px.size(); }

    friend bool operator==(const BasicTile &, const BasicTile &) = default;
};

using Tile = BasicTile<std::uint8_t>;

/// One of the 8 symmetries of the square. The index order is part of the
/// compressed format:
///   0 identity, 1 rot90 (clockwise), 2 rot180, 3 rot270,
///   4 mirror, 5 mirror∘rot90, 6 mirror∘rot180, 7 mirror∘rot270
/// where mirror is a left-right flip applied after the rotation.
class Isometry {
  public:
    static constexpr int count = 8;

    constexpr Isometry() = default;
    constexpr explicit Isometry(int index) : index_(index) {
        if (index < 0 || index >= count) {
            throw Error(ErrorCode::invalid_config, "isometry index out of range");
        }
    }

    constexpr int index() const noexcept { return index_; }
    constexpr bool mirrored() const noexcept { return index_ >= 4; }
    constexpr int quarter_turns() const noexcept { return index_ & 3; }

    /// Source coordinate in the input tile for output pixel (x, y).
    constexpr std::array<int, 2> source(int x, int y, int side) const noexcept {
        if (mirrored()) {
            x = side - 1 - x;
        }
        // undo clockwise quarter turns one at a time: out(x,y) = in(y, n-1-x)
        for (int k = 0; k < quarter_turns(); ++k) {
            int sx = y;
            int sy = side - 1 - x;
            x = sx;
            y = sy;
        }
        return {x, y};
    }

    /// The isometry equivalent to applying `first` and then `second`.
    static Isometry compose(Isometry first, Isometry second) noexcept;
    Isometry inverse() const noexcept;

    friend constexpr bool operator==(Isometry, Isometry) = default;

  private:
    int index_ = 0;
};

template <typename T>
BasicTile<T> apply_isometry(const BasicTile<T> &tile, Isometry iso) {
    BasicTile<T> out(tile.side);
    for (int y = 0; y < tile.side; ++y) {
        for (int x = 0; x < tile.side; ++x) {
            auto [sx, sy] = iso.source(x, y, tile.side);
            out.at(x, y) = tile.at(sx, sy);
        }
    }
    return out;
}

/// For each output position i, the input position an isometry reads from.
/// Lets per-pixel loops permute without materializing transformed tiles.
std::vector<std::uint16_t> isometry_permutation(Isometry iso, int side);

/// Copies a block out of the image.
Tile extract(const GrayImage &image, BlockView block);

/// 2x2 mean with floor rounding: out(i,j) = floor(sum of the 2x2 cell / 4).
Tile decimate(const GrayImage &image, BlockView block);
Tile decimate(const Tile &tile);

/// Rejects inputs whose dimensions are not positive multiples of `multiple`.
void require_dimensions_multiple_of(const GrayImage &image, int multiple);

/// Center crop to the largest rectangle whose sides are multiples of `multiple`.
GrayImage center_crop_to_multiple(const GrayImage &image, int multiple);

GrayImage load_pgm(const std::filesystem::path &path);
/// Parses PGM data already in memory (P5 or P2, maxval 255).
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);
/// Binary P5, maxval 255, no comments.
void save_pgm(const GrayImage &image, const std::filesystem::path &path);
std::vector<std::uint8_t> encode_pgm(const GrayImage &image);

} // namespace frak
