#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "frak/image.hpp"

namespace frak {

/// Number of quadtree steps. Range sides per step are 16, 8, 4, 2.
inline constexpr int kLevels = 4;
inline constexpr std::array<int, kLevels> kRangeSides = {16, 8, 4, 2};

/// Range side for a 1-based step number.
constexpr int range_side(int level) { return kRangeSides[level - 1]; }
constexpr int domain_side(int level) { return 2 * range_side(level); }

struct PoolParams {
    /// Domain lattice step per level.
    std::array<int, kLevels> strides = {8, 4, 2, 2};
    /// Maximum retained domain blocks per level (DN).
    std::array<int, kLevels> pool_caps = {256, 256, 256, 256};
    /// Worker threads used for candidate entropy evaluation.
    int threads = 1;

    static PoolParams with_cap(int dn) {
        PoolParams p;
        p.pool_caps.fill(dn);
        return p;
    }

    void validate() const;
};

/// Gray-level entropy (natural log) over a 256-bin histogram.
double block_entropy(std::span<const std::uint8_t> pixels);
double block_entropy(const GrayImage &image, BlockView block);

/// Lattice placements of a `domain` sized block with step `stride` along one
/// axis of length `extent`.
long axis_placements(int extent, int domain, int stride);
/// Placements over a square image of side `image_side`.
long candidate_count(int image_side, int domain, int stride);
long candidate_count(int width, int height, int domain, int stride);

struct DomainEntry {
    int x = 0;
    int y = 0;
    double entropy = 0.0;
    Tile decimated;
    /// Mean of the decimated tile.
    double mean = 0.0;
    /// Squared norm of the decimated tile after removing its mean.
    double centered_norm_sq = 0.0;
    std::int64_t sum = 0;
};

/// Builds a DomainEntry for the 2B x 2B block at (x, y).
DomainEntry make_domain_entry(const GrayImage &image, int x, int y, int domain);

struct DomainLevel {
    int range_side = 0;
    int stride = 0;
    long candidates = 0;
    std::vector<DomainEntry> entries;
};

/// Per-level domain pools, each sorted by entropy descending (ties by raster
/// order of the origin) and truncated to the level's cap.
struct DomainPool {
    std::array<DomainLevel, kLevels> levels;

    const DomainLevel &level(int step) const { return levels[step - 1]; }
};

DomainPool build_pool(const GrayImage &image, const PoolParams &params);

} // namespace frak
