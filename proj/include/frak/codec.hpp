#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frak/bitstream.hpp"
#include "frak/entropy_pool.hpp"
#include "frak/image.hpp"
#include "frak/matcher.hpp"

namespace frak {

struct EncoderConfig {
    /// RMS error per pixel (gray levels) accepted at steps 1-3. Step 4 always codes.
    std::array<double, 3> thresholds = {8.0, 8.0, 8.0};
    PoolParams pool;
    SPolicy policy = SPolicy::proposed();
    /// Workers for pool construction and for the top-level block loop.
    int threads = 1;
    /// Decoder passes the stream must settle within, starting from the
    /// constant-128 image with the per-pass change non-increasing from the
    /// third pass on. Leaves that keep oscillating are re-matched against
    /// domains outside the unstable area. 0 turns the settle pass off.
    int settle_passes = 15;
    /// Upper bound on re-match rounds of the settle pass.
    int settle_rounds = 200;
    /// Share of a round's candidate replacements applied, cheapest first.
    double settle_fraction = 0.25;
    /// Fewest replacements applied per round while candidates remain.
    int settle_min_fixes = 256;

    void validate() const;
    /// Largest SSD accepted for a range block of `pixels` pixels at `step` (1..3).
    double ssd_limit(int step, int pixels) const;
};

struct EncodeReport {
    double encode_seconds = 0.0;
    double pool_seconds = 0.0;
    std::array<long, kLevels> step_blocks{};
    std::int64_t collage_ssd = 0;
    double settle_seconds = 0.0;
    int settle_rounds = 0;
    /// Records replaced by the settle pass, counted once per replacement.
    long settled_records = 0;
    /// False when the settle pass ran out of rounds or candidates.
    bool settled = true;
    std::size_t payload_bits = 0;
    std::size_t header_bits = 0;
    double bpp_payload = 0.0;
    double bpp_total = 0.0;
    double ratio_payload = 0.0;
    double ratio_total = 0.0;
};

struct EncodeResult {
    CompressedStream stream;
    EncodeReport report;
};

/// Builds the entropy-ranked pool once, then codes every 16x16 block by
/// quadtree descent: a block is emitted at the first step whose best match
/// meets that step's threshold, otherwise it is split TL, TR, BL, BR.
EncodeResult encode(const GrayImage &image, const EncoderConfig &config);

/// Compression figures for a stream over an image of its own dimensions.
void fill_size_report(const CompressedStream &stream, EncodeReport &report);

struct DecodeOptions {
    int iterations = 15;
    /// Stop once the largest per-pixel change of a pass is <= tolerance.
    int tolerance = 0;
    int threads = 1;
};

struct DecodeResult {
    GrayImage image;
    int iterations = 0;
    /// Largest per-pixel change of each pass, in order.
    std::vector<int> max_change;
    double decode_seconds = 0.0;

    int final_change() const { return max_change.empty() ? 0 : max_change.back(); }
};

/// Iterates the collage map from a constant-128 image.
DecodeResult decode_detailed(const CompressedStream &stream, const DecodeOptions &options = {});
GrayImage decode(const CompressedStream &stream, int iterations = 15, int tolerance = 0);

/// One application of the collage map to `current`.
GrayImage apply_collage(const CompressedStream &stream, const std::vector<Leaf> &leaves, const GrayImage &current,
                        int threads = 1);

} // namespace frak
