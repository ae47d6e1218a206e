#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "frak/codec.hpp"
#include "frak/metrics.hpp"

namespace frak {

/// Encodes and decodes `image` once and measures the result.
struct Measurement {
    QualityReport quality;
    EncodeReport encode;
    int decode_iterations = 0;
    int final_change = 0;
};

Measurement measure(const GrayImage &image, const EncoderConfig &config, const DecodeOptions &decode = {});

struct BenchRow {
    int pool_size = 0;
    SMode mode = SMode::proposed;
    double comp_ratio_payload = 0.0;
    double comp_ratio_total = 0.0;
    double encode_time_s = 0.0;
    double decode_time_s = 0.0;
    double psnr_db = 0.0;
};

BenchRow make_row(int pool_size, SMode mode, const QualityReport &q);

/// One encode+decode per pool size with everything else taken from `config`.
std::vector<BenchRow> sweep(const GrayImage &image, const std::vector<int> &pool_sizes, const EncoderConfig &config,
                            const DecodeOptions &decode = {});

/// Paired rows (baseline first, then proposed) per pool size. Both configs
/// must use the same strides.
std::vector<BenchRow> bench_compare(const GrayImage &image, const std::vector<int> &pool_sizes,
                                    const EncoderConfig &baseline, const EncoderConfig &proposed,
                                    const DecodeOptions &decode = {});

/// pool_size,mode,comp_ratio_payload,comp_ratio_total,encode_time_s,decode_time_s,psnr_db
void write_csv(std::ostream &out, const std::vector<BenchRow> &rows);

inline constexpr double kSBinLow = -0.5;
inline constexpr double kSBinWidth = 0.05;
inline constexpr int kSBins = 40;

/// Bin of an s value; values outside [-0.5, 1.5) go to the end bins.
int s_bin(double s);

struct LevelHistogram {
    std::array<long, kSBins> raw{};
    std::array<long, kSBins> clamped{};
    long blocks = 0;
    double raw_sum = 0.0;
    double clamped_sum = 0.0;

    double mean_raw() const { return blocks ? raw_sum / static_cast<double>(blocks) : 0.0; }
    double mean_clamped() const { return blocks ? clamped_sum / static_cast<double>(blocks) : 0.0; }
};

struct SHistogram {
    int pool_size = 0;
    std::array<LevelHistogram, kLevels> levels;

    const LevelHistogram &level(int step) const { return levels[step - 1]; }
};

/// Runs the quadtree encoder with the unquantized least-squares s (clamped to
/// [0,1] for the match decision and the real offset R - sD) and records the
/// winning s of every coded block. Thresholds and pool come from `config`;
/// its s sets are ignored.
SHistogram s_histogram(const GrayImage &image, const EncoderConfig &config);

/// level,bin_low,bin_high,raw_count,clamped_count
void write_histogram_csv(std::ostream &out, const SHistogram &h);

/// Published figures for the standard test images.
struct PublishedReference {
    std::string_view image;
    SMode mode;
    int pool_size;
    double comp_ratio;
    double encode_time_s;
    double psnr_db;
    std::string_view note;
};

const std::vector<PublishedReference> &published_references();
std::vector<PublishedReference> published_references(std::string_view image);

} // namespace frak
