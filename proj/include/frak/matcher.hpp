#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frak/entropy_pool.hpp"
#include "frak/image.hpp"

namespace frak {

enum class SMode : std::uint8_t {
    /// Searches a sampled set of contrast factors; offset from the least-squares formula.
    baseline = 0,
    /// Fixed per-level contrast factors; offset is the range mean.
    proposed = 1,
};

std::string_view to_string(SMode mode);
SMode parse_mode(std::string_view text);

/// Contrast scaling factors available at each quadtree step.
struct SPolicy {
    SMode mode = SMode::proposed;
    std::array<std::vector<double>, kLevels> sets;

    static SPolicy baseline();
    static SPolicy proposed();
    static SPolicy for_mode(SMode mode);

    const std::vector<double> &set(int level) const { return sets[level - 1]; }
    /// Width of the s-index field for a step: ceil(log2(set size)).
    int s_bits(int level) const;
    void validate() const;

    friend bool operator==(const SPolicy &, const SPolicy &) = default;
};

/// floor(x + 0.5), the single rounding rule used for reconstructed luminance.
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }
inline int clamp_pixel(int v) { return v < 0 ? 0 : (v > 255 ? 255 : v); }

/// Stored 8-bit offset for a candidate. Proposed: round(range mean).
/// Baseline: round(range_mean - s * domain_mean), clamped to [0, 255].
int stored_offset(SMode mode, double range_mean, double domain_mean, double s);

/// The scaled domain term before the offset is added:
///   proposed: round(s * (d_i - domain_mean))
///   baseline: round(s * d_i)
/// Reconstructed pixel = clamp(term + stored offset). Encoder and decoder both
/// go through this function, so their arithmetic is identical.
std::vector<std::int16_t> scaled_terms(SMode mode, std::span<const std::uint8_t> domain, double domain_mean, double s);

/// Sum of squared differences between the range and
/// clamp(round(s * d_i + offset)).
std::int64_t collage_error(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain, double s,
                           double offset);

/// Real-valued least-squares collage error for given s and offset (no rounding).
double collage_error_real(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain, double s,
                          double offset);

/// Least-squares contrast factor. nullopt when the domain is flat (zero
/// centered norm). Not clamped.
std::optional<double> optimal_s(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain);
inline double optimal_o(double range_mean, double domain_mean, double s) { return range_mean - s * domain_mean; }

struct MatchResult {
    std::uint32_t domain_index = 0;
    Isometry isometry;
    std::uint8_t s_index = 0;
    std::uint8_t offset = 0;
    std::int64_t error = 0;

    friend bool operator==(const MatchResult &, const MatchResult &) = default;
};

/// Result of the unquantized search used for s-distribution analysis.
struct RealMatchResult {
    std::uint32_t domain_index = 0;
    Isometry isometry;
    double s_raw = 0.0;
    double s_clamped = 0.0;
    double error = 0.0;
};

/// Matching engine for one quadtree step: holds the level's pool entries with
/// their scaled tiles precomputed for every s in the active set.
class LevelMatcher {
  public:
    LevelMatcher() = default;
    LevelMatcher(const DomainLevel &level, const SPolicy &policy, int step);

    int step() const noexcept { return step_; }
    int side() const noexcept { return side_; }
    std::size_t pool_size() const noexcept { return means_.size(); }

    /// Exhaustive scan over (domain, isometry, s). Returns the lowest error,
    /// ties broken by (domain_index, isometry, s_index) ascending.
    MatchResult best_match(const Tile &range) const;
    /// Same scan limited to entries with allowed[i] != 0; nullopt when none is.
    std::optional<MatchResult> best_match_among(const Tile &range, std::span<const std::uint8_t> allowed) const;

    /// Scan with the least-squares s (clamped to [0,1] for selection) and
    /// real offset per candidate; ties broken by (domain_index, isometry).
    RealMatchResult best_match_real(const Tile &range) const;

  private:
    template <class Sink> void scan_domains(const Tile &range, const std::uint8_t *allowed, Sink &&sink) const;
    MatchResult scan(const Tile &range, const std::uint8_t *allowed) const;

    struct Scaled {
        std::vector<std::int16_t> terms;
        std::int64_t sum = 0;
        std::int64_t sumsq = 0;
        int min = 0;
        int max = 0;
    };

    int step_ = 0;
    int side_ = 0;
    int n_ = 0;
    SMode mode_ = SMode::proposed;
    std::vector<double> s_values_;
    std::vector<double> means_;
    std::vector<std::int64_t> sums_;
    std::vector<double> centered_norms_;
    std::vector<std::int16_t> decimated_;  // pool_size x n
    std::vector<Scaled> scaled_;           // pool_size x |s set|
    std::array<std::vector<std::uint16_t>, Isometry::count> inverse_perm_;
};

/// One LevelMatcher per step.
class Matcher {
  public:
    Matcher(const DomainPool &pool, const SPolicy &policy);
    const LevelMatcher &level(int step) const { return levels_[step - 1]; }

  private:
    std::array<LevelMatcher, kLevels> levels_;
};

/// Convenience form working directly on an image block.
MatchResult best_match(const GrayImage &image, BlockView range, int step, const DomainPool &pool,
                       const SPolicy &policy);

} // namespace frak
