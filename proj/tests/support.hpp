#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "frak/bitstream.hpp"
#include "frak/entropy_pool.hpp"
#include "frak/image.hpp"
#include "frak/matcher.hpp"

namespace frak::test {

using Rng = std::mt19937_64;

inline std::uint8_t random_pixel(Rng &rng) { return static_cast<std::uint8_t>(rng() & 0xff); }

inline Tile random_tile(Rng &rng, int side, int lo = 0, int hi = 255) {
    std::uniform_int_distribution<int> dist(lo, hi);
    Tile t(side);
    for (auto &p : t.px) {
        p = static_cast<std::uint8_t>(dist(rng));
    }
    return t;
}

inline GrayImage random_image(Rng &rng, int width, int height) {
    GrayImage img(width, height);
    for (auto &p : img.pixels()) {
        p = random_pixel(rng);
    }
    return img;
}

/// Smooth image with noise: closer to natural statistics than uniform noise.
inline GrayImage smooth_image(Rng &rng, int width, int height) {
    std::uniform_real_distribution<double> phase(0.0, 6.28);
    std::normal_distribution<double> noise(0.0, 6.0);
    const double a = phase(rng), b = phase(rng);
    GrayImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 128 + 60 * std::sin(x * 0.05 + a) * std::cos(y * 0.07 + b) + 30 * std::sin((x + y) * 0.2) +
                       noise(rng);
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
    return img;
}

inline Tile tile_of(int side, std::vector<std::uint8_t> px) { return Tile(side, std::move(px)); }

inline std::filesystem::path fixture_dir() {
    if (const char *env = std::getenv("FRAK_FIXTURES")) {
        return env;
    }
    return FRAK_FIXTURE_DIR;
}

inline std::optional<std::filesystem::path> fixture(const std::string &name) {
    auto p = fixture_dir() / (name + ".pgm");
    if (std::filesystem::exists(p)) {
        return p;
    }
    return std::nullopt;
}

/// Entropy straight from the definition, with a map-based histogram.
inline double oracle_entropy(const std::vector<std::uint8_t> &px) {
    std::map<int, long> counts;
    for (auto v : px) {
        ++counts[v];
    }
    double h = 0.0;
    for (auto [value, c] : counts) {
        double p = static_cast<double>(c) / static_cast<double>(px.size());
        h -= p * std::log(p);
    }
    return h;
}

/// Naive scan over (domain, isometry, s) materializing every transformed
/// tile and reconstruction.
inline MatchResult oracle_best_match(const Tile &range, const std::vector<DomainEntry> &entries,
                                     const SPolicy &policy, int step) {
    double rsum = 0.0;
    for (auto v : range.px) {
        rsum += v;
    }
    const double rmean = rsum / static_cast<double>(range.size());
    MatchResult best;
    bool have = false;
    const auto &set = policy.set(step);
    for (std::size_t d = 0; d < entries.size(); ++d) {
        for (int iso = 0; iso < Isometry::count; ++iso) {
            const Tile t = apply_isometry(entries[d].decimated, Isometry(iso));
            double tsum = 0.0;
            for (auto v : t.px) {
                tsum += v;
            }
            const double tmean = tsum / static_cast<double>(t.size());
            for (std::size_t k = 0; k < set.size(); ++k) {
                const double s = set[k];
                int offset;
                if (policy.mode == SMode::proposed) {
                    offset = std::clamp(static_cast<int>(std::floor(rmean + 0.5)), 0, 255);
                } else {
                    offset = std::clamp(static_cast<int>(std::floor(rmean - s * tmean + 0.5)), 0, 255);
                }
                std::int64_t err = 0;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    const double centered = policy.mode == SMode::proposed ? t.px[i] - tmean : t.px[i];
                    int v = static_cast<int>(std::floor(s * centered + 0.5)) + offset;
                    v = std::clamp(v, 0, 255);
                    const std::int64_t diff = v - range.px[i];
                    err += diff * diff;
                }
                if (!have || err < best.error) {
                    have = true;
                    best.error = err;
                    best.domain_index = static_cast<std::uint32_t>(d);
                    best.isometry = Isometry(iso);
                    best.s_index = static_cast<std::uint8_t>(k);
                    best.offset = static_cast<std::uint8_t>(offset);
                }
            }
        }
    }
    return best;
}

/// A random quadtree for one 16x16 slot, as the step sequence of its leaves.
inline void random_slot_steps(Rng &rng, int level, double split_p, std::vector<int> &steps) {
    std::bernoulli_distribution split(split_p);
    if (level == kLevels || !split(rng)) {
        steps.push_back(level);
        return;
    }
    for (int c = 0; c < 4; ++c) {
        random_slot_steps(rng, level + 1, split_p, steps);
    }
}

/// Random valid stream: random geometry, pools, s sets, trees and fields.
inline CompressedStream random_stream(Rng &rng, int max_slots_side = 4) {
    // at least 32 pixels per side so every level has a domain placement
    std::uniform_int_distribution<int> slots(2, max_slots_side);
    CompressedStream s;
    StreamHeader &h = s.header;
    h.width = 16 * slots(rng);
    h.height = 16 * slots(rng);
    h.mode = (rng() & 1) ? SMode::proposed : SMode::baseline;
    for (int step = 1; step <= kLevels; ++step) {
        LevelHeader &lv = h.levels[static_cast<std::size_t>(step - 1)];
        lv.stride = std::uniform_int_distribution<int>(1, 16)(rng);
        const int ns = std::uniform_int_distribution<int>(1, 12)(rng);
        std::uniform_real_distribution<double> sv(0.0, 1.0);
        for (int i = 0; i < ns; ++i) {
            lv.s_values.push_back(sv(rng));
        }
        const int dn = std::uniform_int_distribution<int>(1, 300)(rng);
        const int dside = domain_side(step);
        std::uniform_int_distribution<int> ox(0, h.width - dside), oy(0, h.height - dside);
        for (int i = 0; i < dn; ++i) {
            lv.origins.push_back({static_cast<std::uint16_t>(ox(rng)), static_cast<std::uint16_t>(oy(rng))});
        }
    }
    const double split_p = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    for (int i = 0; i < (h.width / 16) * (h.height / 16); ++i) {
        std::vector<int> steps;
        random_slot_steps(rng, 1, split_p, steps);
        for (int st : steps) {
            const LevelHeader &lv = h.level(st);
            MatchRecord r;
            r.step = static_cast<std::uint8_t>(st);
            r.offset = random_pixel(rng);
            r.isometry = static_cast<std::uint8_t>(rng() % 8);
            r.domain_address = static_cast<std::uint32_t>(rng() % lv.origins.size());
            r.s_index = static_cast<std::uint8_t>(rng() % lv.s_values.size());
            s.records.push_back(r);
        }
    }
    return s;
}

} // namespace frak::test
