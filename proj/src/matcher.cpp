#include "frak/matcher.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace frak {

std::string_view to_string(SMode mode) { return mode == SMode::baseline ? "baseline" : "proposed"; }

SMode parse_mode(std::string_view text) {
    if (text == "baseline") {
        return SMode::baseline;
    }
    if (text == "proposed") {
        return SMode::proposed;
    }
    throw Error(ErrorCode::invalid_config, "unknown mode '" + std::string(text) + "'");
}

SPolicy SPolicy::baseline() {
    SPolicy p;
    p.mode = SMode::baseline;
    std::vector<double> set;
    for (int i = 1; i <= 10; ++i) {
        set.push_back(i / 10.0);
    }
    p.sets.fill(set);
    return p;
}

SPolicy SPolicy::proposed() {
    SPolicy p;
    p.mode = SMode::proposed;
    p.sets = {{{0.1}, {0.2, 0.4}, {0.3, 0.8}, {0.5, 0.9}}};
    return p;
}

SPolicy SPolicy::for_mode(SMode mode) { return mode == SMode::baseline ? baseline() : proposed(); }

int SPolicy::s_bits(int level) const {
    const std::size_t n = set(level).size();
    int bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    return bits;
}

void SPolicy::validate() const {
    for (int level = 1; level <= kLevels; ++level) {
        const auto &s = set(level);
        if (s.empty() || s.size() > 255) {
            throw Error(ErrorCode::invalid_config, "s set for level " + std::to_string(level) + " must hold 1..255 values");
        }
        for (double v : s) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::invalid_config, "s values must lie in [0, 1]");
            }
        }
    }
}

int stored_offset(SMode mode, double range_mean, double domain_mean, double s) {
    if (mode == SMode::proposed) {
        return clamp_pixel(round_half_up(range_mean));
    }
    return clamp_pixel(round_half_up(optimal_o(range_mean, domain_mean, s)));
}

std::vector<std::int16_t> scaled_terms(SMode mode, std::span<const std::uint8_t> domain, double domain_mean, double s) {
    std::vector<std::int16_t> out(domain.size());
    const double center = mode == SMode::proposed ? domain_mean : 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        out[i] = static_cast<std::int16_t>(round_half_up(s * (static_cast<double>(domain[i]) - center)));
    }
    return out;
}

std::int64_t collage_error(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain, double s,
                           double offset) {
    std::int64_t err = 0;
    for (std::size_t i = 0; i < range.size(); ++i) {
        int v = clamp_pixel(round_half_up(s * domain[i] + offset));
        int d = v - range[i];
        err += static_cast<std::int64_t>(d) * d;
    }
    return err;
}

double collage_error_real(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain, double s,
                          double offset) {
    double err = 0.0;
    for (std::size_t i = 0; i < range.size(); ++i) {
        double d = s * domain[i] + offset - range[i];
        err += d * d;
    }
    return err;
}

std::optional<double> optimal_s(std::span<const std::uint8_t> range, std::span<const std::uint8_t> domain) {
    const double n = static_cast<double>(range.size());
    double rmean = 0.0;
    double dmean = 0.0;
    for (std::size_t i = 0; i < range.size(); ++i) {
        rmean += range[i];
        dmean += domain[i];
    }
    rmean /= n;
    dmean /= n;
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < range.size(); ++i) {
        double dd = domain[i] - dmean;
        cov += (range[i] - rmean) * dd;
        var += dd * dd;
    }
    if (var == 0.0) {
        return std::nullopt;
    }
    return cov / var;
}

LevelMatcher::LevelMatcher(const DomainLevel &level, const SPolicy &policy, int step)
    : step_(step), side_(range_side(step)), n_(range_side(step) * range_side(step)), mode_(policy.mode),
      s_values_(policy.set(step)) {
    const std::size_t count = level.entries.size();
    means_.reserve(count);
    sums_.reserve(count);
    centered_norms_.reserve(count);
    decimated_.reserve(count * static_cast<std::size_t>(n_));
    scaled_.reserve(count * s_values_.size());
    for (const DomainEntry &e : level.entries) {
        means_.push_back(e.mean);
        sums_.push_back(e.sum);
        centered_norms_.push_back(e.centered_norm_sq);
        decimated_.insert(decimated_.end(), e.decimated.px.begin(), e.decimated.px.end());
        for (double s : s_values_) {
            Scaled sc;
            sc.terms = scaled_terms(mode_, e.decimated.px, e.mean, s);
            sc.min = std::numeric_limits<int>::max();
            sc.max = std::numeric_limits<int>::min();
            for (std::int16_t t : sc.terms) {
                sc.sum += t;
                sc.sumsq += static_cast<std::int64_t>(t) * t;
                sc.min = std::min<int>(sc.min, t);
                sc.max = std::max<int>(sc.max, t);
            }
            scaled_.push_back(std::move(sc));
        }
    }
    for (int t = 0; t < Isometry::count; ++t) {
        inverse_perm_[t] = isometry_permutation(Isometry(t).inverse(), side_);
    }
}

namespace {

// Range pixels under the inverse of every isometry, interleaved as
// [pixel][iso] so one pass over a domain tile yields all 8 inner products:
//   sum_i iso(q)_i * r_i == sum_j q_j * inverse_iso(r)_j
std::vector<std::int16_t> interleaved_variants(const Tile &range,
                                               const std::array<std::vector<std::uint16_t>, Isometry::count> &perm) {
    const std::size_t n = range.size();
    std::vector<std::int16_t> out(n * Isometry::count);
    for (int t = 0; t < Isometry::count; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            out[j * Isometry::count + static_cast<std::size_t>(t)] = range.px[perm[t][j]];
        }
    }
    return out;
}

inline void dot8(const std::int16_t *q, const std::int16_t *variants, int n, std::int32_t (&acc)[Isometry::count]) {
    for (int t = 0; t < Isometry::count; ++t) {
        acc[t] = 0;
    }
    for (int j = 0; j < n; ++j) {
        const std::int32_t qj = q[j];
        const std::int16_t *v = variants + static_cast<std::ptrdiff_t>(j) * Isometry::count;
        for (int t = 0; t < Isometry::count; ++t) {
            acc[t] += qj * v[t];
        }
    }
}

} // namespace

MatchResult LevelMatcher::best_match(const Tile &range) const {
    if (pool_size() == 0) {
        throw Error(ErrorCode::empty_pool, "no domain blocks at step " + std::to_string(step_));
    }
    return scan(range, nullptr);
}

std::optional<MatchResult> LevelMatcher::best_match_among(const Tile &range,
                                                          std::span<const std::uint8_t> allowed) const {
    if (allowed.size() != pool_size()) {
        throw Error(ErrorCode::invalid_config, "allowed mask does not match the pool");
    }
    if (std::none_of(allowed.begin(), allowed.end(), [](std::uint8_t a) { return a != 0; })) {
        return std::nullopt;
    }
    return scan(range, allowed.data());
}

template <class Sink>
void LevelMatcher::scan_domains(const Tile &range, const std::uint8_t *allowed, Sink &&sink) const {
    const auto variants = interleaved_variants(range, inverse_perm_);
    std::int64_t sumr = 0;
    std::int64_t sumr2 = 0;
    for (std::uint8_t v : range.px) {
        sumr += v;
        sumr2 += static_cast<std::int64_t>(v) * v;
    }
    const double rmean = static_cast<double>(sumr) / n_;
    const std::size_t ns = s_values_.size();

    std::int32_t acc[Isometry::count];
    for (std::uint32_t d = 0; d < pool_size(); ++d) {
        if (allowed && !allowed[d]) {
            continue;
        }
        MatchResult best;
        best.error = std::numeric_limits<std::int64_t>::max();
        best.domain_index = d;
        // (s, isometry) loop order differs from the (isometry, s) tie order
        auto consider = [&](std::int64_t err, int iso, std::size_t k, int offset) {
            if (err < best.error ||
                (err == best.error && (iso < best.isometry.index() || (iso == best.isometry.index() && k < best.s_index)))) {
                best.error = err;
                best.isometry = Isometry(iso);
                best.s_index = static_cast<std::uint8_t>(k);
                best.offset = static_cast<std::uint8_t>(offset);
            }
        };
        for (std::size_t k = 0; k < ns; ++k) {
            const Scaled &sc = scaled_[d * ns + k];
            const int offset = stored_offset(mode_, rmean, means_[d], s_values_[k]);
            if (sc.min + offset >= 0 && sc.max + offset <= 255) {
                dot8(sc.terms.data(), variants.data(), n_, acc);
                const std::int64_t base = sc.sumsq + static_cast<std::int64_t>(n_) * offset * offset + sumr2 +
                                          2 * static_cast<std::int64_t>(offset) * (sc.sum - sumr);
                for (int t = 0; t < Isometry::count; ++t) {
                    consider(base - 2 * static_cast<std::int64_t>(acc[t]), t, k, offset);
                }
            } else {
                for (int t = 0; t < Isometry::count; ++t) {
                    std::int64_t err = 0;
                    for (int j = 0; j < n_; ++j) {
                        int diff = clamp_pixel(sc.terms[static_cast<std::size_t>(j)] + offset) -
                                   variants[static_cast<std::size_t>(j) * Isometry::count + static_cast<std::size_t>(t)];
                        err += static_cast<std::int64_t>(diff) * diff;
                    }
                    consider(err, t, k, offset);
                }
            }
        }
        sink(best);
    }
}

MatchResult LevelMatcher::scan(const Tile &range, const std::uint8_t *allowed) const {
    MatchResult best;
    best.error = std::numeric_limits<std::int64_t>::max();
    // strict comparison keeps the lowest domain index on ties
    scan_domains(range, allowed, [&](const MatchResult &m) {
        if (m.error < best.error) {
            best = m;
        }
    });
    return best;
}

RealMatchResult LevelMatcher::best_match_real(const Tile &range) const {
    if (pool_size() == 0) {
        throw Error(ErrorCode::empty_pool, "no domain blocks at step " + std::to_string(step_));
    }
    const auto variants = interleaved_variants(range, inverse_perm_);
    std::int64_t sumr = 0;
    std::int64_t sumr2 = 0;
    for (std::uint8_t v : range.px) {
        sumr += v;
        sumr2 += static_cast<std::int64_t>(v) * v;
    }
    const double range_centered = static_cast<double>(static_cast<std::int64_t>(n_) * sumr2 - sumr * sumr) / n_;

    RealMatchResult best;
    best.error = std::numeric_limits<double>::infinity();
    std::int32_t acc[Isometry::count];
    for (std::uint32_t d = 0; d < pool_size(); ++d) {
        dot8(decimated_.data() + static_cast<std::size_t>(d) * n_, variants.data(), n_, acc);
        const double var = centered_norms_[d];
        for (int t = 0; t < Isometry::count; ++t) {
            // <R - Rbar, D - Dbar> = <R, D> - sum(R) sum(D) / n
            const double cov =
                static_cast<double>(static_cast<std::int64_t>(n_) * acc[t] - sumr * sums_[d]) / n_;
            const double s_raw = var > 0.0 ? cov / var : 0.0;
            const double s = std::clamp(s_raw, 0.0, 1.0);
            const double err = range_centered - 2.0 * s * cov + s * s * var;
            if (err < best.error) {
                best.error = err;
                best.domain_index = d;
                best.isometry = Isometry(t);
                best.s_raw = s_raw;
                best.s_clamped = s;
            }
        }
    }
    best.error = std::max(best.error, 0.0);
    return best;
}

Matcher::Matcher(const DomainPool &pool, const SPolicy &policy) {
    policy.validate();
    for (int step = 1; step <= kLevels; ++step) {
        levels_[step - 1] = LevelMatcher(pool.level(step), policy, step);
    }
}

MatchResult best_match(const GrayImage &image, BlockView range, int step, const DomainPool &pool,
                       const SPolicy &policy) {
    policy.validate();
    LevelMatcher matcher(pool.level(step), policy, step);
    return matcher.best_match(extract(image, range));
}

} // namespace frak
