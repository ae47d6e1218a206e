#include "frak/entropy_pool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "frak/parallel.hpp"

namespace frak {

void PoolParams::validate() const {
    for (int level = 1; level <= kLevels; ++level) {
        if (strides[level - 1] < 1) {
            throw Error(ErrorCode::invalid_config, "stride for level " + std::to_string(level) + " must be >= 1");
        }
        if (pool_caps[level - 1] < 1) {
            throw Error(ErrorCode::invalid_config, "pool cap for level " + std::to_string(level) + " must be >= 1");
        }
    }
}

namespace {

// -p ln p for p = q / n, q = 0..n. Index 0 contributes nothing.
std::vector<double> plogp_table(std::size_t n) {
    std::vector<double> table(n + 1, 0.0);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t q = 1; q <= n; ++q) {
        double p = static_cast<double>(q) * inv;
        table[q] = -p * std::log(p);
    }
    return table;
}

double entropy_from_histogram(const std::array<std::uint32_t, 256> &hist, const std::vector<double> &table) {
    double h = 0.0;
    for (std::uint32_t q : hist) {
        h += table[q];
    }
    return h;
}

} // namespace

double block_entropy(std::span<const std::uint8_t> pixels) {
    std::array<std::uint32_t, 256> hist{};
    for (std::uint8_t v : pixels) {
        ++hist[v];
    }
    return entropy_from_histogram(hist, plogp_table(pixels.size()));
}

double block_entropy(const GrayImage &image, BlockView block) {
    return block_entropy(extract(image, block).px);
}

long axis_placements(int extent, int domain, int stride) {
    if (domain > extent || stride < 1) {
        return 0;
    }
    return (extent - domain) / stride + 1;
}

long candidate_count(int image_side, int domain, int stride) {
    return candidate_count(image_side, image_side, domain, stride);
}

long candidate_count(int width, int height, int domain, int stride) {
    return axis_placements(width, domain, stride) * axis_placements(height, domain, stride);
}

DomainEntry make_domain_entry(const GrayImage &image, int x, int y, int domain) {
    DomainEntry e;
    e.x = x;
    e.y = y;
    e.decimated = decimate(image, BlockView{x, y, domain});
    std::int64_t sum = 0;
    std::int64_t sumsq = 0;
    for (std::uint8_t v : e.decimated.px) {
        sum += v;
        sumsq += static_cast<std::int64_t>(v) * v;
    }
    const auto n = static_cast<std::int64_t>(e.decimated.size());
    e.sum = sum;
    e.mean = static_cast<double>(sum) / static_cast<double>(n);
    e.centered_norm_sq = static_cast<double>(n * sumsq - sum * sum) / static_cast<double>(n);
    return e;
}

DomainPool build_pool(const GrayImage &image, const PoolParams &params) {
    params.validate();
    DomainPool pool;
    for (int level = 1; level <= kLevels; ++level) {
        DomainLevel &out = pool.levels[level - 1];
        const int dside = domain_side(level);
        const int stride = params.strides[level - 1];
        out.range_side = range_side(level);
        out.stride = stride;
        const long nx = axis_placements(image.width(), dside, stride);
        const long ny = axis_placements(image.height(), dside, stride);
        out.candidates = nx * ny;
        if (out.candidates == 0) {
            throw Error(ErrorCode::empty_pool, "image " + std::to_string(image.width()) + "x" +
                                                   std::to_string(image.height()) + " has no room for " +
                                                   std::to_string(dside) + "x" + std::to_string(dside) + " domains");
        }

        const auto table = plogp_table(static_cast<std::size_t>(dside) * dside);
        std::vector<double> entropy(static_cast<std::size_t>(out.candidates));
        parallel_for(static_cast<std::size_t>(ny), params.threads, [&](std::size_t row) {
            std::array<std::uint32_t, 256> hist;
            const int y = static_cast<int>(row) * stride;
            for (long col = 0; col < nx; ++col) {
                const int x = static_cast<int>(col) * stride;
                hist.fill(0);
                for (int dy = 0; dy < dside; ++dy) {
                    const std::uint8_t *p = image.row(y + dy) + x;
                    for (int dx = 0; dx < dside; ++dx) {
                        ++hist[p[dx]];
                    }
                }
                entropy[row * static_cast<std::size_t>(nx) + static_cast<std::size_t>(col)] =
                    entropy_from_histogram(hist, table);
            }
        });

        // Raster index doubles as the tie-break: smaller y first, then smaller x.
        std::vector<std::uint32_t> order(entropy.size());
        std::iota(order.begin(), order.end(), 0u);
        const auto keep = std::min<std::size_t>(static_cast<std::size_t>(params.pool_caps[level - 1]), order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              if (entropy[a] != entropy[b]) {
                                  return entropy[a] > entropy[b];
                              }
                              return a < b;
                          });

        out.entries.resize(keep);
        parallel_for(keep, params.threads, [&](std::size_t i) {
            const std::uint32_t idx = order[i];
            const int x = static_cast<int>(idx % static_cast<std::uint32_t>(nx)) * stride;
            const int y = static_cast<int>(idx / static_cast<std::uint32_t>(nx)) * stride;
            out.entries[i] = make_domain_entry(image, x, y, dside);
            out.entries[i].entropy = entropy[idx];
        });
    }
    return pool;
}

} // namespace frak
