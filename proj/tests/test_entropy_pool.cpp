#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace frak;
using frak::test::Rng;

TEST_CASE("entropy examples") {
    CHECK(block_entropy(Tile(4, 128).px) == 0.0);
    CHECK(block_entropy(test::tile_of(2, {10, 20, 30, 40}).px) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    std::vector<std::uint8_t> half(16, 0);
    std::fill(half.begin() + 8, half.end(), 255);
    CHECK(block_entropy(half) == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("entropy matches histogram oracle and is invariant") {
    Rng rng(10);
    for (int trial = 0; trial < 300; ++trial) {
        const int side = 2 << (trial % 5);
        Tile t = test::random_tile(rng, side, 0, trial % 2 ? 255 : 7);
        const double h = block_entropy(t.px);
        CHECK(std::abs(h - test::oracle_entropy(t.px)) < 1e-12);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(std::min(256.0, static_cast<double>(side * side))) + 1e-12);
        for (int a = 0; a < 8; ++a) {
            CHECK(block_entropy(apply_isometry(t, Isometry(a)).px) == h);
        }
        auto shuffled = t.px;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(block_entropy(shuffled) == h);
    }
}

TEST_CASE("candidate counts") {
    CHECK(candidate_count(512, 16, 4) == 15625);
    CHECK(candidate_count(512, 32, 1) == 231361);
    CHECK(candidate_count(32, 32, 1) == 1);
    CHECK(candidate_count(16, 32, 1) == 0);
    CHECK(candidate_count(64, 32, 32, 8) == 5 * 1);
}

TEST_CASE("pool params validation") {
    PoolParams p;
    CHECK_NOTHROW(p.validate());
    p.strides[2] = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = PoolParams::with_cap(0);
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("constant image pool is raster order") {
    GrayImage flat(64, 64, 40);
    PoolParams p = PoolParams::with_cap(5);
    DomainPool pool = build_pool(flat, p);
    const DomainLevel &lv = pool.level(1);
    REQUIRE(lv.entries.size() == 5);
    CHECK(lv.candidates == 25);
    const int xs[] = {0, 8, 16, 24, 32};
    for (int i = 0; i < 5; ++i) {
        CHECK(lv.entries[static_cast<std::size_t>(i)].x == xs[i]);
        CHECK(lv.entries[static_cast<std::size_t>(i)].y == 0);
        CHECK(lv.entries[static_cast<std::size_t>(i)].entropy == 0.0);
        CHECK(lv.entries[static_cast<std::size_t>(i)].centered_norm_sq == 0.0);
        CHECK(lv.entries[static_cast<std::size_t>(i)].mean == 40.0);
    }
}

TEST_CASE("checkerboard ties break by raster order") {
    GrayImage img(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            img.at(x, y) = (x + y) % 2 ? 255 : 0;
        }
    }
    DomainPool pool = build_pool(img, PoolParams::with_cap(30));
    for (int step = 1; step <= kLevels; ++step) {
        const auto &e = pool.level(step).entries;
        for (std::size_t i = 0; i < e.size(); ++i) {
            CHECK(e[i].entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
            if (i > 0) {
                CHECK((e[i - 1].y < e[i].y || (e[i - 1].y == e[i].y && e[i - 1].x < e[i].x)));
            }
        }
    }
}

namespace {

// Full sort of every candidate by (entropy desc, y, x).
std::vector<std::array<int, 2>> oracle_pool(const GrayImage &img, int step, int stride, int cap) {
    struct Cand {
        double h;
        int x, y;
    };
    std::vector<Cand> all;
    const int d = domain_side(step);
    for (int y = 0; y + d <= img.height(); y += stride) {
        for (int x = 0; x + d <= img.width(); x += stride) {
            all.push_back({test::oracle_entropy(extract(img, BlockView{x, y, d}).px), x, y});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Cand &a, const Cand &b) { return a.h > b.h; });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(cap)));
    std::vector<std::array<int, 2>> out;
    for (auto &c : all) {
        out.push_back({c.x, c.y});
    }
    return out;
}

} // namespace

TEST_CASE("pool truncation matches full-sort oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        // few gray levels so entropy ties are common
        GrayImage img = test::random_image(rng, 64, 64);
        if (trial % 2) {
            for (auto &p : img.pixels()) {
                p = static_cast<std::uint8_t>(p % 3);
            }
        }
        PoolParams p = PoolParams::with_cap(trial % 3 == 0 ? 1000 : 17);
        p.strides = {4, 3, 2, 1};
        p.threads = 1 + trial % 3;
        DomainPool pool = build_pool(img, p);
        for (int step = 1; step <= kLevels; ++step) {
            const auto expect = oracle_pool(img, step, p.strides[static_cast<std::size_t>(step - 1)],
                                            p.pool_caps[static_cast<std::size_t>(step - 1)]);
            const auto &got = pool.level(step).entries;
            REQUIRE(got.size() == expect.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].x == expect[i][0]);
                CHECK(got[i].y == expect[i][1]);
            }
        }
    }
}

TEST_CASE("entries carry decimated statistics") {
    Rng rng(12);
    GrayImage img = test::random_image(rng, 64, 64);
    DomainPool pool = build_pool(img, PoolParams::with_cap(8));
    for (int step = 1; step <= kLevels; ++step) {
        for (const DomainEntry &e : pool.level(step).entries) {
            Tile d = decimate(img, BlockView{e.x, e.y, domain_side(step)});
            CHECK(e.decimated == d);
            const double sum = std::accumulate(d.px.begin(), d.px.end(), 0.0);
            const double mean = sum / static_cast<double>(d.size());
            double c = 0.0;
            for (auto v : d.px) {
                c += (v - mean) * (v - mean);
            }
            CHECK(e.mean == doctest::Approx(mean).epsilon(1e-12));
            CHECK(e.centered_norm_sq == doctest::Approx(c).epsilon(1e-9));
            CHECK(e.sum == static_cast<std::int64_t>(sum));
            CHECK(e.entropy == doctest::Approx(test::oracle_entropy(extract(img, BlockView{e.x, e.y, domain_side(step)}).px)));
        }
    }
}

TEST_CASE("pool is independent of worker count") {
    Rng rng(13);
    GrayImage img = test::smooth_image(rng, 128, 96);
    PoolParams p = PoolParams::with_cap(40);
    DomainPool one = build_pool(img, p);
    for (int threads : {2, 8}) {
        p.threads = threads;
        DomainPool many = build_pool(img, p);
        for (int step = 1; step <= kLevels; ++step) {
            const auto &a = one.level(step).entries;
            const auto &b = many.level(step).entries;
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].x == b[i].x);
                CHECK(a[i].y == b[i].y);
                CHECK(a[i].entropy == b[i].entropy);
            }
        }
    }
}

TEST_CASE("lena level 1 truncation") {
    auto lena = test::fixture("lena");
    if (!lena) {
        MESSAGE("lena fixture missing");
        return;
    }
    GrayImage img = load_pgm(*lena);
    PoolParams p = PoolParams::with_cap(256);
    p.strides[0] = 4;
    DomainPool pool = build_pool(img, p);
    const DomainLevel &lv = pool.level(1);
    CHECK(lv.entries.size() == 256);
    std::vector<double> all;
    for (int y = 0; y + 32 <= 512; y += 4) {
        for (int x = 0; x + 32 <= 512; x += 4) {
            all.push_back(test::oracle_entropy(extract(img, BlockView{x, y, 32}).px));
        }
    }
    std::sort(all.begin(), all.end(), std::greater<>());
    CHECK(lv.entries.back().entropy >= all[256] - 1e-12);
    CHECK(lv.entries.back().entropy == doctest::Approx(all[255]).epsilon(1e-12));
}

TEST_CASE("empty pool is a configuration error") {
    try {
        build_pool(GrayImage(16, 16), PoolParams{});
        FAIL("no error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::empty_pool);
    }
}
