#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <string>

#include "support.hpp"

using namespace frak;
using frak::test::Rng;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string &s) { return {s.begin(), s.end()}; }

ErrorCode parse_error_code(const std::string &text) {
    try {
        parse_pgm(bytes_of(text));
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("parse succeeded");
    return ErrorCode::io_failure;
}

} // namespace

TEST_CASE("P5 constant raster") {
    std::string data = "P5\n4 4\n255\n" + std::string(16, static_cast<char>(128));
    GrayImage img = parse_pgm(bytes_of(data));
    CHECK(img == GrayImage(4, 4, 128));
}

TEST_CASE("P2 pixels are row-major") {
    std::string data = "P2\n# comment line\n4 4\n255\n";
    for (int i = 0; i < 16; ++i) {
        data += std::to_string(i) + (i % 4 == 3 ? "\n" : " ");
    }
    GrayImage img = parse_pgm(bytes_of(data));
    std::vector<std::uint8_t> expect(16);
    for (int i = 0; i < 16; ++i) {
        expect[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    }
    CHECK(img == GrayImage(4, 4, expect));
    CHECK(img.at(1, 2) == 9);
}

TEST_CASE("PGM errors are distinct") {
    CHECK(parse_error_code("P5\n4 4\n65535\n") == ErrorCode::unsupported_maxval);
    CHECK(parse_error_code("P6\n4 4\n255\n") == ErrorCode::malformed_header);
    CHECK(parse_error_code("P5\n4\n") == ErrorCode::malformed_header);
    CHECK(parse_error_code("P5\n4 4\n255\n" + std::string(10, 'a')) == ErrorCode::truncated_pixel_data);
    CHECK(parse_error_code("P2\n2 2\n255\n1 2 3") == ErrorCode::truncated_pixel_data);
    CHECK(parse_error_code("P2\n2 2\n255\n1 2 3 256") == ErrorCode::malformed_header);
}

TEST_CASE("PGM round trip") {
    Rng rng(1);
    for (int side : {16, 48}) {
        GrayImage img = test::random_image(rng, side, side + 16);
        auto path = std::filesystem::temp_directory_path() / ("frak_rt_" + std::to_string(side) + ".pgm");
        save_pgm(img, path);
        CHECK(load_pgm(path) == img);
        std::filesystem::remove(path);
    }
    // writer emits no comments
    auto bytes = encode_pgm(GrayImage(2, 2, 7));
    CHECK(std::string(bytes.begin(), bytes.begin() + 11) == "P5\n2 2\n255\n");
    CHECK(std::find(bytes.begin(), bytes.end(), '#') == bytes.end());
}

TEST_CASE("fixture round trip") {
    auto lena = test::fixture("lena");
    if (!lena) {
        MESSAGE("lena fixture missing");
        return;
    }
    GrayImage img = load_pgm(*lena);
    CHECK(img.width() == 512);
    CHECK(img.height() == 512);
    CHECK(parse_pgm(encode_pgm(img)) == img);
}

TEST_CASE("PGM I/O failures") {
    CHECK_THROWS_AS(load_pgm("/nonexistent/dir/x.pgm"), Error);
    try {
        save_pgm(GrayImage(2, 2), "/nonexistent/dir/x.pgm");
        FAIL("no error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::io_failure);
    }
}

TEST_CASE("decimate examples") {
    CHECK(decimate(test::tile_of(2, {10, 20, 30, 40})).px == std::vector<std::uint8_t>{25});
    CHECK(decimate(test::tile_of(2, {0, 0, 0, 1})).px == std::vector<std::uint8_t>{0});
    CHECK(decimate(test::tile_of(2, {255, 255, 255, 254})).px == std::vector<std::uint8_t>{254});
    GrayImage flat(64, 64, 128);
    CHECK(decimate(flat, BlockView{16, 8, 32}) == Tile(16, 128));
}

TEST_CASE("decimate of image block equals decimate of extracted tile") {
    Rng rng(2);
    GrayImage img = test::random_image(rng, 64, 64);
    BlockView b{6, 10, 16};
    Tile d = decimate(img, b);
    Tile e = extract(img, b);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            int sum = e.at(2 * x, 2 * y) + e.at(2 * x + 1, 2 * y) + e.at(2 * x, 2 * y + 1) + e.at(2 * x + 1, 2 * y + 1);
            CHECK(d.at(x, y) == sum / 4);
        }
    }
}

TEST_CASE("isometry definitions") {
    // a b / c d
    Tile t = test::tile_of(2, {'a', 'b', 'c', 'd'});
    CHECK(apply_isometry(t, Isometry(0)) == t);
    CHECK(apply_isometry(t, Isometry(1)).px == std::vector<std::uint8_t>{'c', 'a', 'd', 'b'});
    CHECK(apply_isometry(t, Isometry(2)).px == std::vector<std::uint8_t>{'d', 'c', 'b', 'a'});
    CHECK(apply_isometry(t, Isometry(3)).px == std::vector<std::uint8_t>{'b', 'd', 'a', 'c'});
    CHECK(apply_isometry(t, Isometry(4)).px == std::vector<std::uint8_t>{'b', 'a', 'd', 'c'});
    // mirror after rot90
    CHECK(apply_isometry(t, Isometry(5)).px == std::vector<std::uint8_t>{'a', 'c', 'b', 'd'});
    CHECK(apply_isometry(apply_isometry(t, Isometry(4)), Isometry(4)) == t);
    CHECK_THROWS_AS(Isometry(8), Error);
    CHECK_THROWS_AS(Isometry(-1), Error);
}

TEST_CASE("isometry group properties") {
    Rng rng(3);
    for (int side : {2, 4, 8, 16}) {
        Tile t = test::random_tile(rng, side);
        std::vector<Tile> images;
        for (int a = 0; a < 8; ++a) {
            Tile ta = apply_isometry(t, Isometry(a));
            auto sa = ta.px, st = t.px;
            std::sort(sa.begin(), sa.end());
            std::sort(st.begin(), st.end());
            CHECK(sa == st);
            CHECK(apply_isometry(ta, Isometry(a).inverse()) == t);
            for (int b = 0; b < 8; ++b) {
                CHECK(apply_isometry(ta, Isometry(b)) ==
                      apply_isometry(t, Isometry::compose(Isometry(a), Isometry(b))));
            }
            images.push_back(ta);
        }
        // a random tile has 8 distinct images
        for (int a = 0; a < 8; ++a) {
            for (int b = a + 1; b < 8; ++b) {
                CHECK(images[static_cast<std::size_t>(a)] != images[static_cast<std::size_t>(b)]);
            }
        }
    }
}

TEST_CASE("isometry permutation matches apply") {
    Rng rng(4);
    Tile t = test::random_tile(rng, 8);
    for (int a = 0; a < 8; ++a) {
        auto perm = isometry_permutation(Isometry(a), 8);
        Tile out = apply_isometry(t, Isometry(a));
        for (std::size_t i = 0; i < perm.size(); ++i) {
            CHECK(out.px[i] == t.px[perm[i]]);
        }
    }
}

TEST_CASE("decimation commutes with isometries") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Tile t = test::random_tile(rng, 2 << (trial % 4));
        for (int a = 0; a < 8; ++a) {
            CHECK(decimate(apply_isometry(t, Isometry(a))) == apply_isometry(decimate(t), Isometry(a)));
        }
    }
}

TEST_CASE("dimension checks and crop") {
    CHECK_NOTHROW(require_dimensions_multiple_of(GrayImage(32, 48), 16));
    try {
        require_dimensions_multiple_of(GrayImage(513, 512), 16);
        FAIL("no error");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::unsupported_dimensions);
        CHECK(std::string(e.what()).find("dimensions not multiple of 16") != std::string::npos);
    }
    GrayImage big(37, 50);
    for (int y = 0; y < 50; ++y) {
        for (int x = 0; x < 37; ++x) {
            big.at(x, y) = static_cast<std::uint8_t>(x + y);
        }
    }
    GrayImage c = center_crop_to_multiple(big, 16);
    CHECK(c.width() == 32);
    CHECK(c.height() == 48);
    CHECK(c.at(0, 0) == big.at(2, 1));
    CHECK_THROWS_AS(center_crop_to_multiple(GrayImage(8, 40), 16), Error);
}
