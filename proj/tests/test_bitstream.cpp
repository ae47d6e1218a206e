#include <doctest.h>

#include "support.hpp"

using namespace frak;
using frak::test::Rng;

namespace {

CompressedStream flat_stream(int dn, int width = 32, int height = 32) {
    CompressedStream s;
    s.header.width = width;
    s.header.height = height;
    s.header.mode = SMode::proposed;
    SPolicy p = SPolicy::proposed();
    for (int step = 1; step <= kLevels; ++step) {
        LevelHeader &lv = s.header.levels[static_cast<std::size_t>(step - 1)];
        lv.stride = 2;
        lv.s_values = p.set(step);
        for (int i = 0; i < dn; ++i) {
            lv.origins.push_back({0, 0});
        }
    }
    for (int i = 0; i < (width / 16) * (height / 16); ++i) {
        s.records.push_back(MatchRecord{1, static_cast<std::uint8_t>(i), 0, 0, 0});
    }
    return s;
}

ErrorCode parse_code(const std::vector<std::uint8_t> &bytes) {
    try {
        deserialize(bytes);
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("parse succeeded");
    return ErrorCode::io_failure;
}

std::size_t payload_offset(const CompressedStream &s) { return header_bytes(s.header); }

} // namespace

TEST_CASE("address widths") {
    CHECK(address_bits(64) == 6);
    CHECK(address_bits(32) == 5);
    CHECK(address_bits(100) == 7);
    CHECK(address_bits(1) == 0);
    CHECK(address_bits(256) == 8);
    CHECK(address_bits(257) == 9);
    CompressedStream s = flat_stream(64);
    CHECK(record_bits(s.header, 1) == 2 + 8 + 3 + 6);
    CHECK(record_bits(s.header, 2) == 2 + 8 + 3 + 6 + 1);
}

TEST_CASE("bit writer and reader") {
    BitWriter w;
    w.put(0b101, 3);
    w.put(0xABCD, 16);
    w.put(0, 0);
    w.put(1, 1);
    CHECK(w.bit_count() == 20);
    auto bytes = std::move(w).finish();
    REQUIRE(bytes.size() == 3);
    CHECK(bytes[0] == 0b10110101);
    BitReader r(bytes);
    CHECK(r.get(3) == 0b101);
    CHECK(r.peek(16) == 0xABCD);
    CHECK(r.get(16) == 0xABCD);
    CHECK(r.get(1) == 1);
    CHECK(r.remaining() == 4);
    CHECK_THROWS_AS(r.get(5), Error);
}

TEST_CASE("flat tree layout and size") {
    CompressedStream s = flat_stream(64, 64, 48);
    auto leaves = layout(s);
    REQUIRE(leaves.size() == 12);
    CHECK(leaves[5].range == BlockView{16, 16, 16});
    auto bytes = serialize(s);
    CHECK(bytes.size() == header_bytes(s.header) + (12 * 19 + 7) / 8);
    CHECK(deserialize(bytes) == s);
}

TEST_CASE("hand-built mixed tree") {
    CompressedStream s = flat_stream(4, 32, 32);
    s.records.erase(s.records.begin());
    std::vector<MatchRecord> first;
    for (int st : {2, 2, 2, 3, 3, 3, 3}) {
        first.push_back(MatchRecord{static_cast<std::uint8_t>(st), 1, 2, 3, 1});
    }
    s.records.insert(s.records.begin(), first.begin(), first.end());
    auto leaves = layout(s);
    REQUIRE(leaves.size() == 10);
    CHECK(leaves[7].range == BlockView{16, 0, 16});
    CHECK(leaves[0].range == BlockView{0, 0, 8});
    CHECK(leaves[1].range == BlockView{8, 0, 8});
    CHECK(leaves[2].range == BlockView{0, 8, 8});
    CHECK(leaves[3].range == BlockView{8, 8, 4});
    CHECK(leaves[6].range == BlockView{12, 12, 4});
    int area = 0;
    for (auto &l : leaves) {
        area += l.range.area();
    }
    CHECK(area == 32 * 32);
    CHECK(deserialize(serialize(s)) == s);

    // one step-2 leaf short of a full tile
    s.records.pop_back();
    CHECK_THROWS_AS(layout(s), Error);
}

TEST_CASE("random streams round trip") {
    Rng rng(30);
    for (int trial = 0; trial < 500; ++trial) {
        CompressedStream s = test::random_stream(rng);
        auto bytes = serialize(s);
        CompressedStream back = deserialize(bytes);
        REQUIRE(back == s);
        CHECK(serialize(back) == bytes);
        CHECK(bytes.size() == header_bytes(s.header) + (payload_bits(s) + 7) / 8);
    }
}

TEST_CASE("crafted corrupt inputs") {
    CompressedStream s = flat_stream(3, 32, 32);
    const auto good = serialize(s);
    const std::size_t pay = payload_offset(s);

    auto bad = good;
    bad[0] = 'G';
    CHECK(parse_code(bad) == ErrorCode::bad_magic);
    CHECK(parse_code({'F', 'R'}) == ErrorCode::bad_magic);

    bad = good;
    bad[4] = 2;
    CHECK(parse_code(bad) == ErrorCode::version_mismatch);

    bad = good;
    bad[5] = 7;
    CHECK(parse_code(bad) == ErrorCode::malformed_stream_header);

    bad = good;
    bad[6] = 33;  // width 33
    CHECK(parse_code(bad) == ErrorCode::malformed_stream_header);

    CHECK(parse_code(std::vector<std::uint8_t>(good.begin(), good.begin() + 20)) == ErrorCode::truncated_stream);
    CHECK(parse_code(std::vector<std::uint8_t>(good.begin(), good.end() - 1)) == ErrorCode::truncated_stream);

    bad = good;
    bad.push_back(0);
    CHECK(parse_code(bad) == ErrorCode::trailing_data);

    // 4 records x 15 bits leave 4 padding bits; set the last
    bad = good;
    bad.back() |= 1;
    CHECK(parse_code(bad) == ErrorCode::trailing_data);

    // address 3 in a 3-entry pool: 2 address bits after step (2) + offset (8) + iso (3)
    bad = good;
    bad[pay + 1] |= 0b00000110;
    CHECK(parse_code(bad) == ErrorCode::address_out_of_range);

    // a step-1 record inside a split slot
    CompressedStream split = flat_stream(3, 32, 32);
    split.records = {MatchRecord{2, 0, 0, 0, 0}, MatchRecord{1, 0, 0, 0, 0}};
    BitWriter w;
    for (const auto &r : split.records) {
        w.put(r.step - 1u, 2);
        w.put(r.offset, 8);
        w.put(r.isometry, 3);
        w.put(r.domain_address, address_bits(3));
        w.put(r.s_index, r.step == 1 ? 0 : 1);
    }
    auto header_only = serialize(flat_stream(3, 32, 32));
    header_only.resize(header_bytes(split.header));
    auto payload = std::move(w).finish();
    header_only.insert(header_only.end(), payload.begin(), payload.end());
    CHECK(parse_code(header_only) == ErrorCode::step_inconsistency);

    // s index beyond a 3-value set (2 bits)
    CompressedStream three = flat_stream(1, 32, 32);
    three.header.levels[0].s_values = {0.1, 0.2, 0.3};
    three.records[0].s_index = 2;
    auto sb = serialize(three);
    // record: step 00, offset 8 bits, iso 3 bits, address 0 bits, s 2 bits
    sb[header_bytes(three.header) + 1] |= 0b00000110;
    CHECK(parse_code(sb) == ErrorCode::s_index_out_of_range);

    // pool count larger than the stream
    bad = good;
    const std::size_t count_at = 4 + 1 + 1 + 2 + 2 + 2 + 1 + 8;
    bad[count_at + 3] = 0x7f;
    CHECK(parse_code(bad) == ErrorCode::truncated_stream);

    // domain origin outside the image
    bad = good;
    bad[count_at + 4] = 200;
    CHECK(parse_code(bad) == ErrorCode::malformed_stream_header);
}

TEST_CASE("serialize rejects invalid streams") {
    CompressedStream s = flat_stream(4);
    s.records[0].domain_address = 4;
    CHECK_THROWS_AS(serialize(s), Error);
    s = flat_stream(4);
    s.records[1].s_index = 1;
    CHECK_THROWS_AS(serialize(s), Error);
    s = flat_stream(4);
    s.records.push_back(s.records[0]);
    CHECK_THROWS_AS(serialize(s), Error);
}
