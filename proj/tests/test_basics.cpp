#include <doctest.h>

#include <cmath>

#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/io.hpp"
#include "flame/raster.hpp"
#include "flame/time.hpp"
#include "support.hpp"

using namespace flame;

TEST_CASE("raster invariants") {
    CHECK_THROWS_AS(TemperatureRaster(0, 1, 0.0), Error);
    CHECK_THROWS_AS(TemperatureRaster(2, 2, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(TemperatureRaster(1, 1, std::vector<double>{NAN}), Error);
    CHECK_THROWS_AS(TemperatureRaster(1, 1, std::vector<double>{INFINITY}), Error);
    TemperatureRaster r(2, 1, std::vector<double>{-3, 7});
    CHECK(r.min_value() == -3);
    CHECK(r.max_value() == 7);
}

TEST_CASE("csv quoting round trip") {
    csv::Row row{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
    auto parsed = csv::parse(csv::format_row(row));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == row);
    CHECK(csv::parse("a,b\r\nc,d\r\n").size() == 2);
    CHECK_THROWS_AS(csv::parse_with_header("x,y\n1,2\n", {"x", "z"}, "t"), Error);
    CHECK_THROWS_AS(csv::parse_with_header("x,y\n1\n", {"x", "y"}, "t"), Error);
}

TEST_CASE("csv numbers use the shortest round-trip form") {
    CHECK(csv::format_number(0.1) == "0.1");
    CHECK(csv::format_number(-273.15) == "-273.15");
    CHECK(csv::format_number(2) == "2");
    CHECK(csv::parse_number("1e-3", "v") == 0.001);
    CHECK_THROWS_AS(csv::parse_number("1.2x", "v"), Error);
}

TEST_CASE("exif datetime parsing") {
    auto t = parse_exif_datetime("2023:10:14 10:00:05", "25");
    REQUIRE(t);
    CHECK(format_iso8601(*t) == "2023-10-14T10:00:05.250Z");
    CHECK(format_iso8601(*parse_exif_datetime("2023:10:14 10:00:05")) == "2023-10-14T10:00:05.000Z");
    CHECK_FALSE(parse_exif_datetime("1999:12:31 23:59:59"));
    CHECK_FALSE(parse_exif_datetime("2101:01:01 00:00:00"));
    CHECK_FALSE(parse_exif_datetime("2023:13:01 00:00:00"));
    CHECK_FALSE(parse_exif_datetime("garbage"));
    Timestamp ts = make_timestamp(2024, 2, 29, 23, 59, 58, 7);
    CHECK(format_exif_datetime(ts) == "2024:02:29 23:59:58");
    CHECK(format_exif_subsec(ts) == "007");
    CHECK(parse_iso8601(format_iso8601(ts)) == ts);
    CHECK(seconds_between(ts, ts - std::chrono::milliseconds(1500)) == doctest::Approx(1.5));
}

TEST_CASE("byte reader bounds and endianness") {
    Bytes b{0x01, 0x02, 0x03, 0x04};
    ByteReader le(b, true), be(b, false);
    CHECK(le.u16(0) == 0x0201);
    CHECK(be.u16(0) == 0x0102);
    CHECK(le.u32(0) == 0x04030201u);
    CHECK_THROWS_AS(le.u32(1), Error);
    CHECK_THROWS_AS(le.slice(3, 2), Error);
    ByteWriter w(true);
    w.u32(7);
    w.patch_u32(0, 0xAABBCCDD);
    CHECK(w.data() == Bytes{0xDD, 0xCC, 0xBB, 0xAA});
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabc) == "0000000000000abc");
}

TEST_CASE("write_file_if_changed and atomic writes") {
    testutil::TempDir d;
    auto p = d / "sub/x.bin";
    CHECK(write_file_if_changed(p, to_bytes("abc")));
    CHECK_FALSE(write_file_if_changed(p, to_bytes("abc")));
    CHECK(write_file_if_changed(p, to_bytes("abd")));
    write_text_file_atomic(p, "zz");
    CHECK(read_text_file(p) == "zz");
    CHECK_THROWS_AS(read_file(d / "missing"), Error);
}

TEST_CASE("widen_float picks the shortest decimal") {
    CHECK(widen_float(0.1f) == 0.1);
    CHECK(widen_float(140.55f) == 140.55);
    CHECK(static_cast<float>(widen_float(1.0f / 3.0f)) == 1.0f / 3.0f);
}
