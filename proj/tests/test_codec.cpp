#include <doctest.h>

#include <cmath>
#include <random>

#include "flame/codec.hpp"
#include "flame/error.hpp"
#include "flame/exif.hpp"
#include "flame/jpeg.hpp"
#include "flame/mp4.hpp"
#include "flame/tiff.hpp"
#include "support.hpp"

using namespace flame;
using flame::codec::DecodedImage;

namespace {

// Hand-built reference container: plain JPEG + raw APP7 chunk, independent of
// the encoder so decode is checked against the documented layout.
Bytes build_container(std::uint16_t w, std::uint16_t h, float scale, float offset,
                      const std::vector<std::uint16_t>& raw, std::optional<std::uint32_t> declared = {}) {
    ByteWriter p(true);
    p.str("FLMR");
    p.u16(1);
    p.u16(w);
    p.u16(h);
    p.f32(scale);
    p.f32(offset);
    p.u32(declared.value_or(static_cast<std::uint32_t>(raw.size() * 2)));
    for (auto v : raw) p.u16(v);
    Bytes data = p.take();
    Bytes body = {'F', 'L', 'M', 'R', 0, 1};
    body.insert(body.end(), data.begin(), data.end());
    jpeg::Container c = jpeg::Container::parse(jpeg::encode_gray(ByteImage(std::max<int>(w, 1), std::max<int>(h, 1), 128), 90));
    c.insert_front(jpeg::Segment{jpeg::kApp7, body});
    return c.serialize();
}

int raw_of(double celsius) {
    // Independent inversion of T = raw * 0.1 - 273.15 in decimal-exact integer
    // arithmetic (hundredths of a degree).
    long centi = std::lround(celsius * 100.0);
    long num = centi + 27315;  // raw * 10
    long q = num / 10, r = num % 10;
    return static_cast<int>(r >= 5 ? q + 1 : q);
}

}  // namespace

TEST_CASE("reference container decodes with the stated affine") {
    std::vector<std::uint16_t> raw{2732, 2932, 0, 4232};
    DecodedImage d = codec::decode_rjpeg(build_container(2, 2, 0.1f, -273.15f, raw));
    REQUIRE(d.raster.width == 2);
    REQUIRE(d.raster.height == 2);
    // 2932 counts is 20.05 under this affine
    const double expect[] = {0.05, 20.05, -273.15, 150.05};
    for (int i = 0; i < 4; ++i) {
        CHECK(d.raster.values[i] == raw[i] * 0.1 + -273.15);
        CHECK(d.raster.values[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
    CHECK_FALSE(d.meta.has_value());
    CHECK(d.raster.quantization_step == 0.1);
}

TEST_CASE("decode errors are typed") {
    auto code_of = [](const Bytes& b) {
        try {
            codec::decode_rjpeg(b);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    CHECK(code_of(Bytes{'P', 'N', 'G', 0}) == ErrorCode::NotAJpeg);
    CHECK(code_of(Bytes{}) == ErrorCode::NotAJpeg);
    CHECK(code_of(jpeg::encode_gray(ByteImage(4, 4, 9), 90)) == ErrorCode::MissingRadiometricPayload);
    CHECK(code_of(build_container(2, 2, 0.1f, -273.15f, {1, 2, 3, 4}, 6)) == ErrorCode::CorruptPayload);
    CHECK(code_of(build_container(2, 2, 0.1f, -273.15f, {1, 2, 3})) == ErrorCode::CorruptPayload);
    CHECK(code_of(build_container(0, 2, 0.1f, -273.15f, {})) == ErrorCode::CorruptPayload);
    CHECK(code_of(build_container(1, 1, -0.1f, 0.0f, {5})) == ErrorCode::CorruptPayload);
    Bytes truncated = build_container(2, 2, 0.1f, -273.15f, {1, 2, 3, 4});
    truncated.resize(40);
    ErrorCode c = code_of(truncated);
    CHECK((c == ErrorCode::CorruptPayload || c == ErrorCode::MissingRadiometricPayload));
}

TEST_CASE("encode 0 degC gives raw 2732 and 7000 degC is out of range") {
    CHECK(codec::encode_sample(0.0, {}) == std::uint16_t{2732});
    CHECK(codec::encode_sample(-273.15, {}) == std::uint16_t{0});
    CHECK(codec::encode_sample(6280.35, {}) == std::uint16_t{65535});
    CHECK_FALSE(codec::encode_sample(7000.0, {}));
    CHECK_FALSE(codec::encode_sample(-274.0, {}));
    TemperatureRaster hot(1, 1, 7000.0);
    auto meta = testutil::meta_at(make_timestamp(2023, 1, 1, 0, 0, 0));
    try {
        codec::encode_reference_rjpeg(hot, meta);
        FAIL("expected ValueOutOfEncodableRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValueOutOfEncodableRange);
    }

    TemperatureRaster zero(1, 1, 0.0);
    jpeg::Container c = jpeg::Container::parse(codec::encode_reference_rjpeg(zero, meta));
    auto chunks = c.find_all(jpeg::kApp7, "FLMR");
    REQUIRE(chunks.size() == 1);
    ByteReader r(chunks[0]->body, true);
    CHECK(r.u32(6 + 18) == 2u);      // payload_len
    CHECK(r.u16(6 + 22) == 2732);    // first sample
}

TEST_CASE("round trip within half a count, random rasters") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 30);
        TemperatureRaster r(w, h, 0.0);
        std::uniform_real_distribution<double> d(-20.0, 600.0);
        for (auto& v : r.values) v = d(rng);
        auto meta = testutil::meta_at(make_timestamp(2023, 10, 14, 10, 0, 0, k));
        DecodedImage out = codec::decode_rjpeg(codec::encode_reference_rjpeg(r, meta));
        REQUIRE(out.raster.width == w);
        double worst = 0;
        for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(out.raster.values[i] - r.values[i]));
        CHECK(worst <= 0.05 + 1e-9);
        REQUIRE(out.meta);
        CHECK(out.meta->timestamp == meta.timestamp);
        CHECK(out.meta->modality == Modality::THERMAL);
    }
}

TEST_CASE("encoder matches an integer-arithmetic oracle on the 0.01 grid") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> d(-2000, 60000);  // hundredths
    for (int k = 0; k < 5000; ++k) {
        double c = d(rng) / 100.0;
        auto raw = codec::encode_sample(c, {});
        REQUIRE(raw);
        CHECK(*raw == raw_of(c));
    }
}

TEST_CASE("large raster spans several APP7 chunks and stays byte-stable") {
    std::mt19937_64 rng(5);
    TemperatureRaster r = testutil::random_raster(rng, 640, 512, -20, 600);
    auto meta = testutil::meta_at(make_timestamp(2023, 10, 14, 10, 0, 0));
    Bytes a = codec::encode_reference_rjpeg(r, meta);
    Bytes b = codec::encode_reference_rjpeg(r, meta);
    CHECK(a == b);
    jpeg::Container c = jpeg::Container::parse(a);
    auto chunks = c.find_all(jpeg::kApp7, "FLMR");
    CHECK(chunks.size() == (640u * 512 * 2 + 22 + 65527 - 1) / 65527);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        CHECK(chunks[i]->body[4] == i);
        CHECK(chunks[i]->body[5] == chunks.size());
    }
    DecodedImage d = codec::decode_rjpeg(a);
    for (std::size_t i = 0; i < r.size(); i += 997) CHECK(std::abs(d.raster.values[i] - r.values[i]) <= 0.05 + 1e-9);
    // the visual band is a real 640x512 JPEG
    CHECK(jpeg::decode_rgb(a).width == 640);
}

TEST_CASE("container parse/serialize is lossless") {
    Bytes j = jpeg::encode_rgb(RgbImage(8, 8), 90);
    CHECK(jpeg::Container::parse(j).serialize() == j);
    CHECK(jpeg::Container::parse(j).frame_size() == Size2{8, 8});
}

TEST_CASE("exif fields round trip in both byte orders") {
    exif::Fields f;
    f.make = "DJI";
    f.model = "M30T";
    f.datetime_original = "2023:10:14 10:00:05";
    f.subsec_time_original = "250";
    f.pixel_x = 640;
    f.pixel_y = 512;
    f.extra = {{"gimbal_pitch", "-90"}, {"iso", "100"}};
    Bytes le = exif::build(f);
    CHECK(exif::is_exif_segment(le));
    CHECK(exif::parse(le) == f);

    // Big-endian copy of a minimal IFD0 {Model} block, written by hand.
    ByteWriter w(false);
    w.str(exif::kSignature);
    w.str("MM");
    w.u16(42);
    w.u32(8);
    w.u16(1);
    w.u16(0x0110);
    w.u16(2);
    w.u32(5);
    w.u32(26);
    w.u32(0);
    w.str("XT70");
    w.u8(0);
    exif::Fields be = exif::parse(w.take());
    CHECK(be.model == "XT70");

    Bytes patched = exif::patch_pixel_dimensions(le, 4000, 3000);
    exif::Fields p = exif::parse(patched);
    CHECK(p.pixel_x == 4000u);
    CHECK(p.pixel_y == 3000u);
    CHECK(p.model == f.model);
    CHECK(patched.size() == le.size());
    CHECK_THROWS_AS(exif::parse(Bytes{'E', 'x', 'i', 'f', 0, 0, 'I', 'I'}), Error);
}

TEST_CASE("metadata read falls back to DateTime and defaults subsec") {
    exif::Fields f;
    f.model = "M2EA";
    f.datetime = "2022:05:01 08:30:00";
    jpeg::Container c = jpeg::Container::parse(jpeg::encode_rgb(RgbImage(4, 3), 90));
    c.insert_front(jpeg::Segment{jpeg::kApp1, exif::build(f)});
    auto m = codec::read_metadata(c);
    REQUIRE(m);
    CHECK(format_iso8601(m->timestamp) == "2022-05-01T08:30:00.000Z");
    CHECK(m->camera_model == "M2EA");
    CHECK(m->image_width == 4);
    CHECK(m->modality == Modality::RGB);
    CHECK_FALSE(codec::read_metadata(jpeg::encode_rgb(RgbImage(4, 3), 90)));
}

TEST_CASE("copy_exif carries timestamp and model, leaves pixels alone") {
    testutil::TempDir d;
    TemperatureRaster r(16, 8, 20.0);
    auto meta = testutil::meta_at(make_timestamp(2023, 10, 14, 10, 0, 5, 250));
    meta.gimbal_and_exposure = {{"gimbal_pitch", "-45"}};
    write_file(d / "src.jpg", codec::encode_reference_rjpeg(r, meta));
    Bytes dest = jpeg::encode_rgb(RgbImage(32, 16), 95);
    write_file(d / "dst.jpg", dest);
    Bytes scan_before = jpeg::Container::parse(dest).scan;
    RgbImage pixels_before = jpeg::decode_rgb(dest);

    codec::copy_exif(d / "src.jpg", d / "dst.jpg");
    Bytes after = read_file(d / "dst.jpg");
    auto m = codec::read_metadata(after);
    REQUIRE(m);
    CHECK(m->timestamp == meta.timestamp);
    CHECK(m->camera_model == "M30T");
    CHECK(m->gimbal_and_exposure == meta.gimbal_and_exposure);
    CHECK(m->image_width == 32);
    CHECK(m->modality == Modality::RGB);  // metadata only, no payload copied
    CHECK(jpeg::Container::parse(after).scan == scan_before);
    CHECK(jpeg::decode_rgb(after) == pixels_before);

    write_file(d / "bare.jpg", jpeg::encode_rgb(RgbImage(4, 4), 90));
    try {
        codec::copy_exif(d / "bare.jpg", d / "dst.jpg");
        FAIL("expected NoMetadataInSource");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoMetadataInSource);
    }
    try {
        codec::copy_exif(d / "missing.jpg", d / "dst.jpg");
        FAIL("expected IoFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoFailure);
    }
}

TEST_CASE("tiff write/read is bit-exact for float values") {
    testutil::TempDir d;
    std::mt19937_64 rng(9);
    TemperatureRaster r(640, 512, 0.0);
    std::uniform_real_distribution<float> u(-20.0f, 600.0f);
    for (auto& v : r.values) v = u(rng);
    tiff::write_tiff(r, d / "a.tiff");
    TemperatureRaster back = tiff::read_tiff(d / "a.tiff");
    CHECK(back.width == 640);
    CHECK(back.height == 512);
    CHECK(back.values == r.values);
}

TEST_CASE("tiff reader rejects non float layouts") {
    auto code_of = [](const Bytes& b) {
        try {
            tiff::decode_raster(b);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    CHECK(code_of(tiff::encode_rgb8(RgbImage(4, 4))) == ErrorCode::UnsupportedTiffLayout);
    CHECK(code_of(tiff::encode_gray8(ByteImage(4, 4))) == ErrorCode::UnsupportedTiffLayout);
    CHECK(code_of(to_bytes("not a tiff")) == ErrorCode::UnsupportedTiffLayout);
    std::vector<float> nan{NAN};
    CHECK(code_of(tiff::encode_float32(1, 1, nan)) == ErrorCode::UnsupportedTiffLayout);
}

TEST_CASE("big-endian multi-strip float tiff decodes") {
    // 2x2, two strips, MM byte order, hand-built.
    ByteWriter w(false);
    w.str("MM");
    w.u16(42);
    w.u32(8);
    const std::uint16_t n = 8;
    w.u16(n);
    auto entry = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t count, std::uint32_t value) {
        w.u16(tag);
        w.u16(type);
        w.u32(count);
        if (type == 3 && count == 1) {
            w.u16(static_cast<std::uint16_t>(value));
            w.u16(0);
        } else {
            w.u32(value);
        }
    };
    const std::uint32_t data = 8 + 2 + n * 12 + 4;  // strip offsets array follows the IFD
    entry(256, 3, 1, 2);
    entry(257, 3, 1, 2);
    entry(258, 3, 1, 32);
    entry(259, 3, 1, 1);
    entry(273, 4, 2, data);      // -> offsets array
    entry(277, 3, 1, 1);
    entry(279, 4, 2, data + 8);  // -> byte counts array
    entry(339, 3, 1, 3);
    w.u32(0);
    w.u32(data + 16);
    w.u32(data + 24);
    w.u32(8);
    w.u32(8);
    for (float f : {1.5f, -2.0f, 3.25f, 600.0f}) w.f32(f);
    FloatGrid g = tiff::decode_float32(w.take());
    CHECK(g.width == 2);
    CHECK(g.values == std::vector<double>{1.5, -2.0, 3.25, 600.0});
}

TEST_CASE("mp4 info round trip") {
    mp4::Info i{make_timestamp(2023, 10, 14, 10, 30, 0), 640, 512, 12.5, std::string("M30T")};
    Bytes b = mp4::build_minimal(i);
    CHECK(mp4::has_signature(b));
    CHECK(mp4::parse(b) == i);
    CHECK_THROWS_AS(mp4::parse(to_bytes("\0\0\0\x08""free")), Error);
}

TEST_CASE("decoder registry accepts plug-ins") {
    struct Fake : codec::RadiometricDecoder {
        std::string_view name() const override { return "fake"; }
        bool probe(const jpeg::Container& c) const override { return c.find(0xEA, "FAKE") != nullptr; }
        RadiometricPayload extract(const jpeg::Container&) const override {
            return {1, 1, 1.0f, 0.0f, {42}};
        }
    };
    static bool added = false;
    if (!added) {
        codec::DecoderRegistry::global().add(std::make_unique<Fake>());
        added = true;
    }
    auto names = codec::DecoderRegistry::global().names();
    CHECK(names.front() == "flmr-reference");
    jpeg::Container c = jpeg::Container::parse(jpeg::encode_gray(ByteImage(1, 1), 90));
    c.insert_front(jpeg::Segment{0xEA, to_bytes("FAKE")});
    DecodedImage d = codec::decode_rjpeg(c.serialize());
    CHECK(d.raster.values == std::vector<double>{42.0});
}
