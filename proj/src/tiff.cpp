#include "flame/tiff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "flame/error.hpp"

namespace flame::tiff {

namespace {

enum : std::uint16_t {
    kImageWidth = 256,
    kImageLength = 257,
    kBitsPerSample = 258,
    kCompression = 259,
    kPhotometric = 262,
    kStripOffsets = 273,
    kSamplesPerPixel = 277,
    kRowsPerStrip = 278,
    kStripByteCounts = 279,
    kPlanarConfig = 284,
    kSampleFormat = 339,
};

constexpr std::uint16_t kShort = 3;
constexpr std::uint16_t kLong = 4;

struct Layout {
    int width, height;
    std::uint16_t samples;
    std::uint16_t bits;
    std::uint16_t sample_format;  // 1 = uint, 3 = IEEE float
    std::uint16_t photometric;    // 1 = BlackIsZero, 2 = RGB
};

Bytes encode(const Layout& l, ByteView pixels) {
    ByteWriter w(true);
    w.str("II");
    w.u16(42);
    w.u32(0);  // IFD offset, patched below
    w.bytes(pixels);
    if (w.size() & 1) w.u8(0);
    const auto strip_offset = 8u;
    const auto strip_bytes = static_cast<std::uint32_t>(pixels.size());

    struct Tag {
        std::uint16_t id, type;
        std::uint32_t count;
        std::vector<std::uint32_t> values;
    };
    std::vector<std::uint32_t> bits(l.samples, l.bits), formats(l.samples, l.sample_format);
    std::vector<Tag> tags = {
        {kImageWidth, kLong, 1, {static_cast<std::uint32_t>(l.width)}},
        {kImageLength, kLong, 1, {static_cast<std::uint32_t>(l.height)}},
        {kBitsPerSample, kShort, l.samples, bits},
        {kCompression, kShort, 1, {1}},
        {kPhotometric, kShort, 1, {l.photometric}},
        {kStripOffsets, kLong, 1, {strip_offset}},
        {kSamplesPerPixel, kShort, 1, {l.samples}},
        {kRowsPerStrip, kLong, 1, {static_cast<std::uint32_t>(l.height)}},
        {kStripByteCounts, kLong, 1, {strip_bytes}},
        {kPlanarConfig, kShort, 1, {1}},
        {kSampleFormat, kShort, l.samples, formats},
    };

    const std::size_t ifd_at = w.size();
    w.patch_u32(4, static_cast<std::uint32_t>(ifd_at));
    std::size_t extra_at = ifd_at + 2 + tags.size() * 12 + 4;
    std::vector<const Tag*> out_of_line;
    w.u16(static_cast<std::uint16_t>(tags.size()));
    for (const Tag& t : tags) {
        std::size_t bytes = t.count * (t.type == kShort ? 2u : 4u);
        w.u16(t.id);
        w.u16(t.type);
        w.u32(t.count);
        if (bytes <= 4) {
            if (t.type == kShort) {
                w.u16(static_cast<std::uint16_t>(t.values[0]));
                w.u16(t.count > 1 ? static_cast<std::uint16_t>(t.values[1]) : 0);
            } else {
                w.u32(t.values[0]);
            }
        } else {
            w.u32(static_cast<std::uint32_t>(extra_at));
            extra_at += bytes;
            out_of_line.push_back(&t);
        }
    }
    w.u32(0);
    for (const Tag* t : out_of_line) {
        for (std::uint32_t v : t->values) {
            if (t->type == kShort) {
                w.u16(static_cast<std::uint16_t>(v));
            } else {
                w.u32(v);
            }
        }
    }
    return w.take();
}

[[noreturn]] void unsupported(const std::string& why) {
    fail(ErrorCode::UnsupportedTiffLayout, "unsupported TIFF: " + why);
}

}  // namespace

Bytes encode_float32(int width, int height, std::span<const float> values) {
    if (width <= 0 || height <= 0 || values.size() != static_cast<std::size_t>(width) * height) {
        fail(ErrorCode::InvalidArgument, "float TIFF dimensions do not match value count");
    }
    Bytes pixels(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(values[i]);
        for (int b = 0; b < 4; ++b) pixels[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
    return encode({width, height, 1, 32, 3, 1}, pixels);
}

Bytes encode_gray8(const ByteImage& image) {
    return encode({image.width, image.height, 1, 8, 1, 1}, image.pixels);
}

Bytes encode_rgb8(const RgbImage& image) {
    return encode({image.width, image.height, 3, 8, 1, 2}, image.pixels);
}

Bytes encode_float_grid(const FloatGrid& grid, float nodata) {
    std::vector<float> v(grid.values.size());
    std::transform(grid.values.begin(), grid.values.end(), v.begin(), [nodata](double d) {
        return std::isfinite(d) ? static_cast<float>(d) : nodata;
    });
    return encode_float32(grid.width, grid.height, v);
}

FloatGrid decode_float32(ByteView data) {
    if (data.size() < 8) unsupported("file too short");
    bool le;
    if (data[0] == 'I' && data[1] == 'I') {
        le = true;
    } else if (data[0] == 'M' && data[1] == 'M') {
        le = false;
    } else {
        unsupported("missing byte-order mark");
    }
    ByteReader r(data, le);
    try {
        if (r.u16(2) != 42) unsupported("bad magic (BigTIFF is not supported)");
        std::uint32_t ifd = r.u32(4);
        std::uint16_t n = r.u16(ifd);
        std::map<std::uint16_t, std::vector<std::uint32_t>> tags;
        for (std::uint16_t i = 0; i < n; ++i) {
            std::size_t at = ifd + 2 + static_cast<std::size_t>(i) * 12;
            std::uint16_t id = r.u16(at), type = r.u16(at + 2);
            std::uint32_t count = r.u32(at + 4);
            if (type != kShort && type != kLong) continue;
            std::size_t elem = type == kShort ? 2 : 4;
            std::size_t value_at = count * elem <= 4 ? at + 8 : r.u32(at + 8);
            if (!r.has(value_at, count * elem)) unsupported("tag value out of bounds");
            std::vector<std::uint32_t> values(count);
            for (std::uint32_t k = 0; k < count; ++k) {
                values[k] = type == kShort ? r.u16(value_at + k * 2) : r.u32(value_at + k * 4);
            }
            tags[id] = std::move(values);
        }
        auto scalar = [&](std::uint16_t id, std::uint32_t fallback) {
            auto it = tags.find(id);
            return it == tags.end() || it->second.empty() ? fallback : it->second[0];
        };
        const std::uint32_t width = scalar(kImageWidth, 0), height = scalar(kImageLength, 0);
        const std::uint32_t spp = scalar(kSamplesPerPixel, 1);
        if (width == 0 || height == 0) unsupported("missing dimensions");
        if (spp != 1) unsupported(std::to_string(spp) + " samples per pixel");
        if (scalar(kBitsPerSample, 1) != 32) unsupported("bits per sample is not 32");
        if (scalar(kSampleFormat, 1) != 3) unsupported("samples are not IEEE floating point");
        if (scalar(kCompression, 1) != 1) unsupported("compressed data");
        const auto& offsets = tags[kStripOffsets];
        const auto& counts = tags[kStripByteCounts];
        if (offsets.empty() || offsets.size() != counts.size()) unsupported("bad strip tables");

        const std::size_t expected = static_cast<std::size_t>(width) * height * 4;
        Bytes pixels;
        pixels.reserve(expected);
        for (std::size_t s = 0; s < offsets.size(); ++s) {
            ByteView strip = r.slice(offsets[s], counts[s]);
            pixels.insert(pixels.end(), strip.begin(), strip.end());
        }
        if (pixels.size() < expected) unsupported("strip data shorter than image");

        FloatGrid grid(static_cast<int>(width), static_cast<int>(height));
        ByteReader pr(pixels, le);
        for (std::size_t i = 0; i < grid.values.size(); ++i) grid.values[i] = pr.f32(i * 4);
        return grid;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnsupportedTiffLayout) throw;
        unsupported(e.what());
    }
}

Bytes encode_raster(const TemperatureRaster& raster) {
    raster.validate();
    std::vector<float> v(raster.values.begin(), raster.values.end());
    return encode_float32(raster.width, raster.height, v);
}

TemperatureRaster decode_raster(ByteView data) {
    FloatGrid g = decode_float32(data);
    TemperatureRaster r;
    r.width = g.width;
    r.height = g.height;
    r.values = std::move(g.values);
    try {
        r.validate();
    } catch (const Error&) {
        unsupported("raster contains non-finite values");
    }
    return r;
}

void write_tiff(const TemperatureRaster& raster, const std::filesystem::path& path) {
    write_file(path, encode_raster(raster));
}

TemperatureRaster read_tiff(const std::filesystem::path& path) { return decode_raster(read_file(path)); }

}  // namespace flame::tiff
