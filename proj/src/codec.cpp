#include "flame/codec.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "flame/error.hpp"
#include "flame/exif.hpp"
#include "flame/kernels.hpp"

namespace flame {

std::string_view to_string(Modality m) { return m == Modality::THERMAL ? "THERMAL" : "RGB"; }
std::string_view to_string(MediaKind k) { return k == MediaKind::VIDEO ? "VIDEO" : "IMAGE"; }

}  // namespace flame

namespace flame::codec {

namespace {

class ReferenceDecoder final : public RadiometricDecoder {
public:
    std::string_view name() const override { return "flmr-reference"; }

    bool probe(const jpeg::Container& c) const override {
        return c.find(jpeg::kApp7, kPayloadTag) != nullptr;
    }

    RadiometricPayload extract(const jpeg::Container& c) const override {
        auto chunks = c.find_all(jpeg::kApp7, kPayloadTag);
        if (chunks.empty()) fail(ErrorCode::MissingRadiometricPayload, "no FLMR segment");
        std::vector<const jpeg::Segment*> ordered;
        std::size_t count = 0;
        for (const auto* seg : chunks) {
            if (seg->body.size() < kChunkPrefixSize) fail(ErrorCode::CorruptPayload, "FLMR chunk too short");
            std::size_t index = seg->body[4];
            std::size_t n = seg->body[5];
            if (n == 0 || (count != 0 && n != count)) {
                fail(ErrorCode::CorruptPayload, "FLMR chunk count inconsistent");
            }
            count = n;
            if (ordered.empty()) ordered.assign(count, nullptr);
            if (index >= count || ordered[index] != nullptr) {
                fail(ErrorCode::CorruptPayload, "FLMR chunk index out of range or repeated");
            }
            ordered[index] = seg;
        }
        Bytes data;
        for (std::size_t i = 0; i < count; ++i) {
            if (!ordered[i]) fail(ErrorCode::CorruptPayload, fmt::format("FLMR chunk {} missing", i));
            data.insert(data.end(), ordered[i]->body.begin() + kChunkPrefixSize, ordered[i]->body.end());
        }

        if (data.size() < kPayloadHeaderSize) fail(ErrorCode::CorruptPayload, "FLMR header truncated");
        ByteReader r(data, true);
        if (std::memcmp(data.data(), kPayloadTag.data(), 4) != 0) {
            fail(ErrorCode::CorruptPayload, "FLMR header magic mismatch");
        }
        if (r.u16(4) != kPayloadVersion) {
            fail(ErrorCode::CorruptPayload, fmt::format("unsupported FLMR version {}", r.u16(4)));
        }
        RadiometricPayload p;
        p.width = r.u16(6);
        p.height = r.u16(8);
        p.scale = r.f32(10);
        p.offset = r.f32(14);
        std::uint32_t declared = r.u32(18);
        if (p.width == 0 || p.height == 0) fail(ErrorCode::CorruptPayload, "FLMR payload has zero dimension");
        if (!(std::isfinite(p.scale) && p.scale > 0.0f) || !std::isfinite(p.offset)) {
            fail(ErrorCode::CorruptPayload, "FLMR scale/offset invalid");
        }
        const std::size_t expected = static_cast<std::size_t>(p.width) * p.height * 2;
        if (declared != expected) {
            fail(ErrorCode::CorruptPayload,
                 fmt::format("FLMR declares {} sample bytes but {}x{} needs {}", declared, p.width,
                             p.height, expected));
        }
        if (data.size() - kPayloadHeaderSize != declared) {
            fail(ErrorCode::CorruptPayload,
                 fmt::format("FLMR declares {} sample bytes but carries {}", declared,
                             data.size() - kPayloadHeaderSize));
        }
        p.raw.resize(static_cast<std::size_t>(p.width) * p.height);
        for (std::size_t i = 0; i < p.raw.size(); ++i) p.raw[i] = r.u16(kPayloadHeaderSize + 2 * i);
        return p;
    }
};

}  // namespace

double widen_header_float(float v) { return widen_float(v); }

TemperatureRaster payload_to_raster(const RadiometricPayload& p) {
    const double scale = widen_header_float(p.scale);
    const double offset = widen_header_float(p.offset);
    std::vector<double> values(p.raw.size());
    for (std::size_t i = 0; i < p.raw.size(); ++i) values[i] = p.raw[i] * scale + offset;
    return TemperatureRaster(p.width, p.height, std::move(values), scale);
}

std::vector<jpeg::Segment> payload_segments(const RadiometricPayload& p) {
    ByteWriter w(true);
    w.reserve(kPayloadHeaderSize + 2 * p.raw.size());
    w.str(kPayloadTag);
    w.u16(kPayloadVersion);
    w.u16(static_cast<std::uint16_t>(p.width));
    w.u16(static_cast<std::uint16_t>(p.height));
    w.f32(p.scale);
    w.f32(p.offset);
    w.u32(static_cast<std::uint32_t>(p.raw.size() * 2));
    for (std::uint16_t s : p.raw) w.u16(s);
    const Bytes& data = w.data();

    constexpr std::size_t chunk = jpeg::kMaxSegmentBody - kChunkPrefixSize;
    const std::size_t count = (data.size() + chunk - 1) / chunk;
    if (count > 255) fail(ErrorCode::ValueOutOfEncodableRange, "payload too large for FLMR chunking");
    std::vector<jpeg::Segment> segs;
    for (std::size_t i = 0; i < count; ++i) {
        jpeg::Segment s;
        s.marker = jpeg::kApp7;
        s.body.assign(kPayloadTag.begin(), kPayloadTag.end());
        s.body.push_back(static_cast<std::uint8_t>(i));
        s.body.push_back(static_cast<std::uint8_t>(count));
        auto begin = data.begin() + static_cast<std::ptrdiff_t>(i * chunk);
        auto end = data.begin() + static_cast<std::ptrdiff_t>(std::min(data.size(), (i + 1) * chunk));
        s.body.insert(s.body.end(), begin, end);
        segs.push_back(std::move(s));
    }
    return segs;
}

DecoderRegistry& DecoderRegistry::global() {
    static DecoderRegistry* registry = [] {
        auto* r = new DecoderRegistry();
        r->add(std::make_unique<ReferenceDecoder>());
        return r;
    }();
    return *registry;
}

void DecoderRegistry::add(std::unique_ptr<RadiometricDecoder> decoder) {
    std::lock_guard lock(mutex_);
    decoders_.push_back(std::move(decoder));
}

const RadiometricDecoder* DecoderRegistry::find(const jpeg::Container& c) const {
    std::lock_guard lock(mutex_);
    for (const auto& d : decoders_) {
        if (d->probe(c)) return d.get();
    }
    return nullptr;
}

std::vector<std::string> DecoderRegistry::names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& d : decoders_) out.emplace_back(d->name());
    return out;
}

std::optional<CaptureMetadata> read_metadata(const jpeg::Container& c) {
    const jpeg::Segment* app1 = c.find(jpeg::kApp1, exif::kSignature);
    if (!app1) return std::nullopt;
    exif::Fields f = exif::parse(app1->body);
    std::optional<Timestamp> ts;
    if (f.datetime_original) {
        ts = parse_exif_datetime(*f.datetime_original, f.subsec_time_original.value_or(""));
    }
    if (!ts && f.datetime) ts = parse_exif_datetime(*f.datetime);
    if (!ts) return std::nullopt;

    CaptureMetadata m;
    m.timestamp = *ts;
    m.camera_model = f.model.value_or("");
    auto frame = c.frame_size();
    m.image_width = f.pixel_x ? static_cast<int>(*f.pixel_x) : (frame ? frame->width : 0);
    m.image_height = f.pixel_y ? static_cast<int>(*f.pixel_y) : (frame ? frame->height : 0);
    m.modality = DecoderRegistry::global().find(c) ? Modality::THERMAL : Modality::RGB;
    m.gimbal_and_exposure = std::move(f.extra);
    return m;
}

std::optional<CaptureMetadata> read_metadata(ByteView bytes) {
    return read_metadata(jpeg::Container::parse(bytes));
}

Bytes metadata_segment(const CaptureMetadata& meta) {
    exif::Fields f;
    f.model = meta.camera_model;
    f.datetime_original = format_exif_datetime(meta.timestamp);
    f.subsec_time_original = format_exif_subsec(meta.timestamp);
    if (meta.image_width > 0) f.pixel_x = static_cast<std::uint32_t>(meta.image_width);
    if (meta.image_height > 0) f.pixel_y = static_cast<std::uint32_t>(meta.image_height);
    f.extra = meta.gimbal_and_exposure;
    return exif::build(f);
}

DecodedImage decode_rjpeg(ByteView bytes) {
    jpeg::Container c = jpeg::Container::parse(bytes);
    const RadiometricDecoder* decoder = DecoderRegistry::global().find(c);
    if (!decoder) {
        fail(ErrorCode::MissingRadiometricPayload, "JPEG carries no recognized radiometric payload");
    }
    RadiometricPayload payload = decoder->extract(c);
    DecodedImage out{payload_to_raster(payload), std::nullopt};
    try {
        out.meta = read_metadata(c);
    } catch (const Error&) {
        // A damaged EXIF block does not invalidate the radiometric data.
        out.meta = std::nullopt;
    }
    return out;
}

namespace {

// scale/offset already widened
std::optional<std::uint16_t> quantize(double celsius, double scale, double offset) {
    const double q = (celsius - offset) / scale;
    constexpr double kTie = 1e-9;  // absorbs binary representation error of decimal parameters
    if (!(q >= -kTie && q <= 65535.0 + kTie)) return std::nullopt;
    double base = std::floor(q);
    double raw = (q - base) >= 0.5 - kTie ? base + 1.0 : base;
    if (raw < 0.0) raw = 0.0;
    if (raw > 65535.0) raw = 65535.0;
    return static_cast<std::uint16_t>(raw);
}

}  // namespace

std::optional<std::uint16_t> encode_sample(double celsius, const ReferenceEncoding& enc) {
    return quantize(celsius, widen_header_float(static_cast<float>(enc.scale)),
                    widen_header_float(static_cast<float>(enc.offset)));
}

Bytes encode_reference_rjpeg(const TemperatureRaster& raster, const CaptureMetadata& meta,
                             const ReferenceEncoding& enc) {
    raster.validate();
    if (raster.width > 0xFFFF || raster.height > 0xFFFF) {
        fail(ErrorCode::ValueOutOfEncodableRange, "raster too large for 16-bit dimensions");
    }
    if (!(enc.scale > 0.0)) fail(ErrorCode::InvalidArgument, "encoding scale must be positive");

    RadiometricPayload p;
    p.width = raster.width;
    p.height = raster.height;
    p.scale = static_cast<float>(enc.scale);
    p.offset = static_cast<float>(enc.offset);
    p.raw.resize(raster.size());
    const double scale = widen_header_float(p.scale), offset = widen_header_float(p.offset);
    for (std::size_t i = 0; i < raster.size(); ++i) {
        auto raw = quantize(raster.values[i], scale, offset);
        if (!raw) {
            fail(ErrorCode::ValueOutOfEncodableRange,
                 fmt::format("{} degC at pixel {} is outside [{}, {}]", raster.values[i], i, enc.offset,
                             enc.offset + 65535.0 * enc.scale));
        }
        p.raw[i] = *raw;
    }

    ByteImage visual(raster.width, raster.height, 0);
    auto mm = kernels::min_max(raster.values);
    if (mm.max > mm.min) kernels::normalize_indices(raster.values, mm.min, mm.max, visual.pixels);

    jpeg::Container c = jpeg::Container::parse(jpeg::encode_gray(visual, kThermalJpegQuality));
    CaptureMetadata m = meta;
    m.modality = Modality::THERMAL;
    m.image_width = raster.width;
    m.image_height = raster.height;
    std::vector<jpeg::Segment> front;
    front.push_back({jpeg::kApp1, metadata_segment(m)});
    auto chunks = payload_segments(p);
    front.insert(front.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
    c.insert_front(std::move(front));
    return c.serialize();
}

Bytes copy_exif_bytes(ByteView source_jpeg, ByteView dest_jpeg) {
    jpeg::Container src = jpeg::Container::parse(source_jpeg);
    const jpeg::Segment* app1 = src.find(jpeg::kApp1, exif::kSignature);
    if (!app1) fail(ErrorCode::NoMetadataInSource, "source JPEG has no EXIF block");
    jpeg::Container dst = jpeg::Container::parse(dest_jpeg);
    Bytes body = app1->body;
    if (auto size = dst.frame_size()) {
        body = exif::patch_pixel_dimensions(body, static_cast<std::uint32_t>(size->width),
                                            static_cast<std::uint32_t>(size->height));
    }
    dst.remove(jpeg::kApp1, exif::kSignature);
    dst.insert_front(jpeg::Segment{jpeg::kApp1, std::move(body)});
    return dst.serialize();
}

void copy_exif(const std::filesystem::path& source, const std::filesystem::path& dest) {
    Bytes src = read_file(source);
    Bytes dst = read_file(dest);
    write_file_atomic(dest, copy_exif_bytes(src, dst));
}

}  // namespace flame::codec
