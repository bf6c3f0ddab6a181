#pragma once

// Radiometric JPEG handling: the open reference container (APP7 "FLMR"),
// capture metadata read/write via EXIF, and a registry that lets vendor
// payload decoders be plugged in beside the reference one.
//
// Reference container layout is documented in docs/format.md.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flame/io.hpp"
#include "flame/jpeg.hpp"
#include "flame/raster.hpp"
#include "flame/time.hpp"

namespace flame {

enum class Modality { RGB, THERMAL };
enum class MediaKind { IMAGE, VIDEO };

std::string_view to_string(Modality m);
std::string_view to_string(MediaKind k);

struct CaptureMetadata {
    Timestamp timestamp{};
    std::string camera_model;
    int image_width = 0;
    int image_height = 0;
    Modality modality = Modality::RGB;
    /// Opaque passthrough (gimbal pitch, exposure...).
    std::map<std::string, std::string> gimbal_and_exposure;

    bool operator==(const CaptureMetadata&) const = default;
};

struct RadiometricPayload {
    int width = 0;
    int height = 0;
    float scale = 0.0f;   // degC per raw count
    float offset = 0.0f;  // degC at raw == 0
    std::vector<std::uint16_t> raw;
};

}  // namespace flame

namespace flame::codec {

inline constexpr double kDefaultScale = 0.1;
inline constexpr double kDefaultOffset = -273.15;
inline constexpr int kThermalJpegQuality = 95;

inline constexpr std::string_view kPayloadTag = "FLMR";
inline constexpr std::uint16_t kPayloadVersion = 1;
inline constexpr std::size_t kPayloadHeaderSize = 22;
/// Per-segment prefix: tag (4) + chunk index (1) + chunk count (1).
inline constexpr std::size_t kChunkPrefixSize = 6;

struct ReferenceEncoding {
    double scale = kDefaultScale;
    double offset = kDefaultOffset;
};

/// Header floats are stored as float32; the decoder interprets each as the
/// shortest decimal that round-trips it (0.1f -> 0.1), so the affine map is
/// exact in the decimal sense the encoder was configured with.
double widen_header_float(float v);

/// temperature = raw * scale + offset, with the widened header values.
TemperatureRaster payload_to_raster(const RadiometricPayload& payload);

/// Serializes a payload into the APP7 chunks of the reference container.
std::vector<jpeg::Segment> payload_segments(const RadiometricPayload& payload);

/// Plug-in point for vendor formats. Implementations must be stateless.
class RadiometricDecoder {
public:
    virtual ~RadiometricDecoder() = default;
    virtual std::string_view name() const = 0;
    /// True when the container carries this decoder's payload.
    virtual bool probe(const jpeg::Container& container) const = 0;
    /// Throws CorruptPayload for damaged payloads.
    virtual RadiometricPayload extract(const jpeg::Container& container) const = 0;
};

class DecoderRegistry {
public:
    /// Process-wide registry, pre-populated with the reference decoder.
    static DecoderRegistry& global();

    void add(std::unique_ptr<RadiometricDecoder> decoder);
    /// First registered decoder whose probe accepts the container.
    const RadiometricDecoder* find(const jpeg::Container& container) const;
    std::vector<std::string> names() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::unique_ptr<RadiometricDecoder>> decoders_;
};

/// Reads capture metadata from EXIF. nullopt when no EXIF block or no usable
/// timestamp. Modality is THERMAL iff a registered decoder recognizes a payload.
std::optional<CaptureMetadata> read_metadata(const jpeg::Container& container);
std::optional<CaptureMetadata> read_metadata(ByteView jpeg_bytes);

/// EXIF APP1 body carrying `meta`.
Bytes metadata_segment(const CaptureMetadata& meta);

struct DecodedImage {
    TemperatureRaster raster;
    /// Absent when the file carries no EXIF capture fields.
    std::optional<CaptureMetadata> meta;
};

/// Errors: NotAJpeg, MissingRadiometricPayload, CorruptPayload.
DecodedImage decode_rjpeg(ByteView file_bytes);

/// Emits grayscale (min-max) visual band + EXIF + FLMR payload.
/// Errors: ValueOutOfEncodableRange.
Bytes encode_reference_rjpeg(const TemperatureRaster& raster, const CaptureMetadata& meta,
                             const ReferenceEncoding& encoding = {});

/// Raw count for `celsius` under `encoding`, or nullopt if outside [0, 65535].
std::optional<std::uint16_t> encode_sample(double celsius, const ReferenceEncoding& encoding);

/// Copies the source EXIF block into dest (replacing any existing one) and
/// rewrites its pixel-dimension tags to dest's frame size. Dest scan data is
/// left byte-identical. Errors: IoFailure, NoMetadataInSource, NotAJpeg.
void copy_exif(const std::filesystem::path& source, const std::filesystem::path& dest);
Bytes copy_exif_bytes(ByteView source_jpeg, ByteView dest_jpeg);

}  // namespace flame::codec
