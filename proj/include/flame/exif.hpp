#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "flame/io.hpp"

namespace flame::exif {

/// The handful of capture fields the pipeline reads and writes. Everything
/// else in an EXIF block is carried verbatim by copy operations.
struct Fields {
    std::optional<std::string> make;
    std::optional<std::string> model;
    std::optional<std::string> datetime;           // IFD0 DateTime (fallback)
    std::optional<std::string> datetime_original;  // "YYYY:MM:DD HH:MM:SS"
    std::optional<std::string> subsec_time_original;
    std::optional<std::uint32_t> pixel_x;
    std::optional<std::uint32_t> pixel_y;
    /// Free-form capture attributes (gimbal angles, exposure...). Serialized as
    /// "key=value" lines in UserComment.
    std::map<std::string, std::string> extra;

    bool operator==(const Fields&) const = default;
};

inline constexpr std::string_view kSignature{"Exif\0\0", 6};

bool is_exif_segment(ByteView app1_body);

/// Parses an APP1 body (starting with "Exif\0\0"). Accepts both byte orders.
/// Throws CorruptPayload on structural damage.
Fields parse(ByteView app1_body);

/// Builds a little-endian APP1 body holding `fields`.
Bytes build(const Fields& fields);

/// Rewrites PixelXDimension / PixelYDimension in place when present; other
/// bytes are left untouched. Returns a copy of the patched body.
Bytes patch_pixel_dimensions(ByteView app1_body, std::uint32_t width, std::uint32_t height);

}  // namespace flame::exif
