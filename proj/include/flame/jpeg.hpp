#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flame/io.hpp"
#include "flame/raster.hpp"

namespace flame::jpeg {

inline constexpr std::uint8_t kApp0 = 0xE0;
inline constexpr std::uint8_t kApp1 = 0xE1;
inline constexpr std::uint8_t kApp7 = 0xE7;

/// Largest segment body (bytes after the 2-byte length field).
inline constexpr std::size_t kMaxSegmentBody = 65533;

struct Segment {
    std::uint8_t marker = 0;
    Bytes body;  // excludes the marker and the length field

    bool starts_with(std::string_view prefix) const;
};

/// A JPEG split into its header segments and everything from SOS onward.
/// Re-serializing an unmodified container reproduces the input bytes
/// (marker fill bytes excepted).
struct Container {
    std::vector<Segment> segments;
    Bytes scan;  // SOS marker through EOI, verbatim

    /// Throws NotAJpeg on bad magic, CorruptPayload on truncated segments.
    static Container parse(ByteView data);
    Bytes serialize() const;

    const Segment* find(std::uint8_t marker, std::string_view prefix) const;
    std::vector<const Segment*> find_all(std::uint8_t marker, std::string_view prefix) const;
    void remove(std::uint8_t marker, std::string_view prefix);

    /// Inserts after any leading APP0 (JFIF) segment.
    void insert_front(Segment seg);
    void insert_front(std::vector<Segment> segs);

    /// Frame dimensions from the SOFn segment, if present.
    std::optional<Size2> frame_size() const;
};

bool has_magic(ByteView data);

Bytes encode_rgb(const RgbImage& image, int quality);
Bytes encode_gray(const ByteImage& image, int quality);

/// Decodes baseline/progressive JPEG to RGB (grayscale is expanded).
/// Throws NotAJpeg on bad magic, UnsupportedContainer if libjpeg rejects it.
RgbImage decode_rgb(ByteView data);

}  // namespace flame::jpeg
