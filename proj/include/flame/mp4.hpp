#pragma once

#include <optional>
#include <string>

#include "flame/io.hpp"
#include "flame/time.hpp"

namespace flame::mp4 {

/// What the pipeline needs from an ISO-BMFF (MP4/MOV) file: start time,
/// frame size of the first visual track, and the camera model if tagged.
struct Info {
    Timestamp creation_time{};
    int width = 0;
    int height = 0;
    double duration_s = 0.0;
    std::optional<std::string> model;  // moov/udta/(c)mdl

    bool operator==(const Info&) const = default;
};

bool has_signature(ByteView data);

/// Throws UnsupportedContainer when there is no moov/mvhd, CorruptPayload on
/// truncated boxes.
Info parse(ByteView data);

/// Minimal ftyp + moov{mvhd, trak{tkhd}, udta} file, used for fixtures.
Bytes build_minimal(const Info& info);

}  // namespace flame::mp4
