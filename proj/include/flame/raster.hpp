#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flame {

/// Single-band temperature grid in degrees Celsius, row-major.
///
/// Values are kept in double precision so that decoded samples are the exact
/// affine image of the raw counts; TIFF export narrows to 32-bit float.
struct TemperatureRaster {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    double quantization_step = 0.0;

    TemperatureRaster() = default;
    TemperatureRaster(int w, int h, std::vector<double> v, double step = 0.0);
    TemperatureRaster(int w, int h, double fill, double step = 0.0);

    std::size_t size() const { return values.size(); }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

    /// Throws InvalidArgument if dimensions or finiteness invariants fail.
    void validate() const;

    double min_value() const;
    double max_value() const;

    bool operator==(const TemperatureRaster&) const = default;
};

/// Interleaved 8-bit RGB image.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size = width * height * 3

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* at(int x, int y) const {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }

    bool operator==(const RgbImage&) const = default;
};

/// Single-channel byte grid. Used for palette index images, 0/1 masks and
/// grayscale frames.
struct ByteImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    ByteImage() = default;
    ByteImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::size_t count_nonzero() const;

    bool operator==(const ByteImage&) const = default;
};

using Mask = ByteImage;

/// Generic single-band double grid (arrival times, speeds, energy).
struct FloatGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    FloatGrid() = default;
    FloatGrid(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct Size2 {
    int width = 0;
    int height = 0;
    bool operator==(const Size2&) const = default;
};

}  // namespace flame
