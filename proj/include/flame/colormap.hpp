#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "flame/io.hpp"
#include "flame/kernels.hpp"
#include "flame/raster.hpp"

namespace flame::colormap {

using Rgb8 = kernels::Rgb8;

struct Palette {
    std::string name;
    std::array<Rgb8, 256> entries{};
};

/// The 256-entry inferno table (shipped as data/palettes/inferno.csv).
const Palette& inferno();

/// Reads "index,R,G,B" rows; all 256 indices must appear exactly once.
Palette parse_palette_csv(std::string_view text, std::string name);
Palette load_palette_csv(const std::filesystem::path& path);
std::string palette_csv(const Palette& palette);

struct NormalizationMode {
    enum class Kind { MinMaxPerImage, FixedRange };
    Kind kind = Kind::MinMaxPerImage;
    double lo = 0;
    double hi = 0;

    static NormalizationMode min_max() { return {}; }
    /// Throws InvalidArgument unless lo < hi.
    static NormalizationMode fixed(double lo, double hi);

    /// "minmax" or "fixed:LO:HI".
    static NormalizationMode parse(std::string_view text);
    std::string to_string() const;
};

struct Normalized {
    ByteImage indices;
    double lo = 0;
    double hi = 0;
    /// Per-image range collapsed (constant raster); indices are all zero.
    bool degenerate = false;
};

/// index = clamp(round(255 * (T - lo) / (hi - lo)), 0, 255).
Normalized normalize(const TemperatureRaster& raster, const NormalizationMode& mode);

struct Rendered {
    RgbImage image;
    bool degenerate = false;
};

Rendered render(const TemperatureRaster& raster, const Palette& palette, const NormalizationMode& mode);

/// render() encoded as JPEG at the fixed export quality.
inline constexpr int kJpegQuality = 95;
Bytes render_thermal_jpeg(const TemperatureRaster& raster, const Palette& palette,
                          const NormalizationMode& mode, bool* degenerate = nullptr);

}  // namespace flame::colormap
