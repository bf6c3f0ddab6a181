#pragma once

#include <filesystem>

#include "flame/io.hpp"
#include "flame/raster.hpp"

namespace flame::tiff {

/// Baseline, uncompressed, single-strip little-endian TIFF encoders.
Bytes encode_float32(int width, int height, std::span<const float> values);
Bytes encode_gray8(const ByteImage& image);
Bytes encode_rgb8(const RgbImage& image);

/// Narrows to float32. NaN/Inf in `grid` are replaced by `nodata`.
Bytes encode_float_grid(const FloatGrid& grid, float nodata);

/// Decodes a single-band 32-bit IEEE float TIFF (either byte order, any strip
/// layout, no compression). Anything else is UnsupportedTiffLayout.
FloatGrid decode_float32(ByteView data);

/// Temperature raster <-> file. read_tiff also enforces raster invariants.
void write_tiff(const TemperatureRaster& raster, const std::filesystem::path& path);
TemperatureRaster read_tiff(const std::filesystem::path& path);

Bytes encode_raster(const TemperatureRaster& raster);
TemperatureRaster decode_raster(ByteView data);

}  // namespace flame::tiff
