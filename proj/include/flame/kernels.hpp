#pragma once

// Per-pixel kernels shared by the colormap, alignment, labeling and nadir
// modules. Each kernel exists twice: `kernels::serial` is the plain loop kept
// as the reference for tests, and `kernels::` (no sub-namespace) is the
// OpenMP version the library calls. Both must produce identical output.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flame::kernels {

struct MinMax {
    double min;
    double max;
};

struct Rgb8 {
    std::uint8_t r, g, b;
    bool operator==(const Rgb8&) const = default;
};

using Histogram256 = std::array<std::uint64_t, 256>;

/// Pixel (u, v) of the output samples the source at
///   x = origin_x + (u - translate_x) / scale_x
///   y = origin_y + (v - translate_y) / scale_y
/// and is valid only when x in [min_x, max_x] and y in [min_y, max_y].
struct ResampleMap {
    double origin_x = 0, origin_y = 0;
    double scale_x = 1, scale_y = 1;
    double translate_x = 0, translate_y = 0;
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
};

/// A stack frame is a read-only view over one raster's values.
using FrameView = std::span<const double>;

/// Round half away from zero.
inline long round_half_away(double v) {
    return v >= 0 ? static_cast<long>(v + 0.5) : -static_cast<long>(-v + 0.5);
}

/// 256-level index for `value` given the normalization range; requires hi > lo.
inline std::uint8_t normalize_one(double value, double lo, double hi) {
    long idx = round_half_away(255.0 * (value - lo) / (hi - lo));
    if (idx < 0) idx = 0;
    if (idx > 255) idx = 255;
    return static_cast<std::uint8_t>(idx);
}

/// Bin in [0, 255] of a 256-bin histogram over [lo, hi]; requires hi > lo.
inline int histogram_bin(double value, double lo, double hi) {
    double t = (value - lo) / (hi - lo) * 256.0;
    int bin = static_cast<int>(t);
    if (t < 0) bin = 0;
    if (bin > 255) bin = 255;
    return bin;
}

bool all_finite(std::span<const double> values);
MinMax min_max(std::span<const double> values);
void normalize_indices(std::span<const double> values, double lo, double hi,
                       std::span<std::uint8_t> out);
void palette_lookup(std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                    std::span<std::uint8_t> out_rgb);
void threshold_mask(std::span<const double> values, double threshold, std::span<std::uint8_t> out);
Histogram256 histogram256(std::span<const double> values, double lo, double hi);
/// Returns the number of output pixels whose sample fell outside the valid
/// window; those pixels are black and flagged in `outside`.
std::size_t bilinear_resample(std::span<const std::uint8_t> src_rgb, int src_w, int src_h,
                              const ResampleMap& map, int dst_w, int dst_h,
                              std::span<std::uint8_t> dst_rgb, std::span<std::uint8_t> outside);
/// First time per pixel with value >= threshold, +inf when never reached.
void arrival_times(std::span<const FrameView> frames, std::span<const double> times,
                   double threshold, std::span<double> out);
/// Trapezoidal integral over time of max(value - ambient, 0).
void energy_trapezoid(std::span<const FrameView> frames, std::span<const double> times,
                      double ambient, std::span<double> out);
/// gsd / |grad t| with central differences; border pixels, pixels next to a
/// non-finite arrival and pixels with |grad t| < epsilon are invalid (speed 0).
void rate_of_spread(std::span<const double> arrival, int w, int h, double gsd, double epsilon,
                    std::span<double> speed, std::span<std::uint8_t> valid);
/// Pixels with value >= threshold become (1 - opacity) * rgb + opacity * table[index].
void overlay_blend(std::span<const std::uint8_t> rgb, std::span<const double> values,
                   std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                   double threshold, double opacity, std::span<std::uint8_t> out_rgb);

namespace serial {
bool all_finite(std::span<const double> values);
MinMax min_max(std::span<const double> values);
void normalize_indices(std::span<const double> values, double lo, double hi,
                       std::span<std::uint8_t> out);
void palette_lookup(std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                    std::span<std::uint8_t> out_rgb);
void threshold_mask(std::span<const double> values, double threshold, std::span<std::uint8_t> out);
Histogram256 histogram256(std::span<const double> values, double lo, double hi);
std::size_t bilinear_resample(std::span<const std::uint8_t> src_rgb, int src_w, int src_h,
                              const ResampleMap& map, int dst_w, int dst_h,
                              std::span<std::uint8_t> dst_rgb, std::span<std::uint8_t> outside);
void arrival_times(std::span<const FrameView> frames, std::span<const double> times,
                   double threshold, std::span<double> out);
void energy_trapezoid(std::span<const FrameView> frames, std::span<const double> times,
                      double ambient, std::span<double> out);
void rate_of_spread(std::span<const double> arrival, int w, int h, double gsd, double epsilon,
                    std::span<double> speed, std::span<std::uint8_t> valid);
void overlay_blend(std::span<const std::uint8_t> rgb, std::span<const double> values,
                   std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                   double threshold, double opacity, std::span<std::uint8_t> out_rgb);
}  // namespace serial

/// Number of OpenMP threads the parallel kernels will use (1 when built
/// without OpenMP).
int max_threads();

}  // namespace flame::kernels
