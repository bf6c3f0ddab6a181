#include <algorithm>
#include <cmath>

#include "flame/kernels.hpp"
#include "pixel_ops.hpp"

namespace flame::kernels::serial {

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

MinMax min_max(std::span<const double> values) {
    MinMax mm{values.empty() ? 0.0 : values[0], values.empty() ? 0.0 : values[0]};
    for (double v : values) {
        mm.min = std::min(mm.min, v);
        mm.max = std::max(mm.max, v);
    }
    return mm;
}

void normalize_indices(std::span<const double> values, double lo, double hi,
                       std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = normalize_one(values[i], lo, hi);
}

void palette_lookup(std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                    std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Rgb8& c = table[indices[i]];
        out[3 * i] = c.r;
        out[3 * i + 1] = c.g;
        out[3 * i + 2] = c.b;
    }
}

void threshold_mask(std::span<const double> values, double threshold, std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] >= threshold ? 1 : 0;
}

Histogram256 histogram256(std::span<const double> values, double lo, double hi) {
    Histogram256 h{};
    for (double v : values) ++h[histogram_bin(v, lo, hi)];
    return h;
}

std::size_t bilinear_resample(std::span<const std::uint8_t> src, int src_w, int src_h,
                              const ResampleMap& map, int dst_w, int dst_h,
                              std::span<std::uint8_t> dst, std::span<std::uint8_t> outside) {
    std::size_t count = 0;
    for (int v = 0; v < dst_h; ++v) {
        for (int u = 0; u < dst_w; ++u) {
            std::size_t i = static_cast<std::size_t>(v) * dst_w + u;
            detail::sample_bilinear(src, src_w, src_h, map, u, v, &dst[3 * i], outside[i]);
            count += outside[i];
        }
    }
    return count;
}

void arrival_times(std::span<const FrameView> frames, std::span<const double> times,
                   double threshold, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::arrival_one(frames, times, threshold, i);
}

void energy_trapezoid(std::span<const FrameView> frames, std::span<const double> times,
                      double ambient, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::energy_one(frames, times, ambient, i);
}

void rate_of_spread(std::span<const double> arrival, int w, int h, double gsd, double eps,
                    std::span<double> speed, std::span<std::uint8_t> valid) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            detail::ros_one(arrival, w, h, gsd, eps, x, y, speed[i], valid[i]);
        }
    }
}

void overlay_blend(std::span<const std::uint8_t> rgb, std::span<const double> values,
                   std::span<const std::uint8_t> indices, const std::array<Rgb8, 256>& table,
                   double threshold, double opacity, std::span<std::uint8_t> out) {
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        detail::blend_one(&rgb[3 * i], values[i], indices[i], table, threshold, opacity, &out[3 * i]);
    }
}

}  // namespace flame::kernels::serial
