#pragma once

// Per-pixel bodies shared by the serial and OpenMP kernel loops.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "flame/kernels.hpp"

namespace flame::kernels::detail {

inline void sample_bilinear(std::span<const std::uint8_t> src, int src_w, int src_h,
                            const ResampleMap& m, int u, int v, std::uint8_t* dst,
                            std::uint8_t& outside) {
    double x = m.origin_x + (u - m.translate_x) / m.scale_x;
    double y = m.origin_y + (v - m.translate_y) / m.scale_y;
    if (!(x >= m.min_x && x <= m.max_x && y >= m.min_y && y <= m.max_y)) {
        dst[0] = dst[1] = dst[2] = 0;
        outside = 1;
        return;
    }
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;
    int x1 = x0 + 1 < src_w ? x0 + 1 : x0;
    int y1 = y0 + 1 < src_h ? y0 + 1 : y0;
    const std::uint8_t* p00 = &src[(static_cast<std::size_t>(y0) * src_w + x0) * 3];
    const std::uint8_t* p10 = &src[(static_cast<std::size_t>(y0) * src_w + x1) * 3];
    const std::uint8_t* p01 = &src[(static_cast<std::size_t>(y1) * src_w + x0) * 3];
    const std::uint8_t* p11 = &src[(static_cast<std::size_t>(y1) * src_w + x1) * 3];
    for (int c = 0; c < 3; ++c) {
        double top = p00[c] + (p10[c] - p00[c]) * fx;
        double bottom = p01[c] + (p11[c] - p01[c]) * fx;
        double value = top + (bottom - top) * fy;
        long r = round_half_away(value);
        dst[c] = static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
    }
    outside = 0;
}

inline double arrival_one(std::span<const FrameView> frames, std::span<const double> times,
                          double threshold, std::size_t i) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f][i] >= threshold) return times[f];
    }
    return std::numeric_limits<double>::infinity();
}

inline double energy_one(std::span<const FrameView> frames, std::span<const double> times,
                         double ambient, std::size_t i) {
    double total = 0.0;
    double prev = std::max(frames[0][i] - ambient, 0.0);
    for (std::size_t f = 1; f < frames.size(); ++f) {
        double cur = std::max(frames[f][i] - ambient, 0.0);
        total += 0.5 * (prev + cur) * (times[f] - times[f - 1]);
        prev = cur;
    }
    return total;
}

inline void ros_one(std::span<const double> t, int w, int h, double gsd, double eps, int x, int y,
                    double& speed, std::uint8_t& valid) {
    speed = 0.0;
    valid = 0;
    if (x <= 0 || y <= 0 || x >= w - 1 || y >= h - 1) return;
    auto at = [&](int xx, int yy) { return t[static_cast<std::size_t>(yy) * w + xx]; };
    double c = at(x, y), l = at(x - 1, y), r = at(x + 1, y), u = at(x, y - 1), d = at(x, y + 1);
    if (!std::isfinite(c) || !std::isfinite(l) || !std::isfinite(r) || !std::isfinite(u) ||
        !std::isfinite(d)) {
        return;
    }
    double gx = 0.5 * (r - l);
    double gy = 0.5 * (d - u);
    double mag = std::sqrt(gx * gx + gy * gy);
    if (mag < eps) return;
    speed = gsd / mag;
    valid = 1;
}

inline void blend_one(const std::uint8_t* rgb, double value, std::uint8_t index,
                      const std::array<Rgb8, 256>& table, double threshold, double opacity,
                      std::uint8_t* out) {
    if (value < threshold) {
        out[0] = rgb[0];
        out[1] = rgb[1];
        out[2] = rgb[2];
        return;
    }
    const Rgb8& c = table[index];
    const std::uint8_t tint[3] = {c.r, c.g, c.b};
    for (int k = 0; k < 3; ++k) {
        long v = round_half_away((1.0 - opacity) * rgb[k] + opacity * tint[k]);
        out[k] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
}

}  // namespace flame::kernels::detail
