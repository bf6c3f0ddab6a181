#include "flame/align.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/kernels.hpp"

namespace flame::align {

Point AlignmentParams::forward(Point p) const {
    return {scale_x * (p.x - crop.x) + translate_x, scale_y * (p.y - crop.y) + translate_y};
}

Point AlignmentParams::inverse(Point q) const {
    return {crop.x + (q.x - translate_x) / scale_x, crop.y + (q.y - translate_y) / scale_y};
}

AlignmentParams identity_params(Size2 size) {
    return {1.0, 1.0, 0.0, 0.0, Rect{0, 0, static_cast<double>(size.width), static_cast<double>(size.height)}};
}

void validate_params(const AlignmentParams& p, Size2 source) {
    if (!(std::isfinite(p.scale_x) && p.scale_x > 0 && std::isfinite(p.scale_y) && p.scale_y > 0)) {
        fail(ErrorCode::InvalidArgument, "alignment scales must be positive");
    }
    if (!std::isfinite(p.translate_x) || !std::isfinite(p.translate_y)) {
        fail(ErrorCode::InvalidArgument, "alignment translation must be finite");
    }
    const Rect& c = p.crop;
    if (!(c.w > 0 && c.h > 0 && c.x >= 0 && c.y >= 0 && c.x + c.w <= source.width &&
          c.y + c.h <= source.height)) {
        fail(ErrorCode::CropOutOfBounds,
             fmt::format("crop ({}, {}, {}, {}) not within {}x{} source", c.x, c.y, c.w, c.h,
                         source.width, source.height));
    }
}

AlignedImage apply_alignment(const RgbImage& rgb, const AlignmentParams& p, Size2 target) {
    if (target.width <= 0 || target.height <= 0) fail(ErrorCode::InvalidArgument, "target size must be positive");
    validate_params(p, {rgb.width, rgb.height});
    kernels::ResampleMap map;
    map.origin_x = p.crop.x;
    map.origin_y = p.crop.y;
    map.scale_x = p.scale_x;
    map.scale_y = p.scale_y;
    map.translate_x = p.translate_x;
    map.translate_y = p.translate_y;
    map.min_x = p.crop.x;
    map.max_x = p.crop.x + p.crop.w - 1;
    map.min_y = p.crop.y;
    map.max_y = p.crop.y + p.crop.h - 1;

    AlignedImage out{RgbImage(target.width, target.height), Mask(target.width, target.height), 0};
    out.outside_count = kernels::bilinear_resample(rgb.pixels, rgb.width, rgb.height, map, target.width,
                                                   target.height, out.image.pixels, out.outside.pixels);
    return out;
}

ErrorMap alignment_error(const std::vector<std::pair<Point, Point>>& pairs) {
    if (pairs.empty()) fail(ErrorCode::EmptyInput, "alignment_error needs at least one point pair");
    ErrorMap m;
    m.points.reserve(pairs.size());
    double sum = 0;
    for (const auto& [expected, observed] : pairs) {
        double r = std::hypot(observed.x - expected.x, observed.y - expected.y);
        m.points.push_back({expected, r});
        sum += r;
        m.max = std::max(m.max, r);
    }
    m.mean = sum / static_cast<double>(pairs.size());
    return m;
}

namespace {

struct LineFit {
    double slope;
    double intercept;
};

// Least squares for target = slope * source + intercept.
LineFit fit_axis(const std::vector<Correspondence>& c, bool x_axis) {
    const double n = static_cast<double>(c.size());
    double mean_s = 0, mean_t = 0;
    for (const auto& k : c) {
        mean_s += x_axis ? k.rgb.x : k.rgb.y;
        mean_t += x_axis ? k.thermal.x : k.thermal.y;
    }
    mean_s /= n;
    mean_t /= n;
    double sst = 0, sss = 0;
    for (const auto& k : c) {
        double ds = (x_axis ? k.rgb.x : k.rgb.y) - mean_s;
        double dt = (x_axis ? k.thermal.x : k.thermal.y) - mean_t;
        sst += ds * dt;
        sss += ds * ds;
    }
    if (!(sss > 0)) {
        fail(ErrorCode::InsufficientCorrespondences,
             fmt::format("correspondences have no spread along {}; scale is indeterminate", x_axis ? "x" : "y"));
    }
    double slope = sst / sss;
    return {slope, mean_t - slope * mean_s};
}

}  // namespace

AlignmentEstimate estimate_alignment(const std::vector<Correspondence>& c, Size2 source) {
    if (c.size() < 2) {
        fail(ErrorCode::InsufficientCorrespondences,
             fmt::format("need at least 2 correspondences, got {}", c.size()));
    }
    LineFit fx = fit_axis(c, true);
    LineFit fy = fit_axis(c, false);
    if (!(fx.slope > 0 && fy.slope > 0)) {
        fail(ErrorCode::InsufficientCorrespondences, "correspondences imply a non-positive (mirrored) scale");
    }
    AlignmentEstimate est;
    est.params = {fx.slope, fy.slope, fx.intercept, fy.intercept,
                  Rect{0, 0, static_cast<double>(source.width), static_cast<double>(source.height)}};
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(c.size());
    for (const auto& k : c) pairs.emplace_back(est.params.forward(k.rgb), k.thermal);
    est.residuals = alignment_error(pairs);
    return est;
}

RgbImage overlay(const RgbImage& rgb, const TemperatureRaster& raster, double threshold, double opacity,
                 const colormap::Palette& palette) {
    if (rgb.width != raster.width || rgb.height != raster.height) {
        fail(ErrorCode::DimensionMismatch,
             fmt::format("overlay: rgb {}x{} vs raster {}x{}", rgb.width, rgb.height, raster.width, raster.height));
    }
    if (!(opacity >= 0.0 && opacity <= 1.0)) fail(ErrorCode::InvalidArgument, "opacity must be within [0, 1]");
    colormap::Normalized n = colormap::normalize(raster, colormap::NormalizationMode::min_max());
    RgbImage out(rgb.width, rgb.height);
    kernels::overlay_blend(rgb.pixels, raster.values, n.indices.pixels, palette.entries, threshold, opacity,
                           out.pixels);
    return out;
}

std::string error_map_csv(const ErrorMap& m) {
    std::string out = "x,y,residual_px\n";
    for (const auto& p : m.points) {
        out += csv::format_number(p.position.x) + "," + csv::format_number(p.position.y) + "," +
               csv::format_number(p.residual) + "\n";
    }
    return out;
}

std::vector<Correspondence> parse_correspondences_csv(std::string_view text) {
    auto rows = csv::parse_with_header(text, {"rgb_x", "rgb_y", "thermal_x", "thermal_y"}, "correspondences");
    std::vector<Correspondence> out;
    for (const auto& r : rows) {
        out.push_back({{csv::parse_number(r[0], "rgb_x"), csv::parse_number(r[1], "rgb_y")},
                       {csv::parse_number(r[2], "thermal_x"), csv::parse_number(r[3], "thermal_y")}});
    }
    return out;
}

}  // namespace flame::align
