#pragma once

// RGB -> thermal field-of-view correction: an axis-aligned scale + translate
// applied to a crop window of the RGB frame, its least-squares estimate from
// point correspondences, and Euclidean residual reporting.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flame/colormap.hpp"
#include "flame/raster.hpp"

namespace flame::align {

struct Rect {
    double x = 0, y = 0, w = 0, h = 0;
    bool operator==(const Rect&) const = default;
};

struct Point {
    double x = 0, y = 0;
    bool operator==(const Point&) const = default;
};

/// Thermal pixel (u, v) samples the RGB frame at
///   crop.x + (u - translate_x) / scale_x,  crop.y + (v - translate_y) / scale_y.
struct AlignmentParams {
    double scale_x = 1, scale_y = 1;
    double translate_x = 0, translate_y = 0;
    Rect crop;

    /// Thermal-frame position of an RGB-frame point.
    Point forward(Point rgb) const;
    /// RGB-frame position sampled for a thermal-frame point.
    Point inverse(Point thermal) const;

    bool operator==(const AlignmentParams&) const = default;
};

/// Identity over a full `size` frame.
AlignmentParams identity_params(Size2 size);

struct CameraProfile {
    std::string camera_model;
    Size2 rgb_resolution;
    Size2 ir_resolution;
    AlignmentParams default_params;
};

/// Throws CropOutOfBounds / InvalidArgument when `params` violates its
/// invariants for a `source`-sized frame.
void validate_params(const AlignmentParams& params, Size2 source);

struct AlignedImage {
    RgbImage image;
    Mask outside;  // 1 where the sample fell outside the crop window (pixel is black)
    std::size_t outside_count = 0;
};

/// Bilinear resample of `rgb` into a `target`-sized frame.
/// Errors: CropOutOfBounds, InvalidArgument (non-positive target or scale).
AlignedImage apply_alignment(const RgbImage& rgb, const AlignmentParams& params, Size2 target);

struct Correspondence {
    Point rgb;
    Point thermal;
};

struct Residual {
    Point position;  // thermal frame
    double residual = 0;
};

struct ErrorMap {
    std::vector<Residual> points;
    double mean = 0;
    double max = 0;
};

/// Residual i = |expected_i - observed_i|. Errors: EmptyInput.
ErrorMap alignment_error(const std::vector<std::pair<Point, Point>>& expected_observed);

struct AlignmentEstimate {
    AlignmentParams params;
    ErrorMap residuals;  // observed thermal point vs. params.forward(rgb point)
};

/// Independent per-axis least squares for scale and translation. The crop is
/// the full source frame; translation is relative to its origin.
/// Errors: InsufficientCorrespondences (< 2 points, or zero spread on an axis).
AlignmentEstimate estimate_alignment(const std::vector<Correspondence>& correspondences,
                                     Size2 source);

/// Pixels with T >= threshold are blended toward their palette colour (per-image
/// min-max) with weight `opacity`. Errors: DimensionMismatch, InvalidArgument.
RgbImage overlay(const RgbImage& rgb, const TemperatureRaster& raster, double threshold,
                 double opacity, const colormap::Palette& palette = colormap::inferno());

/// "x,y,residual_px" with header.
std::string error_map_csv(const ErrorMap& map);
std::vector<Correspondence> parse_correspondences_csv(std::string_view text);

// ---- camera profiles ------------------------------------------------------

/// Built-in profiles for the camera models in the reference collections.
const std::vector<CameraProfile>& builtin_profiles();

/// Profiles keyed by camera model. Parsed from the `profiles.toml` dialect
/// documented in docs/profiles.md; entries override built-ins of the same name.
class ProfileSet {
public:
    ProfileSet();  // built-ins only
    static ProfileSet from_text(std::string_view text, bool include_builtins = true);
    static ProfileSet from_file(const std::filesystem::path& path, bool include_builtins = true);

    const CameraProfile* find(std::string_view camera_model) const;
    /// Throws UnknownCameraProfile.
    const CameraProfile& get(std::string_view camera_model) const;
    void put(CameraProfile profile);
    std::vector<std::string> models() const;
    bool is_ir_resolution(Size2 size) const;

    std::string to_text() const;

private:
    std::map<std::string, CameraProfile, std::less<>> profiles_;
};

}  // namespace flame::align
