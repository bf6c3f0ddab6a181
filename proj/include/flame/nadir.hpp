#pragma once

// Repeat nadir imagery over a fixed plot: time-ordered stacks, GCP affine
// georeferencing, and per-pixel arrival time, rate of spread and a
// degree-second energy proxy.

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "flame/align.hpp"
#include "flame/raster.hpp"
#include "flame/time.hpp"

namespace flame::nadir {

inline constexpr double kNominalInterval = 5.0;
inline constexpr double kDefaultIgnition = 200.0;
inline constexpr double kGradientEpsilon = 1e-6;
/// Arrival time of a pixel that never reached the threshold.
inline constexpr double kNever = std::numeric_limits<double>::infinity();
/// Value written to product TIFFs for NEVER / masked pixels.
inline constexpr float kNoData = -1.0f;

struct Frame {
    Timestamp timestamp{};
    TemperatureRaster raster;
    std::string source;  // file name, informational
};

struct Gap {
    double start_s = 0;  // relative to stack start
    double end_s = 0;
    double seconds() const { return end_s - start_s; }
};

struct GroundControlPoint {
    std::string name;  // CENTER, NORTH, EAST, SOUTH, or any other tag
    align::Point pixel;
    double easting = 0;
    double northing = 0;
};

struct PlotConfig {
    std::string plot_id;
    double nominal_interval = kNominalInterval;
};

struct NadirStack {
    std::string plot_id;
    std::vector<Frame> frames;  // strictly increasing timestamps, same size
    std::vector<GroundControlPoint> gcps;
    double gsd = std::numeric_limits<double>::quiet_NaN();
    double nominal_interval = kNominalInterval;
    std::vector<Gap> gaps;  // intervals longer than 2x nominal

    int width() const { return frames.empty() ? 0 : frames.front().raster.width; }
    int height() const { return frames.empty() ? 0 : frames.front().raster.height; }
    /// Seconds since the first frame.
    std::vector<double> times() const;
    double duration() const;
};

/// Sorts by timestamp and reports gaps. Errors: EmptyStack, MixedDimensions,
/// InvalidArgument (two frames with the same timestamp).
NadirStack build_stack(std::vector<Frame> frames, const PlotConfig& config);

/// Decodes one radiometric JPEG; the timestamp comes from its EXIF block.
/// Errors: as the codec, plus NoMetadataInSource when there is no timestamp.
Frame load_frame(const std::filesystem::path& path);

/// easting = a u + b v + c, northing = d u + e v + f.
struct WorldTransform {
    double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
    align::Point apply(align::Point pixel) const;
};

struct GcpResidual {
    std::string name;
    double residual_m = 0;
};

struct Georeference {
    WorldTransform transform;
    double gsd = 0;  // mean singular value of the linear part
    std::vector<GcpResidual> residuals;
};

/// Least-squares affine fit. Errors: InsufficientGcps (< 3), CollinearGcps.
Georeference georeference(const std::vector<GroundControlPoint>& gcps);
/// Fits, stores gcps and gsd into the stack.
Georeference georeference(NadirStack& stack, const std::vector<GroundControlPoint>& gcps);

/// "name,u,v,easting,northing" with header.
std::vector<GroundControlPoint> parse_gcps_csv(std::string_view text);
std::string format_gcps_csv(const std::vector<GroundControlPoint>& gcps);

/// Seconds since stack start of the first frame with T >= threshold, kNever
/// otherwise. Errors: EmptyStack.
FloatGrid arrival_time_map(const NadirStack& stack, double ignition_threshold);

struct SpeedField {
    FloatGrid speed;  // m/s, 0 where invalid
    Mask valid;
};

/// gsd / |grad t| by central differences. Borders, pixels beside a NEVER
/// neighbour and |grad t| < epsilon are masked. Errors: InvalidArgument for
/// non-positive gsd or a size mismatch.
SpeedField rate_of_spread(const FloatGrid& arrival, double gsd, double epsilon = kGradientEpsilon);

/// Trapezoidal integral of max(T - ambient, 0) over time, degC*s. Errors: EmptyStack.
FloatGrid energy_proxy(const NadirStack& stack, double ambient);

struct ProductOptions {
    double ignition_threshold = kDefaultIgnition;
    double ambient = 25.0;
    double epsilon = kGradientEpsilon;
};

struct ProductSummary {
    Georeference georef;
    std::size_t frames = 0;
    double duration_s = 0;
    std::size_t burned_pixels = 0;
    std::size_t valid_speed_pixels = 0;
    double interior_mean_speed = 0;  // over valid pixels
    std::vector<std::filesystem::path> written;
};

/// Writes arrival_time.tiff, rate_of_spread.tiff, energy_proxy.tiff and
/// summary.txt into out_dir (write-if-changed). Requires a georeferenced stack.
ProductSummary write_products(const NadirStack& stack, const Georeference& georef,
                              const ProductOptions& options, const std::filesystem::path& out_dir,
                              bool dry_run = false, std::size_t* changed = nullptr);

std::string summary_text(const NadirStack& stack, const ProductSummary& summary,
                         const ProductOptions& options);

}  // namespace flame::nadir
