#pragma once

// Synthetic field collection: paired RGB / radiometric JPEGs from an analytic
// scene, optional paired videos, and a nadir plot with a constant-speed front.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flame/align.hpp"
#include "flame/time.hpp"

namespace flame::fixtures {

struct Options {
    int pairs = 6;
    std::string camera_model = "M30T";
    /// Overrides the profile looked up by camera_model (smaller frames for tests).
    std::optional<align::CameraProfile> profile;
    Timestamp base_time = make_timestamp(2023, 10, 14, 10, 0, 0);
    double spacing_s = 6.0;
    int video_pairs = 0;

    bool nadir = true;
    std::string plot_id = "plot_A";
    int nadir_frames = 20;
    Size2 nadir_size{640, 512};
    double nadir_interval_s = 5.0;
    double nadir_gsd = 0.05;
    double front_temp = 400.0;
    double ambient = 25.0;
};

/// Intended label of fixture pair i (cycles fire, no fire, needs review).
enum class Intent { FIRE, NO_FIRE, REVIEW };
Intent intent_of(int index);
/// Peak temperature the scene of pair i reaches.
double peak_temperature(int index);

struct Manifest {
    std::vector<std::filesystem::path> files;  // every file written, sorted
    std::filesystem::path raw_dir;
    std::filesystem::path nadir_dir;  // empty when disabled
};

/// Writes root/raw/... and root/nadir/{plot_id}/... Files are regenerated
/// byte-identically on every call. Errors: UnknownCameraProfile, IoFailure.
Manifest generate(const std::filesystem::path& root, const Options& options = {});

/// Per-pixel temperature of the synthetic scene for pair i at thermal (u, v).
double scene_temperature(int index, double u, double v, Size2 ir);
/// Nadir frame k: columns x <= k are burnt, front at x == k.
double nadir_temperature(int frame, int x, double front_temp, double ambient);

}  // namespace flame::fixtures
