#pragma once

// Subcommand implementations behind tools/flamekit. Each returns a process
// exit code: 0 ok, 1 total failure, 2 bad configuration, 3 partial failure.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "flame/colormap.hpp"
#include "flame/error.hpp"
#include "flame/label.hpp"

namespace httplib {
class Server;
}

namespace flame::cli {

enum Exit : int { kOk = 0, kTotalFailure = 1, kBadConfig = 2, kPartialFailure = 3 };

struct Config {
    std::filesystem::path input;
    std::filesystem::path output;
    std::optional<std::filesystem::path> profiles_file;
    std::optional<std::string> camera_model;  // forces one profile for every pair
    label::ThresholdConfig thresholds;
    colormap::NormalizationMode normalization;
    double tolerance = 2.0;
    std::string host = "127.0.0.1";
    int port = 8765;
    int jobs = 0;  // 0: OpenMP default
    bool dry_run = false;

    // stack
    std::optional<std::string> plot_id;
    double ignition_threshold = 200.0;
    double ambient = 25.0;
    double nominal_interval = 5.0;

    // export
    std::optional<std::filesystem::path> dataset_dir;  // default output/dataset

    // align
    std::optional<std::filesystem::path> correspondences;
    std::optional<std::filesystem::path> write_profile;

    // serve
    std::optional<std::filesystem::path> ui_dir;
    double overlay_threshold = 200.0;

    // fixtures
    int fixture_pairs = 6;
    int fixture_videos = 0;
    bool fixture_nadir = true;

    /// Errors: BadConfig when thresholds or numeric ranges are invalid.
    void validate() const;
};

/// Applies `key = value` lines (keys as documented in the README) onto cfg.
/// Errors: BadConfig.
void apply_config_text(Config& cfg, std::string_view text);
void apply_config_file(Config& cfg, const std::filesystem::path& path);

/// Maps a library error code to the exit code used for a whole-command failure.
int exit_code_for(ErrorCode code);

int cmd_sort(const Config& cfg, std::ostream& out);
int cmd_label(const Config& cfg, std::ostream& out);
int cmd_align(const Config& cfg, std::ostream& out);
int cmd_stack(const Config& cfg, std::ostream& out);
int cmd_export(const Config& cfg, std::ostream& out);
int cmd_fixtures(const Config& cfg, std::ostream& out);

/// Blocks until the server stops. `started` is called with the server once
/// routes are mounted and before listening, so callers can stop it.
int cmd_serve(const Config& cfg, std::ostream& out,
              const std::function<void(httplib::Server&)>& started = {});

}  // namespace flame::cli
