#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flame/align.hpp"
#include "flame/codec.hpp"
#include "flame/csv.hpp"
#include "flame/error.hpp"

namespace flame::pairing {

inline constexpr double kDefaultTolerance = 2.0;

struct MediaAsset {
    std::filesystem::path path;
    MediaKind kind = MediaKind::IMAGE;
    Modality modality = Modality::RGB;
    CaptureMetadata meta;
};

struct SkipReport {
    std::filesystem::path path;
    ErrorCode code = ErrorCode::IoFailure;
    std::string reason;
};

struct ScanResult {
    std::vector<MediaAsset> assets;
    std::vector<SkipReport> skipped;
};

/// Recursive scan for .jpg/.jpeg/.mp4/.mov (case-insensitive), ordered by
/// path. Per-file problems become skip reports. Errors: IoFailure on root.
/// `profiles` supplies the thermal frame sizes used to classify videos.
ScanResult scan_directory(const std::filesystem::path& root,
                          const align::ProfileSet& profiles = align::ProfileSet());

/// Classification for a single file; throws the per-file error on failure.
MediaAsset read_asset(const std::filesystem::path& path, const align::ProfileSet& profiles);

/// Filename hint used when the content does not decide modality.
bool filename_says_thermal(const std::filesystem::path& path);

struct PairRecord {
    std::string pair_id;
    MediaAsset rgb;
    MediaAsset thermal;
    double delta_t = 0;  // rgb - thermal, seconds
};

struct PairingResult {
    std::vector<PairRecord> pairs;
    std::vector<MediaAsset> unmatched;
};

std::string make_pair_id(const std::string& rgb_path, const std::string& thermal_path);

/// Sorted two-pointer greedy match, images and videos separately; each RGB
/// takes the nearest free in-tolerance thermal (ties -> earlier thermal).
/// Pair ids hash the paths as given, or relative to `base` when non-empty.
/// Errors: InvalidArgument for tolerance <= 0.
PairingResult pair_assets(const std::vector<MediaAsset>& assets, double tolerance,
                          const std::filesystem::path& base = {});

// ---- pairs.csv -----------------------------------------------------------

/// One manifest row; paths are stored relative to the manifest's root.
struct PairRow {
    std::string pair_id;
    std::string rgb_path;
    std::string thermal_path;
    double delta_t_s = 0;
    std::string camera_model;
    Timestamp timestamp{};
};

const csv::Row& pairs_header();
std::string relative_string(const std::filesystem::path& path, const std::filesystem::path& base);
PairRow to_row(const PairRecord& pair, const std::filesystem::path& base);
std::string format_pairs_csv(const std::vector<PairRow>& rows);
std::vector<PairRow> parse_pairs_csv(std::string_view text);
std::vector<PairRow> read_pairs_csv(const std::filesystem::path& path);

}  // namespace flame::pairing
