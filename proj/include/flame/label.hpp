#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flame/colormap.hpp"
#include "flame/csv.hpp"
#include "flame/raster.hpp"
#include "flame/time.hpp"

namespace flame::label {

enum class Label { FIRE, NO_FIRE, NEEDS_REVIEW, DISCARD };
enum class Source { AUTO, HUMAN };

std::string_view to_string(Label l);   // "FIRE", "NO_FIRE", ...
std::string_view to_string(Source s);  // "AUTO", "HUMAN"
/// Accepts the manifest spelling or lower case ("no_fire"). Errors: InvalidLabel.
Label parse_label(std::string_view text);
Source parse_source(std::string_view text);
/// Output folder: Fire, NoFire, NeedsReview, Discard.
std::string_view folder_name(Label l);
inline constexpr Label kAllLabels[] = {Label::FIRE, Label::NO_FIRE, Label::NEEDS_REVIEW, Label::DISCARD};

struct ThresholdConfig {
    double no_fire_max = 80.0;
    double fire_min = 200.0;
    /// Errors: InvalidThresholdOrder unless no_fire_max < fire_min.
    void validate() const;
};

struct LabelRecord {
    std::string pair_id;
    Label label = Label::NEEDS_REVIEW;
    Source source = Source::AUTO;
    double max_temp = 0;
    Timestamp decided_at{};

    bool operator==(const LabelRecord&) const = default;
};

/// max < no_fire_max -> NO_FIRE, max > fire_min -> FIRE, else NEEDS_REVIEW.
Label classify_max(double max_temp, const ThresholdConfig& cfg);
LabelRecord auto_label(const TemperatureRaster& raster, const ThresholdConfig& cfg,
                       std::string pair_id = {}, Timestamp decided_at = {});

/// mask = T >= threshold.
Mask binary_mask(const TemperatureRaster& raster, double threshold);

/// Boundary temperature lo + k (hi - lo) / 256 of the 256-bin histogram split
/// k in 1..255 that maximizes between-class variance; lowest k on ties.
/// Errors: DegenerateRaster.
double otsu_threshold(const TemperatureRaster& raster);
/// The k chosen by otsu_threshold.
int otsu_bin(const TemperatureRaster& raster);

/// Seeds T >= high grown 8-connected through T >= low. Errors: InvalidThresholdOrder
/// when low > high (low == high reduces to binary_mask).
Mask hysteresis_mask(const TemperatureRaster& raster, double low, double high);

// ---- labels.csv ----------------------------------------------------------

using LabelMap = std::map<std::string, LabelRecord>;

const csv::Row& labels_header();
std::string format_labels_csv(const LabelMap& labels);
LabelMap parse_labels_csv(std::string_view text);
/// Missing file -> empty map.
LabelMap read_labels_csv(const std::filesystem::path& path);
/// Atomic replace. Returns false when the file already held these bytes.
bool write_labels_csv(const std::filesystem::path& path, const LabelMap& labels);

// ---- dataset layout -------------------------------------------------------

/// Source files of one pair as produced by the sort step.
struct PairFiles {
    std::string pair_id;
    std::filesystem::path rgb_jpg;      // raw visible frame
    std::filesystem::path ir_jpg;       // raw radiometric JPEG
    std::filesystem::path ir_tiff;      // decoded raster
};

struct SortReport {
    std::size_t copied = 0;     // files written or rewritten
    std::size_t unchanged = 0;  // already identical
    std::size_t removed = 0;    // stale copies under another label folder
    std::map<Label, std::size_t> pairs_per_label;
    std::size_t changes() const { return copied + removed; }
};

/// Copies each pair's three files to out_root/{Folder}/{pair_id}_rgb.jpg,
/// _ir.jpg, _ir.tiff, removing copies left under other label folders.
/// Errors: UnlabeledPair, IoFailure.
SortReport sort_pairs(const std::vector<PairFiles>& pairs, const LabelMap& labels,
                      const std::filesystem::path& out_root, bool dry_run = false);

struct ExportFiles {
    std::string pair_id;
    std::filesystem::path aligned_rgb;
    std::filesystem::path thermal_jpeg;
    std::filesystem::path tiff;
};

struct DatasetRow {
    std::string pair_id;
    Label label = Label::FIRE;
    std::string rgb_path, thermal_path, tiff_path, normalized_path;  // relative to out_root
    double max_temp = 0;
};

struct ExportReport {
    std::vector<DatasetRow> rows;
    std::size_t written = 0;
    std::size_t unchanged = 0;
};

const csv::Row& dataset_header();

/// FIRE / NO_FIRE pairs only, ordered by pair_id. Writes out_root/{rgb,thermal,
/// tiff,normalized}/{pair_id}.* and out_root/dataset.csv. Normalized images are
/// 8-bit single-band TIFFs. Errors: UnlabeledPair, IoFailure.
ExportReport export_ml_dataset(const std::vector<ExportFiles>& pairs, const LabelMap& labels,
                               const colormap::NormalizationMode& normalization,
                               const std::filesystem::path& out_root, bool dry_run = false);

}  // namespace flame::label
