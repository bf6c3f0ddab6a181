#pragma once

// The sorted output tree as one object: manifests, derived-file paths, and
// the batch pre-labeling sweep shared by the CLI and the review service.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flame/label.hpp"
#include "flame/pairing.hpp"

namespace flame::workspace {

inline constexpr std::string_view kPairsFile = "pairs.csv";
inline constexpr std::string_view kLabelsFile = "labels.csv";

struct Workspace {
    std::filesystem::path root;
    std::vector<pairing::PairRow> pairs;  // pairs.csv order

    /// Errors: WorkspaceNotFound when root/pairs.csv is missing; BadConfig
    /// when it does not parse.
    static Workspace open(const std::filesystem::path& root);

    std::filesystem::path pairs_path() const { return root / kPairsFile; }
    std::filesystem::path labels_path() const { return root / kLabelsFile; }
    std::filesystem::path tiff_path(const std::string& id) const { return root / "tiff" / (id + ".tiff"); }
    std::filesystem::path thermal_jpeg_path(const std::string& id) const {
        return root / "thermal_jpeg" / (id + ".jpg");
    }
    std::filesystem::path aligned_rgb_path(const std::string& id) const {
        return root / "aligned_rgb" / (id + ".jpg");
    }
    /// Manifest paths are relative to the workspace root.
    std::filesystem::path resolve(const std::string& manifest_path) const;

    const pairing::PairRow* find(std::string_view pair_id) const;
    /// Errors: UnknownPair.
    const pairing::PairRow& get(std::string_view pair_id) const;

    label::LabelMap load_labels() const;
    std::vector<label::PairFiles> pair_files() const;
    std::vector<label::ExportFiles> export_files() const;
    /// The pair's TIFF with each float32 sample widened to its shortest decimal.
    TemperatureRaster load_raster(const std::string& pair_id) const;
};

struct PrelabelResult {
    label::LabelMap labels;                    // full updated map
    std::map<label::Label, std::size_t> counts;  // AUTO decisions of this sweep
    std::size_t human_kept = 0;
    std::size_t changed = 0;  // records added or altered
};

/// auto_label over every pair whose current record is not HUMAN. A record
/// whose verdict and max are unchanged is kept as is; new decisions are dated
/// by the pair's capture timestamp so reruns are byte-stable.
PrelabelResult prelabel(const Workspace& ws, const label::LabelMap& current, const label::ThresholdConfig& cfg);

}  // namespace flame::workspace
