#include "flame/workspace.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "flame/error.hpp"
#include "flame/tiff.hpp"

namespace fs = std::filesystem;

namespace flame::workspace {

Workspace Workspace::open(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_regular_file(root / kPairsFile, ec)) {
        fail(ErrorCode::WorkspaceNotFound, fmt::format("no {} under {}", kPairsFile, root.string()));
    }
    Workspace ws;
    ws.root = root;
    ws.pairs = pairing::read_pairs_csv(root / kPairsFile);
    return ws;
}

fs::path Workspace::resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : (root / path).lexically_normal();
}

const pairing::PairRow* Workspace::find(std::string_view id) const {
    for (const auto& p : pairs) {
        if (p.pair_id == id) return &p;
    }
    return nullptr;
}

const pairing::PairRow& Workspace::get(std::string_view id) const {
    if (const auto* p = find(id)) return *p;
    fail(ErrorCode::UnknownPair, fmt::format("unknown pair '{}'", id));
}

label::LabelMap Workspace::load_labels() const { return label::read_labels_csv(labels_path()); }

std::vector<label::PairFiles> Workspace::pair_files() const {
    std::vector<label::PairFiles> out;
    for (const auto& p : pairs) out.push_back({p.pair_id, resolve(p.rgb_path), resolve(p.thermal_path), tiff_path(p.pair_id)});
    return out;
}

std::vector<label::ExportFiles> Workspace::export_files() const {
    std::vector<label::ExportFiles> out;
    for (const auto& p : pairs) {
        out.push_back({p.pair_id, aligned_rgb_path(p.pair_id), thermal_jpeg_path(p.pair_id), tiff_path(p.pair_id)});
    }
    return out;
}

TemperatureRaster Workspace::load_raster(const std::string& id) const {
    TemperatureRaster r = tiff::read_tiff(tiff_path(id));
    // float32 on disk; report 140.55 rather than 140.5500030517578
    std::unordered_map<double, double> memo;
    for (double& v : r.values) {
        auto [it, fresh] = memo.try_emplace(v, 0.0);
        if (fresh) it->second = widen_float(static_cast<float>(v));
        v = it->second;
    }
    return r;
}

PrelabelResult prelabel(const Workspace& ws, const label::LabelMap& current, const label::ThresholdConfig& cfg) {
    cfg.validate();
    PrelabelResult r;
    r.labels = current;
    for (const auto& p : ws.pairs) {
        auto it = r.labels.find(p.pair_id);
        if (it != r.labels.end() && it->second.source == label::Source::HUMAN) {
            ++r.human_kept;
            continue;
        }
        label::LabelRecord rec = label::auto_label(ws.load_raster(p.pair_id), cfg, p.pair_id, p.timestamp);
        ++r.counts[rec.label];
        if (it != r.labels.end() && it->second.label == rec.label && it->second.max_temp == rec.max_temp) continue;
        r.labels.insert_or_assign(p.pair_id, rec);
        ++r.changed;
    }
    return r;
}

}  // namespace flame::workspace
