#include "flame/label.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "flame/error.hpp"
#include "flame/io.hpp"
#include "flame/kernels.hpp"
#include "flame/tiff.hpp"

namespace fs = std::filesystem;

namespace flame::label {

std::string_view to_string(Label l) {
    switch (l) {
        case Label::FIRE: return "FIRE";
        case Label::NO_FIRE: return "NO_FIRE";
        case Label::NEEDS_REVIEW: return "NEEDS_REVIEW";
        case Label::DISCARD: return "DISCARD";
    }
    return "?";
}

std::string_view to_string(Source s) { return s == Source::AUTO ? "AUTO" : "HUMAN"; }

Label parse_label(std::string_view text) {
    std::string up(text);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Label l : kAllLabels) {
        if (up == to_string(l)) return l;
    }
    fail(ErrorCode::InvalidLabel, fmt::format("unknown label '{}'", text));
}

Source parse_source(std::string_view text) {
    if (text == "AUTO") return Source::AUTO;
    if (text == "HUMAN") return Source::HUMAN;
    fail(ErrorCode::BadConfig, fmt::format("unknown label source '{}'", text));
}

std::string_view folder_name(Label l) {
    switch (l) {
        case Label::FIRE: return "Fire";
        case Label::NO_FIRE: return "NoFire";
        case Label::NEEDS_REVIEW: return "NeedsReview";
        case Label::DISCARD: return "Discard";
    }
    return "?";
}

void ThresholdConfig::validate() const {
    if (!(no_fire_max < fire_min)) {
        fail(ErrorCode::InvalidThresholdOrder,
             fmt::format("no_fire_max ({}) must be below fire_min ({})", no_fire_max, fire_min));
    }
}

Label classify_max(double max_temp, const ThresholdConfig& cfg) {
    if (max_temp < cfg.no_fire_max) return Label::NO_FIRE;
    if (max_temp > cfg.fire_min) return Label::FIRE;
    return Label::NEEDS_REVIEW;
}

LabelRecord auto_label(const TemperatureRaster& raster, const ThresholdConfig& cfg, std::string pair_id,
                       Timestamp decided_at) {
    cfg.validate();
    double mx = raster.max_value();
    return {std::move(pair_id), classify_max(mx, cfg), Source::AUTO, mx, decided_at};
}

Mask binary_mask(const TemperatureRaster& raster, double threshold) {
    Mask m(raster.width, raster.height);
    kernels::threshold_mask(raster.values, threshold, m.pixels);
    return m;
}

namespace {

using u128 = unsigned __int128;

// Between-class variance up to the constant 1/N^2, in bin-index units:
// (N*S0 - n0*S)^2 / (n0*n1), kept as an exact quotient + remainder.
struct Score {
    u128 quot = 0;
    u128 rem = 0;
    u128 den = 1;
};

Score score(std::uint64_t n0, std::uint64_t n1, std::uint64_t s0, std::uint64_t s) {
    std::uint64_t n = n0 + n1;
    u128 a = static_cast<u128>(n) * s0;
    u128 b = static_cast<u128>(n0) * s;
    u128 diff = a > b ? a - b : b - a;  // < 2^64 for any raster that fits in memory
    std::uint64_t d = static_cast<std::uint64_t>(diff);
    u128 num = static_cast<u128>(d) * d;
    u128 den = static_cast<u128>(n0) * n1;
    return {num / den, num % den, den};
}

bool greater(const Score& a, const Score& b) {
    if (a.quot != b.quot) return a.quot > b.quot;
    // rem < den < 2^64 on both sides, so the cross products fit
    return a.rem * b.den > b.rem * a.den;
}

}  // namespace

int otsu_bin(const TemperatureRaster& raster) {
    raster.validate();
    kernels::MinMax mm = kernels::min_max(raster.values);
    if (!(mm.max > mm.min)) fail(ErrorCode::DegenerateRaster, "Otsu needs at least two distinct values");
    kernels::Histogram256 h = kernels::histogram256(raster.values, mm.min, mm.max);
    std::uint64_t n = 0, s = 0;
    for (int i = 0; i < 256; ++i) {
        n += h[i];
        s += h[i] * static_cast<std::uint64_t>(i);
    }
    std::uint64_t n0 = 0, s0 = 0;
    int best_k = 0;
    Score best;
    for (int k = 1; k < 256; ++k) {
        n0 += h[k - 1];
        s0 += h[k - 1] * static_cast<std::uint64_t>(k - 1);
        std::uint64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        Score sc = score(n0, n1, s0, s);
        if (best_k == 0 || greater(sc, best)) {
            best = sc;
            best_k = k;
        }
    }
    // Both extreme bins are populated (min and max), so some split is valid.
    return best_k;
}

double otsu_threshold(const TemperatureRaster& raster) {
    int k = otsu_bin(raster);
    kernels::MinMax mm = kernels::min_max(raster.values);
    return mm.min + k * (mm.max - mm.min) / 256.0;
}

Mask hysteresis_mask(const TemperatureRaster& raster, double low, double high) {
    if (low > high) {
        fail(ErrorCode::InvalidThresholdOrder, fmt::format("hysteresis low ({}) above high ({})", low, high));
    }
    const int w = raster.width, h = raster.height;
    Mask weak(w, h);
    kernels::threshold_mask(raster.values, low, weak.pixels);
    Mask out(w, h);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        if (raster.values[i] >= high) {
            out.pixels[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (weak.pixels[j] && !out.pixels[j]) {
                    out.pixels[j] = 1;
                    queue.push_back(j);
                }
            }
        }
    }
    return out;
}

// ---- labels.csv -----------------------------------------------------------

const csv::Row& labels_header() {
    static const csv::Row h = {"pair_id", "label", "source", "max_temp_c", "decided_at_iso8601"};
    return h;
}

std::string format_labels_csv(const LabelMap& labels) {
    std::string out = csv::format_row(labels_header());
    for (const auto& [id, r] : labels) {
        out += csv::format_row({id, std::string(to_string(r.label)), std::string(to_string(r.source)),
                                csv::format_number(r.max_temp), format_iso8601(r.decided_at)});
    }
    return out;
}

LabelMap parse_labels_csv(std::string_view text) {
    LabelMap out;
    for (const auto& row : csv::parse_with_header(text, labels_header(), "labels.csv")) {
        LabelRecord r;
        r.pair_id = row[0];
        try {
            r.label = parse_label(row[1]);
        } catch (const Error&) {
            fail(ErrorCode::BadConfig, fmt::format("labels.csv: bad label '{}'", row[1]));
        }
        r.source = parse_source(row[2]);
        r.max_temp = csv::parse_number(row[3], "max_temp_c");
        auto ts = parse_iso8601(row[4]);
        if (!ts) fail(ErrorCode::BadConfig, fmt::format("labels.csv: bad timestamp '{}'", row[4]));
        r.decided_at = *ts;
        if (r.source == Source::AUTO && r.label == Label::DISCARD) {
            fail(ErrorCode::BadConfig, fmt::format("labels.csv: AUTO record {} carries DISCARD", r.pair_id));
        }
        if (!out.emplace(r.pair_id, r).second) {
            fail(ErrorCode::BadConfig, fmt::format("labels.csv: duplicate pair {}", r.pair_id));
        }
    }
    return out;
}

LabelMap read_labels_csv(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) return {};
    return parse_labels_csv(read_text_file(path));
}

bool write_labels_csv(const fs::path& path, const LabelMap& labels) {
    std::string text = format_labels_csv(labels);
    std::error_code ec;
    if (fs::exists(path, ec) && read_text_file(path) == text) return false;
    write_text_file_atomic(path, text);
    return true;
}

// ---- dataset layout --------------------------------------------------------

namespace {

const LabelRecord& record_for(const LabelMap& labels, const std::string& id) {
    auto it = labels.find(id);
    if (it == labels.end()) fail(ErrorCode::UnlabeledPair, fmt::format("pair {} has no label", id));
    return it->second;
}

}  // namespace

SortReport sort_pairs(const std::vector<PairFiles>& pairs, const LabelMap& labels, const fs::path& out_root,
                      bool dry_run) {
    // Validate everything before touching the tree.
    for (const auto& p : pairs) record_for(labels, p.pair_id);

    SortReport report;
    for (const auto& p : pairs) {
        Label l = record_for(labels, p.pair_id).label;
        ++report.pairs_per_label[l];
        const std::pair<const fs::path*, std::string> files[] = {
            {&p.rgb_jpg, p.pair_id + "_rgb.jpg"},
            {&p.ir_jpg, p.pair_id + "_ir.jpg"},
            {&p.ir_tiff, p.pair_id + "_ir.tiff"},
        };
        for (const auto& [src, name] : files) {
            fs::path dest = out_root / folder_name(l) / name;
            if (dry_run) {
                std::error_code ec;
                bool same = fs::exists(dest, ec) && read_file(dest) == read_file(*src);
                ++(same ? report.unchanged : report.copied);
            } else {
                ++(copy_file_if_changed(*src, dest) ? report.copied : report.unchanged);
            }
            for (Label other : kAllLabels) {
                if (other == l) continue;
                fs::path stale = out_root / folder_name(other) / name;
                std::error_code ec;
                if (fs::exists(stale, ec)) {
                    if (!dry_run && !fs::remove(stale, ec)) {
                        fail(ErrorCode::IoFailure, fmt::format("cannot remove {}", stale.string()));
                    }
                    ++report.removed;
                }
            }
        }
    }
    return report;
}

const csv::Row& dataset_header() {
    static const csv::Row h = {"pair_id", "label", "rgb_path", "thermal_path", "tiff_path", "normalized_path",
                               "max_temp_c"};
    return h;
}

ExportReport export_ml_dataset(const std::vector<ExportFiles>& pairs, const LabelMap& labels,
                               const colormap::NormalizationMode& normalization, const fs::path& out_root,
                               bool dry_run) {
    for (const auto& p : pairs) record_for(labels, p.pair_id);
    std::vector<const ExportFiles*> order;
    for (const auto& p : pairs) {
        Label l = record_for(labels, p.pair_id).label;
        if (l == Label::FIRE || l == Label::NO_FIRE) order.push_back(&p);
    }
    std::sort(order.begin(), order.end(),
              [](const ExportFiles* a, const ExportFiles* b) { return a->pair_id < b->pair_id; });

    ExportReport report;
    auto count = [&](bool changed) { ++(changed ? report.written : report.unchanged); };
    auto put = [&](const fs::path& dest, const Bytes& data) {
        if (dry_run) {
            std::error_code ec;
            count(!(fs::exists(dest, ec) && read_file(dest) == data));
        } else {
            count(write_file_if_changed(dest, data));
        }
    };
    for (const ExportFiles* p : order) {
        const LabelRecord& rec = record_for(labels, p->pair_id);
        DatasetRow row;
        row.pair_id = p->pair_id;
        row.label = rec.label;
        row.max_temp = rec.max_temp;
        row.rgb_path = "rgb/" + p->pair_id + ".jpg";
        row.thermal_path = "thermal/" + p->pair_id + ".jpg";
        row.tiff_path = "tiff/" + p->pair_id + ".tiff";
        row.normalized_path = "normalized/" + p->pair_id + ".tiff";

        put(out_root / row.rgb_path, read_file(p->aligned_rgb));
        put(out_root / row.thermal_path, read_file(p->thermal_jpeg));
        Bytes tiff_bytes = read_file(p->tiff);
        TemperatureRaster raster = tiff::decode_raster(tiff_bytes);
        put(out_root / row.tiff_path, tiff_bytes);
        put(out_root / row.normalized_path, tiff::encode_gray8(colormap::normalize(raster, normalization).indices));
        report.rows.push_back(std::move(row));
    }

    std::string manifest = csv::format_row(dataset_header());
    for (const auto& r : report.rows) {
        manifest += csv::format_row({r.pair_id, std::string(to_string(r.label)), r.rgb_path, r.thermal_path,
                                     r.tiff_path, r.normalized_path, csv::format_number(r.max_temp)});
    }
    fs::path manifest_path = out_root / "dataset.csv";
    std::error_code ec;
    bool same = fs::exists(manifest_path, ec) && read_text_file(manifest_path) == manifest;
    if (!same && !dry_run) write_text_file_atomic(manifest_path, manifest);
    count(!same);
    return report;
}

}  // namespace flame::label
