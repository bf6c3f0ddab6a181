#include "flame/pairing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "flame/io.hpp"
#include "flame/mp4.hpp"

namespace fs = std::filesystem;

namespace flame::pairing {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::optional<MediaKind> kind_from_extension(const fs::path& p) {
    std::string ext = lower(p.extension().string());
    if (ext == ".jpg" || ext == ".jpeg") return MediaKind::IMAGE;
    if (ext == ".mp4" || ext == ".mov") return MediaKind::VIDEO;
    return std::nullopt;
}

bool before(const MediaAsset& a, const MediaAsset& b) {
    if (a.meta.timestamp != b.meta.timestamp) return a.meta.timestamp < b.meta.timestamp;
    return a.path < b.path;
}

std::string id_path(const fs::path& p, const fs::path& base) {
    return base.empty() ? p.generic_string() : relative_string(p, base);
}

void match_kind(std::vector<const MediaAsset*> rgb, std::vector<const MediaAsset*> thermal,
                double tolerance, const fs::path& base, PairingResult& out) {
    auto by_time = [](const MediaAsset* a, const MediaAsset* b) { return before(*a, *b); };
    std::sort(rgb.begin(), rgb.end(), by_time);
    std::sort(thermal.begin(), thermal.end(), by_time);
    std::vector<bool> taken(thermal.size(), false);
    std::size_t lo = 0;  // first thermal not older than the current window
    for (const MediaAsset* r : rgb) {
        while (lo < thermal.size() && seconds_between(r->meta.timestamp, thermal[lo]->meta.timestamp) > tolerance) ++lo;
        std::optional<std::size_t> best;
        double best_dt = 0;
        for (std::size_t j = lo; j < thermal.size(); ++j) {
            double dt = seconds_between(r->meta.timestamp, thermal[j]->meta.timestamp);
            if (-dt > tolerance) break;
            if (taken[j]) continue;
            // strict < keeps the earlier thermal on ties
            if (!best || std::abs(dt) < std::abs(best_dt)) {
                best = j;
                best_dt = dt;
            }
        }
        if (!best) {
            out.unmatched.push_back(*r);
            continue;
        }
        taken[*best] = true;
        const MediaAsset* t = thermal[*best];
        out.pairs.push_back({make_pair_id(id_path(r->path, base), id_path(t->path, base)), *r, *t, best_dt});
    }
    for (std::size_t j = 0; j < thermal.size(); ++j) {
        if (!taken[j]) out.unmatched.push_back(*thermal[j]);
    }
}

}  // namespace

bool filename_says_thermal(const fs::path& path) {
    std::string stem = lower(path.stem().string());
    std::size_t start = 0;
    while (start <= stem.size()) {
        std::size_t end = stem.find_first_of("_-. ", start);
        if (end == std::string::npos) end = stem.size();
        std::string_view tok(stem.data() + start, end - start);
        if (tok == "t" || tok == "ir" || tok == "thermal") return true;
        start = end + 1;
    }
    return false;
}

MediaAsset read_asset(const fs::path& path, const align::ProfileSet& profiles) {
    auto kind = kind_from_extension(path);
    if (!kind) fail(ErrorCode::UnsupportedContainer, "not a JPEG or MP4 file");
    Bytes data = read_file(path);
    MediaAsset a;
    a.path = path;
    a.kind = *kind;
    if (*kind == MediaKind::IMAGE) {
        auto meta = codec::read_metadata(data);
        if (!meta) fail(ErrorCode::NoMetadataInSource, "no EXIF capture timestamp");
        a.meta = std::move(*meta);
        a.modality = a.meta.modality;
        // Vendor payloads without a registered decoder fall back to the name.
        if (a.modality == Modality::RGB && filename_says_thermal(path)) a.modality = Modality::THERMAL;
    } else {
        mp4::Info info = mp4::parse(data);
        a.meta.timestamp = info.creation_time;
        a.meta.camera_model = info.model.value_or("");
        a.meta.image_width = info.width;
        a.meta.image_height = info.height;
        bool ir_size = info.width > 0 && profiles.is_ir_resolution({info.width, info.height});
        a.modality = (ir_size || filename_says_thermal(path)) ? Modality::THERMAL : Modality::RGB;
    }
    a.meta.modality = a.modality;
    if (!timestamp_in_range(a.meta.timestamp)) fail(ErrorCode::NoMetadataInSource, "capture timestamp out of range");
    return a;
}

ScanResult scan_directory(const fs::path& root, const align::ProfileSet& profiles) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) fail(ErrorCode::IoFailure, fmt::format("cannot read directory {}", root.string()));
    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) fail(ErrorCode::IoFailure, fmt::format("cannot read directory {}: {}", root.string(), ec.message()));
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_regular_file(ec) && kind_from_extension(it->path())) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    std::vector<std::optional<MediaAsset>> assets(files.size());
    std::vector<std::optional<SkipReport>> skips(files.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(files.size()); ++i) {
        try {
            assets[i] = read_asset(files[i], profiles);
        } catch (const Error& e) {
            skips[i] = SkipReport{files[i], e.code(), e.what()};
        } catch (const std::exception& e) {
            skips[i] = SkipReport{files[i], ErrorCode::IoFailure, e.what()};
        }
    }
    ScanResult out;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (assets[i]) out.assets.push_back(std::move(*assets[i]));
        if (skips[i]) out.skipped.push_back(std::move(*skips[i]));
    }
    return out;
}

std::string make_pair_id(const std::string& rgb_path, const std::string& thermal_path) {
    return hex64(fnv1a64(rgb_path + "\n" + thermal_path));
}

PairingResult pair_assets(const std::vector<MediaAsset>& assets, double tolerance, const fs::path& base) {
    if (!(tolerance > 0)) fail(ErrorCode::InvalidArgument, "pairing tolerance must be positive");
    PairingResult out;
    for (MediaKind kind : {MediaKind::IMAGE, MediaKind::VIDEO}) {
        std::vector<const MediaAsset*> rgb, thermal;
        for (const auto& a : assets) {
            if (a.kind != kind) continue;
            (a.modality == Modality::RGB ? rgb : thermal).push_back(&a);
        }
        match_kind(std::move(rgb), std::move(thermal), tolerance, base, out);
    }
    std::stable_sort(out.unmatched.begin(), out.unmatched.end(),
                     [](const MediaAsset& a, const MediaAsset& b) { return a.path < b.path; });
    return out;
}

const csv::Row& pairs_header() {
    static const csv::Row h = {"pair_id", "rgb_path", "thermal_path", "delta_t_s", "camera_model", "timestamp_iso8601"};
    return h;
}

std::string relative_string(const fs::path& path, const fs::path& base) {
    if (base.empty()) return path.generic_string();
    fs::path rel = path.lexically_relative(base);
    if (rel.empty() || *rel.begin() == "..") {
        std::error_code ec;
        auto abs_path = fs::weakly_canonical(path, ec);
        auto abs_base = fs::weakly_canonical(base, ec);
        rel = abs_path.lexically_relative(abs_base);
        if (rel.empty()) return path.generic_string();
    }
    return rel.generic_string();
}

PairRow to_row(const PairRecord& p, const fs::path& base) {
    return {p.pair_id,
            relative_string(p.rgb.path, base),
            relative_string(p.thermal.path, base),
            p.delta_t,
            p.thermal.meta.camera_model.empty() ? p.rgb.meta.camera_model : p.thermal.meta.camera_model,
            p.rgb.meta.timestamp};
}

std::string format_pairs_csv(const std::vector<PairRow>& rows) {
    std::string out = csv::format_row(pairs_header());
    for (const auto& r : rows) {
        out += csv::format_row({r.pair_id, r.rgb_path, r.thermal_path, csv::format_number(r.delta_t_s),
                                r.camera_model, format_iso8601(r.timestamp)});
    }
    return out;
}

std::vector<PairRow> parse_pairs_csv(std::string_view text) {
    std::vector<PairRow> out;
    for (const auto& row : csv::parse_with_header(text, pairs_header(), "pairs.csv")) {
        auto ts = parse_iso8601(row[5]);
        if (!ts) fail(ErrorCode::BadConfig, fmt::format("pairs.csv: bad timestamp '{}'", row[5]));
        out.push_back({row[0], row[1], row[2], csv::parse_number(row[3], "delta_t_s"), row[4], *ts});
    }
    return out;
}

std::vector<PairRow> read_pairs_csv(const fs::path& path) {
    return parse_pairs_csv(read_text_file(path));
}

}  // namespace flame::pairing
