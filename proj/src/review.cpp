#include "flame/review.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>

#include "flame/align.hpp"
#include "flame/error.hpp"
#include "flame/io.hpp"
#include "flame/jpeg.hpp"

namespace fs = std::filesystem;

namespace flame::review {

Status parse_status(std::string_view text) {
    static const std::pair<std::string_view, Status> names[] = {
        {"", Status::PENDING},           {"pending", Status::PENDING},     {"all", Status::ALL},
        {"unlabeled", Status::UNLABELED}, {"fire", Status::FIRE},           {"no_fire", Status::NO_FIRE},
        {"needs_review", Status::NEEDS_REVIEW}, {"discard", Status::DISCARD},
    };
    std::string low(text);
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto& [name, s] : names) {
        if (low == name) return s;
    }
    fail(ErrorCode::InvalidArgument, fmt::format("unknown status filter '{}'", text));
}

namespace {

bool matches(Status s, const label::LabelRecord* rec) {
    switch (s) {
        case Status::ALL: return true;
        case Status::PENDING: return !rec || rec->source != label::Source::HUMAN;
        case Status::UNLABELED: return !rec;
        case Status::FIRE: return rec && rec->label == label::Label::FIRE;
        case Status::NO_FIRE: return rec && rec->label == label::Label::NO_FIRE;
        case Status::NEEDS_REVIEW: return rec && rec->label == label::Label::NEEDS_REVIEW;
        case Status::DISCARD: return rec && rec->label == label::Label::DISCARD;
    }
    return false;
}

Timestamp system_now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

}  // namespace

ReviewService::ReviewService(const fs::path& root, ServiceOptions options)
    : ws_(workspace::Workspace::open(root)), opt_(std::move(options)) {
    if (!opt_.clock) opt_.clock = system_now;
    labels_ = ws_.load_labels();
}

label::LabelMap ReviewService::labels() const {
    std::shared_lock lock(mutex_);
    return labels_;
}

PairSummary ReviewService::summarize(const pairing::PairRow& row) const {
    PairSummary s{row.pair_id, row.timestamp, std::nullopt, std::nullopt, std::nullopt, row.camera_model};
    if (auto it = labels_.find(row.pair_id); it != labels_.end()) {
        s.max_temp = it->second.max_temp;
        s.label = it->second.label;
        s.source = it->second.source;
    }
    return s;
}

Page ReviewService::list_pending(Status status, int page, int page_size) const {
    if (page < 1 || page_size < 1) fail(ErrorCode::InvalidArgument, "page and page_size must be >= 1");
    std::shared_lock lock(mutex_);
    std::vector<const pairing::PairRow*> rows;
    for (const auto& p : ws_.pairs) {
        auto it = labels_.find(p.pair_id);
        if (matches(status, it == labels_.end() ? nullptr : &it->second)) rows.push_back(&p);
    }
    std::sort(rows.begin(), rows.end(), [](const pairing::PairRow* a, const pairing::PairRow* b) {
        if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
        return a->pair_id < b->pair_id;
    });
    Page out;
    out.page = page;
    out.page_size = page_size;
    out.total = rows.size();
    out.pages = static_cast<int>((rows.size() + page_size - 1) / page_size);
    std::size_t begin = static_cast<std::size_t>(page - 1) * page_size;
    for (std::size_t i = begin; i < rows.size() && i < begin + page_size; ++i) out.items.push_back(summarize(*rows[i]));
    return out;
}

PairDetail ReviewService::pair_detail(const std::string& id) const {
    const pairing::PairRow& row = ws_.get(id);
    TemperatureRaster r = ws_.load_raster(id);
    PairDetail d;
    {
        std::shared_lock lock(mutex_);
        d.summary = summarize(row);
    }
    auto mm = kernels::min_max(r.values);
    double sum = 0;
    for (double v : r.values) sum += v;
    d.stats = {mm.min, mm.max, sum / static_cast<double>(r.size()), r.width, r.height};
    d.rgb_path = row.rgb_path;
    d.thermal_path = row.thermal_path;
    d.delta_t_s = row.delta_t_s;
    return d;
}

Bytes ReviewService::rgb_jpeg(const std::string& id) const {
    ws_.get(id);
    return read_file(ws_.aligned_rgb_path(id));
}

Bytes ReviewService::thermal_jpeg(const std::string& id) const {
    ws_.get(id);
    return read_file(ws_.thermal_jpeg_path(id));
}

Bytes ReviewService::overlay_jpeg(const std::string& id, std::optional<double> threshold) const {
    ws_.get(id);
    RgbImage rgb = jpeg::decode_rgb(read_file(ws_.aligned_rgb_path(id)));
    TemperatureRaster r = ws_.load_raster(id);
    RgbImage o = align::overlay(rgb, r, threshold.value_or(opt_.overlay_threshold), opt_.overlay_opacity);
    return jpeg::encode_rgb(o, 90);
}

Histogram ReviewService::histogram(const std::string& id) const {
    ws_.get(id);
    TemperatureRaster r = ws_.load_raster(id);
    auto mm = kernels::min_max(r.values);
    Histogram h{mm.min, mm.max, {}};
    if (mm.max > mm.min) {
        h.bins = kernels::histogram256(r.values, mm.min, mm.max);
    } else {
        h.bins[0] = r.size();  // constant raster: everything in one bin
    }
    return h;
}

void ReviewService::persist(const label::LabelMap& labels) {
    label::write_labels_csv(ws_.labels_path(), labels);
}

label::LabelRecord ReviewService::submit_label(const std::string& id, std::string_view text,
                                               const std::string& reviewer) {
    ws_.get(id);
    label::Label l = label::parse_label(text);
    if (l == label::Label::NEEDS_REVIEW) fail(ErrorCode::InvalidLabel, "reviewers choose fire, no_fire or discard");

    std::unique_lock lock(mutex_);
    label::LabelMap next = labels_;
    double max_temp;
    if (auto it = next.find(id); it != next.end()) {
        max_temp = it->second.max_temp;
    } else {
        max_temp = ws_.load_raster(id).max_value();
    }
    label::LabelRecord rec{id, l, label::Source::HUMAN, max_temp, opt_.clock()};
    next.insert_or_assign(id, rec);
    persist(next);
    labels_ = std::move(next);
    if (opt_.resort_on_label) {
        for (const auto& f : ws_.pair_files()) {
            if (f.pair_id == id) label::sort_pairs({f}, labels_, ws_.root);
        }
    }
    if (opt_.log) {
        opt_.log(fmt::format("{} labeled {} as {}", reviewer.empty() ? "reviewer" : reviewer, id, label::to_string(l)));
    }
    return rec;
}

workspace::PrelabelResult ReviewService::batch_prelabel(const label::ThresholdConfig& cfg) {
    std::unique_lock lock(mutex_);
    workspace::PrelabelResult r = workspace::prelabel(ws_, labels_, cfg);
    persist(r.labels);
    labels_ = r.labels;
    if (opt_.resort_on_label) label::sort_pairs(ws_.pair_files(), labels_, ws_.root);
    return r;
}

Progress ReviewService::progress() const {
    std::shared_lock lock(mutex_);
    Progress p;
    for (label::Label l : label::kAllLabels) p.per_label[l] = 0;
    p.total = ws_.pairs.size();
    for (const auto& row : ws_.pairs) {
        auto it = labels_.find(row.pair_id);
        if (it == labels_.end()) {
            ++p.unlabeled;
            ++p.pending;
            continue;
        }
        ++p.per_label[it->second.label];
        if (it->second.source == label::Source::HUMAN) {
            ++p.human;
        } else {
            ++p.pending;
        }
    }
    return p;
}

}  // namespace flame::review
