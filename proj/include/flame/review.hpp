#pragma once

// Human review loop over a sorted workspace. ReviewService is the pure logic
// (thread-safe; one writer for label mutations); mount_routes exposes it over HTTP.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "flame/kernels.hpp"
#include "flame/label.hpp"
#include "flame/workspace.hpp"

namespace httplib {
class Server;
}

namespace flame::review {

/// Queue filters: pending (anything not decided by a human), all, unlabeled,
/// or one label.
enum class Status { PENDING, ALL, UNLABELED, FIRE, NO_FIRE, NEEDS_REVIEW, DISCARD };
/// Errors: InvalidArgument.
Status parse_status(std::string_view text);

struct PairSummary {
    std::string pair_id;
    Timestamp timestamp{};
    std::optional<double> max_temp;  // from the label record when present
    std::optional<label::Label> label;
    std::optional<label::Source> source;
    std::string camera_model;
};

struct Page {
    std::vector<PairSummary> items;
    int page = 1;
    int page_size = 0;
    std::size_t total = 0;
    int pages = 0;
};

struct Stats {
    double min_temp = 0;
    double max_temp = 0;
    double mean_temp = 0;
    int width = 0;
    int height = 0;
};

struct PairDetail {
    PairSummary summary;
    Stats stats;
    std::string rgb_path;      // manifest paths
    std::string thermal_path;
    double delta_t_s = 0;
};

struct Histogram {
    double lo = 0;
    double hi = 0;
    kernels::Histogram256 bins{};
};

struct Progress {
    std::map<label::Label, std::size_t> per_label;
    std::size_t unlabeled = 0;
    std::size_t human = 0;
    std::size_t pending = 0;
    std::size_t total = 0;
};

struct ServiceOptions {
    double overlay_threshold = 200.0;
    double overlay_opacity = 0.6;
    /// Re-sort files into label folders after each accepted label.
    bool resort_on_label = true;
    std::function<Timestamp()> clock;  // defaults to the system clock
    /// Receives one line per accepted label (who decided what); not persisted.
    std::function<void(std::string_view)> log;
};

class ReviewService {
public:
    /// Errors: WorkspaceNotFound.
    explicit ReviewService(const std::filesystem::path& workspace_root, ServiceOptions options = {});

    /// Errors: InvalidArgument for page < 1 or page_size < 1.
    Page list_pending(Status status = Status::PENDING, int page = 1, int page_size = 50) const;
    /// Errors: UnknownPair.
    PairDetail pair_detail(const std::string& pair_id) const;
    Bytes rgb_jpeg(const std::string& pair_id) const;
    Bytes thermal_jpeg(const std::string& pair_id) const;
    Bytes overlay_jpeg(const std::string& pair_id, std::optional<double> threshold = std::nullopt) const;
    Histogram histogram(const std::string& pair_id) const;

    /// label is fire, no_fire or discard (any case). Persisted before return.
    /// Errors: UnknownPair, InvalidLabel.
    label::LabelRecord submit_label(const std::string& pair_id, std::string_view label_text,
                                    const std::string& reviewer = {});
    workspace::PrelabelResult batch_prelabel(const label::ThresholdConfig& cfg);
    Progress progress() const;

    const workspace::Workspace& workspace() const { return ws_; }
    label::LabelMap labels() const;

private:
    PairSummary summarize(const pairing::PairRow& row) const;
    void persist(const label::LabelMap& labels);

    workspace::Workspace ws_;
    ServiceOptions opt_;
    mutable std::shared_mutex mutex_;
    label::LabelMap labels_;
};

/// JSON body {code, message} for an error and its HTTP status.
int http_status(ErrorCode code);
std::string error_json(ErrorCode code, std::string_view message);

/// Registers the /api routes; serves static files from ui_dir when given.
void mount_routes(httplib::Server& server, ReviewService& service,
                  const std::optional<std::filesystem::path>& ui_dir = std::nullopt);

}  // namespace flame::review
