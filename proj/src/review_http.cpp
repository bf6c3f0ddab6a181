#include <httplib.h>
#include <json.hpp>

#include <fmt/format.h>

#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/review.hpp"

using nlohmann::json;

namespace flame::review {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownPair:
        case ErrorCode::WorkspaceNotFound: return 404;
        case ErrorCode::InvalidLabel:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidThresholdOrder:
        case ErrorCode::BadConfig: return 400;
        default: return 500;
    }
}

std::string error_json(ErrorCode code, std::string_view message) {
    return json{{"code", to_string(code)}, {"message", message}}.dump();
}

namespace {

json to_json(const PairSummary& s) {
    json j{{"pair_id", s.pair_id}, {"timestamp", format_iso8601(s.timestamp)}, {"camera_model", s.camera_model}};
    j["max_temp"] = s.max_temp ? json(*s.max_temp) : json(nullptr);
    j["label"] = s.label ? json(label::to_string(*s.label)) : json(nullptr);
    j["source"] = s.source ? json(label::to_string(*s.source)) : json(nullptr);
    return j;
}

json to_json(const label::LabelRecord& r) {
    return {{"pair_id", r.pair_id},
            {"label", label::to_string(r.label)},
            {"source", label::to_string(r.source)},
            {"max_temp", r.max_temp},
            {"decided_at", format_iso8601(r.decided_at)}};
}

json counts_json(const std::map<label::Label, std::size_t>& m) {
    json j = json::object();
    for (label::Label l : label::kAllLabels) {
        auto it = m.find(l);
        j[std::string(label::to_string(l))] = it == m.end() ? 0 : it->second;
    }
    return j;
}

int int_param(const httplib::Request& req, const char* key, int fallback) {
    if (!req.has_param(key)) return fallback;
    double v = csv::parse_number(req.get_param_value(key), key);
    if (v != static_cast<int>(v)) fail(ErrorCode::InvalidArgument, fmt::format("{} must be an integer", key));
    return static_cast<int>(v);
}

json parse_body(const httplib::Request& req) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) fail(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return body;
}

template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            res.status = http_status(e.code());
            res.set_content(error_json(e.code(), e.what()), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(error_json(ErrorCode::IoFailure, e.what()), "application/json");
        }
    };
}

}  // namespace

void mount_routes(httplib::Server& server, ReviewService& svc, const std::optional<std::filesystem::path>& ui_dir) {
    server.Get("/api/pairs", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        Status st = parse_status(req.has_param("status") ? req.get_param_value("status") : "");
        Page p = svc.list_pending(st, int_param(req, "page", 1), int_param(req, "page_size", 50));
        json items = json::array();
        for (const auto& s : p.items) items.push_back(to_json(s));
        json j{{"items", items}, {"page", p.page}, {"page_size", p.page_size}, {"total", p.total}, {"pages", p.pages}};
        res.set_content(j.dump(), "application/json");
    }));
    server.Get(R"(/api/pairs/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        PairDetail d = svc.pair_detail(req.matches[1]);
        json j = to_json(d.summary);
        j["stats"] = {{"min_temp", d.stats.min_temp},
                      {"max_temp", d.stats.max_temp},
                      {"mean_temp", d.stats.mean_temp},
                      {"width", d.stats.width},
                      {"height", d.stats.height}};
        j["rgb_path"] = d.rgb_path;
        j["thermal_path"] = d.thermal_path;
        j["delta_t_s"] = d.delta_t_s;
        res.set_content(j.dump(), "application/json");
    }));
    auto jpeg_reply = [](httplib::Response& res, const Bytes& b) {
        res.set_content(reinterpret_cast<const char*>(b.data()), b.size(), "image/jpeg");
    };
    server.Get(R"(/api/pairs/([^/]+)/rgb\.jpg)", guarded([&svc, jpeg_reply](const httplib::Request& req, httplib::Response& res) {
        jpeg_reply(res, svc.rgb_jpeg(req.matches[1]));
    }));
    server.Get(R"(/api/pairs/([^/]+)/thermal\.jpg)", guarded([&svc, jpeg_reply](const httplib::Request& req, httplib::Response& res) {
        jpeg_reply(res, svc.thermal_jpeg(req.matches[1]));
    }));
    server.Get(R"(/api/pairs/([^/]+)/overlay\.jpg)", guarded([&svc, jpeg_reply](const httplib::Request& req, httplib::Response& res) {
        std::optional<double> thr;
        if (req.has_param("threshold")) thr = csv::parse_number(req.get_param_value("threshold"), "threshold");
        jpeg_reply(res, svc.overlay_jpeg(req.matches[1], thr));
    }));
    server.Get(R"(/api/pairs/([^/]+)/histogram)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        Histogram h = svc.histogram(req.matches[1]);
        json j{{"lo", h.lo}, {"hi", h.hi}, {"bins", h.bins}};
        res.set_content(j.dump(), "application/json");
    }));
    server.Post(R"(/api/pairs/([^/]+)/label)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        if (!body.contains("label") || !body["label"].is_string()) fail(ErrorCode::InvalidLabel, "missing label");
        std::string reviewer = body.value("reviewer", std::string{});
        label::LabelRecord r = svc.submit_label(req.matches[1], body["label"].get<std::string>(), reviewer);
        res.set_content(to_json(r).dump(), "application/json");
    }));
    server.Post("/api/prelabel", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        label::ThresholdConfig cfg;
        if (!req.body.empty()) {
            json body = parse_body(req);
            auto num = [&](const char* key, double fallback) {
                if (!body.contains(key)) return fallback;
                if (!body[key].is_number()) fail(ErrorCode::InvalidArgument, fmt::format("{} must be a number", key));
                return body[key].get<double>();
            };
            cfg.no_fire_max = num("no_fire_max", cfg.no_fire_max);
            cfg.fire_min = num("fire_min", cfg.fire_min);
        }
        workspace::PrelabelResult r = svc.batch_prelabel(cfg);
        json j{{"counts", counts_json(r.counts)}, {"changed", r.changed}, {"human_kept", r.human_kept}};
        res.set_content(j.dump(), "application/json");
    }));
    server.Get("/api/progress", guarded([&svc](const httplib::Request&, httplib::Response& res) {
        Progress p = svc.progress();
        json j{{"per_label", counts_json(p.per_label)},
               {"unlabeled", p.unlabeled},
               {"human", p.human},
               {"pending", p.pending},
               {"total", p.total}};
        res.set_content(j.dump(), "application/json");
    }));
    if (ui_dir) server.set_mount_point("/", ui_dir->string());
}

}  // namespace flame::review
