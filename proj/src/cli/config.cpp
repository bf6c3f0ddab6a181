#include <fmt/format.h>

#include "flame/cli.hpp"
#include "flame/csv.hpp"
#include "flame/io.hpp"

namespace flame::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

bool parse_bool(std::string_view v, std::string_view key) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(ErrorCode::BadConfig, fmt::format("config: {} must be true or false", key));
}

int parse_int(std::string_view v, std::string_view key) {
    double d = csv::parse_number(v, key);
    if (d != static_cast<int>(d)) fail(ErrorCode::BadConfig, fmt::format("config: {} must be an integer", key));
    return static_cast<int>(d);
}

}  // namespace

void Config::validate() const {
    if (!(thresholds.no_fire_max < thresholds.fire_min)) {
        fail(ErrorCode::BadConfig, fmt::format("no_fire_max ({}) must be below fire_min ({})", thresholds.no_fire_max,
                                               thresholds.fire_min));
    }
    if (!(tolerance > 0)) fail(ErrorCode::BadConfig, "tolerance must be positive");
    if (port < 0 || port > 65535) fail(ErrorCode::BadConfig, "port out of range");
    if (jobs < 0) fail(ErrorCode::BadConfig, "jobs must be >= 0");
    if (!(nominal_interval > 0)) fail(ErrorCode::BadConfig, "nominal_interval must be positive");
    if (!input.empty() && !output.empty() && input.lexically_normal() == output.lexically_normal()) {
        fail(ErrorCode::BadConfig, "input and output must differ");
    }
}

void apply_config_text(Config& cfg, std::string_view text) {
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(ErrorCode::BadConfig, fmt::format("config line {}: expected key = value", line_no));
        std::string key(trim(line.substr(0, eq)));
        std::string value = unquote(trim(line.substr(eq + 1)));
        try {
            if (key == "input") cfg.input = value;
            else if (key == "output") cfg.output = value;
            else if (key == "profiles") cfg.profiles_file = value;
            else if (key == "camera") cfg.camera_model = value;
            else if (key == "no_fire_max") cfg.thresholds.no_fire_max = csv::parse_number(value, key);
            else if (key == "fire_min") cfg.thresholds.fire_min = csv::parse_number(value, key);
            else if (key == "normalization") cfg.normalization = colormap::NormalizationMode::parse(value);
            else if (key == "tolerance") cfg.tolerance = csv::parse_number(value, key);
            else if (key == "host") cfg.host = value;
            else if (key == "port") cfg.port = parse_int(value, key);
            else if (key == "jobs") cfg.jobs = parse_int(value, key);
            else if (key == "dry_run") cfg.dry_run = parse_bool(value, key);
            else if (key == "plot") cfg.plot_id = value;
            else if (key == "ignition_threshold") cfg.ignition_threshold = csv::parse_number(value, key);
            else if (key == "ambient") cfg.ambient = csv::parse_number(value, key);
            else if (key == "nominal_interval") cfg.nominal_interval = csv::parse_number(value, key);
            else if (key == "dataset_dir") cfg.dataset_dir = value;
            else if (key == "ui_dir") cfg.ui_dir = value;
            else if (key == "overlay_threshold") cfg.overlay_threshold = csv::parse_number(value, key);
            else fail(ErrorCode::BadConfig, fmt::format("config line {}: unknown key '{}'", line_no, key));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BadConfig) throw;
            fail(ErrorCode::BadConfig, fmt::format("config line {}: {}", line_no, e.what()));
        }
    }
}

void apply_config_file(Config& cfg, const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        fail(ErrorCode::BadConfig, fmt::format("cannot read config {}: {}", path.string(), e.what()));
    }
    apply_config_text(cfg, text);
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadConfig:
        case ErrorCode::InvalidThresholdOrder:
        case ErrorCode::UnknownCameraProfile:
        case ErrorCode::InvalidArgument: return kBadConfig;
        default: return kTotalFailure;
    }
}

}  // namespace flame::cli
