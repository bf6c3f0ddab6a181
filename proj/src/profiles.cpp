#include <fmt/format.h>

#include "flame/align.hpp"
#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/io.hpp"

namespace flame::align {

namespace {

// Centered 70%-width window with the thermal aspect ratio. Placeholder
// geometry until per-camera parameters are refined from correspondences.
CameraProfile centered_profile(std::string model, Size2 rgb, Size2 ir) {
    double w = 0.7 * rgb.width;
    double h = w * ir.height / ir.width;
    Rect crop{(rgb.width - w) / 2.0, (rgb.height - h) / 2.0, w, h};
    double s = ir.width / w;
    return {std::move(model), rgb, ir, AlignmentParams{s, s, 0.0, 0.0, crop}};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

Size2 parse_resolution(std::string_view v, int line) {
    v = unquote(v);
    auto x = v.find('x');
    if (x == std::string_view::npos) fail(ErrorCode::BadConfig, fmt::format("profiles line {}: expected WxH", line));
    Size2 s{static_cast<int>(csv::parse_number(v.substr(0, x), "resolution")),
            static_cast<int>(csv::parse_number(v.substr(x + 1), "resolution"))};
    if (s.width <= 0 || s.height <= 0) fail(ErrorCode::BadConfig, fmt::format("profiles line {}: resolution must be positive", line));
    return s;
}

Rect parse_crop(std::string_view v, int line) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        fail(ErrorCode::BadConfig, fmt::format("profiles line {}: crop must be [x, y, w, h]", line));
    }
    v = v.substr(1, v.size() - 2);
    double parts[4];
    for (int i = 0; i < 4; ++i) {
        auto comma = v.find(',');
        if ((i < 3) != (comma != std::string_view::npos)) {
            fail(ErrorCode::BadConfig, fmt::format("profiles line {}: crop needs 4 numbers", line));
        }
        parts[i] = csv::parse_number(trim(v.substr(0, comma)), "crop");
        if (comma != std::string_view::npos) v.remove_prefix(comma + 1);
    }
    return {parts[0], parts[1], parts[2], parts[3]};
}

struct Pending {
    CameraProfile profile;
    bool has_rgb = false, has_ir = false, has_scale_x = false, has_scale_y = false, has_crop = false;
    int line = 0;
};

CameraProfile finish(Pending& p) {
    if (!p.has_rgb || !p.has_ir) {
        fail(ErrorCode::BadConfig, fmt::format("profile '{}' (line {}) needs rgb_resolution and ir_resolution",
                                               p.profile.camera_model, p.line));
    }
    CameraProfile base = centered_profile(p.profile.camera_model, p.profile.rgb_resolution, p.profile.ir_resolution);
    AlignmentParams& a = p.profile.default_params;
    if (!p.has_crop) a.crop = base.default_params.crop;
    if (!p.has_scale_x) a.scale_x = p.profile.ir_resolution.width / a.crop.w;
    if (!p.has_scale_y) a.scale_y = p.profile.ir_resolution.height / a.crop.h;
    validate_params(a, p.profile.rgb_resolution);
    return p.profile;
}

}  // namespace

const std::vector<CameraProfile>& builtin_profiles() {
    static const std::vector<CameraProfile> profiles = {
        centered_profile("M30T", {4000, 3000}, {640, 512}),
        centered_profile("M2EA", {8000, 6000}, {640, 512}),
        centered_profile("XT709", {8000, 6000}, {640, 512}),
    };
    return profiles;
}

ProfileSet::ProfileSet() {
    for (const auto& p : builtin_profiles()) profiles_.emplace(p.camera_model, p);
}

ProfileSet ProfileSet::from_text(std::string_view text, bool include_builtins) {
    ProfileSet set;
    if (!include_builtins) set.profiles_.clear();
    std::optional<Pending> cur;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorCode::BadConfig, fmt::format("profiles line {}: bad section", line_no));
            if (cur) set.put(finish(*cur));
            cur.emplace();
            cur->profile.camera_model = std::string(unquote(trim(line.substr(1, line.size() - 2))));
            cur->line = line_no;
            if (cur->profile.camera_model.empty()) fail(ErrorCode::BadConfig, "empty profile name");
            continue;
        }
        if (!cur) fail(ErrorCode::BadConfig, fmt::format("profiles line {}: key outside a [section]", line_no));
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(ErrorCode::BadConfig, fmt::format("profiles line {}: expected key = value", line_no));
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        AlignmentParams& a = cur->profile.default_params;
        if (key == "rgb_resolution") {
            cur->profile.rgb_resolution = parse_resolution(value, line_no);
            cur->has_rgb = true;
        } else if (key == "ir_resolution") {
            cur->profile.ir_resolution = parse_resolution(value, line_no);
            cur->has_ir = true;
        } else if (key == "scale_x") {
            a.scale_x = csv::parse_number(value, "scale_x");
            cur->has_scale_x = true;
        } else if (key == "scale_y") {
            a.scale_y = csv::parse_number(value, "scale_y");
            cur->has_scale_y = true;
        } else if (key == "translate_x") {
            a.translate_x = csv::parse_number(value, "translate_x");
        } else if (key == "translate_y") {
            a.translate_y = csv::parse_number(value, "translate_y");
        } else if (key == "crop") {
            a.crop = parse_crop(value, line_no);
            cur->has_crop = true;
        } else {
            fail(ErrorCode::BadConfig, fmt::format("profiles line {}: unknown key '{}'", line_no, key));
        }
    }
    if (cur) set.put(finish(*cur));
    return set;
}

ProfileSet ProfileSet::from_file(const std::filesystem::path& path, bool include_builtins) {
    return from_text(read_text_file(path), include_builtins);
}

const CameraProfile* ProfileSet::find(std::string_view model) const {
    auto it = profiles_.find(model);
    return it == profiles_.end() ? nullptr : &it->second;
}

const CameraProfile& ProfileSet::get(std::string_view model) const {
    if (const auto* p = find(model)) return *p;
    fail(ErrorCode::UnknownCameraProfile, fmt::format("no camera profile for model '{}'", model));
}

void ProfileSet::put(CameraProfile profile) {
    std::string key = profile.camera_model;
    profiles_.insert_or_assign(std::move(key), std::move(profile));
}

std::vector<std::string> ProfileSet::models() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : profiles_) out.push_back(k);
    return out;
}

bool ProfileSet::is_ir_resolution(Size2 size) const {
    for (const auto& [_, p] : profiles_) {
        if (p.ir_resolution == size) return true;
    }
    return false;
}

std::string ProfileSet::to_text() const {
    std::string out;
    for (const auto& [name, p] : profiles_) {
        const AlignmentParams& a = p.default_params;
        out += fmt::format("[{}]\n", name);
        out += fmt::format("rgb_resolution = \"{}x{}\"\n", p.rgb_resolution.width, p.rgb_resolution.height);
        out += fmt::format("ir_resolution = \"{}x{}\"\n", p.ir_resolution.width, p.ir_resolution.height);
        out += "scale_x = " + csv::format_number(a.scale_x) + "\n";
        out += "scale_y = " + csv::format_number(a.scale_y) + "\n";
        out += "translate_x = " + csv::format_number(a.translate_x) + "\n";
        out += "translate_y = " + csv::format_number(a.translate_y) + "\n";
        out += "crop = [" + csv::format_number(a.crop.x) + ", " + csv::format_number(a.crop.y) + ", " +
               csv::format_number(a.crop.w) + ", " + csv::format_number(a.crop.h) + "]\n\n";
    }
    return out;
}

}  // namespace flame::align
