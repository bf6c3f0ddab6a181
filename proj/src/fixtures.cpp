#include "flame/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "flame/codec.hpp"
#include "flame/error.hpp"
#include "flame/io.hpp"
#include "flame/jpeg.hpp"
#include "flame/mp4.hpp"
#include "flame/nadir.hpp"

namespace fs = std::filesystem;

namespace flame::fixtures {

Intent intent_of(int i) { return static_cast<Intent>(i % 3); }

double peak_temperature(int i) {
    switch (intent_of(i)) {
        case Intent::FIRE: return 450.0 + 10.0 * (i % 4);
        case Intent::NO_FIRE: return 45.0 + 2.0 * (i % 5);
        case Intent::REVIEW: return 130.0 + 5.0 * (i % 3);
    }
    return 0;
}

namespace {

struct Scene {
    double ambient, peak, cx, cy, sigma;
};

Scene scene_of(int i, Size2 ir) {
    return {18.0 + (i % 4), peak_temperature(i),
            // hot spot wanders with the index so every frame differs
            ir.width * (0.3 + 0.1 * (i % 5)), ir.height * (0.35 + 0.075 * (i % 4)), ir.width * 0.06};
}

// Both terms are separable in u and v, which keeps large RGB frames cheap.
double gauss_1d(const Scene& s, double d) { return std::exp(-d * d / (2 * s.sigma * s.sigma)); }

double combine(const Scene& s, double gu, double gv, double su, double cv) {
    double t = s.ambient + (s.peak - s.ambient) * gu * gv + 3.0 * su * cv;  // gentle terrain texture
    return std::round(t * 10.0) / 10.0;
}

}  // namespace

double scene_temperature(int i, double u, double v, Size2 ir) {
    Scene s = scene_of(i, ir);
    return combine(s, gauss_1d(s, u - s.cx), gauss_1d(s, v - s.cy), std::sin(u * 0.05), std::cos(v * 0.04));
}

double nadir_temperature(int k, int x, double front_temp, double ambient) {
    if (x > k) return ambient;
    // Front at x == k, cooling behind it.
    return ambient + (front_temp - ambient) * std::exp(-(k - x) / 4.0);
}

namespace {

std::string dji_name(Timestamp ts, int seq, const char* suffix, const char* ext) {
    auto secs = std::chrono::floor<std::chrono::seconds>(ts);
    return fmt::format("DJI_{:%Y%m%d%H%M%S}_{:04d}_{}.{}", secs, seq, suffix, ext);
}

Bytes with_exif(const Bytes& jpeg_bytes, const CaptureMetadata& meta) {
    jpeg::Container c = jpeg::Container::parse(jpeg_bytes);
    c.insert_front(jpeg::Segment{jpeg::kApp1, codec::metadata_segment(meta)});
    return c.serialize();
}

std::map<std::string, std::string> gimbal(int i) {
    return {{"gimbal_pitch", fmt::format("{}", -90 + (i % 3) * 15)},
            {"exposure_time", "1/500"},
            {"iso", "100"}};
}

RgbImage rgb_scene(int i, const align::CameraProfile& prof) {
    const align::AlignmentParams& p = prof.default_params;
    const Scene s = scene_of(i, prof.ir_resolution);
    RgbImage img(prof.rgb_resolution.width, prof.rgb_resolution.height);
    std::vector<double> gu(img.width), su(img.width);
    std::vector<bool> line_u(img.width);
    for (int x = 0; x < img.width; ++x) {
        double u = p.forward({x + 0.0, 0.0}).x;
        gu[x] = gauss_1d(s, u - s.cx);
        su[x] = std::sin(u * 0.05);
        line_u[x] = std::fmod(std::abs(u), 64.0) < 1.5;
    }
    for (int y = 0; y < img.height; ++y) {
        double v = p.forward({0.0, y + 0.0}).y;
        double gv = gauss_1d(s, v - s.cy), cv = std::cos(v * 0.04);
        bool line_v = std::fmod(std::abs(v), 64.0) < 1.5;
        for (int x = 0; x < img.width; ++x) {
            double t = combine(s, gu[x], gv, su[x], cv);
            double heat = std::clamp((t - 20.0) / 300.0, 0.0, 1.0);
            double r = 70 + 185 * heat, g = 110 + 40 * heat, b = 45;
            if (line_u[x] || line_v) r = g = b = 200;
            std::uint8_t* px = img.at(x, y);
            px[0] = static_cast<std::uint8_t>(r);
            px[1] = static_cast<std::uint8_t>(g);
            px[2] = static_cast<std::uint8_t>(b);
        }
    }
    return img;
}

}  // namespace

Manifest generate(const fs::path& root, const Options& o) {
    if (o.pairs < 0 || o.video_pairs < 0 || o.nadir_frames < 0) fail(ErrorCode::InvalidArgument, "negative count");
    align::CameraProfile prof = o.profile ? *o.profile : align::ProfileSet().get(o.camera_model);
    if (o.profile) prof.camera_model = o.camera_model;
    Manifest m;
    m.raw_dir = root / "raw";
    auto put = [&](const fs::path& p, const Bytes& data) {
        write_file_if_changed(p, data);
        m.files.push_back(p);
    };

    using std::chrono::milliseconds;
    for (int i = 0; i < o.pairs; ++i) {
        Timestamp t_rgb = o.base_time + milliseconds(static_cast<long>(std::llround(i * o.spacing_s * 1000)));
        // 0.2 .. 0.56 s shutter skew, alternating sign
        long skew = 200 + 40 * ((i * 7) % 10);
        Timestamp t_ir = t_rgb + milliseconds(i % 2 ? -skew : skew);

        CaptureMetadata rgb_meta{t_rgb, prof.camera_model, prof.rgb_resolution.width, prof.rgb_resolution.height,
                                 Modality::RGB, gimbal(i)};
        Bytes rgb = with_exif(jpeg::encode_rgb(rgb_scene(i, prof), 90), rgb_meta);
        put(m.raw_dir / dji_name(t_rgb, 2 * i + 1, "W", "JPG"), rgb);

        const Size2 ir = prof.ir_resolution;
        TemperatureRaster r(ir.width, ir.height, 0.0);
        for (int v = 0; v < ir.height; ++v) {
            for (int u = 0; u < ir.width; ++u) r.at(u, v) = scene_temperature(i, u, v, ir);
        }
        CaptureMetadata ir_meta{t_ir, prof.camera_model, ir.width, ir.height, Modality::THERMAL, gimbal(i)};
        put(m.raw_dir / dji_name(t_ir, 2 * i + 2, "T", "JPG"), codec::encode_reference_rjpeg(r, ir_meta));
    }

    for (int i = 0; i < o.video_pairs; ++i) {
        Timestamp t = o.base_time + std::chrono::minutes(30 + 5 * i);
        mp4::Info rgb{t, prof.rgb_resolution.width, prof.rgb_resolution.height, 60.0, prof.camera_model};
        mp4::Info ir{t + std::chrono::seconds(1), prof.ir_resolution.width, prof.ir_resolution.height, 60.0,
                     prof.camera_model};
        put(m.raw_dir / "video" / dji_name(rgb.creation_time, 100 + 2 * i, "W", "MP4"), mp4::build_minimal(rgb));
        put(m.raw_dir / "video" / dji_name(ir.creation_time, 101 + 2 * i, "T", "MP4"), mp4::build_minimal(ir));
    }

    if (o.nadir && o.nadir_frames > 0) {
        m.nadir_dir = root / "nadir" / o.plot_id;
        const Size2 sz = o.nadir_size;
        Timestamp t0 = o.base_time + std::chrono::hours(2);
        for (int k = 0; k < o.nadir_frames; ++k) {
            std::vector<double> column(sz.width);
            for (int x = 0; x < sz.width; ++x) column[x] = nadir_temperature(k, x, o.front_temp, o.ambient);
            TemperatureRaster r(sz.width, sz.height, 0.0);
            for (int y = 0; y < sz.height; ++y) std::copy(column.begin(), column.end(), r.values.begin() + y * sz.width);
            Timestamp t = t0 + milliseconds(static_cast<long>(std::llround(k * o.nadir_interval_s * 1000)));
            CaptureMetadata meta{t, prof.camera_model, sz.width, sz.height, Modality::THERMAL, {{"gimbal_pitch", "-90"}}};
            put(m.nadir_dir / dji_name(t, k + 1, "T", "JPG"), codec::encode_reference_rjpeg(r, meta));
        }
        // Plates at the centre and 200 px toward each compass direction.
        const double cu = sz.width / 2.0, cv = sz.height / 2.0, d = 200.0;
        const double e0 = 500000.0, n0 = 4000000.0;
        auto world = [&](double u, double v) {
            return std::pair{e0 + o.nadir_gsd * u, n0 - o.nadir_gsd * v};
        };
        std::vector<nadir::GroundControlPoint> gcps;
        for (auto [name, u, v] : {std::tuple{"CENTER", cu, cv}, {"NORTH", cu, cv - d}, {"EAST", cu + d, cv},
                                  {"SOUTH", cu, cv + d}}) {
            auto [e, n] = world(u, v);
            gcps.push_back({name, {u, v}, e, n});
        }
        std::string text = nadir::format_gcps_csv(gcps);
        put(m.nadir_dir / "gcps.csv", Bytes(text.begin(), text.end()));
    }
    std::sort(m.files.begin(), m.files.end());
    return m;
}

}  // namespace flame::fixtures
