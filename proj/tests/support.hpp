#pragma once

// Helpers shared by the unit, acceptance and golden tests.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "flame/align.hpp"
#include "flame/codec.hpp"
#include "flame/io.hpp"
#include "flame/jpeg.hpp"
#include "flame/raster.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("flamekit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

/// Raster of values on a 0.1 degC grid drawn uniformly from [lo, hi].
inline flame::TemperatureRaster random_raster(std::mt19937_64& rng, int w, int h, double lo, double hi) {
    std::uniform_int_distribution<long> d(static_cast<long>(std::ceil(lo * 10)), static_cast<long>(std::floor(hi * 10)));
    flame::TemperatureRaster r(w, h, 0.0);
    for (auto& v : r.values) v = d(rng) / 10.0;
    return r;
}

/// 1/10-scale stand-in for an M30T so pipeline tests stay fast.
inline flame::align::CameraProfile small_profile() {
    flame::align::CameraProfile p;
    p.camera_model = "TESTCAM";
    p.rgb_resolution = {400, 300};
    p.ir_resolution = {64, 48};
    double w = 280, h = w * 48 / 64;
    p.default_params = {64 / w, 48 / h, 0, 0, {60, (300 - h) / 2, w, h}};
    return p;
}

inline flame::CaptureMetadata meta_at(flame::Timestamp ts, flame::Modality m = flame::Modality::THERMAL,
                                      std::string model = "M30T") {
    flame::CaptureMetadata c;
    c.timestamp = ts;
    c.camera_model = std::move(model);
    c.modality = m;
    return c;
}

/// RGB JPEG with EXIF capture fields only.
inline void write_rgb_jpeg(const fs::path& path, flame::Timestamp ts, std::string model = "M30T",
                           int w = 16, int h = 12) {
    auto c = flame::jpeg::Container::parse(flame::jpeg::encode_rgb(flame::RgbImage(w, h), 90));
    auto meta = meta_at(ts, flame::Modality::RGB, std::move(model));
    meta.image_width = w;
    meta.image_height = h;
    c.insert_front(flame::jpeg::Segment{flame::jpeg::kApp1, flame::codec::metadata_segment(meta)});
    fs::create_directories(path.parent_path());
    flame::write_file(path, c.serialize());
}

/// Reference radiometric JPEG.
inline void write_thermal_jpeg(const fs::path& path, flame::Timestamp ts, const flame::TemperatureRaster& r,
                               std::string model = "M30T") {
    fs::create_directories(path.parent_path());
    flame::write_file(path, flame::codec::encode_reference_rjpeg(r, meta_at(ts, flame::Modality::THERMAL, std::move(model))));
}

// Blobby raster: a few hot discs over a noisy background.
inline flame::TemperatureRaster blob_raster(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0, 1);
    flame::TemperatureRaster r(w, h, 0.0);
    struct Disc {
        double x, y, rad, peak;
    };
    std::vector<Disc> discs;
    for (int i = 0; i < 4; ++i) discs.push_back({u(rng) * w, u(rng) * h, 2 + u(rng) * 6, 100 + u(rng) * 400});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = 20 + u(rng) * 30;
            for (const auto& d : discs) {
                double dd = std::hypot(x - d.x, y - d.y);
                if (dd < d.rad) v = std::max(v, d.peak * (1 - dd / d.rad) + 30);
            }
            r.at(x, y) = std::round(v * 10) / 10;
        }
    }
    return r;
}

}  // namespace testutil
