#include "flame/nadir.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "flame/codec.hpp"
#include "flame/csv.hpp"
#include "flame/error.hpp"
#include "flame/io.hpp"
#include "flame/kernels.hpp"
#include "flame/tiff.hpp"

namespace fs = std::filesystem;

namespace flame::nadir {

std::vector<double> NadirStack::times() const {
    std::vector<double> t;
    t.reserve(frames.size());
    for (const auto& f : frames) t.push_back(seconds_between(f.timestamp, frames.front().timestamp));
    return t;
}

double NadirStack::duration() const {
    return frames.empty() ? 0.0 : seconds_between(frames.back().timestamp, frames.front().timestamp);
}

NadirStack build_stack(std::vector<Frame> frames, const PlotConfig& config) {
    if (frames.empty()) fail(ErrorCode::EmptyStack, "nadir stack has no frames");
    if (!(config.nominal_interval > 0)) fail(ErrorCode::InvalidArgument, "nominal interval must be positive");
    std::stable_sort(frames.begin(), frames.end(),
                     [](const Frame& a, const Frame& b) { return a.timestamp < b.timestamp; });
    const int w = frames.front().raster.width, h = frames.front().raster.height;
    for (const auto& f : frames) {
        f.raster.validate();
        if (f.raster.width != w || f.raster.height != h) {
            fail(ErrorCode::MixedDimensions, fmt::format("frame {} is {}x{}, stack is {}x{}", f.source,
                                                         f.raster.width, f.raster.height, w, h));
        }
    }
    NadirStack s;
    s.plot_id = config.plot_id;
    s.nominal_interval = config.nominal_interval;
    s.frames = std::move(frames);
    std::vector<double> t = s.times();
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            fail(ErrorCode::InvalidArgument,
                 fmt::format("frames {} and {} share a timestamp", s.frames[i - 1].source, s.frames[i].source));
        }
        if (t[i] - t[i - 1] > 2.0 * s.nominal_interval) s.gaps.push_back({t[i - 1], t[i]});
    }
    return s;
}

Frame load_frame(const fs::path& path) {
    codec::DecodedImage d = codec::decode_rjpeg(read_file(path));
    if (!d.meta) fail(ErrorCode::NoMetadataInSource, fmt::format("{} has no capture timestamp", path.string()));
    return {d.meta->timestamp, std::move(d.raster), path.filename().string()};
}

align::Point WorldTransform::apply(align::Point p) const {
    return {a * p.x + b * p.y + c, d * p.x + e * p.y + f};
}

Georeference georeference(const std::vector<GroundControlPoint>& gcps) {
    if (gcps.size() < 3) fail(ErrorCode::InsufficientGcps, fmt::format("{} GCPs given, need 3", gcps.size()));
    const Eigen::Index n = static_cast<Eigen::Index>(gcps.size());

    // Collinearity: the centered pixel cloud must span two dimensions.
    Eigen::MatrixXd centered(n, 2);
    double mu = 0, mv = 0;
    for (const auto& g : gcps) {
        mu += g.pixel.x;
        mv += g.pixel.y;
    }
    mu /= n;
    mv /= n;
    for (Eigen::Index i = 0; i < n; ++i) centered.row(i) << gcps[i].pixel.x - mu, gcps[i].pixel.y - mv;
    Eigen::JacobiSVD<Eigen::MatrixXd> spread(centered);
    Eigen::VectorXd sv = spread.singularValues();
    if (!(sv(0) > 0) || sv(1) <= 1e-9 * sv(0)) fail(ErrorCode::CollinearGcps, "GCP pixels are collinear");

    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd be(n), bn(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A.row(i) << gcps[i].pixel.x, gcps[i].pixel.y, 1.0;
        be(i) = gcps[i].easting;
        bn(i) = gcps[i].northing;
    }
    auto qr = A.colPivHouseholderQr();
    Eigen::Vector3d xe = qr.solve(be);
    Eigen::Vector3d xn = qr.solve(bn);

    Georeference g;
    g.transform = {xe(0), xe(1), xe(2), xn(0), xn(1), xn(2)};
    Eigen::Matrix2d lin;
    lin << xe(0), xe(1), xn(0), xn(1);
    Eigen::Vector2d lsv = Eigen::JacobiSVD<Eigen::Matrix2d>(lin).singularValues();
    g.gsd = (lsv(0) + lsv(1)) / 2.0;
    for (const auto& p : gcps) {
        align::Point w = g.transform.apply(p.pixel);
        g.residuals.push_back({p.name, std::hypot(w.x - p.easting, w.y - p.northing)});
    }
    return g;
}

Georeference georeference(NadirStack& stack, const std::vector<GroundControlPoint>& gcps) {
    Georeference g = georeference(gcps);
    stack.gcps = gcps;
    stack.gsd = g.gsd;
    return g;
}

std::vector<GroundControlPoint> parse_gcps_csv(std::string_view text) {
    std::vector<GroundControlPoint> out;
    for (const auto& r : csv::parse_with_header(text, {"name", "u", "v", "easting", "northing"}, "gcps.csv")) {
        out.push_back({r[0],
                       {csv::parse_number(r[1], "u"), csv::parse_number(r[2], "v")},
                       csv::parse_number(r[3], "easting"),
                       csv::parse_number(r[4], "northing")});
    }
    return out;
}

std::string format_gcps_csv(const std::vector<GroundControlPoint>& gcps) {
    std::string out = csv::format_row({"name", "u", "v", "easting", "northing"});
    for (const auto& g : gcps) {
        out += csv::format_row({g.name, csv::format_number(g.pixel.x), csv::format_number(g.pixel.y),
                                csv::format_number(g.easting), csv::format_number(g.northing)});
    }
    return out;
}

namespace {

std::vector<kernels::FrameView> views(const NadirStack& stack) {
    if (stack.frames.empty()) fail(ErrorCode::EmptyStack, "nadir stack has no frames");
    std::vector<kernels::FrameView> v;
    for (const auto& f : stack.frames) v.emplace_back(f.raster.values);
    return v;
}

}  // namespace

FloatGrid arrival_time_map(const NadirStack& stack, double threshold) {
    auto v = views(stack);
    std::vector<double> t = stack.times();
    FloatGrid out(stack.width(), stack.height());
    kernels::arrival_times(v, t, threshold, out.values);
    return out;
}

SpeedField rate_of_spread(const FloatGrid& arrival, double gsd, double epsilon) {
    if (!(gsd > 0)) fail(ErrorCode::InvalidArgument, "gsd must be positive");
    if (arrival.values.size() != static_cast<std::size_t>(arrival.width) * arrival.height) {
        fail(ErrorCode::InvalidArgument, "arrival grid size mismatch");
    }
    SpeedField s{FloatGrid(arrival.width, arrival.height), Mask(arrival.width, arrival.height)};
    kernels::rate_of_spread(arrival.values, arrival.width, arrival.height, gsd, epsilon, s.speed.values,
                            s.valid.pixels);
    return s;
}

FloatGrid energy_proxy(const NadirStack& stack, double ambient) {
    auto v = views(stack);
    std::vector<double> t = stack.times();
    FloatGrid out(stack.width(), stack.height());
    kernels::energy_trapezoid(v, t, ambient, out.values);
    return out;
}

std::string summary_text(const NadirStack& stack, const ProductSummary& s, const ProductOptions& o) {
    const WorldTransform& t = s.georef.transform;
    std::string out;
    out += fmt::format("plot_id = {}\n", stack.plot_id);
    out += fmt::format("frames = {}\n", s.frames);
    out += fmt::format("duration_s = {}\n", csv::format_number(s.duration_s));
    out += fmt::format("nominal_interval_s = {}\n", csv::format_number(stack.nominal_interval));
    out += fmt::format("gsd_m_per_px = {:.9g}\n", s.georef.gsd);
    out += fmt::format("transform = {:.12g} {:.12g} {:.12g} {:.12g} {:.12g} {:.12g}\n", t.a, t.b, t.c, t.d, t.e, t.f);
    out += "transform_model = easting = a*u + b*v + c; northing = d*u + e*v + f\n";
    for (const auto& r : s.georef.residuals) out += fmt::format("gcp_residual_m {} = {:.6g}\n", r.name, r.residual_m);
    out += fmt::format("ignition_threshold_c = {}\n", csv::format_number(o.ignition_threshold));
    out += fmt::format("ambient_c = {}\n", csv::format_number(o.ambient));
    out += fmt::format("gradient_epsilon_s_per_px = {}\n", csv::format_number(o.epsilon));
    out += fmt::format("nodata = {}\n", csv::format_number(kNoData));
    out += fmt::format("burned_pixels = {}\n", s.burned_pixels);
    out += fmt::format("valid_speed_pixels = {}\n", s.valid_speed_pixels);
    out += fmt::format("mean_speed_m_per_s = {:.9g}\n", s.interior_mean_speed);
    out += fmt::format("gaps = {}\n", stack.gaps.size());
    for (const auto& g : stack.gaps) {
        out += fmt::format("gap = {} .. {} ({} s)\n", csv::format_number(g.start_s), csv::format_number(g.end_s),
                           csv::format_number(g.seconds()));
    }
    return out;
}

ProductSummary write_products(const NadirStack& stack, const Georeference& georef, const ProductOptions& o,
                              const fs::path& out_dir, bool dry_run, std::size_t* changed) {
    FloatGrid arrival = arrival_time_map(stack, o.ignition_threshold);
    SpeedField ros = rate_of_spread(arrival, georef.gsd, o.epsilon);
    FloatGrid energy = energy_proxy(stack, o.ambient);

    ProductSummary s;
    s.georef = georef;
    s.frames = stack.frames.size();
    s.duration_s = stack.duration();
    double sum = 0;
    for (std::size_t i = 0; i < arrival.values.size(); ++i) {
        if (std::isfinite(arrival.values[i])) ++s.burned_pixels;
        if (ros.valid.pixels[i]) {
            ++s.valid_speed_pixels;
            sum += ros.speed.values[i];
        }
    }
    s.interior_mean_speed = s.valid_speed_pixels ? sum / s.valid_speed_pixels : 0.0;

    FloatGrid speed = ros.speed;
    for (std::size_t i = 0; i < speed.values.size(); ++i) {
        if (!ros.valid.pixels[i]) speed.values[i] = kNever;  // becomes nodata
    }
    std::size_t n = 0;
    auto put = [&](const std::string& name, const Bytes& data) {
        fs::path p = out_dir / name;
        bool diff;
        if (dry_run) {
            std::error_code ec;
            diff = !(fs::exists(p, ec) && read_file(p) == data);
        } else {
            diff = write_file_if_changed(p, data);
        }
        n += diff;
        s.written.push_back(p);
    };
    put("arrival_time.tiff", tiff::encode_float_grid(arrival, kNoData));
    put("rate_of_spread.tiff", tiff::encode_float_grid(speed, kNoData));
    put("energy_proxy.tiff", tiff::encode_float_grid(energy, kNoData));
    std::string text = summary_text(stack, s, o);
    put("summary.txt", Bytes(text.begin(), text.end()));
    if (changed) *changed = n;
    return s;
}

}  // namespace flame::nadir
