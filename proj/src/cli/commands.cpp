#include <algorithm>
#include <atomic>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <httplib.h>

#include "flame/align.hpp"
#include "flame/cli.hpp"
#include "flame/codec.hpp"
#include "flame/colormap.hpp"
#include "flame/csv.hpp"
#include "flame/fixtures.hpp"
#include "flame/io.hpp"
#include "flame/jpeg.hpp"
#include "flame/kernels.hpp"
#include "flame/nadir.hpp"
#include "flame/pairing.hpp"
#include "flame/review.hpp"
#include "flame/tiff.hpp"
#include "flame/workspace.hpp"

namespace fs = std::filesystem;

namespace flame::cli {

namespace {

template <class... Args>
void say(std::ostream& out, fmt::format_string<Args...> f, Args&&... args) {
    out << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

template <class F>
int guarded(std::ostream& out, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        say(out, "error [{}]: {}", to_string(e.code()), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        say(out, "error: {}", e.what());
        return kTotalFailure;
    }
}

void require(bool ok, std::string_view what) {
    if (!ok) fail(ErrorCode::BadConfig, fmt::format("missing required setting: {}", what));
}

align::ProfileSet load_profiles(const Config& cfg) {
    return cfg.profiles_file ? align::ProfileSet::from_file(*cfg.profiles_file) : align::ProfileSet();
}

int threads(const Config& cfg) { return cfg.jobs > 0 ? cfg.jobs : kernels::max_threads(); }

bool put(const fs::path& p, const Bytes& data, bool dry_run) {
    if (!dry_run) return write_file_if_changed(p, data);
    std::error_code ec;
    return !(fs::exists(p, ec) && read_file(p) == data);
}

const align::CameraProfile& profile_for(const align::ProfileSet& profiles, const Config& cfg,
                                        const pairing::PairRecord& p) {
    if (cfg.camera_model) return profiles.get(*cfg.camera_model);
    const std::string& model = p.thermal.meta.camera_model.empty() ? p.rgb.meta.camera_model : p.thermal.meta.camera_model;
    return profiles.get(model);
}

/// Derived files for one image pair: TIFF, regenerated thermal JPEG, aligned RGB.
std::size_t derive_pair(const pairing::PairRecord& p, const align::CameraProfile& prof, const Config& cfg,
                        const workspace::Workspace& ws) {
    Bytes ir_bytes = read_file(p.thermal.path);
    codec::DecodedImage d = codec::decode_rjpeg(ir_bytes);
    std::size_t changed = 0;
    changed += put(ws.tiff_path(p.pair_id), tiff::encode_raster(d.raster), cfg.dry_run);

    Bytes thermal = colormap::render_thermal_jpeg(d.raster, colormap::inferno(), cfg.normalization);
    changed += put(ws.thermal_jpeg_path(p.pair_id), codec::copy_exif_bytes(ir_bytes, thermal), cfg.dry_run);

    Bytes rgb_bytes = read_file(p.rgb.path);
    RgbImage rgb = jpeg::decode_rgb(rgb_bytes);
    align::AlignedImage a = align::apply_alignment(rgb, prof.default_params, {d.raster.width, d.raster.height});
    Bytes aligned = jpeg::encode_rgb(a.image, codec::kThermalJpegQuality);
    changed += put(ws.aligned_rgb_path(p.pair_id), codec::copy_exif_bytes(rgb_bytes, aligned), cfg.dry_run);
    return changed;
}

std::size_t resort_labeled(const workspace::Workspace& ws, bool dry_run) {
    label::LabelMap labels = ws.load_labels();
    std::vector<label::PairFiles> files;
    for (auto& f : ws.pair_files()) {
        if (labels.count(f.pair_id)) files.push_back(std::move(f));
    }
    if (files.empty()) return 0;
    return label::sort_pairs(files, labels, ws.root, dry_run).changes();
}

}  // namespace

int cmd_sort(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        require(!cfg.input.empty(), "input");
        require(!cfg.output.empty(), "output");
        cfg.validate();
        align::ProfileSet profiles = load_profiles(cfg);

        pairing::ScanResult scan = pairing::scan_directory(cfg.input, profiles);
        for (const auto& s : scan.skipped) {
            say(out, "warning: skipped {} [{}]: {}", pairing::relative_string(s.path, cfg.input), to_string(s.code), s.reason);
        }
        if (scan.assets.empty()) say(out, "warning: no media found under {}", cfg.input.string());
        pairing::PairingResult pr = pairing::pair_assets(scan.assets, cfg.tolerance, cfg.input);
        for (const auto& u : pr.unmatched) {
            say(out, "unmatched {} {} {}", to_string(u.kind), to_string(u.modality), pairing::relative_string(u.path, cfg.input));
        }

        workspace::Workspace ws;
        ws.root = cfg.output;
        std::vector<const pairing::PairRecord*> images, videos;
        for (const auto& p : pr.pairs) (p.rgb.kind == MediaKind::IMAGE ? images : videos).push_back(&p);

        if (cfg.dry_run) {
            say(out, "plan: {} image pairs, {} video pairs -> {}", images.size(), videos.size(), cfg.output.string());
        }

        std::vector<std::size_t> changed(images.size(), 0);
        std::vector<std::optional<std::string>> errors(images.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads(cfg))
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(images.size()); ++i) {
            try {
                const align::CameraProfile& prof = profile_for(profiles, cfg, *images[i]);
                changed[i] = derive_pair(*images[i], prof, cfg, ws);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }

        std::size_t changes = 0, failed = 0;
        std::vector<pairing::PairRow> rows;
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (errors[i]) {
                ++failed;
                say(out, "error: pair {} ({}): {}", images[i]->pair_id,
                    pairing::relative_string(images[i]->rgb.path, cfg.input), *errors[i]);
                continue;
            }
            changes += changed[i];
            rows.push_back(pairing::to_row(*images[i], cfg.output));
        }
        changes += put(ws.pairs_path(), to_bytes(pairing::format_pairs_csv(rows)), cfg.dry_run);

        if (!videos.empty()) {
            std::vector<pairing::PairRow> vrows;
            for (const auto* p : videos) {
                for (auto [asset, tag] : {std::pair{&p->rgb, "_rgb"}, {&p->thermal, "_ir"}}) {
                    std::string ext = asset->path.extension().string();
                    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                    fs::path dest = cfg.output / "videos" / (p->pair_id + tag + ext);
                    changes += put(dest, read_file(asset->path), cfg.dry_run);
                }
                vrows.push_back(pairing::to_row(*p, cfg.output));
            }
            changes += put(cfg.output / "videos" / "pairs.csv", to_bytes(pairing::format_pairs_csv(vrows)), cfg.dry_run);
        }

        ws.pairs = rows;
        std::error_code ec;
        if (fs::exists(ws.labels_path(), ec)) changes += resort_labeled(ws, cfg.dry_run);

        say(out, "sort: {} assets, {} skipped, {} image pairs, {} video pairs, {} unmatched, {} failed, {} changes{}",
            scan.assets.size(), scan.skipped.size(), rows.size(), videos.size(), pr.unmatched.size(), failed, changes,
            cfg.dry_run ? " (dry run)" : "");
        if (failed > 0) return failed == images.size() ? int(kTotalFailure) : int(kPartialFailure);
        return int(kOk);
    });
}

int cmd_label(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        require(!cfg.output.empty(), "output");
        cfg.validate();
        workspace::Workspace ws = workspace::Workspace::open(cfg.output);
        workspace::PrelabelResult r = workspace::prelabel(ws, ws.load_labels(), cfg.thresholds);
        std::size_t changes = 0;
        if (cfg.dry_run) {
            changes = r.changed;
        } else {
            changes += label::write_labels_csv(ws.labels_path(), r.labels);
        }
        label::SortReport sr = label::sort_pairs(ws.pair_files(), r.labels, ws.root, cfg.dry_run);
        changes += sr.changes();
        say(out, "label: FIRE={} NO_FIRE={} NEEDS_REVIEW={} human_kept={} records_changed={} changes={}{}",
            r.counts[label::Label::FIRE], r.counts[label::Label::NO_FIRE], r.counts[label::Label::NEEDS_REVIEW],
            r.human_kept, r.changed, changes, cfg.dry_run ? " (dry run)" : "");
        return int(kOk);
    });
}

int cmd_align(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        cfg.validate();
        align::ProfileSet profiles = load_profiles(cfg);
        if (cfg.correspondences) {
            require(cfg.camera_model.has_value(), "camera (source frame size for the estimate)");
            align::CameraProfile prof = profiles.get(*cfg.camera_model);
            auto corrs = align::parse_correspondences_csv(read_text_file(*cfg.correspondences));
            align::AlignmentEstimate est = align::estimate_alignment(corrs, prof.rgb_resolution);
            const auto& p = est.params;
            say(out, "estimate: scale_x={:.9g} scale_y={:.9g} translate_x={:.9g} translate_y={:.9g}", p.scale_x,
                p.scale_y, p.translate_x, p.translate_y);
            say(out, "residuals: mean={:.6g} px max={:.6g} px over {} points", est.residuals.mean, est.residuals.max,
                est.residuals.points.size());
            if (!cfg.output.empty()) {
                put(cfg.output / "alignment" / "error_map.csv", to_bytes(align::error_map_csv(est.residuals)), cfg.dry_run);
            }
            if (cfg.write_profile) {
                prof.default_params = p;
                align::ProfileSet updated = profiles;
                updated.put(prof);
                if (!cfg.dry_run) write_text_file_atomic(*cfg.write_profile, updated.to_text());
                say(out, "profile {} written to {}", prof.camera_model, cfg.write_profile->string());
            }
            return int(kOk);
        }
        // No correspondences: refresh every aligned RGB with the current profiles.
        require(!cfg.output.empty(), "output");
        workspace::Workspace ws = workspace::Workspace::open(cfg.output);
        std::size_t changes = 0, failed = 0;
        for (const auto& row : ws.pairs) {
            try {
                const align::CameraProfile& prof = profiles.get(cfg.camera_model.value_or(row.camera_model));
                Bytes rgb_bytes = read_file(ws.resolve(row.rgb_path));
                TemperatureRaster r = ws.load_raster(row.pair_id);
                align::AlignedImage a =
                    align::apply_alignment(jpeg::decode_rgb(rgb_bytes), prof.default_params, {r.width, r.height});
                Bytes aligned = codec::copy_exif_bytes(rgb_bytes, jpeg::encode_rgb(a.image, codec::kThermalJpegQuality));
                changes += put(ws.aligned_rgb_path(row.pair_id), aligned, cfg.dry_run);
            } catch (const Error& e) {
                ++failed;
                say(out, "error: pair {}: {}", row.pair_id, e.what());
            }
        }
        say(out, "align: {} pairs, {} failed, {} changes{}", ws.pairs.size(), failed, changes,
            cfg.dry_run ? " (dry run)" : "");
        if (failed > 0) return failed == ws.pairs.size() ? int(kTotalFailure) : int(kPartialFailure);
        return int(kOk);
    });
}

namespace {

struct PlotRun {
    std::size_t changes = 0;
    std::size_t skipped_frames = 0;
};

PlotRun run_plot(const fs::path& dir, const std::string& plot_id, const Config& cfg, std::ostream& out) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string ext = e.path().extension().string();
        for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (e.is_regular_file() && (ext == ".jpg" || ext == ".jpeg")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    PlotRun run;
    std::vector<nadir::Frame> frames;
    for (const auto& f : files) {
        try {
            frames.push_back(nadir::load_frame(f));
        } catch (const Error& e) {
            ++run.skipped_frames;
            say(out, "warning: {} skipped [{}]: {}", f.filename().string(), to_string(e.code()), e.what());
        }
    }
    nadir::NadirStack stack = nadir::build_stack(std::move(frames), {plot_id, cfg.nominal_interval});
    fs::path gcp_file = dir / "gcps.csv";
    std::error_code ec;
    if (!fs::exists(gcp_file, ec)) fail(ErrorCode::InsufficientGcps, fmt::format("{} missing", gcp_file.string()));
    nadir::Georeference g = nadir::georeference(stack, nadir::parse_gcps_csv(read_text_file(gcp_file)));
    nadir::ProductOptions opt{cfg.ignition_threshold, cfg.ambient, nadir::kGradientEpsilon};
    nadir::ProductSummary s = nadir::write_products(stack, g, opt, cfg.output / "nadir" / plot_id, cfg.dry_run, &run.changes);
    say(out, "stack {}: {} frames, {} s, {} gaps, gsd {:.6g} m/px, mean ROS {:.6g} m/s over {} px, {} changes",
        plot_id, s.frames, csv::format_number(s.duration_s), stack.gaps.size(), g.gsd, s.interior_mean_speed,
        s.valid_speed_pixels, run.changes);
    return run;
}

}  // namespace

int cmd_stack(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        require(!cfg.input.empty(), "input");
        require(!cfg.output.empty(), "output");
        cfg.validate();
        std::error_code ec;
        if (!fs::is_directory(cfg.input, ec)) fail(ErrorCode::IoFailure, fmt::format("cannot read {}", cfg.input.string()));
        // A plot directory holds frames directly; otherwise each subdirectory is a plot.
        bool has_frames = false;
        std::vector<fs::path> plots;
        for (const auto& e : fs::directory_iterator(cfg.input)) {
            if (e.is_directory()) plots.push_back(e.path());
            std::string ext = e.path().extension().string();
            for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (e.is_regular_file() && (ext == ".jpg" || ext == ".jpeg")) has_frames = true;
        }
        std::sort(plots.begin(), plots.end());
        std::size_t skipped = 0, failed = 0, total = 0;
        auto one = [&](const fs::path& dir, const std::string& id) {
            ++total;
            try {
                skipped += run_plot(dir, id, cfg, out).skipped_frames;
            } catch (const Error& e) {
                ++failed;
                say(out, "error: plot {} [{}]: {}", id, to_string(e.code()), e.what());
            }
        };
        if (has_frames) {
            one(cfg.input, cfg.plot_id.value_or(cfg.input.filename().string()));
        } else {
            for (const auto& p : plots) {
                if (!cfg.plot_id || *cfg.plot_id == p.filename().string()) one(p, p.filename().string());
            }
        }
        if (total == 0) fail(ErrorCode::EmptyStack, "no nadir frames found");
        if (failed == total) return int(kTotalFailure);
        return failed > 0 || skipped > 0 ? int(kPartialFailure) : int(kOk);
    });
}

int cmd_export(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        require(!cfg.output.empty(), "output");
        cfg.validate();
        workspace::Workspace ws = workspace::Workspace::open(cfg.output);
        fs::path dest = cfg.dataset_dir.value_or(cfg.output / "dataset");
        label::ExportReport r =
            label::export_ml_dataset(ws.export_files(), ws.load_labels(), cfg.normalization, dest, cfg.dry_run);
        say(out, "export: {} pairs ({}), {} written, {} unchanged{}", r.rows.size(), cfg.normalization.to_string(),
            r.written, r.unchanged, cfg.dry_run ? " (dry run)" : "");
        return int(kOk);
    });
}

int cmd_fixtures(const Config& cfg, std::ostream& out) {
    return guarded(out, [&] {
        require(!cfg.output.empty(), "output");
        fixtures::Options o;
        o.pairs = cfg.fixture_pairs;
        o.video_pairs = cfg.fixture_videos;
        o.nadir = cfg.fixture_nadir;
        if (cfg.camera_model) o.camera_model = *cfg.camera_model;
        if (cfg.profiles_file) o.profile = load_profiles(cfg).get(o.camera_model);
        if (cfg.dry_run) {
            say(out, "plan: {} pairs, {} video pairs, nadir {} -> {}", o.pairs, o.video_pairs, o.nadir ? "yes" : "no",
                cfg.output.string());
            return int(kOk);
        }
        fixtures::Manifest m = fixtures::generate(cfg.output, o);
        say(out, "fixtures: {} files under {}", m.files.size(), cfg.output.string());
        return int(kOk);
    });
}

int cmd_serve(const Config& cfg, std::ostream& out, const std::function<void(httplib::Server&)>& started) {
    return guarded(out, [&] {
        require(!cfg.output.empty(), "output");
        cfg.validate();
        review::ServiceOptions opt;
        opt.overlay_threshold = cfg.overlay_threshold;
        opt.log = [&out](std::string_view line) { out << line << std::endl; };
        review::ReviewService svc(cfg.output, opt);
        if (cfg.dry_run) {
            say(out, "plan: serve {} pairs from {} on {}:{}", svc.workspace().pairs.size(), cfg.output.string(),
                cfg.host, cfg.port);
            return int(kOk);
        }
        httplib::Server server;
        review::mount_routes(server, svc, cfg.ui_dir);
        if (started) started(server);
        say(out, "serving {} pairs on http://{}:{}/", svc.workspace().pairs.size(), cfg.host, cfg.port);
        out.flush();
        if (!server.listen(cfg.host, cfg.port)) fail(ErrorCode::IoFailure, fmt::format("cannot listen on port {}", cfg.port));
        return int(kOk);
    });
}

}  // namespace flame::cli
